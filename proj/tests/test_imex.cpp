#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kdvh/imex.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

using namespace kdvh;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct MethodExpectation {
  std::string name;
  int order;
  ImexType type;
};

const std::vector<MethodExpectation>& expectations() {
  static const std::vector<MethodExpectation> table = {
      {"SSP2-ImEx(2,2,2)", 2, ImexType::invertible_diagonal},
      {"SSP2-ImEx(3,3,2)", 2, ImexType::invertible_diagonal},
      {"AGSA(3,4,2)", 2, ImexType::invertible_diagonal},
      {"SSP3-ImEx(3,4,3)", 3, ImexType::invertible_diagonal},
      {"ARS(2,2,2)", 2, ImexType::explicit_first_stage},
      {"ARS(4,4,3)", 3, ImexType::explicit_first_stage},
      {"ARK3(2)4L[2]SA", 3, ImexType::explicit_first_stage},
      {"ARK4(3)6L[2]SA", 4, ImexType::explicit_first_stage},
  };
  return table;
}

}  // namespace

TEST_CASE("registry holds the eight method pairs with unique names") {
  const auto& reg = tableau_registry();
  REQUIRE(reg.size() == 8);
  std::set<std::string> names;
  for (const auto& tab : reg) names.insert(tab.name);
  CHECK(names.size() == 8);
  for (const auto& exp : expectations()) CHECK(names.count(exp.name) == 1);
}

TEST_CASE("declared order, diagonal structure, and accuracy flags are as published") {
  for (const auto& exp : expectations()) {
    CAPTURE(exp.name);
    const ImexTableau& tab = find_tableau(exp.name);
    CHECK(tab.order == exp.order);
    ImexClassification cls = classify(tab);
    CHECK(cls.type == exp.type);
    CHECK(cls.order_verified >= exp.order);
    CHECK(cls.max_residual_at_order <= 1e-12);
  }
}

TEST_CASE("order conditions pass tightly at the declared order") {
  for (const auto& exp : expectations()) {
    CAPTURE(exp.name);
    const ImexTableau& tab = find_tableau(exp.name);
    std::vector<double> res = order_condition_residuals(tab, exp.order);
    CHECK(max_abs(res) <= 1e-12);
  }
}

TEST_CASE("order conditions fail decisively one order above the declared one") {
  for (const auto& exp : expectations()) {
    if (exp.order >= 4) continue;  // no order-5 condition set implemented
    CAPTURE(exp.name);
    const ImexTableau& tab = find_tableau(exp.name);
    std::vector<double> res = order_condition_residuals(tab, exp.order + 1);
    CHECK(max_abs(res) >= 1e-3);
  }
}

TEST_CASE("row sums reproduce the stored abscissae") {
  for (const auto& tab : tableau_registry()) {
    CAPTURE(tab.name);
    for (int i = 0; i < tab.stages; ++i) {
      double rex = 0.0, rim = 0.0;
      for (int j = 0; j < tab.stages; ++j) {
        rex += tab.aex(i, j);
        rim += tab.aim(i, j);
      }
      CHECK(std::abs(rex - tab.c_explicit[i]) <= 1e-13);
      CHECK(std::abs(rim - tab.c_implicit[i]) <= 1e-13);
    }
  }
}

TEST_CASE("triangular structure matches the additive pair contract") {
  for (const auto& tab : tableau_registry()) {
    CAPTURE(tab.name);
    for (int i = 0; i < tab.stages; ++i) {
      for (int j = i; j < tab.stages; ++j) CHECK(tab.aex(i, j) == 0.0);  // strictly lower
      for (int j = i + 1; j < tab.stages; ++j) CHECK(tab.aim(i, j) == 0.0);
    }
    ImexClassification cls = classify(tab);
    if (cls.type == ImexType::invertible_diagonal) {
      for (int i = 0; i < tab.stages; ++i) CHECK(std::abs(tab.aim(i, i)) > 1e-14);
    } else {
      CHECK(tab.aim(0, 0) == 0.0);
      for (int i = 1; i < tab.stages; ++i) CHECK(std::abs(tab.aim(i, i)) > 1e-14);
    }
  }
}

TEST_CASE("stiff-accuracy flags agree with the entries they summarize") {
  int gsa_count = 0;
  for (const auto& tab : tableau_registry()) {
    CAPTURE(tab.name);
    ImexClassification cls = classify(tab);
    const int s = tab.stages;
    bool sa = true, fsal = true;
    for (int j = 0; j < s; ++j) {
      if (std::abs(tab.aim(s - 1, j) - tab.b_implicit[j]) > 1e-14) sa = false;
      if (std::abs(tab.aex(s - 1, j) - tab.b_explicit[j]) > 1e-14) fsal = false;
    }
    CHECK(cls.stiffly_accurate == sa);
    CHECK(cls.fsal_explicit == fsal);
    CHECK(cls.globally_stiffly_accurate == (sa && fsal));
    if (cls.globally_stiffly_accurate) ++gsa_count;
  }
  // Both ARS pairs and AGSA carry the identity in both parts; the ARK pairs
  // are stiffly accurate in the implicit part only (their explicit last row
  // differs from the shared weights).
  CHECK(gsa_count == 3);
  CHECK(classify(find_tableau("ARS(2,2,2)")).globally_stiffly_accurate);
  CHECK(classify(find_tableau("ARS(4,4,3)")).globally_stiffly_accurate);
  CHECK(classify(find_tableau("AGSA(3,4,2)")).globally_stiffly_accurate);
  CHECK(classify(find_tableau("ARK3(2)4L[2]SA")).stiffly_accurate);
  CHECK_FALSE(classify(find_tableau("ARK3(2)4L[2]SA")).fsal_explicit);
  CHECK(classify(find_tableau("ARK4(3)6L[2]SA")).stiffly_accurate);
  CHECK_FALSE(classify(find_tableau("ARK4(3)6L[2]SA")).fsal_explicit);
}

TEST_CASE("lookup is case- and punctuation-insensitive") {
  CHECK(find_tableau("ARS(2,2,2)").name == "ARS(2,2,2)");
  CHECK(find_tableau("ars222").name == "ARS(2,2,2)");
  CHECK(find_tableau("ssp2-imex(2,2,2)").name == "SSP2-ImEx(2,2,2)");
  CHECK(find_tableau("SSP2IMEX332").name == "SSP2-ImEx(3,3,2)");
  CHECK(find_tableau("agsa342").name == "AGSA(3,4,2)");
  CHECK(find_tableau("ark4(3)6l[2]sa").name == "ARK4(3)6L[2]SA");
  CHECK_THROWS_AS(find_tableau("no-such-method"), std::invalid_argument);
  try {
    find_tableau("no-such-method");
  } catch (const std::invalid_argument& err) {
    // The error message lists the available names.
    CHECK(std::string(err.what()).find("ARS(2,2,2)") != std::string::npos);
  }
}

TEST_CASE("tableau_names lists every registry entry") {
  std::vector<std::string> names = tableau_names();
  REQUIRE(names.size() == 8);
  for (const auto& exp : expectations())
    CHECK(std::find(names.begin(), names.end(), exp.name) != names.end());
}

TEST_CASE("exact coefficient strings accompany every numeric entry") {
  for (const auto& tab : tableau_registry()) {
    CAPTURE(tab.name);
    const std::size_t nn = static_cast<std::size_t>(tab.stages) * tab.stages;
    CHECK(tab.a_explicit.size() == nn);
    CHECK(tab.a_implicit.size() == nn);
    CHECK(tab.a_explicit_exact.size() == nn);
    CHECK(tab.a_implicit_exact.size() == nn);
    CHECK(tab.b_explicit_exact.size() == static_cast<std::size_t>(tab.stages));
    CHECK(tab.b_implicit_exact.size() == static_cast<std::size_t>(tab.stages));
  }
}

TEST_CASE("registry serializes to parseable JSON with audit fields") {
  nlohmann::json doc = nlohmann::json::parse(tableau_registry_json());
  REQUIRE(doc.contains("tableaux"));
  REQUIRE(doc["tableaux"].is_array());
  REQUIRE(doc["tableaux"].size() == 8);
  for (const auto& entry : doc["tableaux"]) {
    CHECK(entry.contains("name"));
    CHECK(entry.contains("order"));
    CHECK(entry.contains("stages"));
  }
}
