#include "kdvh/imex.hpp"

#include <array>
#include <cassert>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace kdvh {

namespace {

// One coefficient together with its printable exact form.
struct Coef {
  double value = 0.0;
  std::string exact = "0";
};

// Integers up to 2^53 convert to double exactly, so the quotient below is the
// correctly rounded value of the published rational.
Coef rat(long long num, long long den) {
  Coef c;
  c.value = static_cast<double>(num) / static_cast<double>(den);
  c.exact = (den == 1) ? std::to_string(num)
            : std::to_string(num) + "/" + std::to_string(den);
  return c;
}

Coef sym(double value, std::string exact) { return Coef{value, std::move(exact)}; }

class TableauBuilder {
public:
  TableauBuilder(std::string name, int stages, int order, std::string notes) {
    t_.name = std::move(name);
    t_.stages = stages;
    t_.order = order;
    t_.notes = std::move(notes);
    const std::size_t nn = static_cast<std::size_t>(stages) * stages;
    t_.a_explicit.assign(nn, 0.0);
    t_.a_implicit.assign(nn, 0.0);
    t_.a_explicit_exact.assign(nn, "0");
    t_.a_implicit_exact.assign(nn, "0");
    t_.b_explicit.assign(stages, 0.0);
    t_.b_implicit.assign(stages, 0.0);
    t_.b_explicit_exact.assign(stages, "0");
    t_.b_implicit_exact.assign(stages, "0");
    t_.c_explicit.assign(stages, 0.0);
    t_.c_implicit.assign(stages, 0.0);
  }

  void ae(int i, int j, const Coef& c) {
    t_.a_explicit[idx(i, j)] = c.value;
    t_.a_explicit_exact[idx(i, j)] = c.exact;
  }
  void ai(int i, int j, const Coef& c) {
    t_.a_implicit[idx(i, j)] = c.value;
    t_.a_implicit_exact[idx(i, j)] = c.exact;
  }
  void be(int j, const Coef& c) {
    t_.b_explicit[j] = c.value;
    t_.b_explicit_exact[j] = c.exact;
  }
  void bi(int j, const Coef& c) {
    t_.b_implicit[j] = c.value;
    t_.b_implicit_exact[j] = c.exact;
  }
  void ce(int i, double v) { t_.c_explicit[i] = v; }
  void ci(int i, double v) { t_.c_implicit[i] = v; }

  ImexTableau take() { return std::move(t_); }

private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * t_.stages + j;
  }
  ImexTableau t_;
};

ImexTableau make_ssp2_imex_222() {
  const double g = 1.0 - 1.0 / std::sqrt(2.0);
  TableauBuilder b("SSP2-ImEx(2,2,2)", 2, 2, "gamma = 1 - 1/sqrt(2)");
  b.ae(1, 0, rat(1, 1));
  b.be(0, rat(1, 2));
  b.be(1, rat(1, 2));
  b.ce(0, 0.0);
  b.ce(1, 1.0);

  b.ai(0, 0, sym(g, "gamma"));
  b.ai(1, 0, sym(1.0 - 2.0 * g, "1 - 2*gamma"));
  b.ai(1, 1, sym(g, "gamma"));
  b.bi(0, rat(1, 2));
  b.bi(1, rat(1, 2));
  b.ci(0, g);
  b.ci(1, 1.0 - g);
  return b.take();
}

ImexTableau make_ssp2_imex_332() {
  TableauBuilder b("SSP2-ImEx(3,3,2)", 3, 2, "");
  b.ae(1, 0, rat(1, 2));
  b.ae(2, 0, rat(1, 2));
  b.ae(2, 1, rat(1, 2));
  for (int j = 0; j < 3; ++j) b.be(j, rat(1, 3));
  b.ce(0, 0.0);
  b.ce(1, 0.5);
  b.ce(2, 1.0);

  b.ai(0, 0, rat(1, 4));
  b.ai(1, 1, rat(1, 4));
  for (int j = 0; j < 3; ++j) b.ai(2, j, rat(1, 3));
  for (int j = 0; j < 3; ++j) b.bi(j, rat(1, 3));
  b.ci(0, 0.25);
  b.ci(1, 0.25);
  b.ci(2, 1.0);
  return b.take();
}

ImexTableau make_agsa_342() {
  const Coef ct2 = rat(-139833537, 38613965);
  const Coef c1 = rat(168999711, 74248304);
  const Coef at31 = rat(85870407, 49798258);
  const Coef gam = rat(202439144, 118586105);
  const Coef at32 = rat(-121251843, 1756367063);
  const Coef a33 = rat(12015439, 183058594);
  const Coef a31 = rat(-6418119, 169001713);
  const Coef a21 = rat(44004295, 24775207);
  const Coef a32 = rat(-748951821, 1043823139);
  // derived weights: b_explicit[0] = 1 - 1/6 - 2/3, b_implicit[0] = 1 - gamma - 1/3
  const Coef bt1 = rat(1, 6);
  const Coef b1 = sym(1.0 - gam.value - 1.0 / 3.0, "2/3 - 202439144/118586105");

  TableauBuilder b("AGSA(3,4,2)", 4, 2,
          "gamma = 202439144/118586105; abscissae are the row sums");
  b.ae(1, 0, ct2);
  b.ae(2, 0, at31);
  b.ae(2, 1, at32);
  b.ae(3, 0, bt1);
  b.ae(3, 1, rat(1, 6));
  b.ae(3, 2, rat(2, 3));
  b.be(0, bt1);
  b.be(1, rat(1, 6));
  b.be(2, rat(2, 3));
  b.ce(0, 0.0);
  b.ce(1, ct2.value);
  b.ce(2, at31.value + at32.value);
  b.ce(3, 1.0);

  b.ai(0, 0, c1);
  b.ai(1, 0, a21);
  b.ai(1, 1, gam);
  b.ai(2, 0, a31);
  b.ai(2, 1, a32);
  b.ai(2, 2, a33);
  b.ai(3, 0, b1);
  b.ai(3, 1, rat(1, 3));
  b.ai(3, 3, gam);
  b.bi(0, b1);
  b.bi(1, rat(1, 3));
  b.bi(3, gam);
  b.ci(0, c1.value);
  b.ci(1, a21.value + gam.value);
  b.ci(2, a31.value + a32.value + a33.value);
  b.ci(3, 1.0);
  return b.take();
}

ImexTableau make_ssp3_imex_343() {
  const Coef al = sym(0.241694260788, "0.241694260788");
  const Coef bt = sym(0.0604235651970, "0.0604235651970");
  const Coef et = sym(0.12915286960590, "0.12915286960590");
  TableauBuilder b("SSP3-ImEx(3,4,3)", 4, 3,
          "alpha = 0.241694260788, beta = 0.0604235651970, eta = 0.12915286960590");
  b.ae(2, 1, rat(1, 1));
  b.ae(3, 1, rat(1, 4));
  b.ae(3, 2, rat(1, 4));
  b.be(1, rat(1, 6));
  b.be(2, rat(1, 6));
  b.be(3, rat(2, 3));
  b.ce(0, 0.0);
  b.ce(1, 0.0);
  b.ce(2, 1.0);
  b.ce(3, 0.5);

  b.ai(0, 0, al);
  b.ai(1, 0, sym(-al.value, "-alpha"));
  b.ai(1, 1, al);
  b.ai(2, 1, sym(1.0 - al.value, "1 - alpha"));
  b.ai(2, 2, al);
  b.ai(3, 0, bt);
  b.ai(3, 1, et);
  b.ai(3, 2, sym(0.5 - bt.value - et.value - al.value, "1/2 - beta - eta - alpha"));
  b.ai(3, 3, al);
  b.bi(1, rat(1, 6));
  b.bi(2, rat(1, 6));
  b.bi(3, rat(2, 3));
  b.ci(0, al.value);
  b.ci(1, 0.0);
  b.ci(2, 1.0);
  b.ci(3, 0.5);
  return b.take();
}

ImexTableau make_ars_222() {
  const double g = 1.0 - 1.0 / std::sqrt(2.0);
  const double d = 1.0 - 1.0 / (2.0 * g);
  const Coef cg = sym(g, "gamma");
  const Coef cd = sym(d, "delta");
  const Coef c1md = sym(1.0 - d, "1 - delta");
  const Coef c1mg = sym(1.0 - g, "1 - gamma");
  TableauBuilder b("ARS(2,2,2)", 3, 2,
          "gamma = 1 - 1/sqrt(2), delta = 1 - 1/(2*gamma)");
  b.ae(1, 0, cg);
  b.ae(2, 0, cd);
  b.ae(2, 1, c1md);
  b.be(0, cd);
  b.be(1, c1md);
  b.ce(0, 0.0);
  b.ce(1, g);
  b.ce(2, 1.0);

  b.ai(1, 1, cg);
  b.ai(2, 1, c1mg);
  b.ai(2, 2, cg);
  b.bi(1, c1mg);
  b.bi(2, cg);
  b.ci(0, 0.0);
  b.ci(1, g);
  b.ci(2, 1.0);
  return b.take();
}

ImexTableau make_ars_443() {
  TableauBuilder b("ARS(4,4,3)", 5, 3, "");
  b.ae(1, 0, rat(1, 2));
  b.ae(2, 0, rat(11, 18));
  b.ae(2, 1, rat(1, 18));
  b.ae(3, 0, rat(5, 6));
  b.ae(3, 1, rat(-5, 6));
  b.ae(3, 2, rat(1, 2));
  b.ae(4, 0, rat(1, 4));
  b.ae(4, 1, rat(7, 4));
  b.ae(4, 2, rat(3, 4));
  b.ae(4, 3, rat(-7, 4));
  b.be(0, rat(1, 4));
  b.be(1, rat(7, 4));
  b.be(2, rat(3, 4));
  b.be(3, rat(-7, 4));

  b.ai(1, 1, rat(1, 2));
  b.ai(2, 1, rat(1, 6));
  b.ai(2, 2, rat(1, 2));
  b.ai(3, 1, rat(-1, 2));
  b.ai(3, 2, rat(1, 2));
  b.ai(3, 3, rat(1, 2));
  b.ai(4, 1, rat(3, 2));
  b.ai(4, 2, rat(-3, 2));
  b.ai(4, 3, rat(1, 2));
  b.ai(4, 4, rat(1, 2));
  b.bi(1, rat(3, 2));
  b.bi(2, rat(-3, 2));
  b.bi(3, rat(1, 2));
  b.bi(4, rat(1, 2));

  const double c[5] = {0.0, 0.5, 2.0 / 3.0, 0.5, 1.0};
  for (int i = 0; i < 5; ++i) {
    b.ce(i, c[i]);
    b.ci(i, c[i]);
  }
  return b.take();
}

ImexTableau make_ark3_24l2sa() {
  const Coef g = rat(1767732205903LL, 4055673282236LL);
  const Coef c2 = rat(1767732205903LL, 2027836641118LL);  // = 2*gamma
  const Coef b1 = rat(1471266399579LL, 7840856788654LL);
  const Coef b2 = rat(-4482444167858LL, 7529755066697LL);
  const Coef b3 = rat(11266239266428LL, 11593286722821LL);

  TableauBuilder b("ARK3(2)4L[2]SA", 4, 3, "gamma = 1767732205903/4055673282236");
  b.ae(1, 0, c2);
  b.ae(2, 0, rat(5535828885825LL, 10492691773637LL));
  b.ae(2, 1, rat(788022342437LL, 10882634858940LL));
  b.ae(3, 0, rat(6485989280629LL, 16251701735622LL));
  b.ae(3, 1, rat(-4246266847089LL, 9704473918619LL));
  b.ae(3, 2, rat(10755448449292LL, 10357097424841LL));

  b.ai(1, 0, g);
  b.ai(1, 1, g);
  b.ai(2, 0, rat(2746238789719LL, 10658868560708LL));
  b.ai(2, 1, rat(-640167445237LL, 6845629431997LL));
  b.ai(2, 2, g);
  b.ai(3, 0, b1);
  b.ai(3, 1, b2);
  b.ai(3, 2, b3);
  b.ai(3, 3, g);

  const Coef bw[4] = {b1, b2, b3, g};
  for (int j = 0; j < 4; ++j) {
    b.be(j, bw[j]);
    b.bi(j, bw[j]);
  }
  const double c[4] = {0.0, c2.value, 0.6, 1.0};
  for (int i = 0; i < 4; ++i) {
    b.ce(i, c[i]);
    b.ci(i, c[i]);
  }
  return b.take();
}

ImexTableau make_ark4_36l2sa() {
  TableauBuilder b("ARK4(3)6L[2]SA", 6, 4, "");
  b.ae(1, 0, rat(1, 2));
  b.ae(2, 0, rat(13861, 62500));
  b.ae(2, 1, rat(6889, 62500));
  b.ae(3, 0, rat(-116923316275LL, 2393684061468LL));
  b.ae(3, 1, rat(-2731218467317LL, 15368042101831LL));
  b.ae(3, 2, rat(9408046702089LL, 11113171139209LL));
  b.ae(4, 0, rat(-451086348788LL, 2902428689909LL));
  b.ae(4, 1, rat(-2682348792572LL, 7519795681897LL));
  b.ae(4, 2, rat(12662868775082LL, 11960479115383LL));
  b.ae(4, 3, rat(3355817975965LL, 11060851509271LL));
  b.ae(5, 0, rat(647845179188LL, 3216320057751LL));
  b.ae(5, 1, rat(73281519250LL, 8382639484533LL));
  b.ae(5, 2, rat(552539513391LL, 3454668386233LL));
  b.ae(5, 3, rat(3354512671639LL, 8306763924573LL));
  b.ae(5, 4, rat(4040, 17871));

  b.ai(1, 0, rat(1, 4));
  b.ai(1, 1, rat(1, 4));
  b.ai(2, 0, rat(8611, 62500));
  b.ai(2, 1, rat(-1743, 31250));
  b.ai(2, 2, rat(1, 4));
  b.ai(3, 0, rat(5012029, 34652500));
  b.ai(3, 1, rat(-654441, 2922500));
  b.ai(3, 2, rat(174375, 388108));
  b.ai(3, 3, rat(1, 4));
  b.ai(4, 0, rat(15267082809LL, 155376265600LL));
  b.ai(4, 1, rat(-71443401LL, 120774400LL));
  b.ai(4, 2, rat(730878875LL, 902184768LL));
  b.ai(4, 3, rat(2285395LL, 8070912LL));
  b.ai(4, 4, rat(1, 4));

  const Coef bw[6] = {rat(82889, 524892), rat(0, 1),       rat(15625, 83664),
            rat(69875, 102672), rat(-2260, 8211), rat(1, 4)};
  for (int j = 0; j < 6; ++j) {
    b.ai(5, j, bw[j]);
    b.be(j, bw[j]);
    b.bi(j, bw[j]);
  }
  const double c[6] = {0.0, 0.5, 83.0 / 250.0, 31.0 / 50.0, 17.0 / 20.0, 1.0};
  for (int i = 0; i < 6; ++i) {
    b.ce(i, c[i]);
    b.ci(i, c[i]);
  }
  return b.take();
}

std::vector<double> matvec(const std::vector<double>& a, int s, const std::vector<double>& x) {
  std::vector<double> y(static_cast<std::size_t>(s), 0.0);
  for (int i = 0; i < s; ++i) {
    double acc = 0.0;
    for (int j = 0; j < s; ++j) acc += a[static_cast<std::size_t>(i) * s + j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> hadamard(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] * y[i];
  return z;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

// Appends the residuals of all conditions of exactly the given order. The
// two-colored rooted trees up to order 4 and their quadrature values:
//   order 1: sum(b_r) = 1
//   order 2: b_r . c_l = 1/2
//   order 3: b_r . (A_m c_l) = 1/6,  b_r . (c_a c_b) = 1/3
//   order 4: b_r . (c_a c_b c_c) = 1/4,  b_r . (c_a (A_m c_l)) = 1/8,
//            b_r . A_m (c_a c_b) = 1/12, b_r . A_m A_n c_l = 1/24
// Colors run explicit-first; unordered child pairs/triples enumerate as
// (ee, ei, ii) and (eee, eei, eii, iii).
void append_order_conditions(const ImexTableau& t, int order, std::vector<double>& out) {
  const std::array<const std::vector<double>*, 2> b{&t.b_explicit, &t.b_implicit};
  const std::array<const std::vector<double>*, 2> c{&t.c_explicit, &t.c_implicit};
  auto amul = [&](int m, const std::vector<double>& x) {
    return matvec(m == 0 ? t.a_explicit : t.a_implicit, t.stages, x);
  };
  static constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 0}, {0, 1}, {1, 1}}};
  static constexpr std::array<std::array<int, 3>, 4> kTriples{
    {{0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 1}}};

  switch (order) {
    case 1:
      for (int r = 0; r < 2; ++r) {
        double s = 0.0;
        for (double w : *b[r]) s += w;
        out.push_back(std::abs(s - 1.0));
      }
      break;
    case 2:
      for (int r = 0; r < 2; ++r)
        for (int l = 0; l < 2; ++l) out.push_back(std::abs(dot(*b[r], *c[l]) - 0.5));
      break;
    case 3:
      for (int r = 0; r < 2; ++r)
        for (int m = 0; m < 2; ++m)
          for (int l = 0; l < 2; ++l)
            out.push_back(std::abs(dot(*b[r], amul(m, *c[l])) - 1.0 / 6.0));
      for (int r = 0; r < 2; ++r)
        for (const auto& p : kPairs)
          out.push_back(
            std::abs(dot(*b[r], hadamard(*c[p[0]], *c[p[1]])) - 1.0 / 3.0));
      break;
    case 4:
      for (int r = 0; r < 2; ++r)
        for (const auto& tr : kTriples)
          out.push_back(std::abs(
            dot(*b[r], hadamard(*c[tr[0]], hadamard(*c[tr[1]], *c[tr[2]]))) - 0.25));
      for (int r = 0; r < 2; ++r)
        for (int a = 0; a < 2; ++a)
          for (int m = 0; m < 2; ++m)
            for (int l = 0; l < 2; ++l)
              out.push_back(std::abs(
                dot(*b[r], hadamard(*c[a], amul(m, *c[l]))) - 0.125));
      for (int r = 0; r < 2; ++r)
        for (int m = 0; m < 2; ++m)
          for (const auto& p : kPairs)
            out.push_back(std::abs(
              dot(*b[r], amul(m, hadamard(*c[p[0]], *c[p[1]]))) - 1.0 / 12.0));
      for (int r = 0; r < 2; ++r)
        for (int m = 0; m < 2; ++m)
          for (int n = 0; n < 2; ++n)
            for (int l = 0; l < 2; ++l)
              out.push_back(std::abs(
                dot(*b[r], amul(m, amul(n, *c[l]))) - 1.0 / 24.0));
      break;
    default:
      throw std::invalid_argument("order conditions implemented for orders 1..4 only");
  }
}

void validate_shape(const ImexTableau& t) {
  const int s = t.stages;
  const std::size_t nn = static_cast<std::size_t>(s) * s;
  if (s < 1 || t.a_explicit.size() != nn || t.a_implicit.size() != nn ||
    t.b_explicit.size() != static_cast<std::size_t>(s) ||
    t.b_implicit.size() != static_cast<std::size_t>(s) ||
    t.c_explicit.size() != static_cast<std::size_t>(s) ||
    t.c_implicit.size() != static_cast<std::size_t>(s)) {
    throw std::invalid_argument("tableau '" + t.name + "' has inconsistent dimensions");
  }
  for (int i = 0; i < s; ++i) {
    for (int j = i; j < s; ++j) {
      if (t.aex(i, j) != 0.0)
        throw std::invalid_argument("tableau '" + t.name +
                      "': explicit matrix is not strictly lower triangular");
      if (j > i && t.aim(i, j) != 0.0)
        throw std::invalid_argument("tableau '" + t.name +
                      "': implicit matrix is not lower triangular");
    }
  }
  for (int i = 0; i < s; ++i) {
    double se = 0.0, si = 0.0;
    for (int j = 0; j < s; ++j) {
      se += t.aex(i, j);
      si += t.aim(i, j);
    }
    const double tol_e = 1e-13 * std::max(1.0, std::abs(t.c_explicit[i]));
    const double tol_i = 1e-13 * std::max(1.0, std::abs(t.c_implicit[i]));
    if (std::abs(se - t.c_explicit[i]) > tol_e || std::abs(si - t.c_implicit[i]) > tol_i)
      throw std::invalid_argument("tableau '" + t.name + "': row " + std::to_string(i) +
                    " sum disagrees with its abscissa");
  }
}

std::string squash(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (std::isalnum(static_cast<unsigned char>(ch)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

}  // namespace

std::vector<double> order_condition_residuals(const ImexTableau& tab, int max_order) {
  if (max_order < 1 || max_order > 4)
    throw std::invalid_argument("max_order must be in 1..4");
  std::vector<double> out;
  for (int p = 1; p <= max_order; ++p) append_order_conditions(tab, p, out);
  return out;
}

ImexClassification classify(const ImexTableau& tab, double order_tolerance) {
  validate_shape(tab);
  const int s = tab.stages;

  ImexClassification cl;
  bool all_nonzero = true, trailing_nonzero = true;
  for (int i = 0; i < s; ++i) {
    if (tab.aim(i, i) == 0.0) {
      all_nonzero = false;
      if (i > 0) trailing_nonzero = false;
    }
  }
  if (all_nonzero) {
    cl.type = ImexType::invertible_diagonal;
  } else if (tab.aim(0, 0) == 0.0 && trailing_nonzero && s > 1) {
    cl.type = ImexType::explicit_first_stage;
  } else {
    throw std::invalid_argument("tableau '" + tab.name +
                  "': implicit diagonal fits neither supported structure");
  }

  auto rows_match = [s](const ImexTableau& t, const std::vector<double>& a,
             const std::vector<double>& bvec) {
    double scale = 1.0;
    for (double w : bvec) scale = std::max(scale, std::abs(w));
    for (int j = 0; j < s; ++j) {
      if (std::abs(a[static_cast<std::size_t>(s - 1) * s + j] - bvec[j]) > 1e-14 * scale)
        return false;
    }
    return true;
  };
  cl.stiffly_accurate = rows_match(tab, tab.a_implicit, tab.b_implicit);
  cl.fsal_explicit = rows_match(tab, tab.a_explicit, tab.b_explicit);
  cl.globally_stiffly_accurate = cl.stiffly_accurate && cl.fsal_explicit;

  cl.order_verified = 0;
  cl.max_residual_at_order = 0.0;
  for (int p = 1; p <= 4; ++p) {
    std::vector<double> res;
    append_order_conditions(tab, p, res);
    double worst = 0.0;
    for (double r : res) worst = std::max(worst, r);
    if (worst > order_tolerance) break;
    cl.order_verified = p;
    cl.max_residual_at_order = std::max(cl.max_residual_at_order, worst);
  }
  return cl;
}

const std::vector<ImexTableau>& tableau_registry() {
  struct Expected {
    ImexType type;
    bool sa, fsal;
  };
  static const std::vector<ImexTableau> registry = [] {
    std::vector<ImexTableau> v;
    std::vector<Expected> want;
    v.push_back(make_ssp2_imex_222());
    want.push_back({ImexType::invertible_diagonal, false, false});
    v.push_back(make_ssp2_imex_332());
    want.push_back({ImexType::invertible_diagonal, true, false});
    v.push_back(make_agsa_342());
    want.push_back({ImexType::invertible_diagonal, true, true});
    v.push_back(make_ssp3_imex_343());
    want.push_back({ImexType::invertible_diagonal, false, false});
    v.push_back(make_ars_222());
    want.push_back({ImexType::explicit_first_stage, true, true});
    v.push_back(make_ars_443());
    want.push_back({ImexType::explicit_first_stage, true, true});
    v.push_back(make_ark3_24l2sa());
    want.push_back({ImexType::explicit_first_stage, true, false});
    v.push_back(make_ark4_36l2sa());
    want.push_back({ImexType::explicit_first_stage, true, false});

    for (std::size_t i = 0; i < v.size(); ++i) {
      const ImexClassification cl = classify(v[i]);
      const Expected& e = want[i];
      if (cl.type != e.type || cl.stiffly_accurate != e.sa || cl.fsal_explicit != e.fsal ||
        cl.globally_stiffly_accurate != (e.sa && e.fsal) ||
        cl.order_verified < v[i].order) {
        throw std::logic_error("tableau registry self-audit failed for '" + v[i].name +
                   "'");
      }
    }
    return v;
  }();
  return registry;
}

std::vector<std::string> tableau_names() {
  std::vector<std::string> names;
  for (const ImexTableau& t : tableau_registry()) names.push_back(t.name);
  return names;
}

const ImexTableau& find_tableau(const std::string& name) {
  const std::string q = squash(name);
  const std::vector<ImexTableau>& reg = tableau_registry();
  for (const ImexTableau& t : reg) {
    if (squash(t.name) == q) return t;
  }
  // fall back to unique-prefix matching so short CLI spellings work
  const ImexTableau* hit = nullptr;
  if (q.size() >= 3) {
    for (const ImexTableau& t : reg) {
      if (squash(t.name).rfind(q, 0) == 0) {
        if (hit != nullptr) {
          hit = nullptr;
          break;
        }
        hit = &t;
      }
    }
  }
  if (hit != nullptr) return *hit;

  std::string msg = "unknown tableau '" + name + "'; known methods:";
  for (const ImexTableau& t : reg) msg += " " + t.name;
  throw std::invalid_argument(msg);
}

std::string tableau_registry_json(int indent) {
  nlohmann::json root;
  root["tableaux"] = nlohmann::json::array();
  for (const ImexTableau& t : tableau_registry()) {
    const ImexClassification cl = classify(t);
    nlohmann::json j;
    j["name"] = t.name;
    j["stages"] = t.stages;
    j["order"] = t.order;
    if (!t.notes.empty()) j["notes"] = t.notes;

    auto matrix = [&](const std::vector<double>& a) {
      nlohmann::json rows = nlohmann::json::array();
      for (int i = 0; i < t.stages; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int jj = 0; jj < t.stages; ++jj)
          row.push_back(a[static_cast<std::size_t>(i) * t.stages + jj]);
        rows.push_back(row);
      }
      return rows;
    };
    auto matrix_exact = [&](const std::vector<std::string>& a) {
      nlohmann::json rows = nlohmann::json::array();
      for (int i = 0; i < t.stages; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int jj = 0; jj < t.stages; ++jj)
          row.push_back(a[static_cast<std::size_t>(i) * t.stages + jj]);
        rows.push_back(row);
      }
      return rows;
    };
    j["a_explicit"] = matrix(t.a_explicit);
    j["a_implicit"] = matrix(t.a_implicit);
    j["a_explicit_exact"] = matrix_exact(t.a_explicit_exact);
    j["a_implicit_exact"] = matrix_exact(t.a_implicit_exact);
    j["b_explicit"] = t.b_explicit;
    j["b_implicit"] = t.b_implicit;
    j["b_explicit_exact"] = t.b_explicit_exact;
    j["b_implicit_exact"] = t.b_implicit_exact;
    j["c_explicit"] = t.c_explicit;
    j["c_implicit"] = t.c_implicit;

    nlohmann::json cj;
    cj["implicit_diagonal"] = cl.type == ImexType::invertible_diagonal
                   ? "invertible"
                   : "explicit_first_stage";
    cj["stiffly_accurate"] = cl.stiffly_accurate;
    cj["fsal_explicit"] = cl.fsal_explicit;
    cj["globally_stiffly_accurate"] = cl.globally_stiffly_accurate;
    cj["order_verified"] = cl.order_verified;
    cj["max_residual_at_order"] = cl.max_residual_at_order;
    j["classification"] = cj;

    root["tableaux"].push_back(j);
  }
  return root.dump(indent);
}

}  // namespace kdvh
