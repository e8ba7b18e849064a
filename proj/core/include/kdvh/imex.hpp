#pragma once

#include <string>
#include <vector>

namespace kdvh {

/// One additive Runge-Kutta pair: an explicit tableau (a_explicit/b_explicit/
/// c_explicit) for the nonstiff term and a diagonally implicit tableau
/// (a_implicit/b_implicit/c_implicit) for the stiff term, sharing the stage
/// count. Matrices are s x s row-major; a_explicit is strictly lower
/// triangular and a_implicit lower triangular. The *_exact vectors hold a
/// printable exact form of every entry (same layout) so audits can see the
/// coefficients as published rather than as rounded doubles.
struct ImexTableau {
  std::string name;
  int stages = 0;
  int order = 0;  // classical order of the additive pair
  std::string notes;

  std::vector<double> a_explicit, b_explicit, c_explicit;
  std::vector<double> a_implicit, b_implicit, c_implicit;
  std::vector<std::string> a_explicit_exact, b_explicit_exact;
  std::vector<std::string> a_implicit_exact, b_implicit_exact;

  double aex(int i, int j) const { return a_explicit[static_cast<std::size_t>(i) * stages + j]; }
  double aim(int i, int j) const { return a_implicit[static_cast<std::size_t>(i) * stages + j]; }
};

/// Structure of the implicit diagonal. An invertible pair has every diagonal
/// entry nonzero, so every stage solves a linear system. An
/// explicit-first-stage pair has a zero (1,1) entry and an invertible trailing
/// block, so stage one is a plain copy of the step input.
enum class ImexType { invertible_diagonal, explicit_first_stage };

struct ImexClassification {
  ImexType type = ImexType::invertible_diagonal;
  bool stiffly_accurate = false;         // last implicit row equals b_implicit
  bool fsal_explicit = false;            // last explicit row equals b_explicit
  bool globally_stiffly_accurate = false;  // both of the above
  int order_verified = 0;                // highest order whose conditions all pass
  double max_residual_at_order = 0.0;    // worst residual among conditions up to order_verified
};

/// Computes structural flags from the entries and verifies order conditions
/// numerically (all two-colored rooted-tree conditions up to order 4).
/// Throws std::invalid_argument if a row sum disagrees with the stored
/// abscissa or the implicit diagonal fits neither structure.
ImexClassification classify(const ImexTableau& tab, double order_tolerance = 1e-12);

/// Residuals |lhs - rhs| of every order condition up to max_order (1..4) in a
/// fixed enumeration order: for each tree shape, the root/inner/leaf color
/// indices run explicit-first. Exposed so tests can pin individual values.
std::vector<double> order_condition_residuals(const ImexTableau& tab, int max_order);

/// The eight method pairs used throughout. Four have an invertible implicit
/// diagonal: SSP2-ImEx(2,2,2), SSP2-ImEx(3,3,2), AGSA(3,4,2),
/// SSP3-ImEx(3,4,3). Four have an explicit first stage: ARS(2,2,2),
/// ARS(4,4,3), ARK3(2)4L[2]SA, ARK4(3)6L[2]SA. Every entry is entered in its
/// published exact form; classification flags and declared orders are
/// recomputed and asserted at first use.
const std::vector<ImexTableau>& tableau_registry();

/// Case- and punctuation-insensitive lookup: "ars222", "ARS(2,2,2)" and
/// "ssp2-imex(2,2,2)" all resolve. Throws std::invalid_argument listing the
/// known names when nothing matches.
const ImexTableau& find_tableau(const std::string& name);

std::vector<std::string> tableau_names();

/// Full registry with exact coefficient strings and computed classification,
/// serialized as JSON for audit.
std::string tableau_registry_json(int indent = 2);

}  // namespace kdvh
