#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "kdvh/imex.hpp"
#include "kdvh/model.hpp"
#include "kdvh/operators.hpp"
#include "kdvh/relaxation.hpp"
#include "kdvh/stage_solver.hpp"

namespace kdvh {

struct TimeLoopOptions {
  bool relaxation = false;
  /// Linear solver for the implicit stages; defaults per operator family.
  std::optional<SolverBackend> backend;
  /// t counts as landed on t_final within this relative distance.
  double landing_rel_tol = 1e-12;
  /// For globally stiffly accurate pairs, verify after each step that the
  /// update equals the last stage (cheap structural invariant, off in
  /// production runs).
  bool check_gsa_identity = false;
};

struct StepRecord {
  long long index = 0;
  double t_before = 0.0;
  double dt = 0.0;     // step actually handed to the method
  double gamma = 1.0;  // relaxation factor; 1 when relaxation is off
  double t_after = 0.0;
  bool degenerate_relaxation = false;
  bool gamma_out_of_range = false;
};

struct IntegrationSummary {
  double t_end = 0.0;
  long long steps = 0;
  long long degenerate_relaxations = 0;
  long long out_of_range_relaxations = 0;
};

/// Called after every completed (and possibly relaxed) step with the current
/// flat state.
using StepObserver = std::function<void(const StepRecord&, const std::vector<double>&)>;

/// Fixed-step additive Runge-Kutta integrator for the three-field system
/// over the flat [u|v|w] layout. Stages with a nonzero implicit diagonal
/// solve (I - a_ii dt G) q_i = rhs_i; their stiff slopes are recovered from
/// the stage equation as (q_i - rhs_i)/(a_ii dt), which avoids re-applying
/// the 1/tau-scaled operator to nearly-equilibrated states. Explicit first
/// stages copy the input and apply G directly only when a later stage or the
/// update weights actually consume that slope.
class KdvhIntegrator {
 public:
  KdvhIntegrator(const ImexTableau& tableau, const OperatorSet& ops, double tau,
                 const TimeLoopOptions& opts = {});
  ~KdvhIntegrator();
  KdvhIntegrator(KdvhIntegrator&&) noexcept;
  KdvhIntegrator& operator=(KdvhIntegrator&&) noexcept;

  /// One raw method step of size dt, in place. No relaxation.
  void step(std::vector<double>& q, double dt);

  /// Marches q from t0 to t_final with base step dt. The final steps shrink
  /// to land on t_final; with relaxation enabled, landing accounts for the
  /// rescaled step sizes gamma*dt.
  IntegrationSummary run(std::vector<double>& q, double t0, double t_final, double dt,
                         const StepObserver& observer = {});

  const ImexTableau& tableau() const;
  const ImexClassification& classification() const;
  const OperatorSet& ops() const;
  double tau() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// The same machinery for the limit equation: convection explicit,
/// dispersion implicit. State is the plain grid function eta.
class KdvIntegrator {
 public:
  KdvIntegrator(const ImexTableau& tableau, const OperatorSet& ops,
                const TimeLoopOptions& opts = {});
  ~KdvIntegrator();
  KdvIntegrator(KdvIntegrator&&) noexcept;
  KdvIntegrator& operator=(KdvIntegrator&&) noexcept;

  void step(std::vector<double>& eta, double dt);
  IntegrationSummary run(std::vector<double>& eta, double t0, double t_final, double dt,
                         const StepObserver& observer = {});

  const ImexTableau& tableau() const;
  const ImexClassification& classification() const;
  const OperatorSet& ops() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kdvh
