#include "kdvh/time_loop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kdvh {

namespace {

/// Marks stages whose stiff slope must come from a direct operator
/// application: the implicit diagonal vanishes there, yet a later stage or
/// the update weights consume that slope. For the ARS pairs the first
/// implicit column is zero, so no direct application ever happens.
std::vector<char> direct_slope_mask(const ImexTableau& tab) {
  std::vector<char> mask(static_cast<std::size_t>(tab.stages), 0);
  for (int i = 0; i < tab.stages; ++i) {
    if (tab.aim(i, i) != 0.0) continue;
    bool used = tab.b_implicit[static_cast<std::size_t>(i)] != 0.0;
    for (int k = i + 1; k < tab.stages && !used; ++k) used = tab.aim(k, i) != 0.0;
    mask[static_cast<std::size_t>(i)] = used ? 1 : 0;
  }
  return mask;
}

struct EngineWorkspace {
  std::vector<std::vector<double>> f, g;
  std::vector<double> rhs, last_stage;
};

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

/// One additive RK step over a flat state; shared by both systems. Stages
/// with a_ii != 0 recover their stiff slope from the stage equation,
/// g_i = (q_i - rhs_i) / (a_ii dt).
template <class EvalF, class EvalG, class Solve>
void additive_rk_step(const ImexTableau& tab, const std::vector<char>& direct_slope,
                      std::vector<double>& q, double dt, EvalF&& eval_f, EvalG&& eval_g,
                      Solve&& solve, EngineWorkspace& ws, bool check_gsa) {
  const int s = tab.stages;
  const std::size_t len = q.size();
  ws.f.resize(static_cast<std::size_t>(s));
  ws.g.resize(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) {
    ws.f[static_cast<std::size_t>(i)].resize(len);
    ws.g[static_cast<std::size_t>(i)].resize(len);
  }

  for (int i = 0; i < s; ++i) {
    ws.rhs = q;
    for (int j = 0; j < i; ++j) {
      const double ae = tab.aex(i, j), ai = tab.aim(i, j);
      if (ae != 0.0) axpy(dt * ae, ws.f[static_cast<std::size_t>(j)], ws.rhs);
      if (ai != 0.0) axpy(dt * ai, ws.g[static_cast<std::size_t>(j)], ws.rhs);
    }
    const double a = tab.aim(i, i);
    std::vector<double>& gi = ws.g[static_cast<std::size_t>(i)];
    std::vector<double> stage;
    if (a == 0.0) {
      stage = ws.rhs;
      if (direct_slope[static_cast<std::size_t>(i)]) eval_g(stage, gi);
    } else {
      stage = solve(ws.rhs, a * dt);
      const double inv = 1.0 / (a * dt);
      for (std::size_t k = 0; k < len; ++k) gi[k] = (stage[k] - ws.rhs[k]) * inv;
    }
    eval_f(stage, ws.f[static_cast<std::size_t>(i)]);
    if (check_gsa && i == s - 1) ws.last_stage = std::move(stage);
  }

  for (int i = 0; i < s; ++i) {
    const double be = tab.b_explicit[static_cast<std::size_t>(i)];
    const double bi = tab.b_implicit[static_cast<std::size_t>(i)];
    if (be != 0.0) axpy(dt * be, ws.f[static_cast<std::size_t>(i)], q);
    if (bi != 0.0) axpy(dt * bi, ws.g[static_cast<std::size_t>(i)], q);
  }

  if (check_gsa) {
    double diff = 0.0, scale = 1.0;
    for (std::size_t k = 0; k < len; ++k) {
      diff = std::max(diff, std::abs(q[k] - ws.last_stage[k]));
      scale = std::max(scale, std::abs(q[k]));
    }
    if (diff > 1e-12 * scale)
      throw std::runtime_error("globally stiffly accurate update deviates from last stage by " +
                               std::to_string(diff));
  }
}

template <class StepFn, class RelaxFn>
IntegrationSummary run_loop(std::vector<double>& q, double t0, double t_final, double dt,
                            const TimeLoopOptions& opts, const StepObserver& observer,
                            StepFn&& do_step, RelaxFn&& do_relax, std::vector<double>& q_old) {
  if (!(dt > 0.0)) throw std::invalid_argument("time loop: dt must be positive");
  if (t_final < t0) throw std::invalid_argument("time loop: t_final must not precede t0");

  IntegrationSummary sum;
  double t = t0;
  const double guard =
      std::max(opts.landing_rel_tol * std::max(1.0, std::abs(t_final)), 1e-9 * dt);
  const long long cap = 2 * std::llround((t_final - t0) / dt + 2.0) + 10000;
  long long index = 0;
  while (t_final - t > guard) {
    if (index >= cap)
      throw std::runtime_error("time loop failed to land on t_final within its step budget");
    const double h = std::min(dt, t_final - t);
    StepRecord rec;
    rec.index = index;
    rec.t_before = t;
    rec.dt = h;
    if (opts.relaxation) {
      q_old = q;
      do_step(q, h);
      const RelaxationResult r = do_relax(q_old, q);
      rec.gamma = r.gamma;
      rec.degenerate_relaxation = r.degenerate;
      rec.gamma_out_of_range = r.out_of_range;
      sum.degenerate_relaxations += r.degenerate ? 1 : 0;
      sum.out_of_range_relaxations += r.out_of_range ? 1 : 0;
      t += r.gamma * h;
    } else {
      do_step(q, h);
      t += h;
    }
    rec.t_after = t;
    ++index;
    if (observer) observer(rec, q);
  }
  sum.t_end = t;
  sum.steps = index;
  return sum;
}

}  // namespace

struct KdvhIntegrator::Impl {
  ImexTableau tab;
  ImexClassification cls;
  OperatorSet ops;
  double tau;
  TimeLoopOptions opts;
  KdvhStageSolver solver;
  std::vector<char> direct_slope;
  EngineWorkspace ws;
  std::vector<double> q_old;

  Impl(const ImexTableau& t, const OperatorSet& o, double tau_, const TimeLoopOptions& op)
      : tab(t),
        cls(classify(t)),
        ops(o),
        tau(tau_),
        opts(op),
        solver(o, tau_, op.backend.value_or(default_backend(o.kind))),
        direct_slope(direct_slope_mask(t)) {}

  void step(std::vector<double>& q, double dt) {
    if (q.size() != static_cast<std::size_t>(3) * ops.grid.n)
      throw std::invalid_argument("step: state does not match grid");
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    additive_rk_step(
        tab, direct_slope, q, dt,
        [this](const std::vector<double>& x, std::vector<double>& out) {
          kdvh_split_f(ops, x, out);
        },
        [this](const std::vector<double>& x, std::vector<double>& out) {
          kdvh_split_g(ops, tau, x, out);
        },
        [this](const std::vector<double>& rhs, double adt) { return solver.solve(rhs, adt); },
        ws, opts.check_gsa_identity && cls.globally_stiffly_accurate);
  }
};

KdvhIntegrator::KdvhIntegrator(const ImexTableau& tableau, const OperatorSet& ops, double tau,
                               const TimeLoopOptions& opts)
    : impl_(new Impl(tableau, ops, tau, opts)) {}
KdvhIntegrator::~KdvhIntegrator() = default;
KdvhIntegrator::KdvhIntegrator(KdvhIntegrator&&) noexcept = default;
KdvhIntegrator& KdvhIntegrator::operator=(KdvhIntegrator&&) noexcept = default;

void KdvhIntegrator::step(std::vector<double>& q, double dt) { impl_->step(q, dt); }

IntegrationSummary KdvhIntegrator::run(std::vector<double>& q, double t0, double t_final,
                                       double dt, const StepObserver& observer) {
  Impl& im = *impl_;
  return run_loop(
      q, t0, t_final, dt, im.opts, observer,
      [&im](std::vector<double>& state, double h) { im.step(state, h); },
      [&im](const std::vector<double>& qo, std::vector<double>& qn) {
        return relax_energy(im.ops, im.tau, qo, qn);
      },
      im.q_old);
}

const ImexTableau& KdvhIntegrator::tableau() const { return impl_->tab; }
const ImexClassification& KdvhIntegrator::classification() const { return impl_->cls; }
const OperatorSet& KdvhIntegrator::ops() const { return impl_->ops; }
double KdvhIntegrator::tau() const { return impl_->tau; }

struct KdvIntegrator::Impl {
  ImexTableau tab;
  ImexClassification cls;
  OperatorSet ops;
  TimeLoopOptions opts;
  KdvStageSolver solver;
  std::vector<char> direct_slope;
  EngineWorkspace ws;
  std::vector<double> q_old;

  Impl(const ImexTableau& t, const OperatorSet& o, const TimeLoopOptions& op)
      : tab(t),
        cls(classify(t)),
        ops(o),
        opts(op),
        solver(o, op.backend.value_or(default_backend(o.kind))),
        direct_slope(direct_slope_mask(t)) {}

  void step(std::vector<double>& eta, double dt) {
    if (eta.size() != static_cast<std::size_t>(ops.grid.n))
      throw std::invalid_argument("step: state does not match grid");
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    additive_rk_step(
        tab, direct_slope, eta, dt,
        [this](const std::vector<double>& x, std::vector<double>& out) {
          kdv_split_f(ops, x, out);
        },
        [this](const std::vector<double>& x, std::vector<double>& out) {
          kdv_split_g(ops, x, out);
        },
        [this](const std::vector<double>& rhs, double adt) { return solver.solve(rhs, adt); },
        ws, opts.check_gsa_identity && cls.globally_stiffly_accurate);
  }
};

KdvIntegrator::KdvIntegrator(const ImexTableau& tableau, const OperatorSet& ops,
                             const TimeLoopOptions& opts)
    : impl_(new Impl(tableau, ops, opts)) {}
KdvIntegrator::~KdvIntegrator() = default;
KdvIntegrator::KdvIntegrator(KdvIntegrator&&) noexcept = default;
KdvIntegrator& KdvIntegrator::operator=(KdvIntegrator&&) noexcept = default;

void KdvIntegrator::step(std::vector<double>& eta, double dt) { impl_->step(eta, dt); }

IntegrationSummary KdvIntegrator::run(std::vector<double>& eta, double t0, double t_final,
                                      double dt, const StepObserver& observer) {
  Impl& im = *impl_;
  return run_loop(
      eta, t0, t_final, dt, im.opts, observer,
      [&im](std::vector<double>& state, double h) { im.step(state, h); },
      [&im](const std::vector<double>& qo, std::vector<double>& qn) {
        return relax_energy_kdv(im.ops, qo, qn);
      },
      im.q_old);
}

const ImexTableau& KdvIntegrator::tableau() const { return impl_->tab; }
const ImexClassification& KdvIntegrator::classification() const { return impl_->cls; }
const OperatorSet& KdvIntegrator::ops() const { return impl_->ops; }

}  // namespace kdvh
