#include "optcon/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "optcon/costs.hpp"
#include "optcon/dac.hpp"
#include "optcon/lti_system.hpp"

namespace optcon {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = u(rng);
  return m;
}

VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

LtiSystem random_system(std::mt19937_64& rng, int dx, int du, double delta, double w_max) {
  LtiSystem sys;
  sys.A = random_matrix(rng, dx, dx);
  const double a_norm = spectral_norm(sys.A);
  if (a_norm > 0.0) sys.A *= (1.0 - delta) / a_norm;
  sys.B = random_matrix(rng, dx, du);
  sys.delta = delta;
  sys.kappa_b = std::max(sys.B.norm(), 1e-12);
  sys.w_max = w_max;
  return sys;
}

struct SuiteResult {
  bool ok = true;
  double worst = 0.0;  // worst observed margin (metric-specific)
};

// Central finite differences of the affine level share, entry by entry.
SuiteResult check_gradients(int tuples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 3), pdist(1, 4), level_dist(0, 5);
  std::uniform_real_distribution<double> delta_dist(0.05, 0.9);
  SuiteResult res;
  for (int n = 0; n < tuples; ++n) {
    const int dx = dim(rng), du = dim(rng), p = pdist(rng), level = level_dist(rng);
    const LtiSystem sys = random_system(rng, dx, du, delta_dist(rng), 1.0);
    const MatrixPowerCache pows(sys.A, std::max(level, 1));
    LinearCost cost;
    cost.alpha = random_vector(rng, dx);
    cost.beta = random_vector(rng, du);
    const VectorXd window = random_vector(rng, dx * p);
    const VectorXd w_single = random_vector(rng, dx);
    MatrixXd M = random_matrix(rng, du, dx * p);

    const MatrixXd grad = partial_gradient(level, cost, sys, pows, window);
    MatrixXd fd(du, dx * p);
    const double h = 1e-5;
    for (int r = 0; r < du; ++r) {
      for (int c = 0; c < dx * p; ++c) {
        MatrixXd up = M, dn = M;
        up(r, c) += h;
        dn(r, c) -= h;
        fd(r, c) = (partial_value(level, cost, sys, pows, window, w_single, up) -
                    partial_value(level, cost, sys, pows, window, w_single, dn)) /
                   (2.0 * h);
      }
    }
    const double scale = std::max(grad.norm(), 1e-9);
    const double rel = (fd - grad).norm() / scale;
    res.worst = std::max(res.worst, rel);
    if (rel > 1e-6 && (fd - grad).norm() > 1e-9) res.ok = false;
  }
  return res;
}

SuiteResult check_gradient_bounds(int tuples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 3), pdist(1, 4), level_dist(0, 5);
  std::uniform_real_distribution<double> delta_dist(0.05, 0.9);
  SuiteResult res;
  for (int n = 0; n < tuples; ++n) {
    const int dx = dim(rng), du = dim(rng), p = pdist(rng), level = level_dist(rng);
    const LtiSystem sys = random_system(rng, dx, du, delta_dist(rng), 1.0);
    const MatrixPowerCache pows(sys.A, std::max(level, 1));
    LinearCost cost;
    cost.alpha = random_vector(rng, dx);
    cost.beta = random_vector(rng, du);
    // Feasible window: p rounds of disturbances within the declared bound.
    std::vector<VectorXd> w;
    for (int i = 0; i < p + 1; ++i) {
      VectorXd wi = random_vector(rng, dx);
      if (wi.norm() > sys.w_max) wi *= sys.w_max / wi.norm();
      w.push_back(wi);
    }
    const VectorXd window = stacked_window(w, static_cast<int>(w.size()), p, dx);
    const double bound =
        gradient_bound(level, sys, cost.alpha.norm(), cost.beta.norm(), p);
    const double norm = partial_gradient(level, cost, sys, pows, window).norm();
    res.worst = std::max(res.worst, norm - bound);
    if (norm > bound + 1e-9) res.ok = false;
  }
  return res;
}

SuiteResult check_truncated_state(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 3), pdist(1, 3);
  SuiteResult res;
  for (int n = 0; n < instances; ++n) {
    const int dx = dim(rng), du = dim(rng), p = pdist(rng);
    const int T = 300;
    const double kappa_m = 1.0, epsilon = 1.0;
    const LtiSystem sys = random_system(rng, dx, du, 0.1, 1.0);
    const int d = compute_memory_d(sys, kappa_m, p, T, epsilon);
    const MatrixPowerCache pows(sys.A, std::max(d, 1));

    std::vector<MatrixXd> policies;
    std::vector<VectorXd> w;
    std::vector<VectorXd> xs;  // xs[t-1] = x_t
    std::vector<VectorXd> us;
    std::vector<LinearCost> costs;
    VectorXd x = VectorXd::Zero(dx);
    std::uniform_real_distribution<double> radius(0.0, 1.0);
    for (int t = 1; t <= T; ++t) {
      MatrixXd M = project_to_ball(random_matrix(rng, du, dx * p), kappa_m * radius(rng));
      const VectorXd u = compute_action(M, stacked_window(w, t - 1, p, dx));
      VectorXd wt = random_vector(rng, dx);
      if (wt.norm() > sys.w_max) wt *= sys.w_max / wt.norm();
      LinearCost c;
      c.slot = t;
      c.alpha = random_vector(rng, dx);
      c.beta = random_vector(rng, du);
      xs.push_back(x);
      us.push_back(u);
      policies.push_back(std::move(M));
      costs.push_back(std::move(c));
      x = step(sys, x, u, wt);
      w.push_back(std::move(wt));
    }

    const double budget = epsilon / T;
    double lipschitz = 0.0;
    double drift_sum = 0.0;
    const MatrixXd zero_policy = MatrixXd::Zero(du, dx * p);
    for (int t = 1; t <= T; ++t) {
      const VectorXd xh = truncated_state(sys, pows, policies, w, t, d, p);
      const double err = (xh - xs[static_cast<size_t>(t - 1)]).norm();
      res.worst = std::max(res.worst, err);
      if (err > budget + 1e-12) res.ok = false;
      if (t <= d + 1 && err > 1e-9) res.ok = false;

      // The reconstructed cost must follow the same level-share split the
      // learners differentiate, so grade that identity here as well.
      const LinearCost& c = costs[static_cast<size_t>(t - 1)];
      double share_sum = 0.0;
      for (int i = 0; i <= d; ++i) {
        const int ps = t - i;
        const MatrixXd& M = ps >= 1 ? policies[static_cast<size_t>(ps - 1)] : zero_policy;
        share_sum += partial_value(i, c, sys, pows,
                                   stacked_window(w, window_lag(i, t), p, dx),
                                   i >= 1 ? disturbance_at(w, single_lag(i, t), dx)
                                          : VectorXd::Zero(dx),
                                   M);
      }
      const double true_cost = eval_cost(c, xs[static_cast<size_t>(t - 1)],
                                         us[static_cast<size_t>(t - 1)]);
      drift_sum += std::abs(true_cost - share_sum);
      lipschitz = std::max(lipschitz,
                           std::sqrt(c.alpha.squaredNorm() + c.beta.squaredNorm()));
    }
    if (drift_sum > lipschitz * epsilon) res.ok = false;
  }
  return res;
}

SuiteResult check_separability(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 3), pdist(1, 2);
  SuiteResult res;
  for (int n = 0; n < instances; ++n) {
    const int dx = dim(rng), du = dim(rng), p = pdist(rng);
    const int T = 50, d = 3;
    const LtiSystem sys = random_system(rng, dx, du, 0.2, 1.0);
    const MatrixPowerCache pows(sys.A, std::max(d, 1));
    std::vector<MatrixXd> policies;
    std::vector<VectorXd> w;
    std::vector<LinearCost> costs;
    for (int t = 1; t <= T; ++t) {
      policies.push_back(project_to_ball(random_matrix(rng, du, dx * p), 1.0));
      w.push_back(random_vector(rng, dx));
      LinearCost c;
      c.slot = t;
      c.alpha = random_vector(rng, dx);
      c.beta = random_vector(rng, du);
      costs.push_back(std::move(c));
    }
    const auto share = [&](int level, int cost_slot, const MatrixXd& M) {
      return partial_value(level, costs[static_cast<size_t>(cost_slot - 1)], sys, pows,
                           stacked_window(w, window_lag(level, cost_slot), p, dx),
                           level >= 1 ? disturbance_at(w, single_lag(level, cost_slot), dx)
                                      : VectorXd::Zero(dx),
                           M);
    };
    // Grouped by the slot whose cost is being paid ...
    double by_cost_slot = 0.0;
    for (int t = 1; t <= T; ++t)
      for (int i = 0; i <= std::min(d, t - 1); ++i)
        by_cost_slot += share(i, t, policies[static_cast<size_t>(t - i - 1)]);
    // ... and regrouped by the slot whose decision is being charged.
    double by_decision = 0.0;
    for (int t = 1; t <= T; ++t)
      for (int i = 0; i <= d && t + i <= T; ++i)
        by_decision += share(i, t + i, policies[static_cast<size_t>(t - 1)]);
    const double diff = std::abs(by_cost_slot - by_decision);
    res.worst = std::max(res.worst, diff);
    if (diff > 1e-9 * std::max(1.0, std::abs(by_cost_slot))) res.ok = false;
  }
  return res;
}

void report_line(std::ostream& out, const char* name, const SuiteResult& res, int& failures) {
  out << (res.ok ? "[ ok ] " : "[FAIL] ") << name << " (worst " << res.worst << ")\n";
  if (!res.ok) ++failures;
}

}  // namespace

int run_self_check(bool quick, std::ostream& out) {
  int failures = 0;
  report_line(out, "level-share gradients match central finite differences",
              check_gradients(quick ? 50 : 200, 11), failures);
  report_line(out, "level-share gradient norms respect their analytic ceilings",
              check_gradient_bounds(quick ? 50 : 200, 12), failures);
  report_line(out, "truncated states track the plant within the per-slot budget",
              check_truncated_state(quick ? 2 : 5, 13), failures);
  report_line(out, "slot costs separate across the delayed decisions exactly",
              check_separability(quick ? 2 : 5, 14), failures);
  out << (failures == 0 ? "self-check passed" : "self-check FAILED") << "\n";
  return failures;
}

}  // namespace optcon
