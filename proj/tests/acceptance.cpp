// Acceptance checks. One PASS/FAIL line per criterion; exit code 1 when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oneshot/experiment_harness.hpp"
#include "oneshot/scalar_stability.hpp"
#include "oneshot/spectral_analysis.hpp"
#include "oneshot/step_bounds.hpp"
#include "oracles.hpp"

using namespace oneshot;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

const MethodKind kAll[] = {MethodKind::UsualGD, MethodKind::ShiftedGD, MethodKind::KStepOneShot,
                           MethodKind::ShiftedKStepOneShot};

LinearProblem scalar_problem(double b) {
  return LinearProblem(Matrix::Constant(1, 1, b), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Vector::Zero(1));
}

double scalar_radius(MethodSpec m, double b, double tau) {
  return spectral_radius(Matrix(scalar::scalar_iteration_matrix(m, {b, 1.0, 1.0}, tau)));
}

Outcome scalar_exactness() {
  Outcome o;
  const double bs[] = {-0.9, -0.6, -0.3, 0.0, 0.2, 0.3, 0.41, 0.6, 0.9};
  int failures = 0;
  for (double b : bs)
    for (int k = 1; k <= 6; ++k)
      for (MethodKind kind : {MethodKind::KStepOneShot, MethodKind::ShiftedKStepOneShot}) {
        const double thr = kind == MethodKind::KStepOneShot ? scalar::k_step_threshold(k, b).value
                                                            : scalar::shifted_k_step_threshold(k, b).value;
        const bool below = scalar_radius({kind, k}, b, 0.99 * thr) < 1.0;
        const bool above = scalar_radius({kind, k}, b, 1.01 * thr) >= 1.0;
        if (!(std::isfinite(thr) && below && above)) {
          ++failures;
          o.require(false, method_name(kind).data() + std::string(" k=") + std::to_string(k) + " b=" + fmt("%g", b));
        }
      }
  o.note(std::to_string(9 * 6 * 2 - failures) + "/108 cases exact");
  return o;
}

Outcome counterintuitive_instance() {
  Outcome o;
  const LinearProblem p = scalar_problem(0.2);
  const double rho_gd = predict_convergence(p, {MethodKind::UsualGD, 1}, 2.08).radius;
  const double rho_k2 = predict_convergence(p, {MethodKind::KStepOneShot, 2}, 2.08).radius;
  o.note("rho_gd=" + fmt("%.6f", rho_gd) + " rho_2step=" + fmt("%.6f", rho_k2));
  o.require(rho_gd >= 1.0, "usual GD radius >= 1");
  o.require(rho_gd - 1.0 >= 1e-3, "usual GD margin >= 1e-3");
  o.require(rho_k2 < 1.0, "2-step radius < 1");
  o.require(1.0 - rho_k2 >= 1e-3, "2-step margin >= 1e-3 (is " + fmt("%.3e", 1.0 - rho_k2) + ")");

  const RunSetup setup = default_setup(p);
  SolverConfig c;
  c.tau = 2.08;
  c.max_outer = 200000;
  const ConvergenceTrace gd = usual_gd(p, setup, c);
  const ConvergenceTrace k2 = k_step_one_shot(p, 2, setup, c);
  o.require(gd.status == RunStatus::Diverged, "usual GD solver diverges");
  o.require(k2.status == RunStatus::Converged, "2-step solver converges");
  o.note("gd " + std::string(status_name(gd.status)) + " after " + std::to_string(gd.outer_iterations()) +
         ", 2-step " + std::string(status_name(k2.status)) + " after " + std::to_string(k2.outer_iterations()));
  return o;
}

Outcome golden_values() {
  Outcome o;
  double worst_eta = 0.0, worst_kappa3 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double b = -0.99 + 1.98 * i / 99.0;
    worst_eta = std::max(worst_eta, std::abs(scalar::k_step_threshold(1, b).value - std::pow(1 - b, 3) * (1 + b)));
    worst_kappa3 = std::max(worst_kappa3, std::abs(scalar::formulas::kappa3(1, b) - 2 * (1 - b) * (1 - b)));
  }
  o.require(worst_eta <= 1e-14, "eta(1,b) closed form (max err " + fmt("%.2e", worst_eta) + ")");
  o.require(worst_kappa3 <= 1e-12, "kappa3(1,b) = 2(1-b)^2 (max err " + fmt("%.2e", worst_kappa3) + ")");
  const double kappa10 = scalar::shifted_k_step_threshold(1, 0.0).value;
  o.require(std::abs(kappa10 - (std::sqrt(5.0) - 1) / 2) <= 1e-12, "kappa(1,0) = (sqrt5-1)/2");
  const double root = scalar::sign_polynomial_roots(2).front();
  o.require(std::abs(root - (std::sqrt(2.0) - 1)) <= 1e-10, "f_2 root = sqrt2-1");
  for (int k = 2; k <= 6; ++k) {
    o.require(scalar::k_step_threshold(k, 0.0).value == 2.0, "eta(" + std::to_string(k) + ",0) = 2");
    o.require(scalar::shifted_k_step_threshold(k, 0.0).value == 1.0, "kappa(" + std::to_string(k) + ",0) = 1");
  }
  if (o.pass) o.note("all golden values match");
  return o;
}

// Random valid problem with n_u <= 8 and the given operator norm.
LinearProblem small_random(int index, double norm) {
  const Index nu = 2 + index % 7;
  const Index ns = 1 + index % 2;
  const Index nf = ns + index % 3;
  return random_contraction(nu, ns, nf, norm, 1000 + static_cast<std::uint64_t>(index));
}

Outcome matrix_bound_sufficiency() {
  Outcome o;
  int total = 0, ok = 0;
  for (int i = 0; i < 50; ++i) {
    const double norm = 0.1 * (1 + i % 9);
    const LinearProblem p = small_random(i, norm);
    for (MethodKind kind : {MethodKind::KStepOneShot, MethodKind::ShiftedKStepOneShot})
      for (int k : {1, 2, 3, 5}) {
        ++total;
        const bounds::StepBound b = bounds::matrix_bound(p, {kind, k});
        if (b.value > 0.0 && predict_convergence(p, {kind, k}, 0.999 * b.value).converges) {
          ++ok;
        } else {
          o.require(false, "problem " + std::to_string(i) + " " + method_name(kind).data() + " k=" + std::to_string(k));
        }
      }
  }
  o.note(std::to_string(ok) + "/" + std::to_string(total) + " converge at 0.999*bound");
  return o;
}

Outcome gd_bounds() {
  Outcome o;
  int cases = 0;
  for (int i = 0; i < 50; ++i) {
    const LinearProblem p = small_random(i, 0.1 * (1 + i % 9));
    const double usual = bounds::gd_bound(p).value;
    const double shifted = bounds::shifted_gd_bound(p).value;
    o.require(predict_convergence(p, {MethodKind::UsualGD, 1}, 0.999 * usual).converges,
              "usual GD at 0.999*bound, problem " + std::to_string(i));
    o.require(predict_convergence(p, {MethodKind::ShiftedGD, 1}, 0.999 * shifted).converges,
              "shifted GD at 0.999*bound, problem " + std::to_string(i));
    cases += 2;
  }
  for (double b : {-0.9, -0.5, 0.0, 0.2, 0.5, 0.9}) {
    for (double h : {0.5, 1.0, 2.0}) {
      const LinearProblem p(Matrix::Constant(1, 1, b), Matrix::Constant(1, 1, 1.3), Matrix::Constant(1, 1, h),
                            Vector::Zero(1));
      const double usual = bounds::gd_bound(p).value;
      const double shifted = bounds::shifted_gd_bound(p).value;
      o.require(predict_convergence(p, {MethodKind::UsualGD, 1}, 0.999 * usual).converges, "scalar usual below");
      o.require(predict_convergence(p, {MethodKind::UsualGD, 1}, 1.01 * usual).radius >= 1.0, "scalar usual above");
      o.require(predict_convergence(p, {MethodKind::ShiftedGD, 1}, 0.999 * shifted).converges, "scalar shifted below");
      o.require(predict_convergence(p, {MethodKind::ShiftedGD, 1}, 1.01 * shifted).radius >= 1.0, "scalar shifted above");
      cases += 4;
    }
  }
  o.note(std::to_string(cases) + " checks");
  return o;
}

Outcome structural_identities() {
  Outcome o;
  std::mt19937 rng(606);
  double worst_identity = 0.0, worst_slack = -1.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 6;
    const double norm = 0.05 + 0.9 * trial / 19.0;
    Matrix B = oracle::gaussian(n, n, rng);
    B *= norm / operator_norm(B);
    const Matrix H = oracle::gaussian(1 + trial % 4, n, rng);
    const double h2 = std::pow(operator_norm(H), 2);
    for (int k = 1; k <= 8; ++k) {
      const AccumulatedOperators ops = accumulated_operators(B, H, k);
      const Matrix Bk = matrix_power(B, k);
      const Matrix rhs = ops.geometric.transpose() * H.transpose() * H * ops.geometric;
      const Matrix lhs = ops.cross * ops.geometric - ops.cumulative_cross * Bk + ops.cumulative_cross;
      worst_identity = std::max(worst_identity, (lhs - rhs).norm() / rhs.norm());

      const double bk = std::pow(norm, k);
      const double slack_s = resolvent_constant(Bk) - 1.0 / (1.0 - bk);
      const double slack_t = operator_norm(ops.geometric) - (1.0 - bk) / (1.0 - norm);
      const double slack_x = operator_norm(ops.cumulative_cross) -
                             h2 * (1 - k * std::pow(norm, k - 1) + (k - 1) * bk) / ((1 - norm) * (1 - norm));
      worst_slack = std::max({worst_slack, slack_s, slack_t, slack_x});
    }
  }
  o.require(worst_identity <= 1e-10, "telescoping identity");
  o.require(worst_slack <= 1e-12, "norm bounds");
  o.note("max relative residual " + fmt("%.2e", worst_identity) + ", max bound excess " + fmt("%.2e", worst_slack));
  return o;
}

Outcome eigenvalue_one_excluded() {
  Outcome o;
  double closest = 1e300;
  for (int i = 0; i < 20; ++i) {
    const LinearProblem p = small_random(i, 0.1 * (1 + i % 9));
    const double tau = 0.5 * bounds::gd_bound(p).value;
    for (MethodKind kind : kAll)
      for (int k = 1; k <= 4; ++k) closest = std::min(closest, distance_to_one(iteration_matrix(p, {kind, k}, tau)));
  }
  o.require(closest > 1e-8, "distance to 1 exceeds 1e-8");
  double control = 0.0;
  for (int i = 0; i < 20; ++i) {
    const LinearProblem v = small_random(i, 0.1 * (1 + i % 9));
    const LinearProblem blind(v.B(), Matrix::Zero(v.state_dim(), v.param_dim()), v.H(), v.F());
    for (MethodKind kind : kAll)
      for (int k = 1; k <= 4; ++k) control = std::max(control, distance_to_one(iteration_matrix(blind, {kind, k}, 0.1)));
  }
  o.require(control < 1e-12, "M = 0 control reaches 1");
  o.note("min distance " + fmt("%.3e", closest) + ", control max distance " + fmt("%.1e", control));
  return o;
}

Outcome realification() {
  Outcome o;
  std::mt19937 rng(808);
  const std::complex<double> i(0.0, 1.0);
  double worst = 0.0;
  int valid_pairs = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + trial % 6;
    const ComplexMatrix B = 0.3 * (oracle::gaussian(n, n, rng).cast<std::complex<double>>() +
                                   i * oracle::gaussian(n, n, rng).cast<std::complex<double>>());
    const Index nf = 1 + trial % 3;
    const ComplexMatrix M = oracle::gaussian(n, 1, rng).cast<std::complex<double>>() +
                            i * oracle::gaussian(n, 1, rng).cast<std::complex<double>>();
    const ComplexMatrix H = oracle::gaussian(nf, n, rng).cast<std::complex<double>>() +
                            i * oracle::gaussian(nf, n, rng).cast<std::complex<double>>();
    const ComplexLinearProblem cp(B, M, H, ComplexVector::Zero(n));
    const LinearProblem rp = realify(cp);

    std::vector<std::complex<double>> expected, got;
    for (auto z : eigenvalues(B)) {
      expected.push_back(z);
      expected.push_back(std::conj(z));
    }
    for (auto z : eigenvalues(rp.B())) got.push_back(z);
    if (expected.size() != got.size()) {
      o.require(false, "spectrum size");
      continue;
    }
    for (auto z : expected) {
      auto it = std::min_element(got.begin(), got.end(),
                                 [&](auto a, auto b) { return std::abs(a - z) < std::abs(b - z); });
      worst = std::max(worst, std::abs(*it - z));
      got.erase(it);
    }
    if (validate(cp).valid) {
      ++valid_pairs;
      o.require(validate(rp).valid, "realified problem valid, trial " + std::to_string(trial));
    }
  }
  o.require(worst <= 1e-8, "spectra match as multisets");
  o.note("max eigenvalue mismatch " + fmt("%.2e", worst) + ", " + std::to_string(valid_pairs) + " valid complex problems");
  return o;
}

Outcome jury_marden_vs_oracle() {
  Outcome o;
  std::mt19937 rng(909);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int disagreements = 0, compared = 0, excluded = 0;
  const auto trial = [&](int degree) {
    std::vector<double> c(static_cast<std::size_t>(degree) + 1);
    for (double& x : c) x = u(rng);
    double worst = 0.0;
    for (auto z : oracle::polynomial_roots(c)) worst = std::max(worst, std::abs(z));
    if (std::abs(worst - 1.0) < 1e-8) {
      ++excluded;
      return;
    }
    ++compared;
    const bool inside = worst < 1.0;
    bool verdict = scalar::jury_marden(c).verdict == scalar::RootLocation::Inside;
    if (degree == 3) {
      const bool cubic = scalar::jury_marden_cubic(c[0] / c[3], c[1] / c[3], c[2] / c[3]);
      if (cubic != inside) ++disagreements;
    }
    if (verdict != inside) ++disagreements;
  };
  for (int n = 0; n < 1000; ++n) trial(3);
  for (int n = 0; n < 500; ++n) trial(4);
  o.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
  o.note(std::to_string(compared) + " polynomials compared, " + std::to_string(excluded) + " in boundary band");
  return o;
}

Outcome solver_matrix_equivalence() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const LinearProblem p = random_contraction(6, 2, 4, 0.3 + 0.1 * seed, seed);
    const double tau = 0.5 * bounds::gd_bound(p).value;
    for (MethodKind kind : kAll)
      for (int k : {1, 2, 3}) worst = std::max(worst, fixtures::matrix_equivalence_gap(p, {kind, k}, tau, 50));
  }
  o.require(worst <= 1e-10, "per-step deviation <= 1e-10");
  o.note("max relative deviation " + fmt("%.2e", worst));
  return o;
}

Outcome helmholtz_sweep() {
  Outcome o;
  HelmholtzOptions opt;
  opt.grid = 16;
  const LinearProblem p = helmholtz_toy(opt);
  const RunSetup setup = default_setup(p);
  const double base = bounds::gd_bound(p).value;

  std::vector<double> taus;
  for (double f : {0.25, 0.6, 0.95, 1.2, 2.5}) taus.push_back(f * base);
  const auto cells = sweep_grid({MethodKind::UsualGD, MethodKind::ShiftedGD, MethodKind::KStepOneShot,
                                 MethodKind::ShiftedKStepOneShot},
                                {1, 2}, taus);
  SweepOptions sweep;
  const auto results = run_sweep(p, setup, cells, sweep);
  int agree = 0, flagged = 0, mismatched = 0;
  for (const auto& r : results) {
    if (!r.trace) {
      o.require(false, "cell error: " + r.error);
      continue;
    }
    if (r.near_threshold) {
      ++flagged;
      continue;
    }
    const bool empirical = empirical_verdict(*r.trace) == Verdict::Converges;
    if (empirical == (r.oracle_radius < 1.0)) {
      ++agree;
    } else {
      ++mismatched;
      o.require(false, std::string(method_name(r.cell.method.kind)) + " k=" + std::to_string(r.cell.method.k) +
                           " tau=" + fmt("%.4g", r.cell.tau) + " rho=" + fmt("%.6f", r.oracle_radius));
    }
  }
  o.note(std::to_string(agree) + "/" + std::to_string(results.size()) + " verdicts agree, " +
         std::to_string(flagged) + " near threshold");

  // Trace approach towards usual gradient descent as k grows.
  SolverConfig c;
  c.tau = 0.6 * base;
  const ConvergenceTrace gd = usual_gd(p, setup, c);
  const double scale = (setup.sigma0 - *setup.sigma_exact).norm();
  std::vector<double> deviations;
  for (int k : {1, 2, 5, 10, 50}) {
    SolverConfig ck = c;
    ck.max_outer = gd.outer_iterations();
    ck.cost_tol = ck.grad_tol = -1.0;
    const ConvergenceTrace t = k_step_one_shot(p, k, setup, ck);
    double dev = 0.0;
    for (std::size_t n = 0; n < std::min(t.records.size(), gd.records.size()); ++n)
      dev = std::max(dev, (t.records[n].sigma - gd.records[n].sigma).norm() / scale);
    deviations.push_back(dev);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < deviations.size(); ++i) decreasing = decreasing && deviations[i] <= deviations[i - 1];
  o.require(decreasing, "deviation decreases with k");
  o.require(deviations.back() < 1e-4, "k=50 deviation below 1e-4");
  o.note("deviation k=1 " + fmt("%.2e", deviations.front()) + ", k=50 " + fmt("%.2e", deviations.back()));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double time_limit;
  };
  const std::vector<Criterion> criteria{
      {"AC1 scalar thresholds exact for both one-shot families", scalar_exactness, 5.0},
      {"AC2 b=0.2, tau=2.08: GD diverges, 2-step converges, margins >= 1e-3", counterintuitive_instance, 0.0},
      {"AC3 closed-form golden values", golden_values, 0.0},
      {"AC4 matrix bounds sufficient on 50 random problems", matrix_bound_sufficiency, 60.0},
      {"AC5 gradient-descent bounds", gd_bounds, 0.0},
      {"AC6 telescoping identity and accumulated-operator norm bounds", structural_identities, 0.0},
      {"AC7 eigenvalue 1 excluded, M=0 control", eigenvalue_one_excluded, 0.0},
      {"AC8 realification spectrum and validity", realification, 0.0},
      {"AC9 Jury-Marden vs companion-matrix roots", jury_marden_vs_oracle, 0.0},
      {"AC10 solver errors equal iteration-matrix powers", solver_matrix_equivalence, 0.0},
      {"AC11 Helmholtz sweep verdicts and k-step approach to GD", helmholtz_sweep, 0.0},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0) o.require(secs < c.time_limit, "runtime " + fmt("%.2f", secs) + " s");
    std::printf("[%s] %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
