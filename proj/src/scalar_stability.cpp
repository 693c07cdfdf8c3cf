#include "oneshot/scalar_stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oneshot::scalar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double x) { return x * x; }

void check_threshold_args(int k, double b) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (!(std::abs(b) < 1.0)) throw std::invalid_argument("|b| must be below 1");
}

// k - (k+1) b + b^{k+1}, positive on (-1, 1).
double shifted_denominator(int k, double b) { return k - (k + 1) * b + std::pow(b, k + 1); }

// k - (k+1) b + k b^k - (k-1) b^{k+1}
double plain_denominator(int k, double b) {
  return k - (k + 1) * b + k * std::pow(b, k) - (k - 1) * std::pow(b, k + 1);
}

// (1 - k b^{k-1} + (k-1) b^k) / (1-b)^2, evaluated as a finite sum.
double accumulated_weight(int k, double b) {
  double sum = 0.0;
  double power = 1.0;
  for (int l = 1; l < k; ++l) {
    sum += l * power;
    power *= b;
  }
  return sum;
}

double geometric_sum(int k, double b) {
  double sum = 0.0;
  double power = 1.0;
  for (int j = 0; j < k; ++j) {
    sum += power;
    power *= b;
  }
  return sum;
}

ScalarThreshold pick(int k, double b, std::initializer_list<std::pair<const char*, double>> options) {
  ScalarThreshold out{k, b, kInf, "unconstrained"};
  for (const auto& [name, value] : options) {
    if (value < out.value) {
      out.value = value;
      out.branch = name;
    }
  }
  return out;
}

double bisect(int k, double lo, double hi) {
  // sign_polynomial changes sign once on (lo, hi); f(lo) and f(hi) differ in sign
  // or f(hi) vanishes at hi = 1 with f < 0 just below it.
  const bool lo_positive = sign_polynomial(k, lo) > 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((sign_polynomial(k, mid) > 0.0) == lo_positive) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void ScalarProblem::check() const {
  if (!(std::abs(b) < 1.0)) throw std::invalid_argument("scalar problem needs |b| < 1");
  if (h == 0.0 || m == 0.0 || !std::isfinite(h) || !std::isfinite(m))
    throw std::invalid_argument("scalar problem needs finite nonzero h and m");
}

bool jury_marden_cubic(double a0, double a1, double a2) {
  const bool c1 = (a0 - 1.0) * (a0 + 1.0) < 0.0;
  const bool c2 = (a0 * a0 - a2 * a0 + a1 - 1.0) * (a0 * a0 + a2 * a0 - a1 - 1.0) > 0.0;
  const bool c3 = (a0 + a2 - a1 - 1.0) * (a0 + a2 + a1 + 1.0) < 0.0;
  return c1 && c2 && c3;
}

MardenTable jury_marden(std::span<const double> coefficients) {
  if (coefficients.empty()) throw std::invalid_argument("jury_marden: empty polynomial");
  if (coefficients.back() == 0.0) throw std::invalid_argument("jury_marden: leading coefficient is zero");
  MardenTable table;
  table.rows.emplace_back(coefficients.begin(), coefficients.end());
  const std::size_t n = coefficients.size() - 1;
  table.verdict = RootLocation::Inside;

  for (std::size_t j = 0; j < n; ++j) {
    const std::vector<double>& p = table.rows.back();
    const std::size_t deg = p.size() - 1;
    std::vector<double> next(deg);
    for (std::size_t i = 0; i < deg; ++i) next[i] = p[0] * p[i] - p[deg] * p[deg - i];
    table.rows.push_back(std::move(next));

    const double lead = table.rows.back()[0];
    if (table.verdict != RootLocation::Inside) continue;
    if (lead == 0.0) {
      table.verdict = RootLocation::Indeterminate;
    } else if ((j == 0 && lead > 0.0) || (j > 0 && lead < 0.0)) {
      table.verdict = RootLocation::NotInside;
    }
  }
  return table;
}

double sign_polynomial(int k, double b) {
  return 1.0 - 2.0 * k * std::pow(b, k - 1) * (1.0 - b) - std::pow(b, 2 * k);
}

std::vector<double> sign_polynomial_roots(int k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (k == 1) return {};
  if (k % 2 == 0) return {bisect(k, 0.0, 1.0)};
  return {bisect(k, -1.0, 0.0), bisect(k, 0.0, 1.0)};
}

namespace formulas {

double eta21(int k, double b) {
  return sq(1.0 - b) * (1.0 + std::pow(b, k)) * sq(1.0 - std::pow(b, k)) /
         (std::pow(b, k - 1) * plain_denominator(k, b));
}

double eta22(int k, double b) {
  return -sq(1.0 - b) * std::pow(1.0 + std::pow(b, k), 3) /
         (std::pow(b, k - 1) * plain_denominator(k, b));
}

double eta3(int k, double b) {
  return 2.0 * sq(1.0 - b) * sq(1.0 + std::pow(b, k)) / sign_polynomial(k, b);
}

double kappa11(int k, double b) {
  return sq(1.0 - b) * (1.0 + std::pow(b, 2 * k)) / (std::pow(b, k - 1) * shifted_denominator(k, b));
}

double kappa12(int k, double b) {
  return sq(1.0 - b) * (-1.0 + std::pow(b, 2 * k)) / (std::pow(b, k - 1) * shifted_denominator(k, b));
}

double kappa21(int k, double b, RootForm form) {
  const double s = std::pow(b, k);
  const double y = accumulated_weight(k, b);
  if (form == RootForm::Naive) {
    const double t = geometric_sum(k, b);
    const double v = t * t - y;
    return ((2 * s * s - 2 * s - 1) * v - y +
            std::sqrt((-4 * s + 5) * v * v + y * y + 2 * (-2 * s * s + 2 * s + 1) * v * y)) /
           (2 * v * v);
  }
  const double D = shifted_denominator(k, b);
  const double v = std::pow(b, k - 1) * D / sq(1.0 - b);
  const double root = std::sqrt((-4 * s + 5) * v * v + y * y + 2 * (-2 * s * s + 2 * s + 1) * v * y);
  return b * sq(1.0 - b) * (s - 1.0) / D +
         2.0 * (1.0 - s + b * sq(1.0 - b) * (1.0 - s) * y / D) / (y + v + root);
}

double kappa22(int k, double b) {
  const double s = std::pow(b, k);
  const double y = accumulated_weight(k, b);
  const double v = std::pow(b, k - 1) * shifted_denominator(k, b) / sq(1.0 - b);
  return ((2 * s * s + 2 * s + 1) * v + y +
          std::sqrt((8 * s * s + 12 * s + 5) * v * v + y * y + 2 * (2 * s * s + 2 * s + 1) * v * y)) /
         (2 * v * v);
}

double kappa3(int k, double b) {
  return 2.0 * sq(1.0 - b) * sq(1.0 + std::pow(b, k)) / (-sign_polynomial(k, b));
}

}  // namespace formulas

ScalarThreshold k_step_threshold(int k, double b) {
  check_threshold_args(k, b);
  using namespace formulas;
  if (k == 1) return pick(k, b, {{"eta21", eta21(1, b)}});
  if (b == 0.0) return pick(k, b, {{"zero-operator", 2.0}});
  const std::vector<double> r = sign_polynomial_roots(k);
  if (k % 2 == 1) {
    if (b <= r[0] || b >= r[1]) return pick(k, b, {{"eta21", eta21(k, b)}});
    return pick(k, b, {{"eta21", eta21(k, b)}, {"eta3", eta3(k, b)}});
  }
  if (b >= r[0]) return pick(k, b, {{"eta21", eta21(k, b)}});
  if (b > 0.0) return pick(k, b, {{"eta21", eta21(k, b)}, {"eta3", eta3(k, b)}});
  return pick(k, b, {{"eta22", eta22(k, b)}, {"eta3", eta3(k, b)}});
}

ScalarThreshold shifted_k_step_threshold(int k, double b, RootForm form) {
  check_threshold_args(k, b);
  using namespace formulas;
  if (k == 1) {
    return pick(k, b, {{"kappa11", kappa11(1, b)}, {"kappa21", kappa21(1, b, form)},
                       {"kappa22", kappa22(1, b)}, {"kappa3", kappa3(1, b)}});
  }
  if (b == 0.0) return pick(k, b, {{"zero-operator", 1.0}});
  const std::vector<double> r = sign_polynomial_roots(k);
  const bool with_third = k % 2 == 1 ? (b < r[0] || b > r[1]) : b > r[0];
  if (b < 0.0 && k % 2 == 0) {
    return pick(k, b, {{"kappa12", kappa12(k, b)}, {"kappa21", kappa21(k, b, form)},
                       {"kappa22", kappa22(k, b)}});
  }
  if (with_third) {
    return pick(k, b, {{"kappa11", kappa11(k, b)}, {"kappa21", kappa21(k, b, form)},
                       {"kappa22", kappa22(k, b)}, {"kappa3", kappa3(k, b)}});
  }
  return pick(k, b, {{"kappa11", kappa11(k, b)}, {"kappa21", kappa21(k, b, form)},
                     {"kappa22", kappa22(k, b)}});
}

double usual_gd_threshold(double b) { return 2.0 * sq(1.0 - b); }
double shifted_gd_threshold(double b) { return sq(1.0 - b); }

Eigen::Matrix3d scalar_iteration_matrix(MethodSpec method, const ScalarProblem& sp, double tau) {
  sp.check();
  const double b = sp.b;
  const double h2 = sp.h * sp.h;
  const double m = sp.m;
  Eigen::Matrix3d T = Eigen::Matrix3d::Zero();
  T(2, 0) = -m * tau;
  T(2, 2) = 1.0;
  switch (method.kind) {
    case MethodKind::UsualGD:
      T(0, 0) = -h2 * m * m * tau / sq(1.0 - b);
      T(1, 0) = -m * m * tau / (1.0 - b);
      [[fallthrough]];
    case MethodKind::ShiftedGD:
      T(0, 2) = h2 * m / sq(1.0 - b);
      T(1, 2) = m / (1.0 - b);
      break;
    case MethodKind::KStepOneShot:
    case MethodKind::ShiftedKStepOneShot: {
      const int k = method.k;
      if (k < 1) throw std::invalid_argument("k must be at least 1");
      const double bk = std::pow(b, k);
      const double t = geometric_sum(k, b);
      const double x = h2 * accumulated_weight(k, b);
      T(0, 0) = bk;
      T(0, 1) = k * h2 * std::pow(b, k - 1);
      T(0, 2) = m * x;
      T(1, 1) = bk;
      T(1, 2) = m * t;
      if (method.kind == MethodKind::KStepOneShot) {
        T(0, 0) -= m * m * x * tau;
        T(1, 0) = -m * m * t * tau;
      }
      break;
    }
  }
  return T;
}

}  // namespace oneshot::scalar
