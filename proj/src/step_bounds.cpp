#include "oneshot/step_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "oneshot/spectral_analysis.hpp"

namespace oneshot::bounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);

double sq(double x) { return x * x; }

// tau < numerator / denominator, with a zero denominator meaning no constraint.
double ratio(double numerator, double denominator) {
  return denominator > 0.0 ? numerator / denominator : kInf;
}

void finish(Cases& c) {
  c.value = std::min({c.real, c.complex1, c.complex2, c.complex3, c.complex4});
}

void check_b(double b) {
  if (!(b >= 0.0 && b < 1.0)) throw std::invalid_argument("operator norm b must lie in [0, 1)");
}

// Sector constant for the third complex case; the angle multiplier is 5/2
// for the shifted family and 3/2 for the non-shifted one.
double sector_constant(double theta0, double delta0, double multiplier) {
  const double a = multiplier * theta0;
  return (1.0 + 2.0 * delta0 * std::sin(a) + sq(delta0)) / sq(std::cos(a));
}

double fourth_case_weight(double theta0) {
  return std::sin(kPi / 2.0 - 3.0 * theta0) + std::cos(2.0 * theta0);
}

double inner_weight(int k, double b) {
  // 1 - k b^{k-1} + (k-1) b^k
  return 1.0 - k * std::pow(b, k - 1) + (k - 1) * std::pow(b, k);
}

}  // namespace

Family family_of(MethodKind kind) {
  switch (kind) {
    case MethodKind::ShiftedGD:
    case MethodKind::ShiftedKStepOneShot: return Family::Shifted;
    case MethodKind::UsualGD:
    case MethodKind::KStepOneShot: return Family::NonShifted;
  }
  return Family::NonShifted;
}

Params Params::defaults(Family family, int k) {
  Params p;
  p.theta0 = family == Family::Shifted ? kPi / 6.0 : kPi / 4.0;
  if (k >= 2) p.theta0 *= 0.99;
  p.delta0 = 1.0;
  return p;
}

void Params::check(Family family, int k) const {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (!(delta0 > 0.0) || !std::isfinite(delta0)) throw std::invalid_argument("delta0 must be positive");
  const double limit = family == Family::Shifted ? kPi / 6.0 : kPi / 4.0;
  const bool strict = k >= 2;
  if (!(theta0 > 0.0) || theta0 > limit || (strict && theta0 >= limit))
    throw std::invalid_argument("theta0 outside the admissible sector");
}

Cases shifted_factor_cases(int k, double b, Params params) {
  check_b(b);
  params.check(Family::Shifted, k);
  Cases c{kInf, kInf, kInf, kInf, kInf, kInf};
  const double t0 = params.theta0;
  const double d0 = params.delta0;

  if (b == 0.0) {
    // Zero operator: a cubic with known roots for k = 1, the gradient-descent
    // bound for k >= 2.
    c.real = k == 1 ? (std::sqrt(5.0) - 1.0) / 2.0 : 1.0;
    finish(c);
    return c;
  }

  if (k == 1) {
    c.real = 2.0 * sq(1.0 - b);
    c.complex1 = std::pow(1.0 - b, 4) / (4.0 * sq(b));
    c.complex2 = 2.0 * std::sin(t0 / 2.0) * sq(1.0 - b) / sq(1.0 + b);
    const double a = 2.5 * t0;
    c.complex3 = d0 * sq(std::cos(a)) / (2.0 * (1.0 + 2.0 * d0 * std::sin(a) + sq(d0))) *
                 std::pow(1.0 - b, 4) / sq(b);
    c.complex4 = fourth_case_weight(t0) * sq(1.0 - b);
    finish(c);
    return c;
  }

  const double bk = std::pow(b, k);
  const double w = inner_weight(k, b);
  const double g = sq(1.0 - b) * sq(1.0 - bk);
  const double cc = sector_constant(t0, d0, 2.5);
  const double rc = std::sqrt(cc);
  c.real = sq(1.0 - b) * 2.0 * sq(1.0 - bk) / (sq(1.0 - bk) + 2.0 * w);
  c.complex1 = g / (4.0 * sq(bk) + kSqrt2 * w * sq(1.0 + bk));
  c.complex2 = g / ((sq(1.0 - bk) / (2.0 * std::sin(t0 / 2.0)) + kSqrt2 * w) * sq(1.0 + bk));
  c.complex3 = g / (2.0 * cc * std::sin(t0 / 2.0) / d0 * sq(bk) +
                    w * (rc / d0 * (1.0 + sq(bk)) +
                         2.0 * std::max(rc / d0, rc / std::cos(3.0 * t0)) * bk));
  c.complex4 = fourth_case_weight(t0) * g / (sq(1.0 - bk) + 2.0 * w * sq(1.0 + bk));
  finish(c);
  return c;
}

Cases nonshifted_factor_cases(int k, double b, Params params) {
  check_b(b);
  params.check(Family::NonShifted, k);
  Cases c{kInf, kInf, kInf, kInf, kInf, kInf};
  const double t0 = params.theta0;
  const double d0 = params.delta0;

  if (b == 0.0) {
    c.real = k == 1 ? 1.0 : 2.0;
    finish(c);
    return c;
  }

  if (k == 1) {
    // Real eigenvalues impose no constraint for the one-step scheme.
    c.complex1 = std::pow(1.0 - b, 4) / (4.0 * sq(b));
    c.complex2 = 2.0 * std::sin(t0 / 2.0) * sq(1.0 - b) / sq(1.0 + b);
    const double a = 1.5 * t0;
    c.complex3 = d0 * sq(std::cos(a)) * std::pow(1.0 - b, 4) /
                 (2.0 * (1.0 + 2.0 * d0 * std::sin(a) + sq(d0)) * sq(b));
    finish(c);
    return c;
  }

  const double bk = std::pow(b, k);
  const double w = inner_weight(k, b);
  const double g = sq(1.0 - b) * sq(1.0 - bk);
  const double cc = sector_constant(t0, d0, 1.5);
  const double rc = std::sqrt(cc);
  c.real = g / w;
  c.complex1 = g / (4.0 * sq(bk) + kSqrt2 * w * sq(1.0 + bk));
  c.complex2 = g / ((sq(1.0 - bk) / (2.0 * std::sin(t0 / 2.0)) + kSqrt2 * w) * sq(1.0 + bk));
  c.complex3 = g / (2.0 * cc * std::sin(t0 / 2.0) / d0 * sq(bk) +
                    w * (rc / d0 * (1.0 + sq(bk)) +
                         2.0 * std::max(rc / d0, rc / std::cos(2.0 * t0)) * bk));
  finish(c);
  return c;
}

double shifted_factor(int k, double b, std::optional<Params> params) {
  return shifted_factor_cases(k, b, params.value_or(Params::defaults(Family::Shifted, k))).value;
}

double nonshifted_factor(int k, double b, std::optional<Params> params) {
  return nonshifted_factor_cases(k, b, params.value_or(Params::defaults(Family::NonShifted, k))).value;
}

double practical_shifted_one_step(double b) {
  check_b(b);
  if (b == 0.0) return 0.5;
  return std::min(0.5 * sq((1.0 - b) / (1.0 + b)),
                  (1.0 - std::sin(5.0 * kPi / 12.0)) / 4.0 * std::pow(1.0 - b, 4) / sq(b));
}

double practical_nonshifted_one_step(double b) {
  check_b(b);
  if (b == 0.0) return 2.0 * std::sin(kPi / 8.0);
  return std::min(2.0 * std::sin(kPi / 8.0) * sq((1.0 - b) / (1.0 + b)),
                  (1.0 - std::sin(3.0 * kPi / 8.0)) / 4.0 * std::pow(1.0 - b, 4) / sq(b));
}

namespace {

NormInputs base_norms(const LinearProblem& problem) {
  NormInputs n;
  n.norm_B = operator_norm(problem.B());
  n.norm_H = operator_norm(problem.H());
  n.norm_M = operator_norm(problem.M());
  n.reduced_norm = operator_norm(reduced_operator(problem));
  return n;
}

}  // namespace

StepBound gd_bound(const LinearProblem& problem) {
  StepBound out;
  out.norms = base_norms(problem);
  out.value = ratio(2.0, sq(out.norms.reduced_norm));
  out.formula_id = "usual-gd-reduced-norm";
  return out;
}

StepBound shifted_gd_bound(const LinearProblem& problem) {
  StepBound out;
  out.norms = base_norms(problem);
  out.value = ratio(1.0, sq(out.norms.reduced_norm));
  out.formula_id = "shifted-gd-reduced-norm";
  return out;
}

Cases resolvent_cases(MethodSpec method, const NormInputs& norms, Params params) {
  const Family family = family_of(method.kind);
  const int k = method.k;
  const double H2 = sq(norms.norm_H);
  const double M2 = sq(norms.norm_M);
  const double HM = H2 * M2;
  Cases c{kInf, kInf, kInf, kInf, kInf, kInf};
  const double t0 = params.theta0;
  const double d0 = params.delta0;
  const double s = norms.resolvent.value_or(1.0);
  const double s2 = sq(s);
  const double s4 = sq(s2);

  if (k == 1) {
    const double nb = norms.norm_B;
    const double a = (family == Family::Shifted ? 2.5 : 1.5) * t0;
    if (family == Family::Shifted) {
      c.real = ratio(2.0, HM * s2);
      c.complex4 = ratio(fourth_case_weight(t0), HM * sq(1.0 + nb) * s4);
    }
    c.complex1 = ratio(1.0, 4.0 * HM * sq(nb) * s4);
    c.complex2 = ratio(2.0 * std::sin(t0 / 2.0), HM * sq(1.0 + 2.0 * nb) * s4);
    c.complex3 = ratio(d0 * sq(std::cos(a)) / (2.0 * (1.0 + 2.0 * d0 * std::sin(a) + sq(d0))),
                       HM * sq(nb) * s4);
    finish(c);
    return c;
  }

  const double bk = norms.norm_power.value_or(0.0);
  const double T2 = sq(norms.norm_geometric.value_or(0.0));
  const double X = norms.norm_cumulative.value_or(0.0);
  const double cc = sector_constant(t0, d0, family == Family::Shifted ? 2.5 : 1.5);
  const double rc = std::sqrt(cc);
  const double mix_angle = family == Family::Shifted ? 3.0 * t0 : 2.0 * t0;

  c.real = family == Family::Shifted ? ratio(2.0, M2 * (H2 * T2 + 2.0 * X) * s2)
                                     : ratio(1.0, X * M2 * s2);
  c.complex1 = ratio(1.0 / s4, 4.0 * HM * T2 * sq(bk) + kSqrt2 * M2 * X * sq(1.0 + 2.0 * bk));
  c.complex2 = ratio(1.0 / s4, (HM * T2 / (2.0 * std::sin(t0 / 2.0)) + kSqrt2 * M2 * X) *
                                   sq(1.0 + 2.0 * bk));
  c.complex3 = ratio(1.0 / s4,
                     2.0 * cc * std::sin(t0 / 2.0) / d0 * HM * T2 * sq(bk) +
                         rc / d0 * M2 * X * (1.0 + 2.0 * bk + 2.0 * sq(bk)) +
                         2.0 * std::max(rc / d0, rc / std::cos(mix_angle)) * M2 * X *
                             (bk + sq(bk)));
  if (family == Family::Shifted) {
    c.complex4 = ratio(fourth_case_weight(t0) / s4,
                       HM * T2 * sq(1.0 + bk) + 2.0 * M2 * X * sq(1.0 + 2.0 * bk));
  }
  finish(c);
  return c;
}

StepBound matrix_bound(const LinearProblem& problem, MethodSpec method,
                       std::optional<Params> params) {
  switch (method.kind) {
    case MethodKind::UsualGD: return gd_bound(problem);
    case MethodKind::ShiftedGD: return shifted_gd_bound(problem);
    default: break;
  }
  if (method.k < 1) throw std::invalid_argument("k must be at least 1");
  const Family family = family_of(method.kind);
  const Params p = params.value_or(Params::defaults(family, method.k));
  p.check(family, method.k);

  StepBound out;
  out.params = p;
  out.norms = base_norms(problem);
  const double rho = spectral_radius(problem.B());
  if (!(rho < 1.0)) throw std::domain_error("matrix_bound: spectral radius of B is not below 1");

  const bool shifted = family == Family::Shifted;
  const std::string prefix = std::string(shifted ? "shifted-" : "") +
                             (method.k == 1 ? "one-step" : "multi-step");

  if (out.norms.norm_B == 0.0) {
    // Zero operator: exact one-step cubic constants, gradient-descent bounds otherwise.
    if (method.k == 1) {
      out.value = ratio(shifted ? (std::sqrt(5.0) - 1.0) / 2.0 : 1.0,
                        sq(out.norms.norm_H) * sq(out.norms.norm_M));
    } else {
      out.value = ratio(shifted ? 1.0 : 2.0, sq(out.norms.reduced_norm));
    }
    out.formula_id = prefix + "-zero-operator";
    return out;
  }

  const Matrix Bk = matrix_power(problem.B(), method.k);
  out.norms.norm_power = operator_norm(Bk);
  out.norms.resolvent = resolvent_constant(Bk);
  if (method.k >= 2) {
    const AccumulatedOperators ops = accumulated_operators(problem.B(), problem.H(), method.k);
    out.norms.norm_geometric = operator_norm(ops.geometric);
    out.norms.norm_cumulative = operator_norm(ops.cumulative_cross);
  }
  const double general = resolvent_cases(method, out.norms, p).value;
  out.value = general;
  out.formula_id = prefix + "-resolvent";

  if (out.norms.norm_B < 1.0) {
    const double factor = shifted ? shifted_factor_cases(method.k, out.norms.norm_B, p).value
                                  : nonshifted_factor_cases(method.k, out.norms.norm_B, p).value;
    const double closed = ratio(factor, sq(out.norms.norm_H) * sq(out.norms.norm_M));
    if (closed > general) {
      out.value = closed;
      out.formula_id = prefix + "-closed-form";
    }
  }
  return out;
}

}  // namespace oneshot::bounds
