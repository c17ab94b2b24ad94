#include "tpsir/model.hpp"

#include <algorithm>
#include <cmath>

#include "tpsir/errors.hpp"

namespace tpsir {

Matrix9d rhs_jacobian(const State& x, const ModelParams& p) {
  const double n = p.n_pop;
  const double l1 = lambda1(x, n);
  const double l2 = lambda2(x, n);
  Matrix9d j = Matrix9d::Zero();

  // Columns contributing to lambda1 and lambda2 respectively.
  const int l1_cols[] = {kSI, kII, kRI};
  const int l2_cols[] = {kIS, kII, kIR};

  j(kSS, kSS) -= p.beta1 * l1 + p.beta2 * l2 + p.mu;
  for (int col : l1_cols) j(kSS, col) -= p.beta1 / n * x[kSS];
  for (int col : l2_cols) j(kSS, col) -= p.beta2 / n * x[kSS];

  j(kSI, kSS) += p.beta1 * l1;
  for (int col : l1_cols) j(kSI, col) += p.beta1 / n * x[kSS];
  j(kSI, kSI) -= p.nu1 + p.mu + p.c * l2;
  for (int col : l2_cols) j(kSI, col) -= p.c / n * x[kSI];

  j(kSR, kSI) += p.nu1;
  j(kSR, kSR) -= p.mu + p.d * l2;
  for (int col : l2_cols) j(kSR, col) -= p.d / n * x[kSR];

  j(kIS, kSS) += p.beta2 * l2;
  for (int col : l2_cols) j(kIS, col) += p.beta2 / n * x[kSS];
  j(kIS, kIS) -= p.a * l1 + p.mu + p.nu2;
  for (int col : l1_cols) j(kIS, col) -= p.a / n * x[kIS];

  j(kII, kSI) += p.c * l2;
  for (int col : l2_cols) j(kII, col) += p.c / n * x[kSI];
  j(kII, kIS) += p.a * l1;
  for (int col : l1_cols) j(kII, col) += p.a / n * x[kIS];
  j(kII, kII) -= p.nu1 + p.nu2 + p.mu;

  j(kIR, kSR) += p.d * l2;
  for (int col : l2_cols) j(kIR, col) += p.d / n * x[kSR];
  j(kIR, kII) += p.nu1;
  j(kIR, kIR) -= p.mu + p.nu2;

  j(kRS, kIS) += p.nu2;
  j(kRS, kRS) -= p.mu + p.b * l1;
  for (int col : l1_cols) j(kRS, col) -= p.b / n * x[kRS];

  j(kRI, kRS) += p.b * l1;
  for (int col : l1_cols) j(kRI, col) += p.b / n * x[kRS];
  j(kRI, kII) += p.nu2;
  j(kRI, kRI) -= p.nu1 + p.mu;

  j(kRR, kRI) += p.nu1;
  j(kRR, kIR) += p.nu2;
  j(kRR, kRR) -= p.mu;

  return j;
}

Matrix9d finite_difference_jacobian(const State& x, const ModelParams& p) {
  Matrix9d j;
  const double cbrt_eps = 6.055454452393343e-6;  // cbrt(DBL_EPSILON)
  for (int col = 0; col < kCompartments; ++col) {
    double h = cbrt_eps * std::max(std::abs(x[col]), 1e-3 * p.n_pop);
    State xp = x, xm = x;
    xp[col] += h;
    xm[col] -= h;
    j.col(col) = (rhs(xp, p) - rhs(xm, p)) / (2.0 * h);
  }
  return j;
}

ReproductionNumbers r0(const ModelParams& p) {
  ReproductionNumbers r;
  r.r01 = p.beta1 / (p.nu1 + p.mu);
  r.r02 = p.beta2 / (p.nu2 + p.mu);
  r.r0 = std::max(r.r01, r.r02);
  return r;
}

const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::DFE: return "DFE";
    case EquilibriumKind::EE1: return "EE1";
    case EquilibriumKind::EE2: return "EE2";
  }
  return "?";
}

std::vector<Equilibrium> equilibria(const ModelParams& p) {
  p.validate();
  const auto r = r0(p);
  const double n = p.n_pop;
  std::vector<Equilibrium> out;

  State dfe = State::Zero();
  dfe[kSS] = n;
  out.push_back({EquilibriumKind::DFE, dfe});

  if (r.r01 > 1.0) {
    State e = State::Zero();
    e[kSS] = n / r.r01;
    e[kSI] = p.mu / p.beta1 * (r.r01 - 1.0) * n;
    e[kSR] = p.nu1 / p.beta1 * (r.r01 - 1.0) * n;
    out.push_back({EquilibriumKind::EE1, e});
  }
  if (r.r02 > 1.0) {
    State e = State::Zero();
    e[kSS] = n / r.r02;
    e[kIS] = p.mu / p.beta2 * (r.r02 - 1.0) * n;
    e[kRS] = p.nu2 / p.beta2 * (r.r02 - 1.0) * n;
    out.push_back({EquilibriumKind::EE2, e});
  }
  return out;
}

Stability dfe_stability(const ModelParams& p) {
  const double r = r0(p).r0;
  if (std::abs(r - 1.0) < 1e-9) {
    throw MarginalCase("dfe_stability: R0 within 1e-9 of the threshold");
  }
  return r < 1.0 ? Stability::Stable : Stability::Unstable;
}

std::pair<double, double> replacement_numbers(const State& x, const ModelParams& p) {
  // Population fractions first, so that at the DFE (x_ss = N) r1 reduces to
  // exactly beta1/(nu1+mu).
  const double n = p.n_pop;
  const double r1 =
      (p.beta1 * (x[kSS] / n) + p.a * (x[kIS] / n) + p.b * (x[kRS] / n)) / (p.nu1 + p.mu);
  const double r2 =
      (p.beta2 * (x[kSS] / n) + p.c * (x[kSI] / n) + p.d * (x[kSR] / n)) / (p.nu2 + p.mu);
  return {r1, r2};
}

const char* to_string(RegimeLabel label) {
  switch (label) {
    case RegimeLabel::CompetitiveExclusion: return "CompetitiveExclusion";
    case RegimeLabel::SuperinfectionBy1: return "SuperinfectionBy1";
    case RegimeLabel::SuperinfectionBy2: return "SuperinfectionBy2";
    case RegimeLabel::Cocirculation: return "Cocirculation";
    case RegimeLabel::General: return "General";
  }
  return "?";
}

RegimeLabel regime_from_string(const std::string& s) {
  for (RegimeLabel label :
       {RegimeLabel::CompetitiveExclusion, RegimeLabel::SuperinfectionBy1,
        RegimeLabel::SuperinfectionBy2, RegimeLabel::Cocirculation, RegimeLabel::General}) {
    if (s == to_string(label)) return label;
  }
  throw std::invalid_argument("unknown regime label: " + s);
}

RegimeLabel classify_regime(const ModelParams& p, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw std::invalid_argument("classify_regime: rel_tol must lie in (0, 1)");
  }
  const double eps = rel_tol * std::max(p.beta1, p.beta2);
  const bool a_small = p.a <= eps, b_small = p.b <= eps;
  const bool c_small = p.c <= eps, d_small = p.d <= eps;
  if (a_small && b_small && c_small && d_small) return RegimeLabel::CompetitiveExclusion;
  if (c_small && d_small && !a_small && !b_small) return RegimeLabel::SuperinfectionBy1;
  if (a_small && b_small && !c_small && !d_small) return RegimeLabel::SuperinfectionBy2;
  if (a_small && c_small && !b_small && !d_small) return RegimeLabel::Cocirculation;
  return RegimeLabel::General;
}

}  // namespace tpsir
