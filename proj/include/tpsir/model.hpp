#ifndef TPSIR_MODEL_HPP
#define TPSIR_MODEL_HPP

#include <string>
#include <utility>
#include <vector>

#include "tpsir/types.hpp"

namespace tpsir {

// Time derivative of the nine compartments (per day).
//
// Flow graph: susceptibles acquire pathogen 1 at beta1*lambda1 (SS->SI) and
// pathogen 2 at beta2*lambda2 (SS->IS); hosts carrying or recovered from one
// pathogen acquire the other at a*lambda1 (IS->II), b*lambda1 (RS->RI),
// c*lambda2 (SI->II), d*lambda2 (SR->IR); recovery from pathogen 1 at nu1
// and from pathogen 2 at nu2; births mu*N enter SS and every compartment
// dies at rate mu.  The component sum is exactly mu*N - mu*sum(x).
template <class Scalar>
StateT<Scalar> rhs(const StateT<Scalar>& x, const ModelParams& p) {
  const Scalar l1 = lambda1(x, p.n_pop);
  const Scalar l2 = lambda2(x, p.n_pop);
  StateT<Scalar> f;
  f[kSS] = p.mu * p.n_pop - (p.beta1 * l1 + p.beta2 * l2 + p.mu) * x[kSS];
  f[kSI] = p.beta1 * l1 * x[kSS] - (p.nu1 + p.mu + p.c * l2) * x[kSI];
  f[kSR] = p.nu1 * x[kSI] - (p.mu + p.d * l2) * x[kSR];
  f[kIS] = p.beta2 * l2 * x[kSS] - (p.a * l1 + p.mu + p.nu2) * x[kIS];
  f[kII] = p.c * l2 * x[kSI] + p.a * l1 * x[kIS] - (p.nu1 + p.nu2 + p.mu) * x[kII];
  f[kIR] = p.d * l2 * x[kSR] + p.nu1 * x[kII] - (p.mu + p.nu2) * x[kIR];
  f[kRS] = p.nu2 * x[kIS] - (p.mu + p.b * l1) * x[kRS];
  f[kRI] = p.b * l1 * x[kRS] + p.nu2 * x[kII] - (p.nu1 + p.mu) * x[kRI];
  f[kRR] = p.nu1 * x[kRI] + p.nu2 * x[kIR] - p.mu * x[kRR];
  return f;
}

// Analytic Jacobian of rhs at x.
Matrix9d rhs_jacobian(const State& x, const ModelParams& p);

// Central-difference Jacobian; exact up to roundoff here because rhs is
// quadratic in the state.
Matrix9d finite_difference_jacobian(const State& x, const ModelParams& p);

struct ReproductionNumbers {
  double r01 = 0.0;
  double r02 = 0.0;
  double r0 = 0.0;  // max(r01, r02)
};

ReproductionNumbers r0(const ModelParams& p);

enum class EquilibriumKind { DFE, EE1, EE2 };

const char* to_string(EquilibriumKind k);

struct Equilibrium {
  EquilibriumKind kind;
  State state;
};

// DFE always; EE1 iff r01 > 1; EE2 iff r02 > 1.
std::vector<Equilibrium> equilibria(const ModelParams& p);

enum class Stability { Stable, Unstable };

// Local stability of the disease-free equilibrium, decided by R0.
// Throws MarginalCase when |r0 - 1| < 1e-9.
Stability dfe_stability(const ModelParams& p);

// Expected secondary cases per current case, given the susceptible pool
// composition: r1 = (beta1*X_SS + a*X_IS + b*X_RS) / (N*(nu1+mu)) and the
// pathogen-2 mirror.
std::pair<double, double> replacement_numbers(const State& x, const ModelParams& p);

enum class RegimeLabel {
  CompetitiveExclusion,
  SuperinfectionBy1,
  SuperinfectionBy2,
  Cocirculation,
  General,
};

const char* to_string(RegimeLabel label);
RegimeLabel regime_from_string(const std::string& s);

inline constexpr double kDefaultRegimeRelTol = 0.05;

// Ecological regime of the cross-infection rates, judged against
// eps = rel_tol * max(beta1, beta2): a rate below eps counts as absent.
RegimeLabel classify_regime(const ModelParams& p, double rel_tol = kDefaultRegimeRelTol);

}  // namespace tpsir

#endif  // TPSIR_MODEL_HPP
