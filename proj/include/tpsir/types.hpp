#ifndef TPSIR_TYPES_HPP
#define TPSIR_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace tpsir {

inline constexpr int kCompartments = 9;

// Compartment X_ab: a is the host's status with respect to the pathogen
// indexed 2, b with respect to the pathogen indexed 1, each of
// S(usceptible) / I(nfected) / R(ecovered).  The ordering matches the
// 9-tuples used for the equilibria.
enum Compartment : int {
  kSS = 0,
  kSI = 1,
  kSR = 2,
  kIS = 3,
  kII = 4,
  kIR = 5,
  kRS = 6,
  kRI = 7,
  kRR = 8,
};

template <class Scalar>
using StateT = Eigen::Matrix<Scalar, kCompartments, 1>;

// Real-valued compartment occupancies (head counts).
using State = StateT<double>;

// Integer occupancies for the event-level simulator.
using CountState = StateT<std::int64_t>;

using Matrix9d = Eigen::Matrix<double, kCompartments, kCompartments>;

// Fraction of the population infectious with pathogen 1.
template <class Scalar>
Scalar lambda1(const StateT<Scalar>& x, double n_pop) {
  return (x[kSI] + x[kII] + x[kRI]) / n_pop;
}

// Fraction of the population infectious with pathogen 2.
template <class Scalar>
Scalar lambda2(const StateT<Scalar>& x, double n_pop) {
  return (x[kIS] + x[kII] + x[kIR]) / n_pop;
}

// Contact, recovery and demographic rates, all per day; n_pop is the fixed
// total population the force-of-infection terms are normalized by.
struct ModelParams {
  double beta1 = 0.0;  // pathogen-1 infection of fully susceptible hosts
  double beta2 = 0.0;  // pathogen-2 infection of fully susceptible hosts
  double a = 0.0;      // pathogen-1 acquisition while infected with 2
  double b = 0.0;      // pathogen-1 acquisition after recovery from 2
  double c = 0.0;      // pathogen-2 acquisition while infected with 1
  double d = 0.0;      // pathogen-2 acquisition after recovery from 1
  double nu1 = 1.0 / 7.0;
  double nu2 = 1.0 / 7.0;
  double mu = 1.0 / (75.0 * 365.0);
  double n_pop = 1e6;

  void validate() const {
    for (double r : {beta1, beta2, a, b, c, d, nu1, nu2, mu}) {
      if (!(r >= 0.0)) throw std::invalid_argument("ModelParams: negative or NaN rate");
    }
    if (!(n_pop > 0.0)) throw std::invalid_argument("ModelParams: n_pop must be positive");
  }

  // Pathogen-swapped parameter set: 1 <-> 2 exchanges (beta1, a)<->(beta2, c),
  // b<->d and the recovery rates.
  ModelParams swapped() const {
    ModelParams s = *this;
    std::swap(s.beta1, s.beta2);
    std::swap(s.a, s.c);
    std::swap(s.b, s.d);
    std::swap(s.nu1, s.nu2);
    return s;
  }
};

// Image of a state under the pathogen swap (transpose of the index pair).
template <class Scalar>
StateT<Scalar> swap_state(const StateT<Scalar>& x) {
  StateT<Scalar> s;
  s[kSS] = x[kSS];
  s[kSI] = x[kIS];
  s[kSR] = x[kRS];
  s[kIS] = x[kSI];
  s[kII] = x[kII];
  s[kIR] = x[kRI];
  s[kRS] = x[kSR];
  s[kRI] = x[kIR];
  s[kRR] = x[kRR];
  return s;
}

// The nine inferred quantities: six contact rates, the two seeded initial
// compartments, and the reporting proportionality K.
struct Theta {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double x_is0 = 0.0;
  double x_si0 = 0.0;
  double k_scale = 0.0;

  static constexpr int kDim = 9;

  using Vector = Eigen::Matrix<double, kDim, 1>;

  Vector to_vector() const {
    Vector v;
    v << beta1, beta2, a, b, c, d, x_is0, x_si0, k_scale;
    return v;
  }

  static Theta from_vector(const Vector& v) {
    Theta t;
    t.beta1 = v[0];
    t.beta2 = v[1];
    t.a = v[2];
    t.b = v[3];
    t.c = v[4];
    t.d = v[5];
    t.x_is0 = v[6];
    t.x_si0 = v[7];
    t.k_scale = v[8];
    return t;
  }

  // Contact rates from theta, everything else from the fixed parameter set.
  ModelParams to_params(const ModelParams& fixed) const {
    ModelParams p = fixed;
    p.beta1 = beta1;
    p.beta2 = beta2;
    p.a = a;
    p.b = b;
    p.c = c;
    p.d = d;
    return p;
  }

  Theta swapped() const {
    Theta s = *this;
    std::swap(s.beta1, s.beta2);
    std::swap(s.a, s.c);
    std::swap(s.b, s.d);
    std::swap(s.x_is0, s.x_si0);
    return s;
  }

  bool all_positive() const {
    const Vector v = to_vector();
    return (v.array() > 0.0).all();
  }
};

inline constexpr const char* kThetaNames[Theta::kDim] = {
    "beta1", "beta2", "a", "b", "c", "d", "x_is0", "x_si0", "k_scale"};

inline constexpr const char* kCompartmentNames[kCompartments] = {
    "x_ss", "x_si", "x_sr", "x_is", "x_ii", "x_ir", "x_rs", "x_ri", "x_rr"};

}  // namespace tpsir

#endif  // TPSIR_TYPES_HPP
