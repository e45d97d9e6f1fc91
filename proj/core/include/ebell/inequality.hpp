#pragma once

#include <array>

#include "ebell/entropy.hpp"
#include "ebell/linalg.hpp"

namespace ebell {

/// Alice measures A or A', Bob measures B or B'.
struct QuadrangleSettings {
  PhaseSettings a;
  PhaseSettings a_prime;
  PhaseSettings b;
  PhaseSettings b_prime;

  int dim() const { return a.dim(); }
  void validate() const;

  friend bool operator==(const QuadrangleSettings&, const QuadrangleSettings&) = default;
};

/// d(A,B') <= d(A,B) + d(B,A') + d(A',B'), evaluated for one set of settings.
/// A negative violation (R - L) means the local-realistic bound is broken.
struct QuadrangleReport {
  double d_a_b = 0.0;
  double d_b_a_prime = 0.0;
  double d_a_prime_b_prime = 0.0;
  double d_a_b_prime = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double violation = 0.0;

  std::array<double, 4> distances() const {
    return {d_a_b, d_b_a_prime, d_a_prime_b_prime, d_a_b_prime};
  }
};

/// Builds a report from the four pair distances; violation is rhs - lhs.
QuadrangleReport make_quadrangle_report(double d_a_b, double d_b_a_prime,
                                        double d_a_prime_b_prime, double d_a_b_prime);

/// Violation below -kViolationThreshold counts as an observed Bell violation.
inline constexpr double kViolationThreshold = 1e-9;

QuadrangleReport evaluate_quadrangle(const ComplexMatrix& rho, const QuadrangleSettings& settings,
                                     DistanceKind dkind, const EntropyKind& ekind);

/// Covariance-distance instance on two qubits; violation = 2 - CHSH.
QuadrangleReport evaluate_chsh_covariance(const ComplexMatrix& rho,
                                          const QuadrangleSettings& settings);

}  // namespace ebell
