#include "ebell/inequality.hpp"

#include "ebell/errors.hpp"
#include "ebell/quantum.hpp"

namespace ebell {

void QuadrangleSettings::validate() const {
  for (const auto* s : {&a, &a_prime, &b, &b_prime}) s->validate();
  const int d = a.dim();
  if (a_prime.dim() != d || b.dim() != d || b_prime.dim() != d)
    throw ArgumentError("QuadrangleSettings: all four settings must share one dimension");
}

QuadrangleReport make_quadrangle_report(double d_a_b, double d_b_a_prime,
                                        double d_a_prime_b_prime, double d_a_b_prime) {
  QuadrangleReport r;
  r.d_a_b = d_a_b;
  r.d_b_a_prime = d_b_a_prime;
  r.d_a_prime_b_prime = d_a_prime_b_prime;
  r.d_a_b_prime = d_a_b_prime;
  r.lhs = d_a_b_prime;
  r.rhs = d_a_b + d_b_a_prime + d_a_prime_b_prime;
  r.violation = r.rhs - r.lhs;
  return r;
}

namespace {

template <typename Distance>
QuadrangleReport evaluate_pairs(const ComplexMatrix& rho, const QuadrangleSettings& s,
                                Distance&& distance) {
  s.validate();
  // B is Bob's, A' is Alice's: the (B, A') joint is measured as (A', B).
  return make_quadrangle_report(distance(joint_distribution(rho, s.a, s.b)),
                                distance(joint_distribution(rho, s.a_prime, s.b)),
                                distance(joint_distribution(rho, s.a_prime, s.b_prime)),
                                distance(joint_distribution(rho, s.a, s.b_prime)));
}

}  // namespace

QuadrangleReport evaluate_quadrangle(const ComplexMatrix& rho, const QuadrangleSettings& settings,
                                     DistanceKind dkind, const EntropyKind& ekind) {
  if (dkind == DistanceKind::Covariance) {
    if (settings.dim() != 2)
      throw ArgumentError("covariance distance needs binary outcomes (d = 2)");
    return evaluate_chsh_covariance(rho, settings);
  }
  return evaluate_pairs(rho, settings, [&](const JointDistribution& j) {
    return entropic_distance(j, dkind, ekind);
  });
}

QuadrangleReport evaluate_chsh_covariance(const ComplexMatrix& rho,
                                          const QuadrangleSettings& settings) {
  if (settings.dim() != 2 || rho.dim() != 4)
    throw ArgumentError("evaluate_chsh_covariance: needs a two-qubit state and d = 2 settings");
  return evaluate_pairs(rho, settings,
                        [](const JointDistribution& j) { return covariance_distance(j); });
}

}  // namespace ebell
