#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ebell/linalg.hpp"

namespace ebell {

/// Noisy entangled two-qudit state: V |psi_beta><psi_beta| + (1 - V) I / d^2,
/// with |psi_beta> proportional to |1,1> + ... + |d-1,d-1> + beta |d,d>.
struct NoisyStateParams {
  double beta = 1.0;
  double visibility = 1.0;
  int dim = 3;

  void validate() const;
};

/// Schmidt coefficients of |psi_beta> in the computational basis, normalized.
std::vector<double> schmidt_coefficients(const NoisyStateParams& params);

ComplexMatrix make_state(const NoisyStateParams& params);

/// |v><v| for a (not necessarily normalized) state vector; normalizes first.
ComplexMatrix pure_state_density(std::span<const Complex> amplitudes);

/// Outcome table p(m, n) for a pair of local measurements. Indices are
/// 0-based internally; reports print them 1-based.
class JointDistribution {
 public:
  JointDistribution(std::size_t rows, std::size_t cols);

  /// Validates entries (>= -1e-12), clips tiny negatives to zero and
  /// renormalizes; sum must be within 1e-10 of 1 before renormalizing.
  static JointDistribution from_table(std::size_t rows, std::size_t cols,
                                      std::vector<double> row_major);

  static JointDistribution uniform(std::size_t rows, std::size_t cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t m, std::size_t n) const { return p_[m * cols_ + n]; }
  std::span<const double> flat() const { return p_; }

  /// Same table with the two parties' roles exchanged.
  JointDistribution transposed() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> p_;
};

enum class Party { A, B };

JointDistribution joint_distribution(const ComplexMatrix& rho, const PhaseSettings& settings_a,
                                     const PhaseSettings& settings_b);

std::vector<double> marginal(const JointDistribution& joint, Party party);

/// Clip-and-renormalize step shared by every route that produces a table:
/// entries in [-1e-12, 0) become 0, then the table is rescaled to sum 1.
/// Entries below -1e-12, non-finite entries or a sum off by more than 1e-10
/// throw NumericalError for computed tables and ArgumentError for
/// caller-supplied ones.
void normalize_probabilities(std::span<double> table, bool caller_supplied);

}  // namespace ebell
