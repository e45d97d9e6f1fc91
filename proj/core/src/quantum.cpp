#include "ebell/quantum.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ebell/errors.hpp"

namespace ebell {

namespace {

constexpr double kClipTolerance = 1e-12;
constexpr double kSumTolerance = 1e-10;

[[noreturn]] void fail(bool caller_supplied, const std::string& what) {
  if (caller_supplied) throw ArgumentError(what);
  throw NumericalError(what);
}

}  // namespace

void NoisyStateParams::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ArgumentError("beta must lie in [0, 1]");
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw ArgumentError("visibility must lie in [0, 1]");
  if (dim != 2 && dim != 3) throw ArgumentError("local dimension must be 2 or 3");
}

std::vector<double> schmidt_coefficients(const NoisyStateParams& params) {
  params.validate();
  std::vector<double> c(static_cast<std::size_t>(params.dim), 1.0);
  c.back() = params.beta;
  const double norm = std::sqrt(params.dim - 1 + params.beta * params.beta);
  for (auto& x : c) x /= norm;
  return c;
}

ComplexMatrix make_state(const NoisyStateParams& params) {
  const auto c = schmidt_coefficients(params);
  const auto d = static_cast<std::size_t>(params.dim);
  std::vector<Complex> psi(d * d);
  for (std::size_t k = 0; k < d; ++k) psi[k * d + k] = c[k];

  ComplexMatrix rho(d * d);
  for (std::size_t r = 0; r < d * d; ++r)
    for (std::size_t s = 0; s < d * d; ++s)
      rho(r, s) = params.visibility * psi[r] * std::conj(psi[s]);
  const double noise = (1.0 - params.visibility) / static_cast<double>(d * d);
  for (std::size_t r = 0; r < d * d; ++r) rho(r, r) += noise;
  return rho;
}

ComplexMatrix pure_state_density(std::span<const Complex> amplitudes) {
  double norm2 = 0.0;
  for (const auto& a : amplitudes) norm2 += std::norm(a);
  if (!(norm2 > 0.0) || !std::isfinite(norm2))
    throw ArgumentError("pure_state_density: zero or non-finite vector");
  ComplexMatrix rho(amplitudes.size());
  for (std::size_t r = 0; r < amplitudes.size(); ++r)
    for (std::size_t s = 0; s < amplitudes.size(); ++s)
      rho(r, s) = amplitudes[r] * std::conj(amplitudes[s]) / norm2;
  return rho;
}

void normalize_probabilities(std::span<double> table, bool caller_supplied) {
  double sum = 0.0;
  for (double& x : table) {
    if (!std::isfinite(x)) fail(caller_supplied, "probability table has a non-finite entry");
    if (x < 0.0) {
      if (x < -kClipTolerance)
        fail(caller_supplied, "probability table has a negative entry " + std::to_string(x));
      x = 0.0;
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    fail(caller_supplied, "probability table sums to " + std::to_string(sum));
  for (double& x : table) x /= sum;
}

JointDistribution::JointDistribution(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), p_(rows * cols) {
  if (rows == 0 || cols == 0) throw ArgumentError("JointDistribution: empty table");
}

JointDistribution JointDistribution::from_table(std::size_t rows, std::size_t cols,
                                                std::vector<double> row_major) {
  JointDistribution j(rows, cols);
  if (row_major.size() != rows * cols)
    throw ArgumentError("JointDistribution: table size does not match its shape");
  normalize_probabilities(row_major, true);
  j.p_ = std::move(row_major);
  return j;
}

JointDistribution JointDistribution::uniform(std::size_t rows, std::size_t cols) {
  JointDistribution j(rows, cols);
  const double w = 1.0 / static_cast<double>(rows * cols);
  for (auto& x : j.p_) x = w;
  return j;
}

JointDistribution JointDistribution::transposed() const {
  JointDistribution t(cols_, rows_);
  for (std::size_t m = 0; m < rows_; ++m)
    for (std::size_t n = 0; n < cols_; ++n) t.p_[n * rows_ + m] = (*this)(m, n);
  return t;
}

JointDistribution joint_distribution(const ComplexMatrix& rho, const PhaseSettings& settings_a,
                                     const PhaseSettings& settings_b) {
  const auto da = static_cast<std::size_t>(settings_a.dim());
  const auto db = static_cast<std::size_t>(settings_b.dim());
  if (rho.dim() != da * db)
    throw ArgumentError("joint_distribution: state dimension " + std::to_string(rho.dim()) +
                        " does not match settings " + std::to_string(da) + "x" +
                        std::to_string(db));
  const auto rotated =
      conjugate_by_local_unitaries(rho, reck_unitary(settings_a), reck_unitary(settings_b));
  std::vector<double> table(da * db);
  for (std::size_t i = 0; i < table.size(); ++i) table[i] = rotated(i, i).real();
  normalize_probabilities(table, false);
  return JointDistribution::from_table(da, db, std::move(table));
}

std::vector<double> marginal(const JointDistribution& joint, Party party) {
  std::vector<double> out(party == Party::A ? joint.rows() : joint.cols(), 0.0);
  for (std::size_t m = 0; m < joint.rows(); ++m)
    for (std::size_t n = 0; n < joint.cols(); ++n)
      out[party == Party::A ? m : n] += joint(m, n);
  return out;
}

}  // namespace ebell
