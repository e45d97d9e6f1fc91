#include "ebell/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ebell/errors.hpp"

namespace ebell {

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
  if (dim == 0) throw ArgumentError("ComplexMatrix: dimension must be >= 1");
}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> row_major)
    : dim_(dim), data_(std::move(row_major)) {
  if (dim == 0) throw ArgumentError("ComplexMatrix: dimension must be >= 1");
  if (data_.size() != dim * dim) {
    throw ArgumentError("ComplexMatrix: expected " + std::to_string(dim * dim) +
                        " entries, got " + std::to_string(data_.size()));
  }
  if (!all_finite()) throw ArgumentError("ComplexMatrix: non-finite entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> entries) {
  ComplexMatrix m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& z : data_) z *= scale;
  return *this;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (other.dim_ != dim_) throw ArgumentError("ComplexMatrix +=: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.dim_ != rhs.dim_) throw ArgumentError("ComplexMatrix *: dimension mismatch");
  const std::size_t n = lhs.dim_;
  ComplexMatrix out(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex a = lhs(r, k);
      if (a == Complex{}) continue;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += a * rhs(k, c);
    }
  }
  return out;
}

double max_abs_diff(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  if (lhs.dim() != rhs.dim()) throw ArgumentError("max_abs_diff: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.data().size(); ++i)
    worst = std::max(worst, std::abs(lhs.data()[i] - rhs.data()[i]));
  return worst;
}

double unitarity_defect(const ComplexMatrix& u) {
  return max_abs_diff(u * u.adjoint(), ComplexMatrix::identity(u.dim()));
}

double hermiticity_defect(const ComplexMatrix& m) { return max_abs_diff(m, m.adjoint()); }

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dim());
  Eigen::MatrixXcd dense(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      dense(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("hermitian_eigenvalues: no convergence");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<std::pair<int, int>> reck_pair_order(int dim) {
  if (dim < 2) throw ArgumentError("reck_pair_order: dimension must be >= 2");
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(dim * (dim - 1) / 2));
  for (int p = dim; p >= 2; --p)
    for (int q = p - 1; q >= 1; --q) pairs.emplace_back(p, q);
  return pairs;
}

PhaseSettings::PhaseSettings(int dim) : dim_(dim), alphas_(static_cast<std::size_t>(std::max(dim, 0))) {
  for (auto [p, q] : reck_pair_order(dim)) mixers_.push_back({p, q, 0.0, 0.0});
}

PhaseSettings PhaseSettings::from_angles(int dim, std::span<const double> mixer_angles,
                                         std::span<const double> alphas) {
  PhaseSettings s(dim);
  if (mixer_angles.size() != 2 * s.mixers_.size()) {
    throw ArgumentError("PhaseSettings: expected " + std::to_string(2 * s.mixers_.size()) +
                        " mixer angles, got " + std::to_string(mixer_angles.size()));
  }
  for (std::size_t k = 0; k < s.mixers_.size(); ++k) {
    s.mixers_[k].phi = mixer_angles[2 * k];
    s.mixers_[k].omega = mixer_angles[2 * k + 1];
  }
  if (!alphas.empty()) {
    if (alphas.size() != s.alphas_.size())
      throw ArgumentError("PhaseSettings: expected " + std::to_string(dim) + " alphas");
    std::copy(alphas.begin(), alphas.end(), s.alphas_.begin());
  }
  s.validate();
  return s;
}

PhaseSettings PhaseSettings::computational(int dim) {
  PhaseSettings s(dim);
  for (auto& mz : s.mixers_) mz.omega = std::numbers::pi / 2;
  return s;
}

double fold_angle(double radians) {
  constexpr double two_pi = 2 * std::numbers::pi;
  double r = std::fmod(radians, two_pi);
  if (r < 0) r += two_pi;
  // fmod of a tiny negative value can round back up to exactly 2pi
  if (r >= two_pi) r = 0.0;
  return r;
}

PhaseSettings PhaseSettings::folded() const {
  PhaseSettings out = *this;
  for (auto& mz : out.mixers_) {
    mz.phi = fold_angle(mz.phi);
    mz.omega = fold_angle(mz.omega);
  }
  for (auto& a : out.alphas_) a = fold_angle(a);
  return out;
}

void PhaseSettings::validate() const {
  if (dim_ < 2) throw ArgumentError("PhaseSettings: dimension must be >= 2");
  const auto order = reck_pair_order(dim_);
  if (mixers_.size() != order.size())
    throw ArgumentError("PhaseSettings: wrong number of mixers");
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& mz = mixers_[k];
    if (mz.p != order[k].first || mz.q != order[k].second)
      throw ArgumentError("PhaseSettings: mixers out of Reck product order");
    if (!std::isfinite(mz.phi) || !std::isfinite(mz.omega))
      throw ArgumentError("PhaseSettings: non-finite mixer angle");
  }
  if (alphas_.size() != static_cast<std::size_t>(dim_))
    throw ArgumentError("PhaseSettings: wrong number of alphas");
  for (double a : alphas_)
    if (!std::isfinite(a)) throw ArgumentError("PhaseSettings: non-finite alpha");
}

ComplexMatrix mach_zehnder_matrix(int dim, int p, int q, double phi, double omega) {
  if (q < 1 || p <= q || p > dim)
    throw ArgumentError("mach_zehnder_matrix: need 1 <= q < p <= d, got p=" + std::to_string(p) +
                        " q=" + std::to_string(q) + " d=" + std::to_string(dim));
  if (!std::isfinite(phi) || !std::isfinite(omega))
    throw ArgumentError("mach_zehnder_matrix: non-finite angle");
  auto t = ComplexMatrix::identity(static_cast<std::size_t>(dim));
  const auto pi = static_cast<std::size_t>(p - 1);
  const auto qi = static_cast<std::size_t>(q - 1);
  const Complex phase = std::polar(1.0, phi);
  t(pi, pi) = phase * std::sin(omega);
  t(qi, qi) = -std::sin(omega);
  t(pi, qi) = phase * std::cos(omega);
  t(qi, pi) = std::cos(omega);
  return t;
}

ComplexMatrix reck_unitary(const PhaseSettings& settings) {
  settings.validate();
  const int d = settings.dim();
  auto product = ComplexMatrix::identity(static_cast<std::size_t>(d));
  for (const auto& mz : settings.mixers())
    product = product * mach_zehnder_matrix(d, mz.p, mz.q, mz.phi, mz.omega);
  std::vector<Complex> phases;
  for (double a : settings.alphas()) phases.push_back(std::polar(1.0, a));
  product = product * ComplexMatrix::diagonal(phases);
  return product.adjoint();
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
  return out;
}

ComplexMatrix conjugate_by_local_unitaries(const ComplexMatrix& rho, const ComplexMatrix& u_a,
                                           const ComplexMatrix& u_b) {
  if (rho.dim() != u_a.dim() * u_b.dim())
    throw ArgumentError("conjugate_by_local_unitaries: state has dimension " +
                        std::to_string(rho.dim()) + ", unitaries need " +
                        std::to_string(u_a.dim() * u_b.dim()));
  const auto w = tensor_product(u_a, u_b);
  return w * rho * w.adjoint();
}

}  // namespace ebell
