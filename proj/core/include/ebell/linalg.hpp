#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ebell {

using Complex = std::complex<double>;

/// Dense square complex matrix with row-major storage.
///
/// Sized for the handful of dimensions this library touches (local unitaries
/// of dimension 2 or 3, bipartite density operators up to 9x9), so there is
/// no expression templating or blocking: every product is a triple loop.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(std::size_t dim);
  ComplexMatrix(std::size_t dim, std::vector<Complex> row_major);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const Complex> entries);

  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return data_[row * dim_ + col];
  }

  std::span<const Complex> data() const { return data_; }

  ComplexMatrix adjoint() const;
  Complex trace() const;
  bool all_finite() const;

  ComplexMatrix& operator*=(Complex scale);
  ComplexMatrix& operator+=(const ComplexMatrix& other);

  friend ComplexMatrix operator*(const ComplexMatrix& lhs, const ComplexMatrix& rhs);
  friend ComplexMatrix operator*(Complex scale, ComplexMatrix m) { return m *= scale; }
  friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) {
    return lhs += rhs;
  }

 private:
  std::size_t dim_;
  std::vector<Complex> data_;
};

/// Largest entrywise modulus of (lhs - rhs).
double max_abs_diff(const ComplexMatrix& lhs, const ComplexMatrix& rhs);

/// ‖U U† − I‖_max.
double unitarity_defect(const ComplexMatrix& u);

/// ‖M − M†‖_max.
double hermiticity_defect(const ComplexMatrix& m);

/// Ascending eigenvalues of a Hermitian matrix (the Hermitian part is used).
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

/// One two-mode beam-splitter/phase-shifter block of the Reck scheme.
/// Mode labels are 1-based, matching the optical description.
struct MachZehnderParams {
  int p = 2;
  int q = 1;
  double phi = 0.0;
  double omega = 0.0;

  friend bool operator==(const MachZehnderParams&, const MachZehnderParams&) = default;
};

/// Mode pairs in the fixed product order T_{d,d-1}, T_{d,d-2}, ..., T_{2,1}.
std::vector<std::pair<int, int>> reck_pair_order(int dim);

/// Phase parameters that fix one local measurement for one party.
class PhaseSettings {
 public:
  PhaseSettings() = default;

  /// All mixers zero angle, no diagonal phases.
  explicit PhaseSettings(int dim);

  /// `mixer_angles` is interleaved (phi, omega) per pair in reck_pair_order.
  static PhaseSettings from_angles(int dim, std::span<const double> mixer_angles,
                                   std::span<const double> alphas = {});

  /// Every mixer at omega = pi/2, phi = 0: each T is diagonal, so the
  /// measurement is in the computational basis up to signs.
  static PhaseSettings computational(int dim);

  int dim() const { return dim_; }
  std::span<const MachZehnderParams> mixers() const { return mixers_; }
  std::span<MachZehnderParams> mixers() { return mixers_; }
  std::span<const double> alphas() const { return alphas_; }
  std::span<double> alphas() { return alphas_; }

  /// Copy with every angle folded into [0, 2pi).
  PhaseSettings folded() const;

  /// Throws ArgumentError unless the pair list matches reck_pair_order and
  /// every angle is finite.
  void validate() const;

  friend bool operator==(const PhaseSettings&, const PhaseSettings&) = default;

 private:
  int dim_ = 0;
  std::vector<MachZehnderParams> mixers_;
  std::vector<double> alphas_;
};

/// Angle folded into [0, 2pi).
double fold_angle(double radians);

ComplexMatrix mach_zehnder_matrix(int dim, int p, int q, double phi, double omega);

/// (T_{d,d-1} ... T_{2,1} D)^{-1}, with the inverse taken as the adjoint.
ComplexMatrix reck_unitary(const PhaseSettings& settings);

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// (U_A ⊗ U_B) rho (U_A ⊗ U_B)†.
ComplexMatrix conjugate_by_local_unitaries(const ComplexMatrix& rho, const ComplexMatrix& u_a,
                                           const ComplexMatrix& u_b);

}  // namespace ebell
