#pragma once

#include <span>
#include <string>
#include <string_view>

#include "ebell/quantum.hpp"

namespace ebell {

/// Which entropy functional is in force. Tsallis is restricted to q >= 1;
/// Renyi exists only to demonstrate that its distances are not metrics.
class EntropyKind {
 public:
  enum class Family { Shannon, Tsallis, Renyi };

  static EntropyKind shannon() { return EntropyKind(Family::Shannon, 1.0); }
  static EntropyKind tsallis(double q);
  static EntropyKind renyi(double q);

  Family family() const { return family_; }
  double q() const { return q_; }

  /// "shannon", "tsallis" or "renyi".
  std::string_view name() const;

  friend bool operator==(const EntropyKind&, const EntropyKind&) = default;

 private:
  EntropyKind(Family family, double q) : family_(family), q_(q) {}

  Family family_;
  double q_;
};

enum class DistanceKind { D1, D1Norm, D2, D2Norm, Covariance };

/// Short tags used on the command line and in CSV output: d1, d1n, d2, d2n, cov.
std::string_view to_string(DistanceKind kind);
DistanceKind parse_distance_kind(std::string_view tag);

/// The four entropic distances, in declaration order.
inline constexpr DistanceKind kEntropicDistances[] = {DistanceKind::D1, DistanceKind::D1Norm,
                                                      DistanceKind::D2, DistanceKind::D2Norm};

/// Natural-log entropies. Entries below 1e-15 count as exactly zero.
double entropy(std::span<const double> distribution, const EntropyKind& kind);
double entropy(const JointDistribution& joint, const EntropyKind& kind);

/// H(X) + H(Y) - H(X,Y) with the same functional throughout. For Tsallis
/// q > 1 this is positive even for independent variables.
double mutual_information(const JointDistribution& joint, const EntropyKind& kind);

double entropic_distance(const JointDistribution& joint, DistanceKind dkind,
                         const EntropyKind& ekind);

/// 1 - <XY> for outcomes labeled +1 (index 0) and -1 (index 1).
double covariance_distance(const JointDistribution& joint);

/// Distance from precomputed entropies; shared by the table-based route and
/// the optimizer's inner loop.
double distance_from_entropies(DistanceKind dkind, double h_x, double h_y, double h_xy);

/// Entropy of an already-validated distribution (no checks).
double entropy_unchecked(std::span<const double> distribution, const EntropyKind& kind);

}  // namespace ebell
