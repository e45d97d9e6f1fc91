#include "ebell/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ebell/errors.hpp"

namespace ebell {

namespace {

constexpr double kZeroProbability = 1e-15;
constexpr double kShannonDispatch = 1e-9;
constexpr double kDirectTsallisFrom = 0.25;

void check_distribution(std::span<const double> p) {
  if (p.empty()) throw ArgumentError("entropy: empty distribution");
  double sum = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) throw ArgumentError("entropy: negative or non-finite entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw ArgumentError("entropy: distribution sums to " + std::to_string(sum));
}

double shannon(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > kZeroProbability) h -= x * std::log(x);
  return h;
}

// Near q = 1 the direct form (1 - sum p^q) / (q - 1) cancels badly, so it is
// rewritten as -sum p * expm1((q-1) ln p) / (q - 1).
double tsallis(std::span<const double> p, double q) {
  const double qm1 = q - 1.0;
  double acc = 0.0;
  if (qm1 < kDirectTsallisFrom) {
    for (double x : p)
      if (x > kZeroProbability) acc -= x * std::expm1(qm1 * std::log(x));
    return acc / qm1;
  }
  for (double x : p)
    if (x > kZeroProbability) acc += std::pow(x, q);
  return (1.0 - acc) / qm1;
}

double renyi(std::span<const double> p, double q) {
  double s = 0.0;
  for (double x : p)
    if (x > kZeroProbability) s += std::pow(x, q);
  return std::log(s) / (1.0 - q);
}

}  // namespace

EntropyKind EntropyKind::tsallis(double q) {
  if (!std::isfinite(q) || q < 1.0) throw ArgumentError("Tsallis entropy requires q >= 1");
  return EntropyKind(Family::Tsallis, q);
}

EntropyKind EntropyKind::renyi(double q) {
  if (!std::isfinite(q) || q <= 0.0 || q == 1.0)
    throw ArgumentError("Renyi entropy requires q > 0 and q != 1");
  return EntropyKind(Family::Renyi, q);
}

std::string_view EntropyKind::name() const {
  switch (family_) {
    case Family::Shannon: return "shannon";
    case Family::Tsallis: return "tsallis";
    case Family::Renyi: return "renyi";
  }
  return "?";
}

std::string_view to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::D1: return "d1";
    case DistanceKind::D1Norm: return "d1n";
    case DistanceKind::D2: return "d2";
    case DistanceKind::D2Norm: return "d2n";
    case DistanceKind::Covariance: return "cov";
  }
  return "?";
}

DistanceKind parse_distance_kind(std::string_view tag) {
  for (auto k : {DistanceKind::D1, DistanceKind::D1Norm, DistanceKind::D2, DistanceKind::D2Norm,
                 DistanceKind::Covariance})
    if (to_string(k) == tag) return k;
  throw ArgumentError("unknown metric '" + std::string(tag) + "' (expected d1, d1n, d2, d2n, cov)");
}

double entropy_unchecked(std::span<const double> distribution, const EntropyKind& kind) {
  double h = 0.0;
  switch (kind.family()) {
    case EntropyKind::Family::Shannon:
      h = shannon(distribution);
      break;
    case EntropyKind::Family::Tsallis:
      h = std::abs(kind.q() - 1.0) < kShannonDispatch ? shannon(distribution)
                                                      : tsallis(distribution, kind.q());
      break;
    case EntropyKind::Family::Renyi:
      h = renyi(distribution, kind.q());
      break;
  }
  // rounding can leave -0 or -1e-17 for deterministic inputs
  return std::max(h, 0.0);
}

double entropy(std::span<const double> distribution, const EntropyKind& kind) {
  check_distribution(distribution);
  return entropy_unchecked(distribution, kind);
}

double entropy(const JointDistribution& joint, const EntropyKind& kind) {
  return entropy(joint.flat(), kind);
}

double mutual_information(const JointDistribution& joint, const EntropyKind& kind) {
  return entropy(marginal(joint, Party::A), kind) + entropy(marginal(joint, Party::B), kind) -
         entropy(joint, kind);
}

double distance_from_entropies(DistanceKind dkind, double h_x, double h_y, double h_xy) {
  const double info = h_x + h_y - h_xy;
  const double h_max = std::max(h_x, h_y);
  switch (dkind) {
    case DistanceKind::D1:
      return h_xy - info;
    case DistanceKind::D1Norm:
      return h_xy > 0.0 ? 1.0 - info / h_xy : 0.0;
    case DistanceKind::D2:
      return h_max - info;
    case DistanceKind::D2Norm:
      return h_max > 0.0 ? 1.0 - info / h_max : 0.0;
    case DistanceKind::Covariance:
      break;
  }
  throw ArgumentError("covariance distance is not an entropic distance");
}

double entropic_distance(const JointDistribution& joint, DistanceKind dkind,
                         const EntropyKind& ekind) {
  if (dkind == DistanceKind::Covariance)
    throw ArgumentError("entropic_distance: use covariance_distance for the covariance metric");
  return distance_from_entropies(dkind, entropy(marginal(joint, Party::A), ekind),
                                 entropy(marginal(joint, Party::B), ekind), entropy(joint, ekind));
}

double covariance_distance(const JointDistribution& joint) {
  if (joint.rows() != 2 || joint.cols() != 2)
    throw ArgumentError("covariance_distance: needs a 2x2 table of +-1 outcomes");
  const double correlator = joint(0, 0) - joint(0, 1) - joint(1, 0) + joint(1, 1);
  return 1.0 - correlator;
}

}  // namespace ebell
