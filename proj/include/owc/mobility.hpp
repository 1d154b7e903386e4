#pragma once

// Stationary position law of a random-waypoint walker without pause time on a
// rectangular floor, and blockage probabilities integrated against it.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "owc/geometry.hpp"

namespace owc {

/// Separable RWP stationary density on an x_extent by y_extent floor whose
/// lower-left corner sits at `origin`. Positions are corner-origin; the
/// polynomial itself lives in the centered frame.
struct RwpDistribution {
  double x_extent = 4.0;
  double y_extent = 8.0;
  Point2 origin = Point2::Zero();

  Rect2<double> footprint() const { return {origin, origin + Point2(x_extent, y_extent)}; }
  void validate() const;

  double marginal_x(double x) const;
  double marginal_y(double y) const;
  double cdf_x(double x) const;
  double cdf_y(double y) const;
  /// Maximum of the joint density, reached at the floor center.
  double peak_density() const;
};

double rwp_pdf(const RwpDistribution& dist, const Point2& point);

/// Probability mass of the union of the regions. Each vertical slice of the
/// union is integrated exactly, so only the outer integral is adaptive.
double region_probability(std::span<const StadiumRegion<double>> regions, const RwpDistribution& dist,
                          double rel_tol = 1e-4);

/// P(one human blocks the link).
double blockage_probability(const Segment3<double>& link, const CylinderSpec<double>& cyl,
                            const RwpDistribution& dist, double rel_tol = 1e-4);

/// P(the same human blocks either hop of a relayed path).
double relay_path_blockage_probability(const Segment3<double>& ap_to_relay, const Segment3<double>& relay_to_user,
                                       const CylinderSpec<double>& cyl, const RwpDistribution& dist,
                                       double rel_tol = 1e-4);

/// SplitMix64 finalizer of (master, index): the seed of stream `index`.
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index);

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

/// Rejection sampler against the uniform envelope at the peak density.
/// Owns its generator; not shareable across threads.
class RwpSampler {
 public:
  RwpSampler(const RwpDistribution& dist, std::uint64_t seed);

  Point2 sample();
  std::mt19937_64& engine() { return engine_; }

 private:
  RwpDistribution dist_;
  double peak_;
  std::mt19937_64 engine_;
};

}  // namespace owc
