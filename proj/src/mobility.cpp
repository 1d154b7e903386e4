#include "owc/mobility.hpp"

#include <algorithm>
#include <stdexcept>

namespace owc {

namespace {

// Centered marginal 6/e^3 (e^2/4 - u^2) on |u| <= e/2.
double centered_marginal(double u, double e) {
  const double h = e / 2;
  if (u < -h || u > h) return 0.0;
  return 6.0 / (e * e * e) * (h * h - u * u);
}

double centered_cdf(double u, double e) {
  const double h = e / 2;
  u = std::clamp(u, -h, h);
  return 6.0 / (e * e * e) * (h * h * u - u * u * u / 3.0) + 0.5;
}

}  // namespace

void RwpDistribution::validate() const {
  if (!(x_extent > 0) || !(y_extent > 0)) throw std::invalid_argument("RWP floor extents must be positive");
}

double RwpDistribution::marginal_x(double x) const { return centered_marginal(x - origin.x() - x_extent / 2, x_extent); }
double RwpDistribution::marginal_y(double y) const { return centered_marginal(y - origin.y() - y_extent / 2, y_extent); }
double RwpDistribution::cdf_x(double x) const { return centered_cdf(x - origin.x() - x_extent / 2, x_extent); }
double RwpDistribution::cdf_y(double y) const { return centered_cdf(y - origin.y() - y_extent / 2, y_extent); }

double RwpDistribution::peak_density() const { return 36.0 / (16.0 * x_extent * y_extent); }

double rwp_pdf(const RwpDistribution& dist, const Point2& point) {
  return dist.marginal_x(point.x()) * dist.marginal_y(point.y());
}

double region_probability(std::span<const StadiumRegion<double>> regions, const RwpDistribution& dist,
                          double rel_tol) {
  dist.validate();
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  std::vector<double> breaks;
  for (const auto& r : regions) {
    if (r.empty()) continue;
    const auto box = r.bounds();
    if (!(box.hi.x() >= box.lo.x()) || !(box.hi.y() >= box.lo.y())) continue;
    x_lo = std::min(x_lo, box.lo.x());
    x_hi = std::max(x_hi, box.hi.x());
    const auto b = r.x_breakpoints();
    breaks.insert(breaks.end(), b.begin(), b.end());
  }
  if (!(x_hi > x_lo)) return 0.0;

  std::vector<Interval<double>> slices;
  auto integrand = [&](double x) {
    slices.clear();
    for (const auto& r : regions) {
      auto s = r.slice(x);
      if (!s.empty()) slices.push_back(s);
    }
    if (slices.empty()) return 0.0;
    std::sort(slices.begin(), slices.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
    double mass = 0.0;
    Interval<double> cur = slices.front();
    for (size_t k = 1; k < slices.size(); ++k) {
      if (slices[k].lo <= cur.hi) {
        cur.hi = std::max(cur.hi, slices[k].hi);
      } else {
        mass += dist.cdf_y(cur.hi) - dist.cdf_y(cur.lo);
        cur = slices[k];
      }
    }
    mass += dist.cdf_y(cur.hi) - dist.cdf_y(cur.lo);
    return dist.marginal_x(x) * mass;
  };
  const auto result = integrate_adaptive(integrand, x_lo, x_hi, rel_tol, 0.0, breaks);
  return std::clamp(result.value, 0.0, 1.0);
}

double blockage_probability(const Segment3<double>& link, const CylinderSpec<double>& cyl,
                            const RwpDistribution& dist, double rel_tol) {
  const StadiumRegion<double> region[1] = {blocked_region(link, cyl, dist.footprint())};
  return region_probability(region, dist, rel_tol);
}

double relay_path_blockage_probability(const Segment3<double>& ap_to_relay, const Segment3<double>& relay_to_user,
                                       const CylinderSpec<double>& cyl, const RwpDistribution& dist,
                                       double rel_tol) {
  const StadiumRegion<double> regions[2] = {blocked_region(ap_to_relay, cyl, dist.footprint()),
                                            blocked_region(relay_to_user, cyl, dist.footprint())};
  return region_probability(regions, dist, rel_tol);
}

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RwpSampler::RwpSampler(const RwpDistribution& dist, std::uint64_t seed)
    : dist_(dist), peak_(dist.peak_density()), engine_(seed) {
  dist_.validate();
}

Point2 RwpSampler::sample() {
  for (;;) {
    // Separate statements: argument evaluation order is unspecified.
    const double x = dist_.origin.x() + dist_.x_extent * unit_uniform(engine_);
    const double y = dist_.origin.y() + dist_.y_extent * unit_uniform(engine_);
    const Point2 p(x, y);
    if (unit_uniform(engine_) * peak_ < rwp_pdf(dist_, p)) return p;
  }
}

}  // namespace owc
