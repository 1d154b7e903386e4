#pragma once

// Exact geometry for line-of-sight links and the vertical-cylinder human model.
//
// A human standing at floor position c blocks a link iff the 3D segment meets
// the closed solid cylinder {|xy - c| <= radius, 0 <= z <= height}. The set of
// such c is a stadium: the floor projection of the part of the link below the
// cylinder top, inflated by the radius.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "owc/quadrature.hpp"

namespace owc {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

using Point2 = Vec2<double>;
using Point3 = Vec3<double>;

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Scalar>
struct Segment3 {
  Vec3<Scalar> a;  // transmitter end
  Vec3<Scalar> b;  // receiver end

  bool degenerate() const { return a == b; }
};

template <typename Scalar>
struct CylinderSpec {
  Scalar height = Scalar(1.8);
  Scalar radius = Scalar(0.3);
};

template <typename Scalar>
struct Rect2 {
  Vec2<Scalar> lo;
  Vec2<Scalar> hi;

  bool contains(const Vec2<Scalar>& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
  }
  Scalar area() const { return std::max(Scalar(0), (hi - lo).prod()); }
};

/// Closed y-interval; empty when lo > hi.
template <typename Scalar>
struct Interval {
  Scalar lo = Scalar(1);
  Scalar hi = Scalar(0);

  bool empty() const { return lo > hi; }
  Scalar length() const { return empty() ? Scalar(0) : hi - lo; }
};

template <typename Scalar>
inline void check_segment(const Segment3<Scalar>& link) {
  if (link.degenerate()) throw GeometryError("degenerate link segment: endpoints coincide");
  if (!link.a.allFinite() || !link.b.allFinite()) throw GeometryError("link segment has non-finite coordinates");
}

template <typename Scalar>
inline void check_cylinder(const CylinderSpec<Scalar>& cyl) {
  if (!(cyl.height > 0) || !(cyl.radius > 0)) throw GeometryError("cylinder height and radius must be positive");
}

/// Distance from p to the closed 2D segment [a, b]; a == b is a point.
template <typename Scalar>
Scalar point_segment_distance(const Vec2<Scalar>& p, const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  const Vec2<Scalar> d = b - a;
  const Scalar len2 = d.squaredNorm();
  Scalar t = len2 > 0 ? (p - a).dot(d) / len2 : Scalar(0);
  t = std::clamp(t, Scalar(0), Scalar(1));
  return (a + t * d - p).norm();
}

/// Set of floor centers whose cylinder blocks a link, clipped to the room.
template <typename Scalar>
class StadiumRegion {
 public:
  StadiumRegion() = default;
  StadiumRegion(Vec2<Scalar> spine_a, Vec2<Scalar> spine_b, Scalar radius, Rect2<Scalar> clip)
      : spine_a_(std::move(spine_a)), spine_b_(std::move(spine_b)), radius_(radius), clip_(clip), empty_(false) {}

  static StadiumRegion empty_region(Rect2<Scalar> clip) {
    StadiumRegion r;
    r.clip_ = clip;
    return r;
  }

  bool empty() const { return empty_; }
  const Vec2<Scalar>& spine_a() const { return spine_a_; }
  const Vec2<Scalar>& spine_b() const { return spine_b_; }
  Scalar radius() const { return radius_; }
  const Rect2<Scalar>& clip() const { return clip_; }
  Scalar spine_length() const { return (spine_b_ - spine_a_).norm(); }

  bool contains(const Vec2<Scalar>& c) const {
    if (empty_ || !clip_.contains(c)) return false;
    return point_segment_distance(c, spine_a_, spine_b_) <= radius_;
  }

  /// Unclipped stadium area 2 r L + pi r^2; an upper bound on area().
  Scalar unclipped_area() const {
    if (empty_) return 0;
    return 2 * radius_ * spine_length() + Scalar(M_PI) * radius_ * radius_;
  }

  /// Bounding box of the clipped region; lo > hi when nothing remains.
  Rect2<Scalar> bounds() const {
    Rect2<Scalar> box{spine_a_.cwiseMin(spine_b_).array() - radius_, spine_a_.cwiseMax(spine_b_).array() + radius_};
    if (empty_) box = {Vec2<Scalar>::Ones(), Vec2<Scalar>::Zero()};
    box.lo = box.lo.cwiseMax(clip_.lo);
    box.hi = box.hi.cwiseMin(clip_.hi);
    return box;
  }

  /// Abscissae where the slice length is not smooth.
  std::vector<Scalar> x_breakpoints() const {
    std::vector<Scalar> xs;
    if (empty_) return xs;
    const Vec2<Scalar> d = spine_b_ - spine_a_;
    const Scalar len = d.norm();
    for (const auto* p : {&spine_a_, &spine_b_}) {
      xs.push_back(p->x());
      xs.push_back(p->x() - radius_);
      xs.push_back(p->x() + radius_);
      if (len > 0) {
        const Scalar nx = -d.y() / len * radius_;
        xs.push_back(p->x() + nx);
        xs.push_back(p->x() - nx);
      }
    }
    return xs;
  }

  /// Exact vertical slice {y : (x, y) in region}. Convex region, so one interval.
  Interval<Scalar> slice(Scalar x) const {
    Interval<Scalar> out;
    if (empty_ || x < clip_.lo.x() || x > clip_.hi.x()) return out;
    auto merge = [&out](Scalar lo, Scalar hi) {
      out.lo = std::min(out.lo, lo);
      out.hi = std::max(out.hi, hi);
    };
    out.lo = std::numeric_limits<Scalar>::infinity();
    out.hi = -std::numeric_limits<Scalar>::infinity();
    for (const auto* p : {&spine_a_, &spine_b_}) {
      const Scalar dx = x - p->x();
      const Scalar h2 = radius_ * radius_ - dx * dx;
      if (h2 >= 0) {
        const Scalar h = std::sqrt(h2);
        merge(p->y() - h, p->y() + h);
      }
    }
    const Vec2<Scalar> d = spine_b_ - spine_a_;
    const Scalar len = d.norm();
    if (len > 0) {
      const Vec2<Scalar> n = Vec2<Scalar>(-d.y(), d.x()) * (radius_ / len);
      const std::array<Vec2<Scalar>, 4> quad = {spine_a_ + n, spine_b_ + n, spine_b_ - n, spine_a_ - n};
      for (int k = 0; k < 4; ++k) {
        const Vec2<Scalar>& p = quad[k];
        const Vec2<Scalar>& q = quad[(k + 1) % 4];
        const Scalar x0 = std::min(p.x(), q.x());
        const Scalar x1 = std::max(p.x(), q.x());
        if (x < x0 || x > x1) continue;
        if (x1 == x0) {
          merge(std::min(p.y(), q.y()), std::max(p.y(), q.y()));
        } else {
          const Scalar t = (x - p.x()) / (q.x() - p.x());
          const Scalar y = p.y() + t * (q.y() - p.y());
          merge(y, y);
        }
      }
    }
    if (out.lo > out.hi) return Interval<Scalar>{};
    out.lo = std::max(out.lo, clip_.lo.y());
    out.hi = std::min(out.hi, clip_.hi.y());
    return out;
  }

 private:
  Vec2<Scalar> spine_a_ = Vec2<Scalar>::Zero();
  Vec2<Scalar> spine_b_ = Vec2<Scalar>::Zero();
  Scalar radius_ = 0;
  Rect2<Scalar> clip_{};
  bool empty_ = true;
};

/// True iff the closed segment meets the closed solid cylinder standing at
/// `center`. Solved on the segment parameter: the z slab and the radial
/// quadratic each give a t-interval; the link is blocked iff they overlap
/// inside [0, 1].
template <typename Scalar>
bool segment_intersects_cylinder(const Segment3<Scalar>& link, const Vec2<Scalar>& center,
                                 const CylinderSpec<Scalar>& cyl) {
  check_segment(link);
  check_cylinder(cyl);
  const Vec3<Scalar> d = link.b - link.a;
  Scalar t_lo = 0;
  Scalar t_hi = 1;

  if (d.z() == 0) {
    if (link.a.z() < 0 || link.a.z() > cyl.height) return false;
  } else {
    Scalar t0 = (0 - link.a.z()) / d.z();
    Scalar t1 = (cyl.height - link.a.z()) / d.z();
    if (t0 > t1) std::swap(t0, t1);
    t_lo = std::max(t_lo, t0);
    t_hi = std::min(t_hi, t1);
    if (t_lo > t_hi) return false;
  }

  const Vec2<Scalar> rel = link.a.template head<2>() - center;
  const Vec2<Scalar> dxy = d.template head<2>();
  const Scalar qa = dxy.squaredNorm();
  const Scalar qb = 2 * rel.dot(dxy);
  const Scalar qc = rel.squaredNorm() - cyl.radius * cyl.radius;
  if (qa == 0) return qc <= 0;
  const Scalar disc = qb * qb - 4 * qa * qc;
  if (disc < 0) return false;
  const Scalar root = std::sqrt(disc);
  // Cancellation-free roots.
  const Scalar q = qb >= 0 ? -(qb + root) / 2 : -(qb - root) / 2;
  Scalar r0 = q / qa;
  Scalar r1 = q != 0 ? qc / q : r0;
  if (r0 > r1) std::swap(r0, r1);
  return std::max(t_lo, r0) <= std::min(t_hi, r1);
}

/// Floor region of human centers that block `link`, clipped to `footprint`.
template <typename Scalar>
StadiumRegion<Scalar> blocked_region(const Segment3<Scalar>& link, const CylinderSpec<Scalar>& cyl,
                                     const Rect2<Scalar>& footprint) {
  check_segment(link);
  check_cylinder(cyl);
  const Vec3<Scalar> d = link.b - link.a;
  Scalar t_lo = 0;
  Scalar t_hi = 1;
  if (d.z() == 0) {
    if (link.a.z() < 0 || link.a.z() > cyl.height) return StadiumRegion<Scalar>::empty_region(footprint);
  } else {
    Scalar t0 = -link.a.z() / d.z();
    Scalar t1 = (cyl.height - link.a.z()) / d.z();
    if (t0 > t1) std::swap(t0, t1);
    t_lo = std::max(t_lo, t0);
    t_hi = std::min(t_hi, t1);
    if (t_lo > t_hi) return StadiumRegion<Scalar>::empty_region(footprint);
  }
  const Vec3<Scalar> p = link.a + t_lo * d;
  const Vec3<Scalar> q = link.a + t_hi * d;
  return StadiumRegion<Scalar>(p.template head<2>(), q.template head<2>(), cyl.radius, footprint);
}

/// Area of a clipped region. Slices are exact, so only the outer integral is
/// adaptive.
template <typename Scalar>
Scalar region_area(const StadiumRegion<Scalar>& region, Scalar rel_tol = Scalar(1e-4)) {
  if (region.empty()) return 0;
  const auto box = region.bounds();
  if (!(box.hi.x() > box.lo.x()) || !(box.hi.y() > box.lo.y())) return 0;
  auto slice_length = [&region](Scalar x) { return region.slice(x).length(); };
  return integrate_adaptive(slice_length, box.lo.x(), box.hi.x(), rel_tol, Scalar(1e-14), region.x_breakpoints())
      .value;
}

}  // namespace owc
