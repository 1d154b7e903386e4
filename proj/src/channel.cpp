#include "owc/channel.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace owc {

namespace {

struct SurfaceFrame {
  int u_axis;
  int v_axis;
  int fixed_axis;
  double fixed_value;
};

SurfaceFrame frame_of(const RoomModel& room, Surface s) {
  switch (s) {
    case Surface::floor: return {0, 1, 2, 0.0};
    case Surface::ceiling: return {0, 1, 2, room.height};
    case Surface::wall_x0: return {1, 2, 0, 0.0};
    case Surface::wall_x1: return {1, 2, 0, room.width};
    case Surface::wall_y0: return {0, 2, 1, 0.0};
    case Surface::wall_y1: return {0, 2, 1, room.length};
  }
  return {0, 1, 2, 0.0};
}

double extent(const RoomModel& room, int axis) {
  return axis == 0 ? room.width : axis == 1 ? room.length : room.height;
}

int tile_count(double length, double res) {
  return std::max(1, static_cast<int>(std::ceil(length / res - 1e-9)));
}

// [lo, hi] of tile k along an axis of the given length.
std::pair<double, double> tile_span(int k, double length, double res) {
  return {k * res, std::min((k + 1) * res, length)};
}

constexpr Surface kSurfaces[] = {Surface::floor,   Surface::ceiling, Surface::wall_x0,
                                 Surface::wall_x1, Surface::wall_y0, Surface::wall_y1};

SurfaceElement make_element(const RoomModel& room, Surface s, int iu, int iv, double res, int order) {
  const auto f = frame_of(room, s);
  const double lu = extent(room, f.u_axis);
  const double lv = extent(room, f.v_axis);
  const auto [u0, u1] = tile_span(iu, lu, res);
  const auto [v0, v1] = tile_span(iv, lv, res);
  SurfaceElement e;
  e.center[f.u_axis] = (u0 + u1) / 2;
  e.center[f.v_axis] = (v0 + v1) / 2;
  e.center[f.fixed_axis] = f.fixed_value;
  e.normal = surface_normal(s);
  e.area = (u1 - u0) * (v1 - v0);
  e.reflectivity = room.reflectivity(s);
  e.surface = s;
  e.bounce_order = order;
  return e;
}

bool leg_blocked(const std::optional<HumanBlocker>& blocker, const Point3& a, const Point3& b) {
  if (!blocker || a == b) return false;
  return segment_intersects_cylinder(Segment3<double>{a, b}, blocker->center, blocker->cylinder);
}

}  // namespace

bool RoomModel::contains(const Point3& p, double tol) const {
  return p.x() >= -tol && p.x() <= width + tol && p.y() >= -tol && p.y() <= length + tol && p.z() >= -tol &&
         p.z() <= height + tol;
}

double RoomModel::reflectivity(Surface s) const {
  switch (s) {
    case Surface::floor: return floor_reflectivity;
    case Surface::ceiling: return ceiling_reflectivity;
    default: return wall_reflectivity;
  }
}

void RoomModel::validate() const {
  if (!(width > 0) || !(length > 0) || !(height > 0)) throw std::invalid_argument("room dimensions must be positive");
  for (double r : {wall_reflectivity, ceiling_reflectivity, floor_reflectivity}) {
    if (!(r >= 0 && r <= 1)) throw std::invalid_argument("reflectivity must lie in [0, 1]");
  }
  if (!(lambertian_mode >= 0)) throw std::invalid_argument("Lambertian mode must be nonnegative");
}

Eigen::Vector3d surface_normal(Surface s) {
  switch (s) {
    case Surface::floor: return Eigen::Vector3d::UnitZ();
    case Surface::ceiling: return -Eigen::Vector3d::UnitZ();
    case Surface::wall_x0: return Eigen::Vector3d::UnitX();
    case Surface::wall_x1: return -Eigen::Vector3d::UnitX();
    case Surface::wall_y0: return Eigen::Vector3d::UnitY();
    case Surface::wall_y1: return -Eigen::Vector3d::UnitY();
  }
  return Eigen::Vector3d::UnitZ();
}

std::vector<SurfaceElement> discretize_room(const RoomModel& room, double resolution, int bounce_order) {
  if (!(resolution > 0)) throw std::invalid_argument("surface resolution must be positive");
  room.validate();
  std::vector<SurfaceElement> out;
  for (Surface s : kSurfaces) {
    const auto f = frame_of(room, s);
    const int nu = tile_count(extent(room, f.u_axis), resolution);
    const int nv = tile_count(extent(room, f.v_axis), resolution);
    out.reserve(out.size() + static_cast<size_t>(nu) * nv);
    for (int iu = 0; iu < nu; ++iu) {
      for (int iv = 0; iv < nv; ++iv) out.push_back(make_element(room, s, iu, iv, resolution, bounce_order));
    }
  }
  return out;
}

SurfaceDiscretization discretize_surfaces(const RoomModel& room, double first_res, double second_res) {
  return {discretize_room(room, first_res, 1), discretize_room(room, second_res, 2)};
}

SurfaceElement element_at(const RoomModel& room, Surface surface, const Point3& point, double resolution,
                          int bounce_order) {
  if (!(resolution > 0)) throw std::invalid_argument("surface resolution must be positive");
  const auto f = frame_of(room, surface);
  const double lu = extent(room, f.u_axis);
  const double lv = extent(room, f.v_axis);
  const int nu = tile_count(lu, resolution);
  const int nv = tile_count(lv, resolution);
  const int iu = std::clamp(static_cast<int>(std::floor(point[f.u_axis] / resolution)), 0, nu - 1);
  const int iv = std::clamp(static_cast<int>(std::floor(point[f.v_axis] / resolution)), 0, nv - 1);
  return make_element(room, surface, iu, iv, resolution, bounce_order);
}

bool TransmitterSpec::can_steer_to(const Point3& target) const {
  const Eigen::Vector3d dir = target - position;
  const double n = dir.norm();
  if (n == 0) return false;
  const double c = std::clamp(dir.dot(boresight.normalized()) / n, -1.0, 1.0);
  return std::acos(c) <= max_steering + 1e-12;
}

double disk_overlap_area(double r1, double r2, double dist) {
  if (dist >= r1 + r2) return 0.0;
  const double rmin = std::min(r1, r2);
  if (dist <= std::abs(r1 - r2)) return M_PI * rmin * rmin;
  const double a1 = std::acos(std::clamp((dist * dist + r1 * r1 - r2 * r2) / (2 * dist * r1), -1.0, 1.0));
  const double a2 = std::acos(std::clamp((dist * dist + r2 * r2 - r1 * r1) / (2 * dist * r2), -1.0, 1.0));
  const double k = (-dist + r1 + r2) * (dist + r1 - r2) * (dist - r1 + r2) * (dist + r1 + r2);
  return r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * std::sqrt(std::max(0.0, k));
}

double beam_capture_fraction(const TransmitterSpec& tx, const ReceiverSpec& rx) {
  const Eigen::Vector3d axis = tx.aim - tx.position;
  if (axis.norm() == 0) throw UnservableLink("transmitter aim point coincides with its position");
  const Eigen::Vector3d u = axis.normalized();
  const Eigen::Vector3d v = rx.position - tx.position;
  const double along = v.dot(u);
  if (along <= 0) return 0.0;
  const double lateral = (v - along * u).norm();
  const double spot = along * std::tan(tx.divergence);
  return disk_overlap_area(spot, rx.aperture_radius(), lateral) / (M_PI * spot * spot);
}

double narrow_beam_los_gain(const TransmitterSpec& tx, const ReceiverSpec& rx) {
  if (!tx.can_steer_to(tx.aim)) throw UnservableLink("aim point lies outside the transmitter steering cone");
  const Eigen::Vector3d to_tx = tx.position - rx.position;
  const double d = to_tx.norm();
  if (d == 0) throw UnservableLink("transmitter and receiver coincide");
  const double cos_incidence = rx.normal.dot(to_tx) / d;
  if (cos_incidence <= 0 || std::acos(std::min(1.0, cos_incidence)) > rx.fov) return 0.0;
  return beam_capture_fraction(tx, rx) * cos_incidence;
}

double lambertian_gain(const Point3& src_pos, const Eigen::Vector3d& src_normal, double src_mode,
                       const ReceiverSpec& rx) {
  const Eigen::Vector3d v = rx.position - src_pos;
  const double d2 = v.squaredNorm();
  if (d2 == 0) return 0.0;
  const double d = std::sqrt(d2);
  const double cos_emit = src_normal.dot(v) / d;
  const double cos_incidence = -rx.normal.dot(v) / d;
  if (cos_emit < 0 || cos_incidence < 0) return 0.0;
  if (std::acos(std::min(1.0, cos_incidence)) > rx.fov) return 0.0;
  return (src_mode + 1) * rx.area * std::pow(cos_emit, src_mode) * cos_incidence / (2 * M_PI * d2);
}

void ChannelImpulseResponse::add(double delay, double gain) {
  const double rel = (delay - origin_time) / bin_duration;
  const auto index = static_cast<Eigen::Index>(std::llround(rel));
  if (index < 0) throw std::invalid_argument("path arrives before the impulse response origin");
  if (index >= bins.size()) {
    const auto old = bins.size();
    bins.conservativeResize(index + 1);
    bins.tail(index + 1 - old).setZero();
  }
  bins[index] += gain;
}

BeamHit trace_beam_axis(const TransmitterSpec& tx, const RoomModel& room) {
  const Eigen::Vector3d u = (tx.aim - tx.position).normalized();
  double best = std::numeric_limits<double>::infinity();
  Surface hit_surface = Surface::floor;
  const Surface low[3] = {Surface::wall_x0, Surface::wall_y0, Surface::floor};
  const Surface high[3] = {Surface::wall_x1, Surface::wall_y1, Surface::ceiling};
  const double hi_bound[3] = {room.width, room.length, room.height};
  for (int axis = 0; axis < 3; ++axis) {
    if (u[axis] == 0) continue;
    const double bound = u[axis] > 0 ? hi_bound[axis] : 0.0;
    const double t = (bound - tx.position[axis]) / u[axis];
    if (t > 1e-12 && t < best) {
      best = t;
      hit_surface = u[axis] > 0 ? high[axis] : low[axis];
    }
  }
  Point3 p = tx.position + best * u;
  p = p.cwiseMax(Point3::Zero()).cwiseMin(Point3(room.width, room.length, room.height));
  return {p, hit_surface};
}

ChannelImpulseResponse impulse_response(const TransmitterSpec& tx, const ReceiverSpec& rx, const RoomModel& room,
                                        const ChannelOptions& options, const std::optional<HumanBlocker>& blocker,
                                        const std::vector<SurfaceElement>* second) {
  if (options.max_bounces < 0 || options.max_bounces > 2) throw std::invalid_argument("max_bounces must be 0, 1 or 2");
  if (!(options.bin_duration > 0)) throw std::invalid_argument("bin duration must be positive");
  ChannelImpulseResponse cir;
  cir.bin_duration = options.bin_duration;

  const double d_los = (rx.position - tx.position).norm();
  const double los = narrow_beam_los_gain(tx, rx);
  cir.add(d_los / kSpeedOfLight, 0.0);
  if (los > 0 && !leg_blocked(blocker, tx.position, rx.position)) cir.add(d_los / kSpeedOfLight, los);
  if (options.max_bounces == 0) return cir;

  const double residue = 1.0 - beam_capture_fraction(tx, rx);
  if (residue <= 0) return cir;
  const BeamHit hit = trace_beam_axis(tx, room);
  const SurfaceElement e1 = element_at(room, hit.surface, hit.point, options.first_res, 1);
  if (leg_blocked(blocker, tx.position, hit.point)) return cir;
  const double source = residue * e1.reflectivity;
  const double d_tx_e1 = (hit.point - tx.position).norm();
  const double m = room.lambertian_mode;

  const double g1 = source * lambertian_gain(e1.center, e1.normal, m, rx);
  if (g1 > 0 && !leg_blocked(blocker, e1.center, rx.position)) {
    cir.add((d_tx_e1 + (rx.position - e1.center).norm()) / kSpeedOfLight, g1);
  }
  if (options.max_bounces == 1) return cir;

  std::vector<SurfaceElement> generated;
  if (second == nullptr) {
    generated = discretize_room(room, options.second_res, 2);
    second = &generated;
  }
  for (const auto& e2 : *second) {
    if (e2.surface == e1.surface) continue;
    const ReceiverSpec tile{e2.center, e2.normal, e2.area, M_PI / 2, 1.0};
    const double g12 = lambertian_gain(e1.center, e1.normal, m, tile);
    if (g12 <= 0) continue;
    const double g2r = lambertian_gain(e2.center, e2.normal, m, rx);
    if (g2r <= 0) continue;
    if (leg_blocked(blocker, e1.center, e2.center) || leg_blocked(blocker, e2.center, rx.position)) continue;
    const double path = d_tx_e1 + (e2.center - e1.center).norm() + (rx.position - e2.center).norm();
    cir.add(path / kSpeedOfLight, source * g12 * e2.reflectivity * g2r);
  }
  return cir;
}

void write_cir_csv(std::ostream& out, const ChannelImpulseResponse& cir) {
  out << "bin_index,time_s,gain\n";
  char buf[128];
  for (Eigen::Index k = 0; k < cir.bins.size(); ++k) {
    if (cir.bins[k] == 0) continue;
    std::snprintf(buf, sizeof buf, "%lld,%.10g,%.10g\n", static_cast<long long>(k),
                  cir.origin_time + static_cast<double>(k) * cir.bin_duration, cir.bins[k]);
    out << buf;
  }
}

}  // namespace owc
