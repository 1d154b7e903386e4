#pragma once

// Ray-traced indoor optical channel: steered narrow-beam line of sight plus
// Lambertian surface reflections up to second order.

#include <Eigen/Dense>

#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "owc/geometry.hpp"

namespace owc {

inline constexpr double kSpeedOfLight = 2.99792458e8;

class UnservableLink : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Surface { floor, ceiling, wall_x0, wall_x1, wall_y0, wall_y1 };

struct RoomModel {
  double width = 4.0;   // x extent
  double length = 8.0;  // y extent
  double height = 3.0;
  double wall_reflectivity = 0.8;
  double ceiling_reflectivity = 0.8;
  double floor_reflectivity = 0.3;
  double lambertian_mode = 1.0;

  Rect2<double> footprint() const { return {Point2(0, 0), Point2(width, length)}; }
  bool contains(const Point3& p, double tol = 1e-9) const;
  double reflectivity(Surface s) const;
  void validate() const;
  bool operator==(const RoomModel&) const = default;
};

struct SurfaceElement {
  Point3 center;
  Eigen::Vector3d normal;  // unit, pointing into the room
  double area = 0;
  double reflectivity = 0;
  Surface surface = Surface::floor;
  int bounce_order = 1;
};

struct SurfaceDiscretization {
  std::vector<SurfaceElement> first;
  std::vector<SurfaceElement> second;
};

/// Tiles all six room surfaces at two resolutions. Edge tiles keep their
/// true (smaller) area.
SurfaceDiscretization discretize_surfaces(const RoomModel& room, double first_res, double second_res);

/// Tiles of one resolution only.
std::vector<SurfaceElement> discretize_room(const RoomModel& room, double resolution, int bounce_order);

/// The tile of the given resolution containing a point on a room surface.
SurfaceElement element_at(const RoomModel& room, Surface surface, const Point3& point, double resolution,
                          int bounce_order);

/// Unit vector pointing into the room from a surface.
Eigen::Vector3d surface_normal(Surface s);

struct TransmitterSpec {
  Point3 position = Point3::Zero();
  double power = 1e-3;
  double divergence = 2.1e-3;  // half-angle, rad
  Point3 aim = Point3::Zero();
  Eigen::Vector3d boresight = -Eigen::Vector3d::UnitZ();
  double max_steering = 40.0 * M_PI / 180.0;  // half-angle about boresight, rad

  bool can_steer_to(const Point3& target) const;
};

struct ReceiverSpec {
  Point3 position = Point3::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double area = 1e-4;
  double fov = M_PI / 2;  // half-angle, rad
  double responsivity = 0.5;

  double aperture_radius() const { return std::sqrt(area / M_PI); }
};

/// Overlap area of two disks with radii r1, r2 whose centers are `dist` apart.
double disk_overlap_area(double r1, double r2, double dist);

/// Fraction of the top-hat beam spot captured by the aperture disk, before the
/// incidence cosine.
double beam_capture_fraction(const TransmitterSpec& tx, const ReceiverSpec& rx);

/// Line-of-sight gain of a steered top-hat beam: capture fraction times the
/// incidence cosine, zero outside the FOV.
double narrow_beam_los_gain(const TransmitterSpec& tx, const ReceiverSpec& rx);

/// Single-leg gain from a Lambertian emitter of mode m to a receiver aperture.
double lambertian_gain(const Point3& src_pos, const Eigen::Vector3d& src_normal, double src_mode,
                       const ReceiverSpec& rx);

struct ChannelImpulseResponse {
  double bin_duration = 1e-11;
  double origin_time = 0.0;
  Eigen::VectorXd bins;

  void add(double delay, double gain);
};

struct HumanBlocker {
  Point2 center;
  CylinderSpec<double> cylinder;
};

struct ChannelOptions {
  int max_bounces = 2;
  double first_res = 0.05;
  double second_res = 0.20;
  double bin_duration = 1e-11;
};

/// Where the beam axis leaves the room.
struct BeamHit {
  Point3 point;
  Surface surface;
};
BeamHit trace_beam_axis(const TransmitterSpec& tx, const RoomModel& room);

/// Time-binned impulse response of one link. The beam power not captured by
/// the receiver lands where the axis meets a surface and re-radiates from
/// that first-order tile. Second-order tiles come from `second` when given,
/// otherwise they are generated.
ChannelImpulseResponse impulse_response(const TransmitterSpec& tx, const ReceiverSpec& rx, const RoomModel& room,
                                        const ChannelOptions& options,
                                        const std::optional<HumanBlocker>& blocker = std::nullopt,
                                        const std::vector<SurfaceElement>* second = nullptr);

inline double dc_gain(const ChannelImpulseResponse& cir) { return cir.bins.sum(); }

/// One row per nonzero bin: bin_index,time_s,gain.
void write_cir_csv(std::ostream& out, const ChannelImpulseResponse& cir);

}  // namespace owc
