#include "owc/scenario.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace owc {

namespace {

std::string fmt_point(const Point3& p) {
  std::ostringstream os;
  os << "(" << p.x() << ", " << p.y() << ", " << p.z() << ")";
  return os.str();
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ScenarioError(path + ": " + what);
}

void check_inside(const RoomModel& room, const Point3& p, const std::string& path) {
  const double bounds[3] = {room.width, room.length, room.height};
  const char* axes[3] = {"x", "y", "z"};
  for (int k = 0; k < 3; ++k) {
    std::ostringstream os;
    os << axes[k] << " = " << p[k] << " outside room bound [0, " << bounds[k] << "]";
    require(std::isfinite(p[k]) && p[k] >= -1e-9 && p[k] <= bounds[k] + 1e-9, path + ".position", os.str());
  }
}

bool on_wall(const RoomModel& room, const Point3& p) {
  constexpr double tol = 1e-9;
  return std::abs(p.x()) <= tol || std::abs(p.x() - room.width) <= tol || std::abs(p.y()) <= tol ||
         std::abs(p.y() - room.length) <= tol;
}

void check_positive(double v, const std::string& path) { require(v > 0, path, "must be positive"); }
void check_nonnegative(double v, const std::string& path) { require(v >= 0, path, "must be nonnegative"); }

}  // namespace

Eigen::Vector3d UserConfig::normal() const {
  const double el = deg_to_rad(elevation_deg);
  const double az = deg_to_rad(azimuth_deg);
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

Scenario default_scenario() {
  Scenario s;
  s.aps = {{1, 1, 3}, {1, 3, 3}, {1, 5, 3}, {1, 7, 3}, {3, 1, 3}, {3, 3, 3}, {3, 5, 3}, {3, 7, 3}};
  for (const Point3& p : std::vector<Point3>{
           {0, 1, 1.5}, {0, 3, 1.5}, {0, 5, 1.5}, {0, 7, 1.5}, {4, 1, 1.5}, {4, 3, 1.5}, {4, 5, 1.5}, {4, 7, 1.5}}) {
    s.relays.push_back({p, -1});
  }
  for (const Point3& p : std::vector<Point3>{{1, 1, 1}, {1, 4, 1}, {1, 7, 1}, {2, 1, 1}, {2, 4, 1}, {2, 7, 1}}) {
    s.users.push_back({p, 90.0, 0.0});
  }
  return s;
}

void validate(const Scenario& s) {
  try {
    s.room.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("room: ") + e.what());
  }
  require(!s.aps.empty(), "aps", "at least one AP is required");
  require(!s.users.empty(), "users", "at least one user is required");

  for (size_t l = 0; l < s.aps.size(); ++l) check_inside(s.room, s.aps[l], "aps[" + std::to_string(l) + "]");
  for (size_t i = 0; i < s.users.size(); ++i) {
    const std::string path = "users[" + std::to_string(i) + "]";
    check_inside(s.room, s.users[i].position, path);
    require(std::isfinite(s.users[i].elevation_deg) && std::isfinite(s.users[i].azimuth_deg), path,
            "orientation angles must be finite");
  }
  for (size_t r = 0; r < s.relays.size(); ++r) {
    const std::string path = "relays[" + std::to_string(r) + "]";
    check_inside(s.room, s.relays[r].position, path);
    require(on_wall(s.room, s.relays[r].position), path + ".position",
            fmt_point(s.relays[r].position) + " does not lie on a wall plane");
    require(s.relays[r].ap >= -1 && s.relays[r].ap < static_cast<int>(s.aps.size()), path + ".ap",
            "references an unknown AP");
  }

  check_positive(s.ap.power, "ap.power_w");
  check_positive(s.ap.divergence, "ap.divergence_rad");
  require(s.ap.max_steering_deg > 0 && s.ap.max_steering_deg <= 90, "ap.max_steering_deg", "must lie in (0, 90]");
  check_positive(s.relay.power_cap, "relay.power_cap_w");
  check_positive(s.relay.divergence, "relay.divergence_rad");
  require(s.relay.max_steering_deg > 0 && s.relay.max_steering_deg <= 90, "relay.max_steering_deg",
          "must lie in (0, 90]");
  check_positive(s.relay.area, "relay.area_m2");
  require(s.relay.fov_deg > 0 && s.relay.fov_deg <= 90, "relay.fov_deg", "must lie in (0, 90]");
  check_positive(s.relay.responsivity, "relay.responsivity_a_per_w");
  check_positive(s.receiver.area, "receiver.area_m2");
  require(s.receiver.fov_deg > 0 && s.receiver.fov_deg <= 90, "receiver.fov_deg", "must lie in (0, 90]");
  check_positive(s.receiver.responsivity, "receiver.responsivity_a_per_w");
  check_nonnegative(s.receiver.illumination_responsivity, "receiver.illumination_responsivity_a_per_w");

  check_positive(s.human.height, "human.height_m");
  check_positive(s.human.radius, "human.radius_m");
  require(s.human.count >= 0, "human.count", "must be nonnegative");

  for (const auto* n : {&s.noise, &s.relay.noise}) {
    const std::string path = n == &s.noise ? "noise" : "relay.noise";
    check_nonnegative(n->thermal_density, path + ".thermal_a2_per_hz");
    check_nonnegative(n->background_current, path + ".background_current_a");
    check_nonnegative(n->bandwidth, path + ".bandwidth_hz");
  }

  check_positive(s.noma.ratio, "noma.ratio");
  for (const auto& [ap, users] : s.noma.association) {
    const std::string path = "noma.association[" + std::to_string(ap) + "]";
    require(ap >= 0 && ap < static_cast<int>(s.aps.size()), path, "references an unknown AP");
    std::set<int> seen;
    for (int u : users) {
      require(u >= 0 && u < static_cast<int>(s.users.size()), path, "references an unknown user");
      require(seen.insert(u).second, path, "lists a user twice");
    }
  }

  require(std::isfinite(s.threshold_db) && s.threshold_db > 0, "threshold_db", "must be positive");
  require(s.sampler.samples >= 1, "sampler.samples", "must be at least 1");
  require(s.sampler.workers >= 1, "sampler.workers", "must be at least 1");
  require(s.channel.max_bounces >= 0 && s.channel.max_bounces <= 2, "channel.max_bounces", "must be 0, 1 or 2");
  check_positive(s.channel.first_res, "channel.first_resolution_m");
  check_positive(s.channel.second_res, "channel.second_resolution_m");
  check_positive(s.channel.bin_duration, "channel.bin_duration_s");
  check_positive(s.channel.wavelength, "channel.wavelength_m");
}

}  // namespace owc
