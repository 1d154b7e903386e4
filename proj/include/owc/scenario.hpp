#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "owc/channel.hpp"
#include "owc/geometry.hpp"
#include "owc/mobility.hpp"
#include "owc/noma.hpp"

namespace owc {

/// Validation or parse failure; the message starts with the offending field path.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BlockageModel {
  joint,        // one human position drives every link of a sample
  independent,  // each link sees its own independent human
};

struct ApSettings {
  double power = 1e-3;
  double divergence = 2.1e-3;
  double max_steering_deg = 40.0;

  bool operator==(const ApSettings&) const = default;
};

struct RelaySettings {
  double power_cap = 1e-3;
  double divergence = 2.1e-3;
  double max_steering_deg = 60.0;
  double area = 1e-4;
  double fov_deg = 90.0;
  double responsivity = 0.5;
  NoiseModel noise;

  bool operator==(const RelaySettings&) const = default;
};

struct RelayConfig {
  Point3 position = Point3::Zero();
  int ap = -1;  // paired AP index; -1 picks the nearest

  bool operator==(const RelayConfig&) const = default;
};

struct UserConfig {
  Point3 position = Point3::Zero();
  double elevation_deg = 90.0;
  double azimuth_deg = 0.0;

  Eigen::Vector3d normal() const;
  bool operator==(const UserConfig&) const = default;
};

struct ReceiverSettings {
  double area = 1e-4;
  double fov_deg = 90.0;
  double responsivity = 0.5;
  double illumination_responsivity = 0.4;  // metadata; no model in scope uses it

  bool operator==(const ReceiverSettings&) const = default;
};

struct HumanSettings {
  double height = 1.8;
  double radius = 0.3;
  int count = 1;

  CylinderSpec<double> cylinder() const { return {height, radius}; }
  bool operator==(const HumanSettings&) const = default;
};

struct NomaSettings {
  double ratio = 4.0;
  std::map<int, std::vector<int>> association;  // AP index -> served user indices; empty means steering-cone rule

  bool operator==(const NomaSettings&) const = default;
};

struct SamplerSettings {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 20220801;
  int workers = 1;
  BlockageModel model = BlockageModel::joint;

  bool operator==(const SamplerSettings&) const = default;
};

struct ChannelSettings {
  int max_bounces = 2;
  double first_res = 0.05;
  double second_res = 0.20;
  double bin_duration = 1e-11;
  double wavelength = 850e-9;  // metadata

  bool operator==(const ChannelSettings&) const = default;
};

struct Scenario {
  RoomModel room;
  std::vector<Point3> aps;
  ApSettings ap;
  std::vector<RelayConfig> relays;
  RelaySettings relay;
  std::vector<UserConfig> users;
  ReceiverSettings receiver;
  HumanSettings human;
  NoiseModel noise;
  NomaSettings noma;
  RelayCombining relay_combining = RelayCombining::shared_denominator;
  double threshold_db = 15.6;
  SamplerSettings sampler;
  ChannelSettings channel;

  RwpDistribution rwp() const { return {room.width, room.length, Point2::Zero()}; }
  bool operator==(const Scenario&) const = default;
};

/// The 8 m x 4 m x 3 m office: 8 ceiling APs, 8 wall relays, 6 desk users.
Scenario default_scenario();

/// Throws ScenarioError naming the first violated field.
void validate(const Scenario& s);

inline double deg_to_rad(double deg) { return deg * M_PI / 180.0; }

}  // namespace owc
