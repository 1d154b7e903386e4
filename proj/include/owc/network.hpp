#pragma once

// Binds a scenario to concrete links: which AP serves which user, which AP
// feeds which relay, the DC gain of every served link, the NOMA split and the
// per-receiver noise. Immutable once built.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "owc/channel.hpp"
#include "owc/noma.hpp"
#include "owc/scenario.hpp"

namespace owc {

struct DirectLink {
  int ap = 0;
  int user = 0;
  Segment3<double> segment;
};

struct RelayPath {
  int relay = 0;
  int ap = 0;
  int user = 0;
  Segment3<double> first_hop;   // AP -> relay
  Segment3<double> second_hop;  // relay -> user
};

struct LinkGain {
  double total = 0.0;
  double los = 0.0;
  double reflected = 0.0;
};

std::string ap_id(int l);
std::string relay_id(int r);
std::string user_id(int i);

class Network {
 public:
  explicit Network(Scenario scenario);

  const Scenario& scenario() const { return scenario_; }
  int ap_count() const { return static_cast<int>(scenario_.aps.size()); }
  int user_count() const { return static_cast<int>(scenario_.users.size()); }
  int relay_count() const { return static_cast<int>(scenario_.relays.size()); }

  bool serves(int ap, int user) const { return association_(ap, user); }
  const Eigen::MatrixXd& direct_gain() const { return direct_gain_; }
  const RelayLinks& relays() const { return relays_; }
  const NomaAllocation& allocation() const { return alloc_; }
  double user_noise(int user) const { return user_noise_[user]; }
  double responsivity() const { return scenario_.receiver.responsivity; }

  const std::vector<DirectLink>& direct_links() const { return direct_links_; }
  const std::vector<RelayPath>& relay_paths() const { return relay_paths_; }

  TransmitterSpec ap_transmitter(int ap, const Point3& aim) const;
  TransmitterSpec relay_transmitter(int relay, const Point3& aim) const;
  ReceiverSpec user_receiver(int user) const;
  ReceiverSpec relay_receiver(int relay) const;
  /// Inward normal of the wall a relay is mounted on.
  Eigen::Vector3d relay_boresight(int relay) const;

  /// Gain split of one steered link under the scenario's channel settings.
  LinkGain link_gain(const TransmitterSpec& tx, const ReceiverSpec& rx) const;

  /// Per-user SINRs for clear/blocked factors: direct is APs x users,
  /// relayed is relays x users (1 = clear).
  SinrBreakdown evaluate(int user, const Eigen::ArrayXXd& direct_clear, const Eigen::ArrayXXd& relay_clear) const;
  double evaluate_direct(int user, const Eigen::ArrayXXd& direct_clear) const;

 private:
  Scenario scenario_;
  std::vector<SurfaceElement> second_order_;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> association_;
  Eigen::MatrixXd direct_gain_;
  RelayLinks relays_;
  NomaAllocation alloc_;
  Eigen::VectorXd user_noise_;
  std::vector<DirectLink> direct_links_;
  std::vector<RelayPath> relay_paths_;
};

}  // namespace owc
