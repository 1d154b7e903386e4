#include "owc/network.hpp"

#include <cmath>
#include <limits>

namespace owc {

std::string ap_id(int l) { return "ap" + std::to_string(l + 1); }
std::string relay_id(int r) { return "relay" + std::to_string(r + 1); }
std::string user_id(int i) { return "user" + std::to_string(i + 1); }

Network::Network(Scenario scenario) : scenario_(std::move(scenario)) {
  validate(scenario_);
  const int L = ap_count();
  const int U = user_count();
  const int R = relay_count();
  if (scenario_.channel.max_bounces >= 2) {
    second_order_ = discretize_room(scenario_.room, scenario_.channel.second_res, 2);
  }

  association_.setConstant(L, U, false);
  if (scenario_.noma.association.empty()) {
    for (int l = 0; l < L; ++l) {
      const auto tx = ap_transmitter(l, scenario_.aps[l]);
      for (int i = 0; i < U; ++i) association_(l, i) = tx.can_steer_to(scenario_.users[i].position);
    }
  } else {
    for (const auto& [l, users] : scenario_.noma.association) {
      for (int i : users) association_(l, i) = true;
    }
  }

  direct_gain_.setZero(L, U);
  for (int l = 0; l < L; ++l) {
    for (int i = 0; i < U; ++i) {
      if (!association_(l, i)) continue;
      const auto& target = scenario_.users[i].position;
      try {
        direct_gain_(l, i) = link_gain(ap_transmitter(l, target), user_receiver(i)).total;
      } catch (const UnservableLink& e) {
        throw ScenarioError("noma.association: " + ap_id(l) + " cannot serve " + user_id(i) + ": " + e.what());
      }
      direct_links_.push_back({l, i, {scenario_.aps[l], target}});
    }
  }

  std::vector<ApAllocation> groups(L);
  for (int l = 0; l < L; ++l) {
    std::vector<int> users;
    std::vector<double> gains;
    for (int i = 0; i < U; ++i) {
      if (association_(l, i)) {
        users.push_back(i);
        gains.push_back(direct_gain_(l, i));
      }
    }
    if (!users.empty()) groups[l] = order_users_and_allocate(scenario_.ap.power, users, gains, scenario_.noma.ratio);
  }
  alloc_ = NomaAllocation::from_groups(U, groups);

  user_noise_.resize(U);
  for (int i = 0; i < U; ++i) {
    double received = 0.0;
    for (int l = 0; l < L; ++l) received += association_(l, i) ? scenario_.ap.power * direct_gain_(l, i) : 0.0;
    user_noise_[i] = noise_variance(scenario_.noise, received, scenario_.receiver.responsivity);
  }

  relays_.paired_ap.assign(R, -1);
  relays_.ap_gain.setZero(R);
  relays_.user_gain.setZero(R, U);
  relays_.serves.setConstant(R, U, false);
  relays_.noise.setZero(R);
  for (int r = 0; r < R; ++r) {
    const Point3& pos = scenario_.relays[r].position;
    int l = scenario_.relays[r].ap;
    if (l < 0) {
      double best = std::numeric_limits<double>::infinity();
      for (int k = 0; k < L; ++k) {
        const double d = (scenario_.aps[k] - pos).norm();
        if (d < best) {
          best = d;
          l = k;
        }
      }
    }
    relays_.paired_ap[r] = l;
    try {
      relays_.ap_gain[r] = link_gain(ap_transmitter(l, pos), relay_receiver(r)).total;
    } catch (const UnservableLink& e) {
      throw ScenarioError("relays[" + std::to_string(r) + "].ap: " + ap_id(l) + " cannot reach " + relay_id(r) + ": " +
                          e.what());
    }
    relays_.noise[r] = noise_variance(scenario_.relay.noise, scenario_.ap.power * relays_.ap_gain[r],
                                      scenario_.relay.responsivity);
    for (int i = 0; i < U; ++i) {
      const auto& target = scenario_.users[i].position;
      const auto tx = relay_transmitter(r, target);
      if (!association_(l, i) || !tx.can_steer_to(target)) continue;
      const double h = link_gain(tx, user_receiver(i)).total;
      if (h <= 0) continue;
      relays_.user_gain(r, i) = h;
      relays_.serves(r, i) = true;
      relay_paths_.push_back({r, l, i, {scenario_.aps[l], pos}, {pos, target}});
    }
  }
}

TransmitterSpec Network::ap_transmitter(int ap, const Point3& aim) const {
  TransmitterSpec tx;
  tx.position = scenario_.aps[ap];
  tx.power = scenario_.ap.power;
  tx.divergence = scenario_.ap.divergence;
  tx.aim = aim;
  tx.boresight = -Eigen::Vector3d::UnitZ();
  tx.max_steering = deg_to_rad(scenario_.ap.max_steering_deg);
  return tx;
}

Eigen::Vector3d Network::relay_boresight(int relay) const {
  const Point3& p = scenario_.relays[relay].position;
  constexpr double tol = 1e-9;
  if (std::abs(p.x()) <= tol) return Eigen::Vector3d::UnitX();
  if (std::abs(p.x() - scenario_.room.width) <= tol) return -Eigen::Vector3d::UnitX();
  if (std::abs(p.y()) <= tol) return Eigen::Vector3d::UnitY();
  return -Eigen::Vector3d::UnitY();
}

TransmitterSpec Network::relay_transmitter(int relay, const Point3& aim) const {
  TransmitterSpec tx;
  tx.position = scenario_.relays[relay].position;
  tx.power = scenario_.relay.power_cap;
  tx.divergence = scenario_.relay.divergence;
  tx.aim = aim;
  tx.boresight = relay_boresight(relay);
  tx.max_steering = deg_to_rad(scenario_.relay.max_steering_deg);
  return tx;
}

ReceiverSpec Network::user_receiver(int user) const {
  const auto& u = scenario_.users[user];
  return {u.position, u.normal(), scenario_.receiver.area, deg_to_rad(scenario_.receiver.fov_deg),
          scenario_.receiver.responsivity};
}

ReceiverSpec Network::relay_receiver(int relay) const {
  return {scenario_.relays[relay].position, relay_boresight(relay), scenario_.relay.area,
          deg_to_rad(scenario_.relay.fov_deg), scenario_.relay.responsivity};
}

LinkGain Network::link_gain(const TransmitterSpec& tx, const ReceiverSpec& rx) const {
  ChannelOptions opt{scenario_.channel.max_bounces, scenario_.channel.first_res, scenario_.channel.second_res,
                     scenario_.channel.bin_duration};
  const auto cir = impulse_response(tx, rx, scenario_.room, opt, std::nullopt,
                                    second_order_.empty() ? nullptr : &second_order_);
  LinkGain g;
  g.los = narrow_beam_los_gain(tx, rx);
  g.total = dc_gain(cir);
  g.reflected = std::max(0.0, g.total - g.los);
  return g;
}

double Network::evaluate_direct(int user, const Eigen::ArrayXXd& direct_clear) const {
  return sinr_direct(user, direct_clear, alloc_, direct_gain_, responsivity(), user_noise_[user]);
}

SinrBreakdown Network::evaluate(int user, const Eigen::ArrayXXd& direct_clear,
                                const Eigen::ArrayXXd& relay_clear) const {
  SinrBreakdown b;
  b.first = evaluate_direct(user, direct_clear);
  b.second = relay_second_phase_sinr(user, relay_clear, alloc_, relays_, responsivity(), user_noise_[user],
                                     scenario_.relay_combining);
  b.mrc = sinr_mrc(b.first, b.second);
  return b;
}

}  // namespace owc
