#include "owc/noma.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace owc {

void NoiseModel::validate() const {
  if (!(thermal_density >= 0) || !(background_current >= 0) || !(bandwidth >= 0)) {
    throw std::invalid_argument("noise model parameters must be nonnegative");
  }
}

double noise_variance(const NoiseModel& model, double received_optical_power, double responsivity) {
  const double photocurrent = responsivity * received_optical_power + model.background_current;
  return 2.0 * kElectronCharge * photocurrent * model.bandwidth + model.thermal_density * model.bandwidth;
}

ApAllocation order_users_and_allocate(double budget, std::span<const int> users, std::span<const double> gains,
                                      double ratio) {
  if (users.empty()) throw std::invalid_argument("NOMA allocation needs at least one served user");
  if (users.size() != gains.size()) throw std::invalid_argument("one gain per served user is required");
  if (!(ratio > 0)) throw std::invalid_argument("NOMA power ratio must be positive");
  for (double g : gains) {
    if (!(g >= 0)) throw std::invalid_argument("channel gains must be nonnegative");
  }

  std::vector<size_t> idx(users.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    if (gains[a] != gains[b]) return gains[a] < gains[b];
    return users[a] < users[b];
  });

  const size_t n = idx.size();
  ApAllocation out;
  std::vector<double> weights(n);
  for (size_t k = 0; k < n; ++k) weights[k] = std::pow(ratio, static_cast<double>(n - 1 - k));
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (size_t k = 0; k < n; ++k) {
    out.order.push_back(users[idx[k]]);
    out.power.push_back(budget * weights[k] / total);
  }
  return out;
}

NomaAllocation NomaAllocation::from_groups(int user_count, std::span<const ApAllocation> per_ap) {
  NomaAllocation a;
  const auto aps = static_cast<Eigen::Index>(per_ap.size());
  a.power = Eigen::MatrixXd::Zero(aps, user_count);
  a.rank = Eigen::MatrixXi::Constant(aps, user_count, -1);
  a.groups.resize(per_ap.size());
  for (Eigen::Index l = 0; l < aps; ++l) {
    const auto& g = per_ap[l];
    for (size_t k = 0; k < g.order.size(); ++k) {
      const int u = g.order[k];
      if (u < 0 || u >= user_count) throw std::out_of_range("allocation references an unknown user");
      a.power(l, u) = g.power[k];
      a.rank(l, u) = static_cast<int>(k);
    }
    a.groups[l] = g.order;
  }
  return a;
}

double sinr_direct(int user, const Eigen::ArrayXXd& blockage, const NomaAllocation& alloc,
                   const Eigen::MatrixXd& gains, double responsivity, double noise) {
  if (gains.rows() != alloc.power.rows() || gains.cols() != alloc.power.cols()) {
    throw std::invalid_argument("gain matrix does not match the allocation shape");
  }
  double signal = 0.0;
  double interference = 0.0;
  for (int l = 0; l < alloc.ap_count(); ++l) {
    const int rank = alloc.rank(l, user);
    if (rank < 0) continue;
    const double h = gains(l, user);
    if (!std::isfinite(h)) {
      throw std::invalid_argument("missing gain for AP " + std::to_string(l) + " -> user " + std::to_string(user));
    }
    const double s = blockage(l, user) * alloc.power(l, user) * responsivity * h;
    signal += s * s;
    const auto& group = alloc.groups[l];
    for (size_t k = static_cast<size_t>(rank) + 1; k < group.size(); ++k) {
      const int other = group[k];
      const double x = blockage(l, other) * alloc.power(l, other) * responsivity * h;
      interference += x * x;
    }
  }
  return signal / (noise + interference);
}

double relay_second_phase_sinr(int user, const Eigen::ArrayXXd& blockage, const NomaAllocation& alloc,
                               const RelayLinks& relays, double responsivity, double noise,
                               RelayCombining combining) {
  double signal = 0.0;
  double denominator = noise;
  double per_branch = 0.0;
  for (int r = 0; r < relays.relay_count(); ++r) {
    if (!relays.serves(r, user)) continue;
    const int l = relays.paired_ap[r];
    if (l < 0) throw std::invalid_argument("relay " + std::to_string(r) + " has no paired AP");
    const int rank = alloc.rank(l, user);
    if (rank < 0) continue;
    const double gate = blockage(r, user);
    if (gate == 0.0) continue;
    const double path = responsivity * relays.ap_gain[r] * relays.user_gain(r, user);
    const double s = gate * alloc.power(l, user) * path;
    double interference = 0.0;
    const auto& group = alloc.groups[l];
    for (size_t k = static_cast<size_t>(rank) + 1; k < group.size(); ++k) {
      const double x = gate * alloc.power(l, group[k]) * path;
      interference += x * x;
    }
    const double relay_noise = gate * relays.noise[r];
    signal += s * s;
    denominator += interference + relay_noise;
    per_branch += s * s / (noise + interference + relay_noise);
  }
  return combining == RelayCombining::per_branch ? per_branch : signal / denominator;
}

}  // namespace owc
