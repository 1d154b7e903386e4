#pragma once

// NOMA power split with SIC ordering, receiver noise, and the per-user SINR of
// direct transmission, the relayed second phase, and their MRC sum.

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

namespace owc {

inline constexpr double kElectronCharge = 1.602176634e-19;

struct NoiseModel {
  double thermal_density = 1e-24;  // A^2/Hz
  double background_current = 0.0;  // A
  double bandwidth = 1e10;          // Hz

  void validate() const;
  bool operator==(const NoiseModel&) const = default;
};

/// Shot plus thermal current variance: 2 q (R P + I_bg) BW + N0 BW.
double noise_variance(const NoiseModel& model, double received_optical_power, double responsivity);

/// Users of one AP in SIC order (ascending channel gain, ties by id) with
/// their optical power shares.
struct ApAllocation {
  std::vector<int> order;
  std::vector<double> power;
};

/// Geometric split: the k-th weakest of n users gets weight ratio^(n-1-k),
/// normalized to `budget`.
ApAllocation order_users_and_allocate(double budget, std::span<const int> users, std::span<const double> gains,
                                      double ratio = 4.0);

struct NomaAllocation {
  Eigen::MatrixXd power;                 // APs x users, zero where unserved
  Eigen::MatrixXi rank;                  // SIC position, -1 where unserved
  std::vector<std::vector<int>> groups;  // per AP, users in SIC order

  static NomaAllocation from_groups(int user_count, std::span<const ApAllocation> per_ap);
  int ap_count() const { return static_cast<int>(power.rows()); }
  int user_count() const { return static_cast<int>(power.cols()); }
};

struct RelayLinks {
  std::vector<int> paired_ap;                                    // per relay, -1 if unpaired
  Eigen::VectorXd ap_gain;                                       // H_lr
  Eigen::MatrixXd user_gain;                                     // H_ri, relays x users
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> serves;    // relays x users
  Eigen::VectorXd noise;                                         // sigma_r^2

  int relay_count() const { return static_cast<int>(paired_ap.size()); }
};

enum class RelayCombining {
  shared_denominator,  // all relay terms over one denominator, as in the two-phase MRC expression
  per_branch,          // each relay branch combined as its own MRC input
};

struct SinrBreakdown {
  double first = 0.0;
  double second = 0.0;
  double mrc = 0.0;
};

/// Direct-mode SINR of `user`. `blockage` is APs x users with 1 where the
/// link is clear and 0 where it is blocked; `gains` holds H_li.
double sinr_direct(int user, const Eigen::ArrayXXd& blockage, const NomaAllocation& alloc,
                   const Eigen::MatrixXd& gains, double responsivity, double noise);

/// Second-phase SINR through the relays serving `user`. `blockage` is
/// relays x users with 1 where the relayed path is clear.
double relay_second_phase_sinr(int user, const Eigen::ArrayXXd& blockage, const NomaAllocation& alloc,
                               const RelayLinks& relays, double responsivity, double noise,
                               RelayCombining combining = RelayCombining::shared_denominator);

inline double sinr_mrc(double first_phase, double second_phase) { return first_phase + second_phase; }

}  // namespace owc
