#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "owc/network.hpp"
#include "owc/noma.hpp"
#include "owc/outage.hpp"

using namespace owc;

namespace {

constexpr double q = 1.602176634e-19;
const double kShot1mW = 2 * q * 5e-4 * 1e10;  // 1 mW on 0.5 A/W over 10 GHz

NomaAllocation single_ap(std::vector<int> order, std::vector<double> power, int users) {
  const ApAllocation a{std::move(order), std::move(power)};
  return NomaAllocation::from_groups(users, std::span<const ApAllocation>(&a, 1));
}

RelayLinks relays_for_one_user(int count, double h_lr, double h_ri, double sigma_r) {
  RelayLinks r;
  r.paired_ap.assign(count, 0);
  r.ap_gain = Eigen::VectorXd::Constant(count, h_lr);
  r.user_gain = Eigen::MatrixXd::Constant(count, 1, h_ri);
  r.serves.setConstant(count, 1, true);
  r.noise = Eigen::VectorXd::Constant(count, sigma_r);
  return r;
}

// Random multi-AP, multi-relay instance with a consistent allocation.
struct Instance {
  NomaAllocation alloc;
  Eigen::MatrixXd gains;
  RelayLinks relays;
  Eigen::VectorXd noise;
};

Instance random_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0), n(1e-14, 1e-11);
  std::uniform_int_distribution<int> count(1, 4);
  const int L = count(rng), U = count(rng) + 1, R = count(rng);
  Instance in;
  in.gains = Eigen::MatrixXd::Zero(L, U);
  std::vector<ApAllocation> per_ap;
  for (int l = 0; l < L; ++l) {
    std::vector<int> users;
    std::vector<double> g;
    for (int i = 0; i < U; ++i) {
      if (u(rng) < 0.6 || i == l % U) {
        users.push_back(i);
        in.gains(l, i) = u(rng);
        g.push_back(in.gains(l, i));
      }
    }
    per_ap.push_back(order_users_and_allocate(1e-3, users, g, 4.0));
  }
  in.alloc = NomaAllocation::from_groups(U, per_ap);
  in.relays.paired_ap.resize(R);
  in.relays.ap_gain.resize(R);
  in.relays.user_gain = Eigen::MatrixXd::Zero(R, U);
  in.relays.serves.setConstant(R, U, false);
  in.relays.noise.resize(R);
  for (int r = 0; r < R; ++r) {
    const int l = std::uniform_int_distribution<int>(0, L - 1)(rng);
    in.relays.paired_ap[r] = l;
    in.relays.ap_gain[r] = u(rng);
    in.relays.noise[r] = n(rng);
    for (int i = 0; i < U; ++i) {
      if (in.alloc.rank(l, i) >= 0 && u(rng) < 0.8) {
        in.relays.serves(r, i) = true;
        in.relays.user_gain(r, i) = u(rng);
      }
    }
  }
  in.noise = Eigen::VectorXd::NullaryExpr(U, [&] { return n(rng); });
  return in;
}

Eigen::ArrayXXd random_mask(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::bernoulli_distribution b(0.6);
  return Eigen::ArrayXXd::NullaryExpr(rows, cols, [&] { return b(rng) ? 1.0 : 0.0; });
}

}  // namespace

TEST_CASE("allocation: single user takes the whole budget") {
  const int users[] = {3};
  const double gains[] = {0.7};
  const auto a = order_users_and_allocate(1e-3, users, gains);
  CHECK(a.order == std::vector<int>{3});
  CHECK(a.power[0] == 1e-3);
}

TEST_CASE("allocation: two users with ratio 4") {
  const int users[] = {0, 1};
  const double gains[] = {0.9, 0.1};
  const auto a = order_users_and_allocate(1e-3, users, gains, 4.0);
  CHECK(a.order == std::vector<int>{1, 0});  // weak channel first
  CHECK(a.power[0] == doctest::Approx(0.8e-3).epsilon(1e-14));
  CHECK(a.power[1] == doctest::Approx(0.2e-3).epsilon(1e-14));
}

TEST_CASE("allocation: equal gains fall back to user id order") {
  const int users[] = {5, 2, 9};
  const double gains[] = {0.5, 0.5, 0.5};
  const auto a = order_users_and_allocate(1e-3, users, gains, 4.0);
  CHECK(a.order == std::vector<int>{2, 5, 9});
  CHECK(a.power[0] == doctest::Approx(16e-3 / 21));
  CHECK(a.power[1] == doctest::Approx(4e-3 / 21));
  CHECK(a.power[2] == doctest::Approx(1e-3 / 21));
}

TEST_CASE("allocation: errors") {
  CHECK_THROWS(order_users_and_allocate(1e-3, std::span<const int>{}, std::span<const double>{}));
  const int users[] = {0};
  const double bad[] = {-0.1};
  CHECK_THROWS(order_users_and_allocate(1e-3, users, bad));
}

TEST_CASE("property: power budget is conserved and ordering is ascending") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> g(0, 1), ratio(1.0, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 8;
    std::vector<int> users(n);
    std::vector<double> gains(n);
    for (int k = 0; k < n; ++k) {
      users[k] = k * 3;
      gains[k] = g(rng);
    }
    const auto a = order_users_and_allocate(1e-3, users, gains, ratio(rng));
    double total = 0;
    for (double p : a.power) {
      CHECK(p >= 0);
      total += p;
    }
    CHECK(total == doctest::Approx(1e-3).epsilon(1e-12));
    for (int k = 1; k < n; ++k) {
      CHECK(gains[a.order[k - 1] / 3] <= gains[a.order[k] / 3]);
      CHECK(a.power[k - 1] >= a.power[k]);
    }
  }
}

TEST_CASE("noise variance examples") {
  NoiseModel m;
  CHECK(noise_variance(m, 0, 0.5) == doctest::Approx(1e-24 * 1e10).epsilon(1e-15));
  NoiseModel shot_only{0, 0, 1e10};
  CHECK(noise_variance(shot_only, 1e-3, 0.5) == doctest::Approx(1.60218e-12).epsilon(1e-5));
  CHECK(noise_variance(shot_only, 1e-3, 0.5) == doctest::Approx(kShot1mW).epsilon(1e-14));
  CHECK(noise_variance(m, 1e-3, 0.5) == doctest::Approx(kShot1mW + 1e-14).epsilon(1e-14));
  NoiseModel bg{0, 1e-6, 1e10};
  CHECK(noise_variance(bg, 0, 0.5) == doctest::Approx(2 * q * 1e-6 * 1e10).epsilon(1e-14));
}

TEST_CASE("direct SINR: all links blocked") {
  const auto alloc = single_ap({0, 1}, {0.8e-3, 0.2e-3}, 2);
  const Eigen::MatrixXd h = Eigen::MatrixXd::Ones(1, 2);
  const Eigen::ArrayXXd blocked = Eigen::ArrayXXd::Zero(1, 2);
  CHECK(sinr_direct(0, blocked, alloc, h, 0.5, 1e-14) == 0.0);
  CHECK(sinr_direct(1, blocked, alloc, h, 0.5, 1e-14) == 0.0);
}

TEST_CASE("direct SINR: single user") {
  const auto alloc = single_ap({0}, {1e-3}, 1);
  const Eigen::MatrixXd h = Eigen::MatrixXd::Ones(1, 1);
  const double s = sinr_direct(0, Eigen::ArrayXXd::Ones(1, 1), alloc, h, 0.5, 1.60218e-12);
  CHECK(s == doctest::Approx(2.5e-7 / 1.60218e-12).epsilon(1e-12));
  CHECK(s == doctest::Approx(1.5604e5).epsilon(1e-4));
  CHECK(10 * std::log10(s) == doctest::Approx(51.9).epsilon(1e-3));
}

TEST_CASE("direct SINR: one later-decoded interferer") {
  const Eigen::MatrixXd h = Eigen::MatrixXd::Ones(1, 2);
  const Eigen::ArrayXXd clear = Eigen::ArrayXXd::Ones(1, 2);
  auto alloc_with = [](double pk) {
    NomaAllocation alloc;
    alloc.power.resize(1, 2);
    alloc.power << 1e-3, pk;
    alloc.rank.resize(1, 2);
    alloc.rank << 0, 1;
    alloc.groups = {{0, 1}};
    return alloc;
  };
  // Interference term (P_k R H)^2: 0.1 mW gives 2.5e-9, 0.2 mW gives 1e-8.
  const double s1 = sinr_direct(0, clear, alloc_with(0.1e-3), h, 0.5, 1.60218e-12);
  CHECK(s1 == doctest::Approx(2.5e-7 / (1.60218e-12 + 2.5e-9)).epsilon(1e-12));
  CHECK(s1 == doctest::Approx(99.936).epsilon(1e-5));
  const double s2 = sinr_direct(0, clear, alloc_with(0.2e-3), h, 0.5, 1.60218e-12);
  CHECK(s2 == doctest::Approx(2.5e-7 / (1.60218e-12 + 1e-8)).epsilon(1e-12));
  CHECK(s2 == doctest::Approx(24.996).epsilon(1e-4));
  // The later-decoded user itself sees no interference from user 0.
  CHECK(sinr_direct(1, clear, alloc_with(0.2e-3), h, 0.5, 1.60218e-12) ==
        doctest::Approx(1e-8 / 1.60218e-12).epsilon(1e-12));
  // Blocking the interferer's link removes its term.
  Eigen::ArrayXXd b = clear;
  b(0, 1) = 0;
  CHECK(sinr_direct(0, b, alloc_with(0.2e-3), h, 0.5, 1.60218e-12) == doctest::Approx(2.5e-7 / 1.60218e-12));
}

TEST_CASE("direct SINR: missing gain and shape mismatch") {
  const auto alloc = single_ap({0}, {1e-3}, 1);
  Eigen::MatrixXd h(1, 1);
  h(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(sinr_direct(0, Eigen::ArrayXXd::Ones(1, 1), alloc, h, 0.5, 1e-14));
  CHECK_THROWS(sinr_direct(0, Eigen::ArrayXXd::Ones(1, 1), alloc, Eigen::MatrixXd::Ones(2, 1), 0.5, 1e-14));
}

TEST_CASE("property: SIC consistency, the strongest user sees no NOMA interference") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const auto in = random_instance(rng);
    for (int l = 0; l < in.alloc.ap_count(); ++l) {
      const auto& g = in.alloc.groups[l];
      if (g.empty()) continue;
      const int strongest = g.back();
      // Only this AP serves it in the probe.
      Eigen::ArrayXXd mask = Eigen::ArrayXXd::Zero(in.alloc.ap_count(), in.alloc.user_count());
      mask.row(l).setOnes();
      const double s = sinr_direct(strongest, mask, in.alloc, in.gains, 0.5, 1e-12);
      const double x = in.alloc.power(l, strongest) * 0.5 * in.gains(l, strongest);
      CHECK(s == doctest::Approx(x * x / 1e-12).epsilon(1e-12));
    }
  }
}

TEST_CASE("relay second phase: all paths blocked") {
  const auto alloc = single_ap({0}, {1e-3}, 1);
  const auto r = relays_for_one_user(2, 1, 1, 1.60218e-12);
  CHECK(relay_second_phase_sinr(0, Eigen::ArrayXXd::Zero(2, 1), alloc, r, 0.5, 1e-14) == 0.0);
}

TEST_CASE("relay second phase: one relay") {
  const auto alloc = single_ap({0}, {1e-3}, 1);
  const auto r = relays_for_one_user(1, 1, 1, 1.60218e-12);
  const double sigma_i = 1e-14;
  CHECK(relay_second_phase_sinr(0, Eigen::ArrayXXd::Ones(1, 1), alloc, r, 0.5, sigma_i) ==
        doctest::Approx(2.5e-7 / (sigma_i + 1.60218e-12)).epsilon(1e-13));
}

TEST_CASE("relay second phase: two identical relays") {
  const auto alloc = single_ap({0}, {1e-3}, 1);
  const auto r = relays_for_one_user(2, 1, 1, 1.60218e-12);
  const double sigma_i = 1e-14;
  CHECK(relay_second_phase_sinr(0, Eigen::ArrayXXd::Ones(2, 1), alloc, r, 0.5, sigma_i) ==
        doctest::Approx(2 * 2.5e-7 / (sigma_i + 2 * 1.60218e-12)).epsilon(1e-13));
  // Per-branch combining sums two single-relay ratios instead.
  CHECK(relay_second_phase_sinr(0, Eigen::ArrayXXd::Ones(2, 1), alloc, r, 0.5, sigma_i,
                                RelayCombining::per_branch) ==
        doctest::Approx(2 * 2.5e-7 / (sigma_i + 1.60218e-12)).epsilon(1e-13));
}

TEST_CASE("relay second phase: unpaired serving relay is an error") {
  const auto alloc = single_ap({0}, {1e-3}, 1);
  auto r = relays_for_one_user(1, 1, 1, 1e-12);
  r.paired_ap[0] = -1;
  CHECK_THROWS(relay_second_phase_sinr(0, Eigen::ArrayXXd::Ones(1, 1), alloc, r, 0.5, 1e-14));
}

TEST_CASE("MRC examples") {
  CHECK(sinr_mrc(10, 5) == 15);
  CHECK(sinr_mrc(7.25, 0) == 7.25);
  const double th = std::pow(10.0, 1.56);
  CHECK(th == doctest::Approx(36.3078).epsilon(1e-6));
  CHECK(sinr_mrc(20.0, 16.31) == doctest::Approx(36.31));
  CHECK(sinr_mrc(20.0, 16.31) > th);
  CHECK(20.0 < th);
  CHECK(16.31 < th);
}

TEST_CASE("property: MRC dominance, and equality to the first phase when every relay is blocked") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const auto in = random_instance(rng);
    const auto beta = random_mask(rng, in.alloc.ap_count(), in.alloc.user_count());
    const auto gamma = random_mask(rng, in.relays.relay_count(), in.alloc.user_count());
    for (int i = 0; i < in.alloc.user_count(); ++i) {
      const double first = sinr_direct(i, beta, in.alloc, in.gains, 0.5, in.noise[i]);
      const double second = relay_second_phase_sinr(i, gamma, in.alloc, in.relays, 0.5, in.noise[i]);
      CHECK(second >= 0);
      CHECK(sinr_mrc(first, second) >= std::max(first, second));
      const double none = relay_second_phase_sinr(i, Eigen::ArrayXXd::Zero(gamma.rows(), gamma.cols()), in.alloc,
                                                  in.relays, 0.5, in.noise[i]);
      CHECK(sinr_mrc(first, none) == first);
    }
  }
}

TEST_CASE("property: unblocking a user's own direct link never lowers its SINR") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const auto in = random_instance(rng);
    auto beta = random_mask(rng, in.alloc.ap_count(), in.alloc.user_count());
    const auto gamma = random_mask(rng, in.relays.relay_count(), in.alloc.user_count());
    for (int i = 0; i < in.alloc.user_count(); ++i) {
      for (int l = 0; l < in.alloc.ap_count(); ++l) {
        auto off = beta, on = beta;
        off(l, i) = 0;
        on(l, i) = 1;
        const double second = relay_second_phase_sinr(i, gamma, in.alloc, in.relays, 0.5, in.noise[i]);
        CHECK(sinr_mrc(sinr_direct(i, on, in.alloc, in.gains, 0.5, in.noise[i]), second) >=
              sinr_mrc(sinr_direct(i, off, in.alloc, in.gains, 0.5, in.noise[i]), second));
      }
    }
  }
}

TEST_CASE("property: unblocking a relayed path never lowers per-branch MRC SINR") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 300; ++trial) {
    const auto in = random_instance(rng);
    const auto gamma = random_mask(rng, in.relays.relay_count(), in.alloc.user_count());
    for (int i = 0; i < in.alloc.user_count(); ++i) {
      for (int r = 0; r < in.relays.relay_count(); ++r) {
        auto off = gamma, on = gamma;
        off(r, i) = 0;
        on(r, i) = 1;
        CHECK(relay_second_phase_sinr(i, on, in.alloc, in.relays, 0.5, in.noise[i], RelayCombining::per_branch) >=
              relay_second_phase_sinr(i, off, in.alloc, in.relays, 0.5, in.noise[i], RelayCombining::per_branch));
      }
    }
  }
}

TEST_CASE("relay combining in the default office: per-branch is monotone, shared is not") {
  // Every user and every relay pattern of the default office. Relay noise enters the
  // shared denominator unscaled by the relay-to-user gain, so a distant relay can cost
  // more than it brings.
  const Network net(default_scenario());
  const int R = net.relay_count(), U = net.user_count();
  int shared_drops = 0;
  for (int i = 0; i < U; ++i) {
    std::vector<int> mine;
    for (int r = 0; r < R; ++r) {
      if (net.relays().serves(r, i)) mine.push_back(r);
    }
    for (unsigned mask = 0; mask < (1u << mine.size()); ++mask) {
      Eigen::ArrayXXd g = Eigen::ArrayXXd::Zero(R, U);
      for (size_t k = 0; k < mine.size(); ++k) g(mine[k], i) = (mask >> k) & 1u;
      auto eval = [&](const Eigen::ArrayXXd& m, RelayCombining c) {
        return relay_second_phase_sinr(i, m, net.allocation(), net.relays(), 0.5, net.user_noise(i), c);
      };
      for (size_t k = 0; k < mine.size(); ++k) {
        if ((mask >> k) & 1u) continue;
        auto h = g;
        h(mine[k], i) = 1;
        CHECK(eval(h, RelayCombining::per_branch) >= eval(g, RelayCombining::per_branch));
        if (eval(h, RelayCombining::shared_denominator) < eval(g, RelayCombining::shared_denominator)) ++shared_drops;
      }
    }
  }
  CHECK(shared_drops > 0);
}

TEST_CASE("shared-denominator relay combining: a weak noisy relay lowers the SINR") {
  // A strong relay plus a weak, noisy one: the shared denominator drops.
  const auto alloc = single_ap({0}, {1e-3}, 1);
  auto r = relays_for_one_user(2, 1, 1, 1e-14);
  r.user_gain(1, 0) = 0.01;
  r.noise[1] = 1e-10;
  Eigen::ArrayXXd one = Eigen::ArrayXXd::Zero(2, 1);
  one(0, 0) = 1;
  const double strong = relay_second_phase_sinr(0, one, alloc, r, 0.5, 1e-14);
  const double both = relay_second_phase_sinr(0, Eigen::ArrayXXd::Ones(2, 1), alloc, r, 0.5, 1e-14);
  CHECK(both < strong);
}

TEST_CASE("property: shared denominator never exceeds per-branch combining") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 300; ++trial) {
    const auto in = random_instance(rng);
    const auto gamma = random_mask(rng, in.relays.relay_count(), in.alloc.user_count());
    for (int i = 0; i < in.alloc.user_count(); ++i) {
      const double shared = relay_second_phase_sinr(i, gamma, in.alloc, in.relays, 0.5, in.noise[i]);
      const double branch =
          relay_second_phase_sinr(i, gamma, in.alloc, in.relays, 0.5, in.noise[i], RelayCombining::per_branch);
      CHECK(shared <= branch * (1 + 1e-12));
    }
  }
}

TEST_CASE("property: scaling powers by a and thermal noise by a^2 leaves SINRs unchanged") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 200; ++trial) {
    auto in = random_instance(rng);
    const auto beta = random_mask(rng, in.alloc.ap_count(), in.alloc.user_count());
    const auto gamma = random_mask(rng, in.relays.relay_count(), in.alloc.user_count());
    const double a = 3.7;
    auto scaled = in;
    scaled.alloc.power *= a;
    scaled.noise *= a * a;
    scaled.relays.noise *= a * a;
    for (int i = 0; i < in.alloc.user_count(); ++i) {
      CHECK(sinr_direct(i, beta, scaled.alloc, in.gains, 0.5, scaled.noise[i]) ==
            doctest::Approx(sinr_direct(i, beta, in.alloc, in.gains, 0.5, in.noise[i])).epsilon(1e-12));
      CHECK(relay_second_phase_sinr(i, gamma, scaled.alloc, scaled.relays, 0.5, scaled.noise[i]) ==
            doctest::Approx(relay_second_phase_sinr(i, gamma, in.alloc, in.relays, 0.5, in.noise[i])).epsilon(1e-12));
    }
  }
}

TEST_CASE("default office: association, relay counts and unblocked margin") {
  const Network net(default_scenario());
  const int expected_aps[] = {1, 2, 1, 2, 4, 2};
  const int expected_relays[] = {1, 2, 1, 2, 4, 2};
  const double th = std::pow(10.0, 1.56);
  for (int i = 0; i < net.user_count(); ++i) {
    int aps = 0, relays = 0;
    for (int l = 0; l < net.ap_count(); ++l) aps += net.serves(l, i);
    for (int r = 0; r < net.relay_count(); ++r) relays += net.relays().serves(r, i);
    CHECK(aps == expected_aps[i]);
    CHECK(relays == expected_relays[i]);
    const auto clear = net.evaluate(i, Eigen::ArrayXXd::Ones(net.ap_count(), net.user_count()),
                                    Eigen::ArrayXXd::Ones(net.relay_count(), net.user_count()));
    CHECK(clear.first > th);
    CHECK(clear.mrc == clear.first + clear.second);
  }
  for (int l = 0; l < net.ap_count(); ++l) {
    CHECK(net.allocation().power.row(l).sum() == doctest::Approx(1e-3).epsilon(1e-12));
  }
}
