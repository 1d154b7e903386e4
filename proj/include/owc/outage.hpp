#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "owc/network.hpp"

namespace owc {

enum class Mode { direct, cooperative };

std::string_view to_string(Mode m);
std::string_view to_string(BlockageModel m);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Outage iff the SINR is at or below the threshold.
inline bool is_outage(double sinr_linear, double threshold_db) { return sinr_linear <= db_to_linear(threshold_db); }

struct OutageRow {
  int user_id = 0;  // 1-based
  Mode mode = Mode::direct;
  double p_out = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  double threshold_db = 0.0;
  std::uint64_t seed = 0;
};

struct OutageReport {
  std::vector<OutageRow> rows;
  double threshold_db = 0.0;
  double threshold_linear = 0.0;
  std::string method;  // "monte_carlo" or "independent_approx"
  BlockageModel blockage_model = BlockageModel::joint;
  double quadrature_tol = 0.0;

  const OutageRow& at(int user_id, Mode mode) const;
};

struct MonteCarloOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  int workers = 1;
  BlockageModel model = BlockageModel::joint;
};

/// Samples per RNG stream. Stream k covers samples [k * size, (k + 1) * size)
/// and is seeded with derive_stream_seed(seed, k), so results do not depend
/// on how streams are spread over workers.
inline constexpr std::uint64_t kSamplesPerStream = 4096;

OutageReport outage_monte_carlo(const Network& net, std::span<const Mode> modes, const MonteCarloOptions& options);

/// Per-link independence approximation: every link a user depends on is an
/// independent Bernoulli blockage with its quadrature probability, and all
/// 2^n clear/blocked patterns are enumerated. At most 16 links per user.
OutageReport outage_independent_approx(const Network& net, std::span<const Mode> modes, double rel_tol = 1e-4);

inline constexpr int kMaxEnumeratedLinks = 16;

struct BlockageEntry {
  std::string link_id;
  std::string tx;
  std::string rx;
  double probability = 0.0;
  std::string method;
};

/// Per-link blockage probabilities keyed by endpoint pair.
struct BlockageProbabilityTable {
  std::vector<BlockageEntry> entries;
  double rel_tol = 0.0;
  CylinderSpec<double> cylinder;

  double probability(const std::string& link_id) const;
};

/// Every AP->user segment, every AP->relay feed, and every relay->user
/// segment, whether or not the scenario serves it.
struct NamedSegment {
  std::string link_id;
  std::string tx;
  std::string rx;
  Segment3<double> segment;
};
std::vector<NamedSegment> all_hops(const Network& net);

BlockageProbabilityTable blockage_table(const Network& net, double rel_tol = 1e-4);

/// Monte Carlo estimate for the same hops, sharing one human per sample.
BlockageProbabilityTable blockage_table_monte_carlo(const Network& net, std::uint64_t samples, std::uint64_t seed);

}  // namespace owc
