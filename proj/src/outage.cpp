#include "owc/outage.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <stdexcept>
#include <thread>

namespace owc {

std::string_view to_string(Mode m) { return m == Mode::direct ? "direct" : "coop"; }

std::string_view to_string(BlockageModel m) { return m == BlockageModel::joint ? "joint" : "independent"; }

const OutageRow& OutageReport::at(int user_id, Mode mode) const {
  for (const auto& r : rows) {
    if (r.user_id == user_id && r.mode == mode) return r;
  }
  throw std::out_of_range("no outage row for user " + std::to_string(user_id));
}

double BlockageProbabilityTable::probability(const std::string& link_id) const {
  for (const auto& e : entries) {
    if (e.link_id == link_id) return e.probability;
  }
  throw std::out_of_range("no blockage entry for link " + link_id);
}

namespace {

struct Counts {
  std::vector<std::uint64_t> direct;
  std::vector<std::uint64_t> coop;
};

class SampleEvaluator {
 public:
  SampleEvaluator(const Network& net, const std::vector<Mode>& modes, BlockageModel model)
      : net_(net),
        model_(model),
        want_direct_(std::find(modes.begin(), modes.end(), Mode::direct) != modes.end()),
        want_coop_(std::find(modes.begin(), modes.end(), Mode::cooperative) != modes.end()),
        threshold_(db_to_linear(net.scenario().threshold_db)),
        cylinder_(net.scenario().human.cylinder()),
        humans_(net.scenario().human.count),
        direct_clear_(Eigen::ArrayXXd::Ones(net.ap_count(), net.user_count())),
        relay_clear_(Eigen::ArrayXXd::Ones(net.relay_count(), net.user_count())),
        positions_(static_cast<size_t>(std::max(humans_, 0))) {}

  void run_stream(RwpSampler& sampler, std::uint64_t count, Counts& out) {
    for (std::uint64_t s = 0; s < count; ++s) {
      if (model_ == BlockageModel::joint) {
        draw(sampler);
        for (const auto& link : net_.direct_links()) direct_clear_(link.ap, link.user) = blocked(link.segment) ? 0.0 : 1.0;
        for (const auto& path : net_.relay_paths()) {
          relay_clear_(path.relay, path.user) = (blocked(path.first_hop) || blocked(path.second_hop)) ? 0.0 : 1.0;
        }
      } else {
        for (const auto& link : net_.direct_links()) {
          draw(sampler);
          direct_clear_(link.ap, link.user) = blocked(link.segment) ? 0.0 : 1.0;
        }
        // Drawn even in direct-only runs so the stream layout does not depend on the modes.
        for (const auto& path : net_.relay_paths()) {
          draw(sampler);
          relay_clear_(path.relay, path.user) = (blocked(path.first_hop) || blocked(path.second_hop)) ? 0.0 : 1.0;
        }
      }
      for (int i = 0; i < net_.user_count(); ++i) {
        const double first = net_.evaluate_direct(i, direct_clear_);
        if (want_direct_ && first <= threshold_) ++out.direct[i];
        if (want_coop_) {
          const double second =
              relay_second_phase_sinr(i, relay_clear_, net_.allocation(), net_.relays(), net_.responsivity(),
                                      net_.user_noise(i), net_.scenario().relay_combining);
          if (sinr_mrc(first, second) <= threshold_) ++out.coop[i];
        }
      }
    }
  }

 private:
  void draw(RwpSampler& sampler) {
    for (auto& p : positions_) p = sampler.sample();
  }

  bool blocked(const Segment3<double>& seg) const {
    for (const auto& p : positions_) {
      if (segment_intersects_cylinder(seg, p, cylinder_)) return true;
    }
    return false;
  }

  const Network& net_;
  BlockageModel model_;
  bool want_direct_;
  bool want_coop_;
  double threshold_;
  CylinderSpec<double> cylinder_;
  int humans_;
  Eigen::ArrayXXd direct_clear_;
  Eigen::ArrayXXd relay_clear_;
  std::vector<Point2> positions_;
};

}  // namespace

OutageReport outage_monte_carlo(const Network& net, std::span<const Mode> modes, const MonteCarloOptions& options) {
  if (options.samples < 1) throw std::invalid_argument("Monte Carlo needs at least one sample");
  if (options.workers < 1) throw std::invalid_argument("worker count must be at least 1");
  const std::vector<Mode> mode_list(modes.begin(), modes.end());
  const int U = net.user_count();
  const std::uint64_t streams = (options.samples + kSamplesPerStream - 1) / kSamplesPerStream;
  const int workers = static_cast<int>(std::min<std::uint64_t>(options.workers, streams));
  const RwpDistribution rwp = net.scenario().rwp();

  std::vector<Counts> partial(workers, Counts{std::vector<std::uint64_t>(U, 0), std::vector<std::uint64_t>(U, 0)});
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](int w) {
    try {
      SampleEvaluator eval(net, mode_list, options.model);
      for (std::uint64_t k = static_cast<std::uint64_t>(w); k < streams; k += static_cast<std::uint64_t>(workers)) {
        RwpSampler sampler(rwp, derive_stream_seed(options.seed, k));
        const std::uint64_t count = std::min(kSamplesPerStream, options.samples - k * kSamplesPerStream);
        eval.run_stream(sampler, count, partial[w]);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  OutageReport report;
  report.threshold_db = net.scenario().threshold_db;
  report.threshold_linear = db_to_linear(report.threshold_db);
  report.method = "monte_carlo";
  report.blockage_model = options.model;
  const double n = static_cast<double>(options.samples);
  for (int i = 0; i < U; ++i) {
    for (Mode m : mode_list) {
      std::uint64_t hits = 0;
      for (const auto& c : partial) hits += m == Mode::direct ? c.direct[i] : c.coop[i];
      const double p = static_cast<double>(hits) / n;
      report.rows.push_back({i + 1, m, p, std::sqrt(p * (1 - p) / n), options.samples, report.threshold_db,
                             options.seed});
    }
  }
  return report;
}

OutageReport outage_independent_approx(const Network& net, std::span<const Mode> modes, double rel_tol) {
  const auto& sc = net.scenario();
  const auto& alloc = net.allocation();
  const auto cyl = sc.human.cylinder();
  const auto rwp = sc.rwp();
  const int humans = sc.human.count;
  const double threshold = db_to_linear(sc.threshold_db);

  auto effective = [humans](double p) { return 1.0 - std::pow(1.0 - p, humans); };
  std::map<std::pair<int, int>, double> direct_prob;
  auto direct_p = [&](int l, int k) {
    auto [it, fresh] = direct_prob.try_emplace({l, k}, 0.0);
    if (fresh) it->second = effective(blockage_probability({sc.aps[l], sc.users[k].position}, cyl, rwp, rel_tol));
    return it->second;
  };
  std::map<std::pair<int, int>, double> relay_prob;
  for (const auto& path : net.relay_paths()) {
    relay_prob[{path.relay, path.user}] =
        effective(relay_path_blockage_probability(path.first_hop, path.second_hop, cyl, rwp, rel_tol));
  }

  struct Var {
    bool relay;
    int a;  // AP or relay
    int b;  // user
    double p;
  };

  OutageReport report;
  report.threshold_db = sc.threshold_db;
  report.threshold_linear = threshold;
  report.method = "independent_approx";
  report.blockage_model = BlockageModel::independent;
  report.quadrature_tol = rel_tol;

  Eigen::ArrayXXd direct_clear = Eigen::ArrayXXd::Ones(net.ap_count(), net.user_count());
  Eigen::ArrayXXd relay_clear = Eigen::ArrayXXd::Ones(net.relay_count(), net.user_count());
  for (int i = 0; i < net.user_count(); ++i) {
    for (Mode m : modes) {
      std::vector<Var> vars;
      for (int l = 0; l < net.ap_count(); ++l) {
        const int rank = alloc.rank(l, i);
        if (rank < 0) continue;
        vars.push_back({false, l, i, direct_p(l, i)});
        const auto& group = alloc.groups[l];
        for (size_t k = static_cast<size_t>(rank) + 1; k < group.size(); ++k) {
          vars.push_back({false, l, group[k], direct_p(l, group[k])});
        }
      }
      if (m == Mode::cooperative) {
        for (int r = 0; r < net.relay_count(); ++r) {
          if (net.relays().serves(r, i)) vars.push_back({true, r, i, relay_prob.at({r, i})});
        }
      }
      if (static_cast<int>(vars.size()) > kMaxEnumeratedLinks) {
        throw std::runtime_error(user_id(i) + " depends on " + std::to_string(vars.size()) +
                                 " links; the independence approximation enumerates at most " +
                                 std::to_string(kMaxEnumeratedLinks) + ", use Monte Carlo");
      }

      double p_out = 0.0;
      const std::uint32_t patterns = 1u << vars.size();
      for (std::uint32_t mask = 0; mask < patterns; ++mask) {
        double weight = 1.0;
        for (size_t v = 0; v < vars.size(); ++v) {
          const bool is_blocked = (mask >> v) & 1u;
          weight *= is_blocked ? vars[v].p : 1.0 - vars[v].p;
          auto& grid = vars[v].relay ? relay_clear : direct_clear;
          grid(vars[v].a, vars[v].b) = is_blocked ? 0.0 : 1.0;
        }
        if (weight == 0.0) continue;
        const double sinr = m == Mode::direct ? net.evaluate_direct(i, direct_clear)
                                              : net.evaluate(i, direct_clear, relay_clear).mrc;
        if (sinr <= threshold) p_out += weight;
      }
      for (const auto& v : vars) (v.relay ? relay_clear : direct_clear)(v.a, v.b) = 1.0;
      report.rows.push_back({i + 1, m, std::clamp(p_out, 0.0, 1.0), 0.0, 0, sc.threshold_db, 0});
    }
  }
  return report;
}

std::vector<NamedSegment> all_hops(const Network& net) {
  const auto& sc = net.scenario();
  std::vector<NamedSegment> hops;
  for (int l = 0; l < net.ap_count(); ++l) {
    for (int i = 0; i < net.user_count(); ++i) {
      hops.push_back({ap_id(l) + "-" + user_id(i), ap_id(l), user_id(i), {sc.aps[l], sc.users[i].position}});
    }
  }
  for (int r = 0; r < net.relay_count(); ++r) {
    const int l = net.relays().paired_ap[r];
    hops.push_back(
        {ap_id(l) + "-" + relay_id(r), ap_id(l), relay_id(r), {sc.aps[l], sc.relays[r].position}});
  }
  for (int r = 0; r < net.relay_count(); ++r) {
    for (int i = 0; i < net.user_count(); ++i) {
      hops.push_back({relay_id(r) + "-" + user_id(i), relay_id(r), user_id(i),
                      {sc.relays[r].position, sc.users[i].position}});
    }
  }
  return hops;
}

BlockageProbabilityTable blockage_table(const Network& net, double rel_tol) {
  const auto& sc = net.scenario();
  BlockageProbabilityTable table;
  table.rel_tol = rel_tol;
  table.cylinder = sc.human.cylinder();
  for (const auto& h : all_hops(net)) {
    table.entries.push_back(
        {h.link_id, h.tx, h.rx, blockage_probability(h.segment, table.cylinder, sc.rwp(), rel_tol), "quadrature"});
  }
  return table;
}

BlockageProbabilityTable blockage_table_monte_carlo(const Network& net, std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("Monte Carlo needs at least one sample");
  const auto& sc = net.scenario();
  const auto hops = all_hops(net);
  BlockageProbabilityTable table;
  table.cylinder = sc.human.cylinder();
  std::vector<std::uint64_t> hits(hops.size(), 0);
  const std::uint64_t streams = (samples + kSamplesPerStream - 1) / kSamplesPerStream;
  for (std::uint64_t k = 0; k < streams; ++k) {
    RwpSampler sampler(sc.rwp(), derive_stream_seed(seed, k));
    const std::uint64_t count = std::min(kSamplesPerStream, samples - k * kSamplesPerStream);
    for (std::uint64_t s = 0; s < count; ++s) {
      const Point2 c = sampler.sample();
      for (size_t h = 0; h < hops.size(); ++h) {
        if (segment_intersects_cylinder(hops[h].segment, c, table.cylinder)) ++hits[h];
      }
    }
  }
  for (size_t h = 0; h < hops.size(); ++h) {
    table.entries.push_back({hops[h].link_id, hops[h].tx, hops[h].rx,
                             static_cast<double>(hits[h]) / static_cast<double>(samples), "monte_carlo"});
  }
  return table;
}

}  // namespace owc
