// owcsim: outage of direct vs relay-assisted beam-steered optical wireless
// links under random human blockage.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "owc/mobility.hpp"
#include "owc/network.hpp"
#include "owc/outage.hpp"
#include "owc/scenario_io.hpp"

namespace {

using namespace owc;

Scenario scenario_from(const std::string& path) { return path.empty() ? default_scenario() : load_scenario(path); }

template <typename Table>
void emit(const Table& table, const std::string& out, const std::string& format) {
  const auto fmt = parse_result_format(format);
  if (out.empty()) {
    write_results(std::cout, table, fmt);
  } else {
    write_results(table, out, fmt);
  }
}

struct Endpoint {
  enum Kind { ap, relay, user } kind;
  int index;
};

Endpoint parse_endpoint(const std::string& id, const Network& net) {
  auto tail = [&](std::size_t prefix, int count) {
    const std::string digits = id.substr(prefix);
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (digits.empty() || used != digits.size() || n < 1 || n > count) {
      throw std::invalid_argument("unknown endpoint id: " + id);
    }
    return n - 1;
  };
  if (id.rfind("ap", 0) == 0) return {Endpoint::ap, tail(2, net.ap_count())};
  if (id.rfind("relay", 0) == 0) return {Endpoint::relay, tail(5, net.relay_count())};
  if (id.rfind("user", 0) == 0) return {Endpoint::user, tail(4, net.user_count())};
  throw std::invalid_argument("unknown endpoint id: " + id);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outage simulator for relay-assisted multiuser optical wireless links under human blockage"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out;
  std::string format = "csv";

  auto* simulate = app.add_subcommand("simulate", "Outage probability per user and mode");
  std::string mode = "both";
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string method = "montecarlo";
  std::string blockage_model;
  simulate->add_option("--scenario", scenario_path, "Scenario JSON file (defaults when omitted)");
  simulate->add_option("--mode", mode, "direct, coop or both")->check(CLI::IsMember({"direct", "coop", "both"}));
  simulate->add_option("--samples", samples, "Monte Carlo sample count");
  simulate->add_option("--seed", seed, "Master seed");
  simulate->add_option("--workers", workers, "Worker threads; results do not depend on it");
  simulate->add_option("--method", method, "montecarlo or independent")
      ->check(CLI::IsMember({"montecarlo", "independent"}));
  simulate->add_option("--blockage", blockage_model, "joint or independent human per link (Monte Carlo)")
      ->check(CLI::IsMember({"joint", "independent"}));
  simulate->add_option("--out", out, "Output file (stdout when omitted)");
  simulate->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

  auto* blockage = app.add_subcommand("blockage", "Per-link blockage probability table");
  std::string blockage_method = "quadrature";
  std::uint64_t blockage_samples = 1'000'000;
  std::uint64_t blockage_seed = 1;
  double rel_tol = 1e-4;
  blockage->add_option("--scenario", scenario_path, "Scenario JSON file");
  blockage->add_option("--method", blockage_method, "quadrature or montecarlo")
      ->check(CLI::IsMember({"quadrature", "montecarlo"}));
  blockage->add_option("--samples", blockage_samples, "Monte Carlo sample count");
  blockage->add_option("--seed", blockage_seed, "Monte Carlo seed");
  blockage->add_option("--tol", rel_tol, "Quadrature relative tolerance");
  blockage->add_option("--out", out, "Output file");
  blockage->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

  auto* channel = app.add_subcommand("channel", "DC gains of served links, or one link's impulse response");
  std::string tx_id;
  std::string rx_id;
  std::string cir_path;
  channel->add_option("--scenario", scenario_path, "Scenario JSON file");
  auto* tx_opt = channel->add_option("--tx", tx_id, "Transmitter id (apN or relayN)");
  auto* rx_opt = channel->add_option("--rx", rx_id, "Receiver id (userN or relayN)");
  tx_opt->needs(rx_opt);
  rx_opt->needs(tx_opt);
  channel->add_option("--cir", cir_path, "With --tx/--rx: write the impulse response bins here");
  channel->add_option("--out", out, "Output file");
  channel->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

  auto* pdf = app.add_subcommand("pdf", "Human position density on an N x N grid of cell centers");
  int grid = 40;
  pdf->add_option("--scenario", scenario_path, "Scenario JSON file");
  pdf->add_option("--grid", grid, "Grid cells per axis")->check(CLI::PositiveNumber);
  pdf->add_option("--out", out, "Output file");

  auto* dump = app.add_subcommand("scenario", "Print the effective scenario as JSON");
  dump->add_option("--scenario", scenario_path, "Scenario JSON file");
  dump->add_option("--out", out, "Output file");

  CLI11_PARSE(app, argc, argv);

  try {
    Scenario sc = scenario_from(scenario_path);

    if (*simulate) {
      if (samples) sc.sampler.samples = *samples;
      if (seed) sc.sampler.seed = *seed;
      if (workers) sc.sampler.workers = *workers;
      if (blockage_model == "joint") sc.sampler.model = BlockageModel::joint;
      if (blockage_model == "independent") sc.sampler.model = BlockageModel::independent;
      const Network net(sc);
      std::vector<Mode> modes;
      if (mode != "coop") modes.push_back(Mode::direct);
      if (mode != "direct") modes.push_back(Mode::cooperative);
      OutageReport report;
      if (method == "independent") {
        report = outage_independent_approx(net, modes);
      } else {
        report = outage_monte_carlo(net, modes,
                                    {sc.sampler.samples, sc.sampler.seed, sc.sampler.workers, sc.sampler.model});
      }
      std::cerr << "method=" << report.method << " blockage_model=" << to_string(report.blockage_model) << "\n";
      emit(report, out, format);
    } else if (*blockage) {
      const Network net(sc);
      const auto table = blockage_method == "quadrature" ? blockage_table(net, rel_tol)
                                                          : blockage_table_monte_carlo(net, blockage_samples, blockage_seed);
      emit(table, out, format);
    } else if (*channel) {
      const Network net(sc);
      if (tx_id.empty()) {
        emit(channel_table(net), out, format);
      } else {
        const Endpoint tx = parse_endpoint(tx_id, net);
        const Endpoint rx = parse_endpoint(rx_id, net);
        if (tx.kind == Endpoint::user) throw std::invalid_argument("a user cannot transmit: " + tx_id);
        if (rx.kind == Endpoint::ap) throw std::invalid_argument("an AP cannot receive: " + rx_id);
        const ReceiverSpec receiver = rx.kind == Endpoint::user ? net.user_receiver(rx.index) : net.relay_receiver(rx.index);
        const TransmitterSpec transmitter = tx.kind == Endpoint::ap ? net.ap_transmitter(tx.index, receiver.position)
                                                                    : net.relay_transmitter(tx.index, receiver.position);
        const auto g = net.link_gain(transmitter, receiver);
        emit(std::vector<ChannelRow>{{tx_id, rx_id, g.total, g.los, g.reflected}}, out, format);
        if (!cir_path.empty()) {
          const auto& c = sc.channel;
          const auto cir = impulse_response(transmitter, receiver, sc.room,
                                            {c.max_bounces, c.first_res, c.second_res, c.bin_duration});
          std::ofstream f(cir_path);
          if (!f) throw std::runtime_error(cir_path + ": cannot open for writing");
          write_cir_csv(f, cir);
        }
      }
    } else if (*pdf) {
      const auto dist = sc.rwp();
      std::ostringstream os;
      os << "x,y,density\n";
      for (int ix = 0; ix < grid; ++ix) {
        for (int iy = 0; iy < grid; ++iy) {
          const Point2 p(dist.origin.x() + (ix + 0.5) * dist.x_extent / grid,
                         dist.origin.y() + (iy + 0.5) * dist.y_extent / grid);
          os << format_number(p.x()) << ',' << format_number(p.y()) << ',' << format_number(rwp_pdf(dist, p)) << '\n';
        }
      }
      if (out.empty()) {
        std::cout << os.str();
      } else {
        std::ofstream f(out);
        if (!f) throw std::runtime_error(out + ": cannot open for writing");
        f << os.str();
      }
    } else if (*dump) {
      if (out.empty()) {
        std::cout << scenario_to_json(sc);
      } else {
        save_scenario(sc, out);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
