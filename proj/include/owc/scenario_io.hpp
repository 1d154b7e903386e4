#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "owc/network.hpp"
#include "owc/outage.hpp"
#include "owc/scenario.hpp"

namespace owc {

/// Scenario documents are JSON. Every field is optional and falls back to
/// default_scenario(); unknown keys are rejected. AP, relay and user ids in
/// documents are 1-based.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

enum class ResultFormat { csv, json_lines };
ResultFormat parse_result_format(std::string_view name);

struct ChannelRow {
  std::string tx;
  std::string rx;
  double gain = 0.0;
  double los = 0.0;
  double reflected = 0.0;
};

/// Gains of every served link: AP->user, AP->relay feeds, relay->user.
std::vector<ChannelRow> channel_table(const Network& net);

/// Numbers carry 10 significant digits; JSON keys are sorted. Same input,
/// same bytes.
void write_results(std::ostream& out, const OutageReport& report, ResultFormat format);
void write_results(std::ostream& out, const BlockageProbabilityTable& table, ResultFormat format);
void write_results(std::ostream& out, const std::vector<ChannelRow>& rows, ResultFormat format);

template <typename Table>
void write_results(const Table& table, const std::string& path, ResultFormat format);

/// "%.10g".
std::string format_number(double v);

}  // namespace owc
