#include "owc/scenario_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace owc {

using json = nlohmann::json;

namespace {

/// Reads fields of one JSON object, remembering which keys were consumed so
/// leftovers can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ScenarioError(path_ + ": expected an object");
  }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ScenarioError(child(key) + ": expected a number");
      out = v->get<double>();
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ScenarioError(child(key) + ": expected an integer");
      out = v->get<int>();
    }
  }

  void unsigned_integer(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ScenarioError(child(key) + ": expected a nonnegative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ScenarioError(child(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ScenarioError(child(it.key()) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Point3 read_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ScenarioError(path + ": expected [x, y, z]");
  Point3 p;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) throw ScenarioError(path + ": expected [x, y, z]");
    p[k] = j[k].get<double>();
  }
  return p;
}

json write_point(const Point3& p) { return json::array({p.x(), p.y(), p.z()}); }

void read_noise(const json& j, const std::string& path, NoiseModel& n) {
  ObjectReader r(j, path);
  r.number("thermal_a2_per_hz", n.thermal_density);
  r.number("background_current_a", n.background_current);
  r.number("bandwidth_hz", n.bandwidth);
  r.finish();
}

json write_noise(const NoiseModel& n) {
  return {{"thermal_a2_per_hz", n.thermal_density},
          {"background_current_a", n.background_current},
          {"bandwidth_hz", n.bandwidth}};
}

Scenario from_json(const json& doc) {
  Scenario s = default_scenario();
  ObjectReader top(doc, "");

  if (const json* j = top.find("room")) {
    ObjectReader r(*j, "room");
    r.number("width_m", s.room.width);
    r.number("length_m", s.room.length);
    r.number("height_m", s.room.height);
    r.number("wall_reflectivity", s.room.wall_reflectivity);
    r.number("ceiling_reflectivity", s.room.ceiling_reflectivity);
    r.number("floor_reflectivity", s.room.floor_reflectivity);
    r.number("lambertian_mode", s.room.lambertian_mode);
    r.finish();
  }
  if (const json* j = top.find("aps")) {
    if (!j->is_array()) throw ScenarioError("aps: expected a list");
    s.aps.clear();
    for (size_t k = 0; k < j->size(); ++k) s.aps.push_back(read_point((*j)[k], "aps[" + std::to_string(k) + "]"));
  }
  if (const json* j = top.find("ap")) {
    ObjectReader r(*j, "ap");
    r.number("power_w", s.ap.power);
    r.number("divergence_rad", s.ap.divergence);
    r.number("max_steering_deg", s.ap.max_steering_deg);
    r.finish();
  }
  if (const json* j = top.find("relays")) {
    if (!j->is_array()) throw ScenarioError("relays: expected a list");
    s.relays.clear();
    for (size_t k = 0; k < j->size(); ++k) {
      const std::string path = "relays[" + std::to_string(k) + "]";
      ObjectReader r((*j)[k], path);
      RelayConfig rc;
      const json* pos = r.find("position");
      if (!pos) throw ScenarioError(path + ".position: required");
      rc.position = read_point(*pos, path + ".position");
      int ap = 0;
      r.integer("ap", ap);
      rc.ap = ap - 1;
      r.finish();
      s.relays.push_back(rc);
    }
  }
  if (const json* j = top.find("relay")) {
    ObjectReader r(*j, "relay");
    r.number("power_cap_w", s.relay.power_cap);
    r.number("divergence_rad", s.relay.divergence);
    r.number("max_steering_deg", s.relay.max_steering_deg);
    r.number("area_m2", s.relay.area);
    r.number("fov_deg", s.relay.fov_deg);
    r.number("responsivity_a_per_w", s.relay.responsivity);
    if (const json* n = r.find("noise")) read_noise(*n, "relay.noise", s.relay.noise);
    r.finish();
  }
  if (const json* j = top.find("users")) {
    if (!j->is_array()) throw ScenarioError("users: expected a list");
    s.users.clear();
    for (size_t k = 0; k < j->size(); ++k) {
      const std::string path = "users[" + std::to_string(k) + "]";
      ObjectReader r((*j)[k], path);
      UserConfig u;
      const json* pos = r.find("position");
      if (!pos) throw ScenarioError(path + ".position: required");
      u.position = read_point(*pos, path + ".position");
      r.number("elevation_deg", u.elevation_deg);
      r.number("azimuth_deg", u.azimuth_deg);
      r.finish();
      s.users.push_back(u);
    }
  }
  if (const json* j = top.find("receiver")) {
    ObjectReader r(*j, "receiver");
    r.number("area_m2", s.receiver.area);
    r.number("fov_deg", s.receiver.fov_deg);
    r.number("responsivity_a_per_w", s.receiver.responsivity);
    r.number("illumination_responsivity_a_per_w", s.receiver.illumination_responsivity);
    r.finish();
  }
  if (const json* j = top.find("human")) {
    ObjectReader r(*j, "human");
    r.number("height_m", s.human.height);
    r.number("radius_m", s.human.radius);
    r.integer("count", s.human.count);
    r.finish();
  }
  if (const json* j = top.find("noise")) read_noise(*j, "noise", s.noise);
  if (const json* j = top.find("noma")) {
    ObjectReader r(*j, "noma");
    r.number("ratio", s.noma.ratio);
    if (const json* a = r.find("association")) {
      if (!a->is_object()) throw ScenarioError("noma.association: expected an object of AP id -> user ids");
      s.noma.association.clear();
      for (auto it = a->begin(); it != a->end(); ++it) {
        const std::string path = "noma.association." + it.key();
        char* end = nullptr;
        const long ap = std::strtol(it.key().c_str(), &end, 10);
        if (it.key().empty() || *end != '\0') throw ScenarioError(path + ": AP id must be an integer");
        if (!it->is_array()) throw ScenarioError(path + ": expected a list of user ids");
        std::vector<int> users;
        for (const auto& u : *it) {
          if (!u.is_number_integer()) throw ScenarioError(path + ": expected integer user ids");
          users.push_back(u.get<int>() - 1);
        }
        s.noma.association[static_cast<int>(ap) - 1] = users;
      }
    }
    r.finish();
  }
  {
    std::string combining;
    top.string("relay_combining", combining);
    if (combining == "shared") s.relay_combining = RelayCombining::shared_denominator;
    else if (combining == "per_branch") s.relay_combining = RelayCombining::per_branch;
    else if (!combining.empty()) throw ScenarioError("relay_combining: expected \"shared\" or \"per_branch\"");
  }
  top.number("threshold_db", s.threshold_db);
  if (const json* j = top.find("sampler")) {
    ObjectReader r(*j, "sampler");
    r.unsigned_integer("samples", s.sampler.samples);
    r.unsigned_integer("seed", s.sampler.seed);
    r.integer("workers", s.sampler.workers);
    std::string model;
    r.string("blockage_model", model);
    if (model == "joint") s.sampler.model = BlockageModel::joint;
    else if (model == "independent") s.sampler.model = BlockageModel::independent;
    else if (!model.empty()) throw ScenarioError("sampler.blockage_model: expected \"joint\" or \"independent\"");
    r.finish();
  }
  if (const json* j = top.find("channel")) {
    ObjectReader r(*j, "channel");
    r.integer("max_bounces", s.channel.max_bounces);
    r.number("first_resolution_m", s.channel.first_res);
    r.number("second_resolution_m", s.channel.second_res);
    r.number("bin_duration_s", s.channel.bin_duration);
    r.number("wavelength_m", s.channel.wavelength);
    r.finish();
  }
  top.finish();
  validate(s);
  return s;
}

std::string rounded_line(const json& j) { return j.dump() + "\n"; }

double round10(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Scenario parse_scenario(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    Scenario s = default_scenario();
    validate(s);
    return s;
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("parse error: ") + e.what());
  }
  return from_json(doc);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  json doc;
  doc["room"] = {{"width_m", s.room.width},
                 {"length_m", s.room.length},
                 {"height_m", s.room.height},
                 {"wall_reflectivity", s.room.wall_reflectivity},
                 {"ceiling_reflectivity", s.room.ceiling_reflectivity},
                 {"floor_reflectivity", s.room.floor_reflectivity},
                 {"lambertian_mode", s.room.lambertian_mode}};
  doc["aps"] = json::array();
  for (const auto& p : s.aps) doc["aps"].push_back(write_point(p));
  doc["ap"] = {{"power_w", s.ap.power}, {"divergence_rad", s.ap.divergence}, {"max_steering_deg", s.ap.max_steering_deg}};
  doc["relays"] = json::array();
  for (const auto& r : s.relays) {
    json jr = {{"position", write_point(r.position)}};
    jr["ap"] = r.ap >= 0 ? json(r.ap + 1) : json(nullptr);
    doc["relays"].push_back(jr);
  }
  doc["relay"] = {{"power_cap_w", s.relay.power_cap},
                  {"divergence_rad", s.relay.divergence},
                  {"max_steering_deg", s.relay.max_steering_deg},
                  {"area_m2", s.relay.area},
                  {"fov_deg", s.relay.fov_deg},
                  {"responsivity_a_per_w", s.relay.responsivity},
                  {"noise", write_noise(s.relay.noise)}};
  doc["users"] = json::array();
  for (const auto& u : s.users) {
    doc["users"].push_back(
        {{"position", write_point(u.position)}, {"elevation_deg", u.elevation_deg}, {"azimuth_deg", u.azimuth_deg}});
  }
  doc["receiver"] = {{"area_m2", s.receiver.area},
                     {"fov_deg", s.receiver.fov_deg},
                     {"responsivity_a_per_w", s.receiver.responsivity},
                     {"illumination_responsivity_a_per_w", s.receiver.illumination_responsivity}};
  doc["human"] = {{"height_m", s.human.height}, {"radius_m", s.human.radius}, {"count", s.human.count}};
  doc["noise"] = write_noise(s.noise);
  json assoc = json::object();
  for (const auto& [ap, users] : s.noma.association) {
    json ids = json::array();
    for (int u : users) ids.push_back(u + 1);
    assoc[std::to_string(ap + 1)] = ids;
  }
  doc["noma"] = {{"ratio", s.noma.ratio}, {"association", assoc}};
  doc["relay_combining"] = s.relay_combining == RelayCombining::per_branch ? "per_branch" : "shared";
  doc["threshold_db"] = s.threshold_db;
  doc["sampler"] = {{"samples", s.sampler.samples},
                    {"seed", s.sampler.seed},
                    {"workers", s.sampler.workers},
                    {"blockage_model", std::string(to_string(s.sampler.model))}};
  doc["channel"] = {{"max_bounces", s.channel.max_bounces},
                    {"first_resolution_m", s.channel.first_res},
                    {"second_resolution_m", s.channel.second_res},
                    {"bin_duration_s", s.channel.bin_duration},
                    {"wavelength_m", s.channel.wavelength}};
  return doc.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write scenario file");
  out << scenario_to_json(s);
  if (!out) throw std::runtime_error(path + ": write failed");
}

ResultFormat parse_result_format(std::string_view name) {
  if (name == "csv") return ResultFormat::csv;
  if (name == "jsonl" || name == "json-lines") return ResultFormat::json_lines;
  throw std::invalid_argument("unknown result format: " + std::string(name));
}

std::vector<ChannelRow> channel_table(const Network& net) {
  std::vector<ChannelRow> rows;
  const auto& sc = net.scenario();
  for (const auto& link : net.direct_links()) {
    const auto g = net.link_gain(net.ap_transmitter(link.ap, sc.users[link.user].position), net.user_receiver(link.user));
    rows.push_back({ap_id(link.ap), user_id(link.user), g.total, g.los, g.reflected});
  }
  for (int r = 0; r < net.relay_count(); ++r) {
    const int l = net.relays().paired_ap[r];
    const auto g = net.link_gain(net.ap_transmitter(l, sc.relays[r].position), net.relay_receiver(r));
    rows.push_back({ap_id(l), relay_id(r), g.total, g.los, g.reflected});
  }
  for (const auto& path : net.relay_paths()) {
    const auto g = net.link_gain(net.relay_transmitter(path.relay, sc.users[path.user].position),
                                 net.user_receiver(path.user));
    rows.push_back({relay_id(path.relay), user_id(path.user), g.total, g.los, g.reflected});
  }
  return rows;
}

void write_results(std::ostream& out, const OutageReport& report, ResultFormat format) {
  if (format == ResultFormat::csv) {
    out << "user_id,mode,p_out,stderr,n_samples,threshold_db,seed\n";
    for (const auto& r : report.rows) {
      out << r.user_id << ',' << to_string(r.mode) << ',' << format_number(r.p_out) << ','
          << format_number(r.std_error) << ',' << r.n_samples << ',' << format_number(r.threshold_db) << ','
          << r.seed << '\n';
    }
    return;
  }
  for (const auto& r : report.rows) {
    json j = {{"user_id", r.user_id},
              {"mode", std::string(to_string(r.mode))},
              {"p_out", round10(r.p_out)},
              {"stderr", round10(r.std_error)},
              {"n_samples", r.n_samples},
              {"threshold_db", round10(r.threshold_db)},
              {"seed", r.seed},
              {"method", report.method},
              {"blockage_model", std::string(to_string(report.blockage_model))}};
    out << rounded_line(j);
  }
}

void write_results(std::ostream& out, const BlockageProbabilityTable& table, ResultFormat format) {
  if (format == ResultFormat::csv) {
    out << "link_id,tx,rx,probability,method\n";
    for (const auto& e : table.entries) {
      out << e.link_id << ',' << e.tx << ',' << e.rx << ',' << format_number(e.probability) << ',' << e.method
          << '\n';
    }
    return;
  }
  for (const auto& e : table.entries) {
    out << rounded_line({{"link_id", e.link_id},
                         {"tx", e.tx},
                         {"rx", e.rx},
                         {"probability", round10(e.probability)},
                         {"method", e.method}});
  }
}

void write_results(std::ostream& out, const std::vector<ChannelRow>& rows, ResultFormat format) {
  if (format == ResultFormat::csv) {
    out << "tx_id,rx_id,H,los_gain,reflected_gain\n";
    for (const auto& r : rows) {
      out << r.tx << ',' << r.rx << ',' << format_number(r.gain) << ',' << format_number(r.los) << ','
          << format_number(r.reflected) << '\n';
    }
    return;
  }
  for (const auto& r : rows) {
    out << rounded_line({{"tx_id", r.tx},
                         {"rx_id", r.rx},
                         {"H", round10(r.gain)},
                         {"los_gain", round10(r.los)},
                         {"reflected_gain", round10(r.reflected)}});
  }
}

template <typename Table>
void write_results(const Table& table, const std::string& path, ResultFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_results(out, table, format);
  out.flush();
  if (!out) throw std::runtime_error(path + ": write failed");
}

template void write_results(const OutageReport&, const std::string&, ResultFormat);
template void write_results(const BlockageProbabilityTable&, const std::string&, ResultFormat);
template void write_results(const std::vector<ChannelRow>&, const std::string&, ResultFormat);

}  // namespace owc
