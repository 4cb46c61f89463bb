#include "qag/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qag/error.hpp"
#include "qag/rng.hpp"

namespace qag {

using Json = nlohmann::ordered_json;

const Profile& ProfileTable::at(std::size_t app, std::size_t config) const {
  const auto& cell = cells_.at(index(app, config));
  if (!cell) {
    throw Error(ErrorCode::Validation, "no profile for application " + std::to_string(app) +
                                           ", configuration " + std::to_string(config));
  }
  return *cell;
}

namespace {

Error validation(const std::string& what) { return Error(ErrorCode::Validation, what); }

template <typename T>
void check_unique_ids(const std::vector<T>& items, const char* kind) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id.empty()) {
      throw validation(std::string(kind) + "[" + std::to_string(i) + "].id is empty");
    }
    if (!seen.insert(items[i].id).second) {
      throw validation(std::string("duplicate ") + kind + " id '" + items[i].id + "'");
    }
  }
}

template <typename T>
std::optional<std::size_t> find_id(const std::vector<T>& items, const std::string& id) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id == id) return i;
  }
  return std::nullopt;
}

}  // namespace

void Scenario::validate() const {
  if (schema_version != kSchemaVersion) {
    throw Error(ErrorCode::Version, "unsupported schema_version " + std::to_string(schema_version) +
                                        " (expected " + std::to_string(kSchemaVersion) + ")");
  }
  if (applications.empty()) throw validation("applications is empty");
  if (configurations.empty()) throw validation("configurations is empty");
  if (nodes.empty()) throw validation("nodes is empty");
  check_unique_ids(applications, "applications");
  check_unique_ids(configurations, "configurations");
  check_unique_ids(nodes, "nodes");

  for (const auto& app : applications) {
    if (!(app.loss_max > 0.0)) throw validation("applications[" + app.id + "].loss_max must be > 0");
    if (!(app.latency_max > 0.0)) {
      throw validation("applications[" + app.id + "].latency_max must be > 0");
    }
    if (!app.fixed_config.empty() && !find_id(configurations, app.fixed_config)) {
      throw validation("applications[" + app.id + "].fixed_config references unknown configuration '" +
                       app.fixed_config + "'");
    }
  }
  for (const auto& cfg : configurations) {
    if (cfg.epochs < 1) throw validation("configurations[" + cfg.id + "].epochs must be >= 1");
    if (cfg.steps_per_epoch < 1) {
      throw validation("configurations[" + cfg.id + "].steps_per_epoch must be >= 1");
    }
    if (cfg.mode < 0) throw validation("configurations[" + cfg.id + "].mode must be >= 0");
  }
  for (const auto& node : nodes) {
    if (!(node.capacity > 0.0)) throw validation("nodes[" + node.id + "].capacity must be > 0");
    if (!(node.idle_power >= 0.0) || !(node.max_power >= node.idle_power) ||
        !std::isfinite(node.max_power)) {
      throw validation("nodes[" + node.id + "] requires 0 <= idle_power <= max_power");
    }
  }
  if (profiles.apps() != applications.size() || profiles.configs() != configurations.size()) {
    throw validation("profiles table shape does not match applications x configurations");
  }
  for (std::size_t a = 0; a < applications.size(); ++a) {
    for (std::size_t c = 0; c < configurations.size(); ++c) {
      if (!profiles.has(a, c)) {
        throw validation("missing profile entry for (" + applications[a].id + ", " +
                         configurations[c].id + ")");
      }
      const auto& p = profiles.at(a, c);
      if (!(p.cost >= 0.0) || !std::isfinite(p.cost)) {
        throw validation("profile (" + applications[a].id + ", " + configurations[c].id +
                         ").cost must be finite and >= 0");
      }
      if (!(p.loss >= 0.0) || !std::isfinite(p.loss)) {
        throw validation("profile (" + applications[a].id + ", " + configurations[c].id +
                         ").loss must be finite and >= 0");
      }
    }
  }
}

void Scenario::set_targets(double latency_max, double loss_max) {
  for (auto& app : applications) {
    app.latency_max = latency_max;
    app.loss_max = loss_max;
  }
}

// ---------------------------------------------------------------------------
// Text format

std::string to_text(const Scenario& s) {
  Json doc;
  doc["schema_version"] = s.schema_version;
  Json apps = Json::array();
  for (const auto& a : s.applications) {
    Json j;
    j["id"] = a.id;
    j["loss_max_pct"] = a.loss_max;
    j["latency_max_s"] = a.latency_max;
    if (!a.fixed_config.empty()) j["fixed_config"] = a.fixed_config;
    apps.push_back(std::move(j));
  }
  doc["applications"] = std::move(apps);
  Json cfgs = Json::array();
  for (const auto& c : s.configurations) {
    cfgs.push_back(Json{{"id", c.id},
                        {"data_source", c.data_source},
                        {"epochs", c.epochs},
                        {"steps_per_epoch", c.steps_per_epoch},
                        {"mode", c.mode}});
  }
  doc["configurations"] = std::move(cfgs);
  Json nodes = Json::array();
  for (const auto& n : s.nodes) {
    nodes.push_back(Json{{"id", n.id},
                         {"type", n.type},
                         {"idle_power_w", n.idle_power},
                         {"max_power_w", n.max_power},
                         {"capacity_tops", n.capacity}});
  }
  doc["nodes"] = std::move(nodes);
  Json profiles = Json::array();
  for (std::size_t a = 0; a < s.profiles.apps(); ++a) {
    for (std::size_t c = 0; c < s.profiles.configs(); ++c) {
      if (!s.profiles.has(a, c)) continue;
      const auto& p = s.profiles.at(a, c);
      profiles.push_back(Json{{"app", s.applications.at(a).id},
                              {"config", s.configurations.at(c).id},
                              {"cost_tera_ops", p.cost},
                              {"loss_pct", p.loss}});
    }
  }
  doc["profiles"] = std::move(profiles);
  return doc.dump(2) + "\n";
}

namespace {

std::string line_context(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <typename T>
T field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::Parse, where + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::Parse, where + ": field '" + key + "' has the wrong type");
  }
}

const Json& array_field(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_array()) {
    throw Error(ErrorCode::Parse, std::string("top-level '") + key + "' must be an array");
  }
  return doc.at(key);
}

}  // namespace

Scenario from_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, "malformed scenario at " + line_context(text, e.byte) + ": " +
                                      e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::Parse, "scenario document must be an object");

  Scenario s;
  s.schema_version = field<int>(doc, "schema_version", "scenario");
  if (s.schema_version != kSchemaVersion) {
    throw Error(ErrorCode::Version, "unsupported schema_version " +
                                        std::to_string(s.schema_version) + " (expected " +
                                        std::to_string(kSchemaVersion) + ")");
  }

  const auto& apps = array_field(doc, "applications");
  for (std::size_t i = 0; i < apps.size(); ++i) {
    const std::string where = "applications[" + std::to_string(i) + "]";
    AppRequirements a;
    a.id = field<std::string>(apps[i], "id", where);
    a.loss_max = field<double>(apps[i], "loss_max_pct", where);
    a.latency_max = field<double>(apps[i], "latency_max_s", where);
    if (apps[i].contains("fixed_config")) {
      a.fixed_config = field<std::string>(apps[i], "fixed_config", where);
    }
    s.applications.push_back(std::move(a));
  }
  const auto& cfgs = array_field(doc, "configurations");
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    const std::string where = "configurations[" + std::to_string(i) + "]";
    Configuration c;
    c.id = field<std::string>(cfgs[i], "id", where);
    c.data_source = field<std::string>(cfgs[i], "data_source", where);
    c.epochs = field<int>(cfgs[i], "epochs", where);
    c.steps_per_epoch = field<int>(cfgs[i], "steps_per_epoch", where);
    c.mode = field<int>(cfgs[i], "mode", where);
    s.configurations.push_back(std::move(c));
  }
  const auto& nodes = array_field(doc, "nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    ComputeNodeSpec n;
    n.id = field<std::string>(nodes[i], "id", where);
    n.type = field<std::string>(nodes[i], "type", where);
    n.idle_power = field<double>(nodes[i], "idle_power_w", where);
    n.max_power = field<double>(nodes[i], "max_power_w", where);
    n.capacity = field<double>(nodes[i], "capacity_tops", where);
    s.nodes.push_back(std::move(n));
  }

  s.profiles = ProfileTable(s.applications.size(), s.configurations.size());
  const auto& profiles = array_field(doc, "profiles");
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const std::string where = "profiles[" + std::to_string(i) + "]";
    const auto app_id = field<std::string>(profiles[i], "app", where);
    const auto cfg_id = field<std::string>(profiles[i], "config", where);
    const auto a = find_id(s.applications, app_id);
    const auto c = find_id(s.configurations, cfg_id);
    if (!a) throw validation(where + ".app references unknown application '" + app_id + "'");
    if (!c) throw validation(where + ".config references unknown configuration '" + cfg_id + "'");
    if (s.profiles.has(*a, *c)) {
      throw validation("duplicate profile entry for (" + app_id + ", " + cfg_id + ")");
    }
    s.profiles.set(*a, *c,
                   Profile{field<double>(profiles[i], "cost_tera_ops", where),
                           field<double>(profiles[i], "loss_pct", where)});
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  scenario.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write scenario file '" + path.string() + "'");
  out << to_text(scenario);
  if (!out) throw Error(ErrorCode::Io, "failed writing scenario file '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Fixtures

std::vector<ComputeNodeSpec> node_catalogue() {
  return {
      {"n1", "CPU", 5.0, 12.0, 2.0},
      {"n2", "T4 GPU", 36.0, 70.0, 80.0},
      {"n3", "TPU v2", 53.0, 280.0, 180.0},
  };
}

Scenario fixture_small_example() {
  Scenario s;
  s.applications = {
      {"h1", 25.0, 60.0, ""},
      {"h2", 30.0, 60.0, ""},
  };
  s.configurations = {
      {"s1", "ABILENE", 1, 1, 0},
      {"s2", "GEANT", 1, 5, 1},
      {"s3", "GEANT", 10, 50, 1},
      {"s4", "GEANT", 20, 200, 1},
  };
  const auto catalogue = node_catalogue();
  s.nodes = {catalogue[0], catalogue[1]};
  s.profiles = ProfileTable(2, 4);
  const double weights[2][4][2] = {
      {{50, 15}, {30, 25}, {20, 40}, {10, 50}},
      {{100, 65}, {80, 75}, {70, 20}, {60, 30}},
  };
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t c = 0; c < 4; ++c) {
      s.profiles.set(a, c, Profile{weights[a][c][0], weights[a][c][1]});
    }
  }
  return s;
}

namespace {

const char* const kDataSources[] = {"GBN", "GEANT", "NSFNET", "GERMANY50", "NOBEL-GBN", "ABILENE"};

Configuration random_training_config(Rng& rng, std::string id) {
  Configuration c;
  c.id = std::move(id);
  c.data_source = kDataSources[uniform_int(rng, 0, std::size(kDataSources) - 1)];
  c.epochs = static_cast<int>(uniform_int(rng, 1, 50));
  c.steps_per_epoch = static_cast<int>(uniform_int(rng, 1, 2000));
  c.mode = 1;
  return c;
}

bool has_feasible_pair(const Scenario& s, std::size_t app) {
  const auto& req = s.applications[app];
  for (std::size_t c = 0; c < s.configurations.size(); ++c) {
    const auto& p = s.profile(app, c);
    if (p.loss > req.loss_max) continue;
    for (const auto& node : s.nodes) {
      if (p.cost / node.capacity <= req.latency_max) return true;
    }
  }
  return false;
}

}  // namespace

Scenario fixture_large_scenario(std::uint64_t seed, double latency_max, double loss_max) {
  Rng rng(derive_seed(seed, 0x1a26e));
  Scenario s;
  for (int h = 1; h <= 7; ++h) {
    s.applications.push_back({"h" + std::to_string(h), loss_max, latency_max, "s2"});
  }
  // s1 is the pre-trained load-and-infer model, s2 the baseline's fixed
  // training recipe (20 epochs x 2000 steps); the rest are drawn uniformly.
  s.configurations.push_back({"s1", "ABILENE", 1, 1, 0});
  s.configurations.push_back({"s2", "GEANT", 20, 2000, 1});
  for (int c = 3; c <= 20; ++c) {
    s.configurations.push_back(random_training_config(rng, "s" + std::to_string(c)));
  }
  const char* const prefixes[] = {"cpu", "gpu", "tpu"};
  const auto catalogue = node_catalogue();
  for (std::size_t row = 0; row < catalogue.size(); ++row) {
    for (int k = 1; k <= 3; ++k) {
      auto node = catalogue[row];
      node.id = std::string(prefixes[row]) + std::to_string(k);
      s.nodes.push_back(std::move(node));
    }
  }
  s.profiles = generate_profiles(derive_seed(seed, 0x9f0f11e5), s.applications, s.configurations);
  return s;
}

Scenario random_small_scenario(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x5a11));
  Scenario s;
  s.applications = {{"h1", 0.0, 0.0, ""}, {"h2", 0.0, 0.0, ""}};
  s.configurations.push_back({"s1", "ABILENE", 1, 1, 0});
  for (int c = 2; c <= 4; ++c) {
    s.configurations.push_back(random_training_config(rng, "s" + std::to_string(c)));
  }
  const auto catalogue = node_catalogue();
  for (int k = 1; k <= 2; ++k) {
    auto node = catalogue[static_cast<std::size_t>(uniform_int(rng, 0, 2))];
    node.id = "n" + std::to_string(k);
    s.nodes.push_back(std::move(node));
  }
  s.profiles = generate_profiles(derive_seed(seed, 0x9f0f11e5), s.applications, s.configurations);

  for (std::size_t a = 0; a < s.applications.size(); ++a) {
    auto& app = s.applications[a];
    bool ok = false;
    for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
      app.loss_max = uniform(rng, 10.0, 40.0);
      app.latency_max = uniform(rng, 1.0, 10.0);
      ok = has_feasible_pair(s, a);
    }
    if (!ok) {
      // Loosen to the cheapest-latency pair among the lowest-loss configurations.
      double best_loss = s.profile(a, 0).loss;
      for (std::size_t c = 1; c < s.configurations.size(); ++c) {
        best_loss = std::min(best_loss, s.profile(a, c).loss);
      }
      app.loss_max = std::max(app.loss_max, best_loss);
      double best_time = INFINITY;
      for (std::size_t c = 0; c < s.configurations.size(); ++c) {
        if (s.profile(a, c).loss > app.loss_max) continue;
        for (const auto& node : s.nodes) {
          best_time = std::min(best_time, s.profile(a, c).cost / node.capacity);
        }
      }
      app.latency_max = std::max(app.latency_max, best_time);
    }
  }
  return s;
}

// Cost is affine in training volume (epochs x steps); mode 0 pays only the
// inference cost. Loss decays exponentially with training volume from the
// pre-trained loss toward a per-application floor. Noise scales each
// application's costs and losses by a log-normal factor.
ProfileTable generate_profiles(std::uint64_t seed, const std::vector<AppRequirements>& apps,
                               const std::vector<Configuration>& configs,
                               const GeneratorOptions& options) {
  ProfileTable table(apps.size(), configs.size());
  for (std::size_t a = 0; a < apps.size(); ++a) {
    Rng rng(derive_seed(seed, a));
    const double inference_cost = uniform(rng, 0.5, 4.0);  // T-ops
    const double step_cost = uniform(rng, 0.002, 0.01);    // T-ops per training step
    const double pretrained_loss = uniform(rng, 25.0, 150.0);
    const double floor_loss = uniform(rng, 2.0, 8.0);
    const double decay_steps = uniform(rng, 5000.0, 30000.0);
    // One multiplicative factor per application and quantity, so orderings
    // across configurations survive the noise.
    const double cost_noise = std::exp(options.noise * standard_normal(rng));
    const double loss_noise = std::exp(options.noise * standard_normal(rng));
    for (std::size_t c = 0; c < configs.size(); ++c) {
      const auto& cfg = configs[c];
      const double volume = static_cast<double>(cfg.epochs) * cfg.steps_per_epoch;
      double cost = inference_cost;
      double loss = pretrained_loss;
      if (cfg.mode >= 1) {
        cost += step_cost * volume;
        loss = floor_loss + (pretrained_loss - floor_loss) * std::exp(-volume / decay_steps);
      }
      cost *= cost_noise;
      loss *= loss_noise;
      table.set(a, c, Profile{cost, loss});
    }
  }
  return table;
}

std::vector<std::size_t> fixed_config_selection(const Scenario& scenario) {
  std::size_t fallback = 0;
  for (std::size_t c = 0; c < scenario.configurations.size(); ++c) {
    if (scenario.configurations[c].mode == 0) {
      fallback = c;
      break;
    }
  }
  std::vector<std::size_t> out;
  out.reserve(scenario.applications.size());
  for (const auto& app : scenario.applications) {
    std::size_t chosen = fallback;
    if (!app.fixed_config.empty()) {
      const auto found = find_id(scenario.configurations, app.fixed_config);
      if (!found) {
        throw validation("fixed_config '" + app.fixed_config + "' of application '" + app.id +
                         "' is not a known configuration");
      }
      chosen = *found;
    }
    out.push_back(chosen);
  }
  return out;
}

}  // namespace qag
