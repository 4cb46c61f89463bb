#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qag {

inline constexpr int kSchemaVersion = 1;

struct AppRequirements {
  std::string id;
  double loss_max = 0.0;     // MAPE percent
  double latency_max = 0.0;  // seconds
  // Configuration the fixed-configuration baseline deploys for this app.
  // Empty selects the first load-and-infer (mode 0) configuration.
  std::string fixed_config;

  bool operator==(const AppRequirements&) const = default;
};

// Deployment recipe: data source, training volume and mode.
// mode 0 = load pre-trained model and infer, mode >= 1 = load, update, infer.
struct Configuration {
  std::string id;
  std::string data_source;
  int epochs = 1;
  int steps_per_epoch = 1;
  int mode = 0;

  bool operator==(const Configuration&) const = default;
};

struct ComputeNodeSpec {
  std::string id;
  std::string type;
  double idle_power = 0.0;  // W
  double max_power = 0.0;   // W
  double capacity = 0.0;    // TOPS

  bool operator==(const ComputeNodeSpec&) const = default;
};

struct Profile {
  double cost = 0.0;  // tera-operations
  double loss = 0.0;  // MAPE percent

  bool operator==(const Profile&) const = default;
};

// Dense (application x configuration) table; entries may be absent until the
// scenario is validated.
class ProfileTable {
 public:
  ProfileTable() = default;
  ProfileTable(std::size_t apps, std::size_t configs)
      : apps_(apps), configs_(configs), cells_(apps * configs) {}

  std::size_t apps() const { return apps_; }
  std::size_t configs() const { return configs_; }

  void set(std::size_t app, std::size_t config, Profile p) { cells_.at(index(app, config)) = p; }
  bool has(std::size_t app, std::size_t config) const {
    return cells_.at(index(app, config)).has_value();
  }
  const Profile& at(std::size_t app, std::size_t config) const;

  bool operator==(const ProfileTable&) const = default;

 private:
  std::size_t index(std::size_t app, std::size_t config) const { return app * configs_ + config; }

  std::size_t apps_ = 0;
  std::size_t configs_ = 0;
  std::vector<std::optional<Profile>> cells_;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::vector<AppRequirements> applications;
  std::vector<Configuration> configurations;
  std::vector<ComputeNodeSpec> nodes;
  ProfileTable profiles;

  const Profile& profile(std::size_t app, std::size_t config) const {
    return profiles.at(app, config);
  }

  // Throws Error(Validation) naming the offending field.
  void validate() const;

  // Applies the same targets to every application.
  void set_targets(double latency_max, double loss_max);

  bool operator==(const Scenario&) const = default;
};

std::string to_text(const Scenario& scenario);
Scenario from_text(std::string_view text);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// The worked two-application example: 2 apps, 4 configurations, a CPU and a
// T4 GPU, with the published edge weights.
Scenario fixture_small_example();

// Seven applications, 20 shared configurations, three nodes of each type.
Scenario fixture_large_scenario(std::uint64_t seed, double latency_max = 5.0,
                                double loss_max = 20.0);

// Two applications, four configurations and two nodes drawn from the node
// catalogue, with targets redrawn until each application has at least one
// individually feasible (configuration, node) pair.
Scenario random_small_scenario(std::uint64_t seed);

struct GeneratorOptions {
  // Sigma of the per-application log-normal factors on cost and loss.
  double noise = 0.1;
};

ProfileTable generate_profiles(std::uint64_t seed, const std::vector<AppRequirements>& apps,
                               const std::vector<Configuration>& configs,
                               const GeneratorOptions& options = {});

// Rows of the node catalogue: CPU, T4 GPU, TPU v2.
std::vector<ComputeNodeSpec> node_catalogue();

// Configuration the fixed baseline uses for each application.
std::vector<std::size_t> fixed_config_selection(const Scenario& scenario);

}  // namespace qag
