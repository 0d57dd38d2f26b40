#pragma once

#include <liit/dataset.hpp>
#include <liit/evaluation.hpp>
#include <liit/trainer.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace liit::cli {

struct DatasetRef {
    std::filesystem::path path;
    LabelColumn label_column = -1;
    bool has_header = true;
    std::string name;
};

struct RunConfig {
    std::vector<DatasetRef> datasets;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "out";
    LiitConfig liit;
    PerturbSpec perturbation;
    std::vector<Regime> regimes;
    Regime train_regime = Regime::liit(Strategy::QuantileRepeated);
    int reruns = 5;
    int jobs = 1;
};

/// Command-line values that win over the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<std::string> strategy;
    std::optional<std::vector<std::string>> regimes;
    std::optional<int> reruns;
    std::optional<int> jobs;
};

/// Parses a config document. Relative dataset paths resolve against `base_dir`.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir,
                           const Overrides& overrides = {});
RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides = {});

/// Throws ConfigError unless every dataset file exists and values are in range.
void validate(const RunConfig& cfg);

/// Resolved config (minus the output directory) as a compact JSON object.
std::string provenance_json(const RunConfig& cfg);

TabularDataset load_dataset(const DatasetRef& ref);

}  // namespace liit::cli
