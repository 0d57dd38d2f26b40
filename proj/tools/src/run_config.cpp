#include "liit_cli/run_config.hpp"

#include <liit/error.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace liit::cli {
namespace {

using nlohmann::json;

PerturbMode parse_perturb_mode(const std::string& s) {
    if (s == "variance") return PerturbMode::ScaleVariance;
    if (s == "stddev") return PerturbMode::ScaleStdDev;
    throw ConfigError("unknown perturbation mode '" + s + "' (expected variance|stddev)");
}

std::string to_string(PerturbMode m) { return m == PerturbMode::ScaleVariance ? "variance" : "stddev"; }

DatasetRef parse_dataset(const json& j, const std::filesystem::path& base_dir) {
    DatasetRef ref;
    if (j.is_string()) {
        ref.path = j.get<std::string>();
    } else {
        ref.path = j.at("path").get<std::string>();
        if (j.contains("label_column")) {
            const auto& col = j.at("label_column");
            if (col.is_string()) ref.label_column = col.get<std::string>();
            else ref.label_column = col.get<int>();
        }
        ref.has_header = j.value("has_header", true);
        ref.name = j.value("name", "");
    }
    if (ref.path.is_relative()) ref.path = base_dir / ref.path;
    ref.path = ref.path.lexically_normal();
    if (ref.name.empty()) ref.name = ref.path.stem().string();
    return ref;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir,
                           const Overrides& overrides) {
    RunConfig cfg;
    try {
        const auto j = json::parse(json_text);
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        else if (!overrides.seed) throw ConfigError("config: 'seed' is mandatory");
        cfg.output_dir = j.value("output_dir", std::string("out"));
        if (j.contains("datasets")) {
            for (const auto& d : j.at("datasets")) cfg.datasets.push_back(parse_dataset(d, base_dir));
        }
        if (j.contains("liit")) cfg.liit = config_from_json(j.at("liit").dump());
        if (j.contains("perturbation")) {
            const auto& p = j.at("perturbation");
            if (p.contains("levels")) cfg.perturbation.levels = p.at("levels").get<std::vector<double>>();
            if (p.contains("mode")) cfg.perturbation.mode = parse_perturb_mode(p.at("mode").get<std::string>());
        }
        if (j.contains("regimes")) {
            for (const auto& r : j.at("regimes")) cfg.regimes.push_back(Regime::parse(r.get<std::string>()));
        }
        if (j.contains("strategy")) cfg.train_regime = Regime::parse(j.at("strategy").get<std::string>());
        cfg.reruns = j.value("reruns", cfg.reruns);
        cfg.jobs = j.value("jobs", cfg.jobs);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
    else if (cfg.output_dir.is_relative()) cfg.output_dir = (base_dir / cfg.output_dir).lexically_normal();
    if (overrides.strategy) cfg.train_regime = Regime::parse(*overrides.strategy);
    if (overrides.regimes) {
        cfg.regimes.clear();
        for (const auto& r : *overrides.regimes) cfg.regimes.push_back(Regime::parse(r));
    }
    if (overrides.reruns) cfg.reruns = *overrides.reruns;
    if (overrides.jobs) cfg.jobs = *overrides.jobs;

    if (cfg.regimes.empty()) {
        for (auto s : kAllStrategies) cfg.regimes.push_back(Regime::liit(s));
        cfg.regimes.push_back(Regime::full());
    }
    cfg.perturbation.seed = cfg.seed;
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path.parent_path(), overrides);
}

void validate(const RunConfig& cfg) {
    if (cfg.datasets.empty()) throw ConfigError("config: no datasets given");
    for (const auto& d : cfg.datasets) {
        if (!std::filesystem::is_regular_file(d.path)) throw ConfigError("dataset file not found: " + d.path.string());
    }
    if (cfg.reruns < 1) throw ConfigError("config: reruns must be >= 1");
    if (cfg.jobs < 1) throw ConfigError("config: jobs must be >= 1");
    cfg.liit.validate();
    cfg.perturbation.validate();
}

std::string provenance_json(const RunConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    auto& ds = j["datasets"] = json::array();
    for (const auto& d : cfg.datasets) {
        json dj{{"path", d.path.generic_string()}, {"has_header", d.has_header}, {"name", d.name}};
        if (const auto* s = std::get_if<std::string>(&d.label_column)) dj["label_column"] = *s;
        else dj["label_column"] = std::get<int>(d.label_column);
        ds.push_back(std::move(dj));
    }
    j["liit"] = json::parse(config_to_json(cfg.liit));
    j["perturbation"] = {{"levels", cfg.perturbation.levels}, {"mode", to_string(cfg.perturbation.mode)}};
    auto& regimes = j["regimes"] = json::array();
    for (const auto& r : cfg.regimes) regimes.push_back(r.name());
    j["strategy"] = cfg.train_regime.name();
    j["reruns"] = cfg.reruns;
    j["jobs"] = cfg.jobs;
    return j.dump();
}

TabularDataset load_dataset(const DatasetRef& ref) {
    auto ds = load_csv(ref.path, ref.label_column, ref.has_header);
    ds.name = ref.name;
    return ds;
}

}  // namespace liit::cli
