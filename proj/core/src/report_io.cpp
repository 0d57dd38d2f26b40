#include "json_util.hpp"
#include "liit/error.hpp"
#include "liit/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace liit {
namespace {

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::string format_cell(double mean, double stddev) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f (\xC2\xB1 %.4f)", mean, stddev);
    return buf;
}

}  // namespace

std::string reports_to_json(std::span<const EvalReport> reports, const std::string& provenance_json) {
    nlohmann::ordered_json root;
    root["provenance"] = nlohmann::ordered_json::parse(provenance_json);
    root["complete"] = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.complete; });
    auto& arr = root["reports"] = nlohmann::ordered_json::array();
    for (const auto& rep : reports) {
        nlohmann::ordered_json j;
        j["dataset"] = rep.dataset;
        j["regime"] = rep.regime;
        j["complete"] = rep.complete;
        j["rerun_seeds"] = rep.rerun_seeds;
        j["mean_auc"] = rep.mean_auc;
        j["std_auc"] = rep.std_auc;
        j["mean_lad_seconds"] = rep.mean_lad_seconds;
        j["mean_train_seconds"] = rep.mean_train_seconds;
        j["mean_total_seconds"] = rep.mean_total_seconds;
        auto& curve = j["perturbation_curve"] = nlohmann::ordered_json::array();
        for (const auto& p : rep.curve) curve.push_back({{"level", p.level}, {"mean_auc", p.mean_auc}, {"std_auc", p.std_auc}});
        auto& runs = j["runs"] = nlohmann::ordered_json::array();
        for (const auto& r : rep.runs) {
            nlohmann::ordered_json rj;
            rj["rerun"] = r.rerun;
            rj["split_seed"] = r.split_seed;
            rj["model_seed"] = r.model_seed;
            rj["ok"] = r.ok;
            if (!r.error.empty()) rj["error"] = r.error;
            rj["auc"] = optional_json(r.auc);
            auto& pa = rj["perturbed_auc"] = nlohmann::ordered_json::array();
            for (const auto& v : r.perturbed_auc) pa.push_back(optional_json(v));
            rj["lad_seconds"] = r.lad_seconds;
            rj["train_seconds"] = r.train_seconds;
            rj["total_seconds"] = r.total_seconds;
            rj["n_train"] = r.n_train;
            rj["epochs_total"] = r.epochs_total;
            rj["epochs_per_iteration"] = r.epochs_per_iteration;
            rj["total_draws"] = r.total_draws;
            rj["mts_final_size"] = r.mts_final_size;
            runs.push_back(std::move(rj));
        }
        j["failures"] = rep.failures;
        arr.push_back(std::move(j));
    }
    return root.dump(1);
}

void write_auc_table(std::span<const EvalReport> reports, std::ostream& out) {
    std::vector<std::string> datasets, regimes;
    std::map<std::pair<std::string, std::string>, const EvalReport*> cells;
    for (const auto& rep : reports) {
        if (std::find(datasets.begin(), datasets.end(), rep.dataset) == datasets.end()) datasets.push_back(rep.dataset);
        if (std::find(regimes.begin(), regimes.end(), rep.regime) == regimes.end()) regimes.push_back(rep.regime);
        cells[{rep.dataset, rep.regime}] = &rep;
    }
    out << "dataset";
    for (const auto& g : regimes) out << ',' << g;
    out << '\n';
    for (const auto& d : datasets) {
        out << d;
        for (const auto& g : regimes) {
            auto it = cells.find({d, g});
            const bool have = it != cells.end() &&
                              std::any_of(it->second->runs.begin(), it->second->runs.end(),
                                          [](const RunRecord& r) { return r.ok; });
            out << ',' << (have ? format_cell(it->second->mean_auc, it->second->std_auc) : "NA");
        }
        out << '\n';
    }
}

std::vector<AucCell> read_auc_table(std::istream& in) {
    auto split_line = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) out.push_back(field);
        return out;
    };
    std::string line;
    do {
        if (!std::getline(in, line)) throw DataError("auc table: empty input");
    } while (!line.empty() && line.front() == '#');
    const auto header = split_line(line);
    if (header.empty() || header.front() != "dataset") throw DataError("auc table: missing 'dataset' header");

    std::vector<AucCell> cells;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split_line(line);
        if (fields.size() != header.size()) throw DataError("auc table: ragged row '" + line + "'");
        for (std::size_t c = 1; c < fields.size(); ++c) {
            AucCell cell{fields[0], header[c], std::nullopt, std::nullopt};
            if (fields[c] != "NA") {
                double mean = 0.0, sd = 0.0;
                if (std::sscanf(fields[c].c_str(), "%lf (\xC2\xB1 %lf)", &mean, &sd) != 2) {
                    throw DataError("auc table: cannot parse cell '" + fields[c] + "'");
                }
                cell.mean = mean;
                cell.stddev = sd;
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

void write_curve_csv(std::span<const EvalReport> reports, std::ostream& out) {
    out << "dataset,regime,level,mean_auc,std_auc\n";
    char buf[128];
    for (const auto& rep : reports) {
        for (const auto& p : rep.curve) {
            std::snprintf(buf, sizeof(buf), "%.4f,%.17g,%.17g", p.level, p.mean_auc, p.std_auc);
            out << rep.dataset << ',' << rep.regime << ',' << buf << '\n';
        }
    }
}

}  // namespace liit
