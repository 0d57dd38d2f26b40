#include "liit/dataset.hpp"

#include "liit/error.hpp"
#include "liit/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace liit {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string_view unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::size_t resolve_label_column(const LabelColumn& column, const std::vector<std::string>& header,
                                 std::size_t width, const std::string& source) {
    if (const auto* name = std::get_if<std::string>(&column)) {
        if (header.empty()) {
            throw DataError(source + ": label column '" + *name + "' given by name but file has no header");
        }
        auto it = std::find(header.begin(), header.end(), *name);
        if (it == header.end()) throw DataError(source + ": label column '" + *name + "' not found in header");
        return static_cast<std::size_t>(it - header.begin());
    }
    const int idx = std::get<int>(column);
    const long resolved = idx < 0 ? static_cast<long>(width) + idx : idx;
    if (resolved < 0 || resolved >= static_cast<long>(width)) {
        throw DataError(source + ": label column index " + std::to_string(idx) + " out of range for " +
                        std::to_string(width) + " columns");
    }
    return static_cast<std::size_t>(resolved);
}

}  // namespace

void TabularDataset::validate() const {
    const auto n = rows();
    if (labels.size() != n) throw DataError(name + ": labels length " + std::to_string(labels.size()) +
                                            " != rows " + std::to_string(n));
    if (num_classes < 2) throw DataError(name + ": need at least 2 classes, got " + std::to_string(num_classes));
    if (n < static_cast<std::size_t>(num_classes)) throw DataError(name + ": fewer rows than classes");
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
    for (int y : labels) {
        if (y < 0 || y >= num_classes) throw DataError(name + ": label " + std::to_string(y) + " out of range");
        ++counts[static_cast<std::size_t>(y)];
    }
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) throw DataError(name + ": class " + std::to_string(k) + " has no rows");
    }
    if (!features.allFinite()) throw DataError(name + ": non-finite feature value");
}

std::vector<std::vector<RowIndex>> TabularDataset::rows_by_class() const {
    std::vector<std::vector<RowIndex>> out(static_cast<std::size_t>(std::max(num_classes, 0)));
    for (std::size_t i = 0; i < labels.size(); ++i) out[static_cast<std::size_t>(labels[i])].push_back(i);
    return out;
}

TabularDataset subset(const TabularDataset& ds, std::span<const RowIndex> rows) {
    TabularDataset out;
    out.name = ds.name;
    out.num_classes = ds.num_classes;
    out.class_names = ds.class_names;
    out.feature_names = ds.feature_names;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= ds.rows()) throw DataError(ds.name + ": subset row " + std::to_string(rows[i]) + " out of range");
        out.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(static_cast<Eigen::Index>(rows[i]));
        out.labels.push_back(ds.labels[rows[i]]);
    }
    return out;
}

TabularDataset parse_csv(std::string_view text, const LabelColumn& label_column, bool has_header,
                         std::string source) {
    std::vector<std::string> header;
    std::vector<std::vector<double>> values;
    std::vector<std::string> raw_labels;
    std::size_t width = 0;
    std::size_t label_col = 0;
    bool saw_first = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        auto fields = split_fields(line);
        if (!saw_first) {
            saw_first = true;
            width = fields.size();
            if (width < 2) throw DataError(source + ": need at least one feature column and a label column");
            if (has_header) {
                for (auto f : fields) header.emplace_back(unquote(f));
                label_col = resolve_label_column(label_column, header, width, source);
                continue;
            }
            label_col = resolve_label_column(label_column, header, width, source);
        }
        if (fields.size() != width) {
            throw DataError(source + ": line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(width));
        }
        std::vector<double> row;
        row.reserve(width - 1);
        for (std::size_t c = 0; c < width; ++c) {
            if (c == label_col) {
                raw_labels.emplace_back(unquote(fields[c]));
                continue;
            }
            auto cell = unquote(fields[c]);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                throw DataError(source + ": cannot parse cell at line " + std::to_string(line_no) + ", column " +
                                std::to_string(c + 1) + ": '" + std::string(cell) + "'");
            }
            row.push_back(v);
        }
        values.push_back(std::move(row));
        if (end == text.size()) break;
    }
    if (values.empty()) throw DataError(source + ": no data rows");

    TabularDataset ds;
    ds.name = source;
    ds.features.resize(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(width - 1));
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t j = 0; j < width - 1; ++j) {
            ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
        }
    }
    std::unordered_map<std::string, int> codes;
    ds.labels.reserve(raw_labels.size());
    for (const auto& text_label : raw_labels) {
        auto [it, inserted] = codes.try_emplace(text_label, static_cast<int>(ds.class_names.size()));
        if (inserted) ds.class_names.push_back(text_label);
        ds.labels.push_back(it->second);
    }
    ds.num_classes = static_cast<int>(ds.class_names.size());
    if (ds.num_classes < 2) throw DataError(source + ": single-class file");
    if (has_header) {
        for (std::size_t c = 0; c < width; ++c) {
            if (c != label_col) ds.feature_names.push_back(header[c]);
        }
    }
    ds.validate();
    return ds;
}

TabularDataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column, bool has_header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    auto text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw DataError(path.string() + ": empty file");
    auto ds = parse_csv(text, label_column, has_header, path.string());
    ds.name = path.stem().string();
    return ds;
}

void write_csv(const TabularDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    const auto d = ds.cols();
    for (std::size_t j = 0; j < d; ++j) {
        out << (j < ds.feature_names.size() ? ds.feature_names[j] : "x" + std::to_string(j)) << ',';
    }
    out << "label\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) out << ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) << ',';
        const auto y = static_cast<std::size_t>(ds.labels[i]);
        out << (y < ds.class_names.size() ? ds.class_names[y] : std::to_string(y)) << '\n';
    }
}

namespace {

/// Moves units between per-class counts until their sum hits `target`.
/// Adds to the largest fractional deficit first, removes from the largest surplus.
void apportion(std::vector<long>& counts, const std::vector<double>& quota, const std::vector<long>& lo,
               const std::vector<long>& hi, long target) {
    long total = std::accumulate(counts.begin(), counts.end(), 0L);
    while (total != target) {
        long best = -1;
        double best_gap = 0.0;
        for (std::size_t c = 0; c < counts.size(); ++c) {
            const double gap = quota[c] - static_cast<double>(counts[c]);
            if (total < target) {
                if (counts[c] >= hi[c]) continue;
                if (best < 0 || gap > best_gap) { best = static_cast<long>(c); best_gap = gap; }
            } else {
                if (counts[c] <= lo[c]) continue;
                if (best < 0 || gap < best_gap) { best = static_cast<long>(c); best_gap = gap; }
            }
        }
        if (best < 0) return;
        counts[static_cast<std::size_t>(best)] += total < target ? 1 : -1;
        total += total < target ? 1 : -1;
    }
}

}  // namespace

SplitDataset split(const TabularDataset& ds, std::uint64_t seed) {
    const auto n = static_cast<long>(ds.rows());
    if (n < 10) throw DataError(ds.name + ": split needs at least 10 rows, got " + std::to_string(n));

    SplitDataset out;
    out.split_seed = seed;
    auto by_class = ds.rows_by_class();
    const std::size_t K = by_class.size();

    Rng rng(derive_seed({seed, 0x5b17ULL}));
    for (auto& members : by_class) std::shuffle(members.begin(), members.end(), rng);

    long forced_train = 0;
    std::vector<std::size_t> eligible;
    for (std::size_t k = 0; k < K; ++k) {
        const auto m = static_cast<long>(by_class[k].size());
        if (m < 3) {
            forced_train += m;
            if (m > 0) {
                out.warnings.push_back("class " + std::to_string(k) + " has " + std::to_string(m) +
                                       " member(s); placed wholly in train");
            }
        } else {
            eligible.push_back(k);
        }
    }

    const std::size_t E = eligible.size();
    std::vector<long> train(E), lo(E), hi(E), size(E);
    std::vector<double> quota(E);
    for (std::size_t e = 0; e < E; ++e) {
        size[e] = static_cast<long>(by_class[eligible[e]].size());
        quota[e] = 0.8 * static_cast<double>(size[e]);
        lo[e] = 1;
        hi[e] = size[e] - 2;
        if (size[e] >= 10) {
            // keep larger classes within one row of their 80% share
            lo[e] = std::max(lo[e], static_cast<long>(std::ceil(quota[e] - 1.0)));
            hi[e] = std::min(hi[e], static_cast<long>(std::floor(quota[e] + 1.0)));
        }
        train[e] = std::clamp(4 * size[e] / 5, lo[e], hi[e]);
    }
    apportion(train, quota, lo, hi, n * 4 / 5 - forced_train);

    std::vector<long> val(E), vlo(E), vhi(E);
    std::vector<double> vquota(E);
    for (std::size_t e = 0; e < E; ++e) {
        const long holdout = size[e] - train[e];
        vquota[e] = 0.1 * static_cast<double>(size[e]);
        vlo[e] = 1;
        vhi[e] = holdout - 1;
        val[e] = std::clamp(size[e] / 10, vlo[e], vhi[e]);
    }
    apportion(val, vquota, vlo, vhi, n / 10);

    for (std::size_t k = 0; k < K; ++k) {
        auto it = std::find(eligible.begin(), eligible.end(), k);
        const auto& members = by_class[k];
        if (it == eligible.end()) {
            out.train_rows.insert(out.train_rows.end(), members.begin(), members.end());
            continue;
        }
        const auto e = static_cast<std::size_t>(it - eligible.begin());
        const auto t = static_cast<std::size_t>(train[e]);
        const auto v = static_cast<std::size_t>(val[e]);
        out.train_rows.insert(out.train_rows.end(), members.begin(), members.begin() + static_cast<long>(t));
        out.validation_rows.insert(out.validation_rows.end(), members.begin() + static_cast<long>(t),
                                   members.begin() + static_cast<long>(t + v));
        out.test_rows.insert(out.test_rows.end(), members.begin() + static_cast<long>(t + v), members.end());
    }
    std::sort(out.train_rows.begin(), out.train_rows.end());
    std::sort(out.validation_rows.begin(), out.validation_rows.end());
    std::sort(out.test_rows.begin(), out.test_rows.end());

    out.train = subset(ds, out.train_rows);
    out.validation = subset(ds, out.validation_rows);
    out.test = subset(ds, out.test_rows);
    return out;
}

TrainStats train_stats(const Matrix& features) {
    const auto n = features.rows();
    TrainStats s;
    s.mean = Vector::Zero(features.cols());
    s.variance = Vector::Zero(features.cols());
    if (n == 0) return s;
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) sum += features(i, j);
        const double mu = sum / static_cast<double>(n);
        double ss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double dev = features(i, j) - mu;
            ss += dev * dev;
        }
        s.mean(j) = mu;
        s.variance(j) = ss / static_cast<double>(n);
    }
    return s;
}

TrainStats train_stats(const TabularDataset& ds) { return train_stats(ds.features); }

Matrix blob_centers(std::size_t dims, int num_classes) {
    Matrix centers = Matrix::Zero(num_classes, static_cast<Eigen::Index>(dims));
    for (int k = 0; k < num_classes; ++k) {
        const auto axis = static_cast<Eigen::Index>(static_cast<std::size_t>(k) % dims);
        centers(k, axis) = 5.0 * (k + 1);
    }
    return centers;
}

TabularDataset make_blobs(std::size_t n, std::size_t dims, int num_classes, double spread, std::uint64_t seed) {
    if (num_classes < 1 || dims < 1 || n < static_cast<std::size_t>(num_classes)) {
        throw DataError("make_blobs: need n >= K >= 1 and dims >= 1");
    }
    const Matrix centers = blob_centers(dims, num_classes);
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    TabularDataset ds;
    ds.name = "blobs";
    ds.num_classes = num_classes;
    for (int k = 0; k < num_classes; ++k) ds.class_names.push_back(std::to_string(k));
    for (std::size_t j = 0; j < dims; ++j) ds.feature_names.push_back("x" + std::to_string(j));
    ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
    ds.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int k = static_cast<int>(i % static_cast<std::size_t>(num_classes));
        ds.labels[i] = k;
        for (std::size_t j = 0; j < dims; ++j) {
            const auto r = static_cast<Eigen::Index>(i);
            const auto c = static_cast<Eigen::Index>(j);
            ds.features(r, c) = centers(k, c) + (spread > 0.0 ? spread * noise(rng) : 0.0);
        }
    }
    return ds;
}

}  // namespace liit
