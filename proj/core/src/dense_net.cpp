#include "liit/dense_net.hpp"

#include "json_util.hpp"
#include "liit/error.hpp"
#include "liit/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace liit {
namespace {

constexpr double kLogClamp = 1e-12;
constexpr int kModelFormatVersion = 1;

struct Activations {
    Matrix z1, a1, a2, proba;
};

Activations run_forward(const Parameters& p, const Matrix& X) {
    Activations act;
    act.z1 = (X * p.w1).rowwise() + p.b1;
    act.a1 = act.z1.cwiseMax(0.0);
    act.a2 = ((act.a1 * p.w2).rowwise() + p.b2).array().tanh().matrix();
    Matrix logits = (act.a2 * p.w3).rowwise() + p.b3;
    const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
    logits.colwise() -= row_max;
    act.proba = logits.array().exp().matrix();
    const Eigen::VectorXd row_sum = act.proba.rowwise().sum();
    for (Eigen::Index i = 0; i < act.proba.rows(); ++i) act.proba.row(i) /= row_sum(i);
    return act;
}

double cross_entropy(const Matrix& proba, std::span<const int> y) {
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        total -= std::log(std::max(proba(static_cast<Eigen::Index>(i), y[i]), kLogClamp));
    }
    return y.empty() ? 0.0 : total / static_cast<double>(y.size());
}

void check_input(const DenseNet& net, const Matrix& X) {
    if (static_cast<std::size_t>(X.cols()) != net.config.input_dim) {
        throw DataError("dense-net: input has " + std::to_string(X.cols()) + " columns, expected " +
                        std::to_string(net.config.input_dim));
    }
}

void check_labels(const DenseNet& net, const Matrix& X, std::span<const int> y) {
    if (y.size() != static_cast<std::size_t>(X.rows())) throw DataError("dense-net: label count mismatch");
    for (int v : y) {
        if (v < 0 || v >= net.config.output_dim) throw DataError("dense-net: label out of range");
    }
}

void init_uniform(Matrix& w, Rng& rng) {
    const double limit = std::sqrt(3.0 / static_cast<double>(w.rows()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
}

template <typename T>
void adam_update(T& param, T& m, T& v, const T& grad, const NetConfig& cfg, double bias1, double bias2) {
    m = cfg.adam_beta1 * m + (1.0 - cfg.adam_beta1) * grad;
    v = cfg.adam_beta2 * v + (1.0 - cfg.adam_beta2) * grad.cwiseProduct(grad);
    const double step = cfg.learning_rate * std::sqrt(bias2) / bias1;
    param.array() -= step * m.array() / (v.array().sqrt() + cfg.adam_epsilon * std::sqrt(bias2));
}

void adam_step(DenseNet& net, const Parameters& g, const NetConfig& cfg) {
    ++net.adam_step;
    const double bias1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(net.adam_step));
    const double bias2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(net.adam_step));
    auto& p = net.params;
    auto& m = net.adam_m;
    auto& v = net.adam_v;
    adam_update(p.w1, m.w1, v.w1, g.w1, cfg, bias1, bias2);
    adam_update(p.b1, m.b1, v.b1, g.b1, cfg, bias1, bias2);
    adam_update(p.w2, m.w2, v.w2, g.w2, cfg, bias1, bias2);
    adam_update(p.b2, m.b2, v.b2, g.b2, cfg, bias1, bias2);
    adam_update(p.w3, m.w3, v.w3, g.w3, cfg, bias1, bias2);
    adam_update(p.b3, m.b3, v.b3, g.b3, cfg, bias1, bias2);
}

}  // namespace

void NetConfig::validate() const {
    if (input_dim < 1 || hidden1 < 1 || hidden2 < 1 || output_dim < 1) throw ConfigError("net: dimensions must be >= 1");
    if (max_epochs < 1) throw ConfigError("net.max_epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("net.batch_size must be >= 1");
    if (patience < 1) throw ConfigError("net.patience must be >= 1");
    if (!(loss_floor > 0.0)) throw ConfigError("net.loss_floor must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("net.learning_rate must be positive");
}

Parameters Parameters::zeros_like(const Parameters& p) {
    return {Matrix::Zero(p.w1.rows(), p.w1.cols()), RowVector::Zero(p.b1.size()),
            Matrix::Zero(p.w2.rows(), p.w2.cols()), RowVector::Zero(p.b2.size()),
            Matrix::Zero(p.w3.rows(), p.w3.cols()), RowVector::Zero(p.b3.size())};
}

bool Parameters::all_finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite() && w3.allFinite() && b3.allFinite();
}

DenseNet::DenseNet(const NetConfig& cfg) : config(cfg) {
    cfg.validate();
    const auto d = static_cast<Eigen::Index>(cfg.input_dim);
    const auto h1 = static_cast<Eigen::Index>(cfg.hidden1);
    const auto h2 = static_cast<Eigen::Index>(cfg.hidden2);
    const auto k = static_cast<Eigen::Index>(cfg.output_dim);
    params.w1.resize(d, h1);
    params.w2.resize(h1, h2);
    params.w3.resize(h2, k);
    Rng rng(derive_seed({cfg.seed, 0x1417ULL}));
    init_uniform(params.w1, rng);
    init_uniform(params.w2, rng);
    init_uniform(params.w3, rng);
    params.b1 = RowVector::Zero(h1);
    params.b2 = RowVector::Zero(h2);
    params.b3 = RowVector::Zero(k);
    adam_m = Parameters::zeros_like(params);
    adam_v = Parameters::zeros_like(params);
}

Matrix forward(const DenseNet& net, const Matrix& X) {
    check_input(net, X);
    return run_forward(net.params, X).proba;
}

double loss(const DenseNet& net, const Matrix& X, std::span<const int> y) {
    check_input(net, X);
    check_labels(net, X, y);
    return cross_entropy(run_forward(net.params, X).proba, y);
}

LossAndGrads loss_and_grads(const DenseNet& net, const Matrix& X, std::span<const int> y) {
    check_input(net, X);
    check_labels(net, X, y);
    const auto& p = net.params;
    const auto act = run_forward(p, X);
    const auto m = static_cast<double>(X.rows());

    LossAndGrads out;
    out.loss = cross_entropy(act.proba, y);

    Matrix dlogits = act.proba;
    for (std::size_t i = 0; i < y.size(); ++i) dlogits(static_cast<Eigen::Index>(i), y[i]) -= 1.0;
    dlogits /= m;

    out.grads.w3 = act.a2.transpose() * dlogits;
    out.grads.b3 = dlogits.colwise().sum();
    Matrix dz2 = (dlogits * p.w3.transpose()).cwiseProduct((1.0 - act.a2.array().square()).matrix());
    out.grads.w2 = act.a1.transpose() * dz2;
    out.grads.b2 = dz2.colwise().sum();
    Matrix dz1 = (dz2 * p.w2.transpose()).cwiseProduct((act.z1.array() > 0.0).cast<double>().matrix());
    out.grads.w1 = X.transpose() * dz1;
    out.grads.b1 = dz1.colwise().sum();
    return out;
}

TrainOutcome train_batches(DenseNet& net, const TabularDataset& train, std::span<const RowIndex> rows,
                           const TabularDataset& validation, const NetConfig& cfg) {
    cfg.validate();
    if (cfg.input_dim != net.config.input_dim || cfg.output_dim != net.config.output_dim ||
        cfg.hidden1 != net.config.hidden1 || cfg.hidden2 != net.config.hidden2) {
        throw ConfigError("train_batches: config shape does not match the net");
    }
    check_input(net, train.features);
    check_labels(net, train.features, train.labels);
    const bool has_validation = validation.rows() > 0;
    if (has_validation) check_labels(net, validation.features, validation.labels);

    std::vector<RowIndex> order;
    if (rows.empty()) {
        order.resize(train.rows());
        std::iota(order.begin(), order.end(), RowIndex{0});
    } else {
        order.assign(rows.begin(), rows.end());
        for (RowIndex r : order) {
            if (r >= train.rows()) throw DataError("train_batches: row index out of range");
        }
    }
    if (order.empty()) throw DataError("train_batches: empty training set");

    const auto start = std::chrono::steady_clock::now();
    const auto d = train.features.cols();
    const std::size_t batch = std::min(cfg.batch_size, order.size());
    Matrix xb(static_cast<Eigen::Index>(batch), d);
    std::vector<int> yb(batch);

    TrainOutcome outcome;
    double best = std::numeric_limits<double>::infinity();
    int stale = 0;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        Rng rng(derive_seed({cfg.seed, 0xe90cULL, static_cast<std::uint64_t>(net.epochs_trained)}));
        std::shuffle(order.begin(), order.end(), rng);

        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += batch) {
            const std::size_t count = std::min(batch, order.size() - begin);
            if (static_cast<std::size_t>(xb.rows()) != count) {
                xb.resize(static_cast<Eigen::Index>(count), d);
                yb.resize(count);
            }
            for (std::size_t i = 0; i < count; ++i) {
                const auto r = order[begin + i];
                xb.row(static_cast<Eigen::Index>(i)) = train.features.row(static_cast<Eigen::Index>(r));
                yb[i] = train.labels[r];
            }
            const auto lg = loss_and_grads(net, xb, yb);
            loss_sum += lg.loss * static_cast<double>(count);
            adam_step(net, lg.grads, cfg);
        }
        ++net.epochs_trained;
        ++outcome.epochs_run;
        if (!net.params.all_finite()) throw Error("train_batches: parameters became non-finite");

        outcome.train_loss = loss_sum / static_cast<double>(order.size());
        const double monitored =
            has_validation ? cross_entropy(run_forward(net.params, validation.features).proba, validation.labels)
                           : outcome.train_loss;
        outcome.validation_loss = has_validation ? monitored : std::numeric_limits<double>::quiet_NaN();
        if (monitored <= cfg.loss_floor) {
            outcome.converged = true;
            break;
        }
        if (!has_validation) continue;
        if (monitored < best - cfg.loss_floor) {
            best = monitored;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            outcome.converged = true;
            break;
        }
    }
    outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return outcome;
}

TrainOutcome train_batches(DenseNet& net, const TabularDataset& train, const TabularDataset& validation,
                           const NetConfig& cfg) {
    return train_batches(net, train, std::span<const RowIndex>{}, validation, cfg);
}

std::vector<int> argmax_rows(const Matrix& proba) {
    std::vector<int> out(static_cast<std::size_t>(proba.rows()), 0);
    for (Eigen::Index i = 0; i < proba.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < proba.cols(); ++k) {
            if (proba(i, k) > proba(i, best)) best = k;
        }
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

std::vector<int> predict(const DenseNet& net, const Matrix& X) { return argmax_rows(forward(net, X)); }

std::string to_json(const DenseNet& net) {
    nlohmann::ordered_json j;
    j["format"] = "liit-dense-net";
    j["version"] = kModelFormatVersion;
    j["config"] = net.config;
    j["seed"] = net.config.seed;
    j["epochs_trained"] = net.epochs_trained;
    j["adam_step"] = net.adam_step;
    j["layers"] = nlohmann::ordered_json::array();
    const std::pair<const Matrix*, const RowVector*> layers[] = {
        {&net.params.w1, &net.params.b1}, {&net.params.w2, &net.params.b2}, {&net.params.w3, &net.params.b3}};
    for (const auto& [w, b] : layers) {
        nlohmann::ordered_json layer;
        layer["rows"] = w->rows();
        layer["cols"] = w->cols();
        layer["weights"] = std::vector<double>(w->data(), w->data() + w->size());
        layer["bias"] = std::vector<double>(b->data(), b->data() + b->size());
        j["layers"].push_back(std::move(layer));
    }
    return j.dump(1);
}

DenseNet net_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model: invalid JSON: ") + e.what());
    }
    if (j.value("format", "") != "liit-dense-net") throw DataError("model: not a liit-dense-net blob");
    if (j.value("version", 0) != kModelFormatVersion) throw DataError("model: unsupported version");
    DenseNet net(j.at("config").get<NetConfig>());
    net.epochs_trained = j.value("epochs_trained", 0);
    net.adam_step = j.value("adam_step", std::int64_t{0});
    const auto& layers = j.at("layers");
    if (layers.size() != 3) throw DataError("model: expected 3 layers");
    std::pair<Matrix*, RowVector*> targets[] = {
        {&net.params.w1, &net.params.b1}, {&net.params.w2, &net.params.b2}, {&net.params.w3, &net.params.b3}};
    for (std::size_t l = 0; l < 3; ++l) {
        auto& [w, b] = targets[l];
        const auto weights = layers[l].at("weights").get<std::vector<double>>();
        const auto bias = layers[l].at("bias").get<std::vector<double>>();
        if (layers[l].at("rows").get<Eigen::Index>() != w->rows() ||
            layers[l].at("cols").get<Eigen::Index>() != w->cols() ||
            weights.size() != static_cast<std::size_t>(w->size()) || bias.size() != static_cast<std::size_t>(b->size())) {
            throw DataError("model: layer " + std::to_string(l) + " shape mismatch");
        }
        std::copy(weights.begin(), weights.end(), w->data());
        std::copy(bias.begin(), bias.end(), b->data());
    }
    return net;
}

void save_model(const DenseNet& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file " + path.string());
    out << to_json(net) << '\n';
}

DenseNet load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return net_from_json(buf.str());
}

}  // namespace liit
