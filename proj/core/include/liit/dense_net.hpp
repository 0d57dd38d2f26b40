#pragma once

#include "liit/dataset.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace liit {

using RowVector = Eigen::RowVectorXd;

struct NetConfig {
    std::size_t input_dim = 0;
    std::size_t hidden1 = 64;
    std::size_t hidden2 = 32;
    int output_dim = 0;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    int max_epochs = 180;
    int patience = 5;
    /// Validation loss at or below this counts as converged; also the
    /// minimum improvement that resets patience.
    double loss_floor = 1e-6;
    std::uint64_t seed = 0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    void validate() const;
};

/// Weights and biases of the three dense layers. Also used for gradients
/// and the optimizer's moment estimates, which share the same shapes.
struct Parameters {
    Matrix w1;  ///< input_dim x hidden1
    RowVector b1;
    Matrix w2;  ///< hidden1 x hidden2
    RowVector b2;
    Matrix w3;  ///< hidden2 x output_dim
    RowVector b3;

    static Parameters zeros_like(const Parameters& p);
    [[nodiscard]] bool all_finite() const;
};

/// ReLU -> tanh -> softmax classifier with Adam state.
struct DenseNet {
    NetConfig config;
    Parameters params;
    Parameters adam_m;
    Parameters adam_v;
    std::int64_t adam_step = 0;
    /// Epochs trained over the lifetime of this net (across train_batches calls).
    int epochs_trained = 0;

    explicit DenseNet(const NetConfig& cfg);
};

struct TrainOutcome {
    int epochs_run = 0;
    double train_loss = 0.0;
    double validation_loss = 0.0;
    bool converged = false;
    double wall_seconds = 0.0;
};

struct LossAndGrads {
    double loss = 0.0;
    Parameters grads;
};

/// Row-wise class probabilities.
Matrix forward(const DenseNet& net, const Matrix& X);

/// Mean categorical cross-entropy and its exact gradient.
LossAndGrads loss_and_grads(const DenseNet& net, const Matrix& X, std::span<const int> y);

/// Mean cross-entropy only.
double loss(const DenseNet& net, const Matrix& X, std::span<const int> y);

/// Mini-batch Adam training with early stopping on validation loss.
/// `rows` selects (and may repeat) training rows; empty means all rows.
TrainOutcome train_batches(DenseNet& net, const TabularDataset& train, std::span<const RowIndex> rows,
                           const TabularDataset& validation, const NetConfig& cfg);
TrainOutcome train_batches(DenseNet& net, const TabularDataset& train, const TabularDataset& validation,
                           const NetConfig& cfg);

/// Argmax of forward(); ties go to the lowest class id.
std::vector<int> predict(const DenseNet& net, const Matrix& X);
std::vector<int> argmax_rows(const Matrix& proba);

std::string to_json(const DenseNet& net);
DenseNet net_from_json(const std::string& text);
void save_model(const DenseNet& net, const std::filesystem::path& path);
DenseNet load_model(const std::filesystem::path& path);

}  // namespace liit
