#pragma once

#include "aircast/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aircast::neural {

using Matrix = Eigen::MatrixXd;

// Batches are [batch x (steps * channels)] with position-major, channel-minor
// columns, so a window of consecutive positions is a contiguous column block.

enum class Activation { Tanh, Relu };

std::string_view to_string(Activation activation);
Activation activation_from_string(std::string_view text);

struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;
};

/// Glorot-uniform fill: U(-l, l), l = sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Matrix& weights, double fan_in, double fan_out, std::mt19937_64& rng);

class Dense {
public:
    Dense(std::size_t inputs, std::size_t outputs);

    Matrix forward(const Matrix& input);
    /// Sets parameter gradients and returns d loss / d input.
    Matrix backward(const Matrix& grad_output);

    Parameter weight;  // [inputs x outputs]
    Parameter bias;    // [1 x outputs]

private:
    Matrix input_;
};

class Relu {
public:
    Matrix forward(const Matrix& input);
    Matrix backward(const Matrix& grad_output) const;

private:
    Matrix input_;
};

/// Valid cross-correlation along the sequence axis, stride 1.
class Conv1D {
public:
    Conv1D(std::size_t length, std::size_t channels, std::size_t filters, std::size_t kernel);

    std::size_t output_length() const { return length_ - kernel_size_ + 1; }
    std::size_t filters() const { return filters_; }

    Matrix forward(const Matrix& input);  // -> [batch x (output_length * filters)]
    Matrix backward(const Matrix& grad_output);

    Parameter kernel;  // [(kernel * channels) x filters], row = offset * channels + channel
    Parameter bias;    // [1 x filters]

private:
    std::size_t length_;
    std::size_t channels_;
    std::size_t filters_;
    std::size_t kernel_size_;
    Matrix patches_;  // [(batch * output_length) x (kernel * channels)]
};

/// Non-overlapping max pooling; a trailing remainder shorter than the pool is dropped.
class MaxPool1D {
public:
    MaxPool1D(std::size_t length, std::size_t channels, std::size_t pool);

    std::size_t output_length() const { return length_ / pool_; }

    Matrix forward(const Matrix& input);
    Matrix backward(const Matrix& grad_output) const;

private:
    std::size_t length_;
    std::size_t channels_;
    std::size_t pool_;
    Eigen::Index input_cols_ = 0;
    std::vector<Eigen::Index> argmax_;  // per output element, flat input column
};

/// Single LSTM layer, gate order (input, forget, candidate, output). Gates
/// use the logistic sigmoid; the candidate and the cell output use the
/// configured activation. Zero initial hidden and cell state.
class Lstm {
public:
    Lstm(std::size_t steps, std::size_t features, std::size_t units, Activation activation,
         bool return_sequences = false, double cell_clip = 50.0);

    std::size_t units() const { return units_; }

    /// -> [batch x units], or [batch x (steps * units)] with return_sequences.
    Matrix forward(const Matrix& input);
    Matrix backward(const Matrix& grad_output);

    /// Cell entries clamped to [-cell_clip, cell_clip] since construction.
    std::size_t clip_events() const { return clip_events_; }

    Parameter kernel;     // [features x 4 units]
    Parameter recurrent;  // [units x 4 units]
    Parameter bias;       // [1 x 4 units]

private:
    std::size_t steps_;
    std::size_t features_;
    std::size_t units_;
    Activation activation_;
    bool return_sequences_;
    double cell_clip_;
    std::size_t clip_events_ = 0;

    struct Step {
        Matrix input;      // x_t
        Matrix gates;      // activated [i f g o]
        Matrix candidate_pre;
        Matrix cell;       // c_t after clipping
        Matrix cell_act;   // act(c_t)
        Matrix clip_mask;  // 1 where c_t was not clipped
    };
    std::vector<Step> cache_;
    std::vector<Matrix> hidden_;  // h_0 .. h_T, h_0 = 0
};

/// Mean absolute error over all entries; writes sign(pred - target) / n to grad.
double mae_loss(const Matrix& prediction, const Matrix& target, Matrix* grad = nullptr);

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<Matrix> first_moment;
    std::vector<Matrix> second_moment;
    std::size_t step = 0;
};

/// Bias-corrected Adam update using each parameter's grad.
void adam_step(const AdamConfig& config, AdamState& state, std::span<Parameter* const> parameters);

// ---------------------------------------------------------------------------
// Networks

enum class NetworkKind { Lstm, Cnn1d };

std::string_view to_string(NetworkKind kind);
NetworkKind network_kind_from_string(std::string_view text);

struct NetworkSpec {
    NetworkKind kind = NetworkKind::Lstm;
    std::size_t lstm_units = 128;
    Activation lstm_activation = Activation::Tanh;
    std::size_t conv_filters = 128;
    std::size_t conv_kernel = 2;
    std::size_t pool_size = 2;
    std::size_t dense_hidden = 64;
    std::size_t lookback = 1;
    std::uint64_t seed = 42;
    std::size_t batch_size = 32;
    std::size_t epochs = 200;
    AdamConfig adam;
    bool forget_bias_one = true;
    double cell_clip = 50.0;

    /// Throws ConfigError on zero counts or a too-short CNN sequence.
    void validate(std::size_t n_features) const;
    std::string label() const;
};

/// lstm: one LSTM layer then Dense(1).
/// cnn1d: Conv1D(relu) -> MaxPool1D -> Flatten -> Dense(hidden, relu) -> Dense(1).
/// With lookback 1 the CNN reads the feature vector as a one-channel
/// sequence; otherwise the window is the sequence and features are channels.
class Network {
public:
    Network(const NetworkSpec& spec, std::size_t n_features);

    std::size_t input_width() const { return spec_.lookback * n_features_; }
    const NetworkSpec& spec() const { return spec_; }

    Matrix forward(const Matrix& input);  // -> [batch x 1]
    void backward(const Matrix& grad_output);
    std::vector<Parameter*> parameters();
    std::size_t clip_events() const;

private:
    struct LstmStack {
        Lstm lstm;
        Dense head;
    };
    struct CnnStack {
        Conv1D conv;
        Relu conv_act;
        MaxPool1D pool;
        Dense hidden;
        Relu hidden_act;
        Dense head;
    };

    NetworkSpec spec_;
    std::size_t n_features_;
    std::variant<LstmStack, CnnStack> stack_;
};

/// Row t holds rows [t, t + lookback) of `rows`, flattened position-major.
Matrix make_windows(const Matrix& rows, std::size_t lookback);

struct NamedTensor {
    std::string name;
    Matrix value;
};

struct NetworkFit {
    NetworkSpec spec;
    std::size_t n_features = 0;
    std::vector<NamedTensor> parameters;
    std::vector<double> train_loss_history;       // per epoch, scaled units
    std::vector<double> validation_loss_history;  // per epoch, empty without validation data
    dataset::ScalerState feature_scaler;
    dataset::ScalerState target_scaler;
    std::size_t clip_events = 0;

    Network restore() const;
};

/// Features already passed through apply_minmax with `scaler`.
struct ScaledFeatures {
    Matrix values;  // [days x features]
    dataset::ScalerState scaler;
};

struct ScaledTarget {
    std::vector<double> values;
    dataset::ScalerState scaler;
};

/// Day-aligned scaled features and target. Sample t (t >= lookback - 1)
/// maps features of days [t - lookback + 1, t] to the target of day t.
struct TrainingSet {
    ScaledFeatures features;
    ScaledTarget target;
};

TrainingSet scale_training_set(const dataset::DailyDataset& data, const dataset::ScalerState& feature_scaler,
                               const dataset::ScalerState& target_scaler);

NetworkFit build_and_train(const NetworkSpec& spec, const TrainingSet& train,
                           const std::optional<TrainingSet>& validation = std::nullopt);

/// One training run up to the largest budget, snapshotted after each listed
/// epoch count. Each snapshot equals build_and_train with that many epochs.
std::vector<NetworkFit> train_checkpoints(const NetworkSpec& spec, const TrainingSet& train,
                                          const std::optional<TrainingSet>& validation,
                                          std::span<const std::size_t> epoch_budgets);

/// One prediction per window, in target units (inverse min-max transformed).
/// Throws StateMismatchError when `features` was scaled with another state.
std::vector<double> predict_network(const NetworkFit& fit, const ScaledFeatures& features);

/// Versioned binary: magic, format version, JSON header (spec, shapes,
/// scalers, histories), then little-endian float64 parameter payload.
void save_network(const NetworkFit& fit, std::ostream& out);
NetworkFit load_network(std::istream& in);

} // namespace aircast::neural
