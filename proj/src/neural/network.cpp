#include "aircast/neural.hpp"

#include "aircast/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aircast::neural {

namespace {

constexpr std::uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

std::size_t cnn_length(const NetworkSpec& spec, std::size_t n_features) {
    return spec.lookback == 1 ? n_features : spec.lookback;
}

std::size_t cnn_channels(const NetworkSpec& spec, std::size_t n_features) {
    return spec.lookback == 1 ? 1 : n_features;
}

void rename(Parameter& p, std::string_view layer) {
    p.name = std::string(layer) + "." + p.name;
}

Matrix gather_rows(const Matrix& source, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), source.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = source.row(static_cast<Eigen::Index>(rows[i]));
    }
    return out;
}

struct Samples {
    Matrix inputs;
    Matrix targets;  // [samples x 1]
};

Samples windowed(const TrainingSet& set, std::size_t lookback) {
    const auto days = static_cast<std::size_t>(set.features.values.rows());
    if (days != set.target.values.size()) {
        throw ShapeError("feature rows and target length differ");
    }
    if (days < lookback) {
        throw ShapeError("fewer days (" + std::to_string(days) + ") than the lookback window (" +
                         std::to_string(lookback) + ")");
    }
    Samples s;
    s.inputs = make_windows(set.features.values, lookback);
    s.targets.resize(s.inputs.rows(), 1);
    for (Eigen::Index i = 0; i < s.inputs.rows(); ++i) {
        s.targets(i, 0) = set.target.values[static_cast<std::size_t>(i) + lookback - 1];
    }
    return s;
}

double evaluate_mae(Network& net, const Samples& samples, std::size_t batch) {
    double total = 0.0;
    const auto n = samples.inputs.rows();
    for (Eigen::Index begin = 0; begin < n; begin += static_cast<Eigen::Index>(batch)) {
        const auto rows = std::min<Eigen::Index>(static_cast<Eigen::Index>(batch), n - begin);
        const Matrix pred = net.forward(samples.inputs.middleRows(begin, rows));
        total += (pred - samples.targets.middleRows(begin, rows)).cwiseAbs().sum();
    }
    return total / static_cast<double>(n);
}

NetworkFit snapshot(Network& net, const NetworkSpec& spec, std::size_t n_features, const TrainingSet& train,
                    std::size_t epochs, const std::vector<double>& train_history,
                    const std::vector<double>& validation_history) {
    NetworkFit fit;
    fit.spec = spec;
    fit.spec.epochs = epochs;
    fit.n_features = n_features;
    for (Parameter* p : net.parameters()) {
        fit.parameters.push_back({p->name, p->value});
    }
    fit.train_loss_history.assign(train_history.begin(), train_history.begin() + static_cast<long>(epochs));
    if (!validation_history.empty()) {
        fit.validation_loss_history.assign(validation_history.begin(),
                                           validation_history.begin() + static_cast<long>(epochs));
    }
    fit.feature_scaler = train.features.scaler;
    fit.target_scaler = train.target.scaler;
    fit.clip_events = net.clip_events();
    return fit;
}

} // namespace

std::string_view to_string(NetworkKind kind) {
    return kind == NetworkKind::Lstm ? "lstm" : "cnn1d";
}

NetworkKind network_kind_from_string(std::string_view text) {
    if (text == "lstm") {
        return NetworkKind::Lstm;
    }
    if (text == "cnn" || text == "cnn1d") {
        return NetworkKind::Cnn1d;
    }
    throw ConfigError("unknown network kind '" + std::string(text) + "'");
}

void NetworkSpec::validate(std::size_t n_features) const {
    if (n_features == 0) {
        throw ConfigError("network needs at least one input feature");
    }
    if (lookback == 0 || batch_size == 0 || epochs == 0) {
        throw ConfigError("lookback, batch size and epochs must be at least 1");
    }
    if (kind == NetworkKind::Lstm) {
        if (lstm_units == 0) {
            throw ConfigError("lstm_units must be at least 1");
        }
        if (!(cell_clip > 0.0)) {
            throw ConfigError("cell_clip must be positive");
        }
        return;
    }
    if (conv_filters == 0 || conv_kernel == 0 || pool_size == 0 || dense_hidden == 0) {
        throw ConfigError("convolution filters, kernel, pool and dense sizes must be at least 1");
    }
    const std::size_t length = cnn_length(*this, n_features);
    if (length < conv_kernel + pool_size - 1) {
        throw ConfigError("cnn1d sequence length " + std::to_string(length) + " is shorter than kernel + pool - 1 = " +
                          std::to_string(conv_kernel + pool_size - 1));
    }
}

std::string NetworkSpec::label() const {
    std::string out(to_string(kind));
    if (kind == NetworkKind::Lstm) {
        out += " units=" + std::to_string(lstm_units) + " act=" + std::string(to_string(lstm_activation));
    } else {
        out += " filters=" + std::to_string(conv_filters) + " kernel=" + std::to_string(conv_kernel) +
               " pool=" + std::to_string(pool_size) + " hidden=" + std::to_string(dense_hidden);
    }
    out += " epochs=" + std::to_string(epochs) + " lookback=" + std::to_string(lookback);
    return out;
}

// ---------------------------------------------------------------------------

Network::Network(const NetworkSpec& spec, std::size_t n_features)
    : spec_(spec),
      n_features_(n_features),
      stack_([&]() -> std::variant<LstmStack, CnnStack> {
          spec.validate(n_features);
          if (spec.kind == NetworkKind::Lstm) {
              return LstmStack{Lstm(spec.lookback, n_features, spec.lstm_units, spec.lstm_activation, false,
                                    spec.cell_clip),
                               Dense(spec.lstm_units, 1)};
          }
          const std::size_t length = cnn_length(spec, n_features);
          const std::size_t channels = cnn_channels(spec, n_features);
          Conv1D conv(length, channels, spec.conv_filters, spec.conv_kernel);
          MaxPool1D pool(conv.output_length(), spec.conv_filters, spec.pool_size);
          const std::size_t flat = pool.output_length() * spec.conv_filters;
          return CnnStack{std::move(conv), Relu{}, std::move(pool), Dense(flat, spec.dense_hidden), Relu{},
                          Dense(spec.dense_hidden, 1)};
      }()) {
    std::mt19937_64 rng(spec.seed);
    if (auto* s = std::get_if<LstmStack>(&stack_)) {
        const auto f = static_cast<double>(n_features);
        const auto u = static_cast<double>(spec.lstm_units);
        glorot_uniform(s->lstm.kernel.value, f, 4.0 * u, rng);
        glorot_uniform(s->lstm.recurrent.value, u, 4.0 * u, rng);
        if (spec.forget_bias_one) {
            s->lstm.bias.value.middleCols(static_cast<Eigen::Index>(spec.lstm_units),
                                          static_cast<Eigen::Index>(spec.lstm_units))
                .setOnes();
        }
        glorot_uniform(s->head.weight.value, u, 1.0, rng);
        rename(s->lstm.kernel, "lstm");
        rename(s->lstm.recurrent, "lstm");
        rename(s->lstm.bias, "lstm");
        rename(s->head.weight, "output");
        rename(s->head.bias, "output");
    } else {
        auto& c = std::get<CnnStack>(stack_);
        const auto k = static_cast<double>(spec.conv_kernel);
        const auto channels = static_cast<double>(cnn_channels(spec, n_features));
        glorot_uniform(c.conv.kernel.value, k * channels, k * static_cast<double>(spec.conv_filters), rng);
        glorot_uniform(c.hidden.weight.value, static_cast<double>(c.hidden.weight.value.rows()),
                       static_cast<double>(spec.dense_hidden), rng);
        glorot_uniform(c.head.weight.value, static_cast<double>(spec.dense_hidden), 1.0, rng);
        rename(c.conv.kernel, "conv");
        rename(c.conv.bias, "conv");
        rename(c.hidden.weight, "hidden");
        rename(c.hidden.bias, "hidden");
        rename(c.head.weight, "output");
        rename(c.head.bias, "output");
    }
}

Matrix Network::forward(const Matrix& input) {
    if (static_cast<std::size_t>(input.cols()) != input_width()) {
        throw ShapeError("network expects " + std::to_string(input_width()) + " input columns, got " +
                         std::to_string(input.cols()));
    }
    if (auto* s = std::get_if<LstmStack>(&stack_)) {
        return s->head.forward(s->lstm.forward(input));
    }
    auto& c = std::get<CnnStack>(stack_);
    Matrix x = c.conv_act.forward(c.conv.forward(input));
    x = c.pool.forward(x);
    x = c.hidden_act.forward(c.hidden.forward(x));
    return c.head.forward(x);
}

void Network::backward(const Matrix& grad_output) {
    if (auto* s = std::get_if<LstmStack>(&stack_)) {
        s->lstm.backward(s->head.backward(grad_output));
        return;
    }
    auto& c = std::get<CnnStack>(stack_);
    Matrix g = c.head.backward(grad_output);
    g = c.hidden.backward(c.hidden_act.backward(g));
    g = c.pool.backward(g);
    c.conv.backward(c.conv_act.backward(g));
}

std::vector<Parameter*> Network::parameters() {
    if (auto* s = std::get_if<LstmStack>(&stack_)) {
        return {&s->lstm.kernel, &s->lstm.recurrent, &s->lstm.bias, &s->head.weight, &s->head.bias};
    }
    auto& c = std::get<CnnStack>(stack_);
    return {&c.conv.kernel, &c.conv.bias, &c.hidden.weight, &c.hidden.bias, &c.head.weight, &c.head.bias};
}

std::size_t Network::clip_events() const {
    if (const auto* s = std::get_if<LstmStack>(&stack_)) {
        return s->lstm.clip_events();
    }
    return 0;
}

// ---------------------------------------------------------------------------

Matrix make_windows(const Matrix& rows, std::size_t lookback) {
    if (lookback == 0) {
        throw ShapeError("lookback must be at least 1");
    }
    const auto n = rows.rows();
    const auto lb = static_cast<Eigen::Index>(lookback);
    if (n < lb) {
        return Matrix(0, lb * rows.cols());
    }
    const auto f = rows.cols();
    Matrix out(n - lb + 1, lb * f);
    for (Eigen::Index t = 0; t + lb <= n; ++t) {
        for (Eigen::Index k = 0; k < lb; ++k) {
            out.row(t).segment(k * f, f) = rows.row(t + k);
        }
    }
    return out;
}

TrainingSet scale_training_set(const dataset::DailyDataset& data, const dataset::ScalerState& feature_scaler,
                               const dataset::ScalerState& target_scaler) {
    if (target_scaler.columns() != 1) {
        throw StateMismatchError("target scaler must have exactly one column");
    }
    TrainingSet set;
    set.features.values = dataset::apply_minmax(feature_scaler, data.features, data.feature_names);
    set.features.scaler = feature_scaler;
    set.target.values = dataset::apply_minmax(target_scaler, data.target, target_scaler.labels.front());
    set.target.scaler = target_scaler;
    return set;
}

std::vector<NetworkFit> train_checkpoints(const NetworkSpec& spec, const TrainingSet& train,
                                          const std::optional<TrainingSet>& validation,
                                          std::span<const std::size_t> epoch_budgets) {
    if (epoch_budgets.empty()) {
        throw ConfigError("at least one epoch budget is required");
    }
    const auto n_features = static_cast<std::size_t>(train.features.values.cols());
    const std::size_t max_epochs = *std::max_element(epoch_budgets.begin(), epoch_budgets.end());
    NetworkSpec run_spec = spec;
    run_spec.epochs = max_epochs;
    run_spec.validate(n_features);
    if (std::find(epoch_budgets.begin(), epoch_budgets.end(), 0) != epoch_budgets.end()) {
        throw ConfigError("epoch budgets must be at least 1");
    }

    const Samples samples = windowed(train, spec.lookback);
    if (samples.inputs.rows() == 0) {
        throw EmptyInputError("no training windows");
    }
    std::optional<Samples> held_out;
    if (validation && validation->features.values.rows() >= static_cast<Eigen::Index>(spec.lookback)) {
        if (validation->features.scaler != train.features.scaler ||
            validation->target.scaler != train.target.scaler) {
            throw StateMismatchError("validation data was scaled with a different state");
        }
        held_out = windowed(*validation, spec.lookback);
    }

    Network net(run_spec, n_features);
    const std::vector<Parameter*> params = net.parameters();
    AdamState adam;
    std::mt19937_64 shuffle_rng(spec.seed ^ kShuffleStream);

    const auto n = static_cast<std::size_t>(samples.inputs.rows());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> train_history;
    std::vector<double> validation_history;
    std::vector<NetworkFit> fits(epoch_budgets.size());

    Matrix grad;
    for (std::size_t epoch = 1; epoch <= max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double weighted = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t begin = 0; begin < n; begin += spec.batch_size, ++batch_index) {
            const std::size_t count = std::min(spec.batch_size, n - begin);
            const std::span<const std::size_t> rows(order.data() + begin, count);
            const Matrix x = gather_rows(samples.inputs, rows);
            const Matrix y = gather_rows(samples.targets, rows);
            const double loss = mae_loss(net.forward(x), y, &grad);
            if (!std::isfinite(loss)) {
                throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                      std::to_string(batch_index));
            }
            net.backward(grad);
            adam_step(spec.adam, adam, params);
            weighted += loss * static_cast<double>(count);
        }
        train_history.push_back(weighted / static_cast<double>(n));
        if (held_out) {
            validation_history.push_back(evaluate_mae(net, *held_out, 256));
        }
        for (std::size_t k = 0; k < epoch_budgets.size(); ++k) {
            if (epoch_budgets[k] == epoch) {
                fits[k] = snapshot(net, spec, n_features, train, epoch, train_history, validation_history);
            }
        }
    }
    return fits;
}

NetworkFit build_and_train(const NetworkSpec& spec, const TrainingSet& train,
                           const std::optional<TrainingSet>& validation) {
    const std::size_t budget = spec.epochs;
    return std::move(train_checkpoints(spec, train, validation, std::span(&budget, 1)).front());
}

Network NetworkFit::restore() const {
    Network net(spec, n_features);
    const std::vector<Parameter*> params = net.parameters();
    if (params.size() != parameters.size()) {
        throw ShapeError("stored parameter count does not match the architecture");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const NamedTensor& stored = parameters[i];
        Parameter& target = *params[i];
        if (stored.name != target.name || stored.value.rows() != target.value.rows() ||
            stored.value.cols() != target.value.cols()) {
            throw ShapeError("stored parameter '" + stored.name + "' does not match '" + target.name + "'");
        }
        target.value = stored.value;
    }
    return net;
}

std::vector<double> predict_network(const NetworkFit& fit, const ScaledFeatures& features) {
    if (features.scaler != fit.feature_scaler) {
        throw StateMismatchError("features were scaled with a different scaler state than the network was trained on");
    }
    if (static_cast<std::size_t>(features.values.cols()) != fit.n_features) {
        throw ShapeError("expected " + std::to_string(fit.n_features) + " feature columns");
    }
    Network net = fit.restore();
    const Matrix windows = make_windows(features.values, fit.spec.lookback);
    std::vector<double> scaled(static_cast<std::size_t>(windows.rows()));
    constexpr Eigen::Index kChunk = 256;
    for (Eigen::Index begin = 0; begin < windows.rows(); begin += kChunk) {
        const auto rows = std::min(kChunk, windows.rows() - begin);
        const Matrix out = net.forward(windows.middleRows(begin, rows));
        for (Eigen::Index i = 0; i < rows; ++i) {
            scaled[static_cast<std::size_t>(begin + i)] = out(i, 0);
        }
    }
    return dataset::invert_minmax(fit.target_scaler, scaled, fit.target_scaler.labels.front());
}

} // namespace aircast::neural
