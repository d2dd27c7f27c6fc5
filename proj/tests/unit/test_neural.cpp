#include "aircast/error.hpp"
#include "aircast/neural.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

using namespace aircast;
using namespace aircast::neural;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = normal(rng);
    }
    return m;
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(a) + std::abs(b), 1e-3);
}

// Loss = sum(forward(x) .* probe); compares analytic gradients against
// central differences for the input and every parameter.
double gradient_check(const std::function<Matrix(const Matrix&)>& forward,
                      const std::function<Matrix(const Matrix&)>& backward, const std::vector<Parameter*>& params,
                      Matrix x, std::mt19937_64& rng) {
    const Matrix out = forward(x);
    const Matrix probe = random_matrix(out.rows(), out.cols(), rng);
    const Matrix dx = backward(probe);
    std::vector<Matrix> analytic;
    for (Parameter* p : params) {
        analytic.push_back(p->grad);
    }
    const double h = 1e-5;
    const auto loss = [&](const Matrix& input) { return forward(input).cwiseProduct(probe).sum(); };
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double saved = x.data()[i];
        x.data()[i] = saved + h;
        const double up = loss(x);
        x.data()[i] = saved - h;
        const double down = loss(x);
        x.data()[i] = saved;
        worst = std::max(worst, relative_error(dx.data()[i], (up - down) / (2.0 * h)));
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix& value = params[k]->value;
        for (Eigen::Index i = 0; i < value.size(); ++i) {
            const double saved = value.data()[i];
            value.data()[i] = saved + h;
            const double up = loss(x);
            value.data()[i] = saved - h;
            const double down = loss(x);
            value.data()[i] = saved;
            worst = std::max(worst, relative_error(analytic[k].data()[i], (up - down) / (2.0 * h)));
        }
    }
    return worst;
}

TrainingSet make_set(std::uint64_t seed, std::size_t days, std::size_t features) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix x(static_cast<Eigen::Index>(days), static_cast<Eigen::Index>(features));
    std::vector<double> y(days);
    for (std::size_t t = 0; t < days; ++t) {
        double signal = 0.0;
        for (std::size_t f = 0; f < features; ++f) {
            const double v = 50.0 + 20.0 * normal(rng);
            x(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(f)) = v;
            signal += (f % 2 == 0 ? 1.0 : -0.5) * v;
        }
        y[t] = 100.0 + signal + 5.0 * normal(rng);
    }
    std::vector<std::string> labels;
    for (std::size_t f = 0; f < features; ++f) {
        labels.push_back("F" + std::to_string(f));
    }
    TrainingSet set;
    set.features.scaler = dataset::fit_minmax(x, labels);
    set.features.values = dataset::apply_minmax(set.features.scaler, x, labels);
    set.target.scaler = dataset::fit_minmax(y, "PM2.5");
    set.target.values = dataset::apply_minmax(set.target.scaler, y, "PM2.5");
    return set;
}

NetworkSpec small_lstm() {
    NetworkSpec spec;
    spec.kind = NetworkKind::Lstm;
    spec.lstm_units = 6;
    spec.epochs = 5;
    spec.batch_size = 16;
    return spec;
}

NetworkSpec small_cnn() {
    NetworkSpec spec;
    spec.kind = NetworkKind::Cnn1d;
    spec.conv_filters = 4;
    spec.dense_hidden = 5;
    spec.epochs = 5;
    spec.batch_size = 16;
    return spec;
}

} // namespace

TEST_CASE("gradient checks per layer") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        CAPTURE(seed);
        std::mt19937_64 rng(seed);
        {
            Dense layer(4, 3);
            layer.weight.value = random_matrix(4, 3, rng);
            layer.bias.value = random_matrix(1, 3, rng);
            const double err = gradient_check([&](const Matrix& x) { return layer.forward(x); },
                                              [&](const Matrix& g) { return layer.backward(g); },
                                              {&layer.weight, &layer.bias}, random_matrix(5, 4, rng), rng);
            CHECK(err < 1e-4);
        }
        {
            Conv1D layer(6, 2, 3, 2);
            layer.kernel.value = random_matrix(4, 3, rng);
            layer.bias.value = random_matrix(1, 3, rng);
            const double err = gradient_check([&](const Matrix& x) { return layer.forward(x); },
                                              [&](const Matrix& g) { return layer.backward(g); },
                                              {&layer.kernel, &layer.bias}, random_matrix(3, 12, rng), rng);
            CHECK(err < 1e-4);
        }
        {
            MaxPool1D layer(5, 2, 2);
            const double err = gradient_check([&](const Matrix& x) { return layer.forward(x); },
                                              [&](const Matrix& g) { return layer.backward(g); }, {},
                                              random_matrix(3, 10, rng), rng);
            CHECK(err < 1e-4);
        }
        {
            Relu layer;
            const double err = gradient_check([&](const Matrix& x) { return layer.forward(x); },
                                              [&](const Matrix& g) { return layer.backward(g); }, {},
                                              random_matrix(4, 6, rng), rng);
            CHECK(err < 1e-4);
        }
        for (Activation act : {Activation::Tanh, Activation::Relu}) {
            for (bool sequences : {false, true}) {
                CAPTURE(to_string(act));
                Lstm layer(4, 3, 5, act, sequences);
                layer.kernel.value = random_matrix(3, 20, rng, 0.5);
                layer.recurrent.value = random_matrix(5, 20, rng, 0.5);
                layer.bias.value = random_matrix(1, 20, rng, 0.5);
                const double err = gradient_check([&](const Matrix& x) { return layer.forward(x); },
                                                  [&](const Matrix& g) { return layer.backward(g); },
                                                  {&layer.kernel, &layer.recurrent, &layer.bias},
                                                  random_matrix(3, 12, rng), rng);
                CHECK(err < 1e-4);
            }
        }
    }
}

TEST_CASE("gradient checks through whole networks") {
    for (std::uint64_t seed = 11; seed <= 15; ++seed) {
        CAPTURE(seed);
        for (NetworkSpec spec : {small_lstm(), small_cnn()}) {
            for (std::size_t lookback : {1u, 3u}) {
                spec.lookback = lookback;
                spec.seed = seed;
                Network net(spec, 5);
                std::mt19937_64 rng(seed);
                const Matrix x = random_matrix(4, static_cast<Eigen::Index>(net.input_width()), rng, 0.5);
                const Matrix probe = random_matrix(4, 1, rng);
                net.forward(x);
                net.backward(probe);
                const double h = 1e-5;
                double worst = 0.0;
                for (Parameter* p : net.parameters()) {
                    const Matrix analytic = p->grad;
                    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
                        const double saved = p->value.data()[i];
                        p->value.data()[i] = saved + h;
                        const double up = net.forward(x).cwiseProduct(probe).sum();
                        p->value.data()[i] = saved - h;
                        const double down = net.forward(x).cwiseProduct(probe).sum();
                        p->value.data()[i] = saved;
                        worst = std::max(worst, relative_error(analytic.data()[i], (up - down) / (2.0 * h)));
                    }
                }
                CHECK(worst < 1e-4);
            }
        }
    }
}

TEST_CASE("hand-computed layer outputs") {
    Conv1D conv(3, 1, 1, 2);
    conv.kernel.value = Matrix::Ones(2, 1);
    conv.bias.value.setZero();
    Matrix x(1, 3);
    x << 1, 2, 3;
    const Matrix y = conv.forward(x);
    REQUIRE(y.cols() == 2);
    CHECK(y(0, 0) == 3.0);
    CHECK(y(0, 1) == 5.0);

    MaxPool1D pool(5, 1, 2);
    Matrix p(1, 5);
    p << 1, 3, 2, 5, 99;
    const Matrix q = pool.forward(p);
    REQUIRE(q.cols() == 2);
    CHECK(q(0, 0) == 3.0);
    CHECK(q(0, 1) == 5.0);
    const Matrix back = pool.backward(Matrix::Ones(1, 2));
    CHECK(back(0, 1) == 1.0);
    CHECK(back(0, 3) == 1.0);
    CHECK(back(0, 4) == 0.0);

    Matrix pred(2, 1), target(2, 1), grad;
    pred << 1, 2;
    target << 2, 0;
    CHECK(mae_loss(pred, target, &grad) == 1.5);
    CHECK(grad(0, 0) == -0.5);
    CHECK(grad(1, 0) == 0.5);

    Parameter w{"w", Matrix::Constant(1, 2, 1.0), Matrix(1, 2)};
    w.grad << 0.3, -2.0;
    AdamState state;
    std::vector<Parameter*> params{&w};
    adam_step(AdamConfig{}, state, params);
    CHECK(w.value(0, 0) == doctest::Approx(1.0 - 0.001).epsilon(1e-6));
    CHECK(w.value(0, 1) == doctest::Approx(1.0 + 0.001).epsilon(1e-6));
    CHECK(state.step == 1);
}

TEST_CASE("glorot bounds") {
    std::mt19937_64 rng(3);
    Matrix w(40, 60);
    glorot_uniform(w, 40, 60, rng);
    const double limit = std::sqrt(6.0 / 100.0);
    CHECK(w.cwiseAbs().maxCoeff() <= limit);
    CHECK(w.cwiseAbs().maxCoeff() > 0.9 * limit);
    CHECK(std::abs(w.mean()) < 0.05);
}

TEST_CASE("zero-weight LSTM outputs zero") {
    Lstm layer(3, 2, 4, Activation::Tanh);
    layer.kernel.value.setZero();
    layer.recurrent.value.setZero();
    layer.bias.value.setZero();
    std::mt19937_64 rng(1);
    const Matrix out = layer.forward(random_matrix(5, 6, rng));
    CHECK(out.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cell clipping is counted") {
    Lstm layer(20, 1, 1, Activation::Relu, false, 1.0);
    layer.kernel.value.setConstant(5.0);
    layer.recurrent.value.setZero();
    layer.bias.value.setConstant(5.0);
    layer.forward(Matrix::Ones(1, 20));
    CHECK(layer.clip_events() > 0);
}

TEST_CASE("windows are position-major") {
    Matrix rows(4, 2);
    rows << 1, 2, 3, 4, 5, 6, 7, 8;
    const Matrix w = make_windows(rows, 3);
    REQUIRE(w.rows() == 2);
    REQUIRE(w.cols() == 6);
    CHECK(w.row(0) == (Eigen::RowVectorXd(6) << 1, 2, 3, 4, 5, 6).finished());
    CHECK(w.row(1) == (Eigen::RowVectorXd(6) << 3, 4, 5, 6, 7, 8).finished());
    CHECK(make_windows(rows, 5).rows() == 0);
    CHECK_THROWS_AS(make_windows(rows, 0), ShapeError);
}

TEST_CASE("spec validation and labels") {
    NetworkSpec spec = small_cnn();
    CHECK_NOTHROW(spec.validate(11));
    CHECK_THROWS_AS(spec.validate(2), ConfigError);
    CHECK_THROWS_AS(spec.validate(0), ConfigError);
    spec.epochs = 0;
    CHECK_THROWS_AS(spec.validate(11), ConfigError);
    CHECK(network_kind_from_string("cnn") == NetworkKind::Cnn1d);
    CHECK(network_kind_from_string("lstm") == NetworkKind::Lstm);
    CHECK_THROWS_AS(network_kind_from_string("gru"), ConfigError);
    CHECK(activation_from_string("relu") == Activation::Relu);
    CHECK(small_lstm().label().find("units=6") != std::string::npos);
}

TEST_CASE("both networks overfit eight samples") {
    const TrainingSet set = make_set(5, 8, 11);
    for (NetworkSpec spec : {small_lstm(), small_cnn()}) {
        spec.epochs = 2000;
        spec.adam.learning_rate = 0.003;
        spec.lstm_units = 16;
        spec.conv_filters = 16;
        spec.dense_hidden = 16;
        const NetworkFit fit = build_and_train(spec, set);
        CAPTURE(spec.label());
        CHECK(fit.train_loss_history.size() == 2000);
        CHECK(*std::min_element(fit.train_loss_history.begin(), fit.train_loss_history.end()) < 1e-2);
        CHECK(fit.train_loss_history.back() < fit.train_loss_history.front());
    }
}

TEST_CASE("training is deterministic and checkpoints match independent runs") {
    const TrainingSet train = make_set(6, 120, 4);
    const TrainingSet validation = make_set(7, 30, 4);
    TrainingSet aligned = validation;
    aligned.features.scaler = train.features.scaler;
    aligned.target.scaler = train.target.scaler;

    for (NetworkSpec spec : {small_lstm(), small_cnn()}) {
        spec.lookback = 3;
        const NetworkFit a = build_and_train(spec, train, aligned);
        const NetworkFit b = build_and_train(spec, train, aligned);
        REQUIRE(a.parameters.size() == b.parameters.size());
        for (std::size_t i = 0; i < a.parameters.size(); ++i) {
            CHECK(a.parameters[i].value == b.parameters[i].value);
        }
        CHECK(a.validation_loss_history.size() == spec.epochs);

        const std::vector<std::size_t> budgets{2, 5};
        const auto snaps = train_checkpoints(spec, train, aligned, budgets);
        spec.epochs = 2;
        const NetworkFit two = build_and_train(spec, train, aligned);
        for (std::size_t i = 0; i < two.parameters.size(); ++i) {
            CHECK(snaps[0].parameters[i].value == two.parameters[i].value);
            CHECK(snaps[1].parameters[i].value == a.parameters[i].value);
        }
        CHECK(snaps[0].train_loss_history == two.train_loss_history);

        spec.seed = 43;
        const NetworkFit other = build_and_train(spec, train, aligned);
        CHECK(other.parameters[0].value != two.parameters[0].value);
    }
    CHECK_THROWS_AS(build_and_train(small_lstm(), train, validation), StateMismatchError);
}

TEST_CASE("prediction does not depend on batching") {
    const TrainingSet set = make_set(8, 300, 3);
    NetworkSpec spec = small_lstm();
    spec.lookback = 2;
    const NetworkFit fit = build_and_train(spec, set);
    const std::vector<double> all = predict_network(fit, set.features);
    REQUIRE(all.size() == 299);
    Network net = fit.restore();
    const Matrix windows = make_windows(set.features.values, 2);
    for (Eigen::Index i = 0; i < windows.rows(); i += 37) {
        const double scaled = net.forward(windows.row(i))(0, 0);
        const double value = dataset::invert_minmax(fit.target_scaler, std::vector<double>{scaled}, "PM2.5")[0];
        CHECK(all[static_cast<std::size_t>(i)] == doctest::Approx(value).epsilon(1e-12));
    }
}

TEST_CASE("identity scaler leaves network output untouched") {
    TrainingSet set = make_set(9, 50, 2);
    set.target.scaler = dataset::ScalerState{{"PM2.5"}, {0.0}, {1.0}};
    const NetworkFit fit = build_and_train(small_lstm(), set);
    Network net = fit.restore();
    const std::vector<double> out = predict_network(fit, set.features);
    const Matrix raw = net.forward(set.features.values);
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i] == raw(static_cast<Eigen::Index>(i), 0));
    }
}

TEST_CASE("model files round trip") {
    const TrainingSet set = make_set(10, 60, 3);
    for (NetworkSpec spec : {small_lstm(), small_cnn()}) {
        const NetworkFit fit = build_and_train(spec, set);
        std::stringstream buffer;
        save_network(fit, buffer);
        const NetworkFit loaded = load_network(buffer);
        CHECK(loaded.spec.label() == fit.spec.label());
        CHECK(loaded.feature_scaler == fit.feature_scaler);
        CHECK(loaded.target_scaler == fit.target_scaler);
        CHECK(loaded.train_loss_history == fit.train_loss_history);
        REQUIRE(loaded.parameters.size() == fit.parameters.size());
        for (std::size_t i = 0; i < fit.parameters.size(); ++i) {
            CHECK(loaded.parameters[i].name == fit.parameters[i].name);
            CHECK(loaded.parameters[i].value == fit.parameters[i].value);
        }
        CHECK(predict_network(loaded, set.features) == predict_network(fit, set.features));
    }

    std::stringstream junk("definitely not a model");
    CHECK_THROWS_AS(load_network(junk), IoError);

    const NetworkFit fit = build_and_train(small_lstm(), set);
    std::stringstream buffer;
    save_network(fit, buffer);
    const std::string bytes = buffer.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() - 16));
    CHECK_THROWS_AS(load_network(truncated), IoError);

    NetworkFit broken = fit;
    broken.parameters[0].value = Matrix::Zero(1, 1);
    CHECK_THROWS_AS(broken.restore(), ShapeError);
}

TEST_CASE("scaler mismatch and divergence are reported") {
    const TrainingSet set = make_set(11, 40, 3);
    const NetworkFit fit = build_and_train(small_lstm(), set);
    ScaledFeatures other = set.features;
    other.scaler.max[0] += 1.0;
    CHECK_THROWS_AS(predict_network(fit, other), StateMismatchError);

    TrainingSet poisoned = set;
    poisoned.target.values[3] = INFINITY;
    CHECK_THROWS_AS(build_and_train(small_lstm(), poisoned), DivergenceError);
}
