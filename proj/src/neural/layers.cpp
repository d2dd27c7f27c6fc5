#include "aircast/neural.hpp"

#include "aircast/error.hpp"

#include <algorithm>
#include <cmath>

namespace aircast::neural {

namespace {

Matrix sigmoid(const Matrix& z) {
    return (1.0 + (-z.array()).exp()).inverse().matrix();
}

Matrix activate(const Matrix& z, Activation activation) {
    return activation == Activation::Tanh ? Matrix(z.array().tanh()) : Matrix(z.array().max(0.0));
}

// Derivative expressed through the pre-activation z.
Matrix activation_slope(const Matrix& z, Activation activation) {
    if (activation == Activation::Tanh) {
        return (1.0 - z.array().tanh().square()).matrix();
    }
    return (z.array() > 0.0).cast<double>().matrix();
}

void require_cols(const Matrix& m, Eigen::Index cols, const char* layer) {
    if (m.cols() != cols) {
        throw ShapeError(std::string(layer) + ": expected " + std::to_string(cols) + " input columns, got " +
                         std::to_string(m.cols()));
    }
}

Parameter make_parameter(std::string name, Eigen::Index rows, Eigen::Index cols) {
    return Parameter{std::move(name), Matrix::Zero(rows, cols), Matrix::Zero(rows, cols)};
}

} // namespace

std::string_view to_string(Activation activation) {
    return activation == Activation::Tanh ? "tanh" : "relu";
}

Activation activation_from_string(std::string_view text) {
    if (text == "tanh") {
        return Activation::Tanh;
    }
    if (text == "relu") {
        return Activation::Relu;
    }
    throw ConfigError("unknown activation '" + std::string(text) + "'");
}

void glorot_uniform(Matrix& weights, double fan_in, double fan_out, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index j = 0; j < weights.cols(); ++j) {
        for (Eigen::Index i = 0; i < weights.rows(); ++i) {
            weights(i, j) = dist(rng);
        }
    }
}

// ---------------------------------------------------------------------------

Dense::Dense(std::size_t inputs, std::size_t outputs)
    : weight(make_parameter("weight", static_cast<Eigen::Index>(inputs), static_cast<Eigen::Index>(outputs))),
      bias(make_parameter("bias", 1, static_cast<Eigen::Index>(outputs))) {}

Matrix Dense::forward(const Matrix& input) {
    require_cols(input, weight.value.rows(), "dense");
    input_ = input;
    Matrix out = input * weight.value;
    out.rowwise() += bias.value.row(0);
    return out;
}

Matrix Dense::backward(const Matrix& grad_output) {
    weight.grad.noalias() = input_.transpose() * grad_output;
    bias.grad = grad_output.colwise().sum();
    return grad_output * weight.value.transpose();
}

Matrix Relu::forward(const Matrix& input) {
    input_ = input;
    return input.array().max(0.0).matrix();
}

Matrix Relu::backward(const Matrix& grad_output) const {
    return (grad_output.array() * (input_.array() > 0.0).cast<double>()).matrix();
}

// ---------------------------------------------------------------------------

Conv1D::Conv1D(std::size_t length, std::size_t channels, std::size_t filters, std::size_t kernel_size)
    : kernel(make_parameter("kernel", static_cast<Eigen::Index>(kernel_size * channels),
                            static_cast<Eigen::Index>(filters))),
      bias(make_parameter("bias", 1, static_cast<Eigen::Index>(filters))),
      length_(length),
      channels_(channels),
      filters_(filters),
      kernel_size_(kernel_size) {
    if (length < kernel_size || kernel_size == 0) {
        throw ShapeError("conv1d: sequence length " + std::to_string(length) + " shorter than kernel " +
                         std::to_string(kernel_size));
    }
}

Matrix Conv1D::forward(const Matrix& input) {
    require_cols(input, static_cast<Eigen::Index>(length_ * channels_), "conv1d");
    const auto batch = input.rows();
    const auto out_len = static_cast<Eigen::Index>(output_length());
    const auto window = static_cast<Eigen::Index>(kernel_size_ * channels_);
    const auto c = static_cast<Eigen::Index>(channels_);
    const auto f = static_cast<Eigen::Index>(filters_);

    patches_.resize(batch * out_len, window);
    for (Eigen::Index b = 0; b < batch; ++b) {
        for (Eigen::Index l = 0; l < out_len; ++l) {
            patches_.row(b * out_len + l) = input.row(b).segment(l * c, window);
        }
    }
    Matrix response = patches_ * kernel.value;
    response.rowwise() += bias.value.row(0);

    Matrix out(batch, out_len * f);
    for (Eigen::Index b = 0; b < batch; ++b) {
        for (Eigen::Index l = 0; l < out_len; ++l) {
            out.row(b).segment(l * f, f) = response.row(b * out_len + l);
        }
    }
    return out;
}

Matrix Conv1D::backward(const Matrix& grad_output) {
    const auto batch = grad_output.rows();
    const auto out_len = static_cast<Eigen::Index>(output_length());
    const auto window = static_cast<Eigen::Index>(kernel_size_ * channels_);
    const auto c = static_cast<Eigen::Index>(channels_);
    const auto f = static_cast<Eigen::Index>(filters_);

    Matrix grad_response(batch * out_len, f);
    for (Eigen::Index b = 0; b < batch; ++b) {
        for (Eigen::Index l = 0; l < out_len; ++l) {
            grad_response.row(b * out_len + l) = grad_output.row(b).segment(l * f, f);
        }
    }
    kernel.grad.noalias() = patches_.transpose() * grad_response;
    bias.grad = grad_response.colwise().sum();

    const Matrix grad_patches = grad_response * kernel.value.transpose();
    Matrix grad_input = Matrix::Zero(batch, static_cast<Eigen::Index>(length_ * channels_));
    for (Eigen::Index b = 0; b < batch; ++b) {
        for (Eigen::Index l = 0; l < out_len; ++l) {
            grad_input.row(b).segment(l * c, window) += grad_patches.row(b * out_len + l);
        }
    }
    return grad_input;
}

// ---------------------------------------------------------------------------

MaxPool1D::MaxPool1D(std::size_t length, std::size_t channels, std::size_t pool)
    : length_(length), channels_(channels), pool_(pool) {
    if (pool == 0 || length < pool) {
        throw ShapeError("maxpool1d: sequence length " + std::to_string(length) + " shorter than pool " +
                         std::to_string(pool));
    }
}

Matrix MaxPool1D::forward(const Matrix& input) {
    require_cols(input, static_cast<Eigen::Index>(length_ * channels_), "maxpool1d");
    const auto batch = input.rows();
    const auto out_len = static_cast<Eigen::Index>(output_length());
    const auto c = static_cast<Eigen::Index>(channels_);
    const auto pool = static_cast<Eigen::Index>(pool_);
    input_cols_ = input.cols();

    Matrix out(batch, out_len * c);
    argmax_.assign(static_cast<std::size_t>(batch * out_len * c), 0);
    for (Eigen::Index b = 0; b < batch; ++b) {
        for (Eigen::Index p = 0; p < out_len; ++p) {
            for (Eigen::Index ch = 0; ch < c; ++ch) {
                Eigen::Index best = (p * pool) * c + ch;
                for (Eigen::Index j = 1; j < pool; ++j) {
                    const Eigen::Index col = (p * pool + j) * c + ch;
                    if (input(b, col) > input(b, best)) {
                        best = col;
                    }
                }
                out(b, p * c + ch) = input(b, best);
                argmax_[static_cast<std::size_t>((b * out_len + p) * c + ch)] = best;
            }
        }
    }
    return out;
}

Matrix MaxPool1D::backward(const Matrix& grad_output) const {
    const auto batch = grad_output.rows();
    const auto per_sample = grad_output.cols();
    Matrix grad_input = Matrix::Zero(batch, input_cols_);
    for (Eigen::Index b = 0; b < batch; ++b) {
        for (Eigen::Index k = 0; k < per_sample; ++k) {
            grad_input(b, argmax_[static_cast<std::size_t>(b * per_sample + k)]) += grad_output(b, k);
        }
    }
    return grad_input;
}

// ---------------------------------------------------------------------------

Lstm::Lstm(std::size_t steps, std::size_t features, std::size_t units, Activation activation, bool return_sequences,
           double cell_clip)
    : kernel(make_parameter("kernel", static_cast<Eigen::Index>(features), static_cast<Eigen::Index>(4 * units))),
      recurrent(make_parameter("recurrent", static_cast<Eigen::Index>(units), static_cast<Eigen::Index>(4 * units))),
      bias(make_parameter("bias", 1, static_cast<Eigen::Index>(4 * units))),
      steps_(steps),
      features_(features),
      units_(units),
      activation_(activation),
      return_sequences_(return_sequences),
      cell_clip_(cell_clip) {
    if (steps == 0 || features == 0 || units == 0) {
        throw ShapeError("lstm: steps, features and units must be positive");
    }
}

Matrix Lstm::forward(const Matrix& input) {
    require_cols(input, static_cast<Eigen::Index>(steps_ * features_), "lstm");
    const auto batch = input.rows();
    const auto u = static_cast<Eigen::Index>(units_);
    const auto f = static_cast<Eigen::Index>(features_);

    cache_.clear();
    cache_.reserve(steps_);
    hidden_.assign(1, Matrix::Zero(batch, u));
    Matrix cell = Matrix::Zero(batch, u);

    for (std::size_t t = 0; t < steps_; ++t) {
        Step step;
        step.input = input.middleCols(static_cast<Eigen::Index>(t) * f, f);
        Matrix z = step.input * kernel.value;
        if (t > 0) {
            z.noalias() += hidden_.back() * recurrent.value;
        }
        z.rowwise() += bias.value.row(0);

        step.gates.resize(batch, 4 * u);
        step.gates.leftCols(2 * u) = sigmoid(z.leftCols(2 * u));
        step.candidate_pre = z.middleCols(2 * u, u);
        step.gates.middleCols(2 * u, u) = activate(step.candidate_pre, activation_);
        step.gates.rightCols(u) = sigmoid(z.rightCols(u));

        Matrix next = step.gates.middleCols(u, u).cwiseProduct(cell) +
                      step.gates.leftCols(u).cwiseProduct(step.gates.middleCols(2 * u, u));
        step.clip_mask = Matrix::Ones(batch, u);
        for (Eigen::Index j = 0; j < u; ++j) {
            for (Eigen::Index b = 0; b < batch; ++b) {
                double& value = next(b, j);
                if (value > cell_clip_ || value < -cell_clip_) {
                    value = std::clamp(value, -cell_clip_, cell_clip_);
                    step.clip_mask(b, j) = 0.0;
                    ++clip_events_;
                }
            }
        }
        step.cell = next;
        step.cell_act = activate(next, activation_);
        hidden_.push_back(step.gates.rightCols(u).cwiseProduct(step.cell_act));
        cell = std::move(next);
        cache_.push_back(std::move(step));
    }

    if (!return_sequences_) {
        return hidden_.back();
    }
    Matrix out(batch, static_cast<Eigen::Index>(steps_) * u);
    for (std::size_t t = 0; t < steps_; ++t) {
        out.middleCols(static_cast<Eigen::Index>(t) * u, u) = hidden_[t + 1];
    }
    return out;
}

Matrix Lstm::backward(const Matrix& grad_output) {
    const auto batch = grad_output.rows();
    const auto u = static_cast<Eigen::Index>(units_);
    const auto f = static_cast<Eigen::Index>(features_);

    kernel.grad.setZero();
    recurrent.grad.setZero();
    bias.grad.setZero();
    Matrix grad_input(batch, static_cast<Eigen::Index>(steps_) * f);

    Matrix grad_hidden = Matrix::Zero(batch, u);
    Matrix grad_cell = Matrix::Zero(batch, u);
    for (std::size_t t = steps_; t-- > 0;) {
        const Step& s = cache_[t];
        if (return_sequences_) {
            grad_hidden += grad_output.middleCols(static_cast<Eigen::Index>(t) * u, u);
        } else if (t + 1 == steps_) {
            grad_hidden += grad_output;
        }

        const auto i_gate = s.gates.leftCols(u);
        const auto f_gate = s.gates.middleCols(u, u);
        const auto g_gate = s.gates.middleCols(2 * u, u);
        const auto o_gate = s.gates.rightCols(u);

        const Matrix grad_o = grad_hidden.cwiseProduct(s.cell_act);
        grad_cell += grad_hidden.cwiseProduct(o_gate).cwiseProduct(activation_slope(s.cell, activation_));
        grad_cell = grad_cell.cwiseProduct(s.clip_mask);

        const Matrix previous_cell = t > 0 ? cache_[t - 1].cell : Matrix::Zero(batch, u);
        Matrix grad_z(batch, 4 * u);
        grad_z.leftCols(u) = grad_cell.cwiseProduct(g_gate).cwiseProduct(
            i_gate.cwiseProduct((1.0 - i_gate.array()).matrix()));
        grad_z.middleCols(u, u) = grad_cell.cwiseProduct(previous_cell).cwiseProduct(
            f_gate.cwiseProduct((1.0 - f_gate.array()).matrix()));
        grad_z.middleCols(2 * u, u) =
            grad_cell.cwiseProduct(i_gate).cwiseProduct(activation_slope(s.candidate_pre, activation_));
        grad_z.rightCols(u) = grad_o.cwiseProduct(o_gate.cwiseProduct((1.0 - o_gate.array()).matrix()));

        kernel.grad.noalias() += s.input.transpose() * grad_z;
        bias.grad += grad_z.colwise().sum();
        grad_input.middleCols(static_cast<Eigen::Index>(t) * f, f) = grad_z * kernel.value.transpose();
        if (t > 0) {
            recurrent.grad.noalias() += hidden_[t].transpose() * grad_z;
            grad_hidden = grad_z * recurrent.value.transpose();
        } else {
            grad_hidden.setZero();
        }
        grad_cell = grad_cell.cwiseProduct(f_gate);
    }
    return grad_input;
}

// ---------------------------------------------------------------------------

double mae_loss(const Matrix& prediction, const Matrix& target, Matrix* grad) {
    if (prediction.rows() != target.rows() || prediction.cols() != target.cols()) {
        throw ShapeError("mae_loss: prediction and target shapes differ");
    }
    const auto n = static_cast<double>(prediction.size());
    const Matrix diff = prediction - target;
    if (grad) {
        *grad = diff.unaryExpr([n](double d) { return d > 0.0 ? 1.0 / n : (d < 0.0 ? -1.0 / n : 0.0); });
    }
    return diff.cwiseAbs().sum() / n;
}

void adam_step(const AdamConfig& config, AdamState& state, std::span<Parameter* const> parameters) {
    if (state.first_moment.size() != parameters.size()) {
        state.first_moment.clear();
        state.second_moment.clear();
        for (const Parameter* p : parameters) {
            state.first_moment.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
            state.second_moment.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
        }
        state.step = 0;
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(config.beta1, t);
    const double correction2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t k = 0; k < parameters.size(); ++k) {
        Parameter& p = *parameters[k];
        Matrix& m = state.first_moment[k];
        Matrix& v = state.second_moment[k];
        m = config.beta1 * m + (1.0 - config.beta1) * p.grad;
        v = config.beta2 * v + (1.0 - config.beta2) * p.grad.cwiseAbs2();
        p.value.array() -= config.learning_rate * (m.array() / correction1) /
                           ((v.array() / correction2).sqrt() + config.epsilon);
    }
}

} // namespace aircast::neural
