#include "aircast/json_io.hpp"
#include "aircast/neural.hpp"

#include "aircast/error.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

namespace aircast::neural {

namespace {

constexpr std::array<char, 8> kMagic = {'A', 'C', 'N', 'E', 'T', 'B', 'I', 'N'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

template <typename T>
void write_raw(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw IoError("model file truncated");
    }
    return value;
}

} // namespace

void save_network(const NetworkFit& fit, std::ostream& out) {
    Json tensors = Json::array();
    for (const NamedTensor& t : fit.parameters) {
        tensors.push_back(Json{{"name", t.name}, {"shape", {t.value.rows(), t.value.cols()}}});
    }
    const Json header{{"spec", fit.spec},
                      {"n_features", fit.n_features},
                      {"tensors", std::move(tensors)},
                      {"feature_scaler", fit.feature_scaler},
                      {"target_scaler", fit.target_scaler},
                      {"train_loss_history", fit.train_loss_history},
                      {"validation_loss_history", fit.validation_loss_history},
                      {"clip_events", fit.clip_events}};
    const std::string text = header.dump();

    out.write(kMagic.data(), kMagic.size());
    write_raw(out, kFormatVersion);
    write_raw(out, static_cast<std::uint64_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    // Row-major payload, tensors in header order.
    for (const NamedTensor& t : fit.parameters) {
        for (Eigen::Index i = 0; i < t.value.rows(); ++i) {
            for (Eigen::Index k = 0; k < t.value.cols(); ++k) {
                write_raw(out, t.value(i, k));
            }
        }
    }
    if (!out) {
        throw IoError("failed to write model file");
    }
}

NetworkFit load_network(std::istream& in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
        throw IoError("not a network model file");
    }
    const auto version = read_raw<std::uint32_t>(in);
    if (version != kFormatVersion) {
        throw IoError("unsupported model format version " + std::to_string(version));
    }
    const auto length = read_raw<std::uint64_t>(in);
    std::string text(length, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(length))) {
        throw IoError("model header truncated");
    }
    const Json header = Json::parse(text);

    NetworkFit fit;
    fit.spec = header.at("spec").get<NetworkSpec>();
    fit.n_features = header.at("n_features").get<std::size_t>();
    fit.feature_scaler = header.at("feature_scaler").get<dataset::ScalerState>();
    fit.target_scaler = header.at("target_scaler").get<dataset::ScalerState>();
    fit.train_loss_history = header.at("train_loss_history").get<std::vector<double>>();
    fit.validation_loss_history = header.at("validation_loss_history").get<std::vector<double>>();
    fit.clip_events = header.at("clip_events").get<std::size_t>();
    for (const auto& t : header.at("tensors")) {
        NamedTensor tensor;
        tensor.name = t.at("name").get<std::string>();
        const auto rows = t.at("shape").at(0).get<Eigen::Index>();
        const auto cols = t.at("shape").at(1).get<Eigen::Index>();
        tensor.value.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index k = 0; k < cols; ++k) {
                tensor.value(i, k) = read_raw<double>(in);
            }
        }
        fit.parameters.push_back(std::move(tensor));
    }
    fit.restore();  // validates shapes against the architecture
    return fit;
}

} // namespace aircast::neural
