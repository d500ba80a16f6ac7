#pragma once

#include "eqf/error.hpp"
#include "eqf/neural/network.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace eqf::nn {

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t window = 30;
    std::size_t batch_size = 32;
    std::uint64_t seed = 1;
    double lr = 1e-3;
};

// Standardization fitted on training data only; a zero scale falls back to 1.
struct Standardizer {
    double mean = 0.0;
    double scale = 1.0;

    static Standardizer fit(std::span<const double> x);
    double apply(double v) const noexcept { return (v - mean) / scale; }
    double invert(double z) const noexcept { return z * scale + mean; }
};

// Iterates shuffled mini-batches for cfg.epochs epochs with Adam on MSE. Returns the per-epoch
// mean training loss. Throws DivergedTraining on a non-finite loss.
std::vector<double> train(Network& net, std::span<const Tensor> inputs, std::span<const Tensor> targets,
                          const TrainConfig& cfg);

// LSTM(50, sequences) -> LSTM(50) -> Dense(1) over a rolling window of standardized values.
struct LstmWindowModel {
    static constexpr std::size_t kUnits = 50;

    TrainConfig config;
    Standardizer standardizer;
    Network net;
    std::vector<double> loss_history;

    std::size_t window() const noexcept { return config.window; }
    double predict_next(std::span<const double> window_values);
};

Network make_lstm_network(std::size_t units = LstmWindowModel::kUnits);

LstmWindowModel fit_lstm_window_model(std::span<const double> train, const TrainConfig& cfg);

// Rolling windows [window x 1] of standardized values and next-value targets.
void make_windows(std::span<const double> standardized, std::size_t window, std::vector<Tensor>& inputs,
                  std::vector<Tensor>& targets);

using Dims3 = std::array<std::size_t, 3>;  // height, width, depth

struct Tensorized {
    std::vector<Tensor> inputs;  // each [1, h, w, d]
    std::vector<double> targets;
};

// Each rolling window is written row-major into an h x w x d cube; unused trailing cells stay 0.
Tensor cube_from_window(std::span<const double> window_values, const Dims3& dims);
Tensorized tensorize_returns_3d(std::span<const double> returns, std::size_t window, const Dims3& dims);

struct CnnArchitecture {
    std::size_t filters1 = 8;
    std::size_t filters2 = 16;
    std::size_t dense_units = 32;
    double dropout = 0.2;
};

// Conv3d(8) -> ReLU -> MaxPool3d(2) -> Conv3d(16) -> ReLU -> Flatten -> Dense(32) -> ReLU ->
// Dropout(0.2) -> Dense(1).
struct Cnn3dModel {
    TrainConfig config;
    Dims3 dims{3, 3, 3};
    CnnArchitecture arch;
    Standardizer standardizer;
    Network net;
    std::vector<double> loss_history;

    double predict_next(std::span<const double> window_values);
};

Network make_cnn_network(const Dims3& dims, const CnnArchitecture& arch, std::uint64_t dropout_seed);

Cnn3dModel fit_cnn3d(std::span<const double> train_returns, const TrainConfig& cfg, const Dims3& dims,
                     const CnnArchitecture& arch = {});

// Slides the window forward, feeding each one-step prediction back in.
template <typename Model>
std::vector<double> predict_recursive(Model& model, std::span<const double> seed_window, std::size_t horizon) {
    if (seed_window.size() != model.config.window)
        throw Error(Errc::ShapeMismatch, "seed window must hold exactly the model window");
    std::vector<double> window(seed_window.begin(), seed_window.end());
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        const double next = model.predict_next(window);
        out.push_back(next);
        window.erase(window.begin());
        window.push_back(next);
    }
    return out;
}

}  // namespace eqf::nn
