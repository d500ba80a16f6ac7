#include "eqf/neural/models.hpp"

#include "eqf/error.hpp"
#include "eqf/neural/adam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace eqf::nn {

Standardizer Standardizer::fit(std::span<const double> x) {
    Standardizer s;
    if (x.empty()) return s;
    s.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - s.mean) * (v - s.mean);
    const double sd = x.size() > 1 ? std::sqrt(ss / static_cast<double>(x.size() - 1)) : 0.0;
    s.scale = sd > 1e-12 * std::max(1.0, std::abs(s.mean)) ? sd : 1.0;
    return s;
}

std::vector<double> train(Network& net, std::span<const Tensor> inputs, std::span<const Tensor> targets,
                          const TrainConfig& cfg) {
    if (inputs.size() != targets.size() || inputs.empty()) throw Error(Errc::ShapeMismatch, "empty training set");
    if (cfg.epochs < 1 || cfg.batch_size < 1) throw Error(Errc::InvalidParams, "epochs and batch_size must be >= 1");

    AdamState adam;
    adam.lr = cfg.lr;
    std::mt19937_64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> history;
    history.reserve(cfg.epochs);
    std::vector<Tensor> bx, by;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            bx.clear();
            by.clear();
            for (std::size_t k = start; k < end; ++k) {
                bx.push_back(inputs[order[k]]);
                by.push_back(targets[order[k]]);
            }
            const double loss = backprop(net, bx, by, true);
            if (!std::isfinite(loss)) throw Error(Errc::DivergedTraining, "epoch " + std::to_string(epoch));
            epoch_loss += loss * static_cast<double>(end - start);
            const auto params = net.params();
            adam_step(adam, params);
        }
        history.push_back(epoch_loss / static_cast<double>(order.size()));
    }
    return history;
}

Network make_lstm_network(std::size_t units) {
    Network net;
    net.emplace<Lstm>(1, units, true);
    net.emplace<Lstm>(units, units, false);
    net.emplace<Dense>(units, 1);
    return net;
}

void make_windows(std::span<const double> standardized, std::size_t window, std::vector<Tensor>& inputs,
                  std::vector<Tensor>& targets) {
    inputs.clear();
    targets.clear();
    if (standardized.size() <= window) return;
    for (std::size_t i = 0; i + window < standardized.size(); ++i) {
        inputs.emplace_back(std::vector<std::size_t>{window, 1},
                            std::vector<double>(standardized.begin() + static_cast<std::ptrdiff_t>(i),
                                                standardized.begin() + static_cast<std::ptrdiff_t>(i + window)));
        targets.emplace_back(std::vector<std::size_t>{1}, std::vector<double>{standardized[i + window]});
    }
}

LstmWindowModel fit_lstm_window_model(std::span<const double> train_values, const TrainConfig& cfg) {
    if (cfg.window < 1 || cfg.epochs < 1) throw Error(Errc::InvalidParams, "window and epochs must be >= 1");
    if (train_values.size() <= cfg.window + 1)
        throw Error(Errc::SeriesTooShort, "LSTM training needs more than window + 1 values");

    LstmWindowModel model;
    model.config = cfg;
    model.standardizer = Standardizer::fit(train_values);
    std::vector<double> z(train_values.size());
    std::transform(train_values.begin(), train_values.end(), z.begin(),
                   [&](double v) { return model.standardizer.apply(v); });

    std::vector<Tensor> inputs, targets;
    make_windows(z, cfg.window, inputs, targets);

    model.net = make_lstm_network();
    model.net.initialize(cfg.seed);
    model.loss_history = train(model.net, inputs, targets, cfg);
    return model;
}

double LstmWindowModel::predict_next(std::span<const double> window_values) {
    if (window_values.size() != config.window) throw Error(Errc::ShapeMismatch, "window length");
    Tensor x({config.window, 1});
    for (std::size_t i = 0; i < config.window; ++i) x[i] = standardizer.apply(window_values[i]);
    return standardizer.invert(net.forward(x, false)[0]);
}

Tensor cube_from_window(std::span<const double> window_values, const Dims3& dims) {
    const std::size_t cells = dims[0] * dims[1] * dims[2];
    if (window_values.size() > cells) throw Error(Errc::BadDims, "window does not fit in h*w*d cells");
    Tensor cube({1, dims[0], dims[1], dims[2]});
    std::copy(window_values.begin(), window_values.end(), cube.data());
    return cube;
}

Tensorized tensorize_returns_3d(std::span<const double> returns, std::size_t window, const Dims3& dims) {
    if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0 || dims[0] * dims[1] * dims[2] < window || window == 0)
        throw Error(Errc::BadDims, "h*w*d must be >= window >= 1");
    if (window + 1 > returns.size()) throw Error(Errc::SeriesTooShort, "need window + 1 returns");
    Tensorized out;
    for (std::size_t i = 0; i + window < returns.size(); ++i) {
        out.inputs.push_back(cube_from_window(returns.subspan(i, window), dims));
        out.targets.push_back(returns[i + window]);
    }
    return out;
}

Network make_cnn_network(const Dims3& dims, const CnnArchitecture& arch, std::uint64_t dropout_seed) {
    for (std::size_t d : dims)
        if (d < MaxPool3d::kPool) throw Error(Errc::BadDims, "each cube dimension must be >= 2 for pooling");
    const std::size_t pooled = (dims[0] / 2) * (dims[1] / 2) * (dims[2] / 2);
    Network net;
    net.emplace<Conv3d>(1, arch.filters1);
    net.emplace<Relu>();
    net.emplace<MaxPool3d>();
    net.emplace<Conv3d>(arch.filters1, arch.filters2);
    net.emplace<Relu>();
    net.emplace<Flatten>();
    net.emplace<Dense>(arch.filters2 * pooled, arch.dense_units);
    net.emplace<Relu>();
    net.emplace<Dropout>(arch.dropout, dropout_seed);
    net.emplace<Dense>(arch.dense_units, 1);
    return net;
}

Cnn3dModel fit_cnn3d(std::span<const double> train_returns, const TrainConfig& cfg, const Dims3& dims,
                     const CnnArchitecture& arch) {
    if (cfg.epochs < 1) throw Error(Errc::InvalidParams, "epochs must be >= 1");
    Cnn3dModel model;
    model.config = cfg;
    model.dims = dims;
    model.arch = arch;
    model.net = make_cnn_network(dims, arch, cfg.seed + 7919);
    model.standardizer = Standardizer::fit(train_returns);

    std::vector<double> z(train_returns.size());
    std::transform(train_returns.begin(), train_returns.end(), z.begin(),
                   [&](double v) { return model.standardizer.apply(v); });
    const auto data = tensorize_returns_3d(z, cfg.window, dims);
    std::vector<Tensor> targets;
    targets.reserve(data.targets.size());
    for (double t : data.targets) targets.emplace_back(std::vector<std::size_t>{1}, std::vector<double>{t});

    model.net.initialize(cfg.seed);
    model.loss_history = train(model.net, data.inputs, targets, cfg);
    return model;
}

double Cnn3dModel::predict_next(std::span<const double> window_values) {
    if (window_values.size() != config.window) throw Error(Errc::ShapeMismatch, "window length");
    std::vector<double> z(window_values.size());
    std::transform(window_values.begin(), window_values.end(), z.begin(),
                   [&](double v) { return standardizer.apply(v); });
    return standardizer.invert(net.forward(cube_from_window(z, dims), false)[0]);
}

}  // namespace eqf::nn
