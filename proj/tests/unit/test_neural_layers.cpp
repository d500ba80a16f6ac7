#include "eqf/error.hpp"
#include "eqf/neural/adam.hpp"
#include "eqf/neural/layers.hpp"
#include "eqf/neural/network.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

using namespace eqf;
using namespace eqf::nn;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed, double scale = 1.0) {
    Tensor t(std::move(shape));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (double& v : t.values()) v = u(rng);
    return t;
}

double dot(const Tensor& a, const Tensor& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Checks d(sum(w * layer(x)))/d(input) and /d(params) against central differences.
void gradient_check(Layer& layer, Tensor x, double tol = 1e-6) {
    const Tensor probe_out = layer.forward(x, false);
    const Tensor w = random_tensor(probe_out.shape(), 777);
    auto loss = [&](const Tensor& in) { return dot(layer.forward(in, false), w); };

    for (auto& p : layer.params()) p.grad->fill(0.0);
    layer.forward(x, false);
    const Tensor dx = layer.backward(w);
    REQUIRE(dx.shape() == x.shape());

    const double eps = 1e-6;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + eps;
        const double up = loss(x);
        x[i] = keep - eps;
        const double down = loss(x);
        x[i] = keep;
        CHECK(dx[i] == doctest::Approx((up - down) / (2 * eps)).epsilon(tol).scale(1.0));
    }
    for (auto& p : layer.params()) {
        const Tensor analytic = *p.grad;
        for (std::size_t i = 0; i < p.value->size(); ++i) {
            double& v = (*p.value)[i];
            const double keep = v;
            v = keep + eps;
            const double up = loss(x);
            v = keep - eps;
            const double down = loss(x);
            v = keep;
            CHECK(analytic[i] == doctest::Approx((up - down) / (2 * eps)).epsilon(tol).scale(1.0));
        }
    }
}

}  // namespace

TEST_CASE("tensor basics") {
    Tensor t({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
    CHECK(t.matrix()(1, 0) == 4);
    CHECK(t.reshaped({3, 2}).matrix()(1, 0) == 3);
    CHECK(shape_size({2, 3, 4}) == 24);
    CHECK(t.all_finite());
    t[0] = std::nan("");
    CHECK_FALSE(t.all_finite());
    CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), Error);
    CHECK_THROWS_AS(t.reshaped({4}), Error);
}

TEST_CASE("dense forward and gradients") {
    Dense d(3, 2);
    d.weight() = Tensor({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
    d.bias() = Tensor({2}, std::vector<double>{0.5, -0.5});
    const Tensor y = d.forward(Tensor({3}, std::vector<double>{1, 0, -1}), false);
    CHECK(y[0] == 1 - 3 + 0.5);
    CHECK(y[1] == 4 - 6 - 0.5);
    std::mt19937_64 rng(1);
    d.initialize(rng);
    gradient_check(d, random_tensor({3}, 2));
}

TEST_CASE("relu and flatten") {
    Relu r;
    const Tensor y = r.forward(Tensor({4}, std::vector<double>{-1, 0.5, 2, -3}), false);
    CHECK(y.values()[0] == 0.0);
    CHECK(y.values()[2] == 2.0);
    gradient_check(r, Tensor({5}, std::vector<double>{-0.7, 0.3, 1.1, -0.2, 0.9}));
    Flatten f;
    const Tensor x = random_tensor({2, 3, 2}, 4);
    CHECK(f.forward(x, false).shape() == std::vector<std::size_t>{12});
    gradient_check(f, x);
}

TEST_CASE("dropout") {
    Dropout drop(0.25, 9);
    const Tensor x({10000}, 1.0);
    CHECK(drop.forward(x, false).values()[17] == 1.0);
    const Tensor y = drop.forward(x, true);
    std::size_t kept = 0;
    double total = 0.0;
    for (double v : y.values()) {
        if (v != 0.0) {
            ++kept;
            CHECK(v == doctest::Approx(1.0 / 0.75));
        }
        total += v;
    }
    CHECK(std::abs(static_cast<double>(kept) / 10000.0 - 0.75) < 0.02);
    CHECK(total / 10000.0 == doctest::Approx(1.0).epsilon(0.03));
    const Tensor g = drop.backward(Tensor({10000}, 2.0));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(2.0 * y[i]));
    // Same seed, same masks.
    Dropout again(0.25, 9);
    CHECK(again.forward(x, true).values()[123] == y.values()[123]);
}

TEST_CASE("lstm single step matches the gate equations") {
    Lstm cell(1, 1, false);
    // Gate order i, f, g, o.
    cell.input_weights() = Tensor({4, 1}, std::vector<double>{0.5, -0.3, 0.8, 0.1});
    cell.recurrent_weights() = Tensor({4, 1}, std::vector<double>{0.2, 0.4, -0.6, 0.9});
    cell.bias() = Tensor({4}, std::vector<double>{0.1, 1.0, -0.2, 0.0});
    const Tensor h = cell.forward(Tensor({2, 1}, std::vector<double>{0.7, -1.2}), false);
    double hp = 0.0, cp = 0.0;
    for (double x : {0.7, -1.2}) {
        const double i = sigmoid(0.5 * x + 0.2 * hp + 0.1);
        const double f = sigmoid(-0.3 * x + 0.4 * hp + 1.0);
        const double g = std::tanh(0.8 * x - 0.6 * hp - 0.2);
        const double o = sigmoid(0.1 * x + 0.9 * hp);
        cp = f * cp + i * g;
        hp = o * std::tanh(cp);
    }
    REQUIRE(h.size() == 1);
    CHECK(h[0] == doctest::Approx(hp).epsilon(1e-14));
}

TEST_CASE("lstm gradients through time") {
    std::mt19937_64 rng(5);
    SUBCASE("last state only") {
        Lstm cell(3, 4, false);
        cell.initialize(rng);
        gradient_check(cell, random_tensor({6, 3}, 11));
    }
    SUBCASE("full sequence") {
        Lstm cell(2, 3, true);
        cell.initialize(rng);
        gradient_check(cell, random_tensor({5, 2}, 12));
    }
    SUBCASE("forget bias starts at one and counts parameters") {
        Lstm cell(1, 50, true);
        cell.initialize(rng);
        CHECK(cell.bias()[50] == 1.0);
        CHECK(cell.bias()[0] == 0.0);
        CHECK(cell.parameter_count() == 4 * (50 + 2500 + 50));
    }
    SUBCASE("explicit state matches the zero-state forward") {
        Lstm cell(2, 3, true);
        cell.initialize(rng);
        const Tensor x = random_tensor({4, 2}, 13);
        LstmState zero{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)}, out;
        const Tensor a = cell.forward_from(x, zero, &out);
        const Tensor b = cell.forward(x, false);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
        CHECK(out.h(2) == a[11]);
    }
}

TEST_CASE("conv3d matches a direct loop and passes gradient check") {
    std::mt19937_64 rng(3);
    Conv3d conv(2, 3);
    conv.initialize(rng);
    conv.bias() = random_tensor({3}, 21);
    const Tensor x = random_tensor({2, 4, 3, 5}, 22);
    const Tensor y = conv.forward(x, false);
    REQUIRE(y.shape() == std::vector<std::size_t>{3, 4, 3, 5});
    const int H = 4, W = 3, D = 5;
    auto at = [&](int c, int h, int w, int d) {
        if (h < 0 || w < 0 || d < 0 || h >= H || w >= W || d >= D) return 0.0;
        return x[static_cast<std::size_t>(((c * H + h) * W + w) * D + d)];
    };
    const Tensor& k = conv.weight();
    for (int o = 0; o < 3; ++o)
        for (int h = 0; h < H; ++h)
            for (int w = 0; w < W; ++w)
                for (int d = 0; d < D; ++d) {
                    double s = conv.bias()[static_cast<std::size_t>(o)];
                    for (int c = 0; c < 2; ++c)
                        for (int a = 0; a < 3; ++a)
                            for (int b = 0; b < 3; ++b)
                                for (int e = 0; e < 3; ++e)
                                    s += k[static_cast<std::size_t>((((o * 2 + c) * 3 + a) * 3 + b) * 3 + e)] *
                                         at(c, h + a - 1, w + b - 1, d + e - 1);
                    CHECK(y[static_cast<std::size_t>(((o * H + h) * W + w) * D + d)] == doctest::Approx(s).epsilon(1e-13));
                }
    Conv3d small(2, 2);
    small.initialize(rng);
    gradient_check(small, random_tensor({2, 3, 2, 3}, 23));
}

TEST_CASE("maxpool3d") {
    MaxPool3d pool;
    Tensor x({1, 3, 2, 2});
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>((i * 7) % 12);
    const Tensor y = pool.forward(x, false);
    REQUIRE(y.shape() == std::vector<std::size_t>{1, 1, 1, 1});
    // Pooling window covers h in {0,1}: flat indices 0..7.
    double expected = 0.0;
    for (std::size_t i = 0; i < 8; ++i) expected = std::max(expected, x[i]);
    CHECK(y[0] == expected);
    gradient_check(pool, random_tensor({2, 4, 4, 2}, 31));
    CHECK_THROWS_AS(pool.forward(Tensor({1, 1, 4, 4}), false), Error);
}

TEST_CASE("layer factory round trip") {
    for (const auto& cfg : {Dense(3, 4).config(), Lstm(2, 5, true).config(), Conv3d(1, 8).config(),
                            Dropout(0.2, 4).config(), Relu().config(), Flatten().config(), MaxPool3d().config()}) {
        CHECK(make_layer(cfg)->config() == cfg);
    }
    CHECK_THROWS_AS(make_layer({{"kind", "attention"}}), Error);
}

TEST_CASE("network backprop equals finite differences of the batch MSE") {
    Network net;
    net.emplace<Lstm>(1, 4, true);
    net.emplace<Lstm>(4, 3, false);
    net.emplace<Dense>(3, 1);
    net.initialize(42);
    std::vector<Tensor> xs, ys;
    for (std::uint64_t s = 0; s < 3; ++s) {
        xs.push_back(random_tensor({5, 1}, 100 + s));
        ys.push_back(random_tensor({1}, 200 + s));
    }
    const double loss = backprop(net, xs, ys, false);
    CHECK(loss == doctest::Approx(mse([&] {
                                          std::vector<Tensor> p;
                                          for (const auto& x : xs) p.push_back(net.forward(x, false));
                                          return p;
                                      }(),
                                      ys)));
    const auto grad = net.flat_gradients();
    auto theta = net.flat_parameters();
    REQUIRE(grad.size() == net.parameter_count());
    const double eps = 1e-6;
    auto eval = [&] {
        std::vector<Tensor> p;
        for (const auto& x : xs) p.push_back(net.forward(x, false));
        return mse(p, ys);
    };
    for (std::size_t i = 0; i < theta.size(); i += 3) {
        const double keep = theta[i];
        theta[i] = keep + eps;
        net.set_flat_parameters(theta);
        const double up = eval();
        theta[i] = keep - eps;
        net.set_flat_parameters(theta);
        const double down = eval();
        theta[i] = keep;
        net.set_flat_parameters(theta);
        CHECK(grad[i] == doctest::Approx((up - down) / (2 * eps)).epsilon(1e-6).scale(1.0));
    }
    const auto rebuilt = Network::from_architecture(net.architecture());
    CHECK(rebuilt.architecture() == net.architecture());
}

TEST_CASE("adam") {
    SUBCASE("first step moves by lr in the direction of -sign(g)") {
        AdamState st;
        st.lr = 0.01;
        std::vector<double> p{1.0, -2.0, 3.0};
        const std::vector<double> g{0.5, -4.0, 1e-3};
        adam_step(st, p, g);
        CHECK(p[0] == doctest::Approx(1.0 - 0.01 * 0.5 / (0.5 + 1e-8)).epsilon(1e-14));
        CHECK(p[1] == doctest::Approx(-2.0 + 0.01 * 4.0 / (4.0 + 1e-8)).epsilon(1e-14));
        CHECK(p[2] == doctest::Approx(3.0 - 0.01 * 1e-3 / (1e-3 + 1e-8)).epsilon(1e-14));
        CHECK(st.step == 1);
    }
    SUBCASE("second step uses bias-corrected moments") {
        AdamState st;
        std::vector<double> p{0.0};
        adam_step(st, p, std::vector<double>{1.0});
        adam_step(st, p, std::vector<double>{3.0});
        const double m = (0.9 * 0.1 * 1.0 + 0.1 * 3.0) / (1 - 0.81);
        const double v = (0.999 * 0.001 * 1.0 + 0.001 * 9.0) / (1 - 0.999 * 0.999);
        CHECK(p[0] == doctest::Approx(-1e-3 / (1.0 + 1e-8) - 1e-3 * m / (std::sqrt(v) + 1e-8)).epsilon(1e-12));
    }
    SUBCASE("minimizes a quadratic") {
        AdamState st;
        st.lr = 0.05;
        std::vector<double> p{5.0, -3.0};
        for (int i = 0; i < 3000; ++i) {
            const std::vector<double> g{2.0 * (p[0] - 1.0), 8.0 * (p[1] + 2.0)};
            adam_step(st, p, g);
        }
        CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(p[1] == doctest::Approx(-2.0).epsilon(1e-3));
    }
    SUBCASE("size mismatch") {
        AdamState st;
        std::vector<double> p{1.0};
        CHECK_THROWS_AS(adam_step(st, p, std::vector<double>{1.0, 2.0}), Error);
    }
}
