#include "eqf/error.hpp"
#include "eqf/neural/layers.hpp"
#include "init.hpp"

namespace eqf::nn {

namespace {

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) { return 1.0 / (1.0 + (-z).exp()); }

}  // namespace

Lstm::Lstm(std::size_t input_dim, std::size_t units, bool return_sequences)
    : input_dim_(input_dim),
      units_(units),
      return_sequences_(return_sequences),
      w_input_({4 * units, input_dim}),
      w_recurrent_({4 * units, units}),
      bias_({4 * units}),
      g_input_({4 * units, input_dim}),
      g_recurrent_({4 * units, units}),
      g_bias_({4 * units}) {
    if (units == 0 || input_dim == 0) throw Error(Errc::ShapeMismatch, "LSTM needs units and input_dim >= 1");
}

void Lstm::initialize(std::mt19937_64& rng) {
    const auto u = static_cast<double>(units_);
    detail::glorot_uniform(w_input_, static_cast<double>(input_dim_), 4.0 * u, rng);
    detail::glorot_uniform(w_recurrent_, u, 4.0 * u, rng);
    bias_.fill(0.0);
    // Forget-gate bias starts at 1.
    for (std::size_t k = units_; k < 2 * units_; ++k) bias_[k] = 1.0;
}

Tensor Lstm::forward(const Tensor& x, bool /*training*/) {
    LstmState zero{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(units_)),
                   Eigen::VectorXd::Zero(static_cast<Eigen::Index>(units_))};
    Tensor seq = forward_from(x, zero, nullptr);
    if (return_sequences_) return seq;
    Tensor last({units_});
    last.vector() = seq.matrix().row(static_cast<Eigen::Index>(seq.dim(0) - 1)).transpose();
    return last;
}

Tensor Lstm::forward_from(const Tensor& x, const LstmState& initial, LstmState* final_state) {
    if (x.rank() != 2 || x.dim(1) != input_dim_ || x.dim(0) == 0)
        throw Error(Errc::ShapeMismatch, "LSTM expects [T, " + std::to_string(input_dim_) + "]");
    const auto u = static_cast<Eigen::Index>(units_);
    if (initial.h.size() != u || initial.c.size() != u) throw Error(Errc::ShapeMismatch, "LSTM initial state size");
    const auto T = static_cast<Eigen::Index>(x.dim(0));

    x_ = x.matrix();
    const ConstMatrixMap W = static_cast<const Tensor&>(w_input_).matrix();
    const ConstMatrixMap U = static_cast<const Tensor&>(w_recurrent_).matrix();
    const RowMatrix pre = (x_ * W.transpose()).rowwise() + bias_.vector().transpose();

    for (RowMatrix* m : {&gi_, &gf_, &gg_, &go_, &c_, &h_, &c_prev_, &h_prev_}) m->resize(T, u);

    Eigen::VectorXd h = initial.h, c = initial.c;
    Eigen::VectorXd z(4 * u);
    for (Eigen::Index t = 0; t < T; ++t) {
        h_prev_.row(t) = h.transpose();
        c_prev_.row(t) = c.transpose();
        z.noalias() = pre.row(t).transpose();
        z.noalias() += U * h;
        const Eigen::ArrayXd i = sigmoid(z.segment(0, u).array());
        const Eigen::ArrayXd f = sigmoid(z.segment(u, u).array());
        const Eigen::ArrayXd g = z.segment(2 * u, u).array().tanh();
        const Eigen::ArrayXd o = sigmoid(z.segment(3 * u, u).array());
        c = (f * c.array() + i * g).matrix();
        h = (o * c.array().tanh()).matrix();
        gi_.row(t) = i.matrix().transpose();
        gf_.row(t) = f.matrix().transpose();
        gg_.row(t) = g.matrix().transpose();
        go_.row(t) = o.matrix().transpose();
        c_.row(t) = c.transpose();
        h_.row(t) = h.transpose();
    }
    if (final_state) *final_state = {h, c};

    Tensor out({x.dim(0), units_});
    out.matrix() = h_;
    return out;
}

Tensor Lstm::backward(const Tensor& grad_out) {
    const auto u = static_cast<Eigen::Index>(units_);
    const auto T = h_.rows();
    RowMatrix dH = RowMatrix::Zero(T, u);
    if (return_sequences_) {
        if (grad_out.size() != static_cast<std::size_t>(T * u)) throw Error(Errc::ShapeMismatch, "LSTM gradient size");
        dH = grad_out.matrix();
    } else {
        if (grad_out.size() != units_) throw Error(Errc::ShapeMismatch, "LSTM gradient size");
        dH.row(T - 1) = grad_out.vector().transpose();
    }

    const ConstMatrixMap W = static_cast<const Tensor&>(w_input_).matrix();
    const ConstMatrixMap U = static_cast<const Tensor&>(w_recurrent_).matrix();
    RowMatrix dZ(T, 4 * u);
    Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(u), dc_next = Eigen::VectorXd::Zero(u);
    for (Eigen::Index t = T - 1; t >= 0; --t) {
        const Eigen::ArrayXd dh = dH.row(t).transpose().array() + dh_next.array();
        const Eigen::ArrayXd i = gi_.row(t).transpose().array();
        const Eigen::ArrayXd f = gf_.row(t).transpose().array();
        const Eigen::ArrayXd g = gg_.row(t).transpose().array();
        const Eigen::ArrayXd o = go_.row(t).transpose().array();
        const Eigen::ArrayXd tc = c_.row(t).transpose().array().tanh();

        const Eigen::ArrayXd d_o = dh * tc;
        const Eigen::ArrayXd dc = dh * o * (1.0 - tc * tc) + dc_next.array();
        dc_next = (dc * f).matrix();

        dZ.block(t, 0, 1, u) = (dc * g * i * (1.0 - i)).matrix().transpose();
        dZ.block(t, u, 1, u) = (dc * c_prev_.row(t).transpose().array() * f * (1.0 - f)).matrix().transpose();
        dZ.block(t, 2 * u, 1, u) = (dc * i * (1.0 - g * g)).matrix().transpose();
        dZ.block(t, 3 * u, 1, u) = (d_o * o * (1.0 - o)).matrix().transpose();
        dh_next.noalias() = U.transpose() * dZ.row(t).transpose();
    }

    g_input_.matrix().noalias() += dZ.transpose() * x_;
    g_recurrent_.matrix().noalias() += dZ.transpose() * h_prev_;
    g_bias_.vector() += dZ.colwise().sum().transpose();

    Tensor dx({static_cast<std::size_t>(T), input_dim_});
    dx.matrix() = dZ * W;
    return dx;
}

}  // namespace eqf::nn
