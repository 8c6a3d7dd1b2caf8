#ifndef FACTOREDQ_MLP_HPP
#define FACTOREDQ_MLP_HPP

#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "factoredq/action_space.hpp"

namespace factoredq {

/// Raised when a parameter or TD error leaves the finite range during training.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Weights and biases of the two-headed perceptron.
///
/// One hidden ReLU layer feeds a scalar head (psi) and a vector head (phi).
/// All values live in one contiguous buffer so that a gradient is itself a
/// NetworkParams and an update is a single axpy over `values()`.
///
/// Layout: w_in [n_hidden x n_input] row-major, b_hidden [n_hidden],
/// w_psi [n_hidden], b_psi, w_phi [n_phi x n_hidden] row-major, b_phi [n_phi].
class NetworkParams {
public:
    NetworkParams() = default;

    NetworkParams(std::size_t n_input, std::size_t n_hidden, std::size_t n_phi)
        : n_input_(n_input), n_hidden_(n_hidden), n_phi_(n_phi) {
        if (n_input == 0 || n_hidden == 0 || n_phi == 0) {
            throw std::invalid_argument("NetworkParams: all dimensions must be >= 1");
        }
        data_.assign(n_hidden * n_input + n_hidden + n_hidden + 1 + n_phi * n_hidden + n_phi, 0.0);
    }

    std::size_t n_input() const { return n_input_; }
    std::size_t n_hidden() const { return n_hidden_; }
    std::size_t n_phi() const { return n_phi_; }
    std::size_t size() const { return data_.size(); }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    double& w_in(std::size_t h, std::size_t i) { return data_[h * n_input_ + i]; }
    double w_in(std::size_t h, std::size_t i) const { return data_[h * n_input_ + i]; }
    double& b_hidden(std::size_t h) { return data_[off_b_hidden() + h]; }
    double b_hidden(std::size_t h) const { return data_[off_b_hidden() + h]; }
    double& w_psi(std::size_t h) { return data_[off_w_psi() + h]; }
    double w_psi(std::size_t h) const { return data_[off_w_psi() + h]; }
    double& b_psi() { return data_[off_b_psi()]; }
    double b_psi() const { return data_[off_b_psi()]; }
    double& w_phi(std::size_t k, std::size_t h) { return data_[off_w_phi() + k * n_hidden_ + h]; }
    double w_phi(std::size_t k, std::size_t h) const { return data_[off_w_phi() + k * n_hidden_ + h]; }
    double& b_phi(std::size_t k) { return data_[off_b_phi() + k]; }
    double b_phi(std::size_t k) const { return data_[off_b_phi() + k]; }

    bool all_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    bool same_shape(const NetworkParams& other) const {
        return n_input_ == other.n_input_ && n_hidden_ == other.n_hidden_ && n_phi_ == other.n_phi_;
    }

    friend bool operator==(const NetworkParams&, const NetworkParams&) = default;

private:
    std::size_t off_b_hidden() const { return n_hidden_ * n_input_; }
    std::size_t off_w_psi() const { return off_b_hidden() + n_hidden_; }
    std::size_t off_b_psi() const { return off_w_psi() + n_hidden_; }
    std::size_t off_w_phi() const { return off_b_psi() + 1; }
    std::size_t off_b_phi() const { return off_w_phi() + n_phi_ * n_hidden_; }

    std::size_t n_input_ = 0;
    std::size_t n_hidden_ = 0;
    std::size_t n_phi_ = 0;
    std::vector<double> data_;
};

/// Outputs of one forward pass: Q(s, a) = psi + a . phi.
struct QOutputs {
    double psi = 0.0;
    std::vector<double> phi;

    friend bool operator==(const QOutputs&, const QOutputs&) = default;
};

/// Half-width of the input-to-hidden weight interval, sqrt(6) / sqrt(n_hidden + n_input).
inline double input_weight_bound(std::size_t n_input, std::size_t n_hidden) {
    return std::sqrt(6.0) / std::sqrt(static_cast<double>(n_hidden + n_input));
}

inline constexpr double kOutputWeightBound = 0.01;

/// Samples a fresh network. Biases start at zero.
template <class Rng>
NetworkParams init_network(std::size_t n_input, std::size_t n_hidden, std::size_t n_phi, Rng& rng) {
    NetworkParams p(n_input, n_hidden, n_phi);
    const double bound = input_weight_bound(n_input, n_hidden);
    std::uniform_real_distribution<double> in_dist(-bound, bound);
    std::uniform_real_distribution<double> out_dist(-kOutputWeightBound, kOutputWeightBound);
    for (std::size_t h = 0; h < n_hidden; ++h) {
        for (std::size_t i = 0; i < n_input; ++i) p.w_in(h, i) = in_dist(rng);
    }
    for (std::size_t h = 0; h < n_hidden; ++h) p.w_psi(h) = out_dist(rng);
    for (std::size_t k = 0; k < n_phi; ++k) {
        for (std::size_t h = 0; h < n_hidden; ++h) p.w_phi(k, h) = out_dist(rng);
    }
    return p;
}

namespace detail {

inline void check_state(const NetworkParams& p, std::span<const double> state) {
    if (state.size() != p.n_input()) {
        throw std::invalid_argument("state length " + std::to_string(state.size()) +
                                    " does not match network input " + std::to_string(p.n_input()));
    }
}

// Hidden pre-activations. Zero inputs are skipped: the environments emit
// sparse bit vectors, so this is most of the cost of a step.
inline void hidden_preactivation(const NetworkParams& p, std::span<const double> state, std::vector<double>& pre) {
    pre.resize(p.n_hidden());
    for (std::size_t h = 0; h < p.n_hidden(); ++h) pre[h] = p.b_hidden(h);
    for (std::size_t i = 0; i < p.n_input(); ++i) {
        const double x = state[i];
        if (x == 0.0) continue;
        for (std::size_t h = 0; h < p.n_hidden(); ++h) pre[h] += p.w_in(h, i) * x;
    }
}

}  // namespace detail

inline QOutputs forward(const NetworkParams& p, std::span<const double> state) {
    detail::check_state(p, state);
    std::vector<double> hidden;
    detail::hidden_preactivation(p, state, hidden);
    for (double& v : hidden) v = v > 0.0 ? v : 0.0;

    QOutputs out;
    out.psi = p.b_psi();
    for (std::size_t h = 0; h < p.n_hidden(); ++h) out.psi += p.w_psi(h) * hidden[h];
    out.phi.resize(p.n_phi());
    for (std::size_t k = 0; k < p.n_phi(); ++k) {
        double acc = p.b_phi(k);
        for (std::size_t h = 0; h < p.n_hidden(); ++h) acc += p.w_phi(k, h) * hidden[h];
        out.phi[k] = acc;
    }
    return out;
}

/// Backward pass seeded with `psi_seed` at psi and `phi_seed[k]` at phi_k,
/// accumulated into `grad` scaled by `scale`. The ReLU derivative at 0 is 0.
inline void accumulate_backward(const NetworkParams& p, std::span<const double> state, double psi_seed,
                                std::span<const double> phi_seed, double scale, NetworkParams& grad) {
    detail::check_state(p, state);
    if (phi_seed.size() != p.n_phi()) {
        throw std::invalid_argument("phi seed length does not match network output");
    }
    if (!grad.same_shape(p)) {
        throw std::invalid_argument("gradient buffer shape does not match network");
    }

    std::vector<double> pre;
    detail::hidden_preactivation(p, state, pre);

    std::vector<double> d_pre(p.n_hidden(), 0.0);
    for (std::size_t h = 0; h < p.n_hidden(); ++h) {
        if (pre[h] <= 0.0) continue;
        const double hv = pre[h];
        double d_hidden = psi_seed * p.w_psi(h);
        grad.w_psi(h) += scale * psi_seed * hv;
        for (std::size_t k = 0; k < p.n_phi(); ++k) {
            if (phi_seed[k] == 0.0) continue;
            d_hidden += phi_seed[k] * p.w_phi(k, h);
            grad.w_phi(k, h) += scale * phi_seed[k] * hv;
        }
        d_pre[h] = d_hidden;
    }
    grad.b_psi() += scale * psi_seed;
    for (std::size_t k = 0; k < p.n_phi(); ++k) grad.b_phi(k) += scale * phi_seed[k];

    for (std::size_t h = 0; h < p.n_hidden(); ++h) grad.b_hidden(h) += scale * d_pre[h];
    for (std::size_t i = 0; i < p.n_input(); ++i) {
        const double x = state[i];
        if (x == 0.0) continue;
        for (std::size_t h = 0; h < p.n_hidden(); ++h) grad.w_in(h, i) += scale * d_pre[h] * x;
    }
}

namespace detail {

inline std::vector<double> action_seed(const NetworkParams& p, const ActionVector& action) {
    if (action.size() != p.n_phi()) {
        throw std::invalid_argument("action length " + std::to_string(action.size()) +
                                    " does not match network phi head " + std::to_string(p.n_phi()));
    }
    std::vector<double> seed(action.size());
    for (std::size_t k = 0; k < action.size(); ++k) seed[k] = action[k] ? 1.0 : 0.0;
    return seed;
}

}  // namespace detail

/// Gradient of Q(state, action) with respect to every parameter.
inline NetworkParams q_gradient(const NetworkParams& p, std::span<const double> state, const ActionVector& action) {
    NetworkParams grad(p.n_input(), p.n_hidden(), p.n_phi());
    accumulate_backward(p, state, 1.0, detail::action_seed(p, action), 1.0, grad);
    return grad;
}

/// In-place p += step_size * td_error * dQ/dtheta.
///
/// Equivalent to adding a scaled q_gradient(), but touches only the weights of
/// nonzero inputs and active hidden units. Every derivative is taken at the
/// pre-update parameters.
inline void apply_q_gradient_step(NetworkParams& p, std::span<const double> state, const ActionVector& action,
                                  double td_error, double step_size) {
    detail::check_state(p, state);
    const auto seed = detail::action_seed(p, action);
    if (!std::isfinite(td_error)) throw DivergenceError("non-finite TD error");
    if (td_error == 0.0 || step_size == 0.0) return;
    const double scale = step_size * td_error;

    std::vector<double> pre;
    detail::hidden_preactivation(p, state, pre);

    bool finite = true;
    auto bump = [&finite](double& w, double delta) {
        w += delta;
        finite = finite && std::isfinite(w);
    };

    std::vector<double> d_pre(p.n_hidden(), 0.0);
    for (std::size_t h = 0; h < p.n_hidden(); ++h) {
        if (pre[h] <= 0.0) continue;
        const double hv = pre[h];
        double d_hidden = p.w_psi(h);
        for (std::size_t k = 0; k < p.n_phi(); ++k) {
            if (seed[k] != 0.0) d_hidden += seed[k] * p.w_phi(k, h);
        }
        d_pre[h] = d_hidden;
        bump(p.w_psi(h), scale * hv);
        for (std::size_t k = 0; k < p.n_phi(); ++k) {
            if (seed[k] != 0.0) bump(p.w_phi(k, h), scale * seed[k] * hv);
        }
    }
    bump(p.b_psi(), scale);
    for (std::size_t k = 0; k < p.n_phi(); ++k) {
        if (seed[k] != 0.0) bump(p.b_phi(k), scale * seed[k]);
    }
    for (std::size_t h = 0; h < p.n_hidden(); ++h) {
        if (d_pre[h] != 0.0) bump(p.b_hidden(h), scale * d_pre[h]);
    }
    for (std::size_t i = 0; i < p.n_input(); ++i) {
        const double x = state[i];
        if (x == 0.0) continue;
        for (std::size_t h = 0; h < p.n_hidden(); ++h) {
            if (d_pre[h] != 0.0) bump(p.w_in(h, i), scale * d_pre[h] * x);
        }
    }
    if (!finite) throw DivergenceError("non-finite network parameter after update");
}

inline NetworkParams q_gradient_step(NetworkParams p, std::span<const double> state, const ActionVector& action,
                                     double td_error, double step_size) {
    apply_q_gradient_step(p, state, action, td_error, step_size);
    return p;
}

}  // namespace factoredq

#endif  // FACTOREDQ_MLP_HPP
