#ifndef FACTOREDQ_ACTION_ALGEBRA_HPP
#define FACTOREDQ_ACTION_ALGEBRA_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "factoredq/action_space.hpp"
#include "factoredq/mlp.hpp"

// Closed-form maximization and sampling for a Q function that is linear in the
// action bits. Because Q(s, a) = psi + sum_i a_i phi_i, the Boltzmann policy
// over all actions factorizes into independent per-bit Bernoulli draws (binary
// spaces) or per-group categorical draws (one-hot and factored spaces).

namespace factoredq {

inline double q_value(const QOutputs& out, const ActionVector& a) {
    if (a.size() != out.phi.size()) {
        throw std::invalid_argument("q_value: action length does not match phi length");
    }
    double q = out.psi;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i]) q += out.phi[i];
    }
    return q;
}

namespace detail {

// Lowest index wins ties.
inline std::size_t group_argmax(std::span<const double> phi, const Group& g) {
    std::size_t best = g.offset;
    for (std::size_t i = g.offset + 1; i < g.offset + g.size; ++i) {
        if (phi[i] > phi[best]) best = i;
    }
    return best;
}

inline double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(1 / (1 + exp(-x))) without overflow.
inline double log_logistic(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

inline void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("inverse temperature beta must be positive and finite");
    }
}

}  // namespace detail

/// Greedy action: sign rule per bit (phi_i = 0 selects 1) for binary spaces,
/// per-group argmax otherwise.
inline ActionVector greedy_action(std::span<const double> phi, const ActionSpace& space) {
    space.require_length(phi.size(), "phi");
    ActionVector a(space.bit_length());
    if (space.is_binary()) {
        for (std::size_t i = 0; i < phi.size(); ++i) a[i] = phi[i] < 0.0 ? 0 : 1;
        return a;
    }
    for (const Group& g : space.groups()) a[detail::group_argmax(phi, g)] = 1;
    return a;
}

/// max over all valid actions of Q, without enumeration.
inline double max_q(const QOutputs& out, const ActionSpace& space) {
    space.require_length(out.phi.size(), "phi");
    double q = out.psi;
    if (space.is_binary()) {
        for (double v : out.phi) q += std::max(v, 0.0);
        return q;
    }
    for (const Group& g : space.groups()) q += out.phi[detail::group_argmax(out.phi, g)];
    return q;
}

/// P(a_i = 1) under the Boltzmann policy, for every bit. Entries of a group
/// sum to 1; binary entries are independent firing probabilities.
inline std::vector<double> bit_probabilities(std::span<const double> phi, double beta, const ActionSpace& space) {
    space.require_length(phi.size(), "phi");
    detail::check_beta(beta);
    std::vector<double> p(phi.size());
    if (space.is_binary()) {
        for (std::size_t i = 0; i < phi.size(); ++i) p[i] = detail::logistic(beta * phi[i]);
        return p;
    }
    for (const Group& g : space.groups()) {
        const double top = phi[detail::group_argmax(phi, g)];
        double total = 0.0;
        for (std::size_t i = g.offset; i < g.offset + g.size; ++i) {
            p[i] = std::exp(beta * (phi[i] - top));
            total += p[i];
        }
        for (std::size_t i = g.offset; i < g.offset + g.size; ++i) p[i] /= total;
    }
    return p;
}

/// Exact draw from the Boltzmann policy exp(beta Q) / Z over the action set.
template <class Rng>
ActionVector softmax_sample(std::span<const double> phi, double beta, const ActionSpace& space, Rng& rng) {
    const std::vector<double> p = bit_probabilities(phi, beta, space);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ActionVector a(space.bit_length());
    if (space.is_binary()) {
        for (std::size_t i = 0; i < p.size(); ++i) a[i] = unit(rng) < p[i] ? 1 : 0;
        return a;
    }
    for (const Group& g : space.groups()) {
        const double u = unit(rng);
        std::size_t pick = g.offset + g.size - 1;
        double cumulative = 0.0;
        for (std::size_t i = g.offset; i < g.offset + g.size; ++i) {
            cumulative += p[i];
            if (u < cumulative) {
                pick = i;
                break;
            }
        }
        a[pick] = 1;
    }
    return a;
}

/// Log-probability of `a` under the factorized Boltzmann policy.
inline double action_log_prob(std::span<const double> phi, double beta, const ActionSpace& space,
                              const ActionVector& a) {
    space.require_length(phi.size(), "phi");
    detail::check_beta(beta);
    space.require_valid(a);
    double lp = 0.0;
    if (space.is_binary()) {
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const double x = beta * phi[i];
            lp += detail::log_logistic(a[i] ? x : -x);
        }
        return lp;
    }
    for (const Group& g : space.groups()) {
        const double top = phi[detail::group_argmax(phi, g)];
        double total = 0.0;
        std::size_t chosen = g.offset;
        for (std::size_t i = g.offset; i < g.offset + g.size; ++i) {
            total += std::exp(beta * (phi[i] - top));
            if (a[i]) chosen = i;
        }
        lp += beta * (phi[chosen] - top) - std::log(total);
    }
    return lp;
}

inline constexpr std::size_t kEnumerationLimit = std::size_t{1} << 20;

/// Every valid action in lexicographic bit order. Throws past 2^20 actions.
inline std::vector<ActionVector> enumerate_actions(const ActionSpace& space) {
    const std::size_t count = space.action_count();
    if (count > kEnumerationLimit) {
        throw std::length_error("enumerate_actions: " + space.describe() + " has more than 2^20 actions");
    }
    std::vector<ActionVector> out;
    out.reserve(count);
    if (space.is_binary()) {
        const std::size_t k = space.bit_length();
        for (std::size_t code = 0; code < count; ++code) {
            ActionVector a(k);
            for (std::size_t i = 0; i < k; ++i) a[i] = (code >> (k - 1 - i)) & 1U;
            out.push_back(std::move(a));
        }
        return out;
    }
    const auto& groups = space.groups();
    std::vector<std::size_t> choice(groups.size(), 0);
    for (std::size_t n = 0; n < count; ++n) {
        ActionVector a(space.bit_length());
        for (std::size_t j = 0; j < groups.size(); ++j) a[groups[j].offset + choice[j]] = 1;
        out.push_back(std::move(a));
        for (std::size_t j = groups.size(); j-- > 0;) {
            if (++choice[j] < groups[j].size) break;
            choice[j] = 0;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace factoredq

#endif  // FACTOREDQ_ACTION_ALGEBRA_HPP
