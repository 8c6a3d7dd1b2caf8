#ifndef FACTOREDQ_POLICIES_HPP
#define FACTOREDQ_POLICIES_HPP

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "factoredq/action_algebra.hpp"

namespace factoredq {

enum class PolicyKind { epsilon_greedy, bitwise_epsilon_greedy, agentwise_epsilon_greedy, softmax };

/// Behavior policy plus its one exploration parameter (epsilon or beta).
struct PolicySpec {
    PolicyKind kind = PolicyKind::epsilon_greedy;
    double parameter = 0.1;

    static PolicySpec epsilon_greedy(double eps) { return {PolicyKind::epsilon_greedy, eps}; }
    static PolicySpec bitwise(double eps_bit) { return {PolicyKind::bitwise_epsilon_greedy, eps_bit}; }
    static PolicySpec agentwise(double eps_agent) { return {PolicyKind::agentwise_epsilon_greedy, eps_agent}; }
    static PolicySpec softmax(double beta) { return {PolicyKind::softmax, beta}; }

    friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

inline std::string_view policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::epsilon_greedy: return "egreedy";
        case PolicyKind::bitwise_epsilon_greedy: return "bitwise";
        case PolicyKind::agentwise_epsilon_greedy: return "agentwise";
        case PolicyKind::softmax: return "softmax";
    }
    return "?";
}

inline PolicyKind parse_policy_kind(std::string_view name) {
    if (name == "egreedy") return PolicyKind::epsilon_greedy;
    if (name == "bitwise") return PolicyKind::bitwise_epsilon_greedy;
    if (name == "agentwise") return PolicyKind::agentwise_epsilon_greedy;
    if (name == "softmax") return PolicyKind::softmax;
    throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

namespace detail {

inline void check_probability(double eps, const char* what) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
}

template <class Rng>
std::size_t uniform_index(std::size_t n, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace detail

/// Throws if the spec's parameter is out of range or the policy does not
/// apply to `space`.
inline void validate(const PolicySpec& spec, const ActionSpace& space) {
    switch (spec.kind) {
        case PolicyKind::epsilon_greedy:
            detail::check_probability(spec.parameter, "epsilon");
            return;
        case PolicyKind::bitwise_epsilon_greedy:
            detail::check_probability(spec.parameter, "eps_bit");
            if (!space.is_binary()) throw std::invalid_argument("bit-wise epsilon-greedy needs a binary action space");
            return;
        case PolicyKind::agentwise_epsilon_greedy:
            detail::check_probability(spec.parameter, "eps_agent");
            if (space.kind() != SpaceKind::factored) {
                throw std::invalid_argument("agent-wise epsilon-greedy needs a factored action space");
            }
            return;
        case PolicyKind::softmax:
            detail::check_beta(spec.parameter);
            return;
    }
}

/// Fair bits for binary spaces; an independent uniform choice per group otherwise.
template <class Rng>
ActionVector uniform_random_action(const ActionSpace& space, Rng& rng) {
    ActionVector a(space.bit_length());
    if (space.is_binary()) {
        std::bernoulli_distribution coin(0.5);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = coin(rng) ? 1 : 0;
        return a;
    }
    for (const Group& g : space.groups()) a[g.offset + detail::uniform_index(g.size, rng)] = 1;
    return a;
}

template <class Rng>
ActionVector epsilon_greedy(const QOutputs& out, const ActionSpace& space, double epsilon, Rng& rng) {
    detail::check_probability(epsilon, "epsilon");
    space.require_length(out.phi.size(), "phi");
    if (std::bernoulli_distribution(epsilon)(rng)) return uniform_random_action(space, rng);
    return greedy_action(out.phi, space);
}

/// Each bit is independently replaced by a fair coin with probability eps_bit.
template <class Rng>
ActionVector bitwise_epsilon_greedy(const QOutputs& out, const ActionSpace& space, double eps_bit, Rng& rng) {
    detail::check_probability(eps_bit, "eps_bit");
    if (!space.is_binary()) throw std::invalid_argument("bit-wise epsilon-greedy needs a binary action space");
    ActionVector a = greedy_action(out.phi, space);
    std::bernoulli_distribution explore(eps_bit);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (explore(rng)) a[i] = coin(rng) ? 1 : 0;
    }
    return a;
}

/// Each group independently explores with probability eps_agent.
template <class Rng>
ActionVector agentwise_epsilon_greedy(const QOutputs& out, const ActionSpace& space, double eps_agent, Rng& rng) {
    detail::check_probability(eps_agent, "eps_agent");
    if (space.kind() != SpaceKind::factored) {
        throw std::invalid_argument("agent-wise epsilon-greedy needs a factored action space");
    }
    ActionVector a = greedy_action(out.phi, space);
    std::bernoulli_distribution explore(eps_agent);
    for (const Group& g : space.groups()) {
        if (!explore(rng)) continue;
        for (std::size_t i = 0; i < g.size; ++i) a[g.offset + i] = 0;
        a[g.offset + detail::uniform_index(g.size, rng)] = 1;
    }
    return a;
}

template <class Rng>
ActionVector softmax_policy(const QOutputs& out, const ActionSpace& space, double beta, Rng& rng) {
    return softmax_sample(out.phi, beta, space, rng);
}

template <class Rng>
ActionVector select_action(const PolicySpec& spec, const QOutputs& out, const ActionSpace& space, Rng& rng) {
    switch (spec.kind) {
        case PolicyKind::epsilon_greedy: return epsilon_greedy(out, space, spec.parameter, rng);
        case PolicyKind::bitwise_epsilon_greedy: return bitwise_epsilon_greedy(out, space, spec.parameter, rng);
        case PolicyKind::agentwise_epsilon_greedy: return agentwise_epsilon_greedy(out, space, spec.parameter, rng);
        case PolicyKind::softmax: return softmax_policy(out, space, spec.parameter, rng);
    }
    throw std::logic_error("unhandled policy kind");
}

}  // namespace factoredq

#endif  // FACTOREDQ_POLICIES_HPP
