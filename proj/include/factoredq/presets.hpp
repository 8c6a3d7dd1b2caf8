#ifndef FACTOREDQ_PRESETS_HPP
#define FACTOREDQ_PRESETS_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "factoredq/envs.hpp"
#include "factoredq/policies.hpp"
#include "factoredq/trainer.hpp"

namespace factoredq {

struct ExperimentPreset {
    std::string name;
    Hyperparams hyper;
};

/// Default exploration parameter of `kind` for the named experiment.
inline double preset_policy_parameter(std::string_view name, PolicyKind kind) {
    switch (kind) {
        case PolicyKind::softmax: return 20.0;
        case PolicyKind::bitwise_epsilon_greedy: return 0.05;
        case PolicyKind::agentwise_epsilon_greedy: return 0.1;
        case PolicyKind::epsilon_greedy: break;
    }
    if (name == "grid-onehot") return 0.1;
    if (name == "grid-binary4") return 0.2;
    return 0.3;
}

/// Settings of the four published experiments. `policy` defaults to
/// conventional epsilon-greedy.
inline ExperimentPreset make_preset(std::string_view name, std::optional<PolicyKind> policy = std::nullopt) {
    ExperimentPreset p;
    p.name = std::string(name);
    Hyperparams& h = p.hyper;
    h.step_size = 0.01;
    h.discount = 0.95;
    h.runs = 10;
    if (name == "grid-onehot" || name == "grid-binary4") {
        h.n_hidden = 50;
        h.episodes = 1000;
    } else if (name == "grid-population") {
        h.n_hidden = 50;
        h.episodes = 2000;
    } else if (name == "blocker") {
        h.n_hidden = 100;
        h.episodes = 0;
        h.total_steps = 200000;
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
    }
    const PolicyKind kind = policy.value_or(PolicyKind::epsilon_greedy);
    h.policy = {kind, preset_policy_parameter(name, kind)};
    validate(h.policy, std::visit([](const auto& e) { return e.spec().action_space; }, make_environment(name)));
    return p;
}

}  // namespace factoredq

#endif  // FACTOREDQ_PRESETS_HPP
