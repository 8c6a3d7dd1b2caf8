#ifndef FACTOREDQ_TRAINER_HPP
#define FACTOREDQ_TRAINER_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "factoredq/action_algebra.hpp"
#include "factoredq/envs.hpp"
#include "factoredq/mlp.hpp"
#include "factoredq/policies.hpp"

namespace factoredq {

inline constexpr double kDivergenceTdError = 1e6;

struct Hyperparams {
    double step_size = 0.01;
    double discount = 0.95;
    std::size_t n_hidden = 50;
    PolicySpec policy = PolicySpec::epsilon_greedy(0.1);
    /// Exactly one of `episodes` and `total_steps` is nonzero.
    std::size_t episodes = 1000;
    std::size_t total_steps = 0;
    std::size_t runs = 10;
    std::uint64_t base_seed = 0;
    /// Worker threads for independent runs; 0 means one per run.
    std::size_t threads = 0;
    std::size_t window = 1000;
    /// A WindowRecord is emitted every `window_stride` environment steps.
    std::size_t window_stride = 1000;

    void validate() const {
        if (!(step_size >= 0.0) || !std::isfinite(step_size)) throw std::invalid_argument("step size must be >= 0");
        if (!(discount >= 0.0 && discount < 1.0)) throw std::invalid_argument("discount must lie in [0, 1)");
        if (n_hidden == 0) throw std::invalid_argument("n_hidden must be >= 1");
        if ((episodes == 0) == (total_steps == 0)) {
            throw std::invalid_argument("set exactly one of an episode budget or a step budget");
        }
        if (runs == 0) throw std::invalid_argument("runs must be >= 1");
        if (window == 0 || window_stride == 0) throw std::invalid_argument("window sizes must be >= 1");
    }
};

struct EpisodeRecord {
    std::size_t run = 0;
    std::size_t episode = 0;
    std::size_t steps = 0;
    double total_reward = 0.0;
    bool truncated = false;

    friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct WindowRecord {
    std::size_t run = 0;
    std::size_t step = 0;
    double avg_reward_last_1000 = 0.0;

    friend bool operator==(const WindowRecord&, const WindowRecord&) = default;
};

/// Mean of the most recent `capacity` per-step rewards.
class RewardWindow {
public:
    explicit RewardWindow(std::size_t capacity = 1000) : buffer_(capacity, 0.0) {}

    void push(double r) {
        const std::size_t slot = seen_ % buffer_.size();
        if (seen_ >= buffer_.size()) sum_ -= buffer_[slot];
        buffer_[slot] = r;
        sum_ += r;
        ++seen_;
    }

    std::size_t seen() const { return seen_; }
    std::size_t filled() const { return std::min(seen_, buffer_.size()); }
    double average() const { return filled() == 0 ? 0.0 : sum_ / static_cast<double>(filled()); }

private:
    std::vector<double> buffer_;
    double sum_ = 0.0;
    std::size_t seen_ = 0;
};

/// Q-learning target. Truncated transitions bootstrap like ordinary ones.
inline double td_target(double reward, const QOutputs& next_out, const ActionSpace& space, double discount,
                        bool terminal, bool truncated) {
    (void)truncated;
    if (terminal) return reward;
    return reward + discount * max_q(next_out, space);
}

/// Per-step hook: called with each reward after the update for that step.
struct NoStepObserver {
    void operator()(double) const {}
};

/// Runs one episode of online Q-learning, updating `params` after every step.
/// Stops early (marking the episode truncated) once `step_limit` steps have
/// been taken, which lets step-budgeted experiments end mid-episode.
template <class Env, class Rng, class Observer = NoStepObserver>
EpisodeRecord run_episode(Env& env, NetworkParams& params, const Hyperparams& hyper, Rng& rng,
                          Observer&& on_step = {},
                          std::size_t step_limit = std::numeric_limits<std::size_t>::max()) {
    const EnvSpec spec = env.spec();
    const ActionSpace& space = spec.action_space;
    if (params.n_input() != spec.state_dim || params.n_phi() != space.bit_length()) {
        throw std::invalid_argument("network shape does not match environment");
    }

    EpisodeRecord rec;
    State state = env.reset(rng);
    QOutputs out = forward(params, state);
    while (true) {
        const ActionVector action = select_action(hyper.policy, out, space, rng);
        StepResult step = env.step(action, rng);

        const QOutputs next_out = forward(params, step.next_state);
        const double target = td_target(step.reward, next_out, space, hyper.discount, step.terminal, step.truncated);
        const double td_error = target - q_value(out, action);
        if (!std::isfinite(td_error) || std::abs(td_error) > kDivergenceTdError) {
            throw DivergenceError("TD error " + std::to_string(td_error) + " outside the divergence threshold");
        }
        apply_q_gradient_step(params, state, action, td_error, hyper.step_size);

        ++rec.steps;
        rec.total_reward += step.reward;
        on_step(step.reward);

        if (step.terminal) break;
        if (step.truncated || rec.steps >= step_limit) {
            rec.truncated = true;
            break;
        }
        state = std::move(step.next_state);
        out = forward(params, state);
    }
    return rec;
}

/// Plays one episode with the greedy policy and no parameter updates.
template <class Env, class Rng>
EpisodeRecord greedy_episode(Env& env, const NetworkParams& params, Rng& rng) {
    Hyperparams frozen;
    frozen.step_size = 0.0;
    frozen.policy = PolicySpec::epsilon_greedy(0.0);
    NetworkParams copy = params;
    return run_episode(env, copy, frozen, rng);
}

struct RunResult {
    std::size_t run = 0;
    std::vector<EpisodeRecord> episodes;
    std::vector<WindowRecord> windows;
    std::size_t total_steps = 0;
    bool diverged = false;
    /// Index of the episode in which divergence was detected.
    std::size_t diverged_episode = 0;
    std::string divergence_message;
    /// Parameters at the end of the run (at the failing update if it diverged).
    NetworkParams params;
};

inline std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run) { return base_seed + run; }

/// One independent training run: fresh network, environment and rng.
template <class Env>
RunResult run_single(Env env, const Hyperparams& hyper, std::size_t run) {
    std::mt19937_64 rng(run_seed(hyper.base_seed, run));
    const EnvSpec spec = env.spec();
    validate(hyper.policy, spec.action_space);
    NetworkParams params = init_network(spec.state_dim, hyper.n_hidden, spec.action_space.bit_length(), rng);

    RunResult result;
    result.run = run;
    RewardWindow window(hyper.window);
    auto observe = [&](double reward) {
        window.push(reward);
        ++result.total_steps;
        if (result.total_steps % hyper.window_stride == 0) {
            result.windows.push_back({run, result.total_steps, window.average()});
        }
    };

    std::size_t episode = 0;
    try {
        while (hyper.episodes > 0 ? episode < hyper.episodes : result.total_steps < hyper.total_steps) {
            const std::size_t limit = hyper.total_steps > 0 ? hyper.total_steps - result.total_steps
                                                            : std::numeric_limits<std::size_t>::max();
            EpisodeRecord rec = run_episode(env, params, hyper, rng, observe, limit);
            rec.run = run;
            rec.episode = episode;
            result.episodes.push_back(rec);
            ++episode;
        }
    } catch (const DivergenceError& e) {
        result.diverged = true;
        result.diverged_episode = episode;
        result.divergence_message = e.what();
    }
    result.params = std::move(params);
    return result;
}

struct ExperimentResult {
    std::vector<RunResult> runs;

    /// Records of runs that did not diverge, ordered by run then episode.
    std::vector<EpisodeRecord> episode_records() const {
        std::vector<EpisodeRecord> out;
        for (const RunResult& r : runs) {
            if (!r.diverged) out.insert(out.end(), r.episodes.begin(), r.episodes.end());
        }
        return out;
    }

    std::vector<WindowRecord> window_records() const {
        std::vector<WindowRecord> out;
        for (const RunResult& r : runs) {
            if (!r.diverged) out.insert(out.end(), r.windows.begin(), r.windows.end());
        }
        return out;
    }

    std::size_t diverged_count() const {
        return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const RunResult& r) { return r.diverged; }));
    }
};

/// Executes `hyper.runs` independent runs, in parallel up to `hyper.threads`.
/// Results are ordered by run index regardless of scheduling.
inline ExperimentResult run_experiment(const Environment& env, const Hyperparams& hyper) {
    hyper.validate();
    std::visit([&](const auto& e) { validate(hyper.policy, e.spec().action_space); }, env);

    ExperimentResult result;
    result.runs.resize(hyper.runs);
    const std::size_t workers = std::clamp<std::size_t>(hyper.threads == 0 ? hyper.runs : hyper.threads, 1, hyper.runs);

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(hyper.runs);
    auto work = [&] {
        for (std::size_t r = next++; r < hyper.runs; r = next++) {
            try {
                result.runs[r] = std::visit([&](const auto& e) { return run_single(e, hyper, r); }, env);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return result;
}

inline ExperimentResult run_experiment(std::string_view env_name, const Hyperparams& hyper) {
    return run_experiment(make_environment(env_name), hyper);
}

}  // namespace factoredq

#endif  // FACTOREDQ_TRAINER_HPP
