#ifndef FACTOREDQ_CLI_HPP
#define FACTOREDQ_CLI_HPP

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "factoredq/csv.hpp"
#include "factoredq/presets.hpp"
#include "factoredq/trainer.hpp"

namespace factoredq {

/// Per-run score used in the printed summary: mean length of the last 20
/// episodes for episode budgets, final reward window for step budgets.
inline double final_performance(const RunResult& r, const Hyperparams& h) {
    if (h.total_steps > 0) return r.windows.empty() ? 0.0 : r.windows.back().avg_reward_last_1000;
    const std::size_t n = std::min<std::size_t>(20, r.episodes.size());
    double sum = 0.0;
    for (std::size_t i = r.episodes.size() - n; i < r.episodes.size(); ++i) sum += r.episodes[i].steps;
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

inline std::optional<std::size_t> thread_cap_from_env() {
    const char* v = std::getenv("FACTOREDQ_THREADS");
    if (v == nullptr || *v == '\0') return std::nullopt;
    char* end = nullptr;
    const unsigned long n = std::strtoul(v, &end, 10);
    if (*end != '\0' || n == 0) return std::nullopt;
    return static_cast<std::size_t>(n);
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Online Q-learning with a linear-in-action value head"};
    app.name("factoredq");

    std::string preset;
    std::string policy;
    std::optional<double> epsilon;
    std::optional<double> beta;
    std::optional<std::size_t> hidden;
    double alpha = 0.01;
    double gamma = 0.95;
    std::optional<std::size_t> episodes;
    std::optional<std::size_t> steps;
    std::size_t runs = 10;
    std::uint64_t seed = 0;
    std::string out_dir = "results";

    app.add_option("--preset", preset, "Experiment: grid-onehot | grid-binary4 | grid-population | blocker")
        ->required()
        ->check(CLI::IsMember({"grid-onehot", "grid-binary4", "grid-population", "blocker"}));
    app.add_option("--policy", policy,
                   "Behavior policy: egreedy | bitwise | agentwise | softmax (default: egreedy)")
        ->check(CLI::IsMember({"egreedy", "bitwise", "agentwise", "softmax"}));
    app.add_option("--epsilon", epsilon,
                   "Exploration rate for egreedy/bitwise/agentwise (default: 0.1 grid-onehot, 0.2 grid-binary4, "
                   "0.3 grid-population and blocker egreedy, 0.05 bitwise, 0.1 agentwise)");
    app.add_option("--beta", beta, "Inverse temperature for softmax (default: 20)");
    app.add_option("--hidden", hidden, "Hidden units (default: 50 grid presets, 100 blocker)");
    app.add_option("--alpha", alpha, "SGD step size")->capture_default_str();
    app.add_option("--gamma", gamma, "Discount factor")->capture_default_str();
    app.add_option("--episodes", episodes, "Episode budget per run (default: 1000 grid-onehot/binary4, 2000 "
                                           "grid-population)");
    app.add_option("--steps", steps, "Step budget per run (default: 200000 blocker)");
    app.add_option("--runs", runs, "Independent runs")->capture_default_str();
    app.add_option("--seed", seed, "Base seed; run r uses seed + r")->capture_default_str();
    app.add_option("--out", out_dir, "Output directory for CSV files")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (episodes && steps) throw std::invalid_argument("--episodes and --steps are mutually exclusive");
        const std::optional<PolicyKind> kind =
            policy.empty() ? std::nullopt : std::optional<PolicyKind>(parse_policy_kind(policy));
        ExperimentPreset p = make_preset(preset, kind);
        Hyperparams& h = p.hyper;
        if (h.policy.kind == PolicyKind::softmax) {
            if (epsilon) throw std::invalid_argument("--epsilon does not apply to the softmax policy");
            if (beta) h.policy.parameter = *beta;
        } else {
            if (beta) throw std::invalid_argument("--beta only applies to the softmax policy");
            if (epsilon) h.policy.parameter = *epsilon;
        }
        if (hidden) h.n_hidden = *hidden;
        h.step_size = alpha;
        h.discount = gamma;
        if (episodes) {
            h.episodes = *episodes;
            h.total_steps = 0;
        }
        if (steps) {
            h.total_steps = *steps;
            h.episodes = 0;
        }
        h.runs = runs;
        h.base_seed = seed;
        h.threads = thread_cap_from_env().value_or(0);
        h.validate();

        const ExperimentResult result = run_experiment(preset, h);

        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        const auto eps = result.episode_records();
        const auto wins = result.window_records();
        write_csv<EpisodeRecord>(eps, dir / "episodes.csv");
        write_csv<WindowRecord>(wins, dir / "windows.csv");
        write_csv<RunResult>(result.runs, dir / "runs.csv");

        std::vector<double> scores;
        for (const RunResult& r : result.runs) {
            if (r.diverged) {
                out << "run " << r.run << ": diverged in episode " << r.diverged_episode << " ("
                    << r.divergence_message << ")\n";
                continue;
            }
            scores.push_back(final_performance(r, h));
        }
        out << "preset " << preset << ", policy " << policy_name(h.policy.kind) << " (" << h.policy.parameter
            << "), " << scores.size() << "/" << result.runs.size() << " runs completed\n";
        if (scores.empty()) {
            err << "all runs diverged\n";
            return 2;
        }
        double mean = 0.0;
        for (double s : scores) mean += s;
        mean /= static_cast<double>(scores.size());
        double var = 0.0;
        for (double s : scores) var += (s - mean) * (s - mean);
        const double sd = scores.size() > 1 ? std::sqrt(var / static_cast<double>(scores.size() - 1)) : 0.0;
        out << (h.total_steps > 0 ? "final avg reward (last 1000 steps): " : "mean steps over last 20 episodes: ")
            << std::fixed << std::setprecision(3) << mean << " +/- " << sd << '\n';
        out << "wrote " << (dir / "episodes.csv").string() << ", " << (dir / "windows.csv").string() << ", "
            << (dir / "runs.csv").string() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace factoredq

#endif  // FACTOREDQ_CLI_HPP
