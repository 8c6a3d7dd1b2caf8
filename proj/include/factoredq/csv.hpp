#ifndef FACTOREDQ_CSV_HPP
#define FACTOREDQ_CSV_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <system_error>

#include "factoredq/trainer.hpp"

namespace factoredq {

inline constexpr const char* kEpisodesHeader = "run,episode,steps,total_reward,truncated";
inline constexpr const char* kWindowsHeader = "run,step,avg_reward_last_1000";
inline constexpr const char* kRunsHeader = "run,diverged,diverged_episode,total_steps";

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& os, std::span<const EpisodeRecord> records) {
    os << kEpisodesHeader << '\n';
    for (const auto& r : records) {
        os << r.run << ',' << r.episode << ',' << r.steps << ',' << format_double(r.total_reward) << ','
           << (r.truncated ? 1 : 0) << '\n';
    }
}

inline void write_csv(std::ostream& os, std::span<const WindowRecord> records) {
    os << kWindowsHeader << '\n';
    for (const auto& r : records) {
        os << r.run << ',' << r.step << ',' << format_double(r.avg_reward_last_1000) << '\n';
    }
}

inline void write_csv(std::ostream& os, std::span<const RunResult> runs) {
    os << kRunsHeader << '\n';
    for (const auto& r : runs) {
        os << r.run << ',' << (r.diverged ? 1 : 0) << ',' << r.diverged_episode << ',' << r.total_steps << '\n';
    }
}

/// Writes to `path` in binary mode so line endings stay LF on every platform.
template <class Record>
void write_csv(std::span<const Record> records, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_csv(os, records);
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace factoredq

#endif  // FACTOREDQ_CSV_HPP
