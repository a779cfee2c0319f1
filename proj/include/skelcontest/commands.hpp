#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "skelcontest/config.hpp"
#include "skelcontest/contest.hpp"
#include "skelcontest/dqn.hpp"
#include "skelcontest/oracle.hpp"

namespace skelcontest::cli {

/// Synthesizes (or loads) every user's sequence and builds the contest.
/// The scenario's award setting is the configured awards or the equal split.
contest::ScenarioConfig build_scenario(const RunConfig& cfg);

/// The user's synthetic sequence; seeded by the run seed and user index.
skeleton::SkeletonSequence synthesize_user(const RunConfig& cfg, std::size_t user);

/// Writes `contents` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// ---------------------------------------------------------------------------

struct GenReport {
    std::vector<std::filesystem::path> files;
};
GenReport cmd_gen(const RunConfig& cfg);

struct ContestReport {
    contest::ScenarioConfig scenario;
    contest::ContestOutcome outcome;
    std::filesystem::path csv_path;
    std::string csv;
};
/// Runs one contest; `awards` must sum to the configured pool.
ContestReport cmd_contest(const RunConfig& cfg, const std::vector<double>& awards);

struct TrainReport {
    dqn::TrainResult result;
    std::filesystem::path policy_path;
    std::filesystem::path history_path;
};
TrainReport cmd_train(const RunConfig& cfg);

struct CompareRow {
    std::string method;
    std::vector<double> awards;  // empty when the method sets efforts directly
    std::vector<int> efforts;
    double total_loss = 0.0;
    double reduction_percent = 0.0;  // relative to the average baseline
};
struct CompareReport {
    std::vector<CompareRow> rows;  // average_baseline, dqn, social_optimum
    std::filesystem::path csv_path;
    std::string csv;

    const CompareRow& row(const std::string& method) const;
};
/// Baseline vs the trained policy's award setting vs the social optimum.
/// Throws Error when the policy file is missing.
CompareReport cmd_compare(const RunConfig& cfg, const std::filesystem::path& policy_path);

enum class CodecDirection { encode, decode };
struct CodecReport {
    std::size_t frames = 0;
    std::size_t joints = 0;
    std::size_t bytes_per_frame = 0;
    std::size_t payload_bytes = 0;
    double compression_ratio = 0.0;
    std::filesystem::path output_path;
    std::string text;  // human-readable summary
};
CodecReport cmd_codec(const RunConfig& cfg, const std::filesystem::path& input, CodecDirection direction,
                      const std::filesystem::path& output);

struct SearchReport {
    oracle::SearchResult awards;
    oracle::EffortProfile social_optimum;
    std::filesystem::path ledger_path;
    std::string summary;
};
SearchReport cmd_search(const RunConfig& cfg);

}  // namespace skelcontest::cli
