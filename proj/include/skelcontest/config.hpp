#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "skelcontest/contest.hpp"
#include "skelcontest/dqn.hpp"
#include "skelcontest/error.hpp"
#include "skelcontest/skeleton.hpp"

namespace skelcontest::cli {

/// Bad or unknown configuration; the command line maps it to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct ScenarioSection {
    std::vector<skeleton::MotionKind> profiles = {skeleton::MotionKind::run, skeleton::MotionKind::dance,
                                                  skeleton::MotionKind::wave, skeleton::MotionKind::stand};
    std::vector<std::string> sequences;  // files to load instead of synthesizing
    skeleton::SequenceFormat sequence_format = skeleton::SequenceFormat::csv;
    int native_rate = 60;
    std::size_t joints = 17;
    std::size_t frames = 300;
    int budget = 120;
    double pool = 100.0;
    std::vector<double> awards;  // empty: equal split
    contest::SelectionMode selection_mode = contest::SelectionMode::net;
    double cost_scale = contest::kDefaultCostScale;
    std::optional<double> max_capability;
    skeleton::Reconstruction reconstruction = skeleton::Reconstruction::hold;

    std::size_t user_count() const { return sequences.empty() ? profiles.size() : sequences.size(); }
};

struct SearchSection {
    double step = 5.0;
    std::uint64_t effort_cap = 10'000'000;
};

struct CodecSection {
    double lo = -2.0;
    double hi = 2.0;
    std::uint64_t image_width = 1080;
    std::uint64_t image_height = 1908;
    std::uint64_t bits_per_pixel = 32;
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    ScenarioSection scenario;
    dqn::DqnConfig dqn;
    SearchSection search;
    CodecSection codec;

    void validate() const;
};

/// Sections: [run] [scenario] [dqn] [search] [codec]; `key = value` lines,
/// `#` or `;` comments. Lists are comma-separated. Unknown keys are errors.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Writes every key with its current value, as parse_config reads it.
void write_config(std::ostream& out, const RunConfig& cfg);

}  // namespace skelcontest::cli
