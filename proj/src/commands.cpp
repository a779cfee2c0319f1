#include "skelcontest/commands.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "skelcontest/rng.hpp"

namespace skelcontest::cli {

namespace fs = std::filesystem;

namespace {

fs::path out_path(const RunConfig& cfg, const std::string& name) { return fs::path(cfg.out_dir) / name; }

std::string user_file_name(const RunConfig& cfg, std::size_t user) {
    const auto ext = cfg.scenario.sequence_format == skeleton::SequenceFormat::csv ? "csv" : "json";
    return fmt::format("user{}_{}.{}", user + 1, skeleton::to_string(cfg.scenario.profiles[user]), ext);
}

std::vector<double> equal_split(double pool, std::size_t n) {
    return std::vector<double>(n, pool / static_cast<double>(n));
}

dqn::Environment make_environment(const RunConfig& cfg) {
    return dqn::Environment(build_scenario(cfg), cfg.dqn.reward_mode, cfg.dqn.reward_scale);
}

dqn::DqnConfig seeded_dqn(const RunConfig& cfg) {
    dqn::DqnConfig d = cfg.dqn;
    d.seed = cfg.seed;
    return d;
}

skeleton::SequenceFormat format_for(const fs::path& p, skeleton::SequenceFormat fallback) {
    if (p.extension() == ".json") return skeleton::SequenceFormat::json;
    if (p.extension() == ".csv") return skeleton::SequenceFormat::csv;
    return fallback;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(fmt::format("cannot open '{}'", p.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

skeleton::SkeletonSequence synthesize_user(const RunConfig& cfg, std::size_t user) {
    const auto& s = cfg.scenario;
    const auto kind = s.profiles.at(user);
    return skeleton::generate_synthetic(skeleton::default_profile(kind, s.joints), s.frames, s.native_rate, s.joints,
                                        derive_seed(cfg.seed, "data", user),
                                        fmt::format("user{}_{}", user + 1, skeleton::to_string(kind)));
}

contest::ScenarioConfig build_scenario(const RunConfig& cfg) {
    const auto& s = cfg.scenario;
    contest::ScenarioConfig scenario;
    scenario.budget = s.budget;
    scenario.selection_mode = s.selection_mode;
    scenario.cost_scale = s.cost_scale;
    scenario.max_capability = s.max_capability;
    for (std::size_t n = 0; n < s.user_count(); ++n) {
        skeleton::SkeletonSequence seq =
            s.sequences.empty()
                ? synthesize_user(cfg, n)
                : skeleton::load_sequence_file(s.sequences[n], format_for(s.sequences[n], s.sequence_format),
                                               {s.native_rate, fs::path(s.sequences[n]).stem().string()});
        scenario.contestants.push_back(contest::make_contestant(n, std::move(seq), s.reconstruction));
    }
    scenario.awards = contest::AwardSetting::from_unsorted(s.awards.empty() ? equal_split(s.pool, s.user_count())
                                                                            : s.awards);
    return scenario;
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
        out << contents;
        out.close();
        if (!out) throw Error(fmt::format("failed writing '{}'", tmp.string()));
    }
    fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------

GenReport cmd_gen(const RunConfig& cfg) {
    GenReport report;
    for (std::size_t n = 0; n < cfg.scenario.profiles.size(); ++n) {
        const auto seq = synthesize_user(cfg, n);
        const auto path = out_path(cfg, user_file_name(cfg, n));
        write_file_atomic(path, skeleton::save_sequence_string(seq, cfg.scenario.sequence_format));
        report.files.push_back(path);
    }
    return report;
}

ContestReport cmd_contest(const RunConfig& cfg, const std::vector<double>& awards) {
    const double sum = std::accumulate(awards.begin(), awards.end(), 0.0);
    if (std::abs(sum - cfg.scenario.pool) > 1e-9 * std::max(1.0, cfg.scenario.pool)) {
        throw ConfigError(fmt::format("awards sum to {} but the pool is {}", sum, cfg.scenario.pool));
    }
    ContestReport report;
    report.scenario = build_scenario(cfg);
    if (awards.size() > report.scenario.size()) throw ConfigError("more prizes than users");
    try {
        report.scenario.awards = contest::AwardSetting::from_unsorted(awards);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    report.outcome = contest::simulate_contest(report.scenario);

    std::vector<std::size_t> rank_of(report.scenario.size());
    for (std::size_t r = 0; r < report.outcome.ranking.size(); ++r) rank_of[report.outcome.ranking[r]] = r + 1;

    std::string csv = "user,label,capability,effort,loss,rank,prize\n";
    for (std::size_t n = 0; n < report.scenario.size(); ++n) {
        const auto& c = report.scenario.contestants[n];
        csv += fmt::format("{},{},{},{},{},{},{}\n", n + 1, c.sequence.user_label(), c.capability,
                           report.outcome.efforts[n], report.outcome.per_user_loss[n], rank_of[n],
                           report.outcome.prizes_assigned[n]);
    }
    csv += fmt::format("total,,,{},{},,{}\n", report.outcome.total_effort(), report.outcome.total_loss,
                       report.outcome.feasible ? "feasible" : "over_budget");
    report.csv_path = out_path(cfg, "contest.csv");
    write_file_atomic(report.csv_path, csv);
    report.csv = std::move(csv);
    return report;
}

TrainReport cmd_train(const RunConfig& cfg) {
    const auto env = make_environment(cfg);
    TrainReport report;
    report.result = dqn::train(env, seeded_dqn(cfg));

    std::ostringstream policy;
    report.result.policy.save(policy);
    report.policy_path = out_path(cfg, "policy.bin");
    write_file_atomic(report.policy_path, policy.str());

    std::ostringstream history;
    dqn::write_history_csv(history, report.result.history);
    report.history_path = out_path(cfg, "history.csv");
    write_file_atomic(report.history_path, history.str());
    return report;
}

const CompareRow& CompareReport::row(const std::string& method) const {
    for (const auto& r : rows) {
        if (r.method == method) return r;
    }
    throw InvalidArgument(fmt::format("no comparison row '{}'", method));
}

CompareReport cmd_compare(const RunConfig& cfg, const fs::path& policy_path) {
    if (!fs::exists(policy_path)) {
        throw Error(fmt::format("policy file '{}' not found; run `train` first", policy_path.string()));
    }
    const auto policy = dqn::Mlp::load_file(policy_path.string());
    const auto env = make_environment(cfg);
    if (policy.input_size() != env.feature_size() || policy.output_size() != env.action_count()) {
        throw Error("policy shape does not match the configured scenario");
    }

    CompareReport report;
    const auto baseline = oracle::average_baseline(env.scenario());
    report.rows.push_back({"average_baseline", {}, baseline.efforts, baseline.total_loss, 0.0});

    const auto eval = dqn::evaluate_policy(policy, env, cfg.dqn.steps_per_episode);
    report.rows.push_back({"dqn", eval.best_state.awards, eval.best_outcome.efforts, eval.best_outcome.total_loss, 0.0});

    const auto floor = oracle::exhaustive_effort_search(env.scenario(), cfg.search.effort_cap);
    report.rows.push_back({"social_optimum", {}, floor.efforts, floor.total_loss, 0.0});

    for (auto& r : report.rows) {
        r.reduction_percent =
            baseline.total_loss > 0.0 ? 100.0 * (baseline.total_loss - r.total_loss) / baseline.total_loss : 0.0;
    }

    std::string csv = "method,awards,efforts,total_loss,reduction_percent\n";
    for (const auto& r : report.rows) {
        csv += fmt::format("{},{},{},{},{}\n", r.method, fmt::join(r.awards, ";"), fmt::join(r.efforts, ";"),
                           r.total_loss, r.reduction_percent);
    }
    report.csv_path = out_path(cfg, "compare.csv");
    write_file_atomic(report.csv_path, csv);
    report.csv = std::move(csv);
    return report;
}

CodecReport cmd_codec(const RunConfig& cfg, const fs::path& input, CodecDirection direction, const fs::path& output) {
    const skeleton::QuantizationBounds bounds(cfg.codec.lo, cfg.codec.hi);
    CodecReport report;
    report.output_path = output;
    if (direction == CodecDirection::encode) {
        const auto seq = skeleton::load_sequence_file(
            input.string(), format_for(input, cfg.scenario.sequence_format),
            {cfg.scenario.native_rate, input.stem().string()});
        std::string payload;
        for (const auto& frame : seq.frames()) {
            const auto bytes = skeleton::encode_frame(frame, bounds);
            payload.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        }
        write_file_atomic(output, payload);
        report.frames = seq.frame_count();
        report.joints = seq.joint_count();
    } else {
        const std::string payload = read_file(input);
        const std::size_t k = cfg.scenario.joints;
        if (payload.empty() || payload.size() % (3 * k) != 0) {
            throw Error(fmt::format("malformed payload length: {} bytes is not a multiple of {} ({} joints)",
                                    payload.size(), 3 * k, k));
        }
        std::vector<skeleton::SkeletonFrame> frames;
        const auto* data = reinterpret_cast<const std::uint8_t*>(payload.data());
        for (std::size_t off = 0; off < payload.size(); off += 3 * k) {
            frames.push_back(skeleton::decode_frame(std::span<const std::uint8_t>(data + off, 3 * k), k, bounds));
        }
        const skeleton::SkeletonSequence seq(std::move(frames), cfg.scenario.native_rate, input.stem().string());
        write_file_atomic(output, skeleton::save_sequence_string(seq, format_for(output, cfg.scenario.sequence_format)));
        report.frames = seq.frame_count();
        report.joints = k;
    }
    report.bytes_per_frame = 3 * report.joints;
    report.payload_bytes = report.frames * report.bytes_per_frame;
    report.compression_ratio = skeleton::compression_ratio(cfg.codec.image_width, cfg.codec.image_height,
                                                           cfg.codec.bits_per_pixel, report.joints);
    report.text = fmt::format(
        "frames,joints,bytes_per_frame,payload_bytes,image_bytes_per_frame,compression_ratio\n{},{},{},{},{},{:.1f}\n"
        "{} bytes/frame\n",
        report.frames, report.joints, report.bytes_per_frame, report.payload_bytes,
        cfg.codec.image_width * cfg.codec.image_height * cfg.codec.bits_per_pixel / 8, report.compression_ratio,
        report.bytes_per_frame);
    return report;
}

SearchReport cmd_search(const RunConfig& cfg) {
    const auto scenario = build_scenario(cfg);
    SearchReport report;
    report.awards = oracle::exhaustive_award_search(scenario, cfg.search.step);
    report.social_optimum = oracle::exhaustive_effort_search(scenario, cfg.search.effort_cap);

    std::ostringstream ledger;
    oracle::write_ledger_csv(ledger, report.awards);
    report.ledger_path = out_path(cfg, "search.csv");
    write_file_atomic(report.ledger_path, ledger.str());

    if (report.awards.has_feasible()) {
        const auto it = std::find_if(report.awards.ledger.begin(), report.awards.ledger.end(), [&](const auto& e) {
            return e.awards == *report.awards.best_awards;
        });
        report.summary = fmt::format("evaluated {} award settings\nbest awards {} efforts {} total_loss {}\n",
                                     report.awards.evaluated_count, fmt::join(report.awards.best_awards->prizes(), ";"),
                                     fmt::join(it->efforts, ";"), report.awards.best_total_loss);
    } else {
        report.summary = fmt::format("evaluated {} award settings\nno award setting meets the budget\n",
                                     report.awards.evaluated_count);
    }
    report.summary += fmt::format("social optimum efforts {} total_loss {}\n",
                                  fmt::join(report.social_optimum.efforts, ";"), report.social_optimum.total_loss);
    return report;
}

}  // namespace skelcontest::cli
