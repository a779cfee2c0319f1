// Command-line harness: gen, contest, train, compare, codec, search.
// Exit codes: 0 success, 1 runtime error, 2 configuration error.

#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "skelcontest/commands.hpp"

namespace cli = skelcontest::cli;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::vector<double> parse_awards(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw cli::ConfigError(fmt::format("invalid award value '{}'", item));
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contest-based avatar rendering allocation: simulate, search and train award settings"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    app.add_option("--config", config_path, "Config file (INI-style)");
    app.add_option("--seed", seed, "Top-level seed (overrides [run] seed)");
    app.add_option("--out", out_dir, "Output directory (overrides [run] out)");

    auto* gen = app.add_subcommand("gen", "Write one synthetic sequence file per user");

    auto* contest_cmd = app.add_subcommand("contest", "Simulate one contest and report per-user efforts");
    std::string awards_text;
    contest_cmd->add_option("--awards", awards_text, "Comma-separated prizes, e.g. 50,50,0,0")->required();

    auto* train = app.add_subcommand("train", "Train the award-setting DQN; writes policy.bin and history.csv");

    auto* compare = app.add_subcommand("compare", "Compare average baseline, trained policy and social optimum");
    std::string policy_path;
    compare->add_option("--policy", policy_path, "Policy checkpoint (default OUT/policy.bin)");

    auto* codec = app.add_subcommand("codec", "Encode a sequence to byte payloads, or decode payloads back");
    std::string codec_input, codec_output, direction = "encode";
    codec->add_option("--input", codec_input, "Input sequence (encode) or payload (decode)")->required();
    codec->add_option("--output", codec_output, "Output payload or sequence file")->required();
    codec->add_option("--direction", direction, "encode or decode")->check(CLI::IsMember({"encode", "decode"}));

    auto* search = app.add_subcommand("search", "Exhaustive award search and social-optimum floor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        cli::RunConfig cfg = config_path.empty() ? cli::RunConfig{} : cli::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (out_dir) cfg.out_dir = *out_dir;
        cfg.validate();

        if (gen->parsed()) {
            for (const auto& f : cli::cmd_gen(cfg).files) std::cout << f.string() << '\n';
        } else if (contest_cmd->parsed()) {
            std::cout << cli::cmd_contest(cfg, parse_awards(awards_text)).csv;
        } else if (train->parsed()) {
            const auto report = cli::cmd_train(cfg);
            const auto& h = report.result.history;
            std::cout << fmt::format("trained {} episodes; last mean reward {} total loss {}\n", h.size(),
                                     h.back().mean_reward, h.back().total_loss);
            std::cout << report.policy_path.string() << '\n' << report.history_path.string() << '\n';
        } else if (compare->parsed()) {
            const std::string path =
                policy_path.empty() ? (std::filesystem::path(cfg.out_dir) / "policy.bin").string() : policy_path;
            std::cout << cli::cmd_compare(cfg, path).csv;
        } else if (codec->parsed()) {
            const auto dir = direction == "encode" ? cli::CodecDirection::encode : cli::CodecDirection::decode;
            std::cout << cli::cmd_codec(cfg, codec_input, dir, codec_output).text;
        } else if (search->parsed()) {
            std::cout << cli::cmd_search(cfg).summary;
        }
    } catch (const cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
