#include "skelcontest/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

namespace skelcontest::cli {

namespace {

using boost::property_tree::ptree;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Drops a `# ...` or `; ...` comment that starts the value or follows whitespace.
std::string strip_comment(const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((s[i] == '#' || s[i] == ';') && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) {
            return trim(s.substr(0, i));
        }
    }
    return s;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    for (char c : value) {
        if (c == ',') {
            out.push_back(trim(item));
            item.clear();
        } else {
            item += c;
        }
    }
    if (!trim(item).empty() || !out.empty()) out.push_back(trim(item));
    return out;
}

template <typename T>
T parse_value(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    T out{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    if (s.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError(fmt::format("invalid value '{}' for '{}'", raw, key));
    }
    return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& raw) {
    std::vector<T> out;
    for (const auto& item : split_list(raw)) out.push_back(parse_value<T>(key, item));
    return out;
}

template <typename Fn>
auto wrap(const std::string& key, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(fmt::format("invalid value for '{}': {}", key, e.what()));
    }
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
    static const std::map<std::string, std::map<std::string, Setter>> table = {
        {"run",
         {
             {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_value<std::uint64_t>("run.seed", v); }},
             {"out", [](RunConfig& c, const std::string& v) { c.out_dir = trim(v); }},
         }},
        {"scenario",
         {
             {"profiles",
              [](RunConfig& c, const std::string& v) {
                  c.scenario.profiles.clear();
                  for (const auto& name : split_list(v)) {
                      c.scenario.profiles.push_back(
                          wrap("scenario.profiles", [&] { return skeleton::parse_motion_kind(name); }));
                  }
              }},
             {"sequences", [](RunConfig& c, const std::string& v) { c.scenario.sequences = split_list(v); }},
             {"sequence_format",
              [](RunConfig& c, const std::string& v) {
                  c.scenario.sequence_format =
                      wrap("scenario.sequence_format", [&] { return skeleton::parse_sequence_format(trim(v)); });
              }},
             {"native_rate",
              [](RunConfig& c, const std::string& v) { c.scenario.native_rate = parse_value<int>("scenario.native_rate", v); }},
             {"joints",
              [](RunConfig& c, const std::string& v) { c.scenario.joints = parse_value<std::size_t>("scenario.joints", v); }},
             {"frames",
              [](RunConfig& c, const std::string& v) { c.scenario.frames = parse_value<std::size_t>("scenario.frames", v); }},
             {"budget", [](RunConfig& c, const std::string& v) { c.scenario.budget = parse_value<int>("scenario.budget", v); }},
             {"pool", [](RunConfig& c, const std::string& v) { c.scenario.pool = parse_value<double>("scenario.pool", v); }},
             {"awards",
              [](RunConfig& c, const std::string& v) { c.scenario.awards = parse_list<double>("scenario.awards", v); }},
             {"selection_mode",
              [](RunConfig& c, const std::string& v) {
                  c.scenario.selection_mode =
                      wrap("scenario.selection_mode", [&] { return contest::parse_selection_mode(trim(v)); });
              }},
             {"cost_scale",
              [](RunConfig& c, const std::string& v) { c.scenario.cost_scale = parse_value<double>("scenario.cost_scale", v); }},
             {"max_capability",
              [](RunConfig& c, const std::string& v) {
                  if (trim(v) == "auto") {
                      c.scenario.max_capability.reset();
                  } else {
                      c.scenario.max_capability = parse_value<double>("scenario.max_capability", v);
                  }
              }},
             {"reconstruction",
              [](RunConfig& c, const std::string& v) {
                  const auto s = trim(v);
                  if (s == "hold") {
                      c.scenario.reconstruction = skeleton::Reconstruction::hold;
                  } else if (s == "linear") {
                      c.scenario.reconstruction = skeleton::Reconstruction::linear;
                  } else {
                      throw ConfigError(fmt::format("invalid value '{}' for 'scenario.reconstruction'", v));
                  }
              }},
         }},
        {"dqn",
         {
             {"episodes", [](RunConfig& c, const std::string& v) { c.dqn.episodes = parse_value<std::size_t>("dqn.episodes", v); }},
             {"steps_per_episode",
              [](RunConfig& c, const std::string& v) { c.dqn.steps_per_episode = parse_value<std::size_t>("dqn.steps_per_episode", v); }},
             {"batch_size",
              [](RunConfig& c, const std::string& v) { c.dqn.batch_size = parse_value<std::size_t>("dqn.batch_size", v); }},
             {"buffer_capacity",
              [](RunConfig& c, const std::string& v) { c.dqn.buffer_capacity = parse_value<std::size_t>("dqn.buffer_capacity", v); }},
             {"hidden_layers",
              [](RunConfig& c, const std::string& v) { c.dqn.hidden_layers = parse_list<std::size_t>("dqn.hidden_layers", v); }},
             {"discount", [](RunConfig& c, const std::string& v) { c.dqn.discount = parse_value<double>("dqn.discount", v); }},
             {"learning_rate",
              [](RunConfig& c, const std::string& v) { c.dqn.learning_rate = parse_value<double>("dqn.learning_rate", v); }},
             {"epsilon_start",
              [](RunConfig& c, const std::string& v) { c.dqn.epsilon_start = parse_value<double>("dqn.epsilon_start", v); }},
             {"epsilon_end",
              [](RunConfig& c, const std::string& v) { c.dqn.epsilon_end = parse_value<double>("dqn.epsilon_end", v); }},
             {"epsilon_decay",
              [](RunConfig& c, const std::string& v) { c.dqn.epsilon_decay = parse_value<double>("dqn.epsilon_decay", v); }},
             {"target_sync_period",
              [](RunConfig& c, const std::string& v) { c.dqn.target_sync_period = parse_value<std::size_t>("dqn.target_sync_period", v); }},
             {"reward_scale",
              [](RunConfig& c, const std::string& v) { c.dqn.reward_scale = parse_value<double>("dqn.reward_scale", v); }},
             {"value_scale",
              [](RunConfig& c, const std::string& v) { c.dqn.value_scale = parse_value<double>("dqn.value_scale", v); }},
             {"reward_mode",
              [](RunConfig& c, const std::string& v) {
                  c.dqn.reward_mode = wrap("dqn.reward_mode", [&] { return dqn::parse_reward_mode(trim(v)); });
              }},
         }},
        {"search",
         {
             {"step", [](RunConfig& c, const std::string& v) { c.search.step = parse_value<double>("search.step", v); }},
             {"effort_cap",
              [](RunConfig& c, const std::string& v) { c.search.effort_cap = parse_value<std::uint64_t>("search.effort_cap", v); }},
         }},
        {"codec",
         {
             {"lo", [](RunConfig& c, const std::string& v) { c.codec.lo = parse_value<double>("codec.lo", v); }},
             {"hi", [](RunConfig& c, const std::string& v) { c.codec.hi = parse_value<double>("codec.hi", v); }},
             {"image_width",
              [](RunConfig& c, const std::string& v) { c.codec.image_width = parse_value<std::uint64_t>("codec.image_width", v); }},
             {"image_height",
              [](RunConfig& c, const std::string& v) { c.codec.image_height = parse_value<std::uint64_t>("codec.image_height", v); }},
             {"bits_per_pixel",
              [](RunConfig& c, const std::string& v) { c.codec.bits_per_pixel = parse_value<std::uint64_t>("codec.bits_per_pixel", v); }},
         }},
    };
    return table;
}

}  // namespace

void RunConfig::validate() const {
    const auto& s = scenario;
    if (s.user_count() == 0) throw ConfigError("scenario needs at least one user");
    if (s.native_rate < 1) throw ConfigError("scenario.native_rate must be at least 1");
    if (s.joints < 1) throw ConfigError("scenario.joints must be at least 1");
    if (s.frames < 1) throw ConfigError("scenario.frames must be at least 1");
    if (s.budget < 1) throw ConfigError("scenario.budget must be at least 1");
    if (!(s.pool > 0.0)) throw ConfigError("scenario.pool must be positive");
    if (!(s.cost_scale > 0.0)) throw ConfigError("scenario.cost_scale must be positive");
    if (s.max_capability && !(*s.max_capability > 0.0)) throw ConfigError("scenario.max_capability must be positive");
    if (!s.awards.empty() && s.awards.size() > s.user_count()) {
        throw ConfigError("scenario.awards has more prizes than users");
    }
    if (!(search.step > 0.0)) throw ConfigError("search.step must be positive");
    if (!(codec.lo < codec.hi)) throw ConfigError("codec.lo must be below codec.hi");
    if (codec.image_width == 0 || codec.image_height == 0 || codec.bits_per_pixel == 0) {
        throw ConfigError("codec image dimensions must be positive");
    }
    try {
        dqn.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_config(std::istream& in) {
    ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(fmt::format("config parse error: {}", e.message()));
    }
    RunConfig cfg;
    const auto& table = setters();
    for (const auto& [section, body] : tree) {
        const auto sec = table.find(section);
        if (sec == table.end()) {
            if (body.empty()) throw ConfigError(fmt::format("key '{}' is outside any section", section));
            throw ConfigError(fmt::format("unknown config section [{}]", section));
        }
        for (const auto& [key, node] : body) {
            const auto setter = sec->second.find(key);
            if (setter == sec->second.end()) {
                throw ConfigError(fmt::format("unknown config key '{}.{}'", section, key));
            }
            setter->second(cfg, strip_comment(node.get_value<std::string>()));
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
    return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& cfg) {
    const auto& s = cfg.scenario;
    std::vector<std::string_view> profiles;
    for (auto p : s.profiles) profiles.push_back(skeleton::to_string(p));
    out << "[run]\n";
    out << fmt::format("seed = {}\nout = {}\n\n", cfg.seed, cfg.out_dir);
    out << "[scenario]\n";
    out << fmt::format("profiles = {}\n", fmt::join(profiles, ","));
    if (!s.sequences.empty()) out << fmt::format("sequences = {}\n", fmt::join(s.sequences, ","));
    out << fmt::format("sequence_format = {}\n", s.sequence_format == skeleton::SequenceFormat::csv ? "csv" : "json");
    out << fmt::format("native_rate = {}\njoints = {}\nframes = {}\nbudget = {}\npool = {}\n", s.native_rate, s.joints,
                       s.frames, s.budget, s.pool);
    if (!s.awards.empty()) out << fmt::format("awards = {}\n", fmt::join(s.awards, ","));
    out << fmt::format("selection_mode = {}\ncost_scale = {}\n", contest::to_string(s.selection_mode), s.cost_scale);
    out << fmt::format("max_capability = {}\n", s.max_capability ? fmt::format("{}", *s.max_capability) : "auto");
    out << fmt::format("reconstruction = {}\n\n", s.reconstruction == skeleton::Reconstruction::hold ? "hold" : "linear");
    const auto& d = cfg.dqn;
    out << "[dqn]\n";
    out << fmt::format(
        "episodes = {}\nsteps_per_episode = {}\nbatch_size = {}\nbuffer_capacity = {}\nhidden_layers = {}\n"
        "discount = {}\nlearning_rate = {}\nepsilon_start = {}\nepsilon_end = {}\nepsilon_decay = {}\n"
        "target_sync_period = {}\nreward_scale = {}\nvalue_scale = {}\nreward_mode = {}\n\n",
        d.episodes, d.steps_per_episode, d.batch_size, d.buffer_capacity, fmt::join(d.hidden_layers, ","), d.discount,
        d.learning_rate, d.epsilon_start, d.epsilon_end, d.epsilon_decay, d.target_sync_period, d.reward_scale,
        d.value_scale, dqn::to_string(d.reward_mode));
    out << "[search]\n";
    out << fmt::format("step = {}\neffort_cap = {}\n\n", cfg.search.step, cfg.search.effort_cap);
    out << "[codec]\n";
    out << fmt::format("lo = {}\nhi = {}\nimage_width = {}\nimage_height = {}\nbits_per_pixel = {}\n", cfg.codec.lo,
                       cfg.codec.hi, cfg.codec.image_width, cfg.codec.image_height, cfg.codec.bits_per_pixel);
}

}  // namespace skelcontest::cli
