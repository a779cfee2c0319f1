#include <doctest.h>

#include <sstream>

#include "skelcontest/config.hpp"

using namespace skelcontest;
using namespace skelcontest::cli;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
    const RunConfig c = parse("");
    CHECK(c.seed == 0);
    CHECK(c.scenario.user_count() == 4);
    CHECK(c.scenario.native_rate == 60);
    CHECK(c.scenario.joints == 17);
    CHECK(c.scenario.frames == 300);
    CHECK(c.scenario.budget == 120);
    CHECK(c.scenario.pool == 100.0);
    CHECK(c.scenario.awards.empty());
    CHECK(c.dqn.episodes == 500);
    CHECK(c.dqn.steps_per_episode == 100);
    CHECK(c.dqn.batch_size == 64);
    CHECK(c.dqn.buffer_capacity == 10000);
    CHECK(c.dqn.hidden_layers == std::vector<std::size_t>{64, 64});
    CHECK(c.dqn.discount == 0.9);
    CHECK(c.dqn.learning_rate == 1e-3);
    CHECK(c.dqn.epsilon_start == 1.0);
    CHECK(c.dqn.epsilon_end == 0.05);
    CHECK(c.dqn.epsilon_decay == 0.995);
    CHECK(c.dqn.target_sync_period == 100);
    CHECK(c.dqn.reward_scale == 1000.0);
    CHECK(c.dqn.reward_mode == dqn::RewardMode::strict);
}

TEST_CASE("values are parsed") {
    const RunConfig c = parse(
        "# comment\n"
        "[run]\nseed = 7\nout = results\n"
        "[scenario]\nprofiles = run, stand\nbudget = 40\npool = 30\nawards = 20,10\n"
        "selection_mode = literal-e\nmax_capability = 2.5\nreconstruction = linear\n"
        "[dqn]\nhidden_layers = 32,16\nreward_mode = literal-paper\nlearning_rate = 3e-3\n"
        "[search]\nstep = 2\n"
        "[codec]\nlo = -1\nhi = 1\n");
    CHECK(c.seed == 7);
    CHECK(c.out_dir == "results");
    CHECK(c.scenario.profiles == std::vector<skeleton::MotionKind>{skeleton::MotionKind::run,
                                                                   skeleton::MotionKind::stand});
    CHECK(c.scenario.budget == 40);
    CHECK(c.scenario.awards == std::vector<double>{20, 10});
    CHECK(c.scenario.selection_mode == contest::SelectionMode::literal_expected);
    CHECK(c.scenario.max_capability == 2.5);
    CHECK(c.scenario.reconstruction == skeleton::Reconstruction::linear);
    CHECK(c.dqn.hidden_layers == std::vector<std::size_t>{32, 16});
    CHECK(c.dqn.reward_mode == dqn::RewardMode::literal_paper);
    CHECK(c.dqn.learning_rate == 3e-3);
    CHECK(c.search.step == 2.0);
    CHECK(c.codec.lo == -1.0);
    CHECK_FALSE(parse("[scenario]\nmax_capability = auto\n").scenario.max_capability.has_value());
}

TEST_CASE("bad configs are rejected") {
    CHECK_THROWS_AS(parse("[scenario]\nbudgett = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse("[nonsense]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[scenario]\nbudget = ten\n"), ConfigError);
    CHECK_THROWS_AS(parse("[scenario]\nbudget = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse("[scenario]\nprofiles = run,jog\n"), ConfigError);
    CHECK_THROWS_AS(parse("[scenario]\nawards = 1,1,1,1,1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[dqn]\ndiscount = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[codec]\nlo = 1\nhi = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[scenario\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("write_config round-trips") {
    RunConfig c = parse("[run]\nseed = 3\n[scenario]\nawards = 50,30,20\nmax_capability = 1.25\n[dqn]\nepisodes = 9\n");
    std::ostringstream out;
    write_config(out, c);
    const RunConfig back = parse(out.str());
    std::ostringstream again;
    write_config(again, back);
    CHECK(out.str() == again.str());
    CHECK(back.seed == 3);
    CHECK(back.scenario.awards == c.scenario.awards);
    CHECK(back.scenario.max_capability == 1.25);
    CHECK(back.dqn.episodes == 9);
}

TEST_CASE("trailing comments are ignored") {
    const RunConfig c = parse("[scenario]\nbudget = 40   # uploads per second\nprofiles = run,wave ; two users\nawards =   # equal split\n");
    CHECK(c.scenario.budget == 40);
    CHECK(c.scenario.profiles.size() == 2);
    CHECK(c.scenario.awards.empty());
}
