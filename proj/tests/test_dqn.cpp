#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "skelcontest/dqn.hpp"
#include "skelcontest/skeleton.hpp"

using namespace skelcontest;
using namespace skelcontest::dqn;
namespace sk = skelcontest::skeleton;

namespace {

contest::ScenarioConfig make_scenario(std::vector<sk::MotionKind> kinds, int rate, std::size_t frames, int budget,
                                      double pool) {
    contest::ScenarioConfig cfg;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        auto seq = sk::generate_synthetic(sk::default_profile(kinds[i]), frames, rate, 17, derive_seed(3, "data", i));
        cfg.contestants.push_back(contest::make_contestant(i, std::move(seq)));
    }
    cfg.budget = budget;
    cfg.awards = contest::AwardSetting(std::vector<double>(kinds.size(), pool / static_cast<double>(kinds.size())));
    return cfg;
}

contest::ScenarioConfig default_four() {
    using K = sk::MotionKind;
    return make_scenario({K::run, K::dance, K::wave, K::stand}, 60, 300, 120, 100.0);
}

std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

DqnConfig tiny_config() {
    DqnConfig c;
    c.episodes = 6;
    c.steps_per_episode = 10;
    c.batch_size = 8;
    c.buffer_capacity = 40;
    c.hidden_layers = {8};
    c.target_sync_period = 7;
    c.seed = 11;
    return c;
}

}  // namespace

TEST_CASE("action enumeration") {
    CHECK(enumerate_actions(1).size() == 1);
    const auto two = enumerate_actions(2);
    REQUIRE(two.size() == 3);
    CHECK(two[0].deltas == std::vector<int>{-1, 1});
    CHECK(two[1].deltas == std::vector<int>{0, 0});
    CHECK(two[2].deltas == std::vector<int>{1, -1});
    for (std::uint64_t n = 1; n <= 6; ++n) {
        std::uint64_t expected = 0;
        for (std::uint64_t k = 0; 2 * k <= n; ++k) expected += choose(n, k) * choose(n - k, k);
        const auto actions = enumerate_actions(n);
        CAPTURE(n);
        CHECK(actions.size() == expected);
        std::set<std::vector<int>> seen;
        for (std::size_t i = 0; i < actions.size(); ++i) {
            int sum = 0;
            for (int d : actions[i].deltas) sum += d;
            CHECK(sum == 0);
            seen.insert(actions[i].deltas);
            if (i > 0) CHECK(actions[i - 1].deltas < actions[i].deltas);
        }
        CHECK(seen.size() == actions.size());
    }
    CHECK(enumerate_actions(4).size() == 19);
}

TEST_CASE("apply_action") {
    const std::vector<double> even{25, 25, 25, 25};
    CHECK(apply_action(even, Action{{1, -1, 0, 0}}) == std::vector<double>{26, 25, 25, 24});
    CHECK(apply_action(even, Action{{0, 0, 0, 0}}) == even);
    const std::vector<double> edge{60, 40, 0, 0};
    CHECK(apply_action(edge, Action{{1, 0, -1, 0}}) == edge);
    CHECK(apply_action(edge, Action{{-1, 0, 0, 1}}) == std::vector<double>{59, 40, 1, 0});
    CHECK_THROWS_AS(apply_action(even, Action{{1, -1}}), InvalidArgument);
}

TEST_CASE("reward") {
    const std::vector<double> awards{40, 30, 20, 10};
    const std::vector<double> losses{50, 50, 50, 50};
    const std::vector<int> fits{30, 30, 30, 30};
    const std::vector<int> over{60, 30, 30, 30};
    const std::vector<int> under{10, 10, 10, 10};
    CHECK(reward(fits, awards, losses, 120, 100, RewardMode::strict, 1000) == doctest::Approx(5.0));
    CHECK(reward(over, awards, losses, 120, 100, RewardMode::strict, 1000) == 0.0);
    CHECK(reward(under, awards, losses, 120, 100, RewardMode::strict, 1000) == doctest::Approx(5.0));
    CHECK(reward(under, awards, losses, 120, 100, RewardMode::literal_paper, 1000) == 0.0);
    CHECK(reward(over, awards, losses, 120, 100, RewardMode::literal_paper, 1000) == doctest::Approx(5.0));
    const std::vector<double> rich{50, 30, 20, 10};
    CHECK(reward(fits, rich, losses, 120, 100, RewardMode::strict, 1000) == 0.0);
    CHECK(reward(fits, rich, losses, 120, 100, RewardMode::literal_paper, 1000) == 0.0);
    const std::vector<double> zero(4, 0.0);
    CHECK(reward(fits, awards, zero, 120, 100, RewardMode::strict, 1000) == doctest::Approx(1000 / kLossFloor));
    CHECK(parse_reward_mode("literal-paper") == RewardMode::literal_paper);
    CHECK(to_string(RewardMode::strict) == "strict");
    CHECK_THROWS_AS(parse_reward_mode("bogus"), InvalidArgument);
}

TEST_CASE("environment") {
    const Environment env(default_four(), RewardMode::strict, 1000);
    CHECK(env.action_count() == 19);
    CHECK(env.feature_size() == 8);
    const EnvState s0 = env.initial_state();
    CHECK(s0.awards == std::vector<double>(4, 25.0));

    SUBCASE("deterministic and pool-preserving") {
        EnvState a = s0, b = s0;
        for (std::size_t i = 0; i < 13; ++i) {
            const auto ra = env.step(a, (i * 7) % 19);
            const auto rb = env.step(b, (i * 7) % 19);
            CHECK(ra.next == rb.next);
            CHECK(ra.reward == rb.reward);
            a = ra.next;
            b = rb.next;
            double sum = 0;
            for (double r : a.awards) sum += r;
            CHECK(sum == doctest::Approx(100.0));
            CHECK(std::is_sorted(a.awards.rbegin(), a.awards.rend()));
        }
        for (double v : env.features(a)) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    SUBCASE("reward follows the outcome") {
        const auto r = env.evaluate({40, 30, 20, 10});
        CHECK(r.next.efforts == r.outcome.efforts);
        if (r.outcome.total_effort() <= 120) {
            CHECK(r.reward == doctest::Approx(1000 / std::max(r.outcome.total_loss, kLossFloor)));
        } else {
            CHECK(r.reward == 0.0);
        }
    }
    SUBCASE("moving a unit to the top prize does not lower the leader's effort") {
        std::vector<double> awards{25, 25, 25, 25};
        for (int i = 0; i < 20; ++i) {
            const auto before = env.evaluate(awards);
            const auto next_awards = apply_action(awards, Action{{1, 0, 0, -1}});
            const auto after = env.evaluate(next_awards);
            const std::size_t leader = before.outcome.ranking.front();
            CAPTURE(i);
            CHECK(after.outcome.efforts[leader] >= before.outcome.efforts[leader]);
            awards = next_awards;
        }
    }
    CHECK_THROWS_AS(env.step(s0, std::size_t{19}), InvalidArgument);
}

TEST_CASE("replay buffer") {
    ReplayBuffer buf(3);
    for (int i = 0; i < 5; ++i) buf.push(Transition{{static_cast<double>(i)}, 0, 0.0, {0.0}});
    CHECK(buf.size() == 3);
    CHECK(buf.capacity() == 3);
    CHECK(buf.at(0).state[0] == 2.0);
    CHECK(buf.at(2).state[0] == 4.0);
    CHECK_THROWS_AS(buf.at(3), InvalidArgument);

    ReplayBuffer big(50);
    for (int i = 0; i < 50; ++i) big.push(Transition{{static_cast<double>(i)}, 0, 0.0, {0.0}});
    Rng rng(4), rng2(4);
    for (int round = 0; round < 20; ++round) {
        const auto picks = big.sample(20, rng);
        CHECK(picks == big.sample(20, rng2));
        std::set<const Transition*> unique(picks.begin(), picks.end());
        CHECK(unique.size() == 20);
    }
    CHECK_THROWS_AS(big.sample(51, rng), InvalidArgument);
    CHECK_THROWS_AS(ReplayBuffer(0), InvalidArgument);
}

TEST_CASE("greedy action") {
    const Mlp zero({8, 4, 19});
    const std::vector<double> x(8, 0.5);
    CHECK(greedy_action(zero, x) == 0);
    Mlp net({8, 4, 19});
    net.bias(1, 7) = 1.0;
    CHECK(greedy_action(net, x) == 7);
    net.bias(1, 3) = 1.0;
    CHECK(greedy_action(net, x) == 3);
}

TEST_CASE("config validation") {
    DqnConfig c;
    CHECK_NOTHROW(c.validate());
    c.batch_size = c.buffer_capacity + 1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = DqnConfig{};
    c.discount = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = DqnConfig{};
    c.epsilon_end = 1.5;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("training") {
    SUBCASE("single contestant") {
        const Environment env(make_scenario({sk::MotionKind::wave}, 12, 60, 12, 10.0), RewardMode::strict, 1000);
        CHECK(env.action_count() == 1);
        const auto result = train(env, tiny_config());
        CHECK(result.history.size() == 6);
        CHECK(result.policy.all_finite());
        CHECK(result.policy.output_size() == 1);
        const auto eval = evaluate_policy(result.policy, env, 5);
        CHECK(eval.best_state.awards == std::vector<double>{10.0});
    }
    SUBCASE("history is reproducible and epsilon decays") {
        using K = sk::MotionKind;
        const Environment env(make_scenario({K::run, K::wave, K::stand}, 12, 60, 18, 30.0), RewardMode::strict,
                              1000);
        const auto a = train(env, tiny_config());
        const auto b = train(env, tiny_config());
        std::ostringstream ha, hb;
        write_history_csv(ha, a.history);
        write_history_csv(hb, b.history);
        CHECK(ha.str() == hb.str());
        CHECK(a.policy == b.policy);
        CHECK(ha.str().rfind("episode,mean_reward,total_loss,epsilon\n", 0) == 0);
        for (std::size_t i = 1; i < a.history.size(); ++i) CHECK(a.history[i].epsilon < a.history[i - 1].epsilon);
        auto other = tiny_config();
        other.seed = 12;
        CHECK_FALSE(train(env, other).policy == a.policy);

        const auto eval = evaluate_policy(a.policy, env, 10);
        CHECK(eval.best_reward >= env.evaluate(env.initial_state().awards).reward);
    }
}
