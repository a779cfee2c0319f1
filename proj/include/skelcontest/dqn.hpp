#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "skelcontest/contest.hpp"
#include "skelcontest/mlp.hpp"
#include "skelcontest/rng.hpp"

namespace skelcontest::dqn {

/// Per-contestant award adjustment in {-1, 0, +1} with zero sum.
struct Action {
    std::vector<int> deltas;
    friend bool operator==(const Action&, const Action&) = default;
};

/// All zero-sum vectors in {-1,0,1}^n, lexicographic order.
std::vector<Action> enumerate_actions(std::size_t contestant_count);

/// awards + deltas, or the awards unchanged if any entry would go negative.
/// The result is sorted non-increasing.
std::vector<double> apply_action(std::span<const double> awards, const Action& action);

enum class RewardMode {
    strict,        // zero when the budget is exceeded or the pool is not preserved
    literal_paper  // zero when the budget is under-used or the pool is exceeded
};

std::string_view to_string(RewardMode mode);
RewardMode parse_reward_mode(std::string_view name);

/// Reward floor on the summed loss; the reward is capped at c / kLossFloor.
inline constexpr double kLossFloor = 1e-9;

double reward(std::span<const int> efforts, std::span<const double> awards, std::span<const double> losses,
              int budget, double pool, RewardMode mode, double scale);

struct EnvState {
    std::vector<double> awards;  // rank order, non-increasing
    std::vector<int> efforts;    // per contestant
    friend bool operator==(const EnvState&, const EnvState&) = default;
};

struct StepResult {
    EnvState next;
    double reward = 0.0;
    contest::ContestOutcome outcome;
};

/// The award-setting MDP over a fixed contest scenario. Deterministic.
class Environment {
public:
    Environment(contest::ScenarioConfig scenario, RewardMode mode, double reward_scale);

    const contest::ScenarioConfig& scenario() const { return scenario_; }
    const std::vector<Action>& actions() const { return actions_; }
    std::size_t action_count() const { return actions_.size(); }
    double pool() const { return pool_; }
    std::size_t feature_size() const { return 2 * scenario_.size(); }

    /// Equal split of the pool, with the efforts it induces.
    EnvState initial_state() const;

    /// Contest outcome and reward for an award vector.
    StepResult evaluate(std::vector<double> awards) const;

    StepResult step(const EnvState& state, const Action& action) const;
    StepResult step(const EnvState& state, std::size_t action_index) const;

    /// Network input: awards / pool, efforts / native rate, each in [0, 1].
    std::vector<double> features(const EnvState& state) const;

private:
    contest::ScenarioConfig scenario_;
    contest::PopulationModel population_;
    std::vector<Action> actions_;
    RewardMode mode_;
    double reward_scale_;
    double pool_;
};

/// One replay entry. States are stored as network features; the reward is
/// in value units (raw reward divided by the configured value scale).
struct Transition {
    std::vector<double> state;
    std::size_t action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
};

/// Bounded FIFO; once full, each push evicts the oldest entry.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    /// Entry by age, 0 = oldest.
    const Transition& at(std::size_t i) const;

    /// `count` distinct entries drawn uniformly (Floyd's algorithm).
    std::vector<const Transition*> sample(std::size_t count, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // index of the oldest entry once full
    std::vector<Transition> entries_;
};

struct DqnConfig {
    std::size_t episodes = 500;
    std::size_t steps_per_episode = 100;
    std::size_t batch_size = 64;
    std::size_t buffer_capacity = 10000;
    std::vector<std::size_t> hidden_layers = {64, 64};
    double discount = 0.9;
    double learning_rate = 1e-3;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_decay = 0.995;
    std::size_t target_sync_period = 100;
    double reward_scale = 1000.0;
    /// Rewards are divided by this before regression so Q-values stay O(1).
    double value_scale = 10000.0;
    RewardMode reward_mode = RewardMode::strict;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One SGD step on the mean squared TD error with targets
/// r + discount * max_a' target(s'). Returns the pre-step loss. Throws
/// TrainingError, leaving `net` untouched, if the step would produce
/// non-finite parameters.
double mlp_update(Mlp& net, std::span<const Transition* const> batch, const Mlp& target, double discount,
                  double learning_rate);

/// Index of the largest action value; ties go to the lowest index.
std::size_t greedy_action(const Mlp& net, std::span<const double> features);

struct HistoryRow {
    std::size_t episode = 0;
    double mean_reward = 0.0;
    double total_loss = 0.0;
    double epsilon = 0.0;
};

struct TrainResult {
    Mlp policy;
    std::vector<HistoryRow> history;
};

/// Epsilon-greedy Q-learning with experience replay and a periodically
/// synced target network. Deterministic for a fixed config.
TrainResult train(const Environment& env, const DqnConfig& cfg);

/// Outcome of following a policy greedily from the initial state.
struct PolicyEvaluation {
    EnvState best_state;            // highest-reward state on the rollout
    contest::ContestOutcome best_outcome;
    double best_reward = 0.0;
    EnvState final_state;
    contest::ContestOutcome final_outcome;
};

/// Rolls the greedy policy for `steps` steps from the initial state and
/// reports the best-rewarded award setting it visits (the start included).
PolicyEvaluation evaluate_policy(const Mlp& net, const Environment& env, std::size_t steps);

void write_history_csv(std::ostream& out, std::span<const HistoryRow> history);

}  // namespace skelcontest::dqn
