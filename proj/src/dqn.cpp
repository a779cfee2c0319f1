#include "skelcontest/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

namespace skelcontest::dqn {

std::vector<Action> enumerate_actions(std::size_t contestant_count) {
    if (contestant_count == 0) throw InvalidArgument("enumerate_actions needs at least one contestant");
    std::vector<Action> out;
    std::vector<int> current(contestant_count, -1);
    // Odometer over {-1,0,1}^n; the last position varies fastest.
    while (true) {
        if (std::accumulate(current.begin(), current.end(), 0) == 0) out.push_back(Action{current});
        std::size_t pos = contestant_count;
        while (pos > 0 && current[pos - 1] == 1) {
            current[pos - 1] = -1;
            --pos;
        }
        if (pos == 0) break;
        ++current[pos - 1];
    }
    return out;
}

std::vector<double> apply_action(std::span<const double> awards, const Action& action) {
    if (awards.size() != action.deltas.size()) {
        throw InvalidArgument(fmt::format("action has {} entries for {} awards", action.deltas.size(), awards.size()));
    }
    std::vector<double> out(awards.begin(), awards.end());
    bool valid = true;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += action.deltas[i];
        if (out[i] < 0.0) valid = false;
    }
    if (!valid) out.assign(awards.begin(), awards.end());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

std::string_view to_string(RewardMode mode) { return mode == RewardMode::strict ? "strict" : "literal-paper"; }

RewardMode parse_reward_mode(std::string_view name) {
    if (name == "strict") return RewardMode::strict;
    if (name == "literal-paper") return RewardMode::literal_paper;
    throw InvalidArgument(fmt::format("unknown reward mode '{}' (expected strict or literal-paper)", name));
}

double reward(std::span<const int> efforts, std::span<const double> awards, std::span<const double> losses,
              int budget, double pool, RewardMode mode, double scale) {
    const long long effort_sum = std::accumulate(efforts.begin(), efforts.end(), 0LL);
    const double award_sum = std::accumulate(awards.begin(), awards.end(), 0.0);
    const double loss_sum = std::accumulate(losses.begin(), losses.end(), 0.0);
    const double tol = 1e-9 * std::max(1.0, std::abs(pool));

    bool zeroed = false;
    if (mode == RewardMode::strict) {
        zeroed = effort_sum > budget || std::abs(award_sum - pool) > tol;
    } else {
        zeroed = effort_sum < budget || award_sum > pool + tol;
    }
    if (zeroed) return 0.0;
    return scale / std::max(loss_sum, kLossFloor);
}

// ---------------------------------------------------------------------------

Environment::Environment(contest::ScenarioConfig scenario, RewardMode mode, double reward_scale)
    : scenario_(std::move(scenario)),
      population_(scenario_.population()),
      actions_(enumerate_actions(scenario_.size())),
      mode_(mode),
      reward_scale_(reward_scale),
      pool_(scenario_.awards.pool()) {
    if (!(pool_ > 0.0)) throw InvalidArgument("the award pool must be positive");
    if (!(reward_scale_ > 0.0)) throw InvalidArgument("reward scale must be positive");
}

EnvState Environment::initial_state() const {
    std::vector<double> awards(scenario_.size(), pool_ / static_cast<double>(scenario_.size()));
    return evaluate(std::move(awards)).next;
}

StepResult Environment::evaluate(std::vector<double> awards) const {
    const auto setting = contest::AwardSetting::from_unsorted(std::move(awards));
    StepResult r;
    r.outcome = contest::simulate_contest(scenario_, setting, population_);
    r.next.awards = setting.prizes();
    r.next.efforts = r.outcome.efforts;
    r.reward = reward(r.outcome.efforts, r.next.awards, r.outcome.per_user_loss, scenario_.budget, pool_, mode_,
                      reward_scale_);
    return r;
}

StepResult Environment::step(const EnvState& state, const Action& action) const {
    return evaluate(apply_action(state.awards, action));
}

StepResult Environment::step(const EnvState& state, std::size_t action_index) const {
    if (action_index >= actions_.size()) {
        throw InvalidArgument(fmt::format("action index {} out of range ({} actions)", action_index, actions_.size()));
    }
    return step(state, actions_[action_index]);
}

std::vector<double> Environment::features(const EnvState& state) const {
    std::vector<double> out;
    out.reserve(feature_size());
    for (double r : state.awards) out.push_back(r / pool_);
    for (std::size_t n = 0; n < state.efforts.size(); ++n) {
        out.push_back(static_cast<double>(state.efforts[n]) / scenario_.contestants[n].native_rate());
    }
    return out;
}

// ---------------------------------------------------------------------------

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw InvalidArgument("replay buffer capacity must be positive");
    entries_.reserve(std::min<std::size_t>(capacity_, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
    if (entries_.size() < capacity_) {
        entries_.push_back(std::move(t));
        return;
    }
    entries_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= entries_.size()) throw InvalidArgument("replay index out of range");
    return entries_[(head_ + i) % entries_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t count, Rng& rng) const {
    if (count > entries_.size()) throw InvalidArgument("cannot sample more transitions than are stored");
    std::vector<std::size_t> chosen;
    chosen.reserve(count);
    const std::size_t n = entries_.size();
    for (std::size_t j = n - count; j < n; ++j) {
        const std::size_t t = rng.uniform_index(j + 1);
        if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
            chosen.push_back(t);
        } else {
            chosen.push_back(j);
        }
    }
    std::vector<const Transition*> out;
    out.reserve(count);
    for (auto i : chosen) out.push_back(&entries_[i]);
    return out;
}

// ---------------------------------------------------------------------------

void DqnConfig::validate() const {
    if (episodes == 0) throw InvalidArgument("dqn: episodes must be at least 1");
    if (steps_per_episode == 0) throw InvalidArgument("dqn: steps_per_episode must be at least 1");
    if (batch_size == 0) throw InvalidArgument("dqn: batch size must be at least 1");
    if (buffer_capacity < batch_size) throw InvalidArgument("dqn: buffer capacity must hold one batch");
    if (!(discount >= 0.0 && discount < 1.0)) throw InvalidArgument("dqn: discount must lie in [0, 1)");
    if (!(learning_rate > 0.0)) throw InvalidArgument("dqn: learning rate must be positive");
    if (!(epsilon_start > 0.0 && epsilon_start <= 1.0)) throw InvalidArgument("dqn: epsilon start must lie in (0, 1]");
    if (!(epsilon_end > 0.0 && epsilon_end <= 1.0)) throw InvalidArgument("dqn: epsilon end must lie in (0, 1]");
    if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) throw InvalidArgument("dqn: epsilon decay must lie in (0, 1]");
    if (target_sync_period == 0) throw InvalidArgument("dqn: target sync period must be at least 1");
    if (!(reward_scale > 0.0)) throw InvalidArgument("dqn: reward scale must be positive");
    if (!(value_scale > 0.0)) throw InvalidArgument("dqn: value scale must be positive");
    for (auto h : hidden_layers) {
        if (h == 0) throw InvalidArgument("dqn: hidden layer sizes must be positive");
    }
}

double mlp_update(Mlp& net, std::span<const Transition* const> batch, const Mlp& target, double discount,
                  double learning_rate) {
    if (batch.empty()) throw InvalidArgument("mlp_update needs a non-empty batch");
    std::vector<QSample> samples;
    samples.reserve(batch.size());
    for (const Transition* t : batch) {
        const auto next_values = target.forward(t->next_state);
        const double best_next = *std::max_element(next_values.begin(), next_values.end());
        samples.push_back(QSample{t->state, t->action, t->reward + discount * best_next});
    }
    std::vector<double> gradient;
    const double loss = net.loss_and_gradient(samples, gradient);

    auto params = net.parameters();
    std::vector<double> updated(params.begin(), params.end());
    for (std::size_t i = 0; i < updated.size(); ++i) {
        if (!std::isfinite(gradient[i])) throw TrainingError("non-finite gradient; update aborted");
        updated[i] -= learning_rate * gradient[i];
        if (!std::isfinite(updated[i])) throw TrainingError("update would produce non-finite parameters; aborted");
    }
    std::copy(updated.begin(), updated.end(), params.begin());
    return loss;
}

std::size_t greedy_action(const Mlp& net, std::span<const double> features) {
    const auto values = net.forward(features);
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

TrainResult train(const Environment& env, const DqnConfig& cfg) {
    cfg.validate();
    Rng init_rng(derive_seed(cfg.seed, "init"));
    Rng explore_rng(derive_seed(cfg.seed, "exploration"));
    Rng replay_rng(derive_seed(cfg.seed, "replay"));

    std::vector<std::size_t> sizes{env.feature_size()};
    sizes.insert(sizes.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
    sizes.push_back(env.action_count());

    TrainResult result;
    result.policy = Mlp::glorot(sizes, init_rng);
    Mlp target = result.policy;
    ReplayBuffer buffer(cfg.buffer_capacity);

    double epsilon = cfg.epsilon_start;
    std::size_t total_steps = 0;
    for (std::size_t episode = 0; episode < cfg.episodes; ++episode) {
        EnvState state = env.initial_state();
        std::vector<double> feats = env.features(state);
        double reward_sum = 0.0;
        double final_loss = 0.0;

        for (std::size_t t = 0; t < cfg.steps_per_episode; ++t) {
            const bool explore = explore_rng.uniform01() < epsilon;
            const std::size_t action =
                explore ? explore_rng.uniform_index(env.action_count()) : greedy_action(result.policy, feats);
            StepResult step = env.step(state, action);
            std::vector<double> next_feats = env.features(step.next);

            reward_sum += step.reward;
            final_loss = step.outcome.total_loss;
            buffer.push(Transition{feats, action, step.reward / cfg.value_scale, next_feats});
            state = std::move(step.next);
            feats = std::move(next_feats);
            ++total_steps;

            if (buffer.size() >= cfg.batch_size) {
                const auto batch = buffer.sample(cfg.batch_size, replay_rng);
                mlp_update(result.policy, batch, target, cfg.discount, cfg.learning_rate);
            }
            if (total_steps % cfg.target_sync_period == 0) target = result.policy;
        }
        result.history.push_back(HistoryRow{episode + 1, reward_sum / static_cast<double>(cfg.steps_per_episode),
                                            final_loss, epsilon});
        epsilon = std::max(cfg.epsilon_end, epsilon * cfg.epsilon_decay);
    }
    return result;
}

PolicyEvaluation evaluate_policy(const Mlp& net, const Environment& env, std::size_t steps) {
    PolicyEvaluation ev;
    EnvState state = env.initial_state();
    StepResult current = env.evaluate(state.awards);
    ev.best_state = current.next;
    ev.best_outcome = current.outcome;
    ev.best_reward = current.reward;
    for (std::size_t t = 0; t < steps; ++t) {
        current = env.step(state, greedy_action(net, env.features(state)));
        state = current.next;
        if (current.reward > ev.best_reward) {
            ev.best_state = current.next;
            ev.best_outcome = current.outcome;
            ev.best_reward = current.reward;
        }
    }
    ev.final_state = state;
    ev.final_outcome = current.outcome;
    return ev;
}

void write_history_csv(std::ostream& out, std::span<const HistoryRow> history) {
    out << "episode,mean_reward,total_loss,epsilon\n";
    for (const auto& row : history) {
        out << fmt::format("{},{},{},{}\n", row.episode, row.mean_reward, row.total_loss, row.epsilon);
    }
}

}  // namespace skelcontest::dqn
