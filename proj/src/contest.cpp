#include "skelcontest/contest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace skelcontest::contest {

double ContestantState::loss_at(int effort) const {
    const auto it = std::lower_bound(effort_set.begin(), effort_set.end(), effort);
    if (it == effort_set.end() || *it != effort) {
        throw InvalidArgument(fmt::format("effort {} is not a divisor of native rate {}", effort, native_rate()));
    }
    return loss_table[static_cast<std::size_t>(it - effort_set.begin())];
}

ContestantState make_contestant(std::size_t id, skeleton::SkeletonSequence sequence, skeleton::Reconstruction mode) {
    std::vector<int> efforts = skeleton::divisors(sequence.native_rate());
    std::vector<double> losses;
    losses.reserve(efforts.size());
    for (int f : efforts) losses.push_back(skeleton::downsampling_loss(sequence, f, mode));
    const double a = std::max(losses.front(), kCapabilityFloor);
    return ContestantState{id, std::move(sequence), std::move(efforts), std::move(losses), a};
}

// ---------------------------------------------------------------------------

AwardSetting::AwardSetting(std::vector<double> prizes) : prizes_(std::move(prizes)) {
    for (std::size_t i = 0; i < prizes_.size(); ++i) {
        if (!std::isfinite(prizes_[i]) || prizes_[i] < 0.0) {
            throw InvalidArgument(fmt::format("prize {} must be finite and non-negative", i + 1));
        }
        if (i > 0 && prizes_[i] > prizes_[i - 1]) {
            throw InvalidArgument("prizes must be non-increasing");
        }
    }
}

AwardSetting AwardSetting::from_unsorted(std::vector<double> prizes) {
    std::sort(prizes.begin(), prizes.end(), std::greater<>());
    return AwardSetting(std::move(prizes));
}

double AwardSetting::pool() const { return std::accumulate(prizes_.begin(), prizes_.end(), 0.0); }

PopulationModel PopulationModel::calibrated(std::span<const ContestantState> contestants) {
    double m = kCapabilityFloor;
    for (const auto& c : contestants) m = std::max(m, c.capability);
    return PopulationModel{m};
}

PopulationModel ScenarioConfig::population() const {
    if (max_capability) {
        if (!(*max_capability > 0.0)) throw InvalidArgument("max capability must be positive");
        return PopulationModel{*max_capability};
    }
    return PopulationModel::calibrated(contestants);
}

std::string_view to_string(SelectionMode mode) {
    return mode == SelectionMode::net ? "net" : "literal-e";
}

SelectionMode parse_selection_mode(std::string_view name) {
    if (name == "net") return SelectionMode::net;
    if (name == "literal-e") return SelectionMode::literal_expected;
    throw InvalidArgument(fmt::format("unknown selection mode '{}' (expected net or literal-e)", name));
}

int ContestOutcome::total_effort() const { return std::accumulate(efforts.begin(), efforts.end(), 0); }

// ---------------------------------------------------------------------------

double capability(const skeleton::SkeletonSequence& seq, skeleton::Reconstruction mode) {
    return std::max(skeleton::downsampling_loss(seq, 1, mode), kCapabilityFloor);
}

double cost(double capability, double effort) {
    if (!(capability > 0.0)) throw InvalidArgument(fmt::format("capability must be positive, got {}", capability));
    if (effort < 0.0) throw InvalidArgument(fmt::format("effort must be non-negative, got {}", effort));
    return effort / capability;
}

double win_cdf(double loss, const PopulationModel& pop) {
    const double m = pop.max_capability;
    if (!(loss >= 0.0) || loss > m) return 0.0;
    return std::clamp((m - loss) / m, 0.0, 1.0);
}

namespace {

double binomial(std::size_t n, std::size_t k) {
    double out = 1.0;
    for (std::size_t i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
    return out;
}

}  // namespace

double expected_payment(double loss, std::span<const double> prizes, std::size_t contestant_count,
                        const PopulationModel& pop) {
    if (prizes.size() > contestant_count) {
        throw InvalidArgument(
            fmt::format("{} prizes for {} contestants: prizes may not outnumber contestants", prizes.size(),
                        contestant_count));
    }
    const double p = win_cdf(loss, pop);
    double total = 0.0;
    // Prize i (0-based) is won when exactly i of the other entrants rank higher.
    for (std::size_t i = 0; i < prizes.size(); ++i) {
        if (prizes[i] == 0.0) continue;
        total += prizes[i] * binomial(contestant_count - 1, i) *
                 std::pow(p, static_cast<double>(contestant_count - 1 - i)) *
                 std::pow(1.0 - p, static_cast<double>(i));
    }
    return total;
}

double expected_payment(double loss, const AwardSetting& awards, std::size_t contestant_count,
                        const PopulationModel& pop) {
    return expected_payment(loss, std::span<const double>(awards.prizes()), contestant_count, pop);
}

double utility(std::optional<std::size_t> rank, const AwardSetting& awards, double capability, double effort) {
    const double c = cost(capability, effort);
    if (!rank) return -c;
    return awards.prize_for_rank(*rank) - c;
}

double effort_value(const ContestantState& c, int effort, const AwardSetting& awards, const PopulationModel& pop,
                    std::size_t contestant_count, SelectionMode mode, double cost_scale) {
    const double payment = expected_payment(c.loss_at(effort), awards, contestant_count, pop);
    if (mode == SelectionMode::literal_expected) return payment;
    return payment - cost_scale * cost(c.capability, effort);
}

int select_effort(const ContestantState& c, const AwardSetting& awards, const PopulationModel& pop,
                  std::size_t contestant_count, SelectionMode mode, double cost_scale) {
    if (c.effort_set.empty()) throw InvalidArgument("contestant has an empty effort set");
    int best_effort = c.effort_set.front();
    double best_value = effort_value(c, best_effort, awards, pop, contestant_count, mode, cost_scale);
    for (std::size_t i = 1; i < c.effort_set.size(); ++i) {
        const int f = c.effort_set[i];
        const double v = effort_value(c, f, awards, pop, contestant_count, mode, cost_scale);
        // Rounding in the binomial sum must not break ties between equal values.
        if (v > best_value + 1e-12 * std::max(1.0, std::abs(best_value))) {
            best_value = v;
            best_effort = f;
        }
    }
    return best_effort;
}

ContestOutcome simulate_contest(const ScenarioConfig& cfg, const PopulationModel& pop) {
    return simulate_contest(cfg, cfg.awards, pop);
}

ContestOutcome simulate_contest(const ScenarioConfig& cfg, const AwardSetting& awards, const PopulationModel& pop) {
    const std::size_t n = cfg.size();
    if (n == 0) throw InvalidArgument("scenario has no contestants");
    if (awards.count() > n) {
        throw InvalidArgument(fmt::format("{} prizes for {} contestants", awards.count(), n));
    }
    ContestOutcome out;
    out.efforts.resize(n);
    out.per_user_loss.resize(n);
    out.prizes_assigned.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = cfg.contestants[i];
        out.efforts[i] = select_effort(c, awards, pop, n, cfg.selection_mode, cfg.cost_scale);
        out.per_user_loss[i] = c.loss_at(out.efforts[i]);
    }
    out.ranking.resize(n);
    std::iota(out.ranking.begin(), out.ranking.end(), std::size_t{0});
    std::stable_sort(out.ranking.begin(), out.ranking.end(), [&](std::size_t a, std::size_t b) {
        if (out.efforts[a] != out.efforts[b]) return out.efforts[a] > out.efforts[b];
        const auto& ca = cfg.contestants[a];
        const auto& cb = cfg.contestants[b];
        if (ca.capability != cb.capability) return ca.capability > cb.capability;
        return ca.id < cb.id;
    });
    for (std::size_t r = 0; r < n; ++r) out.prizes_assigned[out.ranking[r]] = awards.prize_for_rank(r);
    out.total_loss = std::accumulate(out.per_user_loss.begin(), out.per_user_loss.end(), 0.0);
    out.feasible = out.total_effort() <= cfg.budget;
    return out;
}

ContestOutcome simulate_contest(const ScenarioConfig& cfg) { return simulate_contest(cfg, cfg.population()); }

double total_loss(const ContestOutcome& outcome) {
    return std::accumulate(outcome.per_user_loss.begin(), outcome.per_user_loss.end(), 0.0);
}

}  // namespace skelcontest::contest
