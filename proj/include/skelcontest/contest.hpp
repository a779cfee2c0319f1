#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "skelcontest/skeleton.hpp"

namespace skelcontest::contest {

/// Floor applied to capabilities so static users never divide by zero.
inline constexpr double kCapabilityFloor = 1e-9;

/// Prize units per unit of f/a in a contestant's net payoff. Keypoints are
/// in meters, which puts f/a on the same order as a 100-unit prize pool;
/// this weight restores the balance between payment and upload cost.
inline constexpr double kDefaultCostScale = 0.1;

/// One user's contest entry. The loss table caches the down-sampling loss at
/// every admissible effort (the divisors of the native rate).
struct ContestantState {
    std::size_t id = 0;
    skeleton::SkeletonSequence sequence;
    std::vector<int> effort_set;
    std::vector<double> loss_table;
    double capability = kCapabilityFloor;

    int native_rate() const { return sequence.native_rate(); }
    double loss_at(int effort) const;
};

ContestantState make_contestant(std::size_t id, skeleton::SkeletonSequence sequence,
                                skeleton::Reconstruction mode = skeleton::Reconstruction::hold);

/// Ordered prize vector r_1 >= r_2 >= ... >= 0. The pool is the prize sum.
class AwardSetting {
public:
    AwardSetting() = default;
    /// Throws InvalidArgument unless the prizes are non-negative, finite and non-increasing.
    explicit AwardSetting(std::vector<double> prizes);

    /// Sorts the prizes non-increasing before validating.
    static AwardSetting from_unsorted(std::vector<double> prizes);

    const std::vector<double>& prizes() const { return prizes_; }
    std::size_t count() const { return prizes_.size(); }
    double pool() const;
    /// Prize for a 0-based rank; zero past the last prize.
    double prize_for_rank(std::size_t rank) const { return rank < prizes_.size() ? prizes_[rank] : 0.0; }

    friend bool operator==(const AwardSetting&, const AwardSetting&) = default;

private:
    std::vector<double> prizes_;
};

/// Uniform capability population on [0, max_capability].
struct PopulationModel {
    double max_capability = 1.0;

    static PopulationModel calibrated(std::span<const ContestantState> contestants);
};

enum class SelectionMode {
    net,             // expected payment minus weighted cost
    literal_expected // expected payment alone
};

std::string_view to_string(SelectionMode mode);
SelectionMode parse_selection_mode(std::string_view name);

struct ScenarioConfig {
    std::vector<ContestantState> contestants;
    int budget = 120;
    AwardSetting awards;
    SelectionMode selection_mode = SelectionMode::net;
    double cost_scale = kDefaultCostScale;
    std::optional<double> max_capability;  // overrides the calibrated population

    std::size_t size() const { return contestants.size(); }
    PopulationModel population() const;
};

struct ContestOutcome {
    std::vector<int> efforts;             // per contestant, in enrolment order
    std::vector<std::size_t> ranking;     // contestant indices, best first
    std::vector<double> prizes_assigned;  // per contestant
    std::vector<double> per_user_loss;    // per contestant
    double total_loss = 0.0;
    bool feasible = true;

    int total_effort() const;
};

/// Down-sampling loss at one upload per second, floored at kCapabilityFloor.
double capability(const skeleton::SkeletonSequence& seq,
                  skeleton::Reconstruction mode = skeleton::Reconstruction::hold);

/// C(a, f) = f / a. Throws InvalidArgument for a <= 0 or f < 0.
double cost(double capability, double effort);

/// Probability that another contestant's loss exceeds `loss` under the
/// uniform population, clamped to [0, 1].
double win_cdf(double loss, const PopulationModel& pop);

/// Binomial expected prize for a contestant with the given loss among
/// `contestant_count` entrants. Throws InvalidArgument when there are more
/// prizes than entrants.
double expected_payment(double loss, std::span<const double> prizes, std::size_t contestant_count,
                        const PopulationModel& pop);
double expected_payment(double loss, const AwardSetting& awards, std::size_t contestant_count,
                        const PopulationModel& pop);

/// Realized payoff: the prize for a 0-based `rank` (none = unranked) minus cost.
double utility(std::optional<std::size_t> rank, const AwardSetting& awards, double capability, double effort);

/// Value a contestant assigns to an effort under the given awards.
double effort_value(const ContestantState& c, int effort, const AwardSetting& awards, const PopulationModel& pop,
                    std::size_t contestant_count, SelectionMode mode, double cost_scale = kDefaultCostScale);

/// Best response over the contestant's effort set; ties go to the smallest effort.
int select_effort(const ContestantState& c, const AwardSetting& awards, const PopulationModel& pop,
                  std::size_t contestant_count, SelectionMode mode, double cost_scale = kDefaultCostScale);

/// Every contestant best-responds, then prizes are paid by descending effort
/// (ties: higher capability, then lower id).
ContestOutcome simulate_contest(const ScenarioConfig& cfg, const PopulationModel& pop);
ContestOutcome simulate_contest(const ScenarioConfig& cfg);
/// Same contest with `awards` in place of the scenario's own award setting.
ContestOutcome simulate_contest(const ScenarioConfig& cfg, const AwardSetting& awards, const PopulationModel& pop);

double total_loss(const ContestOutcome& outcome);

}  // namespace skelcontest::contest
