#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "skelcontest/contest.hpp"

namespace skelcontest::oracle {

/// Every non-increasing, non-negative prize vector of the given length that
/// sums to `pool` in multiples of `step`, in ascending lexicographic order.
/// Throws InvalidArgument unless `step` divides `pool`.
std::vector<contest::AwardSetting> award_grid(double pool, std::size_t contestant_count, double step);

struct LedgerEntry {
    contest::AwardSetting awards;
    std::vector<int> efforts;
    double total_loss = 0.0;
    bool feasible = false;
};

struct SearchResult {
    std::optional<contest::AwardSetting> best_awards;  // empty when nothing is feasible
    double best_total_loss = 0.0;
    std::size_t evaluated_count = 0;
    std::vector<LedgerEntry> ledger;

    bool has_feasible() const { return best_awards.has_value(); }
};

/// Simulates the contest at every grid entry and keeps the budget-feasible
/// entry of least total loss (ties: lexicographically smallest prizes).
SearchResult exhaustive_award_search(const contest::ScenarioConfig& scenario, double step);

struct EffortProfile {
    std::vector<int> efforts;
    double total_loss = 0.0;
};

inline constexpr std::uint64_t kDefaultEffortSearchCap = 10'000'000;

/// Least total loss over all budget-feasible effort profiles, ignoring
/// incentives. Throws InvalidArgument when the profile count exceeds `cap`
/// or no profile fits the budget.
EffortProfile exhaustive_effort_search(const contest::ScenarioConfig& scenario,
                                       std::uint64_t cap = kDefaultEffortSearchCap);

/// Every user uploads at the largest divisor of its native rate not above
/// budget / N.
EffortProfile average_baseline(const contest::ScenarioConfig& scenario);

void write_ledger_csv(std::ostream& out, const SearchResult& result);

}  // namespace skelcontest::oracle
