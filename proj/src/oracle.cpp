#include "skelcontest/oracle.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace skelcontest::oracle {

namespace {

// Non-increasing compositions of `units` into `parts` parts, each <= cap,
// emitted in ascending lexicographic order.
void compositions(long units, std::size_t parts, long cap, std::vector<long>& prefix,
                  std::vector<std::vector<long>>& out) {
    if (parts == 0) {
        if (units == 0) out.push_back(prefix);
        return;
    }
    // The first part must be large enough that the rest can absorb the remainder.
    const long lo = (units + static_cast<long>(parts) - 1) / static_cast<long>(parts);
    const long hi = std::min(units, cap);
    for (long v = lo; v <= hi; ++v) {
        prefix.push_back(v);
        compositions(units - v, parts - 1, v, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

std::vector<contest::AwardSetting> award_grid(double pool, std::size_t contestant_count, double step) {
    if (contestant_count == 0) throw InvalidArgument("award grid needs at least one contestant");
    if (!(step > 0.0) || !(pool >= 0.0)) throw InvalidArgument("award grid needs step > 0 and pool >= 0");
    const double ratio = pool / step;
    const double units = std::round(ratio);
    if (std::abs(ratio - units) > 1e-9 * std::max(1.0, ratio)) {
        throw InvalidArgument(fmt::format("step {} does not divide pool {}", step, pool));
    }
    std::vector<std::vector<long>> raw;
    std::vector<long> prefix;
    compositions(static_cast<long>(units), contestant_count, static_cast<long>(units), prefix, raw);

    std::vector<contest::AwardSetting> out;
    out.reserve(raw.size());
    for (const auto& parts : raw) {
        std::vector<double> prizes;
        prizes.reserve(parts.size());
        for (long p : parts) prizes.push_back(static_cast<double>(p) * step);
        out.emplace_back(std::move(prizes));
    }
    return out;
}

SearchResult exhaustive_award_search(const contest::ScenarioConfig& scenario, double step) {
    const auto grid = award_grid(scenario.awards.pool(), scenario.size(), step);
    const auto pop = scenario.population();
    SearchResult result;
    result.ledger.reserve(grid.size());
    for (const auto& awards : grid) {
        const auto outcome = contest::simulate_contest(scenario, awards, pop);
        result.ledger.push_back(LedgerEntry{awards, outcome.efforts, outcome.total_loss, outcome.feasible});
        ++result.evaluated_count;
        // Grid order is lexicographic, so strict improvement keeps the smallest tie.
        if (outcome.feasible && (!result.best_awards || outcome.total_loss < result.best_total_loss)) {
            result.best_awards = awards;
            result.best_total_loss = outcome.total_loss;
        }
    }
    return result;
}

EffortProfile exhaustive_effort_search(const contest::ScenarioConfig& scenario, std::uint64_t cap) {
    const std::size_t n = scenario.size();
    if (n == 0) throw InvalidArgument("scenario has no contestants");
    std::uint64_t profiles = 1;
    for (const auto& c : scenario.contestants) {
        if (profiles > cap / c.effort_set.size()) {
            throw InvalidArgument(fmt::format("effort search space exceeds the cap of {} profiles", cap));
        }
        profiles *= c.effort_set.size();
    }

    // Cheapest remaining effort per suffix, for budget pruning.
    std::vector<long> min_suffix(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) min_suffix[i] = min_suffix[i + 1] + scenario.contestants[i].effort_set.front();

    EffortProfile best;
    best.total_loss = std::numeric_limits<double>::infinity();
    std::vector<int> current(n, 0);
    auto search = [&](auto&& self, std::size_t i, long used, double loss) -> void {
        if (i == n) {
            if (loss < best.total_loss) {
                best.total_loss = loss;
                best.efforts = current;
            }
            return;
        }
        const auto& c = scenario.contestants[i];
        for (std::size_t e = 0; e < c.effort_set.size(); ++e) {
            const int f = c.effort_set[e];
            if (used + f + min_suffix[i + 1] > scenario.budget) break;  // effort sets are ascending
            current[i] = f;
            self(self, i + 1, used + f, loss + c.loss_table[e]);
        }
    };
    search(search, 0, 0, 0.0);
    if (best.efforts.empty()) throw InvalidArgument("no effort profile fits the budget");
    return best;
}

EffortProfile average_baseline(const contest::ScenarioConfig& scenario) {
    const std::size_t n = scenario.size();
    if (n == 0) throw InvalidArgument("scenario has no contestants");
    const double share = static_cast<double>(scenario.budget) / static_cast<double>(n);
    if (share < 1.0) throw InvalidArgument("budget per user is below one upload per second");
    EffortProfile out;
    for (const auto& c : scenario.contestants) {
        int chosen = c.effort_set.front();
        for (int f : c.effort_set) {
            if (f <= share) chosen = f;
        }
        out.efforts.push_back(chosen);
        out.total_loss += c.loss_at(chosen);
    }
    return out;
}

void write_ledger_csv(std::ostream& out, const SearchResult& result) {
    out << "awards,efforts,total_loss,feasible\n";
    for (const auto& e : result.ledger) {
        out << fmt::format("{},{},{},{}\n", fmt::join(e.awards.prizes(), ";"), fmt::join(e.efforts, ";"),
                           e.total_loss, e.feasible ? 1 : 0);
    }
}

}  // namespace skelcontest::oracle
