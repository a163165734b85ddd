#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "raincast/series.hpp"

namespace raincast {

struct DailyRecord {
    std::chrono::year_month_day date;
    std::optional<double> value;  // mm of rainfall; nullopt = marked missing
};

// Ordered monthly observations with a calendar anchor.
struct MonthlySeries {
    int start_year = 0;
    unsigned start_month = 1;  // 1..12
    std::vector<double> values;
    std::vector<bool> mask;
    std::string label;

    std::size_t size() const { return values.size(); }
    std::size_t observed_count() const;
    Series to_series() const;
};

struct HoleSet {
    std::vector<std::size_t> indices;  // sorted, unique
    std::uint64_t seed = 0;
};

// Divisor convention for the monthly average. CalendarDays follows the
// stated aggregation rule literally (missing days shrink the numerator
// only); PresentDays divides by the number of days actually observed.
enum class MonthDivisor { CalendarDays, PresentDays };

// Input: header row `date,value`, ISO dates, decimal or `NA` values.
// Errors name the offending line.
std::vector<DailyRecord> parse_daily_csv(std::istream& in);

// One value per calendar month spanning the records. A month with zero
// present daily readings is masked missing. Records must be sorted and
// duplicate-free.
MonthlySeries aggregate_monthly(const std::vector<DailyRecord>& records,
                                MonthDivisor divisor = MonthDivisor::CalendarDays);

// Switch `count` distinct observed positions to missing, sampled
// uniformly without replacement. Deterministic for a fixed seed.
std::pair<MonthlySeries, HoleSet> puncture(const MonthlySeries& series,
                                           std::size_t count, std::uint64_t seed);

// Monthly CSV: `year,month,value,observed`; missing cells as NA,
// observed flag as 0/1. Doubles round-trip bit-exactly.
void write_monthly_csv(const MonthlySeries& s, std::ostream& out);
MonthlySeries read_monthly_csv(std::istream& in);

}  // namespace raincast
