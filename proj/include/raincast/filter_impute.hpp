#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "raincast/series.hpp"

namespace raincast {

// estimate_phi refuses correlations outside (0, 1); the caller may
// supply phi manually instead.
class NonPositivePhi : public std::domain_error {
public:
    explicit NonPositivePhi(double r1)
        : std::domain_error("estimated lag-1 correlation " + std::to_string(r1) +
                            " is outside (0,1); supply phi manually"),
          r1(r1) {}
    double r1;
};

// Exponential-weight moving average: slot i carries weight phi^(i+1),
// normalized to sum to one over the window.
struct FilterSpec {
    double phi = 0.5;
    int window = 12;  // M: number of lagged slots beyond the current one

    void validate() const;
    // w_1..w_{slots} for a window truncated to `slots` entries
    // (slots = window + 1 when the full history is available).
    std::vector<double> normalized_weights(int slots) const;
};

struct ImputedHole {
    std::size_t index;
    double value;
    int window_used;  // slots that actually contributed
};

struct ImputationResult {
    Series series;  // all-observed after filling
    std::map<std::size_t, double> filled;
    std::vector<ImputedHole> holes;
    FilterSpec spec;
    double fill_mean = 0.0;  // mean of originally observed values
    std::string strategy;
};

// Lag-1 sample autocorrelation of the observed values; the "correlation
// of the entire data" that parameterizes the filter.
double estimate_phi(const Series& s);

// y_t = sum_i w_{i+1} x_{t-i} over the trailing window, defined from
// t = M+1 on (origin_offset grows by M). With normalize = false the raw
// phi-power weights are used instead, for comparison runs.
Series filter_series(const Series& s, const FilterSpec& spec, bool normalize = true);

// Fill every hole left to right: the hole's own slot takes the mean of
// the originally observed values, earlier slots take observed or
// previously imputed neighbors. Windows truncated at the series start
// renormalize over the available slots.
ImputationResult impute(const Series& s, const FilterSpec& spec);

enum class BaselineStrategy { Mean, Naive, Trend, BoundingAverage };

BaselineStrategy baseline_strategy_from_name(const std::string& name);
std::string to_string(BaselineStrategy strategy);

ImputationResult baseline_impute(const Series& s, BaselineStrategy strategy);

std::string imputation_report_json(const ImputationResult& result);

}  // namespace raincast
