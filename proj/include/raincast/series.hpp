#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace raincast {

// One step of the transform history, enough to replay the inverse.
struct TransformStep {
    enum class Kind { Log, Diff };
    Kind kind;
    int lag = 0;        // Diff only
    double offset = 0;  // Log only: value added before taking the log
};

// Univariate series with an explicit missing-value mask. Missing cells
// hold NaN and must never feed arithmetic; the mask is authoritative.
// origin_offset is the index of values[0] in the untransformed series.
struct Series {
    std::vector<double> values;
    std::vector<bool> mask;
    int origin_offset = 0;
    std::vector<TransformStep> meta;
    std::string label;

    Series() = default;
    explicit Series(std::vector<double> v, std::string lbl = "");
    Series(std::vector<double> v, std::vector<bool> m, std::string lbl = "");

    std::size_t size() const { return values.size(); }
    bool observed(std::size_t i) const { return mask[i]; }
    std::size_t observed_count() const;
    bool fully_observed() const;

    // Observed values in order, mask gaps skipped.
    std::vector<double> observed_values() const;

    void set_missing(std::size_t i);
    void set_value(std::size_t i, double v);
};

struct MeanTest {
    double mean;
    double sd;
    int n;  // pre-differencing observation count
    int b;  // first computable index of the working series
    double t_value;
};

// Natural log of every observed value. Without an offset any observed
// value <= 0 is an error naming the index; with an offset the bound is
// value + offset > 0 and the inverse subtracts the offset again.
Series log_transform(const Series& s, std::optional<double> offset = std::nullopt);

// z_t = y_t - y_{t-lag}; output pairs with a missing member are missing.
Series seasonal_difference(const Series& s, int lag);

// Inverse of seasonal_difference given the `lag` pre-difference values.
Series undifference(const Series& z, const std::vector<double>& initial, int lag);

// Exact inverse replay of s.meta (innermost transform undone first).
// Requires a fully observed series and a Diff-free history unless
// initial values are embedded; used by forecasting to map back to the
// original scale, which only ever needs the Log steps.
std::vector<double> invert_log_steps(const std::vector<double>& values,
                                     const std::vector<TransformStep>& meta);

// Sample mean and sd (n-1 divisor) over observed values only.
std::pair<double, double> mean_sd(const Series& s);

// t = mean / (sd / sqrt(n - b + 1)). The pipeline drops the model mean
// when |t| < 2.
MeanTest mean_significance(double mean, double sd, int n, int b);
MeanTest mean_significance(const Series& s, int n, int b);

// Series CSV: `index,value,observed`, missing cells as NA. Doubles are
// written shortest-round-trip so a read-back is bit-exact.
void write_series_csv(const Series& s, std::ostream& out);
Series read_series_csv(std::istream& in);

// Transform-history sidecar (JSON) so downstream consumers can map
// model output back to the original scale.
std::string transform_history_json(const Series& s);

}  // namespace raincast
