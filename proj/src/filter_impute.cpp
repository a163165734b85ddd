#include "raincast/filter_impute.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "raincast/kernels.hpp"

namespace raincast {

void FilterSpec::validate() const {
    if (!(phi > 0.0 && phi < 1.0))
        throw std::invalid_argument("FilterSpec: phi must lie in (0,1)");
    if (window < 0) throw std::invalid_argument("FilterSpec: window must be >= 0");
}

std::vector<double> FilterSpec::normalized_weights(int slots) const {
    validate();
    std::vector<double> w(slots);
    double sum = 0.0;
    for (int i = 0; i < slots; ++i) {
        w[i] = std::pow(phi, i + 1);
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

double estimate_phi(const Series& s) {
    if (s.observed_count() < 3)
        throw std::invalid_argument("estimate_phi: need at least 3 observed values");

    // Lag-1 version of the autocorrelation estimate, restricted to
    // adjacent pairs whose members are both observed so a punctured
    // series still yields a usable phi.
    const std::vector<double> obs = s.observed_values();
    const auto [lo, hi] = std::minmax_element(obs.begin(), obs.end());
    if (*lo == *hi) throw std::domain_error("estimate_phi: constant series");
    double mean = std::accumulate(obs.begin(), obs.end(), 0.0) / obs.size();
    double denom = 0.0;
    for (double v : obs) denom += (v - mean) * (v - mean);
    if (denom == 0.0) throw std::domain_error("estimate_phi: constant series");
    double num = 0.0;
    for (std::size_t t = 0; t + 1 < s.size(); ++t)
        if (s.mask[t] && s.mask[t + 1])
            num += (s.values[t] - mean) * (s.values[t + 1] - mean);
    const double r1 = num / denom;
    if (!(r1 > 0.0 && r1 < 1.0)) throw NonPositivePhi(r1);
    return r1;
}

Series filter_series(const Series& s, const FilterSpec& spec, bool normalize) {
    spec.validate();
    if (!s.fully_observed())
        throw std::invalid_argument("filter_series: series must be fully observed");
    if (s.size() <= static_cast<std::size_t>(spec.window))
        throw std::invalid_argument("filter_series: series length must exceed window");

    // Slot i reads x_{t-i}; the current observation carries phi^1.
    std::vector<double> w(spec.window + 1);
    for (int i = 0; i <= spec.window; ++i) w[i] = std::pow(spec.phi, i + 1);
    if (normalize) {
        const double sum = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& v : w) v /= sum;
    }

    Series out;
    out.values = kernels::weighted_window(s.values, w);
    out.mask.assign(out.values.size(), true);
    out.origin_offset = s.origin_offset + spec.window;
    out.meta = s.meta;
    out.label = s.label;
    return out;
}

ImputationResult impute(const Series& s, const FilterSpec& spec) {
    spec.validate();
    if (s.observed_count() == 0)
        throw std::invalid_argument("impute: series is entirely missing");
    if (s.observed_count() < 2)
        throw std::invalid_argument("impute: need at least 2 observed values");

    ImputationResult result;
    result.spec = spec;
    result.strategy = "filter";
    const std::vector<double> obs = s.observed_values();
    result.fill_mean = std::accumulate(obs.begin(), obs.end(), 0.0) / obs.size();

    Series filled = s;
    for (std::size_t hole = 0; hole < s.size(); ++hole) {
        if (s.mask[hole]) continue;
        // Slot 0 stands in for x_s itself and takes the observed mean;
        // slot i >= 1 reads x_{s-i}, observed or already filled.
        const int slots =
            std::min<int>(spec.window + 1, static_cast<int>(hole) + 1);
        const std::vector<double> w = spec.normalized_weights(slots);
        double value = w[0] * result.fill_mean;
        for (int i = 1; i < slots; ++i) value += w[i] * filled.values[hole - i];
        filled.set_value(hole, value);
        result.filled[hole] = value;
        result.holes.push_back({hole, value, slots});
    }
    result.series = std::move(filled);
    return result;
}

BaselineStrategy baseline_strategy_from_name(const std::string& name) {
    if (name == "mean") return BaselineStrategy::Mean;
    if (name == "naive") return BaselineStrategy::Naive;
    if (name == "trend") return BaselineStrategy::Trend;
    if (name == "bounding" || name == "bounding_average")
        return BaselineStrategy::BoundingAverage;
    throw std::invalid_argument("unknown imputation strategy `" + name + "`");
}

std::string to_string(BaselineStrategy strategy) {
    switch (strategy) {
        case BaselineStrategy::Mean: return "mean";
        case BaselineStrategy::Naive: return "naive";
        case BaselineStrategy::Trend: return "trend";
        case BaselineStrategy::BoundingAverage: return "bounding_average";
    }
    return "?";
}

namespace {

[[noreturn]] void strategy_fail(std::size_t hole, BaselineStrategy strategy,
                                const std::string& why) {
    throw std::runtime_error("baseline_impute: strategy `" + to_string(strategy) +
                             "` cannot fill hole at index " + std::to_string(hole) +
                             ": " + why);
}

// Least squares for Y = a + b*t over the points before the hole
// (t is the 0-based series index).
double trend_fill(const Series& filled, std::size_t hole, const Series& original) {
    int n = 0;
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int observed_before = 0;
    for (std::size_t t = 0; t < hole; ++t) {
        if (!filled.mask[t]) continue;
        if (original.mask[t]) ++observed_before;
        const double td = static_cast<double>(t);
        ++n;
        st += td;
        sy += filled.values[t];
        stt += td * td;
        sty += td * filled.values[t];
    }
    if (observed_before < 2)
        strategy_fail(hole, BaselineStrategy::Trend,
                      "needs at least 2 observed points before it");
    const double det = n * stt - st * st;
    if (det == 0.0)
        strategy_fail(hole, BaselineStrategy::Trend, "degenerate regression");
    const double b = (n * sty - st * sy) / det;
    const double a = (sy - b * st) / n;
    return a + b * static_cast<double>(hole);
}

double bounding_fill(const Series& original, std::size_t hole) {
    std::optional<double> left, right;
    for (std::size_t t = hole; t-- > 0;)
        if (original.mask[t]) {
            left = original.values[t];
            break;
        }
    for (std::size_t t = hole + 1; t < original.size(); ++t)
        if (original.mask[t]) {
            right = original.values[t];
            break;
        }
    if (!left || !right)
        strategy_fail(hole, BaselineStrategy::BoundingAverage,
                      "no observed neighbor on both sides");
    return 0.5 * (*left + *right);
}

}  // namespace

ImputationResult baseline_impute(const Series& s, BaselineStrategy strategy) {
    if (s.observed_count() < 1)
        throw std::invalid_argument("baseline_impute: series is entirely missing");

    ImputationResult result;
    result.strategy = to_string(strategy);
    const std::vector<double> obs = s.observed_values();
    result.fill_mean = std::accumulate(obs.begin(), obs.end(), 0.0) / obs.size();

    Series filled = s;
    for (std::size_t hole = 0; hole < s.size(); ++hole) {
        if (s.mask[hole]) continue;
        double value = 0.0;
        switch (strategy) {
            case BaselineStrategy::Mean:
                value = result.fill_mean;
                break;
            case BaselineStrategy::Naive:
                if (hole == 0)
                    strategy_fail(hole, strategy, "no predecessor");
                value = filled.values[hole - 1];
                break;
            case BaselineStrategy::Trend:
                value = trend_fill(filled, hole, s);
                break;
            case BaselineStrategy::BoundingAverage:
                value = bounding_fill(s, hole);
                break;
        }
        filled.set_value(hole, value);
        result.filled[hole] = value;
        result.holes.push_back({hole, value, 0});
    }
    result.series = std::move(filled);
    return result;
}

std::string imputation_report_json(const ImputationResult& result) {
    nlohmann::json holes = nlohmann::json::array();
    for (const auto& h : result.holes)
        holes.push_back({{"index", h.index},
                         {"value", h.value},
                         {"window_used", h.window_used}});
    nlohmann::json doc{{"strategy", result.strategy},
                       {"fill_mean", result.fill_mean},
                       {"holes", holes}};
    if (result.strategy == "filter")
        doc["spec"] = {{"phi", result.spec.phi}, {"M", result.spec.window}};
    return doc.dump(2);
}

}  // namespace raincast
