#include "raincast/series.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace raincast {

namespace {
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}
}  // namespace

Series::Series(std::vector<double> v, std::string lbl)
    : values(std::move(v)), mask(values.size(), true), label(std::move(lbl)) {}

Series::Series(std::vector<double> v, std::vector<bool> m, std::string lbl)
    : values(std::move(v)), mask(std::move(m)), label(std::move(lbl)) {
    if (values.size() != mask.size())
        throw std::invalid_argument("Series: values and mask length differ");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!mask[i]) values[i] = kMissing;
}

std::size_t Series::observed_count() const {
    std::size_t n = 0;
    for (bool b : mask) n += b;
    return n;
}

bool Series::fully_observed() const { return observed_count() == size(); }

std::vector<double> Series::observed_values() const {
    std::vector<double> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i)
        if (mask[i]) out.push_back(values[i]);
    return out;
}

void Series::set_missing(std::size_t i) {
    mask[i] = false;
    values[i] = kMissing;
}

void Series::set_value(std::size_t i, double v) {
    mask[i] = true;
    values[i] = v;
}

Series log_transform(const Series& s, std::optional<double> offset) {
    const double off = offset.value_or(0.0);
    Series out = s;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s.mask[i]) continue;
        const double shifted = s.values[i] + off;
        if (shifted <= 0.0) {
            std::ostringstream msg;
            msg << "log_transform: non-positive value at index " << i;
            if (!offset) msg << " (no offset enabled)";
            throw std::domain_error(msg.str());
        }
        out.values[i] = std::log(shifted);
    }
    out.meta.push_back({TransformStep::Kind::Log, 0, off});
    return out;
}

Series seasonal_difference(const Series& s, int lag) {
    if (lag < 1) throw std::invalid_argument("seasonal_difference: lag must be positive");
    if (s.size() <= static_cast<std::size_t>(lag))
        throw std::invalid_argument("seasonal_difference: series length must exceed lag");
    Series out;
    const std::size_t m = s.size() - lag;
    out.values.resize(m);
    out.mask.resize(m);
    for (std::size_t t = 0; t < m; ++t) {
        if (s.mask[t + lag] && s.mask[t]) {
            out.values[t] = s.values[t + lag] - s.values[t];
            out.mask[t] = true;
        } else {
            out.values[t] = kMissing;
            out.mask[t] = false;
        }
    }
    out.origin_offset = s.origin_offset + lag;
    out.meta = s.meta;
    out.meta.push_back({TransformStep::Kind::Diff, lag, 0.0});
    out.label = s.label;
    return out;
}

Series undifference(const Series& z, const std::vector<double>& initial, int lag) {
    if (lag < 1) throw std::invalid_argument("undifference: lag must be positive");
    if (static_cast<int>(initial.size()) != lag)
        throw std::invalid_argument("undifference: initial must hold exactly lag values");
    if (!z.fully_observed())
        throw std::invalid_argument("undifference: series must be fully observed");
    Series out;
    out.values.resize(z.size());
    out.mask.assign(z.size(), true);
    for (std::size_t t = 0; t < z.size(); ++t) {
        const double prev = t >= static_cast<std::size_t>(lag)
                                ? out.values[t - lag]
                                : initial[t];
        out.values[t] = z.values[t] + prev;
    }
    out.origin_offset = z.origin_offset;
    out.meta = z.meta;
    if (!out.meta.empty() && out.meta.back().kind == TransformStep::Kind::Diff &&
        out.meta.back().lag == lag)
        out.meta.pop_back();
    out.label = z.label;
    return out;
}

std::vector<double> invert_log_steps(const std::vector<double>& values,
                                     const std::vector<TransformStep>& meta) {
    std::vector<double> out = values;
    for (auto it = meta.rbegin(); it != meta.rend(); ++it) {
        if (it->kind != TransformStep::Kind::Log) continue;
        for (double& v : out) v = std::exp(v) - it->offset;
    }
    return out;
}

std::pair<double, double> mean_sd(const Series& s) {
    const std::vector<double> obs = s.observed_values();
    if (obs.size() < 2)
        throw std::invalid_argument("mean_sd: need at least 2 observed values");
    double sum = 0.0;
    for (double v : obs) sum += v;
    const double mean = sum / obs.size();
    double ss = 0.0;
    for (double v : obs) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (obs.size() - 1));
    return {mean, sd};
}

MeanTest mean_significance(double mean, double sd, int n, int b) {
    if (b < 1) throw std::invalid_argument("mean_significance: b must be positive");
    const int count = n - b + 1;
    if (count < 2)
        throw std::invalid_argument("mean_significance: n - b + 1 must be at least 2");
    const double t = mean / (sd / std::sqrt(static_cast<double>(count)));
    return {mean, sd, n, b, t};
}

MeanTest mean_significance(const Series& s, int n, int b) {
    const auto [mean, sd] = mean_sd(s);
    return mean_significance(mean, sd, n, b);
}

void write_series_csv(const Series& s, std::ostream& out) {
    out << "index,value,observed\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << (s.origin_offset + static_cast<int>(i)) << ',';
        if (s.mask[i])
            out << format_double(s.values[i]) << ",1\n";
        else
            out << "NA,0\n";
    }
}

Series read_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("index,value,observed", 0) != 0)
        throw std::runtime_error("series CSV: missing `index,value,observed` header");
    Series s;
    bool first = true;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string idx_s, val_s, obs_s;
        if (!std::getline(row, idx_s, ',') || !std::getline(row, val_s, ',') ||
            !std::getline(row, obs_s))
            throw std::runtime_error("series CSV: malformed row at line " +
                                     std::to_string(lineno));
        if (first) {
            s.origin_offset = std::stoi(idx_s);
            first = false;
        }
        if (obs_s == "1") {
            double v;
            auto res = std::from_chars(val_s.data(), val_s.data() + val_s.size(), v);
            if (res.ec != std::errc())
                throw std::runtime_error("series CSV: bad value at line " +
                                         std::to_string(lineno));
            s.values.push_back(v);
            s.mask.push_back(true);
        } else {
            s.values.push_back(kMissing);
            s.mask.push_back(false);
        }
    }
    if (s.values.empty()) throw std::runtime_error("series CSV: no data rows");
    return s;
}

std::string transform_history_json(const Series& s) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& step : s.meta) {
        if (step.kind == TransformStep::Kind::Log)
            steps.push_back({{"step", "log"}, {"offset", step.offset}});
        else
            steps.push_back({{"step", "diff"}, {"lag", step.lag}});
    }
    nlohmann::json doc{{"origin_offset", s.origin_offset}, {"transforms", steps}};
    return doc.dump(2);
}

}  // namespace raincast
