#include "raincast/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace raincast {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw std::runtime_error("daily CSV: " + what + " at line " + std::to_string(line));
}

std::chrono::year_month_day parse_iso_date(const std::string& text, int line) {
    int y, m, d;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        parse_fail(line, "malformed date `" + text + "`");
    auto num = [&](std::size_t pos, std::size_t len, int& out) {
        auto res = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        return res.ec == std::errc() && res.ptr == text.data() + pos + len;
    };
    if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d))
        parse_fail(line, "malformed date `" + text + "`");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                          std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) parse_fail(line, "invalid calendar date `" + text + "`");
    return ymd;
}

unsigned days_in_month(std::chrono::year y, std::chrono::month m) {
    const std::chrono::year_month_day_last last{y, std::chrono::month_day_last{m}};
    return unsigned(last.day());
}

int month_index(std::chrono::year_month_day d, int start_year, unsigned start_month) {
    return (int(d.year()) - start_year) * 12 +
           (int(unsigned(d.month())) - int(start_month));
}

}  // namespace

std::size_t MonthlySeries::observed_count() const {
    std::size_t n = 0;
    for (bool b : mask) n += b;
    return n;
}

Series MonthlySeries::to_series() const {
    Series s;
    s.values = values;
    s.mask = mask;
    s.label = label;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        if (!s.mask[i]) s.values[i] = kMissing;
    return s;
}

std::vector<DailyRecord> parse_daily_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("daily CSV: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "date,value")
        throw std::runtime_error("daily CSV: expected header `date,value`, got `" +
                                 line + "`");

    std::vector<DailyRecord> records;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) parse_fail(lineno, "missing value field");
        const std::string date_s = line.substr(0, comma);
        const std::string value_s = line.substr(comma + 1);

        DailyRecord rec;
        rec.date = parse_iso_date(date_s, lineno);
        if (value_s == "NA") {
            rec.value = std::nullopt;
        } else {
            double v;
            auto res = std::from_chars(value_s.data(), value_s.data() + value_s.size(), v);
            if (res.ec != std::errc() || res.ptr != value_s.data() + value_s.size())
                parse_fail(lineno, "malformed value `" + value_s + "`");
            if (v < 0.0) parse_fail(lineno, "negative rainfall value");
            rec.value = v;
        }
        records.push_back(rec);
    }
    if (records.empty()) throw std::runtime_error("daily CSV: no data rows");
    return records;
}

MonthlySeries aggregate_monthly(const std::vector<DailyRecord>& records,
                                MonthDivisor divisor) {
    if (records.empty()) throw std::invalid_argument("aggregate_monthly: no records");
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto prev = std::chrono::sys_days(records[i - 1].date);
        const auto cur = std::chrono::sys_days(records[i].date);
        if (cur == prev)
            throw std::invalid_argument("aggregate_monthly: duplicate date at row " +
                                        std::to_string(i + 1));
        if (cur < prev)
            throw std::invalid_argument("aggregate_monthly: records not sorted at row " +
                                        std::to_string(i + 1));
    }

    MonthlySeries out;
    out.start_year = int(records.front().date.year());
    out.start_month = unsigned(records.front().date.month());
    const int n_months =
        month_index(records.back().date, out.start_year, out.start_month) + 1;
    std::vector<double> sums(n_months, 0.0);
    std::vector<int> present(n_months, 0);

    for (const auto& rec : records) {
        const int idx = month_index(rec.date, out.start_year, out.start_month);
        if (rec.value) {
            sums[idx] += *rec.value;
            ++present[idx];
        }
    }

    out.values.resize(n_months);
    out.mask.resize(n_months);
    int year = out.start_year;
    unsigned month = out.start_month;
    for (int i = 0; i < n_months; ++i) {
        if (present[i] == 0) {
            out.values[i] = kMissing;
            out.mask[i] = false;
        } else {
            const double div = divisor == MonthDivisor::CalendarDays
                                   ? days_in_month(std::chrono::year{year},
                                                   std::chrono::month{month})
                                   : present[i];
            out.values[i] = sums[i] / div;
            out.mask[i] = true;
        }
        if (++month > 12) {
            month = 1;
            ++year;
        }
    }
    return out;
}

std::pair<MonthlySeries, HoleSet> puncture(const MonthlySeries& series,
                                           std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> observed;
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series.mask[i]) observed.push_back(i);
    if (count >= observed.size())
        throw std::invalid_argument(
            "puncture: hole count must be below the observed length");

    // Partial Fisher-Yates: the first `count` slots end up a uniform
    // without-replacement sample.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng() % (observed.size() - i));
        std::swap(observed[i], observed[j]);
    }
    HoleSet holes;
    holes.seed = seed;
    holes.indices.assign(observed.begin(), observed.begin() + count);
    std::sort(holes.indices.begin(), holes.indices.end());

    MonthlySeries punctured = series;
    for (std::size_t idx : holes.indices) {
        punctured.mask[idx] = false;
        punctured.values[idx] = kMissing;
    }
    return {std::move(punctured), std::move(holes)};
}

void write_monthly_csv(const MonthlySeries& s, std::ostream& out) {
    out << "year,month,value,observed\n";
    int year = s.start_year;
    unsigned month = s.start_month;
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << year << ',' << month << ',';
        if (s.mask[i])
            out << format_double(s.values[i]) << ",1\n";
        else
            out << "NA,0\n";
        if (++month > 12) {
            month = 1;
            ++year;
        }
    }
}

MonthlySeries read_monthly_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("year,month,value,observed", 0) != 0)
        throw std::runtime_error(
            "monthly CSV: missing `year,month,value,observed` header");
    MonthlySeries s;
    bool first = true;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string y_s, m_s, v_s, o_s;
        if (!std::getline(row, y_s, ',') || !std::getline(row, m_s, ',') ||
            !std::getline(row, v_s, ',') || !std::getline(row, o_s))
            throw std::runtime_error("monthly CSV: malformed row at line " +
                                     std::to_string(lineno));
        if (first) {
            s.start_year = std::stoi(y_s);
            s.start_month = unsigned(std::stoi(m_s));
            first = false;
        }
        if (o_s == "1") {
            double v;
            auto res = std::from_chars(v_s.data(), v_s.data() + v_s.size(), v);
            if (res.ec != std::errc())
                throw std::runtime_error("monthly CSV: bad value at line " +
                                         std::to_string(lineno));
            s.values.push_back(v);
            s.mask.push_back(true);
        } else {
            s.values.push_back(kMissing);
            s.mask.push_back(false);
        }
    }
    if (s.values.empty()) throw std::runtime_error("monthly CSV: no data rows");
    return s;
}

}  // namespace raincast
