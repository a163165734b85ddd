#include "raincast/correlogram.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "raincast/kernels.hpp"

namespace raincast {

int max_lag(int n) {
    if (n < 8) throw std::invalid_argument("max_lag: need n >= 8");
    return n / 4;
}

std::vector<double> acf(const Series& s, int max_lag_k) {
    if (!s.fully_observed())
        throw std::invalid_argument(
            "acf: series has missing values; impute before identification");
    const int n = static_cast<int>(s.size());
    if (max_lag_k < 1 || max_lag_k > n - 1)
        throw std::invalid_argument("acf: K must be in [1, n-1]");
    // The centered denominator of a constant series is only zero up to
    // the rounding of the mean, so test the raw values instead.
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    if (*lo == *hi) throw std::domain_error("acf: constant series");
    double denom = 0.0;
    std::vector<double> r = kernels::acf_sweep(s.values, max_lag_k, &denom);
    if (denom == 0.0) throw std::domain_error("acf: constant series (zero denominator)");
    return r;
}

std::vector<double> pacf_from_acf(const std::vector<double>& r) {
    const int k_max = static_cast<int>(r.size());
    std::vector<double> diag(k_max);
    if (k_max == 0) return diag;

    std::vector<double> prev{r[0]};  // phi_{k-1, j}, j = 1..k-1
    diag[0] = r[0];
    for (int k = 2; k <= k_max; ++k) {
        double num = r[k - 1];
        double den = 1.0;
        for (int j = 1; j < k; ++j) {
            num -= prev[j - 1] * r[k - 1 - j];
            den -= prev[j - 1] * r[j - 1];
        }
        if (std::abs(den) < 1e-12)
            throw std::domain_error("pacf: degenerate recursion at lag " +
                                    std::to_string(k));
        const double phi_kk = num / den;
        std::vector<double> cur(k);
        for (int j = 1; j < k; ++j)
            cur[j - 1] = prev[j - 1] - phi_kk * prev[k - 1 - j];
        cur[k - 1] = phi_kk;
        diag[k - 1] = phi_kk;
        prev = std::move(cur);
    }
    return diag;
}

std::vector<double> pacf(const Series& s, int max_lag_k) {
    return pacf_from_acf(acf(s, max_lag_k));
}

double bands(int n) {
    if (n < 8) throw std::invalid_argument("bands: need n >= 8");
    return 2.0 / std::sqrt(static_cast<double>(n));
}

Correlogram build_correlogram(const Series& s) {
    return build_correlogram(s, max_lag(static_cast<int>(s.size())));
}

Correlogram build_correlogram(const Series& s, int max_lag_k) {
    Correlogram c;
    c.n = static_cast<int>(s.size());
    c.acf = acf(s, max_lag_k);
    c.pacf = pacf_from_acf(c.acf);
    c.band = bands(c.n);
    c.lags.resize(max_lag_k);
    for (int k = 1; k <= max_lag_k; ++k) c.lags[k - 1] = k;
    return c;
}

void write_correlogram_csv(const Correlogram& c, std::ostream& out) {
    out << "lag,acf,pacf,band\n";
    for (std::size_t i = 0; i < c.lags.size(); ++i)
        out << c.lags[i] << ',' << c.acf[i] << ',' << c.pacf[i] << ',' << c.band
            << '\n';
}

}  // namespace raincast
