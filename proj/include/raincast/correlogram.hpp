#pragma once

#include <iosfwd>
#include <vector>

#include "raincast/series.hpp"

namespace raincast {

// Identification statistics for one series: sample ACF, PACF via the
// Durbin-Levinson recursion, and the white-noise zero band.
struct Correlogram {
    int n = 0;                 // observation count behind the estimates
    std::vector<int> lags;     // 1..K
    std::vector<double> acf;   // r_k
    std::vector<double> pacf;  // phi_kk
    double band = 0.0;         // half-width of the zero band
};

// floor(n/4); below n = 8 there is no meaningful correlogram.
int max_lag(int n);

// r_1..r_K with the full-sample mean and lag-0 denominator. The series
// must be fully observed (impute first) and non-constant.
std::vector<double> acf(const Series& s, int max_lag_k);

// phi_11..phi_KK. Throws when a recursion denominator collapses,
// naming the failing lag.
std::vector<double> pacf(const Series& s, int max_lag_k);
std::vector<double> pacf_from_acf(const std::vector<double>& r);

// 2/sqrt(n), the ~95% band under white noise.
double bands(int n);

Correlogram build_correlogram(const Series& s);
Correlogram build_correlogram(const Series& s, int max_lag_k);

// Plot data: `lag,acf,pacf,band`.
void write_correlogram_csv(const Correlogram& c, std::ostream& out);

}  // namespace raincast
