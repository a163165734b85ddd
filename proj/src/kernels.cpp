#include "raincast/kernels.hpp"

#include <stdexcept>

namespace raincast::kernels {

namespace {

double centered_mean(std::span<const double> z) {
    double sum = 0.0;
    for (double v : z) sum += v;
    return sum / static_cast<double>(z.size());
}

double lag_product(std::span<const double> z, double mean, int k) {
    double s = 0.0;
    const int n = static_cast<int>(z.size());
    for (int t = 0; t + k < n; ++t) s += (z[t] - mean) * (z[t + k] - mean);
    return s;
}

void check_acf_args(std::span<const double> z, int max_lag) {
    if (z.empty()) throw std::invalid_argument("acf_sweep: empty input");
    if (max_lag < 1 || max_lag >= static_cast<int>(z.size()))
        throw std::invalid_argument("acf_sweep: max_lag must be in [1, n-1]");
}

void check_window_args(std::span<const double> x, std::span<const double> w) {
    if (w.empty()) throw std::invalid_argument("weighted_window: empty weights");
    if (x.size() < w.size())
        throw std::invalid_argument("weighted_window: series shorter than window");
}

}  // namespace

std::vector<double> acf_sweep_serial(std::span<const double> z, int max_lag,
                                     double* denom_out) {
    check_acf_args(z, max_lag);
    const double mean = centered_mean(z);
    const double denom = lag_product(z, mean, 0);
    if (denom_out) *denom_out = denom;
    std::vector<double> r(max_lag);
    for (int k = 1; k <= max_lag; ++k) r[k - 1] = lag_product(z, mean, k) / denom;
    return r;
}

std::vector<double> acf_sweep_parallel(std::span<const double> z, int max_lag,
                                       double* denom_out) {
    check_acf_args(z, max_lag);
    const double mean = centered_mean(z);
    const double denom = lag_product(z, mean, 0);
    if (denom_out) *denom_out = denom;
    std::vector<double> r(max_lag);
#pragma omp parallel for schedule(static)
    for (int k = 1; k <= max_lag; ++k) r[k - 1] = lag_product(z, mean, k) / denom;
    return r;
}

std::vector<double> acf_sweep(std::span<const double> z, int max_lag,
                              double* denom_out) {
    // Parallelism is per lag; the crossover below is where the fork
    // overhead stops dominating on small series.
    if (static_cast<long>(z.size()) * max_lag < 1 << 16)
        return acf_sweep_serial(z, max_lag, denom_out);
    return acf_sweep_parallel(z, max_lag, denom_out);
}

std::vector<double> weighted_window_serial(std::span<const double> x,
                                           std::span<const double> w) {
    check_window_args(x, w);
    const int m = static_cast<int>(w.size()) - 1;
    const int out_n = static_cast<int>(x.size()) - m;
    std::vector<double> y(out_n);
    for (int t = 0; t < out_n; ++t) {
        double acc = 0.0;
        for (int i = 0; i <= m; ++i) acc += w[i] * x[t + m - i];
        y[t] = acc;
    }
    return y;
}

std::vector<double> weighted_window_parallel(std::span<const double> x,
                                             std::span<const double> w) {
    check_window_args(x, w);
    const int m = static_cast<int>(w.size()) - 1;
    const int out_n = static_cast<int>(x.size()) - m;
    std::vector<double> y(out_n);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < out_n; ++t) {
        double acc = 0.0;
        for (int i = 0; i <= m; ++i) acc += w[i] * x[t + m - i];
        y[t] = acc;
    }
    return y;
}

std::vector<double> weighted_window(std::span<const double> x,
                                    std::span<const double> w) {
    if (x.size() * w.size() < 1 << 16) return weighted_window_serial(x, w);
    return weighted_window_parallel(x, w);
}

}  // namespace raincast::kernels
