#pragma once

#include <span>
#include <vector>

// Data-parallel inner loops shared by the correlogram and the moving
// average filter. Each has a serial reference implementation and an
// OpenMP variant; per-element arithmetic order is identical in both, so
// outputs are bit-identical and the serial path stays in the test suite
// as the oracle for the parallel one.

namespace raincast::kernels {

// Sample autocovariance-ratio sweep: r_k for k = 1..max_lag with the
// full-sample mean and lag-0 denominator. `denom_out`, when non-null,
// receives the centered sum of squares.
std::vector<double> acf_sweep_serial(std::span<const double> z, int max_lag,
                                     double* denom_out = nullptr);
std::vector<double> acf_sweep_parallel(std::span<const double> z, int max_lag,
                                       double* denom_out = nullptr);
std::vector<double> acf_sweep(std::span<const double> z, int max_lag,
                              double* denom_out = nullptr);

// y[t] = sum_i w[i] * x[t - i], defined for t >= w.size() - 1; output
// length is x.size() - (w.size() - 1).
std::vector<double> weighted_window_serial(std::span<const double> x,
                                           std::span<const double> w);
std::vector<double> weighted_window_parallel(std::span<const double> x,
                                             std::span<const double> w);
std::vector<double> weighted_window(std::span<const double> x,
                                    std::span<const double> w);

}  // namespace raincast::kernels
