// Times the serial reference kernels against their OpenMP variants on
// synthetic data and checks that both produce bit-identical output.

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "raincast/kernels.hpp"
#include "raincast/math_util.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_best_ms(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto start = Clock::now();
        f();
        const auto stop = Clock::now();
        best = std::min(
            best, std::chrono::duration<double, std::milli>(stop - start).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP kernel benchmark"};
    int n = 200000;
    int lags = 512;
    int window = 256;
    int reps = 5;
    std::uint64_t seed = 1;
    app.add_option("--n", n, "series length")->capture_default_str();
    app.add_option("--lags", lags, "autocorrelation lags")->capture_default_str();
    app.add_option("--window", window, "moving-average window")->capture_default_str();
    app.add_option("--reps", reps, "repetitions (best time reported)")
        ->capture_default_str();
    app.add_option("--seed", seed, "data seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    raincast::math::NormalSampler sampler(seed);
    std::vector<double> data(n);
    for (double& v : data) v = sampler.next();
    std::vector<double> weights(window + 1);
    double sum = 0.0;
    for (int i = 0; i <= window; ++i) {
        weights[i] = 1.0 / (1 + i);
        sum += weights[i];
    }
    for (double& w : weights) w /= sum;

    std::vector<double> serial_out, parallel_out;
    const double acf_serial = time_best_ms(reps, [&] {
        serial_out = raincast::kernels::acf_sweep_serial(data, lags);
    });
    const double acf_parallel = time_best_ms(reps, [&] {
        parallel_out = raincast::kernels::acf_sweep_parallel(data, lags);
    });
    const bool acf_same = serial_out == parallel_out;

    std::vector<double> win_serial, win_parallel;
    const double window_serial = time_best_ms(reps, [&] {
        win_serial = raincast::kernels::weighted_window_serial(data, weights);
    });
    const double window_parallel = time_best_ms(reps, [&] {
        win_parallel = raincast::kernels::weighted_window_parallel(data, weights);
    });
    const bool window_same = win_serial == win_parallel;

    std::cout << std::fixed << std::setprecision(3);
    std::cout << "kernel            serial_ms  parallel_ms  speedup  identical\n";
    std::cout << "acf_sweep         " << std::setw(9) << acf_serial << "  "
              << std::setw(11) << acf_parallel << "  " << std::setw(7)
              << acf_serial / acf_parallel << "  " << (acf_same ? "yes" : "NO")
              << '\n';
    std::cout << "weighted_window   " << std::setw(9) << window_serial << "  "
              << std::setw(11) << window_parallel << "  " << std::setw(7)
              << window_serial / window_parallel << "  "
              << (window_same ? "yes" : "NO") << '\n';

    if (!acf_same || !window_same) {
        std::cerr << "error: serial and parallel outputs differ\n";
        return 1;
    }
    return 0;
}
