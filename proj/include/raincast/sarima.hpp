#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "raincast/series.hpp"

namespace raincast {

// Multiplicative seasonal specification (p,d,q)(P,D,Q)_s.
struct ModelOrder {
    int p = 0, d = 0, q = 0;
    int P = 0, D = 0, Q = 0;
    int s = 12;

    void validate(bool include_mean) const;
    int coeff_count() const { return p + q + P + Q; }
    int param_count(bool include_mean) const {
        return coeff_count() + (include_mean ? 1 : 0);
    }
    int max_ar_lag() const { return p + s * P; }
    int max_ma_lag() const { return q + s * Q; }
};

// Coefficient vector layout used throughout:
//   [ar1..arp, ma1..maq, sar1..sarP, sma1..smaQ, mean?]
std::vector<std::string> coefficient_names(const ModelOrder& order, bool include_mean);

struct FittedModel {
    ModelOrder order;
    bool include_mean = false;
    std::vector<std::string> names;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_values;
    Series residuals;  // origin_offset = z offset of the first residual
    double sigma2 = 0.0;
    int n_effective = 0;
    double loss = 0.0;  // conditional sum of squares at the optimum
    int iterations = 0;
    bool converged = false;
};

struct ForecastResult {
    int horizon = 0;
    std::vector<double> point;  // transformed scale
    std::vector<double> lower;
    std::vector<double> upper;
    double level = 0.95;
    std::vector<double> psi;
    // After replaying inverse log transforms; empty when the history
    // carries none.
    std::vector<double> original_scale_point;
    std::vector<double> original_scale_lower;
    std::vector<double> original_scale_upper;
};

class FitError : public std::runtime_error {
public:
    FitError(std::string msg, std::vector<double> best_params, double best_loss,
             int iterations)
        : std::runtime_error(std::move(msg)),
          best_params(std::move(best_params)),
          best_loss(best_loss),
          iterations(iterations) {}
    std::vector<double> best_params;
    double best_loss;
    int iterations;
};

// Conditional residual recursion: shocks before the first computable
// index are pinned to zero. `z` must be fully observed and already
// differenced; params follow the layout above.
Series css_residuals(const std::vector<double>& params, const Series& z,
                     const ModelOrder& order, bool include_mean);

// Jacobian of the residual vector (row-major n_effective x k), by the
// exact recursive derivative of the conditional recursion.
std::vector<double> css_jacobian(const std::vector<double>& params, const Series& z,
                                 const ModelOrder& order, bool include_mean);

// Conditional least squares by damped Gauss-Newton, initialized from a
// two-stage long-autoregression regression. Convergence: gradient
// max-norm < 1e-8 or relative loss change < 1e-12, cap 200 iterations.
FittedModel fit(const Series& z, const ModelOrder& order, bool include_mean);

// psi_0..psi_{horizon-1} of the moving-average representation,
// including the differencing factors.
std::vector<double> psi_weights(const ModelOrder& order,
                                const std::vector<double>& params,
                                bool include_mean, int horizon);
std::vector<double> psi_weights(const FittedModel& model, int horizon);

// Point forecasts from the difference-equation recursion (future
// shocks zero, in-sample shocks from the residuals) with symmetric
// normal bands from the psi-weight variance profile. `history` is the
// pre-difference transformed-scale series the model was built from.
ForecastResult forecast(const FittedModel& model, const Series& history, int horizon,
                        double level = 0.95);

// Synthetic generator for tests and experiments: seeded Gaussian
// shocks, ARMA recursion after a discarded burn-in of 10*(s+p+q)
// points, then d and D integrations.
Series simulate_sarima(const ModelOrder& order, const std::vector<double>& params,
                       bool include_mean, double sigma, int n, std::uint64_t seed);

// True when every factor polynomial has all roots outside the unit
// circle by at least `margin`.
bool is_feasible(const ModelOrder& order, const std::vector<double>& params,
                 bool include_mean, double margin = 1e-6);

std::string model_json(const FittedModel& model);
void forecast_csv(const ForecastResult& fc, std::ostream& out);

}  // namespace raincast
