#pragma once

#include <string>
#include <utility>
#include <vector>

#include "raincast/sarima.hpp"
#include "raincast/series.hpp"

namespace raincast {

// One-step-ahead errors for the fitted model and for the naive rule,
// on the same (transformed) scale and over identical target indices.
// first_target is the index of the first scored value on the
// transformed series' axis.
struct AlignedErrors {
    std::vector<double> model;
    std::vector<double> naive;
    int first_target = 0;
};

// Accuracy summary for one dataset: both competitors' squared-error
// statistics plus their RMSE ratio.
struct EvaluationReport {
    std::string label;
    double mse_model = 0.0;
    double rmse_model = 0.0;
    double mse_naive = 0.0;
    double rmse_naive = 0.0;
    double theil_u = 0.0;
    int n = 0;  // error count per competitor
    std::string interpretation;  // "better than naive" iff theil_u < 1
};

// Naive rule: the prediction for index t+1 is the value at t. Output
// has length n-1 and origin_offset shifted by one so predictions line
// up with their targets.
Series naive_forecast(const Series& s);

// (mse, rmse) of an error sequence; errors on empty input.
std::pair<double, double> rmse(const std::vector<double>& errors);

// RMSE ratio model/naive; errors when rmse_naive is zero (the naive
// rule is perfect and the ratio is undefined).
double theil_u(double rmse_model, double rmse_naive);

// Model errors are the fitted residuals; naive errors are the first
// differences of `transformed` over the residuals' target range.
// `transformed` is the pre-differencing series the model was built
// from (log scale when a log step was applied).
AlignedErrors in_sample_errors(const FittedModel& model, const Series& transformed);

EvaluationReport evaluate(const std::string& label, const std::vector<double>& model_errors,
                          const std::vector<double>& naive_errors);

std::string evaluation_json(const EvaluationReport& report);

}  // namespace raincast
