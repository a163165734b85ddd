#include "raincast/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace raincast {

Series naive_forecast(const Series& s) {
    if (!s.fully_observed())
        throw std::invalid_argument("naive_forecast: series must be fully observed");
    if (s.size() < 2)
        throw std::invalid_argument("naive_forecast: need at least two values");
    Series out;
    out.values.assign(s.values.begin(), s.values.end() - 1);
    out.mask.assign(out.values.size(), true);
    out.origin_offset = s.origin_offset + 1;  // prediction for t+1 is value at t
    out.meta = s.meta;
    out.label = "naive";
    return out;
}

std::pair<double, double> rmse(const std::vector<double>& errors) {
    if (errors.empty()) throw std::invalid_argument("rmse: empty error sequence");
    double sum = 0.0;
    for (double e : errors) sum += e * e;
    const double mse = sum / static_cast<double>(errors.size());
    return {mse, std::sqrt(mse)};
}

double theil_u(double rmse_model, double rmse_naive) {
    if (!(rmse_naive > 0.0))
        throw std::invalid_argument(
            "theil_u: naive RMSE is zero, the ratio is undefined");
    return rmse_model / rmse_naive;
}

AlignedErrors in_sample_errors(const FittedModel& model, const Series& transformed) {
    if (!transformed.fully_observed())
        throw std::invalid_argument("in_sample_errors: series must be fully observed");
    const int res_start = model.residuals.origin_offset - transformed.origin_offset;
    const int res_count = static_cast<int>(model.residuals.size());
    // The naive rule needs a predecessor, so scoring starts at index 1
    // even when the model has a residual for index 0.
    const int first_target = std::max(res_start, 1);
    const int last_target = res_start + res_count;  // exclusive
    if (res_start < 0 || last_target > static_cast<int>(transformed.size()) ||
        first_target >= last_target)
        throw std::invalid_argument(
            "in_sample_errors: residual range does not lie inside the series");

    AlignedErrors out;
    out.first_target = first_target;
    for (int t = first_target; t < last_target; ++t) {
        out.model.push_back(model.residuals.values[t - res_start]);
        out.naive.push_back(transformed.values[t] - transformed.values[t - 1]);
    }
    return out;
}

EvaluationReport evaluate(const std::string& label,
                          const std::vector<double>& model_errors,
                          const std::vector<double>& naive_errors) {
    if (model_errors.size() != naive_errors.size())
        throw std::invalid_argument("evaluate: competitors scored on " +
                                    std::to_string(model_errors.size()) + " vs " +
                                    std::to_string(naive_errors.size()) +
                                    " targets; ranges must match");
    EvaluationReport report;
    report.label = label;
    report.n = static_cast<int>(model_errors.size());
    std::tie(report.mse_model, report.rmse_model) = rmse(model_errors);
    std::tie(report.mse_naive, report.rmse_naive) = rmse(naive_errors);
    report.theil_u = theil_u(report.rmse_model, report.rmse_naive);
    report.interpretation =
        report.theil_u < 1.0 ? "better than naive" : "not better than naive";
    return report;
}

std::string evaluation_json(const EvaluationReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    rows.push_back(
        {{"model", "arima"}, {"mse", report.mse_model}, {"rmse", report.rmse_model}});
    rows.push_back(
        {{"model", "naive"}, {"mse", report.mse_naive}, {"rmse", report.rmse_naive}});
    nlohmann::json doc{{"label", report.label},
                       {"rows", rows},
                       {"theil_u", report.theil_u},
                       {"n", report.n},
                       {"interpretation", report.interpretation}};
    return doc.dump(2);
}

}  // namespace raincast
