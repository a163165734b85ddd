#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <vector>

#include "raincast/evaluate.hpp"
#include "raincast/sarima.hpp"
#include "raincast/series.hpp"

using namespace raincast;

TEST_CASE("naive forecast shifts the series by one step") {
    Series s({5.0, 7.0, 9.0});
    Series f = naive_forecast(s);
    REQUIRE(f.size() == 2);
    CHECK(f.values == std::vector<double>{5.0, 7.0});
    CHECK(f.origin_offset == s.origin_offset + 1);

    Series off = s;
    off.origin_offset = 10;
    CHECK(naive_forecast(off).origin_offset == 11);

    Series holey = s;
    holey.set_missing(1);
    CHECK_THROWS_AS(naive_forecast(holey), std::invalid_argument);
    CHECK_THROWS_AS(naive_forecast(Series({1.0})), std::invalid_argument);
}

TEST_CASE("squared-error summary hand values") {
    auto [mse, root] = rmse({3.0, -4.0});
    CHECK(mse == doctest::Approx(12.5).epsilon(1e-15));
    CHECK(root == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));

    auto [mse0, root0] = rmse({0.0, 0.0, 0.0});
    CHECK(mse0 == 0.0);
    CHECK(root0 == 0.0);

    CHECK_THROWS_AS(rmse({}), std::invalid_argument);
}

TEST_CASE("accuracy ratio reference values") {
    CHECK(std::sqrt(0.441654) == doctest::Approx(0.66457).epsilon(1e-4));
    CHECK(std::sqrt(0.849915) == doctest::Approx(0.921908).epsilon(1e-5));
    CHECK(theil_u(std::sqrt(0.441654), std::sqrt(0.849915)) ==
          doctest::Approx(0.720864).epsilon(1e-4));
    CHECK(theil_u(0.65539, 0.902304) == doctest::Approx(0.726352).epsilon(1e-4));
    CHECK_THROWS_AS(theil_u(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("accuracy ratio scaling properties") {
    // Scaling both error sets leaves the ratio unchanged; scaling only
    // the model errors scales the ratio linearly.
    CHECK(theil_u(0.4, 0.8) == doctest::Approx(theil_u(4.0, 8.0)).epsilon(1e-12));
    CHECK(theil_u(0.8, 0.8) == doctest::Approx(2.0 * theil_u(0.4, 0.8)).epsilon(1e-12));
    CHECK(theil_u(0.0, 0.5) == 0.0);
}

TEST_CASE("evaluation bundles both competitors over the same targets") {
    EvaluationReport rep = evaluate("demo", {1.0, -1.0}, {2.0, 2.0});
    CHECK(rep.label == "demo");
    CHECK(rep.n == 2);
    CHECK(rep.mse_model == doctest::Approx(1.0));
    CHECK(rep.mse_naive == doctest::Approx(4.0));
    CHECK(rep.theil_u == doctest::Approx(0.5));
    CHECK(rep.interpretation == "better than naive");

    EvaluationReport worse = evaluate("w", {3.0, 3.0}, {1.0, 1.0});
    CHECK(worse.interpretation == "not better than naive");

    CHECK_THROWS_AS(evaluate("bad", {1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("in-sample errors for the mean-only model") {
    // Residuals of the mean-only fit exist from the first index, but
    // the naive rule needs a predecessor, so scoring starts at 1.
    // Alternating 0/1 keeps everything hand-computable: mu = 0.5, every
    // model error is +-0.5, every naive error is +-1.
    std::vector<double> v(12);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % 2);
    Series z(v);
    FittedModel m = fit(z, ModelOrder{0, 0, 0, 0, 0, 0, 12}, true);
    CHECK(m.coefficients[0] == doctest::Approx(0.5).epsilon(1e-12));

    AlignedErrors errs = in_sample_errors(m, z);
    CHECK(errs.first_target == 1);
    REQUIRE(errs.model.size() == 11);
    REQUIRE(errs.naive.size() == 11);
    for (std::size_t i = 0; i < errs.model.size(); ++i) {
        CHECK(std::abs(errs.model[i]) == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(std::abs(errs.naive[i]) == doctest::Approx(1.0).epsilon(1e-12));
    }

    EvaluationReport rep = evaluate("null", errs.model, errs.naive);
    CHECK(rep.theil_u == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("in-sample errors align residuals with first differences") {
    ModelOrder order{1, 0, 0, 0, 0, 0, 12};
    Series y = simulate_sarima(order, {0.5}, false, 1.0, 200, 42);
    FittedModel m = fit(y, order, false);
    AlignedErrors errs = in_sample_errors(m, y);
    // AR(1) residuals already start at index 1 = the first naive target.
    CHECK(errs.first_target == 1);
    REQUIRE(errs.model.size() == errs.naive.size());
    CHECK(errs.model.size() == m.residuals.size());
    for (std::size_t i = 0; i < errs.model.size(); ++i) {
        CHECK(errs.model[i] == doctest::Approx(m.residuals.values[i]));
        const std::size_t t = static_cast<std::size_t>(errs.first_target) + i;
        CHECK(errs.naive[i] == doctest::Approx(y.values[t] - y.values[t - 1]));
    }
    // A one-step-optimal model on its own training data beats naive.
    EvaluationReport rep = evaluate("ar1", errs.model, errs.naive);
    CHECK(rep.theil_u < 1.0);
}

TEST_CASE("in-sample errors refuse a series that misses the residual span") {
    ModelOrder order{1, 0, 0, 0, 0, 0, 12};
    Series y = simulate_sarima(order, {0.5}, false, 1.0, 100, 1);
    FittedModel m = fit(y, order, false);
    Series shorter(std::vector<double>(y.values.begin(), y.values.begin() + 50));
    CHECK_THROWS_AS(in_sample_errors(m, shorter), std::invalid_argument);
}

TEST_CASE("evaluation JSON carries both rows and the ratio") {
    EvaluationReport rep = evaluate("demo", {1.0, -1.0}, {2.0, 2.0});
    nlohmann::json doc = nlohmann::json::parse(evaluation_json(rep));
    CHECK(doc["label"] == "demo");
    CHECK(doc["theil_u"].get<double>() == doctest::Approx(0.5));
    CHECK(doc["n"].get<int>() == 2);
    CHECK(doc["interpretation"] == "better than naive");
    REQUIRE(doc["rows"].size() == 2);
    CHECK(doc["rows"][0]["model"] == "arima");
    CHECK(doc["rows"][0]["mse"].get<double>() == doctest::Approx(1.0));
    CHECK(doc["rows"][1]["model"] == "naive");
    CHECK(doc["rows"][1]["rmse"].get<double>() == doctest::Approx(2.0));
}
