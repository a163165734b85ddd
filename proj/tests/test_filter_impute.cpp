#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <vector>

#include "raincast/filter_impute.hpp"
#include "raincast/math_util.hpp"

using namespace raincast;

TEST_CASE("filter spec validation and weight normalization") {
    FilterSpec spec{0.5, 2};
    CHECK_NOTHROW(spec.validate());
    CHECK_THROWS_AS((FilterSpec{0.0, 2}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((FilterSpec{1.0, 2}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((FilterSpec{-0.3, 2}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((FilterSpec{0.5, -1}.validate()), std::invalid_argument);

    // phi=0.5, 2 slots: raw (0.5, 0.25) -> (2/3, 1/3).
    std::vector<double> w = spec.normalized_weights(2);
    REQUIRE(w.size() == 2);
    CHECK(w[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    // Any slot count sums to one.
    for (int slots : {1, 3, 13}) {
        std::vector<double> ws = FilterSpec{0.37, 12}.normalized_weights(slots);
        double sum = 0.0;
        for (double v : ws) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("filter series hand example") {
    // x=[2,4], phi=0.5, M=1: single output (2/3)*4 + (1/3)*2 = 10/3.
    Series s({2.0, 4.0});
    Series y = filter_series(s, FilterSpec{0.5, 1});
    REQUIRE(y.size() == 1);
    CHECK(y.values[0] == doctest::Approx(10.0 / 3.0).epsilon(1e-12));
    CHECK(y.origin_offset == 1);
}

TEST_CASE("unnormalized filter keeps the raw phi powers") {
    // Same input, raw weights (0.5, 0.25): 0.5*4 + 0.25*2 = 2.5.
    Series s({2.0, 4.0});
    Series y = filter_series(s, FilterSpec{0.5, 1}, false);
    REQUIRE(y.size() == 1);
    CHECK(y.values[0] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("window zero is the identity") {
    Series s({1.0, -2.0, 3.5, 0.25});
    Series y = filter_series(s, FilterSpec{0.7, 0});
    REQUIRE(y.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(y.values[i] == doctest::Approx(s.values[i]).epsilon(1e-15));
}

TEST_CASE("constant series is a fixed point of the normalized filter") {
    Series s(std::vector<double>(40, 6.25));
    Series y = filter_series(s, FilterSpec{0.42, 12});
    REQUIRE(y.size() == 28);
    for (double v : y.values) CHECK(std::abs(v - 6.25) < 1e-12);
}

TEST_CASE("normalized filter is affine-equivariant") {
    math::NormalSampler gen(5);
    std::vector<double> base(30);
    for (double& v : base) v = gen.next();
    Series s(base);
    FilterSpec spec{0.6, 4};
    Series y = filter_series(s, spec);

    Series t = s;
    for (double& v : t.values) v = 2.5 * v - 7.0;
    Series yt = filter_series(t, spec);
    REQUIRE(yt.size() == y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        CHECK(yt.values[i] == doctest::Approx(2.5 * y.values[i] - 7.0).epsilon(1e-10));
}

TEST_CASE("filter refuses holes") {
    Series s({1.0, 2.0, 3.0});
    s.set_missing(1);
    CHECK_THROWS_AS(filter_series(s, FilterSpec{0.5, 1}), std::invalid_argument);
}

TEST_CASE("impute hand example: hole slot takes the observed mean") {
    // [1, 2, hole, 4], phi=0.5, M=1: mean of observed = 7/3, weights
    // (2/3, 1/3) -> (2/3)*(7/3) + (1/3)*2 = 20/9.
    Series s({1.0, 2.0, 0.0, 4.0});
    s.set_missing(2);
    ImputationResult r = impute(s, FilterSpec{0.5, 1});
    CHECK(r.fill_mean == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
    REQUIRE(r.holes.size() == 1);
    CHECK(r.holes[0].index == 2);
    CHECK(std::abs(r.holes[0].value - 20.0 / 9.0) < 1e-10);
    CHECK(r.series.fully_observed());
    CHECK(r.series.values[2] == doctest::Approx(20.0 / 9.0));
    CHECK(r.filled.at(2) == doctest::Approx(20.0 / 9.0));
    // Observed cells never move.
    CHECK(r.series.values[0] == 1.0);
    CHECK(r.series.values[1] == 2.0);
    CHECK(r.series.values[3] == 4.0);
}

TEST_CASE("impute truncates and renormalizes at the series start") {
    // Hole at index 0: a single slot gets the whole weight -> mean.
    Series s({0.0, 3.0, 9.0});
    s.set_missing(0);
    ImputationResult r = impute(s, FilterSpec{0.5, 12});
    CHECK(r.series.values[0] == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(r.holes[0].window_used == 1);
}

TEST_CASE("imputing a constant series reproduces the constant") {
    Series s(std::vector<double>(24, 3.5));
    s.set_missing(4);
    s.set_missing(11);
    s.set_missing(12);
    ImputationResult r = impute(s, FilterSpec{0.8, 12});
    for (double v : r.series.values) CHECK(std::abs(v - 3.5) < 1e-12);
}

TEST_CASE("earlier fills feed later windows") {
    // Adjacent holes: the second draws on the first's imputed value.
    Series s({2.0, 2.0, 0.0, 0.0, 2.0});
    s.set_missing(2);
    s.set_missing(3);
    ImputationResult r = impute(s, FilterSpec{0.5, 1});
    const double first = (2.0 / 3.0) * 2.0 + (1.0 / 3.0) * 2.0;  // mean is 2
    CHECK(r.series.values[2] == doctest::Approx(first).epsilon(1e-12));
    const double second = (2.0 / 3.0) * 2.0 + (1.0 / 3.0) * first;
    CHECK(r.series.values[3] == doctest::Approx(second).epsilon(1e-12));
}

TEST_CASE("phi estimation on a simulated AR(1)") {
    math::NormalSampler gen(77);
    std::vector<double> x(2050, 0.0);
    for (std::size_t t = 1; t < x.size(); ++t)
        x[t] = 0.6 * x[t - 1] + gen.next();
    Series s(std::vector<double>(x.begin() + 50, x.end()));
    CHECK(estimate_phi(s) == doctest::Approx(0.6).epsilon(0.12));
}

TEST_CASE("phi estimation skips pairs that touch a hole") {
    Series s({1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0, 5.0});
    CHECK(estimate_phi(s) == doctest::Approx(0.5).epsilon(1e-12));
    Series holey = s;
    holey.set_missing(1);
    // Still defined; only the observed adjacent pairs contribute.
    const double partial = estimate_phi(holey);
    CHECK(partial == doctest::Approx(0.21994).epsilon(1e-3));
    CHECK(partial != doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("phi estimation refuses non-positive correlation") {
    std::vector<double> alt(50);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
    Series s(alt);
    CHECK_THROWS_AS(estimate_phi(s), NonPositivePhi);
    try {
        estimate_phi(s);
    } catch (const NonPositivePhi& e) {
        CHECK(e.r1 < 0.0);
    }
    Series flat(std::vector<double>(10, 2.0));
    CHECK_THROWS_AS(estimate_phi(flat), std::domain_error);
}

TEST_CASE("baseline strategies on the hand series") {
    Series s({1.0, 2.0, 0.0, 4.0});
    s.set_missing(2);

    CHECK(baseline_impute(s, BaselineStrategy::Mean).series.values[2] ==
          doctest::Approx(7.0 / 3.0));
    CHECK(baseline_impute(s, BaselineStrategy::Naive).series.values[2] ==
          doctest::Approx(2.0));
    // Trend: least squares through (0,1), (1,2) -> slope 1 -> 3 at t=2.
    CHECK(baseline_impute(s, BaselineStrategy::Trend).series.values[2] ==
          doctest::Approx(3.0).epsilon(1e-12));
    // Bounding average: (2 + 4) / 2.
    CHECK(baseline_impute(s, BaselineStrategy::BoundingAverage).series.values[2] ==
          doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("baseline edge failures carry the strategy and the index") {
    Series lead({0.0, 1.0, 2.0});
    lead.set_missing(0);
    CHECK_THROWS_WITH_AS(baseline_impute(lead, BaselineStrategy::Naive),
                         doctest::Contains("index 0"), std::runtime_error);
    Series tail({1.0, 2.0, 0.0});
    tail.set_missing(2);
    CHECK_THROWS_AS(baseline_impute(tail, BaselineStrategy::BoundingAverage),
                    std::runtime_error);
    CHECK_THROWS_AS(baseline_impute(lead, BaselineStrategy::Trend),
                    std::runtime_error);
}

TEST_CASE("strategy names round trip") {
    for (auto strategy :
         {BaselineStrategy::Mean, BaselineStrategy::Naive, BaselineStrategy::Trend,
          BaselineStrategy::BoundingAverage})
        CHECK(baseline_strategy_from_name(to_string(strategy)) == strategy);
    CHECK_THROWS_AS(baseline_strategy_from_name("nope"), std::invalid_argument);
}

TEST_CASE("imputation report JSON carries the filled cells") {
    Series s({1.0, 2.0, 0.0, 4.0});
    s.set_missing(2);
    ImputationResult r = impute(s, FilterSpec{0.5, 1});
    nlohmann::json doc = nlohmann::json::parse(imputation_report_json(r));
    CHECK(doc["strategy"] == "filter");
    CHECK(doc["fill_mean"].get<double>() == doctest::Approx(7.0 / 3.0));
    REQUIRE(doc["holes"].size() == 1);
    CHECK(doc["holes"][0]["index"].get<int>() == 2);
    CHECK(doc["holes"][0]["value"].get<double>() == doctest::Approx(20.0 / 9.0));
}
