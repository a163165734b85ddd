#include "raincast/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "raincast/kernels.hpp"
#include "raincast/math_util.hpp"

namespace raincast {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

const std::vector<int>& default_lags() {
    static const std::vector<int> ks{6, 12, 18, 24, 30, 36};
    return ks;
}

}  // namespace

double chi_square_sf(double x, int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square_sf: dof must be positive");
    if (x < 0.0) throw std::invalid_argument("chi_square_sf: x must be non-negative");
    return math::gamma_q(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(double alpha, int dof) {
    if (dof < 1)
        throw std::invalid_argument("chi_square_quantile: dof must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("chi_square_quantile: alpha must lie in (0,1)");

    // sf is strictly decreasing, so grow the upper bracket until it
    // straddles alpha, then bisect.
    double lo = 0.0, hi = std::max(1.0, 2.0 * dof);
    while (chi_square_sf(hi, dof) > alpha) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12)
            throw std::runtime_error("chi_square_quantile: bracket search diverged");
    }
    for (int iter = 0; iter < 200 && hi - lo > 1e-8 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (chi_square_sf(mid, dof) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

LjungBoxRow ljung_box(const std::vector<double>& acf, int n_prime, int K, int n_c) {
    if (K < 1) throw std::invalid_argument("ljung_box: K must be positive");
    if (K > static_cast<int>(acf.size()))
        throw std::invalid_argument("ljung_box: K = " + std::to_string(K) +
                                    " exceeds the " + std::to_string(acf.size()) +
                                    " autocorrelations provided");
    if (K <= n_c)
        throw std::invalid_argument("ljung_box: K = " + std::to_string(K) +
                                    " leaves no degrees of freedom with n_c = " +
                                    std::to_string(n_c));
    if (n_prime <= K)
        throw std::invalid_argument("ljung_box: n' = " + std::to_string(n_prime) +
                                    " must exceed K = " + std::to_string(K));

    LjungBoxRow row;
    row.K = K;
    row.dof = K - n_c;
    row.residual_acf.assign(acf.begin(), acf.begin() + K);
    double sum = 0.0;
    for (int l = 1; l <= K; ++l) sum += acf[l - 1] * acf[l - 1] / (n_prime - l);
    row.q_star = static_cast<double>(n_prime) * (n_prime + 2.0) * sum;
    row.p_value = chi_square_sf(row.q_star, row.dof);
    return row;
}

AdequacyReport adequacy_report(const std::vector<double>& acf, int n_prime, int n_c,
                               std::vector<int> Ks) {
    if (Ks.empty()) Ks = default_lags();
    std::sort(Ks.begin(), Ks.end());
    const int k_max = Ks.back();
    if (k_max > static_cast<int>(acf.size()))
        throw std::invalid_argument("adequacy_report: largest K = " +
                                    std::to_string(k_max) + " exceeds the " +
                                    std::to_string(acf.size()) +
                                    " autocorrelations provided");

    AdequacyReport report;
    report.acf.assign(acf.begin(), acf.begin() + k_max);
    report.band = 2.0 / std::sqrt(static_cast<double>(n_prime));
    report.n_prime = n_prime;
    report.n_coefficients = n_c;
    report.adequate = true;
    for (int K : Ks) {
        report.rows.push_back(ljung_box(acf, n_prime, K, n_c));
        if (!(report.rows.back().p_value > 0.05)) report.adequate = false;
    }
    report.verdict = report.adequate ? "adequate" : "inadequate";
    return report;
}

AdequacyReport adequacy_report(const FittedModel& model, std::vector<int> Ks) {
    if (Ks.empty()) Ks = default_lags();
    const int k_max = *std::max_element(Ks.begin(), Ks.end());
    const int n_prime = static_cast<int>(model.residuals.size());
    if (n_prime <= k_max)
        throw std::invalid_argument("adequacy_report: " + std::to_string(n_prime) +
                                    " residuals cannot support lag " +
                                    std::to_string(k_max));
    const auto acf =
        kernels::acf_sweep({model.residuals.values.data(), model.residuals.size()},
                           k_max, nullptr);
    return adequacy_report(acf, n_prime, model.order.coeff_count(), std::move(Ks));
}

std::string adequacy_json(const AdequacyReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows)
        rows.push_back({{"K", row.K},
                        {"q_star", row.q_star},
                        {"dof", row.dof},
                        {"p_value", row.p_value}});
    nlohmann::json doc{{"rows", rows},
                       {"verdict", report.verdict},
                       {"n_prime", report.n_prime},
                       {"n_coefficients", report.n_coefficients}};
    return doc.dump(2);
}

void residual_acf_csv(const AdequacyReport& report, std::ostream& out) {
    out << "lag,acf,band\n";
    const std::string band = format_double(report.band);
    for (std::size_t l = 0; l < report.acf.size(); ++l)
        out << (l + 1) << ',' << format_double(report.acf[l]) << ',' << band << '\n';
}

}  // namespace raincast
