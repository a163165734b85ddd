#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "raincast/sarima.hpp"

namespace raincast {

// One portmanteau test on the residual autocorrelations:
//   Q* = n'(n'+2) * sum_{l=1..K} r_l^2 / (n'-l)
// referred to chi-square with K - n_c degrees of freedom, where n' is
// the residual count and n_c the number of fitted coefficients.
struct LjungBoxRow {
    int K = 0;
    double q_star = 0.0;
    int dof = 0;
    double p_value = 0.0;
    std::vector<double> residual_acf;  // the r_1..r_K that entered Q*
};

// Whole-model residual check: the residual autocorrelations plus a
// ladder of portmanteau tests. The verdict is "adequate" when every
// row has p > 0.05, "inadequate" otherwise.
struct AdequacyReport {
    std::vector<double> acf;  // r_1..r_{max K}
    double band = 0.0;        // 2/sqrt(n'), for the plot CSV
    int n_prime = 0;
    int n_coefficients = 0;
    std::vector<LjungBoxRow> rows;
    bool adequate = false;
    std::string verdict;  // "adequate" or "inadequate"
};

// Upper tail P(X > x) of the chi-square distribution with `dof`
// degrees of freedom.
double chi_square_sf(double x, int dof);

// Inverse of the upper tail: the x with P(X > x) = alpha, found by
// bracketing bisection.
double chi_square_quantile(double alpha, int dof);

// Single test row from precomputed autocorrelations r_1..r_K (acf[0]
// is r_1). Requires K <= acf.size(), K > n_c and n_prime > K.
LjungBoxRow ljung_box(const std::vector<double>& acf, int n_prime, int K, int n_c);

// Test ladder over several K. Ks defaults to {6, 12, 18, 24, 30, 36}.
// The residual count must exceed the largest K.
AdequacyReport adequacy_report(const FittedModel& model, std::vector<int> Ks = {});

// Same ladder on an autocorrelation sequence computed elsewhere;
// acf must cover the largest K.
AdequacyReport adequacy_report(const std::vector<double>& acf, int n_prime, int n_c,
                               std::vector<int> Ks = {});

std::string adequacy_json(const AdequacyReport& report);

// Residual correlogram CSV: `lag,acf,band` (no PACF: the portmanteau
// ladder reads the ACF only).
void residual_acf_csv(const AdequacyReport& report, std::ostream& out);

}  // namespace raincast
