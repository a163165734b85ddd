#include "raincast/math_util.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace raincast::math {

namespace {

// Lower regularized gamma P(a, x) by power series.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a, x) by modified Lentz continued fraction.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("gamma_q: a must be positive");
    if (x < 0.0) throw std::invalid_argument("gamma_q: x must be non-negative");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must lie in (0,1)");

    // Acklam's rational approximation.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Newton step against the exact cdf tightens the tail error
    // well below 1e-9.
    const double cdf = 0.5 * std::erfc(-x / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    x -= (cdf - p) / pdf;
    return x;
}

std::vector<double> poly_mul(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

std::vector<double> poly_root_moduli(std::span<const double> coeffs) {
    // Strip trailing zero coefficients.
    std::size_t deg = coeffs.size();
    while (deg > 1 && coeffs[deg - 1] == 0.0) --deg;
    if (deg <= 1) return {};

    const std::size_t n = deg - 1;
    std::vector<std::complex<double>> c(coeffs.begin(), coeffs.begin() + deg);
    for (auto& v : c) v /= coeffs[deg - 1];

    auto eval = [&](std::complex<double> x) {
        std::complex<double> acc = c[n];
        for (std::size_t k = n; k-- > 0;) acc = acc * x + c[k];
        return acc;
    };

    std::vector<std::complex<double>> roots(n);
    for (std::size_t k = 0; k < n; ++k)
        roots[k] = std::pow(std::complex<double>(0.4, 0.9), static_cast<double>(k + 1));

    for (int iter = 0; iter < 500; ++iter) {
        double shift = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            std::complex<double> denom(1.0, 0.0);
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) denom *= roots[k] - roots[j];
            const std::complex<double> delta = eval(roots[k]) / denom;
            roots[k] -= delta;
            shift = std::max(shift, std::abs(delta));
        }
        if (shift < 1e-13) break;
    }

    std::vector<double> moduli(n);
    for (std::size_t k = 0; k < n; ++k) moduli[k] = std::abs(roots[k]);
    return moduli;
}

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, int n) {
    if (static_cast<int>(a.size()) != n * n || static_cast<int>(b.size()) != n)
        throw std::invalid_argument("solve_dense: dimension mismatch");
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
        if (std::abs(a[pivot * n + col]) < 1e-300)
            throw std::runtime_error("solve_dense: singular matrix");
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
            std::swap(b[col], b[pivot]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int j = r + 1; j < n; ++j) s -= a[r * n + j] * x[j];
        x[r] = s / a[r * n + r];
    }
    return x;
}

std::vector<double> invert_dense(std::vector<double> a, int n) {
    std::vector<double> inv(n * n, 0.0);
    for (int col = 0; col < n; ++col) {
        std::vector<double> e(n, 0.0);
        e[col] = 1.0;
        const std::vector<double> x = solve_dense(a, std::move(e), n);
        for (int r = 0; r < n; ++r) inv[r * n + col] = x[r];
    }
    return inv;
}

double NormalSampler::uniform01() {
    // 53-bit mantissa draw in (0, 1]; never returns 0 so log() is safe.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

double NormalSampler::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

}  // namespace raincast::math
