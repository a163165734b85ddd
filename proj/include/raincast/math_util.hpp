#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace raincast::math {

// Regularized upper incomplete gamma Q(a, x). Series expansion for
// x < a + 1, continued fraction otherwise. Absolute accuracy ~1e-14.
double gamma_q(double a, double x);

// Standard normal quantile. Rational approximation refined with one
// Newton step; |error| < 1e-9 on (0, 1).
double normal_quantile(double p);

// Coefficient-wise product of two polynomials (index = power).
std::vector<double> poly_mul(std::span<const double> a, std::span<const double> b);

// Moduli of the roots of c[0] + c[1] x + ... + c[n] x^n, found by
// Durand-Kerner iteration. Intended for the low-degree lag polynomials
// used here (degree <= ~6).
std::vector<double> poly_root_moduli(std::span<const double> coeffs);

// Solve A x = b for a small dense matrix by Gaussian elimination with
// partial pivoting. A is row-major n x n.
// Throws std::runtime_error on (near-)singular systems.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, int n);

// Inverse of a small dense matrix, same pivoting as solve_dense.
std::vector<double> invert_dense(std::vector<double> a, int n);

// Deterministic standard-normal stream: mt19937_64 (whose sequence is
// pinned by the standard) fed through our own Box-Muller, so output is
// identical for a given seed on every platform.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
    double uniform01();
};

}  // namespace raincast::math
