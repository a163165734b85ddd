#include "raincast/sarima.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <span>

#include <json.hpp>

#include "raincast/math_util.hpp"

namespace raincast {

namespace {

// Slices of the packed parameter vector.
struct ParamView {
    std::span<const double> ar, ma, sar, sma;
    double mean = 0.0;

    ParamView(const std::vector<double>& params, const ModelOrder& o, bool with_mean) {
        const std::size_t expect = o.coeff_count() + (with_mean ? 1 : 0);
        if (params.size() != expect)
            throw std::invalid_argument("parameter vector length mismatch: expected " +
                                        std::to_string(expect) + ", got " +
                                        std::to_string(params.size()));
        const double* base = params.data();
        ar = {base, static_cast<std::size_t>(o.p)};
        ma = {base + o.p, static_cast<std::size_t>(o.q)};
        sar = {base + o.p + o.q, static_cast<std::size_t>(o.P)};
        sma = {base + o.p + o.q + o.P, static_cast<std::size_t>(o.Q)};
        if (with_mean) mean = params.back();
    }
};

// 1 - c1 x - c2 x^2 - ... as a dense coefficient vector; seasonal
// factors place c_m at stride s.
std::vector<double> lag_poly(std::span<const double> coeffs, int stride = 1) {
    std::vector<double> poly(coeffs.size() * stride + 1, 0.0);
    poly[0] = 1.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m)
        poly[(m + 1) * stride] = -coeffs[m];
    return poly;
}

std::vector<double> difference_poly(int d, int D, int s) {
    std::vector<double> poly{1.0};
    const std::vector<double> ordinary{1.0, -1.0};
    for (int i = 0; i < d; ++i) poly = math::poly_mul(poly, ordinary);
    if (D > 0) {
        std::vector<double> seasonal(s + 1, 0.0);
        seasonal[0] = 1.0;
        seasonal[s] = -1.0;
        for (int i = 0; i < D; ++i) poly = math::poly_mul(poly, seasonal);
    }
    return poly;
}

struct Polys {
    std::vector<double> ar_ns, ar_s;  // factor polynomials
    std::vector<double> ma_ns, ma_s;
    std::vector<double> ar_full, ma_full;
};

Polys build_polys(const ParamView& v, const ModelOrder& o) {
    Polys p;
    p.ar_ns = lag_poly(v.ar);
    p.ar_s = lag_poly(v.sar, o.s);
    p.ma_ns = lag_poly(v.ma);
    p.ma_s = lag_poly(v.sma, o.s);
    p.ar_full = math::poly_mul(p.ar_ns, p.ar_s);
    p.ma_full = math::poly_mul(p.ma_ns, p.ma_s);
    return p;
}

bool factor_feasible(std::span<const double> coeffs, double margin) {
    // coeffs are the c_m of 1 - c1 x - ..., as polynomial in x.
    std::vector<double> poly(coeffs.size() + 1);
    poly[0] = 1.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m) poly[m + 1] = -coeffs[m];
    for (double r : math::poly_root_moduli(poly))
        if (r <= 1.0 + margin) return false;
    return true;
}

void check_series_for_fit(const Series& z, const ModelOrder& order) {
    if (!z.fully_observed())
        throw std::invalid_argument("sarima: series must be fully observed");
    if (z.size() <= static_cast<std::size_t>(order.max_ar_lag()))
        throw std::invalid_argument("sarima: series length must exceed p + s*P");
}

// Residual recursion shared by css_residuals and the Jacobian.
std::vector<double> residual_vector(const ParamView& v, const Polys& polys,
                                    std::span<const double> z, int t0) {
    const int m = static_cast<int>(z.size());
    std::vector<double> a(m, 0.0);
    const auto& arp = polys.ar_full;
    const auto& map = polys.ma_full;
    for (int t = t0; t < m; ++t) {
        double acc = 0.0;
        for (std::size_t l = 0; l < arp.size(); ++l)
            acc += arp[l] * (z[t - static_cast<int>(l)] - v.mean);
        for (std::size_t j = 1; j < map.size(); ++j) {
            const int u = t - static_cast<int>(j);
            if (u >= t0) acc -= map[j] * a[u];
        }
        a[t] = acc;
    }
    return std::vector<double>(a.begin() + t0, a.end());
}

// Derivative of the residual vector w.r.t. one parameter, driven by
// its forcing sequence: da_t = f_t - sum_j ma_full[j] da_{t-j}.
std::vector<double> derivative_column(const std::vector<double>& forcing,
                                      const Polys& polys, int t0, int m) {
    std::vector<double> da(m, 0.0);
    const auto& map = polys.ma_full;
    for (int t = t0; t < m; ++t) {
        double acc = forcing[t];
        for (std::size_t j = 1; j < map.size(); ++j) {
            const int u = t - static_cast<int>(j);
            if (u >= t0) acc -= map[j] * da[u];
        }
        da[t] = acc;
    }
    return std::vector<double>(da.begin() + t0, da.end());
}

double css_loss(const std::vector<double>& params, const Series& z,
                const ModelOrder& order, bool include_mean) {
    const ParamView v(params, order, include_mean);
    const Polys polys = build_polys(v, order);
    const auto a = residual_vector(v, polys, z.values, order.max_ar_lag());
    double loss = 0.0;
    for (double r : a) loss += r * r;
    return loss;
}

// AR(k) coefficient row by the same recursion the correlogram uses,
// kept local so estimation does not depend on the identification
// module.
std::vector<double> durbin_levinson_row(const std::vector<double>& r, int k_max) {
    std::vector<double> row{r[0]};
    for (int k = 2; k <= k_max; ++k) {
        double num = r[k - 1];
        double den = 1.0;
        for (int j = 1; j < k; ++j) {
            num -= row[j - 1] * r[k - 1 - j];
            den -= row[j - 1] * r[j - 1];
        }
        if (std::abs(den) < 1e-12) break;  // fall back to the shorter row
        const double phi_kk = num / den;
        std::vector<double> next(k);
        for (int j = 1; j < k; ++j) next[j - 1] = row[j - 1] - phi_kk * row[k - 1 - j];
        next[k - 1] = phi_kk;
        row = std::move(next);
    }
    return row;
}

std::vector<double> sample_acf(std::span<const double> x, int max_lag) {
    const int n = static_cast<int>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    std::vector<double> r(max_lag, 0.0);
    if (denom == 0.0) return r;
    for (int k = 1; k <= max_lag; ++k) {
        double s = 0.0;
        for (int t = 0; t + k < n; ++t) s += (x[t] - mean) * (x[t + k] - mean);
        r[k - 1] = s / denom;
    }
    return r;
}

// Two-stage initializer: residual proxies from a long autoregression,
// then one linear regression of z on its own lags and the proxy lags.
std::vector<double> initial_params(const Series& z, const ModelOrder& o,
                                   bool include_mean) {
    const int m = static_cast<int>(z.size());
    const int k_coef = o.coeff_count();
    double mean0 = 0.0;
    if (include_mean) {
        for (double v : z.values) mean0 += v;
        mean0 /= m;
    }
    std::vector<double> x(m);
    for (int t = 0; t < m; ++t) x[t] = z.values[t] - mean0;

    std::vector<double> params(k_coef, 0.0);
    if (include_mean) params.push_back(mean0);
    if (k_coef == 0) return params;

    const int lag_span = o.max_ar_lag() + o.max_ma_lag();
    int long_order = std::min(m / 4, std::max(2 * lag_span, 15));
    long_order = std::max(long_order, 1);

    std::vector<double> ahat(m, 0.0);
    if (o.q + o.Q > 0) {
        const auto row = durbin_levinson_row(sample_acf(x, long_order), long_order);
        const int L = static_cast<int>(row.size());
        for (int t = L; t < m; ++t) {
            double pred = 0.0;
            for (int l = 1; l <= L; ++l) pred += row[l - 1] * x[t - l];
            ahat[t] = x[t] - pred;
        }
        long_order = L;
    } else {
        long_order = 0;
    }

    // Regressor columns in parameter order; MA columns enter negated so
    // the solved coefficients line up with the packed layout.
    const int t_start = std::max(o.max_ar_lag(), long_order + o.max_ma_lag());
    if (m - t_start < 2 * k_coef) return params;  // too short, start from zero

    std::vector<std::vector<double>> cols(k_coef);
    std::vector<double> rhs_rows;
    for (int t = t_start; t < m; ++t) {
        int c = 0;
        for (int i = 1; i <= o.p; ++i) cols[c++].push_back(x[t - i]);
        for (int j = 1; j <= o.q; ++j) cols[c++].push_back(-ahat[t - j]);
        for (int mm = 1; mm <= o.P; ++mm) cols[c++].push_back(x[t - o.s * mm]);
        for (int mm = 1; mm <= o.Q; ++mm) cols[c++].push_back(-ahat[t - o.s * mm]);
        rhs_rows.push_back(x[t]);
    }

    std::vector<double> xtx(k_coef * k_coef, 0.0), xty(k_coef, 0.0);
    const std::size_t rows = rhs_rows.size();
    for (int i = 0; i < k_coef; ++i) {
        for (int j = i; j < k_coef; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < rows; ++t) s += cols[i][t] * cols[j][t];
            xtx[i * k_coef + j] = xtx[j * k_coef + i] = s;
        }
        double s = 0.0;
        for (std::size_t t = 0; t < rows; ++t) s += cols[i][t] * rhs_rows[t];
        xty[i] = s;
    }
    try {
        const auto beta = math::solve_dense(std::move(xtx), std::move(xty), k_coef);
        std::copy(beta.begin(), beta.end(), params.begin());
    } catch (const std::runtime_error&) {
        return params;  // singular design: keep zeros
    }

    // Shrink any factor that starts outside its feasibility region.
    auto shrink = [&](int offset, int count) {
        if (count == 0) return;
        std::span<double> factor(params.data() + offset, count);
        for (int tries = 0; tries < 200; ++tries) {
            if (factor_feasible({factor.data(), factor.size()}, 1e-4)) return;
            for (double& c : factor) c *= 0.9;
        }
        for (double& c : factor) c = 0.0;
    };
    shrink(0, o.p);
    shrink(o.p, o.q);
    shrink(o.p + o.q, o.P);
    shrink(o.p + o.q + o.P, o.Q);
    return params;
}

// Shortest round-trip formatting, same policy as the CSV writers in
// the other modules.
std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

}  // namespace

void ModelOrder::validate(bool include_mean) const {
    if (p < 0 || d < 0 || q < 0 || P < 0 || D < 0 || Q < 0)
        throw std::invalid_argument("ModelOrder: orders must be non-negative");
    if (coeff_count() == 0 && !include_mean)
        throw std::invalid_argument(
            "ModelOrder: need at least one coefficient or the mean");
    if (P + D + Q > 0 && s < 2)
        throw std::invalid_argument("ModelOrder: seasonal terms need s >= 2");
    if (s < 1) throw std::invalid_argument("ModelOrder: s must be positive");
}

std::vector<std::string> coefficient_names(const ModelOrder& order, bool include_mean) {
    std::vector<std::string> names;
    for (int i = 1; i <= order.p; ++i) names.push_back("ar" + std::to_string(i));
    for (int j = 1; j <= order.q; ++j) names.push_back("ma" + std::to_string(j));
    for (int m = 1; m <= order.P; ++m) names.push_back("sar" + std::to_string(m));
    for (int m = 1; m <= order.Q; ++m) names.push_back("sma" + std::to_string(m));
    if (include_mean) names.push_back("mean");
    return names;
}

Series css_residuals(const std::vector<double>& params, const Series& z,
                     const ModelOrder& order, bool include_mean) {
    order.validate(include_mean);
    check_series_for_fit(z, order);
    const ParamView v(params, order, include_mean);
    const Polys polys = build_polys(v, order);
    const int t0 = order.max_ar_lag();
    Series out;
    out.values = residual_vector(v, polys, z.values, t0);
    out.mask.assign(out.values.size(), true);
    out.origin_offset = z.origin_offset + t0;
    out.label = "residuals";
    return out;
}

std::vector<double> css_jacobian(const std::vector<double>& params, const Series& z,
                                 const ModelOrder& order, bool include_mean) {
    order.validate(include_mean);
    check_series_for_fit(z, order);
    const ParamView v(params, order, include_mean);
    const Polys polys = build_polys(v, order);
    const int t0 = order.max_ar_lag();
    const int m = static_cast<int>(z.size());
    const int n_eff = m - t0;
    const int k = order.param_count(include_mean);

    // Residuals on the full index range; entries before t0 are zero,
    // matching the conditional convention.
    std::vector<double> a_full(m, 0.0);
    {
        const auto a = residual_vector(v, polys, z.values, t0);
        std::copy(a.begin(), a.end(), a_full.begin() + t0);
    }
    std::vector<double> w(m);
    for (int t = 0; t < m; ++t) w[t] = z.values[t] - v.mean;

    auto poly_dot = [&](const std::vector<double>& poly, const std::vector<double>& x,
                        int t) {
        double s = 0.0;
        for (std::size_t l = 0; l < poly.size(); ++l) {
            const int u = t - static_cast<int>(l);
            if (u >= 0) s += poly[l] * x[u];
        }
        return s;
    };

    std::vector<double> jac(static_cast<std::size_t>(n_eff) * k);
    std::vector<double> forcing(m, 0.0);
    int col = 0;
    auto emit = [&](const std::vector<double>& f) {
        const auto da = derivative_column(f, polys, t0, m);
        for (int t = 0; t < n_eff; ++t) jac[static_cast<std::size_t>(t) * k + col] = da[t];
        ++col;
    };

    for (int i = 1; i <= order.p; ++i) {
        for (int t = t0; t < m; ++t) forcing[t] = -poly_dot(polys.ar_s, w, t - i);
        emit(forcing);
    }
    for (int j = 1; j <= order.q; ++j) {
        for (int t = t0; t < m; ++t) forcing[t] = poly_dot(polys.ma_s, a_full, t - j);
        emit(forcing);
    }
    for (int mm = 1; mm <= order.P; ++mm) {
        for (int t = t0; t < m; ++t)
            forcing[t] = -poly_dot(polys.ar_ns, w, t - order.s * mm);
        emit(forcing);
    }
    for (int mm = 1; mm <= order.Q; ++mm) {
        for (int t = t0; t < m; ++t)
            forcing[t] = poly_dot(polys.ma_ns, a_full, t - order.s * mm);
        emit(forcing);
    }
    if (include_mean) {
        const double phi_sum =
            std::accumulate(polys.ar_full.begin(), polys.ar_full.end(), 0.0);
        for (int t = t0; t < m; ++t) forcing[t] = -phi_sum;
        emit(forcing);
    }
    return jac;
}

bool is_feasible(const ModelOrder& order, const std::vector<double>& params,
                 bool include_mean, double margin) {
    const ParamView v(params, order, include_mean);
    return factor_feasible(v.ar, margin) && factor_feasible(v.sar, margin) &&
           factor_feasible(v.ma, margin) && factor_feasible(v.sma, margin);
}

FittedModel fit(const Series& z, const ModelOrder& order, bool include_mean) {
    order.validate(include_mean);
    check_series_for_fit(z, order);
    const int t0 = order.max_ar_lag();
    const int m = static_cast<int>(z.size());
    const int n_eff = m - t0;
    const int k = order.param_count(include_mean);
    if (n_eff < 10 * k)
        throw std::invalid_argument("fit: effective sample " + std::to_string(n_eff) +
                                    " is below 10x the parameter count " +
                                    std::to_string(k));

    std::vector<double> params = initial_params(z, order, include_mean);
    double loss = css_loss(params, z, order, include_mean);
    std::vector<double> best = params;
    double best_loss = loss;

    constexpr int kMaxIter = 200;
    constexpr double kGradTol = 1e-8;
    constexpr double kLossTol = 1e-12;
    constexpr double kMargin = 1e-6;

    // Gradient and normal matrix at one parameter point.
    auto normal_system = [&](const std::vector<double>& at_params,
                             std::vector<double>& g, std::vector<double>& jtj) {
        const auto jac = css_jacobian(at_params, z, order, include_mean);
        const Series res = css_residuals(at_params, z, order, include_mean);
        g.assign(k, 0.0);
        jtj.assign(static_cast<std::size_t>(k) * k, 0.0);
        for (int t = 0; t < n_eff; ++t) {
            const double* row = jac.data() + static_cast<std::size_t>(t) * k;
            const double at = res.values[t];
            for (int i = 0; i < k; ++i) {
                g[i] += row[i] * at;
                for (int j = i; j < k; ++j) jtj[i * k + j] += row[i] * row[j];
            }
        }
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < i; ++j) jtj[i * k + j] = jtj[j * k + i];
    };

    bool converged = false;
    int iter = 0;
    for (; iter < kMaxIter; ++iter) {
        std::vector<double> g, jtj;
        normal_system(params, g, jtj);

        double grad_max = 0.0;
        for (double v : g) grad_max = std::max(grad_max, std::abs(2.0 * v));
        if (grad_max < kGradTol) {
            converged = true;
            break;
        }

        // Gauss-Newton direction, with Levenberg damping only when the
        // normal matrix is singular.
        std::vector<double> delta;
        double lambda = 0.0;
        for (int attempt = 0; attempt < 12; ++attempt) {
            std::vector<double> lhs = jtj;
            if (lambda > 0.0)
                for (int i = 0; i < k; ++i)
                    lhs[i * k + i] += lambda * std::max(jtj[i * k + i], 1e-12);
            std::vector<double> rhs(k);
            for (int i = 0; i < k; ++i) rhs[i] = -g[i];
            try {
                delta = math::solve_dense(std::move(lhs), std::move(rhs), k);
                break;
            } catch (const std::runtime_error&) {
                lambda = lambda == 0.0 ? 1e-8 : lambda * 100.0;
            }
        }
        if (delta.empty())
            throw FitError("fit: normal equations unsolvable", best, best_loss, iter);

        // Halve the step until it is feasible and decreases the loss.
        double alpha = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            std::vector<double> cand(k);
            for (int i = 0; i < k; ++i) cand[i] = params[i] + alpha * delta[i];
            if (is_feasible(order, cand, include_mean, kMargin)) {
                const double cand_loss = css_loss(cand, z, order, include_mean);
                if (cand_loss < loss) {
                    const double rel_change = (loss - cand_loss) / std::max(loss, 1e-300);
                    params = std::move(cand);
                    loss = cand_loss;
                    accepted = true;
                    if (loss < best_loss) {
                        best = params;
                        best_loss = loss;
                    }
                    if (rel_change < kLossTol) converged = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // No feasible descent left along the Gauss-Newton
            // direction: the loss is stationary to working precision.
            converged = true;
            break;
        }
        if (converged) break;
    }

    if (!converged)
        throw FitError("fit: no convergence after " + std::to_string(kMaxIter) +
                           " iterations (best loss " + format_double(best_loss) + ")",
                       best, best_loss, iter);
    if (!is_feasible(order, params, include_mean, kMargin))
        throw FitError("fit: optimum violates stationarity/invertibility margins",
                       params, loss, iter);

    FittedModel model;
    model.order = order;
    model.include_mean = include_mean;
    model.names = coefficient_names(order, include_mean);
    model.coefficients = params;
    model.residuals = css_residuals(params, z, order, include_mean);
    model.n_effective = n_eff;
    model.loss = loss;
    model.iterations = iter;
    model.converged = true;
    if (n_eff <= k)
        throw FitError("fit: no residual degrees of freedom", params, loss, iter);
    model.sigma2 = loss / (n_eff - k);

    std::vector<double> g_final, jtj_final;
    normal_system(params, g_final, jtj_final);
    const auto cov = math::invert_dense(jtj_final, k);
    model.std_errors.resize(k);
    model.t_values.resize(k);
    for (int i = 0; i < k; ++i) {
        model.std_errors[i] = std::sqrt(model.sigma2 * cov[i * k + i]);
        model.t_values[i] =
            model.std_errors[i] > 0.0 ? params[i] / model.std_errors[i] : 0.0;
    }
    return model;
}

std::vector<double> psi_weights(const ModelOrder& order,
                                const std::vector<double>& params, bool include_mean,
                                int horizon) {
    if (horizon < 1) throw std::invalid_argument("psi_weights: horizon must be >= 1");
    const ParamView v(params, order, include_mean);
    const Polys polys = build_polys(v, order);
    const std::vector<double> den =
        math::poly_mul(polys.ar_full, difference_poly(order.d, order.D, order.s));
    const auto& num = polys.ma_full;

    std::vector<double> psi(horizon, 0.0);
    psi[0] = 1.0;
    for (int h = 1; h < horizon; ++h) {
        double acc = h < static_cast<int>(num.size()) ? num[h] : 0.0;
        for (std::size_t i = 1; i < den.size() && static_cast<int>(i) <= h; ++i)
            acc -= den[i] * psi[h - i];
        psi[h] = acc;
    }
    return psi;
}

std::vector<double> psi_weights(const FittedModel& model, int horizon) {
    return psi_weights(model.order, model.coefficients, model.include_mean, horizon);
}

ForecastResult forecast(const FittedModel& model, const Series& history, int horizon,
                        double level) {
    if (horizon < 1) throw std::invalid_argument("forecast: horizon must be >= 1");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("forecast: level must lie in (0,1)");
    if (!history.fully_observed())
        throw std::invalid_argument("forecast: history must be fully observed");

    const ParamView v(model.coefficients, model.order, model.include_mean);
    const Polys polys = build_polys(v, model.order);
    const std::vector<double> g = math::poly_mul(
        polys.ar_full, difference_poly(model.order.d, model.order.D, model.order.s));
    const int n = static_cast<int>(history.size());
    if (n < static_cast<int>(g.size()) - 1)
        throw std::invalid_argument("forecast: history shorter than the model memory");

    const double phi_sum =
        std::accumulate(polys.ar_full.begin(), polys.ar_full.end(), 0.0);
    const double constant = model.include_mean ? v.mean * phi_sum : 0.0;

    // In-sample shocks indexed on the history's own axis.
    const int first_shock = model.residuals.origin_offset - history.origin_offset;
    auto shock = [&](int u) {
        const int r = u - first_shock;
        if (r < 0 || r >= static_cast<int>(model.residuals.size())) return 0.0;
        return model.residuals.values[r];
    };

    ForecastResult fc;
    fc.horizon = horizon;
    fc.level = level;
    fc.point.resize(horizon);
    auto value = [&](int u) {
        return u < n ? history.values[u] : fc.point[u - n];
    };
    for (int h = 1; h <= horizon; ++h) {
        const int t = n + h - 1;
        double acc = constant;
        for (std::size_t l = 1; l < g.size(); ++l) acc -= g[l] * value(t - static_cast<int>(l));
        for (std::size_t j = 1; j < polys.ma_full.size(); ++j)
            acc += polys.ma_full[j] * shock(t - static_cast<int>(j));
        fc.point[h - 1] = acc;
    }

    fc.psi = psi_weights(model, horizon);
    const double quantile = math::normal_quantile(0.5 * (1.0 + level));
    fc.lower.resize(horizon);
    fc.upper.resize(horizon);
    double var_sum = 0.0;
    for (int h = 1; h <= horizon; ++h) {
        var_sum += fc.psi[h - 1] * fc.psi[h - 1];
        const double half = quantile * std::sqrt(model.sigma2 * var_sum);
        fc.lower[h - 1] = fc.point[h - 1] - half;
        fc.upper[h - 1] = fc.point[h - 1] + half;
    }

    const bool has_log = std::any_of(
        history.meta.begin(), history.meta.end(),
        [](const TransformStep& st) { return st.kind == TransformStep::Kind::Log; });
    if (has_log) {
        fc.original_scale_point = invert_log_steps(fc.point, history.meta);
        fc.original_scale_lower = invert_log_steps(fc.lower, history.meta);
        fc.original_scale_upper = invert_log_steps(fc.upper, history.meta);
    }
    return fc;
}

Series simulate_sarima(const ModelOrder& order, const std::vector<double>& params,
                       bool include_mean, double sigma, int n, std::uint64_t seed) {
    order.validate(include_mean);
    if (n < 1) throw std::invalid_argument("simulate_sarima: n must be positive");
    if (sigma < 0.0) throw std::invalid_argument("simulate_sarima: sigma must be >= 0");
    if (!is_feasible(order, params, include_mean, 0.0))
        throw std::invalid_argument(
            "simulate_sarima: coefficients are not stationary/invertible");

    const ParamView v(params, order, include_mean);
    const Polys polys = build_polys(v, order);
    const int burn = 10 * (order.s + order.p + order.q);
    const int total = burn + n;

    math::NormalSampler shocks(seed);
    std::vector<double> a(total), x(total, 0.0);
    for (int t = 0; t < total; ++t) a[t] = sigma * shocks.next();
    for (int t = 0; t < total; ++t) {
        double acc = a[t];
        for (std::size_t l = 1; l < polys.ar_full.size(); ++l) {
            const int u = t - static_cast<int>(l);
            if (u >= 0) acc -= polys.ar_full[l] * x[u];
        }
        for (std::size_t j = 1; j < polys.ma_full.size(); ++j) {
            const int u = t - static_cast<int>(j);
            if (u >= 0) acc += polys.ma_full[j] * a[u];
        }
        x[t] = acc;
    }

    std::vector<double> w(x.begin() + burn, x.end());
    if (include_mean)
        for (double& val : w) val += v.mean;

    // Integrate: seasonal rounds first, then ordinary, zero initial
    // state throughout.
    for (int round = 0; round < order.D; ++round)
        for (int t = order.s; t < n; ++t) w[t] += w[t - order.s];
    for (int round = 0; round < order.d; ++round)
        for (int t = 1; t < n; ++t) w[t] += w[t - 1];

    Series out(std::move(w), "simulated");
    return out;
}

std::string model_json(const FittedModel& model) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (std::size_t i = 0; i < model.names.size(); ++i) {
        int lag = 0;
        const std::string& name = model.names[i];
        if (name.rfind("sar", 0) == 0 || name.rfind("sma", 0) == 0)
            lag = model.order.s * std::stoi(name.substr(3));
        else if (name != "mean")
            lag = std::stoi(name.substr(2));
        coeffs.push_back({{"name", name},
                          {"estimate", model.coefficients[i]},
                          {"std_error", model.std_errors[i]},
                          {"t_value", model.t_values[i]},
                          {"lag", lag}});
    }
    nlohmann::json doc{
        {"order",
         {{"p", model.order.p},
          {"d", model.order.d},
          {"q", model.order.q},
          {"P", model.order.P},
          {"D", model.order.D},
          {"Q", model.order.Q},
          {"s", model.order.s}}},
        {"include_mean", model.include_mean},
        {"coefficients", coeffs},
        {"sigma2", model.sigma2},
        {"loss", model.loss},
        {"n_effective", model.n_effective},
        {"convergence", {{"converged", model.converged}, {"iterations", model.iterations}}}};
    return doc.dump(2);
}

void forecast_csv(const ForecastResult& fc, std::ostream& out) {
    const bool original = !fc.original_scale_point.empty();
    out << "step,point,lower,upper";
    if (original) out << ",original_scale_point,original_scale_lower,original_scale_upper";
    out << '\n';
    for (int h = 0; h < fc.horizon; ++h) {
        out << (h + 1) << ',' << format_double(fc.point[h]) << ','
            << format_double(fc.lower[h]) << ',' << format_double(fc.upper[h]);
        if (original)
            out << ',' << format_double(fc.original_scale_point[h]) << ','
                << format_double(fc.original_scale_lower[h]) << ','
                << format_double(fc.original_scale_upper[h]);
        out << '\n';
    }
}

}  // namespace raincast
