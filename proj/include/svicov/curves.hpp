#pragma once

// One-dimensional curve fitting for indicator-vs-interval series, analytic
// derivatives of the fitted forms, and a bracketing root search on the
// difference of two derivatives.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace svicov {

struct FitError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class CurveKind { polynomial, power, logarithm, smoothing_spline };

struct FitKind {
    CurveKind kind = CurveKind::smoothing_spline;
    int degree = 2;  // polynomial only

    static FitKind polynomial(int d) { return {CurveKind::polynomial, d}; }
    static FitKind power() { return {CurveKind::power, 0}; }
    static FitKind logarithm() { return {CurveKind::logarithm, 0}; }
    static FitKind spline() { return {CurveKind::smoothing_spline, 0}; }

    std::string str() const {
        switch (kind) {
            case CurveKind::polynomial: return "polynomial" + std::to_string(degree);
            case CurveKind::power: return "power";
            case CurveKind::logarithm: return "logarithm";
            case CurveKind::smoothing_spline: return "smoothing-spline";
        }
        return "?";
    }
};

/// Natural cubic spline through (x, g) with second derivatives m; linear
/// beyond the end knots.
struct CubicPieces {
    std::vector<double> x, g, m;

    std::size_t segment(double t) const {
        auto it = std::upper_bound(x.begin(), x.end(), t);
        auto i = static_cast<std::size_t>(std::distance(x.begin(), it));
        return std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, x.size() - 2);
    }

    // Coefficients of g_i + b t + c t^2 + d t^3 on segment i.
    std::array<double, 4> coeffs(std::size_t i) const {
        const double h = x[i + 1] - x[i];
        return {g[i], (g[i + 1] - g[i]) / h - h * (2.0 * m[i] + m[i + 1]) / 6.0, m[i] / 2.0,
                (m[i + 1] - m[i]) / (6.0 * h)};
    }

    double value(double t) const {
        if (t < x.front()) return g.front() + slope(x.front()) * (t - x.front());
        if (t > x.back()) return g.back() + slope(x.back()) * (t - x.back());
        const auto i = segment(t);
        const auto [a, b, c, d] = coeffs(i);
        const double u = t - x[i];
        return a + u * (b + u * (c + u * d));
    }

    double slope(double t) const {
        const double tc = std::clamp(t, x.front(), x.back());
        const auto i = segment(tc);
        const auto [a, b, c, d] = coeffs(i);
        const double u = tc - x[i];
        return b + u * (2.0 * c + 3.0 * u * d);
    }
};

struct FittedCurve {
    FitKind kind;
    std::vector<double> params;  // polynomial: c0..cd; power: (a, b); logarithm: (a, b)
    CubicPieces spline;
    double lambda = 0.0;  // spline penalty chosen by GCV
    double x_min = 0.0, x_max = 0.0;
    double r2 = 0.0;

    double operator()(double x) const {
        switch (kind.kind) {
            case CurveKind::polynomial: {
                double v = 0.0;
                for (auto it = params.rbegin(); it != params.rend(); ++it) v = v * x + *it;
                return v;
            }
            case CurveKind::power: return params[0] * std::pow(x, params[1]);
            case CurveKind::logarithm: return params[0] + params[1] * std::log(x);
            case CurveKind::smoothing_spline: return spline.value(x);
        }
        return 0.0;
    }
};

/// Exact first derivative of a fitted curve.
struct CurveDerivative {
    FittedCurve curve;

    double operator()(double x) const {
        const auto& p = curve.params;
        switch (curve.kind.kind) {
            case CurveKind::polynomial: {
                double v = 0.0;
                for (std::size_t k = p.size(); k-- > 1;) v = v * x + static_cast<double>(k) * p[k];
                return v;
            }
            case CurveKind::power: return p[0] * p[1] * std::pow(x, p[1] - 1.0);
            case CurveKind::logarithm: return p[1] / x;
            case CurveKind::smoothing_spline: return curve.spline.slope(x);
        }
        return 0.0;
    }
};

inline CurveDerivative derivative(const FittedCurve& c) { return {c}; }

namespace detail {

inline double r_squared(std::span<const double> y, std::span<const double> fitted) {
    double mean = 0.0;
    for (auto v : y) mean += v;
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - fitted[i]) * (y[i] - fitted[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    if (ss_tot > 0.0) return 1.0 - ss_res / ss_tot;
    return ss_res <= 1e-24 ? 1.0 : 0.0;
}

inline std::pair<double, double> simple_regression(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double mx = x.mean(), my = y.mean();
    const double sxx = (x.array() - mx).square().sum();
    if (!(sxx > 0.0)) throw FitError("fit needs at least two distinct x values");
    const double b = ((x.array() - mx) * (y.array() - my)).sum() / sxx;
    return {my - b * mx, b};
}

// Penalised natural cubic spline with knots at the data (Reinsch form):
// minimise sum (y - g)^2 + lambda * integral g''^2.
struct SplineSystem {
    Eigen::MatrixXd Q, R, K;

    explicit SplineSystem(const std::vector<double>& x) {
        const auto n = static_cast<Eigen::Index>(x.size());
        Q = Eigen::MatrixXd::Zero(n, n - 2);
        R = Eigen::MatrixXd::Zero(n - 2, n - 2);
        for (Eigen::Index j = 1; j + 1 < n; ++j) {
            const double h0 = x[j] - x[j - 1], h1 = x[j + 1] - x[j];
            Q(j - 1, j - 1) = 1.0 / h0;
            Q(j, j - 1) = -1.0 / h0 - 1.0 / h1;
            Q(j + 1, j - 1) = 1.0 / h1;
            R(j - 1, j - 1) = (h0 + h1) / 3.0;
            if (j + 1 < n - 1) {
                R(j - 1, j) = h1 / 6.0;
                R(j, j - 1) = h1 / 6.0;
            }
        }
        K = Q * R.ldlt().solve(Q.transpose());
    }
};

}  // namespace detail

/// Candidate penalties for the smoothing spline, log-spaced around the
/// scale where the penalty and the residuals are comparable.
inline std::vector<double> spline_lambda_grid(const Eigen::MatrixXd& K) {
    const double scale = static_cast<double>(K.rows()) / std::max(K.trace(), 1e-300);
    std::vector<double> out;
    for (int k = -32; k <= 32; ++k) out.push_back(scale * std::pow(10.0, k / 4.0));
    return out;
}

inline FittedCurve fit_curve(std::span<const double> xs, std::span<const double> ys, FitKind kind) {
    if (xs.size() != ys.size()) throw FitError("fit: x and y differ in length");
    if (xs.size() < 4) throw FitError("fit: need at least 4 points");
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw FitError("fit: non-finite input");

    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
    std::vector<double> x, y;
    for (auto i : order) {
        x.push_back(xs[i]);
        y.push_back(ys[i]);
    }
    const auto n = static_cast<Eigen::Index>(x.size());
    const Eigen::Map<const Eigen::VectorXd> X(x.data(), n), Y(y.data(), n);

    FittedCurve c;
    c.kind = kind;
    c.x_min = x.front();
    c.x_max = x.back();

    switch (kind.kind) {
        case CurveKind::polynomial: {
            if (kind.degree < 0) throw FitError("fit: negative polynomial degree");
            Eigen::MatrixXd V(n, kind.degree + 1);
            for (Eigen::Index i = 0; i < n; ++i) {
                double p = 1.0;
                for (int k = 0; k <= kind.degree; ++k, p *= x[i]) V(i, k) = p;
            }
            const Eigen::VectorXd coef = V.colPivHouseholderQr().solve(Y);
            c.params.assign(coef.data(), coef.data() + coef.size());
            break;
        }
        case CurveKind::power: {
            if (x.front() <= 0.0) throw FitError("fit: power kind needs x > 0");
            if (Y.minCoeff() <= 0.0) throw FitError("fit: power kind needs y > 0");
            const auto [la, b] = detail::simple_regression(X.array().log().matrix(), Y.array().log().matrix());
            c.params = {std::exp(la), b};
            break;
        }
        case CurveKind::logarithm: {
            if (x.front() <= 0.0) throw FitError("fit: logarithm kind needs x > 0");
            const auto [a, b] = detail::simple_regression(X.array().log().matrix(), Y);
            c.params = {a, b};
            break;
        }
        case CurveKind::smoothing_spline: {
            for (Eigen::Index i = 1; i < n; ++i)
                if (!(x[i] > x[i - 1])) throw FitError("fit: smoothing spline needs distinct x values");
            const detail::SplineSystem sys(x);
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            double best_score = std::numeric_limits<double>::infinity();
            Eigen::VectorXd best_g = Y;
            for (double lam : spline_lambda_grid(sys.K)) {
                const Eigen::MatrixXd A = (I + lam * sys.K).inverse();
                const Eigen::VectorXd g = A * Y;
                const double rss = (Y - g).squaredNorm();
                const double dof = static_cast<double>(n) - A.trace();
                if (!(dof > 0.0)) continue;
                const double score = static_cast<double>(n) * rss / (dof * dof);
                if (score < best_score) {
                    best_score = score;
                    best_g = g;
                    c.lambda = lam;
                }
            }
            const Eigen::VectorXd inner = sys.R.ldlt().solve(sys.Q.transpose() * best_g);
            c.spline.x = x;
            c.spline.g.assign(best_g.data(), best_g.data() + n);
            c.spline.m.assign(static_cast<std::size_t>(n), 0.0);
            for (Eigen::Index j = 0; j < inner.size(); ++j) c.spline.m[j + 1] = inner[j];
            break;
        }
    }

    std::vector<double> fitted(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) fitted[i] = c(x[i]);
    c.r2 = detail::r_squared(y, fitted);
    return c;
}

/// Smallest x in [lo, hi] where d1 - d2 changes sign between grid steps,
/// refined by bisection to 1e-3. Returns lo when the difference is zero
/// there (coincident curves included).
inline std::optional<double> find_intersection(const std::function<double(double)>& d1,
                                               const std::function<double(double)>& d2, double lo, double hi,
                                               double step = 0.1) {
    if (!(lo < hi)) throw std::invalid_argument("find_intersection: need lo < hi");
    if (!(step > 0.0)) throw std::invalid_argument("find_intersection: step must be positive");
    auto f = [&](double x) { return d1(x) - d2(x); };
    double a = lo, fa = f(a);
    if (fa == 0.0) return lo;
    const auto steps = static_cast<long>(std::ceil((hi - lo) / step - 1e-9));
    for (long k = 1; k <= steps; ++k) {
        const double b = std::min(hi, lo + static_cast<double>(k) * step);
        const double fb = f(b);
        if (fb == 0.0) return b;
        if ((fa < 0.0) != (fb < 0.0)) {
            double l = a, r = b, fl = fa;
            while (r - l > 1e-3) {
                const double mid = 0.5 * (l + r), fm = f(mid);
                if (fm == 0.0) return mid;
                if ((fm < 0.0) == (fl < 0.0)) {
                    l = mid;
                    fl = fm;
                } else {
                    r = mid;
                }
            }
            return 0.5 * (l + r);
        }
        a = b;
        fa = fb;
    }
    return std::nullopt;
}

}  // namespace svicov
