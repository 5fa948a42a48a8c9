#ifndef DESVR_SVR_HPP
#define DESVR_SVR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "matrix.hpp"

namespace desvr {

// --- kernels -----------------------------------------------------------------

enum class KernelKind { linear, polynomial, rbf, sigmoid };

inline const char* to_string(KernelKind kind)
{
    switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "polynomial";
    case KernelKind::rbf: return "rbf";
    case KernelKind::sigmoid: return "sigmoid";
    }
    return "?";
}

inline KernelKind kernel_kind_from_string(std::string_view s)
{
    if (s == "linear") return KernelKind::linear;
    if (s == "polynomial" || s == "poly") return KernelKind::polynomial;
    if (s == "rbf") return KernelKind::rbf;
    if (s == "sigmoid") return KernelKind::sigmoid;
    throw InvalidArgument("unknown kernel '" + std::string(s) + "'");
}

/// Kernel choice and its parameters.
///
/// The RBF width follows the 2σ² convention: K(x, z) = exp(-|x - z|² / gamma)
/// with gamma = 2σ². A larger gamma therefore means a *wider* kernel, the
/// reverse of the libsvm-style exp(-gamma |x - z|²) convention.
struct KernelSpec {
    KernelKind kind = KernelKind::rbf;
    double gamma = 0.2;
    int degree = 3;
    double shift = 0.0;

    static KernelSpec rbf(double gamma) { return {KernelKind::rbf, gamma, 3, 0.0}; }
    static KernelSpec linear() { return {KernelKind::linear, 0.0, 1, 0.0}; }

    void validate() const
    {
        if (kind == KernelKind::rbf)
            detail::require(std::isfinite(gamma) && gamma > 0.0, "rbf kernel requires finite gamma > 0");
        if (kind == KernelKind::polynomial)
            detail::require(degree >= 1, "polynomial kernel requires degree >= 1");
        if (kind == KernelKind::sigmoid)
            detail::require(std::isfinite(shift), "sigmoid kernel requires a finite shift");
    }

    bool operator==(const KernelSpec&) const = default;
};

/// Kernel value from the inner product and squared distance of a pair.
/// Only the quantity the kernel actually needs has to be meaningful.
inline double kernel_from_pair(const KernelSpec& spec, double inner, double sqdist)
{
    switch (spec.kind) {
    case KernelKind::linear: return inner;
    case KernelKind::polynomial: return std::pow(inner + 1.0, spec.degree);
    case KernelKind::rbf: return std::exp(-sqdist / spec.gamma);
    case KernelKind::sigmoid: return std::tanh(inner + spec.shift);
    }
    return 0.0;
}

inline bool uses_distance(KernelKind kind) { return kind == KernelKind::rbf; }

inline double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> z)
{
    if (x.size() != z.size())
        throw DataError("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                        std::to_string(z.size()) + ")");
    if (uses_distance(spec.kind))
        return kernel_from_pair(spec, 0.0, squared_distance(x, z));
    return kernel_from_pair(spec, dot(x, z), 0.0);
}

/// Pairwise inner products (or squared distances, for distance kernels) of a
/// fixed point set. Kernel matrices for any parameter value of the same
/// kernel kind can be derived from it without touching the features again.
class PairwiseTable {
public:
    PairwiseTable() = default;

    PairwiseTable(const Matrix& points, KernelKind kind) : _kind(kind), _values(points.rows(), points.rows())
    {
        const bool distance = uses_distance(kind);
        for (std::size_t i = 0; i < points.rows(); ++i)
            for (std::size_t j = i; j < points.rows(); ++j) {
                const double v = distance ? squared_distance(points.row(i), points.row(j))
                                          : dot(points.row(i), points.row(j));
                _values(i, j) = v;
                _values(j, i) = v;
            }
    }

    KernelKind kind() const { return _kind; }
    std::size_t size() const { return _values.rows(); }

    /// Kernel matrix over the listed rows (all rows when `rows` is empty).
    Matrix gram(const KernelSpec& spec, std::span<const std::size_t> rows = {}) const
    {
        detail::require(spec.kind == _kind, "PairwiseTable: kernel kind differs from the table's");
        const bool distance = uses_distance(_kind);
        const std::size_t n = rows.empty() ? size() : rows.size();
        auto index = [&](std::size_t k) { return rows.empty() ? k : rows[k]; };
        Matrix k(n, n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) {
                const double v = _values(index(a), index(b));
                const double kv = distance ? kernel_from_pair(spec, 0.0, v) : kernel_from_pair(spec, v, 0.0);
                k(a, b) = kv;
                k(b, a) = kv;
            }
        return k;
    }

private:
    KernelKind _kind = KernelKind::rbf;
    Matrix _values;
};

inline Matrix gram_matrix(const KernelSpec& spec, const Matrix& points)
{
    Matrix k(points.rows(), points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i)
        for (std::size_t j = i; j < points.rows(); ++j) {
            const double v = kernel_eval(spec, points.row(i), points.row(j));
            k(i, j) = v;
            k(j, i) = v;
        }
    return k;
}

// --- parameters and model ------------------------------------------------------

struct SvrParams {
    double c = 1.0;
    double epsilon = 0.1;
    KernelSpec kernel = KernelSpec::rbf(0.2);

    void validate() const
    {
        detail::require(std::isfinite(c) && c > 0.0, "SVR parameter C must be finite and > 0");
        detail::require(std::isfinite(epsilon) && epsilon >= 0.0, "SVR parameter epsilon must be finite and >= 0");
        kernel.validate();
    }

    bool operator==(const SvrParams&) const = default;
};

/// Parameters of the untuned baseline model: C = 1, epsilon = 0.1, gamma = 0.2.
inline SvrParams default_svr_params() { return {1.0, 0.1, KernelSpec::rbf(0.2)}; }

struct SolverSettings {
    double kkt_tolerance = 1e-3;
    /// Iteration cap in units of n pair updates; 0 selects 10 * n passes.
    std::size_t max_passes = 0;
    double sv_threshold = 1e-8;

    /// Kernel matrices above this many rows are computed row by row on demand.
    std::size_t dense_gram_limit = 4096;

    void validate() const
    {
        detail::require(kkt_tolerance > 0.0, "kkt_tolerance must be > 0");
        detail::require(sv_threshold >= 0.0, "sv_threshold must be >= 0");
    }

    std::size_t max_iterations(std::size_t n) const
    {
        const std::size_t passes = max_passes == 0 ? 10 * n : max_passes;
        return std::max<std::size_t>(1, passes * n);
    }
};

struct TrainingDiagnostics {
    std::size_t iterations = 0;
    double max_kkt_violation = 0.0;
    bool converged = false;

    bool operator==(const TrainingDiagnostics&) const = default;
};

/// Trained epsilon-SVR. Only training rows with a nonzero dual coefficient
/// are kept; f(x) = sum_i beta_i K(s_i, x) + bias.
struct SvrModel {
    std::size_t dims = 0;
    Matrix support_inputs;
    /// Signed dual coefficients beta_i = alpha_i - alpha_i*, one per support row.
    std::vector<double> beta;
    /// Index of each support row in the training set.
    std::vector<std::size_t> support_indices;
    double bias = 0.0;
    SvrParams params;
    std::size_t n_sv = 0;
    TrainingDiagnostics diagnostics;

    bool operator==(const SvrModel&) const = default;
};

inline std::size_t count_sv(const SvrModel& model, double threshold)
{
    detail::require(threshold >= 0.0, "count_sv: threshold must be >= 0");
    return static_cast<std::size_t>(
        std::count_if(model.beta.begin(), model.beta.end(), [&](double b) { return std::abs(b) > threshold; }));
}

inline double predict(const SvrModel& model, std::span<const double> x)
{
    if (x.size() != model.dims)
        throw DataError("predict: model expects " + std::to_string(model.dims) + " features, got " +
                        std::to_string(x.size()));
    double f = model.bias;
    for (std::size_t i = 0; i < model.beta.size(); ++i)
        f += model.beta[i] * kernel_eval(model.params.kernel, model.support_inputs.row(i), x);
    return f;
}

inline std::vector<double> predict(const SvrModel& model, const Matrix& rows)
{
    std::vector<double> out(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i)
        out[i] = predict(model, rows.row(i));
    return out;
}

inline double mse(std::span<const double> actual, std::span<const double> predicted)
{
    if (actual.size() != predicted.size())
        throw InvalidArgument("mse: length mismatch (" + std::to_string(actual.size()) + " vs " +
                              std::to_string(predicted.size()) + ")");
    if (actual.empty())
        throw InvalidArgument("mse: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double r = actual[i] - predicted[i];
        s += r * r;
    }
    return s / static_cast<double>(actual.size());
}

/// Dual objective -1/2 b'Kb - eps sum|b_i| + y'b at a coefficient vector.
inline double dual_objective(const Matrix& gram, std::span<const double> targets, double epsilon,
                             std::span<const double> beta)
{
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        if (beta[i] == 0.0)
            continue;
        double ki = 0.0;
        for (std::size_t j = 0; j < beta.size(); ++j)
            ki += gram(i, j) * beta[j];
        quad += beta[i] * ki;
        lin += targets[i] * beta[i] - epsilon * std::abs(beta[i]);
    }
    return lin - 0.5 * quad;
}

/// Dense coefficient vector over the full training set.
inline std::vector<double> full_beta(const SvrModel& model, std::size_t n_train)
{
    std::vector<double> beta(n_train, 0.0);
    for (std::size_t k = 0; k < model.beta.size(); ++k)
        beta.at(model.support_indices[k]) = model.beta[k];
    return beta;
}

// --- solver ------------------------------------------------------------------

namespace detail {

/// Precomputed kernel matrix.
class DenseGram {
public:
    explicit DenseGram(Matrix k) : _k(std::move(k)) {}
    std::size_t size() const { return _k.rows(); }
    double diag(std::size_t i) const { return _k(i, i); }
    std::span<const double> row(std::size_t i) { return _k.row(i); }

private:
    Matrix _k;
};

/// Kernel rows computed on demand, keeping the two most recent.
class LazyGram {
public:
    LazyGram(const Matrix& points, KernelSpec spec) : _points(points), _spec(spec), _diag(points.rows())
    {
        for (std::size_t i = 0; i < points.rows(); ++i)
            _diag[i] = kernel_eval(spec, points.row(i), points.row(i));
        for (auto& s : _slots)
            s.values.resize(points.rows());
    }
    std::size_t size() const { return _points.rows(); }
    double diag(std::size_t i) const { return _diag[i]; }

    std::span<const double> row(std::size_t i)
    {
        for (auto& s : _slots)
            if (s.index == i) {
                s.stamp = ++_clock;
                return s.values;
            }
        auto& victim = _slots[0].stamp <= _slots[1].stamp ? _slots[0] : _slots[1];
        for (std::size_t j = 0; j < _points.rows(); ++j)
            victim.values[j] = kernel_eval(_spec, _points.row(i), _points.row(j));
        victim.index = i;
        victim.stamp = ++_clock;
        return victim.values;
    }

private:
    struct Slot {
        std::size_t index = static_cast<std::size_t>(-1);
        std::size_t stamp = 0;
        std::vector<double> values;
    };
    const Matrix& _points;
    KernelSpec _spec;
    std::vector<double> _diag;
    std::array<Slot, 2> _slots;
    std::size_t _clock = 0;
};

struct DualSolution {
    std::vector<double> beta;
    double bias = 0.0;
    TrainingDiagnostics diagnostics;
};

/// Exact maximizer of the dual restricted to beta_i += t, beta_j -= t.
///
/// Along that line the objective is the concave piecewise quadratic
///   a t - eta t^2 / 2 - eps (|bi + t| - |bi|) - eps (|bj - t| - |bj|)
/// with kinks at t = -bi and t = bj, restricted to the box [lo, hi]. The
/// maximum is at a segment end or at the stationary point of one piece, so
/// every such candidate is evaluated. t = 0 is always a candidate, so the
/// returned step never decreases the objective.
inline double pair_step(double a, double eta, double bi, double bj, double c, double eps)
{
    const double lo = std::max(-c - bi, bj - c);
    const double hi = std::min(c - bi, bj + c);
    auto gain = [&](double t) {
        return a * t - 0.5 * eta * t * t - eps * (std::abs(bi + t) - std::abs(bi)) -
               eps * (std::abs(bj - t) - std::abs(bj));
    };

    std::array<double, 4> knots{lo, -bi, bj, hi};
    std::size_t count = 0;
    std::array<double, 4> pts{};
    for (double k : knots)
        if (k >= lo && k <= hi)
            pts[count++] = k;
    std::sort(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(count));

    double best_t = 0.0, best_gain = 0.0;
    auto consider = [&](double t) {
        const double g = gain(t);
        if (g > best_gain) {
            best_gain = g;
            best_t = t;
        }
    };
    for (std::size_t k = 0; k < count; ++k)
        consider(pts[k]);
    if (eta > 0.0)
        for (std::size_t k = 0; k + 1 < count; ++k) {
            const double mid = 0.5 * (pts[k] + pts[k + 1]);
            const double si = bi + mid >= 0.0 ? 1.0 : -1.0;
            const double sj = bj - mid >= 0.0 ? 1.0 : -1.0;
            const double t = (a - eps * si + eps * sj) / eta;
            consider(std::clamp(t, pts[k], pts[k + 1]));
        }
    return best_t;
}

/// Snaps values within a few ulps of the box edges onto them.
inline double snap_to_box(double v, double c)
{
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * c;
    if (v >= c - slack)
        return c;
    if (v <= -c + slack)
        return -c;
    return v;
}

/// SMO-style solver for the single-coefficient epsilon-SVR dual
///
///   max  -1/2 sum_ij b_i b_j K_ij - eps sum_i |b_i| + sum_i y_i b_i
///   s.t. sum_i b_i = 0,  -C <= b_i <= C.
///
/// With g_k = y_k - sum_l b_l K_kl, moving b_k up has slope
/// up_k = g_k - eps (b_k >= 0) or g_k + eps (b_k < 0), moving it down has
/// slope -down_k with down_k = g_k - eps (b_k > 0) or g_k + eps (b_k <= 0).
/// The point is optimal when max{up_k : b_k < C} <= min{down_k : b_k > -C};
/// the gap between the two is the KKT violation used for stopping.
template <typename Gram>
DualSolution solve_dual(Gram& gram, std::span<const double> y, double c, double eps, const SolverSettings& settings)
{
    const std::size_t n = gram.size();
    DualSolution sol;
    sol.beta.assign(n, 0.0);
    std::vector<double> g(y.begin(), y.end());
    auto& beta = sol.beta;

    auto up = [&](std::size_t k) { return beta[k] >= 0.0 ? g[k] - eps : g[k] + eps; };
    auto down = [&](std::size_t k) { return beta[k] > 0.0 ? g[k] - eps : g[k] + eps; };
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr double tau = 1e-12;

    auto extremes = [&](std::size_t& arg_up) {
        double m = -inf, big_m = inf;
        arg_up = n;
        for (std::size_t k = 0; k < n; ++k) {
            if (beta[k] < c) {
                const double u = up(k);
                if (u > m) {
                    m = u;
                    arg_up = k;
                }
            }
            if (beta[k] > -c)
                big_m = std::min(big_m, down(k));
        }
        return std::pair{m, big_m};
    };

    const std::size_t max_iter = settings.max_iterations(n);
    std::size_t iter = 0;
    std::size_t i = n;
    auto [m, big_m] = extremes(i);
    for (;;) {
        const double violation = (i == n || big_m == inf) ? 0.0 : m - big_m;
        if (violation <= settings.kkt_tolerance) {
            sol.diagnostics.converged = true;
            break;
        }
        if (iter >= max_iter)
            break;

        const auto ki = gram.row(i);
        const double kii = gram.diag(i);
        std::size_t j = n;
        double best = -inf;
        for (std::size_t k = 0; k < n; ++k) {
            if (beta[k] <= -c)
                continue;
            const double b = m - down(k);
            if (b <= 0.0)
                continue;
            double eta = kii + gram.diag(k) - 2.0 * ki[k];
            if (eta <= 0.0)
                eta = tau;
            const double score = b * b / eta;
            if (score > best) {
                best = score;
                j = k;
            }
        }
        if (j == n)
            break;

        const double eta = kii + gram.diag(j) - 2.0 * ki[j];
        const double t = pair_step(g[i] - g[j], eta, beta[i], beta[j], c, eps);
        ++iter;
        if (t == 0.0) {
            // No representable improvement along the most violating pair.
            break;
        }

        const double old_i = beta[i], old_j = beta[j];
        beta[i] = snap_to_box(old_i + t, c);
        beta[j] = snap_to_box(old_j - t, c);
        const double di = beta[i] - old_i, dj = beta[j] - old_j;
        if (di == 0.0 && dj == 0.0)
            break;

        // Gradient update fused with the search for the next working index.
        const auto kj = gram.row(j);
        const auto kin = gram.row(i);
        m = -inf;
        big_m = inf;
        i = n;
        for (std::size_t k = 0; k < n; ++k) {
            g[k] -= di * kin[k] + dj * kj[k];
            const double bk = beta[k];
            if (bk < c) {
                const double u = bk >= 0.0 ? g[k] - eps : g[k] + eps;
                if (u > m) {
                    m = u;
                    i = k;
                }
            }
            if (bk > -c) {
                const double d = bk > 0.0 ? g[k] - eps : g[k] + eps;
                if (d < big_m)
                    big_m = d;
            }
        }
    }

    // Fresh gradient for the bias, so accumulated update error does not leak in.
    for (std::size_t k = 0; k < n; ++k) {
        const auto kk = gram.row(k);
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l)
            if (beta[l] != 0.0)
                s += beta[l] * kk[l];
        g[k] = y[k] - s;
    }

    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (beta[k] > 0.0 && beta[k] < c) {
            free_sum += g[k] - eps;
            ++free_count;
        }
        else if (beta[k] < 0.0 && beta[k] > -c) {
            free_sum += g[k] + eps;
            ++free_count;
        }
    }
    std::size_t unused = 0;
    std::tie(m, big_m) = extremes(unused);
    if (free_count > 0)
        sol.bias = free_sum / static_cast<double>(free_count);
    else if (m == -inf)
        sol.bias = big_m;
    else if (big_m == inf)
        sol.bias = m;
    else
        sol.bias = 0.5 * (m + big_m);

    sol.diagnostics.iterations = iter;
    sol.diagnostics.max_kkt_violation = std::max(0.0, (m == -inf || big_m == inf) ? 0.0 : m - big_m);
    sol.diagnostics.converged = sol.diagnostics.converged && sol.diagnostics.max_kkt_violation <= settings.kkt_tolerance;
    return sol;
}

inline void check_training_inputs(const Matrix& features, std::span<const double> targets, const SvrParams& params,
                                  const SolverSettings& settings)
{
    if (features.rows() == 0)
        throw InvalidArgument("train_svr: empty training set");
    if (features.rows() != targets.size())
        throw DataError("train_svr: " + std::to_string(features.rows()) + " feature rows but " +
                        std::to_string(targets.size()) + " targets");
    params.validate();
    settings.validate();
    for (double v : features.data())
        if (!std::isfinite(v))
            throw DataError("train_svr: non-finite feature value");
    for (double v : targets)
        if (!std::isfinite(v))
            throw DataError("train_svr: non-finite target value");
}

inline SvrModel assemble_model(const Matrix& features, const SvrParams& params, const SolverSettings& settings,
                               DualSolution sol)
{
    SvrModel model;
    model.dims = features.cols();
    model.params = params;
    model.bias = sol.bias;
    model.diagnostics = sol.diagnostics;
    model.support_inputs = Matrix(0, features.cols());
    for (std::size_t k = 0; k < sol.beta.size(); ++k)
        if (sol.beta[k] != 0.0) {
            model.support_inputs.append_row(features.row(k));
            model.beta.push_back(sol.beta[k]);
            model.support_indices.push_back(k);
        }
    model.n_sv = count_sv(model, settings.sv_threshold);
    return model;
}

} // namespace detail

/// Trains an epsilon-SVR on a precomputed kernel matrix of the training rows.
inline SvrModel train_svr_with_gram(Matrix gram, const Matrix& features, std::span<const double> targets,
                                    const SvrParams& params, const SolverSettings& settings = {})
{
    detail::check_training_inputs(features, targets, params, settings);
    detail::require(gram.rows() == features.rows() && gram.cols() == features.rows(),
                    "train_svr_with_gram: kernel matrix shape does not match training set");
    detail::DenseGram dense(std::move(gram));
    auto sol = detail::solve_dual(dense, targets, params.c, params.epsilon, settings);
    return detail::assemble_model(features, params, settings, std::move(sol));
}

/// Trains an epsilon-SVR. Deterministic: identical inputs give bit-identical
/// models.
inline SvrModel train_svr(const Matrix& features, std::span<const double> targets, const SvrParams& params,
                          const SolverSettings& settings = {})
{
    detail::check_training_inputs(features, targets, params, settings);
    if (features.rows() <= settings.dense_gram_limit)
        return train_svr_with_gram(gram_matrix(params.kernel, features), features, targets, params, settings);
    detail::LazyGram lazy(features, params.kernel);
    auto sol = detail::solve_dual(lazy, targets, params.c, params.epsilon, settings);
    return detail::assemble_model(features, params, settings, std::move(sol));
}

/// Worst violation of each KKT complementarity condition on the training
/// set, using residuals r_i = y_i - f(x_i):
///   beta_i = +C      needs r_i >= eps
///   beta_i = -C      needs r_i <= -eps
///   0 < beta_i < C   needs r_i = eps   (and r_i = -eps for -C < beta_i < 0)
///   beta_i = 0       needs |r_i| <= eps
struct KktReport {
    double upper_bound = 0.0;
    double lower_bound = 0.0;
    double free = 0.0;
    double zero = 0.0;

    double worst() const { return std::max({upper_bound, lower_bound, free, zero}); }
};

inline KktReport check_kkt(const SvrModel& model, const Matrix& features, std::span<const double> targets)
{
    const auto beta = full_beta(model, features.rows());
    const double c = model.params.c, eps = model.params.epsilon;
    KktReport rep;
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const double r = targets[i] - predict(model, features.row(i));
        const double b = beta[i];
        if (b >= c)
            rep.upper_bound = std::max(rep.upper_bound, eps - r);
        else if (b <= -c)
            rep.lower_bound = std::max(rep.lower_bound, r + eps);
        else if (b > 0.0)
            rep.free = std::max(rep.free, std::abs(r - eps));
        else if (b < 0.0)
            rep.free = std::max(rep.free, std::abs(r + eps));
        else
            rep.zero = std::max(rep.zero, std::abs(r) - eps);
    }
    return rep;
}

// --- serialization -------------------------------------------------------------

inline void to_json(nlohmann::json& j, const KernelSpec& k)
{
    j = {{"kind", to_string(k.kind)}, {"gamma", k.gamma}, {"degree", k.degree}, {"shift", k.shift}};
}

inline void from_json(const nlohmann::json& j, KernelSpec& k)
{
    k.kind = kernel_kind_from_string(j.at("kind").get<std::string>());
    k.gamma = j.value("gamma", 0.0);
    k.degree = j.value("degree", 3);
    k.shift = j.value("shift", 0.0);
}

inline void to_json(nlohmann::json& j, const SvrParams& p)
{
    j = {{"c", p.c}, {"epsilon", p.epsilon}, {"kernel", p.kernel}};
}

inline void from_json(const nlohmann::json& j, SvrParams& p)
{
    p.c = j.at("c").get<double>();
    p.epsilon = j.at("epsilon").get<double>();
    p.kernel = j.at("kernel").get<KernelSpec>();
}

inline void to_json(nlohmann::json& j, const SvrModel& m)
{
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.support_inputs.rows(); ++i) {
        const auto r = m.support_inputs.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    j = {{"params", m.params},
         {"dims", m.dims},
         {"support_inputs", rows},
         {"support_indices", m.support_indices},
         {"beta", m.beta},
         {"bias", m.bias},
         {"n_sv", m.n_sv},
         {"diagnostics",
          {{"iterations", m.diagnostics.iterations},
           {"max_kkt_violation", m.diagnostics.max_kkt_violation},
           {"converged", m.diagnostics.converged}}}};
}

inline void from_json(const nlohmann::json& j, SvrModel& m)
{
    m.params = j.at("params").get<SvrParams>();
    m.dims = j.at("dims").get<std::size_t>();
    m.beta = j.at("beta").get<std::vector<double>>();
    m.support_indices = j.at("support_indices").get<std::vector<std::size_t>>();
    m.bias = j.at("bias").get<double>();
    m.n_sv = j.at("n_sv").get<std::size_t>();
    const auto& d = j.at("diagnostics");
    m.diagnostics = {d.at("iterations").get<std::size_t>(), d.at("max_kkt_violation").get<double>(),
                     d.at("converged").get<bool>()};
    m.support_inputs = Matrix(0, m.dims);
    for (const auto& r : j.at("support_inputs"))
        m.support_inputs.append_row(r.get<std::vector<double>>());
    if (m.support_inputs.rows() != m.beta.size() || m.support_indices.size() != m.beta.size())
        throw DataError("model JSON: support_inputs, support_indices and beta lengths differ");
}

} // namespace desvr

#endif
