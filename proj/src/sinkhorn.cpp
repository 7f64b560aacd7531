#include "mongemmd/sinkhorn.hpp"

#include "mongemmd/binary_io.hpp"
#include "mongemmd/data.hpp"
#include "mongemmd/error.hpp"
#include "mongemmd/eval.hpp"
#include "mongemmd/kernel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace mongemmd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_weights(const Eigen::VectorXd& w, Eigen::Index expected, const char* name)
{
    if (w.size() != expected)
        throw InputError(std::string("sinkhorn: ") + name + " has the wrong length");
    double total = 0.0;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        if (!(w(k) >= 0.0) || !std::isfinite(w(k)))
            throw InputError(std::string("sinkhorn: ") + name + " must be non-negative");
        total += w(k);
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InputError(std::string("sinkhorn: ") + name + " must sum to 1");
}

// Running log-sum-exp over a sequence visited in a fixed order.
class LogSumExp {
public:
    void add(double v)
    {
        if (v == kNegInf)
            return;
        if (v <= max_) {
            sum_ += std::exp(v - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - v) + 1.0;
            max_ = v;
        }
    }
    double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

double safe_log(double w) { return w > 0.0 ? std::log(w) : kNegInf; }

// Relative marginal gap a * (exp(delta) - 1); zero-weight entries never count.
double marginal_gap(double weight, double delta)
{
    if (weight == 0.0)
        return 0.0;
    return std::abs(weight * std::expm1(delta));
}

struct LogResult {
    Eigen::VectorXd f;
    Eigen::VectorXd g;
    std::size_t iterations = 0;
    bool converged = false;
};

LogResult solve_log(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    const SinkhornOptions& opts)
{
    const Eigen::Index m = cost.rows();
    const Eigen::Index n = cost.cols();
    const double eps = opts.epsilon;
    LogResult r;
    r.f = Eigen::VectorXd::Zero(m);
    r.g = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd f_new(m);
    Eigen::VectorXd g_new(n);

    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        for (Eigen::Index i = 0; i < m; ++i) {
            LogSumExp lse;
            for (Eigen::Index j = 0; j < n; ++j)
                lse.add((r.g(j) - cost(i, j)) / eps);
            f_new(i) = eps * (safe_log(a(i)) - lse.value());
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            LogSumExp lse;
            for (Eigen::Index i = 0; i < m; ++i)
                lse.add((r.f(i) - cost(i, j)) / eps);
            g_new(j) = eps * (safe_log(b(j)) - lse.value());
        }
        // Row i of the current plan sums to a_i exp((f_i - f_new_i) / eps).
        double err = 0.0;
        for (Eigen::Index i = 0; i < m; ++i)
            if (a(i) > 0.0)
                err = std::max(err, marginal_gap(a(i), (r.f(i) - f_new(i)) / eps));
        for (Eigen::Index j = 0; j < n; ++j)
            if (b(j) > 0.0)
                err = std::max(err, marginal_gap(b(j), (r.g(j) - g_new(j)) / eps));
        r.iterations = it;
        if (!std::isfinite(err))
            throw NumericError("sinkhorn: log-domain iteration diverged; try a larger epsilon");
        if (err < opts.tol) {
            r.converged = true;
            return r;
        }
        for (Eigen::Index i = 0; i < m; ++i)
            r.f(i) = a(i) > 0.0 ? 0.5 * (r.f(i) + f_new(i)) : kNegInf;
        for (Eigen::Index j = 0; j < n; ++j)
            r.g(j) = b(j) > 0.0 ? 0.5 * (r.g(j) + g_new(j)) : kNegInf;
        r.iterations = it + 1;
    }
    return r;
}

// Plain-domain scaling with geometric averaging; returns false on underflow.
bool solve_plain(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                 const SinkhornOptions& opts, Eigen::MatrixXd& plan, std::size_t& iterations,
                 bool& converged)
{
    const Eigen::Index m = cost.rows();
    const Eigen::Index n = cost.cols();
    Eigen::MatrixXd gibbs(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            gibbs(i, j) = std::exp(-cost(i, j) / opts.epsilon);

    Eigen::VectorXd u = Eigen::VectorXd::Ones(m);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd kv(m);
    Eigen::VectorXd ktu(n);
    converged = false;
    iterations = 0;
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        for (Eigen::Index i = 0; i < m; ++i) {
            double acc = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
                acc += gibbs(i, j) * v(j);
            kv(i) = acc;
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < m; ++i)
                acc += gibbs(i, j) * u(i);
            ktu(j) = acc;
        }
        double err = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (a(i) > 0.0 && !(kv(i) > 0.0 && std::isfinite(kv(i))))
                return false;
            err = std::max(err, std::abs(u(i) * kv(i) - a(i)));
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (b(j) > 0.0 && !(ktu(j) > 0.0 && std::isfinite(ktu(j))))
                return false;
            err = std::max(err, std::abs(v(j) * ktu(j) - b(j)));
        }
        iterations = it;
        if (!std::isfinite(err))
            return false;
        if (err < opts.tol) {
            converged = true;
            break;
        }
        for (Eigen::Index i = 0; i < m; ++i)
            u(i) = a(i) > 0.0 ? std::sqrt(u(i) * (a(i) / kv(i))) : 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            v(j) = b(j) > 0.0 ? std::sqrt(v(j) * (b(j) / ktu(j))) : 0.0;
        if (!u.allFinite() || !v.allFinite())
            return false;
        iterations = it + 1;
    }
    plan.resize(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            plan(i, j) = (u(i) * v(j)) * gibbs(i, j);
    return plan.allFinite();
}

double plan_marginal_error(const Eigen::MatrixXd& plan, const Eigen::VectorXd& a,
                           const Eigen::VectorXd& b)
{
    double err = 0.0;
    for (Eigen::Index i = 0; i < plan.rows(); ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < plan.cols(); ++j)
            acc += plan(i, j);
        err = std::max(err, std::abs(acc - a(i)));
    }
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < plan.rows(); ++i)
            acc += plan(i, j);
        err = std::max(err, std::abs(acc - b(j)));
    }
    return err;
}

} // namespace

Coupling sinkhorn_solve(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b, const SinkhornOptions& opts)
{
    if (cost.rows() == 0 || cost.cols() == 0)
        throw InputError("sinkhorn: empty cost matrix");
    if (!cost.allFinite())
        throw InputError("sinkhorn: cost matrix has non-finite entries");
    if (!(opts.epsilon > 0.0) || !std::isfinite(opts.epsilon))
        throw InputError("sinkhorn: epsilon must be positive");
    if (!(opts.tol > 0.0))
        throw InputError("sinkhorn: tol must be positive");
    check_weights(a, cost.rows(), "a");
    check_weights(b, cost.cols(), "b");

    Coupling c;
    c.a = a;
    c.b = b;
    bool done = false;
    if (!opts.log_domain) {
        done = solve_plain(cost, a, b, opts, c.plan, c.iterations, c.converged);
        c.used_log_domain = false;
    }
    if (!done) {
        const LogResult r = solve_log(cost, a, b, opts);
        c.plan.resize(cost.rows(), cost.cols());
        for (Eigen::Index i = 0; i < cost.rows(); ++i)
            for (Eigen::Index j = 0; j < cost.cols(); ++j)
                c.plan(i, j) = std::exp((r.f(i) + r.g(j) - cost(i, j)) / opts.epsilon);
        c.iterations = r.iterations;
        c.converged = r.converged;
        c.used_log_domain = true;
        if (!c.plan.allFinite())
            throw NumericError("sinkhorn: non-finite coupling; try a larger epsilon");
    }
    c.marginal_error = plan_marginal_error(c.plan, a, b);
    return c;
}

Eigen::MatrixXd squared_euclidean_cost(const SampleSet& X, const SampleSet& Y)
{
    require_same_dim(X, Y, "squared_euclidean_cost");
    Eigen::MatrixXd c(X.size(), Y.size());
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = 0; j < Y.size(); ++j)
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = squared_distance(X[i], Y[j]);
    return c;
}

double median_entry(const Eigen::MatrixXd& m)
{
    if (m.size() == 0)
        throw InputError("median_entry: empty matrix");
    std::vector<double> v(m.data(), m.data() + m.size());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1)
        return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

Eigen::VectorXd uniform_weights(std::size_t n)
{
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

SampleSet barycentric_map(const Coupling& coupling, const SampleSet& Y)
{
    const Eigen::MatrixXd& p = coupling.plan;
    if (static_cast<std::size_t>(p.cols()) != Y.size() || Y.empty())
        throw InputError("barycentric_map: coupling columns must index the target points");
    const std::size_t d = Y.dim();
    SampleSet out(static_cast<std::size_t>(p.rows()), d);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        double mass = 0.0;
        auto dst = out[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            const double w = p(i, j);
            mass += w;
            const auto y = Y[static_cast<std::size_t>(j)];
            for (std::size_t k = 0; k < d; ++k)
                dst[k] += w * y[k];
        }
        if (!(mass > 0.0))
            throw NumericError("barycentric_map: source point " + std::to_string(i) +
                               " carries no mass");
        for (std::size_t k = 0; k < d; ++k)
            dst[k] /= mass;
    }
    return out;
}

void CompareConfig::validate() const
{
    if (sizes.empty())
        throw InputError("compare.sizes: at least one data size is required");
    for (std::size_t n : sizes) {
        if (n < 2)
            throw InputError("compare.sizes: every size must be >= 2");
        if (n > max_size) {
            const double gib = 2.0 * static_cast<double>(n) * static_cast<double>(n) * 8.0 /
                               (1024.0 * 1024.0 * 1024.0);
            throw InputError("compare.sizes: size " + std::to_string(n) + " exceeds max_size " +
                             std::to_string(max_size) + " (cost matrix and coupling would need about " +
                             io::format_double(std::round(gib * 100.0) / 100.0) + " GiB)");
        }
    }
    if (source_mean.size() != target_mean.size() || source_mean.empty())
        throw InputError("compare: source_mean and target_mean must have the same dimension");
    if (!(variance > 0.0))
        throw InputError("compare.variance must be positive");
    if (epsilon <= 0.0 && !(epsilon_scale > 0.0))
        throw InputError("compare.epsilon_scale must be positive when epsilon is not set");
    if (!(tol > 0.0))
        throw InputError("compare.tol must be positive");
    if (include_mmd)
        train.validate();
}

std::vector<CompareRow> compare_runs(const CompareConfig& config)
{
    config.validate();
    using Clock = std::chrono::steady_clock;
    std::vector<CompareRow> rows;
    for (std::size_t n : config.sizes) {
        DatasetSpec src_spec;
        src_spec.family = DatasetFamily::IsotropicGaussian;
        src_spec.n = n;
        src_spec.mean = config.source_mean;
        src_spec.variance = config.variance;
        src_spec.seed = config.source_seed;
        DatasetSpec tgt_spec = src_spec;
        tgt_spec.mean = config.target_mean;
        tgt_spec.seed = config.target_seed;
        const SampleSet source = generate(src_spec);
        const SampleSet target = generate(tgt_spec);

        {
            const auto t0 = Clock::now();
            const Eigen::MatrixXd cost = squared_euclidean_cost(source, target);
            SinkhornOptions opts;
            opts.epsilon = config.epsilon > 0.0 ? config.epsilon : config.epsilon_scale * median_entry(cost);
            opts.max_iters = config.max_iters;
            opts.tol = config.tol;
            opts.log_domain = config.log_domain;
            const Coupling coupling = sinkhorn_solve(cost, uniform_weights(n), uniform_weights(n), opts);
            const SampleSet images = barycentric_map(coupling, target);
            CompareRow row;
            row.method = "sinkhorn";
            row.data_size = n;
            row.epsilon = opts.epsilon;
            column_stats(images, row.mean, row.sd);
            row.runtime_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            rows.push_back(std::move(row));
        }

        if (config.include_mmd) {
            const auto t0 = Clock::now();
            TrainConfig tc = config.train;
            tc.batch_size = std::min(tc.batch_size, n);
            tc.shape.widths.front() = source.dim();
            tc.shape.widths.back() = source.dim();
            const TrainResult result = train(tc, source, target);
            const SampleSet images = mlp_forward_batch(result.params, source);
            CompareRow row;
            row.method = "mmd";
            row.data_size = n;
            row.epsilon = std::nan("");
            column_stats(images, row.mean, row.sd);
            row.runtime_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string compare_to_csv(const std::vector<CompareRow>& rows, bool include_runtime)
{
    const std::size_t d = rows.empty() ? 2 : rows.front().mean.size();
    std::string out = "method,data_size,epsilon";
    for (std::size_t k = 0; k < d; ++k)
        out += ",mean" + std::to_string(k);
    for (std::size_t k = 0; k < d; ++k)
        out += ",sd" + std::to_string(k);
    out += ",runtime_seconds\n";
    for (const auto& r : rows) {
        out += r.method + ',' + std::to_string(r.data_size) + ',';
        if (!std::isnan(r.epsilon))
            out += io::format_double(r.epsilon);
        for (double v : r.mean)
            out += ',' + io::format_double(v);
        for (double v : r.sd)
            out += ',' + io::format_double(v);
        out += ',' + (include_runtime ? io::format_double(r.runtime_seconds) : std::string("0"));
        out += '\n';
    }
    return out;
}

} // namespace mongemmd
