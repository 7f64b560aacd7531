#include "mongemmd/mmd.hpp"

#include "mongemmd/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mongemmd {

namespace {

// Row sums of K(X_i, Y_j) are computed into a block buffer, then folded into the
// total in row order. A fully materialised Gram matrix is the single-block case.
template <typename RowFilter>
double blocked_sum(const KernelSpec& spec, const SampleSet& X, const SampleSet& Y,
                   const MmdOptions& opts, RowFilter skip)
{
    const std::size_t m = X.size();
    const std::size_t n = Y.size();
    const std::size_t cap = std::max<std::size_t>(opts.materialize_cap, 1);
    std::size_t block_rows = m;
    if (std::max(m, n) > cap)
        block_rows = std::max<std::size_t>(1, (cap * cap) / std::max<std::size_t>(n, 1) / 4);

    Eigen::MatrixXd block;
    double total = 0.0;
    for (std::size_t start = 0; start < m; start += block_rows) {
        const std::size_t rows = std::min(block_rows, m - start);
        block.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t j = 0; j < n; ++j)
                block(r, j) = spec.profile(squared_distance(X[start + r], Y[j]));
        for (std::size_t r = 0; r < rows; ++r) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (!skip(start + r, j))
                    row += block(r, j);
            total += row;
        }
    }
    return total;
}

void require_unbiased_sizes(const SampleSet& X, const SampleSet& Y, const char* what)
{
    require_same_dim(X, Y, what);
    if (X.size() < 2 || Y.size() < 2)
        throw InputError(std::string(what) + ": unbiased estimate needs at least 2 points per set");
}

} // namespace

double kernel_sum_offdiag(const KernelSpec& spec, const SampleSet& X, const MmdOptions& opts)
{
    return blocked_sum(spec, X, X, opts, [](std::size_t i, std::size_t j) { return i == j; });
}

double kernel_sum_cross(const KernelSpec& spec, const SampleSet& X, const SampleSet& Y,
                        const MmdOptions& opts)
{
    // Always iterate rows of the canonically smaller set so that swapping the
    // arguments reproduces the same summation order bit for bit.
    const bool swap = Y.size() < X.size() || (Y.size() == X.size() && Y.data() < X.data());
    const SampleSet& rows = swap ? Y : X;
    const SampleSet& cols = swap ? X : Y;
    return blocked_sum(spec, rows, cols, opts, [](std::size_t, std::size_t) { return false; });
}

MmdTerms mmd2_unbiased_terms(const KernelSpec& spec, const SampleSet& X, const SampleSet& Y,
                             const MmdOptions& opts)
{
    require_unbiased_sizes(X, Y, "mmd2_unbiased");
    const auto m = static_cast<double>(X.size());
    const auto n = static_cast<double>(Y.size());
    MmdTerms t;
    t.xx = kernel_sum_offdiag(spec, X, opts) / (m * (m - 1.0));
    t.xy = kernel_sum_cross(spec, X, Y, opts) / (m * n);
    t.yy = kernel_sum_offdiag(spec, Y, opts) / (n * (n - 1.0));
    return t;
}

double mmd2_unbiased(const KernelSpec& spec, const SampleSet& X, const SampleSet& Y,
                     const MmdOptions& opts)
{
    return mmd2_unbiased_terms(spec, X, Y, opts).value();
}

double mmd2_biased(const KernelSpec& spec, const SampleSet& X, const SampleSet& Y,
                   const MmdOptions& opts)
{
    require_same_dim(X, Y, "mmd2_biased");
    const auto m = static_cast<double>(X.size());
    const auto n = static_cast<double>(Y.size());
    // The diagonal contributes K(x, x); adding it separately keeps the
    // off-diagonal sums shared with the unbiased path.
    double diag_x = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i)
        diag_x += spec.profile(0.0);
    double diag_y = 0.0;
    for (std::size_t j = 0; j < Y.size(); ++j)
        diag_y += spec.profile(0.0);

    MmdTerms t;
    t.xx = (kernel_sum_offdiag(spec, X, opts) + diag_x) / (m * m);
    t.xy = kernel_sum_cross(spec, X, Y, opts) / (m * n);
    t.yy = (kernel_sum_offdiag(spec, Y, opts) + diag_y) / (n * n);
    // Identical multisets give xx == xy == yy only up to summation order, so
    // evaluate as (xx - xy) + (yy - xy) to keep the cancellation symmetric.
    return (t.xx - t.xy) + (t.yy - t.xy);
}

SampleSet mmd2_unbiased_grad_points(const KernelSpec& spec, const SampleSet& X, const SampleSet& Y)
{
    require_unbiased_sizes(X, Y, "mmd2_unbiased_grad_points");
    const std::size_t m = X.size();
    const std::size_t n = Y.size();
    const std::size_t d = X.dim();
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    // XX pairs appear twice (i,j) and (j,i); both contribute grad_x K(X_i, X_j).
    const double w_xx = 2.0 / (md * (md - 1.0));
    const double w_xy = -2.0 / (md * nd);

    SampleSet grad(m, d);
    std::vector<double> acc_xx(d);
    std::vector<double> acc_xy(d);
    for (std::size_t i = 0; i < m; ++i) {
        std::fill(acc_xx.begin(), acc_xx.end(), 0.0);
        std::fill(acc_xy.begin(), acc_xy.end(), 0.0);
        const auto xi = X[i];
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i)
                continue;
            const auto xj = X[j];
            const double s = spec.grad_scale(squared_distance(xi, xj));
            for (std::size_t k = 0; k < d; ++k)
                acc_xx[k] += s * (xi[k] - xj[k]);
        }
        for (std::size_t j = 0; j < n; ++j) {
            const auto yj = Y[j];
            const double s = spec.grad_scale(squared_distance(xi, yj));
            for (std::size_t k = 0; k < d; ++k)
                acc_xy[k] += s * (xi[k] - yj[k]);
        }
        auto gi = grad[i];
        for (std::size_t k = 0; k < d; ++k)
            gi[k] = w_xx * acc_xx[k] + w_xy * acc_xy[k];
    }
    return grad;
}

double mmd2_population_gaussian(const KernelSpec& spec, std::span<const double> m0, double s0,
                                std::span<const double> m1, double s1)
{
    if (spec.family != KernelFamily::Gaussian)
        throw UnsupportedError("mmd2_population_gaussian: only the Gaussian kernel has a closed form");
    if (m0.size() != m1.size() || m0.empty())
        throw InputError("mmd2_population_gaussian: mean dimensions differ");
    if (!(s0 > 0.0) || !(s1 > 0.0))
        throw InputError("mmd2_population_gaussian: standard deviations must be positive");

    const double d = static_cast<double>(m0.size());
    const double a = spec.alpha;
    // E exp(-a |Z|^2), Z ~ N(mu, var I)
    auto expect = [&](double sq_mean, double var) {
        const double denom = 1.0 + 2.0 * a * var;
        return std::pow(denom, -0.5 * d) * std::exp(-a * sq_mean / denom);
    };
    const double xx = expect(0.0, 2.0 * s0 * s0);
    const double yy = expect(0.0, 2.0 * s1 * s1);
    const double xy = expect(squared_distance(m0, m1), s0 * s0 + s1 * s1);
    return std::max(0.0, xx - 2.0 * xy + yy);
}

} // namespace mongemmd
