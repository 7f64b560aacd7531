#pragma once

#include "mongemmd/kernel.hpp"
#include "mongemmd/sample_set.hpp"

#include <cstddef>
#include <span>

namespace mongemmd {

struct MmdOptions {
    // Point counts up to this cap use a fully materialised Gram matrix; larger
    // inputs are processed in row blocks. Both paths sum in the same order.
    std::size_t materialize_cap = 16384;
};

/// The three kernel averages making up an MMD^2 estimate.
struct MmdTerms {
    double xx = 0.0;   // mean of K(X_i, X_j)
    double xy = 0.0;   // mean of K(X_i, Y_j)
    double yy = 0.0;   // mean of K(Y_i, Y_j)

    double value() const { return xx - 2.0 * xy + yy; }
};

/// Sum of K(X_i, X_j) over i != j, accumulated row by row in index order.
double kernel_sum_offdiag(const KernelSpec& spec, const SampleSet& X, const MmdOptions& opts = {});

/// Sum of K(X_i, Y_j) over all i, j. The result is bitwise symmetric in X and Y.
double kernel_sum_cross(const KernelSpec& spec, const SampleSet& X, const SampleSet& Y,
                        const MmdOptions& opts = {});

/// U-statistic terms: xx and yy exclude the diagonal. Requires |X|, |Y| >= 2.
MmdTerms mmd2_unbiased_terms(const KernelSpec& spec, const SampleSet& X, const SampleSet& Y,
                             const MmdOptions& opts = {});

/// Unbiased MMD^2 estimate, divisors M(M-1), MN, N(N-1). Can be negative; never clamped.
double mmd2_unbiased(const KernelSpec& spec, const SampleSet& X, const SampleSet& Y,
                     const MmdOptions& opts = {});

/// V-statistic (all pairs, divisors M^2, MN, N^2): squared RKHS distance between the
/// empirical mean embeddings. Non-negative up to rounding.
double mmd2_biased(const KernelSpec& spec, const SampleSet& X, const SampleSet& Y,
                   const MmdOptions& opts = {});

/// Row i holds d mmd2_unbiased / d X_i with Y held fixed.
SampleSet mmd2_unbiased_grad_points(const KernelSpec& spec, const SampleSet& X,
                                    const SampleSet& Y);

/// Population MMD^2 between N(m0, s0^2 I) and N(m1, s1^2 I) under the Gaussian kernel,
/// from E exp(-alpha |Z|^2) = (1 + 2 alpha s^2)^(-d/2) exp(-alpha |mu|^2 / (1 + 2 alpha s^2))
/// for Z ~ N(mu, s^2 I). Throws UnsupportedError for other kernels.
double mmd2_population_gaussian(const KernelSpec& spec, std::span<const double> m0, double s0,
                                std::span<const double> m1, double s1);

} // namespace mongemmd
