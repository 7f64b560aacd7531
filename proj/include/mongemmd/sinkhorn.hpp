#pragma once

#include "mongemmd/sample_set.hpp"
#include "mongemmd/train.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mongemmd {

struct Coupling {
    Eigen::MatrixXd plan;   // M x N, non-negative
    Eigen::VectorXd a;      // row marginal
    Eigen::VectorXd b;      // column marginal
    std::size_t iterations = 0;
    double marginal_error = 0.0;   // max |row sum - a|, |col sum - b| at exit
    bool converged = false;
    bool used_log_domain = true;
};

struct SinkhornOptions {
    double epsilon = 0.1;
    std::size_t max_iters = 10000;
    double tol = 1e-9;
    bool log_domain = true;
};

/// Entropic optimal transport: the coupling diag(u) exp(-C/eps) diag(v) with marginals a, b.
///
/// Potentials are updated simultaneously and averaged with their previous values
/// (f <- (f + F(g))/2, g <- (g + G(f))/2), which makes the iteration invariant
/// under transposing the problem: solving (C^T, b, a) yields exactly plan^T.
/// The plain-domain variant falls back to log-domain when the Gibbs kernel underflows.
Coupling sinkhorn_solve(const Eigen::MatrixXd& cost, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b, const SinkhornOptions& opts);

Eigen::MatrixXd squared_euclidean_cost(const SampleSet& X, const SampleSet& Y);

double median_entry(const Eigen::MatrixXd& m);

Eigen::VectorXd uniform_weights(std::size_t n);

/// Image of source i = sum_j P_ij Y_j / sum_j P_ij.
SampleSet barycentric_map(const Coupling& coupling, const SampleSet& Y);

struct CompareConfig {
    std::vector<std::size_t> sizes{200, 1000, 2000};
    std::size_t max_size = 5000;
    Point source_mean{0.0, 0.0};
    Point target_mean{5.0, 5.0};
    double variance = 1.0;
    std::uint64_t source_seed = 11;
    std::uint64_t target_seed = 12;
    // Fixed epsilon, or epsilon_scale * median(cost) when epsilon <= 0.
    double epsilon = 0.0;
    double epsilon_scale = 0.1;
    std::size_t max_iters = 10000;
    double tol = 1e-9;
    bool log_domain = true;
    bool include_mmd = true;
    TrainConfig train{};

    void validate() const;
};

struct CompareRow {
    std::string method;   // "sinkhorn" or "mmd"
    std::size_t data_size = 0;
    double epsilon = 0.0;   // NaN for the MMD method
    Point mean;
    Point sd;
    double runtime_seconds = 0.0;
};

/// Runs the Sinkhorn barycentric map and (optionally) the trained MMD map on the
/// same Gaussian source/target draws for each size.
std::vector<CompareRow> compare_runs(const CompareConfig& config);

/// Header `method,data_size,epsilon,mean0,mean1,sd0,sd1,runtime_seconds`.
std::string compare_to_csv(const std::vector<CompareRow>& rows, bool include_runtime = true);

} // namespace mongemmd
