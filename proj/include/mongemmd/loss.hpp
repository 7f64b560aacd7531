#pragma once

#include "mongemmd/kernel.hpp"
#include "mongemmd/mmd.hpp"
#include "mongemmd/nn.hpp"
#include "mongemmd/sample_set.hpp"

#include <span>
#include <vector>

namespace mongemmd {

enum class CostFamily { SquaredEuclidean };

struct CostSpec {
    CostFamily family = CostFamily::SquaredEuclidean;

    double eval(std::span<const double> x, std::span<const double> y) const;
    /// d c(x, y) / d y
    std::vector<double> grad_y(std::span<const double> x, std::span<const double> y) const;
};

/// Penalty weight lambda, stored as 1/lambda so the lambda -> infinity limit
/// (pure MMD matching) is representable as inverse() == 0.
class Penalty {
public:
    static Penalty from_lambda(double lambda);
    static Penalty from_inverse(double inv_lambda);

    double inverse() const noexcept { return inv_lambda_; }

private:
    explicit Penalty(double inv) : inv_lambda_(inv) {}
    double inv_lambda_;
};

struct LossValue {
    double objective = 0.0;   // training objective: cost/lambda + MMD terms depending on T
    double true_mmd2 = 0.0;   // full unbiased MMD^2(T(X), Y), including the Y-Y term
    double mean_cost = 0.0;   // (1/M) sum_i c(X_i, T(X_i))
    double yy_term = 0.0;     // the Y-Y U-statistic term, constant in the parameters
};

struct LossAndGrad {
    LossValue value;
    ParamGrads grads;
};

/// objective = (1/(lambda M)) sum_i c(X_i, T(X_i))
///           + 1/(M(M-1)) sum_{i != j} K(T(X_i), T(X_j))
///           - 2/(M N) sum_{i,j} K(T(X_i), Y_j)
LossValue monge_mmd_loss(const MlpParams& params, const SampleSet& X, const SampleSet& Y,
                         const KernelSpec& kernel, Penalty penalty, const CostSpec& cost = {});

/// Gradient of `objective` with respect to the network parameters.
ParamGrads monge_mmd_loss_grad(const MlpParams& params, const SampleSet& X, const SampleSet& Y,
                               const KernelSpec& kernel, Penalty penalty, const CostSpec& cost = {});

/// Both of the above from a single forward pass.
LossAndGrad monge_mmd_loss_and_grad(const MlpParams& params, const SampleSet& X,
                                    const SampleSet& Y, const KernelSpec& kernel, Penalty penalty,
                                    const CostSpec& cost = {});

} // namespace mongemmd
