#include "mongemmd/loss.hpp"

#include "mongemmd/error.hpp"

#include <cmath>
#include <string>

namespace mongemmd {

double CostSpec::eval(std::span<const double> x, std::span<const double> y) const
{
    if (x.size() != y.size())
        throw InputError("cost: dimension mismatch");
    return squared_distance(x, y);
}

std::vector<double> CostSpec::grad_y(std::span<const double> x, std::span<const double> y) const
{
    if (x.size() != y.size())
        throw InputError("cost: dimension mismatch");
    std::vector<double> g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        g[k] = 2.0 * (y[k] - x[k]);
    return g;
}

Penalty Penalty::from_lambda(double lambda)
{
    if (!(lambda > 0.0))
        throw InputError("penalty: lambda must be positive");
    return Penalty(std::isinf(lambda) ? 0.0 : 1.0 / lambda);
}

Penalty Penalty::from_inverse(double inv_lambda)
{
    if (!(inv_lambda >= 0.0) || !std::isfinite(inv_lambda))
        throw InputError("penalty: 1/lambda must be a finite non-negative number");
    return Penalty(inv_lambda);
}

namespace {

void check_batch(const MlpParams& params, const SampleSet& X, const SampleSet& Y)
{
    require_same_dim(X, Y, "monge_mmd_loss");
    if (X.size() < 2 || Y.size() < 2)
        throw InputError("monge_mmd_loss: batch size must be at least 2 (got " +
                         std::to_string(X.size()) + ")");
    if (params.input_dim() != X.dim())
        throw InputError("monge_mmd_loss: network dimension does not match data");
}

LossValue evaluate_terms(const SampleSet& X, const SampleSet& images, const SampleSet& Y,
                         const KernelSpec& kernel, Penalty penalty, const CostSpec& cost)
{
    double cost_sum = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i)
        cost_sum += cost.eval(X[i], images[i]);

    const MmdTerms terms = mmd2_unbiased_terms(kernel, images, Y);
    LossValue v;
    v.mean_cost = cost_sum / static_cast<double>(X.size());
    const double movable = terms.xx - 2.0 * terms.xy;
    v.objective = penalty.inverse() * v.mean_cost + movable;
    v.true_mmd2 = movable + terms.yy;
    v.yy_term = terms.yy;
    if (!std::isfinite(v.objective) || !std::isfinite(v.true_mmd2))
        throw NumericError("monge_mmd_loss: non-finite objective");
    return v;
}

} // namespace

LossValue monge_mmd_loss(const MlpParams& params, const SampleSet& X, const SampleSet& Y,
                         const KernelSpec& kernel, Penalty penalty, const CostSpec& cost)
{
    check_batch(params, X, Y);
    const SampleSet images = mlp_forward_batch(params, X);
    return evaluate_terms(X, images, Y, kernel, penalty, cost);
}

LossAndGrad monge_mmd_loss_and_grad(const MlpParams& params, const SampleSet& X,
                                    const SampleSet& Y, const KernelSpec& kernel, Penalty penalty,
                                    const CostSpec& cost)
{
    check_batch(params, X, Y);
    const SampleSet images = mlp_forward_batch(params, X);
    LossAndGrad out;
    out.value = evaluate_terms(X, images, Y, kernel, penalty, cost);

    // dObjective/dT(X_i): cost part plus the MMD point gradient.
    SampleSet upstream = mmd2_unbiased_grad_points(kernel, images, Y);
    const double cost_weight = penalty.inverse() / static_cast<double>(X.size());
    if (cost_weight != 0.0) {
        for (std::size_t i = 0; i < X.size(); ++i) {
            const auto g = cost.grad_y(X[i], images[i]);
            auto u = upstream[i];
            for (std::size_t k = 0; k < g.size(); ++k)
                u[k] += cost_weight * g[k];
        }
    }
    for (double v : upstream.data())
        if (!std::isfinite(v))
            throw NumericError("monge_mmd_loss_grad: non-finite gradient with respect to the map outputs");

    out.grads = mlp_backward(params, X, upstream);
    if (!out.grads.all_finite())
        throw NumericError("monge_mmd_loss_grad: non-finite parameter gradient");
    return out;
}

ParamGrads monge_mmd_loss_grad(const MlpParams& params, const SampleSet& X, const SampleSet& Y,
                               const KernelSpec& kernel, Penalty penalty, const CostSpec& cost)
{
    return monge_mmd_loss_and_grad(params, X, Y, kernel, penalty, cost).grads;
}

} // namespace mongemmd
