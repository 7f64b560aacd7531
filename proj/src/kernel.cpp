#include "mongemmd/kernel.hpp"

#include "mongemmd/error.hpp"

#include <cmath>
#include <sstream>

namespace mongemmd {

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kSqrt5 = std::sqrt(5.0);

void check_dims(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.empty())
        throw InputError("kernel: point dimensions differ (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
}

} // namespace

KernelSpec KernelSpec::gaussian(double alpha)
{
    KernelSpec k;
    k.family = KernelFamily::Gaussian;
    k.alpha = alpha;
    k.validate();
    return k;
}

KernelSpec KernelSpec::matern(MaternOrder order, double lengthscale)
{
    KernelSpec k;
    k.family = KernelFamily::Matern;
    k.matern_order = order;
    k.lengthscale = lengthscale;
    k.validate();
    return k;
}

void KernelSpec::validate() const
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw InputError("kernel: alpha must be a positive finite number");
    if (!(lengthscale > 0.0) || !std::isfinite(lengthscale))
        throw InputError("kernel: lengthscale must be a positive finite number");
}

double KernelSpec::profile(double sq_dist) const
{
    if (family == KernelFamily::Gaussian)
        return std::exp(-alpha * sq_dist);

    const double s = std::sqrt(sq_dist) / lengthscale;
    switch (matern_order) {
    case MaternOrder::Half:
        return std::exp(-s);
    case MaternOrder::ThreeHalves:
        return (1.0 + kSqrt3 * s) * std::exp(-kSqrt3 * s);
    case MaternOrder::FiveHalves:
        return (1.0 + kSqrt5 * s + (5.0 / 3.0) * s * s) * std::exp(-kSqrt5 * s);
    }
    return 0.0;
}

double KernelSpec::grad_scale(double sq_dist) const
{
    if (family == KernelFamily::Gaussian)
        return -2.0 * alpha * std::exp(-alpha * sq_dist);

    const double r = std::sqrt(sq_dist);
    const double s = r / lengthscale;
    const double inv_l2 = 1.0 / (lengthscale * lengthscale);
    switch (matern_order) {
    case MaternOrder::Half:
        if (r == 0.0)
            throw DomainError("kernel: Matern-1/2 is not differentiable at x == y");
        return -std::exp(-s) / (lengthscale * r);
    case MaternOrder::ThreeHalves:
        return -3.0 * inv_l2 * std::exp(-kSqrt3 * s);
    case MaternOrder::FiveHalves:
        return -(5.0 / 3.0) * inv_l2 * (1.0 + kSqrt5 * s) * std::exp(-kSqrt5 * s);
    }
    return 0.0;
}

std::string KernelSpec::describe() const
{
    std::ostringstream os;
    if (family == KernelFamily::Gaussian)
        os << "gaussian(alpha=" << alpha << ")";
    else
        os << "matern(order=" << to_string(matern_order) << ", lengthscale=" << lengthscale << ")";
    return os.str();
}

std::string to_string(MaternOrder order)
{
    switch (order) {
    case MaternOrder::Half:
        return "1/2";
    case MaternOrder::ThreeHalves:
        return "3/2";
    case MaternOrder::FiveHalves:
        return "5/2";
    }
    return "?";
}

MaternOrder parse_matern_order(const std::string& text)
{
    if (text == "1/2" || text == "0.5")
        return MaternOrder::Half;
    if (text == "3/2" || text == "1.5")
        return MaternOrder::ThreeHalves;
    if (text == "5/2" || text == "2.5")
        return MaternOrder::FiveHalves;
    throw InputError("kernel: unknown Matern order '" + text + "' (expected 1/2, 3/2 or 5/2)");
}

double squared_distance(std::span<const double> x, std::span<const double> y)
{
    double acc = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double diff = x[k] - y[k];
        acc += diff * diff;
    }
    return acc;
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y)
{
    check_dims(x, y);
    return spec.profile(squared_distance(x, y));
}

std::vector<double> kernel_grad_x(const KernelSpec& spec, std::span<const double> x,
                                  std::span<const double> y)
{
    check_dims(x, y);
    const double scale = spec.grad_scale(squared_distance(x, y));
    std::vector<double> g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k)
        g[k] = scale * (x[k] - y[k]);
    return g;
}

Eigen::MatrixXd kernel_gram(const KernelSpec& spec, const SampleSet& X, const SampleSet& Y)
{
    require_same_dim(X, Y, "kernel_gram");
    Eigen::MatrixXd gram(X.size(), Y.size());
    for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = 0; j < Y.size(); ++j)
            gram(i, j) = spec.profile(squared_distance(X[i], Y[j]));
    return gram;
}

} // namespace mongemmd
