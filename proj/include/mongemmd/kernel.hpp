#pragma once

#include "mongemmd/sample_set.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace mongemmd {

enum class KernelFamily { Gaussian, Matern };

// Half-integer smoothness orders with closed forms.
enum class MaternOrder { Half, ThreeHalves, FiveHalves };

/// Bounded, symmetric, strictly positive-definite translation-invariant kernel.
///
/// Gaussian: K(x, y) = exp(-alpha |x - y|^2).
/// Matern nu = 1/2, 3/2, 5/2 with lengthscale l, r = |x - y|:
///   exp(-r/l), (1 + sqrt3 r/l) exp(-sqrt3 r/l), (1 + sqrt5 r/l + 5r^2/(3l^2)) exp(-sqrt5 r/l).
struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    double alpha = 1.0;
    MaternOrder matern_order = MaternOrder::ThreeHalves;
    double lengthscale = 1.0;

    static KernelSpec gaussian(double alpha = 1.0);
    static KernelSpec matern(MaternOrder order, double lengthscale = 1.0);

    /// Throws InputError if a hyperparameter is not strictly positive and finite.
    void validate() const;

    /// Kernel value as a function of the squared distance |x - y|^2.
    double profile(double sq_dist) const;

    /// Scalar s with grad_x K(x, y) = s * (x - y). Throws DomainError for Matern 1/2 at r = 0.
    double grad_scale(double sq_dist) const;

    std::string describe() const;
};

std::string to_string(MaternOrder order);
MaternOrder parse_matern_order(const std::string& text);

double squared_distance(std::span<const double> x, std::span<const double> y);

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// dK(x, y)/dx.
std::vector<double> kernel_grad_x(const KernelSpec& spec, std::span<const double> x,
                                  std::span<const double> y);

/// Entry (i, j) = K(X_i, Y_j). Rows are filled in index order.
Eigen::MatrixXd kernel_gram(const KernelSpec& spec, const SampleSet& X, const SampleSet& Y);

} // namespace mongemmd
