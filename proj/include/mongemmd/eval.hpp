#pragma once

#include "mongemmd/kernel.hpp"
#include "mongemmd/loss.hpp"
#include "mongemmd/nn.hpp"
#include "mongemmd/sample_set.hpp"

#include <cstddef>
#include <span>
#include <string>

namespace mongemmd {

struct EvalReport {
    Point mean;                   // per-coordinate mean of T(x)
    Point sd;                     // per-coordinate SD of T(x), N-1 divisor
    double pooled_mean = 0.0;     // average of `mean` over coordinates
    double pooled_sd = 0.0;       // average of `sd` over coordinates
    double transport_cost = 0.0;  // (1/N) sum c(x, T(x))
    double mmd2 = 0.0;            // unbiased MMD^2(T(source), target)
    std::size_t n = 0;
};

/// Per-coordinate mean and SD (N-1 divisor; SD is 0 for a single point).
void column_stats(const SampleSet& points, Point& mean, Point& sd);

EvalReport evaluate(const MlpParams& params, const SampleSet& source_test,
                    const SampleSet& target_test, const KernelSpec& kernel,
                    const CostSpec& cost = {});

/// JSON object with keys mean, sd, transport_cost, mmd2, n (plus pooled_mean, pooled_sd).
std::string report_to_json(const EvalReport& report);

/// Optimal map between N(m0, s^2 I) and N(m1, s^2 I): the translation x -> x + (m1 - m0).
class TranslationMap {
public:
    TranslationMap(std::span<const double> m0, std::span<const double> m1);

    Point operator()(std::span<const double> x) const;
    const Point& offset() const noexcept { return offset_; }
    std::size_t dim() const noexcept { return offset_.size(); }

    /// The same map as network parameters (one Identity layer).
    MlpParams as_params() const { return MlpParams::translation(offset_); }

private:
    Point offset_;
};

TranslationMap gaussian_optimal_map(std::span<const double> m0, std::span<const double> m1);

/// (1/N) sum_i |T(x_i) - T*(x_i)|^2 over the probe points.
double map_deviation(const MlpParams& params, const TranslationMap& oracle, const SampleSet& probe);

/// W2^2 between equal isotropic Gaussians: |m0 - m1|^2.
double w2_squared_gaussian(std::span<const double> m0, std::span<const double> m1);

} // namespace mongemmd
