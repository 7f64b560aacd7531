#include "mongemmd/eval.hpp"

#include "mongemmd/error.hpp"
#include "mongemmd/mmd.hpp"

#include <json.hpp>

#include <cmath>

namespace mongemmd {

void column_stats(const SampleSet& points, Point& mean, Point& sd)
{
    const std::size_t n = points.size();
    const std::size_t d = points.dim();
    mean.assign(d, 0.0);
    sd.assign(d, 0.0);
    if (n == 0)
        return;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k)
            mean[k] += points[i][k];
    for (std::size_t k = 0; k < d; ++k)
        mean[k] /= static_cast<double>(n);
    if (n < 2)
        return;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            const double diff = points[i][k] - mean[k];
            sd[k] += diff * diff;
        }
    for (std::size_t k = 0; k < d; ++k)
        sd[k] = std::sqrt(sd[k] / static_cast<double>(n - 1));
}

EvalReport evaluate(const MlpParams& params, const SampleSet& source_test,
                    const SampleSet& target_test, const KernelSpec& kernel, const CostSpec& cost)
{
    require_same_dim(source_test, target_test, "evaluate");
    if (params.input_dim() != source_test.dim())
        throw InputError("evaluate: network dimension " + std::to_string(params.input_dim()) +
                         " does not match data dimension " + std::to_string(source_test.dim()));
    const SampleSet images = mlp_forward_batch(params, source_test);

    EvalReport r;
    r.n = source_test.size();
    column_stats(images, r.mean, r.sd);
    for (std::size_t k = 0; k < r.mean.size(); ++k) {
        r.pooled_mean += r.mean[k];
        r.pooled_sd += r.sd[k];
    }
    r.pooled_mean /= static_cast<double>(r.mean.size());
    r.pooled_sd /= static_cast<double>(r.sd.size());

    double total = 0.0;
    for (std::size_t i = 0; i < images.size(); ++i)
        total += cost.eval(source_test[i], images[i]);
    r.transport_cost = total / static_cast<double>(images.size());
    r.mmd2 = (images.size() >= 2 && target_test.size() >= 2)
                 ? mmd2_unbiased(kernel, images, target_test)
                 : std::nan("");
    return r;
}

std::string report_to_json(const EvalReport& report)
{
    nlohmann::ordered_json j;
    j["mean"] = report.mean;
    j["sd"] = report.sd;
    j["transport_cost"] = report.transport_cost;
    j["mmd2"] = report.mmd2;
    j["n"] = report.n;
    j["pooled_mean"] = report.pooled_mean;
    j["pooled_sd"] = report.pooled_sd;
    return j.dump(2) + "\n";
}

TranslationMap::TranslationMap(std::span<const double> m0, std::span<const double> m1)
{
    if (m0.size() != m1.size() || m0.empty())
        throw InputError("gaussian_optimal_map: mean dimensions differ");
    offset_.resize(m0.size());
    for (std::size_t k = 0; k < m0.size(); ++k)
        offset_[k] = m1[k] - m0[k];
}

Point TranslationMap::operator()(std::span<const double> x) const
{
    if (x.size() != offset_.size())
        throw InputError("TranslationMap: dimension mismatch");
    Point y(x.begin(), x.end());
    for (std::size_t k = 0; k < y.size(); ++k)
        y[k] += offset_[k];
    return y;
}

TranslationMap gaussian_optimal_map(std::span<const double> m0, std::span<const double> m1)
{
    return TranslationMap(m0, m1);
}

double map_deviation(const MlpParams& params, const TranslationMap& oracle, const SampleSet& probe)
{
    if (probe.empty())
        throw InputError("map_deviation: probe set is empty");
    if (probe.dim() != oracle.dim() || params.input_dim() != probe.dim())
        throw InputError("map_deviation: dimension mismatch");
    const SampleSet images = mlp_forward_batch(params, probe);
    double total = 0.0;
    for (std::size_t i = 0; i < probe.size(); ++i)
        total += squared_distance(images[i], oracle(probe[i]));
    return total / static_cast<double>(probe.size());
}

double w2_squared_gaussian(std::span<const double> m0, std::span<const double> m1)
{
    if (m0.size() != m1.size())
        throw InputError("w2_squared_gaussian: mean dimensions differ");
    return squared_distance(m0, m1);
}

} // namespace mongemmd
