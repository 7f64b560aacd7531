#include "mongemmd/optim.hpp"

#include "mongemmd/binary_io.hpp"
#include "mongemmd/error.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace mongemmd {

void AdamHyper::validate() const
{
    if (!(lr > 0.0) || !std::isfinite(lr))
        throw InputError("adam: lr (learning rate) must be positive");
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw InputError("adam: eps must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0))
        throw InputError("adam: beta1 must lie in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0))
        throw InputError("adam: beta2 must lie in [0, 1)");
}

AdamState adam_init(const MlpParams& params, const AdamHyper& hyper)
{
    hyper.validate();
    AdamState s;
    s.hyper = hyper;
    s.first_moment = ParamGrads::zeros_like(params);
    s.second_moment = ParamGrads::zeros_like(params);
    return s;
}

namespace {

void update_block(double* theta, double* m, double* v, const double* g, Eigen::Index n,
                  const AdamHyper& h, double bc1, double bc2)
{
    for (Eigen::Index k = 0; k < n; ++k) {
        m[k] = h.beta1 * m[k] + (1.0 - h.beta1) * g[k];
        v[k] = h.beta2 * v[k] + (1.0 - h.beta2) * g[k] * g[k];
        const double m_hat = m[k] / bc1;
        const double v_hat = v[k] / bc2;
        theta[k] -= h.lr * m_hat / (std::sqrt(v_hat) + h.eps);
    }
}

} // namespace

void adam_step(AdamState& state, MlpParams& params, const ParamGrads& grads)
{
    if (!grads.congruent_with(params) || !state.first_moment.congruent_with(params) ||
        !state.second_moment.congruent_with(params))
        throw InputError("adam_step: gradient/moment shapes do not match parameters");
    if (!grads.all_finite())
        throw NumericError("adam_step: non-finite gradient entries; step refused");

    const std::uint64_t t = state.step_count + 1;
    const double bc1 = 1.0 - std::pow(state.hyper.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(state.hyper.beta2, static_cast<double>(t));
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto& p = params.layers[l];
        auto& m = state.first_moment.layers[l];
        auto& v = state.second_moment.layers[l];
        const auto& g = grads.layers[l];
        update_block(p.weight.data(), m.weight.data(), v.weight.data(), g.weight.data(),
                     p.weight.size(), state.hyper, bc1, bc2);
        update_block(p.bias.data(), m.bias.data(), v.bias.data(), g.bias.data(), p.bias.size(),
                     state.hyper, bc1, bc2);
    }
    state.step_count = t;
}

void write_adam(std::ostream& os, const AdamState& state)
{
    io::write_f64(os, state.hyper.lr);
    io::write_f64(os, state.hyper.beta1);
    io::write_f64(os, state.hyper.beta2);
    io::write_f64(os, state.hyper.eps);
    io::write_u64(os, state.step_count);
    write_grads(os, state.first_moment);
    write_grads(os, state.second_moment);
}

AdamState read_adam(std::istream& is)
{
    AdamState s;
    s.hyper.lr = io::read_f64(is);
    s.hyper.beta1 = io::read_f64(is);
    s.hyper.beta2 = io::read_f64(is);
    s.hyper.eps = io::read_f64(is);
    s.hyper.validate();
    s.step_count = io::read_u64(is);
    s.first_moment = read_grads(is);
    s.second_moment = read_grads(is);
    return s;
}

} // namespace mongemmd
