#pragma once

#include "mongemmd/nn.hpp"

#include <cstdint>
#include <iosfwd>

namespace mongemmd {

struct AdamHyper {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const;
};

struct AdamState {
    AdamHyper hyper;
    ParamGrads first_moment;
    ParamGrads second_moment;
    std::uint64_t step_count = 0;
};

AdamState adam_init(const MlpParams& params, const AdamHyper& hyper);

/// One bias-corrected Adam update:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2,
///   theta <- theta - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps).
/// Non-finite gradients raise NumericError and leave state and params untouched.
void adam_step(AdamState& state, MlpParams& params, const ParamGrads& grads);

void write_adam(std::ostream& os, const AdamState& state);
AdamState read_adam(std::istream& is);

} // namespace mongemmd
