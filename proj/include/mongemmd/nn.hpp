#pragma once

#include "mongemmd/sample_set.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mongemmd {

enum class Activation { ReLU, Tanh, Identity };

std::string to_string(Activation act);
Activation parse_activation(const std::string& text);

struct Layer {
    Eigen::MatrixXd weight;   // out x in
    Eigen::VectorXd bias;     // out
    Activation activation = Activation::Identity;
};

/// Parameters of the transport map T(x) = g_L(x), where
/// g_l = act_l(W_l g_{l-1} + b_l) and g_0 = x. Input and output dimension agree.
struct MlpParams {
    std::vector<Layer> layers;

    std::size_t input_dim() const;
    std::size_t output_dim() const;
    std::size_t parameter_count() const;

    /// Shape chaining, d -> d, finite entries. Throws InputError.
    void validate() const;

    /// Single affine Identity layer x -> x + offset.
    static MlpParams translation(std::span<const double> offset);
    static MlpParams identity(std::size_t dim);

    bool operator==(const MlpParams& other) const;
};

struct LayerGrads {
    Eigen::MatrixXd weight;
    Eigen::VectorXd bias;
};

/// Same shape as the MlpParams it belongs to.
struct ParamGrads {
    std::vector<LayerGrads> layers;

    static ParamGrads zeros_like(const MlpParams& params);
    bool congruent_with(const MlpParams& params) const;
    bool all_finite() const;
    std::size_t parameter_count() const;
};

/// Layer widths (first and last equal d) plus the hidden-layer activation.
/// The output layer is always Identity so the map can reach any translation.
struct NetShape {
    std::vector<std::size_t> widths{2, 64, 2};
    Activation hidden = Activation::ReLU;

    std::vector<Activation> activations() const;
};

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero. Deterministic in seed.
MlpParams init_params(const std::vector<std::size_t>& widths,
                      const std::vector<Activation>& activations, std::uint64_t seed);
MlpParams init_params(const NetShape& shape, std::uint64_t seed);

Point mlp_forward(const MlpParams& params, std::span<const double> x);

SampleSet mlp_forward_batch(const MlpParams& params, const SampleSet& X);

/// Reverse-mode gradient of sum_i <upstream_i, T(X_i)> with respect to the parameters.
/// Per-point contributions are added in point order.
ParamGrads mlp_backward(const MlpParams& params, const SampleSet& X, const SampleSet& upstream);

// Binary layout: u32 layer count; per layer u32 rows, u32 cols, u8 activation,
// rows*cols weights (row-major), rows biases; doubles as little-endian IEEE-754.
void write_params(std::ostream& os, const MlpParams& params);
MlpParams read_params(std::istream& is);
void write_grads(std::ostream& os, const ParamGrads& grads);
ParamGrads read_grads(std::istream& is);

} // namespace mongemmd
