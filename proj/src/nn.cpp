#include "mongemmd/nn.hpp"

#include "mongemmd/binary_io.hpp"
#include "mongemmd/error.hpp"
#include "mongemmd/rng.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace mongemmd {

namespace {

constexpr std::uint32_t kMaxWidth = 1u << 20;

double activate(Activation act, double z)
{
    switch (act) {
    case Activation::ReLU:
        return z > 0.0 ? z : 0.0;
    case Activation::Tanh:
        return std::tanh(z);
    case Activation::Identity:
        return z;
    }
    return z;
}

// Derivative expressed through the pre-activation z and output a.
double activate_deriv(Activation act, double z, double a)
{
    switch (act) {
    case Activation::ReLU:
        return z > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh:
        return 1.0 - a * a;
    case Activation::Identity:
        return 1.0;
    }
    return 1.0;
}

// Pre-activations and outputs of every layer for one input point.
struct Trace {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> out;
};

void forward_point(const MlpParams& params, std::span<const double> x, Trace& trace)
{
    const std::size_t depth = params.layers.size();
    trace.pre.resize(depth);
    trace.out.resize(depth);
    std::span<const double> input = x;
    for (std::size_t l = 0; l < depth; ++l) {
        const Layer& layer = params.layers[l];
        const auto rows = static_cast<std::size_t>(layer.weight.rows());
        const auto cols = static_cast<std::size_t>(layer.weight.cols());
        auto& z = trace.pre[l];
        auto& a = trace.out[l];
        z.resize(rows);
        a.resize(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            double acc = layer.bias(static_cast<Eigen::Index>(r));
            for (std::size_t c = 0; c < cols; ++c)
                acc += layer.weight(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                       input[c];
            z[r] = acc;
            a[r] = activate(layer.activation, acc);
        }
        input = a;
    }
}

void check_input(const MlpParams& params, std::size_t dim)
{
    if (params.layers.empty())
        throw InputError("mlp: network has no layers");
    if (dim != params.input_dim())
        throw InputError("mlp: input dimension " + std::to_string(dim) + " does not match network input " +
                         std::to_string(params.input_dim()));
}

} // namespace

std::string to_string(Activation act)
{
    switch (act) {
    case Activation::ReLU:
        return "relu";
    case Activation::Tanh:
        return "tanh";
    case Activation::Identity:
        return "identity";
    }
    return "?";
}

Activation parse_activation(const std::string& text)
{
    if (text == "relu")
        return Activation::ReLU;
    if (text == "tanh")
        return Activation::Tanh;
    if (text == "identity")
        return Activation::Identity;
    throw InputError("unknown activation '" + text + "' (expected relu, tanh or identity)");
}

std::size_t MlpParams::input_dim() const
{
    return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weight.cols());
}

std::size_t MlpParams::output_dim() const
{
    return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weight.rows());
}

std::size_t MlpParams::parameter_count() const
{
    std::size_t count = 0;
    for (const auto& l : layers)
        count += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return count;
}

void MlpParams::validate() const
{
    if (layers.empty())
        throw InputError("mlp: network has no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Layer& layer = layers[l];
        if (layer.weight.rows() == 0 || layer.weight.cols() == 0)
            throw InputError("mlp: layer " + std::to_string(l) + " has zero width");
        if (layer.bias.size() != layer.weight.rows())
            throw InputError("mlp: layer " + std::to_string(l) + " bias length does not match weight rows");
        if (l > 0 && layer.weight.cols() != layers[l - 1].weight.rows())
            throw InputError("mlp: layer " + std::to_string(l) + " input width does not chain");
        if (!layer.weight.allFinite() || !layer.bias.allFinite())
            throw InputError("mlp: layer " + std::to_string(l) + " has non-finite parameters");
    }
    if (input_dim() != output_dim())
        throw InputError("mlp: transport map must be R^d -> R^d (input " + std::to_string(input_dim()) +
                         ", output " + std::to_string(output_dim()) + ")");
}

MlpParams MlpParams::translation(std::span<const double> offset)
{
    const auto d = static_cast<Eigen::Index>(offset.size());
    Layer layer;
    layer.weight = Eigen::MatrixXd::Identity(d, d);
    layer.bias = Eigen::VectorXd(d);
    for (Eigen::Index k = 0; k < d; ++k)
        layer.bias(k) = offset[static_cast<std::size_t>(k)];
    layer.activation = Activation::Identity;
    MlpParams p;
    p.layers.push_back(std::move(layer));
    return p;
}

MlpParams MlpParams::identity(std::size_t dim)
{
    const std::vector<double> zero(dim, 0.0);
    return translation(zero);
}

bool MlpParams::operator==(const MlpParams& other) const
{
    if (layers.size() != other.layers.size())
        return false;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& a = layers[l];
        const auto& b = other.layers[l];
        if (a.activation != b.activation || a.weight.rows() != b.weight.rows() ||
            a.weight.cols() != b.weight.cols() || a.bias.size() != b.bias.size())
            return false;
        if (a.weight != b.weight || a.bias != b.bias)
            return false;
    }
    return true;
}

ParamGrads ParamGrads::zeros_like(const MlpParams& params)
{
    ParamGrads g;
    g.layers.reserve(params.layers.size());
    for (const auto& l : params.layers)
        g.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                            Eigen::VectorXd::Zero(l.bias.size())});
    return g;
}

bool ParamGrads::congruent_with(const MlpParams& params) const
{
    if (layers.size() != params.layers.size())
        return false;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].weight.rows() != params.layers[l].weight.rows() ||
            layers[l].weight.cols() != params.layers[l].weight.cols() ||
            layers[l].bias.size() != params.layers[l].bias.size())
            return false;
    }
    return true;
}

bool ParamGrads::all_finite() const
{
    for (const auto& l : layers)
        if (!l.weight.allFinite() || !l.bias.allFinite())
            return false;
    return true;
}

std::size_t ParamGrads::parameter_count() const
{
    std::size_t count = 0;
    for (const auto& l : layers)
        count += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return count;
}

std::vector<Activation> NetShape::activations() const
{
    if (widths.size() < 2)
        return {};
    std::vector<Activation> acts(widths.size() - 1, hidden);
    acts.back() = Activation::Identity;
    return acts;
}

MlpParams init_params(const std::vector<std::size_t>& widths,
                      const std::vector<Activation>& activations, std::uint64_t seed)
{
    if (widths.size() < 2)
        throw InputError("init_params: shape needs at least input and output widths");
    if (activations.size() != widths.size() - 1)
        throw InputError("init_params: need one activation per layer");
    for (std::size_t w : widths)
        if (w == 0 || w > kMaxWidth)
            throw InputError("init_params: widths must be in [1, 2^20]");
    if (widths.front() != widths.back())
        throw InputError("init_params: first and last widths must both equal the data dimension");

    Rng rng = Rng(seed).split(0x1417);
    MlpParams params;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const auto fan_in = static_cast<Eigen::Index>(widths[l]);
        const auto fan_out = static_cast<Eigen::Index>(widths[l + 1]);
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Layer layer;
        layer.weight.resize(fan_out, fan_in);
        for (Eigen::Index r = 0; r < fan_out; ++r)
            for (Eigen::Index c = 0; c < fan_in; ++c)
                layer.weight(r, c) = rng.uniform(-bound, bound);
        layer.bias = Eigen::VectorXd::Zero(fan_out);
        layer.activation = activations[l];
        params.layers.push_back(std::move(layer));
    }
    return params;
}

MlpParams init_params(const NetShape& shape, std::uint64_t seed)
{
    return init_params(shape.widths, shape.activations(), seed);
}

Point mlp_forward(const MlpParams& params, std::span<const double> x)
{
    check_input(params, x.size());
    Trace trace;
    forward_point(params, x, trace);
    Point y = trace.out.back();
    for (double v : y)
        if (!std::isfinite(v))
            throw NumericError("mlp_forward: non-finite output");
    return y;
}

SampleSet mlp_forward_batch(const MlpParams& params, const SampleSet& X)
{
    if (X.empty())
        throw InputError("mlp_forward_batch: empty input set");
    check_input(params, X.dim());
    SampleSet out(X.size(), params.output_dim());
    Trace trace;
    for (std::size_t i = 0; i < X.size(); ++i) {
        forward_point(params, X[i], trace);
        auto dst = out[i];
        const auto& y = trace.out.back();
        for (std::size_t k = 0; k < y.size(); ++k) {
            if (!std::isfinite(y[k]))
                throw NumericError("mlp_forward_batch: non-finite output at point " + std::to_string(i));
            dst[k] = y[k];
        }
    }
    return out;
}

ParamGrads mlp_backward(const MlpParams& params, const SampleSet& X, const SampleSet& upstream)
{
    if (X.empty())
        throw InputError("mlp_backward: empty input set");
    check_input(params, X.dim());
    if (upstream.size() != X.size() || upstream.dim() != params.output_dim())
        throw InputError("mlp_backward: upstream must hold one output-sized vector per input point");

    ParamGrads grads = ParamGrads::zeros_like(params);
    Trace trace;
    std::vector<double> delta;
    std::vector<double> delta_prev;
    const std::size_t depth = params.layers.size();
    for (std::size_t i = 0; i < X.size(); ++i) {
        forward_point(params, X[i], trace);
        const auto up = upstream[i];
        // delta = dLoss/dz for the current layer
        {
            const Layer& last = params.layers[depth - 1];
            delta.resize(up.size());
            for (std::size_t r = 0; r < up.size(); ++r)
                delta[r] = up[r] * activate_deriv(last.activation, trace.pre[depth - 1][r],
                                                  trace.out[depth - 1][r]);
        }
        for (std::size_t l = depth; l-- > 0;) {
            const Layer& layer = params.layers[l];
            const std::span<const double> input =
                l == 0 ? X[i] : std::span<const double>(trace.out[l - 1]);
            auto& g = grads.layers[l];
            const auto rows = static_cast<Eigen::Index>(layer.weight.rows());
            const auto cols = static_cast<Eigen::Index>(layer.weight.cols());
            for (Eigen::Index r = 0; r < rows; ++r) {
                const double dr = delta[static_cast<std::size_t>(r)];
                g.bias(r) += dr;
                for (Eigen::Index c = 0; c < cols; ++c)
                    g.weight(r, c) += dr * input[static_cast<std::size_t>(c)];
            }
            if (l == 0)
                break;
            const Layer& below = params.layers[l - 1];
            delta_prev.assign(static_cast<std::size_t>(cols), 0.0);
            for (Eigen::Index c = 0; c < cols; ++c) {
                double acc = 0.0;
                for (Eigen::Index r = 0; r < rows; ++r)
                    acc += layer.weight(r, c) * delta[static_cast<std::size_t>(r)];
                const auto uc = static_cast<std::size_t>(c);
                delta_prev[uc] = acc * activate_deriv(below.activation, trace.pre[l - 1][uc],
                                                      trace.out[l - 1][uc]);
            }
            delta.swap(delta_prev);
        }
    }
    return grads;
}

namespace {

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            io::write_f64(os, m(r, c));
}

Eigen::MatrixXd read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols)
{
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = io::read_f64(is);
    return m;
}

Eigen::VectorXd read_vector(std::istream& is, Eigen::Index n)
{
    Eigen::VectorXd v(n);
    for (Eigen::Index k = 0; k < n; ++k)
        v(k) = io::read_f64(is);
    return v;
}

std::pair<Eigen::Index, Eigen::Index> read_shape(std::istream& is)
{
    const std::uint32_t rows = io::read_u32(is);
    const std::uint32_t cols = io::read_u32(is);
    if (rows == 0 || cols == 0 || rows > kMaxWidth || cols > kMaxWidth)
        throw InputError("checkpoint: implausible layer shape");
    return {static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

std::uint32_t read_layer_count(std::istream& is)
{
    const std::uint32_t count = io::read_u32(is);
    if (count == 0 || count > 1024)
        throw InputError("checkpoint: implausible layer count");
    return count;
}

} // namespace

void write_params(std::ostream& os, const MlpParams& params)
{
    io::write_u32(os, static_cast<std::uint32_t>(params.layers.size()));
    for (const auto& l : params.layers) {
        io::write_u32(os, static_cast<std::uint32_t>(l.weight.rows()));
        io::write_u32(os, static_cast<std::uint32_t>(l.weight.cols()));
        io::write_u8(os, static_cast<std::uint8_t>(l.activation));
        write_matrix(os, l.weight);
        for (Eigen::Index k = 0; k < l.bias.size(); ++k)
            io::write_f64(os, l.bias(k));
    }
}

MlpParams read_params(std::istream& is)
{
    MlpParams params;
    const std::uint32_t count = read_layer_count(is);
    for (std::uint32_t l = 0; l < count; ++l) {
        const auto [rows, cols] = read_shape(is);
        const std::uint8_t act = io::read_u8(is);
        if (act > static_cast<std::uint8_t>(Activation::Identity))
            throw InputError("checkpoint: unknown activation code");
        Layer layer;
        layer.activation = static_cast<Activation>(act);
        layer.weight = read_matrix(is, rows, cols);
        layer.bias = read_vector(is, rows);
        params.layers.push_back(std::move(layer));
    }
    params.validate();
    return params;
}

void write_grads(std::ostream& os, const ParamGrads& grads)
{
    io::write_u32(os, static_cast<std::uint32_t>(grads.layers.size()));
    for (const auto& l : grads.layers) {
        io::write_u32(os, static_cast<std::uint32_t>(l.weight.rows()));
        io::write_u32(os, static_cast<std::uint32_t>(l.weight.cols()));
        write_matrix(os, l.weight);
        for (Eigen::Index k = 0; k < l.bias.size(); ++k)
            io::write_f64(os, l.bias(k));
    }
}

ParamGrads read_grads(std::istream& is)
{
    ParamGrads grads;
    const std::uint32_t count = read_layer_count(is);
    for (std::uint32_t l = 0; l < count; ++l) {
        const auto [rows, cols] = read_shape(is);
        LayerGrads g;
        g.weight = read_matrix(is, rows, cols);
        g.bias = read_vector(is, rows);
        grads.layers.push_back(std::move(g));
    }
    return grads;
}

} // namespace mongemmd
