#include "mongemmd/error.hpp"
#include "mongemmd/nn.hpp"
#include "support/flat.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mongemmd;

namespace {

MlpParams single_layer(Eigen::MatrixXd w, Eigen::VectorXd b)
{
    MlpParams p;
    p.layers.push_back({std::move(w), std::move(b), Activation::Identity});
    return p;
}

} // namespace

TEST_CASE("init: determinism, shapes, bounds")
{
    const NetShape shape;
    const auto a = init_params(shape, 7);
    const auto b = init_params(shape, 7);
    CHECK(a == b);
    CHECK_FALSE(a == init_params(shape, 8));

    REQUIRE(a.layers.size() == 2);
    CHECK(a.layers[0].weight.rows() == 64);
    CHECK(a.layers[0].weight.cols() == 2);
    CHECK(a.layers[1].weight.rows() == 2);
    CHECK(a.layers[1].weight.cols() == 64);
    CHECK(a.layers[0].activation == Activation::ReLU);
    CHECK(a.layers[1].activation == Activation::Identity);
    CHECK(a.parameter_count() == 64 * 2 + 64 + 2 * 64 + 2);

    const double bound0 = 1.0 / std::sqrt(2.0);
    CHECK(a.layers[0].weight.cwiseAbs().maxCoeff() <= bound0);
    CHECK(a.layers[1].weight.cwiseAbs().maxCoeff() <= 1.0 / 8.0);
    CHECK(a.layers[0].bias.isZero(0.0));
    CHECK(a.layers[1].bias.isZero(0.0));
}

TEST_CASE("init: invalid shapes")
{
    CHECK_THROWS_AS(init_params({}, {}, 1), InputError);
    CHECK_THROWS_AS(init_params({2, 0, 2}, {Activation::ReLU, Activation::Identity}, 1), InputError);
    CHECK_THROWS_AS(init_params({2, 4, 3}, {Activation::ReLU, Activation::Identity}, 1), InputError);
    CHECK_THROWS_AS(init_params({2, 4, 2}, {Activation::ReLU}, 1), InputError);
}

TEST_CASE("forward: identity, translation, constant")
{
    const auto id = MlpParams::identity(2);
    CHECK(mlp_forward(id, Point{1.5, -2.0}) == Point{1.5, -2.0});

    const std::vector<double> off{5, 5};
    const auto tr = MlpParams::translation(off);
    CHECK(mlp_forward(tr, Point{1, 2}) == Point{6, 7});

    auto c = init_params({2, 8, 2}, {Activation::ReLU, Activation::Identity}, 3);
    for (auto& l : c.layers)
        l.weight.setZero();
    c.layers[1].bias << 0.25, -4.0;
    Rng rng(1);
    for (int t = 0; t < 10; ++t) {
        const Point x{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        CHECK(mlp_forward(c, x) == Point{0.25, -4.0});
    }
}

TEST_CASE("forward: errors")
{
    const auto id = MlpParams::identity(2);
    CHECK_THROWS_AS(mlp_forward(id, Point{1.0}), InputError);
    CHECK_THROWS_AS(mlp_forward_batch(id, SampleSet(0, 2)), InputError);

    auto big = single_layer(Eigen::MatrixXd::Identity(1, 1) * 1e300, Eigen::VectorXd::Zero(1));
    CHECK_THROWS_AS(mlp_forward(big, Point{1e300}), NumericError);

    auto bad = MlpParams::identity(2);
    bad.layers[0].bias(0) = std::nan("");
    CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("forward: batch equals per-point exactly")
{
    const auto p = init_params(NetShape{}, 11);
    Rng rng(2);
    const auto X = oracle::random_points(rng, 100, 2, -3.0, 3.0);
    const auto out = mlp_forward_batch(p, X);
    REQUIRE(out.size() == 100);
    REQUIRE(out.dim() == 2);
    for (std::size_t i = 0; i < X.size(); ++i) {
        const auto single = mlp_forward(p, X[i]);
        CHECK(out[i][0] == single[0]);
        CHECK(out[i][1] == single[1]);
    }

    const auto same = SampleSet::from_points({{0.3, 0.4}, {0.3, 0.4}, {0.3, 0.4}});
    const auto o3 = mlp_forward_batch(p, same);
    CHECK(o3[0][0] == o3[2][0]);
    CHECK(o3[1][1] == o3[2][1]);
}

TEST_CASE("backward: zero upstream and shape errors")
{
    const auto p = init_params({2, 16, 2}, {Activation::Tanh, Activation::Identity}, 4);
    Rng rng(3);
    const auto X = oracle::random_points(rng, 7, 2);
    const auto g = mlp_backward(p, X, SampleSet(7, 2));
    for (double v : flat::pack(g))
        CHECK(v == 0.0);
    CHECK(g.congruent_with(p));
    CHECK_THROWS_AS(mlp_backward(p, X, SampleSet(6, 2)), InputError);
    CHECK_THROWS_AS(mlp_backward(p, X, SampleSet(7, 3)), InputError);
}

TEST_CASE("backward: single linear layer outer product")
{
    Eigen::MatrixXd w(2, 2);
    w << 1, 2, 3, 4;
    const auto p = single_layer(w, Eigen::VectorXd::Zero(2));
    const auto X = SampleSet::from_points({{0.5, -1.5}});
    const auto up = SampleSet::from_points({{2.0, -3.0}});
    const auto g = mlp_backward(p, X, up);
    // d/dW sum_k c_k (W x)_k = c x^T
    CHECK(g.layers[0].weight(0, 0) == 1.0);
    CHECK(g.layers[0].weight(0, 1) == -3.0);
    CHECK(g.layers[0].weight(1, 0) == -1.5);
    CHECK(g.layers[0].weight(1, 1) == 4.5);
    CHECK(g.layers[0].bias(0) == 2.0);
    CHECK(g.layers[0].bias(1) == -3.0);
}

TEST_CASE("backward: finite differences on 20 seeds")
{
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto p = init_params({2, 16, 2}, {Activation::Tanh, Activation::Identity}, seed);
        Rng rng(100 + seed);
        for (auto& l : p.layers)
            for (Eigen::Index k = 0; k < l.bias.size(); ++k)
                l.bias(k) = rng.uniform(-0.5, 0.5);
        const auto X = oracle::random_points(rng, 5, 2);
        const auto C = oracle::random_points(rng, 5, 2);
        // L = sum_i <C_i, T(X_i)> + 0.5 |T(X_i)|^2, upstream = C_i + T(X_i)
        auto loss = [&](const std::vector<double>& theta) {
            const auto out = mlp_forward_batch(flat::unpack(p, theta), X);
            double s = 0.0;
            for (std::size_t i = 0; i < X.size(); ++i)
                for (std::size_t k = 0; k < 2; ++k)
                    s += C[i][k] * out[i][k] + 0.5 * out[i][k] * out[i][k];
            return s;
        };
        const auto T = mlp_forward_batch(p, X);
        SampleSet up(X.size(), 2);
        for (std::size_t i = 0; i < X.size(); ++i)
            for (std::size_t k = 0; k < 2; ++k)
                up[i][k] = C[i][k] + T[i][k];
        const auto g = flat::pack(mlp_backward(p, X, up));
        const auto theta = flat::pack(p);
        for (std::size_t k = 0; k < theta.size(); ++k)
            worst = std::max(worst, oracle::rel_err(g[k], oracle::central_diff(loss, theta, k, 1e-4)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("relu network gradients agree with finite differences away from kinks")
{
    auto p = init_params(NetShape{}, 9);
    Rng rng(9);
    const auto X = oracle::random_points(rng, 4, 2);
    const SampleSet up = oracle::random_points(rng, 4, 2);
    auto loss = [&](const std::vector<double>& theta) {
        const auto out = mlp_forward_batch(flat::unpack(p, theta), X);
        double s = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i)
            s += up[i][0] * out[i][0] + up[i][1] * out[i][1];
        return s;
    };
    const auto g = flat::pack(mlp_backward(p, X, up));
    const auto theta = flat::pack(p);
    double worst = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k)
        worst = std::max(worst, oracle::rel_err(g[k], oracle::central_diff(loss, theta, k, 1e-7)));
    CHECK(worst < 1e-5);
}

TEST_CASE("params and grads round-trip bit-exactly")
{
    const auto p = init_params(NetShape{{2, 32, 32, 2}, Activation::Tanh}, 5);
    std::stringstream ss;
    write_params(ss, p);
    CHECK(read_params(ss) == p);

    Rng rng(1);
    const auto X = oracle::random_points(rng, 3, 2);
    const auto g = mlp_backward(p, X, oracle::random_points(rng, 3, 2));
    std::stringstream gs;
    write_grads(gs, g);
    CHECK(flat::pack(read_grads(gs)) == flat::pack(g));

    std::string bytes;
    {
        std::stringstream s2;
        write_params(s2, p);
        bytes = s2.str();
    }
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_params(truncated), InputError);
}

TEST_CASE("activation names")
{
    CHECK(parse_activation("relu") == Activation::ReLU);
    CHECK(parse_activation("tanh") == Activation::Tanh);
    CHECK(to_string(Activation::Identity) == "identity");
    CHECK_THROWS_AS(parse_activation("sigmoid"), InputError);
}
