#include "mongemmd/error.hpp"
#include "mongemmd/mmd.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace mongemmd;

namespace {

SampleSet line(std::initializer_list<double> xs)
{
    std::vector<Point> pts;
    for (double x : xs)
        pts.push_back({x});
    return SampleSet::from_points(pts);
}

} // namespace

TEST_CASE("unbiased estimator hand examples")
{
    const auto k = KernelSpec::gaussian(1.0);
    // X = Y = {0, 1}: xx = yy = e^-1, xy = (2 + 2e^-1)/4
    CHECK(mmd2_unbiased(k, line({0, 1}), line({0, 1})) ==
          doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-12));
    CHECK(mmd2_unbiased(k, line({0, 1}), line({0, 1})) == doctest::Approx(-0.6321205588));

    const double expected =
        2 * std::exp(-1.0) - (std::exp(-25.0) + std::exp(-36.0) + std::exp(-16.0) + std::exp(-25.0)) / 2;
    CHECK(mmd2_unbiased(k, line({0, 1}), line({5, 6})) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.7357588).epsilon(1e-7));
}

TEST_CASE("unbiased estimator matches the brute-force oracle, equal and unequal sizes")
{
    Rng rng(3);
    const auto k = KernelSpec::gaussian(0.7);
    for (int t = 0; t < 20; ++t) {
        const auto X = oracle::random_points(rng, 5 + t, 2);
        const auto Y = oracle::random_points(rng, 3 + 2 * t, 2, 0.0, 2.0);
        CHECK(mmd2_unbiased(k, X, Y) == doctest::Approx(oracle::mmd2_unbiased_gauss(0.7, X, Y)).epsilon(1e-12));
    }
}

TEST_CASE("input errors")
{
    const auto k = KernelSpec::gaussian(1.0);
    CHECK_THROWS_AS(mmd2_unbiased(k, line({0}), line({0, 1})), InputError);
    CHECK_THROWS_AS(mmd2_unbiased(k, line({0, 1}), SampleSet::from_points({{0, 0}, {1, 1}})), InputError);
    CHECK_THROWS_AS(mmd2_biased(k, SampleSet{}, line({0})), InputError);
    CHECK_THROWS_AS(mmd2_unbiased_grad_points(k, line({0}), line({1, 2})), InputError);
    CHECK_THROWS_AS(mmd2_population_gaussian(KernelSpec::matern(MaternOrder::Half), Point{0}, 1, Point{1}, 1),
                    UnsupportedError);
}

TEST_CASE("unbiased estimator is strictly negative on identical multisets")
{
    Rng rng(5);
    const auto k = KernelSpec::gaussian(1.0);
    for (int t = 0; t < 50; ++t) {
        const auto X = oracle::random_points(rng, 2 + static_cast<std::size_t>(t % 9), 2);
        CHECK(mmd2_unbiased(k, X, X) < 0.0);
    }
}

TEST_CASE("materialised and streamed sums agree exactly")
{
    Rng rng(11);
    const auto k = KernelSpec::gaussian(1.0);
    const auto X = oracle::random_points(rng, 37, 2);
    const auto Y = oracle::random_points(rng, 23, 2);
    MmdOptions streamed;
    streamed.materialize_cap = 4;
    CHECK(mmd2_unbiased(k, X, Y) == mmd2_unbiased(k, X, Y, streamed));
    CHECK(mmd2_biased(k, X, Y) == mmd2_biased(k, X, Y, streamed));
}

TEST_CASE("biased estimator: axioms and hand value")
{
    const auto k = KernelSpec::gaussian(1.0);
    CHECK(mmd2_biased(k, line({0}), line({1})) == doctest::Approx(2 - 2 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(mmd2_biased(k, line({0}), line({1})) == doctest::Approx(1.2642411177));

    Rng rng(9);
    for (int t = 0; t < 200; ++t) {
        const auto X = oracle::random_points(rng, 1 + static_cast<std::size_t>(t % 13), 3);
        const auto Y = oracle::random_points(rng, 1 + static_cast<std::size_t>((t * 7) % 11), 3, -0.5, 1.5);
        CHECK(std::abs(mmd2_biased(k, X, X)) < 1e-12);
        CHECK(mmd2_biased(k, X, Y) == mmd2_biased(k, Y, X));
        CHECK(mmd2_biased(k, X, Y) >= 0.0);
    }
}

TEST_CASE("permutation invariance")
{
    Rng rng(21);
    const auto k = KernelSpec::gaussian(1.0);
    const auto X = oracle::random_points(rng, 30, 2);
    const auto Y = oracle::random_points(rng, 25, 2);
    const auto px = rng.permutation(X.size());
    const auto py = rng.permutation(Y.size());
    const auto Xs = X.select(px);
    const auto Ys = Y.select(py);
    CHECK(std::abs(mmd2_unbiased(k, X, Y) - mmd2_unbiased(k, Xs, Ys)) < 1e-12);
    CHECK(std::abs(mmd2_biased(k, X, Y) - mmd2_biased(k, Xs, Ys)) < 1e-12);
}

TEST_CASE("point gradient against finite differences")
{
    Rng rng(31);
    const std::vector<KernelSpec> specs{KernelSpec::gaussian(1.0), KernelSpec::matern(MaternOrder::ThreeHalves, 1.0)};
    for (const auto& k : specs) {
        double worst = 0.0;
        for (int t = 0; t < 50; ++t) {
            const auto X = oracle::random_points(rng, 5, 2);
            const auto Y = oracle::random_points(rng, 5, 2, -0.5, 1.5);
            const auto grad = mmd2_unbiased_grad_points(k, X, Y);
            for (std::size_t i = 0; i < X.size(); ++i)
                for (std::size_t c = 0; c < 2; ++c) {
                    auto f = [&](const std::vector<double>& flat) {
                        return mmd2_unbiased(k, SampleSet(2, flat), Y);
                    };
                    const double fd = oracle::central_diff(f, X.data(), i * 2 + c, 1e-4);
                    worst = std::max(worst, oracle::rel_err(grad[i][c], fd));
                }
        }
        CAPTURE(k.describe());
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("point gradient symmetries")
{
    const auto k = KernelSpec::gaussian(1.0);
    const auto X = line({-1, 1});
    const auto g = mmd2_unbiased_grad_points(k, X, X);
    CHECK(g[0][0] == -g[1][0]);

    // Far target: only the X-X part survives.
    Rng rng(2);
    const auto Xr = oracle::random_points(rng, 6, 2);
    const auto far = oracle::random_points(rng, 6, 2, 40.0, 41.0);
    const auto gf = mmd2_unbiased_grad_points(k, Xr, far);
    const double m = static_cast<double>(Xr.size());
    for (std::size_t i = 0; i < Xr.size(); ++i)
        for (std::size_t c = 0; c < 2; ++c) {
            double xx_only = 0.0;
            for (std::size_t j = 0; j < Xr.size(); ++j)
                if (j != i)
                    xx_only += -2.0 * (Xr[i][c] - Xr[j][c]) * oracle::gauss(1.0, Xr[i], Xr[j]);
            xx_only *= 2.0 / (m * (m - 1));
            CHECK(std::abs(gf[i][c] - xx_only) < 1e-10);
        }
}

TEST_CASE("population MMD for isotropic gaussians")
{
    const auto k = KernelSpec::gaussian(1.0);
    CHECK(mmd2_population_gaussian(k, Point{1, 2}, 0.5, Point{1, 2}, 0.5) == 0.0);
    const double closed = mmd2_population_gaussian(k, Point{0}, 1.0, Point{5}, 1.0);
    CHECK(closed == doctest::Approx(2 / std::sqrt(5.0) * (1 - std::exp(-5.0))).epsilon(1e-14));
    CHECK(closed == doctest::Approx(0.8884).epsilon(1e-4));

    // 10^6-pair Monte Carlo
    const auto mc = oracle::mmd2_monte_carlo(1.0, {0.0}, 1.0, {5.0}, 1.0, 1000000, 77);
    CHECK(std::abs(mc.mean - closed) < 3 * mc.se);

    Rng rng(4);
    for (int t = 0; t < 100; ++t) {
        const Point m0{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Point m1{rng.uniform(-2, 2), rng.uniform(-2, 2)};
        CHECK(mmd2_population_gaussian(k, m0, rng.uniform(0.1, 2), m1, rng.uniform(0.1, 2)) >= 0.0);
    }
}

TEST_CASE("unbiasedness over resamples")
{
    const auto k = KernelSpec::gaussian(1.0);
    const Point m0{0.0, 0.0}, m1{0.5, -0.25};
    const double target = mmd2_population_gaussian(k, m0, 1.0, m1, 1.2);
    Rng rng(123);
    std::vector<double> estimates;
    for (int r = 0; r < 200; ++r) {
        const auto X = oracle::gaussian_points(rng, 100, {0.0, 0.0}, 1.0);
        const auto Y = oracle::gaussian_points(rng, 100, {0.5, -0.25}, 1.2);
        estimates.push_back(mmd2_unbiased(k, X, Y));
    }
    const auto ms = oracle::mean_and_se(estimates);
    CHECK(std::abs(ms.mean - target) < 3 * ms.se);

    // Same distribution: centred on zero.
    estimates.clear();
    for (int r = 0; r < 200; ++r) {
        const auto X = oracle::gaussian_points(rng, 100, {0.0, 0.0}, 1.0);
        const auto Y = oracle::gaussian_points(rng, 100, {0.0, 0.0}, 1.0);
        estimates.push_back(mmd2_unbiased(k, X, Y));
    }
    const auto zero = oracle::mean_and_se(estimates);
    CHECK(std::abs(zero.mean) < 3 * zero.se);
}
