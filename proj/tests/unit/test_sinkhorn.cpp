#include "mongemmd/error.hpp"
#include "mongemmd/sinkhorn.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace mongemmd;

namespace {

Eigen::MatrixXd swap_cost()
{
    Eigen::MatrixXd c(2, 2);
    c << 0, 1, 1, 0;
    return c;
}

SinkhornOptions opts(double eps, double tol = 1e-10, std::size_t iters = 100000)
{
    SinkhornOptions o;
    o.epsilon = eps;
    o.tol = tol;
    o.max_iters = iters;
    return o;
}

double max_marginal_violation(const Coupling& c)
{
    return std::max((c.plan.rowwise().sum() - c.a).cwiseAbs().maxCoeff(),
                    (c.plan.colwise().sum().transpose() - c.b).cwiseAbs().maxCoeff());
}

Eigen::VectorXd random_weights(Rng& rng, std::size_t n)
{
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < w.size(); ++i)
        w(i) = rng.uniform(0.5, 1.5);
    return w / w.sum();
}

} // namespace

TEST_CASE("high temperature gives the product coupling")
{
    const auto u = uniform_weights(2);
    const auto c = sinkhorn_solve(swap_cost(), u, u, opts(1000.0));
    CHECK(c.converged);
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j)
            CHECK(std::abs(c.plan(i, j) - 0.25) < 1e-3);

    // eps > 100x the cost range on a random instance
    Rng rng(1);
    const auto X = oracle::random_points(rng, 30, 2);
    const auto Y = oracle::random_points(rng, 40, 2);
    const auto C = squared_euclidean_cost(X, Y);
    const auto a = random_weights(rng, 30), b = random_weights(rng, 40);
    const auto p = sinkhorn_solve(C, a, b, opts(101.0 * (C.maxCoeff() - C.minCoeff())));
    CHECK((p.plan - a * b.transpose()).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("low temperature recovers the exact assignment")
{
    const auto u = uniform_weights(2);
    // Enumerate the two permutation couplings of the 2x2 problem.
    const Eigen::MatrixXd C = swap_cost();
    const double cost_id = 0.5 * (C(0, 0) + C(1, 1));
    const double cost_swap = 0.5 * (C(0, 1) + C(1, 0));
    Eigen::MatrixXd best = Eigen::MatrixXd::Zero(2, 2);
    if (cost_id <= cost_swap)
        best(0, 0) = best(1, 1) = 0.5;
    else
        best(0, 1) = best(1, 0) = 0.5;

    const auto c = sinkhorn_solve(C, u, u, opts(0.01));
    CHECK((c.plan - best).cwiseAbs().maxCoeff() < 1e-6);

    SampleSet Y = SampleSet::from_points({{3.0, 1.0}, {-2.0, 4.0}});
    const auto img = barycentric_map(c, Y);
    CHECK(std::abs(img[0][0] - 3.0) < 1e-6);
    CHECK(std::abs(img[1][1] - 4.0) < 1e-6);
}

TEST_CASE("marginals on random instances")
{
    Rng rng(2);
    for (int t = 0; t < 5; ++t) {
        const auto X = oracle::random_points(rng, 50, 2);
        const auto Y = oracle::random_points(rng, 50, 2, 0.0, 2.0);
        const auto C = squared_euclidean_cost(X, Y);
        const auto a = random_weights(rng, 50), b = random_weights(rng, 50);
        const auto c = sinkhorn_solve(C, a, b, opts(0.1 * median_entry(C)));
        CHECK(c.converged);
        CHECK(max_marginal_violation(c) < 1e-8);
        CHECK(c.marginal_error == doctest::Approx(max_marginal_violation(c)).epsilon(1e-6).scale(1e-15));
        CHECK(c.plan.minCoeff() >= 0.0);
    }

    const auto X = oracle::gaussian_points(rng, 500, {0.0, 0.0}, 1.0);
    const auto Y = oracle::gaussian_points(rng, 500, {5.0, 5.0}, 1.0);
    const auto C = squared_euclidean_cost(X, Y);
    const auto u = uniform_weights(500);
    const auto c = sinkhorn_solve(C, u, u, opts(0.1 * median_entry(C)));
    CHECK(c.converged);
    CHECK(max_marginal_violation(c) < 1e-8);
}

TEST_CASE("transposing the problem transposes the plan exactly")
{
    Rng rng(3);
    const auto X = oracle::random_points(rng, 17, 2);
    const auto Y = oracle::random_points(rng, 23, 2, -0.5, 1.5);
    const auto C = squared_euclidean_cost(X, Y);
    const auto a = random_weights(rng, 17), b = random_weights(rng, 23);
    for (bool log_domain : {true, false}) {
        auto o = opts(0.05);
        o.log_domain = log_domain;
        const auto p = sinkhorn_solve(C, a, b, o);
        const auto q = sinkhorn_solve(C.transpose(), b, a, o);
        CHECK(p.plan.transpose() == q.plan);
        CHECK(p.iterations == q.iterations);
    }
}

TEST_CASE("plain domain agrees with log domain and falls back on underflow")
{
    Rng rng(4);
    const auto X = oracle::random_points(rng, 20, 2);
    const auto Y = oracle::random_points(rng, 20, 2);
    const auto C = squared_euclidean_cost(X, Y);
    const auto u = uniform_weights(20);
    auto plain = opts(0.2);
    plain.log_domain = false;
    const auto p = sinkhorn_solve(C, u, u, plain);
    const auto l = sinkhorn_solve(C, u, u, opts(0.2));
    CHECK_FALSE(p.used_log_domain);
    CHECK(l.used_log_domain);
    CHECK((p.plan - l.plan).cwiseAbs().maxCoeff() < 1e-9);

    const Eigen::MatrixXd far = C.array() + 1000.0;
    auto tiny = opts(0.5);
    tiny.log_domain = false;
    const auto f = sinkhorn_solve(far, u, u, tiny);
    CHECK(f.used_log_domain);
    CHECK(max_marginal_violation(f) < 1e-8);
}

TEST_CASE("barycentric projection")
{
    const auto Y = SampleSet::from_points({{1.0, 2.0}, {3.0, -1.0}, {0.5, 0.5}});
    Coupling perm;
    perm.plan = Eigen::MatrixXd::Zero(3, 3);
    perm.plan(0, 2) = perm.plan(1, 0) = perm.plan(2, 1) = 1.0 / 3;
    const auto img = barycentric_map(perm, Y);
    CHECK(img[0][0] == 0.5);
    CHECK(img[1][1] == 2.0);
    CHECK(img[2][0] == 3.0);

    Coupling prod;
    Eigen::VectorXd a(2), b(3);
    a << 0.25, 0.75;
    b << 0.5, 0.2, 0.3;
    prod.plan = a * b.transpose();
    const auto pi = barycentric_map(prod, Y);
    const double wmean0 = 0.5 * 1.0 + 0.2 * 3.0 + 0.3 * 0.5;
    CHECK(pi[0][0] == doctest::Approx(wmean0).epsilon(1e-14));
    CHECK(pi[1][0] == doctest::Approx(wmean0).epsilon(1e-14));

    Coupling dead;
    dead.plan = Eigen::MatrixXd::Zero(2, 3);
    dead.plan(0, 0) = 1.0;
    CHECK_THROWS_AS(barycentric_map(dead, Y), NumericError);
    CHECK_THROWS_AS(barycentric_map(prod, SampleSet::from_points({{1.0}, {2.0}})), InputError);
}

TEST_CASE("weight and option validation")
{
    const auto C = swap_cost();
    Eigen::VectorXd bad(2);
    bad << 0.7, 0.7;
    const auto u = uniform_weights(2);
    CHECK_THROWS_AS(sinkhorn_solve(C, bad, u, opts(1.0)), InputError);
    bad << 1.5, -0.5;
    CHECK_THROWS_AS(sinkhorn_solve(C, u, bad, opts(1.0)), InputError);
    CHECK_THROWS_AS(sinkhorn_solve(C, uniform_weights(3), u, opts(1.0)), InputError);
    CHECK_THROWS_AS(sinkhorn_solve(C, u, u, opts(0.0)), InputError);
    CHECK_THROWS_AS(sinkhorn_solve(C, u, u, opts(1.0, -1.0)), InputError);
}

TEST_CASE("median and cost helpers")
{
    Eigen::MatrixXd m(2, 2);
    m << 4, 1, 3, 2;
    CHECK(median_entry(m) == 2.5);
    const auto X = SampleSet::from_points({{0.0, 0.0}});
    const auto Y = SampleSet::from_points({{3.0, 4.0}, {1.0, 0.0}});
    const auto C = squared_euclidean_cost(X, Y);
    CHECK(C(0, 0) == 25.0);
    CHECK(C(0, 1) == 1.0);
}

TEST_CASE("comparison harness: determinism, csv layout, size cap")
{
    CompareConfig c;
    c.sizes = {60};
    c.train.epochs = 3;
    c.train.batch_size = 20;
    c.train.shape.widths = {2, 8, 2};
    const auto a = compare_runs(c);
    const auto b = compare_runs(c);
    REQUIRE(a.size() == 2);
    CHECK(compare_to_csv(a, false) == compare_to_csv(b, false));
    const auto csv = compare_to_csv(a, false);
    CHECK(csv.rfind("method,data_size,epsilon,mean0,mean1,sd0,sd1,runtime_seconds\n", 0) == 0);
    CHECK(csv.find("\nsinkhorn,60,") != std::string::npos);
    CHECK(csv.find("\nmmd,60,,") != std::string::npos);
    CHECK(a[0].method == "sinkhorn");
    CHECK(std::isnan(a[1].epsilon));

    c.sizes = {6000};
    try {
        c.validate();
        FAIL("expected a size-cap error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("GiB") != std::string::npos);
    }
}
