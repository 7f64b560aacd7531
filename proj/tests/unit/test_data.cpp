#include "mongemmd/data.hpp"
#include "mongemmd/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace mongemmd;

TEST_CASE("gaussian moments")
{
    DatasetSpec s;
    s.n = 10000;
    s.seed = 42;
    const auto X = generate(s);
    REQUIRE(X.size() == 10000);
    REQUIRE(X.dim() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        double m = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i)
            m += X[i][k];
        m /= 10000.0;
        double v = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i)
            v += (X[i][k] - m) * (X[i][k] - m);
        const double sd = std::sqrt(v / 9999.0);
        CHECK(std::abs(m) < 0.05);
        CHECK(std::abs(sd - 1.0) < 0.05);
        // 4 standard errors
        CHECK(std::abs(m) < 4.0 / 100.0);
    }

    s.mean = {5.0, -2.0, 1.0};
    s.variance = 4.0;
    const auto Y = generate(s);
    REQUIRE(Y.dim() == 3);
    double m2 = 0.0;
    for (std::size_t i = 0; i < Y.size(); ++i)
        m2 += Y[i][1];
    CHECK(std::abs(m2 / 10000.0 + 2.0) < 4.0 * 2.0 / 100.0);
}

TEST_CASE("noiseless moons lie on their semicircles")
{
    DatasetSpec s;
    s.family = DatasetFamily::TwoMoons;
    s.noise = 0.0;
    s.n = 501;
    s.seed = 3;
    const auto X = generate(s);
    REQUIRE(X.size() == 501);
    std::size_t upper = 0, lower = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double x = X[i][0], y = X[i][1];
        const double d_upper = std::abs(std::hypot(x, y) - 1.0);
        const double d_lower = std::abs(std::hypot(x - 1.0, y - 0.5) - 1.0);
        if (d_upper < 1e-12 && y >= -1e-12) {
            ++upper;
        } else {
            CHECK(d_lower < 1e-12);
            CHECK(y <= 0.5 + 1e-12);
            ++lower;
        }
    }
    CHECK(upper == 250);
    CHECK(lower == 251);
}

TEST_CASE("noiseless circles lie on their radii")
{
    DatasetSpec s;
    s.family = DatasetFamily::TwoCircles;
    s.noise = 0.0;
    s.factor = 0.3;
    s.n = 400;
    const auto X = generate(s);
    std::size_t outer = 0, inner = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double r = std::hypot(X[i][0], X[i][1]);
        if (std::abs(r - 1.0) < 1e-12)
            ++outer;
        else if (std::abs(r - 0.3) < 1e-12)
            ++inner;
    }
    CHECK(outer == 200);
    CHECK(inner == 200);
}

TEST_CASE("determinism and distinct seeds")
{
    for (auto fam : {DatasetFamily::TwoMoons, DatasetFamily::TwoCircles, DatasetFamily::IsotropicGaussian}) {
        DatasetSpec s;
        s.family = fam;
        s.seed = 9;
        CHECK(generate(s) == generate(s));
        DatasetSpec t = s;
        t.seed = 10;
        CHECK_FALSE(generate(s) == generate(t));
    }
}

TEST_CASE("invalid specs")
{
    DatasetSpec s;
    s.n = 0;
    CHECK_THROWS_AS(generate(s), InputError);
    s = {};
    s.variance = 0.0;
    CHECK_THROWS_AS(generate(s), InputError);
    s = {};
    s.mean.clear();
    CHECK_THROWS_AS(generate(s), InputError);
    s = {};
    s.family = DatasetFamily::TwoCircles;
    s.factor = 1.0;
    CHECK_THROWS_AS(generate(s), InputError);
    s.factor = 0.5;
    s.noise = -0.1;
    CHECK_THROWS_AS(generate(s), InputError);
    CHECK_THROWS_AS(parse_dataset_family("spiral"), InputError);
    CHECK(parse_dataset_family("moons") == DatasetFamily::TwoMoons);
    CHECK(to_string(DatasetFamily::TwoCircles) == "circles");
}

TEST_CASE("csv round trip is exact")
{
    DatasetSpec s;
    s.family = DatasetFamily::TwoMoons;
    s.n = 300;
    const auto X = generate(s);
    const auto text = to_csv(X);
    CHECK(text.rfind("x0,x1\n", 0) == 0);
    CHECK(from_csv(text) == X);

    const auto tiny = SampleSet::from_points({{1e-310, -0.1}, {1.0 / 3.0, 2e300}});
    CHECK(from_csv(to_csv(tiny)) == tiny);

    const auto dir = std::filesystem::temp_directory_path() / "mongemmd_test_data";
    std::filesystem::remove_all(dir);
    write_csv(dir / "sub" / "x.csv", X);
    CHECK(read_csv(dir / "sub" / "x.csv") == X);
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(from_csv("x0,x1\n1,2\n3\n"), InputError);
    CHECK_THROWS_AS(from_csv("x0\nabc\n"), InputError);
    CHECK_THROWS_AS(from_csv("x0\ninf\n"), InputError);
    CHECK_THROWS_AS(from_csv(""), InputError);
    CHECK_THROWS_AS(read_csv("/nonexistent/dir/file.csv"), InputError);
}
