#include "twinrecover/density.hpp"
#include "twinrecover/metrics.hpp"
#include "twinrecover/philox.hpp"

#include <doctest.h>

#include <cmath>

using namespace twinrec;

namespace {

const Grid kGrid{-10, 10, 512};

GriddedDensity random_density(Philox4x32& rng) {
    GriddedDensity d{kGrid, std::vector<double>(kGrid.points, 0.0)};
    const int parts = 1 + static_cast<int>(rng.uniform() * 3);
    for (int k = 0; k < parts; ++k) {
        const GaussianSpec s(-4 + 8 * rng.uniform(), 0.2 + 2 * rng.uniform());
        const double w = 0.2 + rng.uniform();
        for (std::size_t i = 0; i < kGrid.points; ++i) d.values[i] += w * s.pdf(kGrid.at(i));
    }
    return d.normalized();
}

GriddedDensity gaussian(double mean, double sd) { return density_of_gaussian(GaussianSpec(mean, sd * sd), kGrid); }

GriddedDensity boxcar(const Grid& g, double lo, double hi) {
    GriddedDensity d{g, std::vector<double>(g.points, 0.0)};
    for (std::size_t i = 0; i < g.points; ++i) {
        const double x = g.at(i);
        if (x >= lo - 1e-12 && x <= hi + 1e-12) d.values[i] = 1.0;
    }
    return d;
}

}  // namespace

TEST_CASE("identity and symmetry on random pairs") {
    Philox4x32 rng(5, 5);
    for (int t = 0; t < 100; ++t) {
        const auto a = random_density(rng), b = random_density(rng);
        CHECK(l1_distance(a, a) == 0.0);
        CHECK(l2_distance(a, a) == 0.0);
        CHECK(js_divergence(a, a) == 0.0);
        CHECK(wasserstein_1d(a, a) == 0.0);
        CHECK(std::abs(l1_distance(a, b) - l1_distance(b, a)) <= 1e-12);
        CHECK(std::abs(l2_distance(a, b) - l2_distance(b, a)) <= 1e-12);
        CHECK(std::abs(js_divergence(a, b) - js_divergence(b, a)) <= 1e-12);
        CHECK(std::abs(wasserstein_1d(a, b) - wasserstein_1d(b, a)) <= 1e-12);
        CHECK(js_divergence(a, b) <= std::log(2.0));
        CHECK(js_divergence(a, b, LogBase::Two) <= 1.0);
        CHECK(js_divergence(a, b, LogBase::Two) == doctest::Approx(js_divergence(a, b) / std::log(2.0)));
        CHECK(l1_distance(a, b) >= 0);
    }
}

TEST_CASE("triangle inequalities on random triples") {
    Philox4x32 rng(6, 6);
    for (int t = 0; t < 100; ++t) {
        const auto a = random_density(rng), b = random_density(rng), c = random_density(rng);
        CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-9);
        CHECK(l2_distance(a, c) <= l2_distance(a, b) + l2_distance(b, c) + 1e-9);
        CHECK(wasserstein_1d(a, c) <= wasserstein_1d(a, b) + wasserstein_1d(b, c) + 1e-9);
    }
}

TEST_CASE("W1 translation") {
    Philox4x32 rng(8, 8);
    for (int t = 0; t < 50; ++t) {
        const double shift = -3 + 6 * rng.uniform();
        const double sd = 0.3 + rng.uniform();
        CHECK(std::abs(wasserstein_1d(gaussian(shift, sd), gaussian(0, sd)) - std::abs(shift)) <=
              2 * kGrid.step());
    }
}

TEST_CASE("closed-form values") {
    const auto far_a = gaussian(-6, 0.5), far_b = gaussian(6, 0.5);
    CHECK(l1_distance(far_a, far_b) == doctest::Approx(2.0).epsilon(0.005));
    CHECK(js_divergence(far_a, far_b) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK(js_divergence(far_a, far_b, LogBase::Two) == doctest::Approx(1.0).epsilon(1e-6));

    // Unit boxcars [0,1] and [1,2]: squared difference integrates to 2.
    const Grid g{-1, 3, 4001};
    const auto b1 = boxcar(g, 0, 1), b2 = boxcar(g, 1, 2);
    CHECK(l2_distance(b1, b2) == doctest::Approx(std::sqrt(2.0)).epsilon(2e-3));
    CHECK(wasserstein_1d(b1, b2) == doctest::Approx(1.0).epsilon(2e-3));
}

TEST_CASE("zero cells never produce NaN") {
    GriddedDensity a{kGrid, std::vector<double>(kGrid.points, 0.0)};
    GriddedDensity b = a;
    a.values[100] = 1.0;
    b.values[400] = 1.0;
    const double js = js_divergence(a, b);
    CHECK(std::isfinite(js));
    CHECK(js == doctest::Approx(std::log(2.0)));
}

TEST_CASE("mismatched grids are rejected") {
    const auto a = gaussian(0, 1);
    const auto b = density_of_gaussian(GaussianSpec(0, 1), Grid{-10, 10, 256});
    CHECK_THROWS_AS(l1_distance(a, b), GridMismatch);
    CHECK_THROWS_AS(l2_distance(a, b), GridMismatch);
    CHECK_THROWS_AS(js_divergence(a, b), GridMismatch);
    CHECK_THROWS_AS(wasserstein_1d(a, b), GridMismatch);
}

TEST_CASE("compare fills every field") {
    const auto r = compare(gaussian(0.5, 1), gaussian(0, 1));
    CHECK(r.l1 > 0);
    CHECK(r.l2 > 0);
    CHECK(r.js > 0);
    CHECK(r.wasserstein == doctest::Approx(0.5).epsilon(0.01));
    CHECK(r.grid == kGrid);
}
