#include "gexp/penalization.hpp"

#include <doctest.h>

#include <cmath>

using namespace gexp;

TEST_CASE("martingale input: y^n = Y and A = 0")
{
    const auto tree = ScenarioTree::full(1.0, 8);
    const auto drm = DynamicRiskMeasure::entropy(0.5, tree);
    const TreeProcess zero(tree, 8, 0.0);
    for (double n : {1.0, 16.0, 4096.0}) {
        const auto s = solve_penalized(drm, zero, 0.0, n);
        CHECK(s.y.max_abs() == 0.0);
        CHECK(s.A.max_abs() == 0.0);
    }
    // Matched drift makes Y + zB an exact rho-martingale.
    for (double z : {-1.0, 0.5, 2.0}) {
        const auto Y = matched_drift(drm, z);
        const auto d = doob_meyer(drm, Y, z);
        CHECK(d.A.max_abs() < 1e-10);
        CHECK(d.max_martingale_gap < 1e-10);
        CHECK(check_supermartingale(drm, add_brownian(Y, z)).max_martingale_gap < 1e-13);
    }
}

TEST_CASE("penalized recursion by hand")
{
    const auto tree = ScenarioTree::full(1.0, 1);
    const auto drm = DynamicRiskMeasure::entropy(0.5, tree);
    const double z = 1.0;
    const auto Y = linear_drift(tree, 2.0);
    const double n = 3.0;
    const auto s = solve_penalized(drm, Y, z, n);
    const double r = entropy_step(0.5, Y.at(1, 1) + z, Y.at(1, 0) - z);
    const double expect = (r + n * 1.0 * Y.root()) / (1.0 + n);
    CHECK(std::abs(s.y.root() - expect) < 1e-15);
    CHECK(std::abs(s.A.at(1, 0) - n * (Y.root() - s.y.root())) < 1e-15);
}

TEST_CASE("monotone convergence in n")
{
    const auto tree = ScenarioTree::full(1.0, 10);
    const auto drm = DynamicRiskMeasure::entropy(0.5, tree);
    const double z = 1.0;
    const auto Y = linear_drift(tree, canonical_drift(1.0, 0.5, z));
    std::optional<PenalizedSolution> prev;
    for (double n : default_schedule()) {
        const auto s = solve_penalized(drm, Y, z, n);
        CHECK(s.y_below_Y);
        CHECK(s.A_increasing);
        for (int k = 0; k <= 10; ++k) {
            for (std::size_t i = 0; i < tree.width(k); ++i) {
                CHECK(s.y.at(k, i) <= Y.at(k, i) + 1e-14);
                if (prev) {
                    CHECK(prev->y.at(k, i) <= s.y.at(k, i) + 1e-14);
                }
            }
        }
        for (std::size_t i = 0; i < tree.width(10); ++i) {
            for (int k = 0; k < 10; ++k) {
                CHECK(s.A.at(k, tree.ancestor(10, i, k)) <= s.A.at(k + 1, tree.ancestor(10, i, k + 1)) + 1e-15);
            }
        }
        CHECK(s.A.root() == 0.0);
        prev = s;
    }
}

TEST_CASE("gap decays like 1/n")
{
    const auto lat = ScenarioTree::recombining(1.0, 64);
    const auto drm = DynamicRiskMeasure::entropy(0.5, lat);
    const auto Y = linear_drift(lat, canonical_drift(1.0, 0.5, 1.0));
    std::vector<double> gaps;
    for (double n : {256.0, 512.0, 1024.0, 2048.0}) {
        gaps.push_back(solve_penalized(drm, Y, 1.0, n).max_Y_minus_y);
    }
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        CHECK(gaps[i - 1] / gaps[i] == doctest::Approx(2.0).epsilon(0.1));
    }
}

TEST_CASE("Doob-Meyer compensator for the dominated entropy input")
{
    const auto lat = ScenarioTree::recombining(1.0, 256);
    const auto drm = DynamicRiskMeasure::entropy(0.5, lat);
    for (double z : {-1.0, 0.5, 1.0}) {
        const auto Y = linear_drift(lat, canonical_drift(1.0, 0.5, z));
        const auto d = doob_meyer(drm, Y, z);
        CHECK(d.monotone_in_n);
        CHECK(d.gap_nonincreasing);
        double err = 0.0;
        for (int k = 0; k <= 256; ++k) {
            err = std::max(err, std::abs(d.A.at(k, 0) - std::abs(z) * lat.time(k)));
        }
        CHECK(err <= 0.02 * std::abs(z));
        CHECK(d.A.max_abs(256) <= 2.0 * 1.0 * canonical_drift(1.0, 0.5, z));
        for (std::size_t i = 1; i < d.levels.size(); ++i) {
            CHECK(d.levels[i].max_gap <= d.levels[i - 1].max_gap + 1e-15);
        }
    }
}

TEST_CASE("uniqueness across schedules")
{
    const auto tree = ScenarioTree::full(1.0, 8);
    const auto drm = DynamicRiskMeasure::entropy(0.5, tree);
    const auto Y = linear_drift(tree, canonical_drift(1.0, 0.5, 1.0));
    const auto a = doob_meyer(drm, Y, 1.0, {2.0, 64.0, 1024.0}, 1e-12);
    const auto b = doob_meyer(drm, Y, 1.0, {8.0, 1024.0}, 1e-12);
    REQUIRE(a.n_achieved == b.n_achieved);
    CHECK(max_abs_difference(a.A, b.A) == 0.0);
}

TEST_CASE("precondition and canonical processes")
{
    const auto tree = ScenarioTree::full(1.0, 10);
    const auto q = DynamicRiskMeasure::from_generator(quadratic_upper(1.0, 1.0), tree);
    const auto weak = linear_drift(tree, 0.5 * canonical_drift(1.0, 1.0, 1.0));
    CHECK_THROWS_AS(solve_penalized(q, weak, 1.0, 4.0), PreconditionError);
    CHECK_THROWS_AS(doob_meyer(q, weak, 1.0), PreconditionError);

    const auto zero = canonical_supermartingale(1.0, 1.0, 0.0, tree);
    CHECK(zero.max_abs() == 0.0);
    const auto c = canonical_supermartingale(1.0, 1.0, 1.0, tree);
    const auto b = brownian(tree);
    CHECK(std::abs(c.at(10, 5) - (-2.0 + b.at(10, 5))) < 1e-14);
    CHECK(check_supermartingale(DynamicRiskMeasure::entropy(1.0, tree), c).holds);
    CHECK(default_schedule().front() == 2.0);
    CHECK(default_schedule().back() == 16384.0);
}
