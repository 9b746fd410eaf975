#include "gexp/claims.hpp"
#include "gexp/lattice.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gexp;

TEST_CASE("tree construction")
{
    const auto t1 = ScenarioTree::full(1.0, 1);
    CHECK(t1.width(1) == 2);
    CHECK(t1.increment_into(1, 1) == 1.0);
    CHECK(t1.increment_into(1, 0) == -1.0);

    const auto t2 = ScenarioTree::full(1.0, 2);
    CHECK(t2.width(2) == 4);
    CHECK(std::abs(t2.sqrt_dt() - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(t2.dt() * t2.steps() - t2.horizon()) <= 1e-15);

    CHECK_THROWS_AS(ScenarioTree::full(1.0, 30), std::invalid_argument);
    CHECK_THROWS_AS(ScenarioTree::full(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(ScenarioTree::full(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(ScenarioTree::recombining(-1.0, 4), std::invalid_argument);
    CHECK_NOTHROW(ScenarioTree::recombining(1.0, 10000));
}

TEST_CASE("layouts agree on node geometry")
{
    const auto full = ScenarioTree::full(2.0, 6);
    const auto lat = ScenarioTree::recombining(2.0, 6);
    for (std::size_t leaf = 0; leaf < full.width(6); ++leaf) {
        const int ups = full.ups(6, leaf);
        CHECK(full.brownian(6, leaf) == doctest::Approx(lat.brownian(6, static_cast<std::size_t>(ups))));
        for (int j = 0; j <= 6; ++j) {
            CHECK(full.ancestor(6, leaf, j) == (leaf >> (6 - j)));
        }
    }
    const auto inc = full.path_increments(0b101100);
    REQUIRE(inc.size() == 6);
    CHECK(inc[0] > 0);
    CHECK(inc[1] < 0);
    CHECK(inc[2] > 0);
    CHECK(inc[3] > 0);
    CHECK(inc[4] < 0);
}

TEST_CASE("brownian motion moments")
{
    for (bool full : {true, false}) {
        const auto tree = full ? ScenarioTree::full(1.0, 1) : ScenarioTree::recombining(1.0, 1);
        const auto b = brownian(tree);
        CHECK(b.root() == 0.0);
        CHECK(b.at(1, tree.up(0, 0)) == 1.0);
        CHECK(b.at(1, tree.down(0, 0)) == -1.0);
    }
    for (int N : {1, 5, 12}) {
        const auto tree = ScenarioTree::full(1.7, N);
        TreeProcess b2(tree);
        const auto b = brownian(tree);
        for (std::size_t i = 0; i < tree.width(N); ++i) {
            b2.at(N, i) = b.at(N, i) * b.at(N, i);
        }
        CHECK(std::abs(cond_expect(b, 0).root()) < 1e-14);
        CHECK(std::abs(cond_expect(b2, 0).root() - 1.7) < 1e-13);
    }
}

TEST_CASE("one-step increment moments are exact")
{
    const auto tree = ScenarioTree::full(1.0, 7);
    for (int k = 0; k < 7; ++k) {
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            const double u = tree.increment_into(k + 1, tree.up(k, i));
            const double d = tree.increment_into(k + 1, tree.down(k, i));
            CHECK(0.5 * (u + d) == 0.0);
            CHECK(std::abs(0.5 * (u * u + d * d) - tree.dt()) < 1e-16);
        }
    }
}

TEST_CASE("conditional expectation")
{
    const auto tree = ScenarioTree::full(1.0, 10);
    const TreeProcess c(tree, 10, 3.25);
    const auto ec = cond_expect(c, 4);
    for (int k = 0; k <= 10; ++k) {
        for (double v : ec.slice(k)) {
            CHECK(v == 3.25);
        }
    }
    const auto b = brownian(tree);
    for (int k = 0; k <= 10; ++k) {
        const auto e = cond_expect(b, k);
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            CHECK(std::abs(e.at(k, i) - b.at(k, i)) < 1e-14);
        }
    }
    // Tower property on a random terminal variable.
    const auto x = claims::random_leaf(11, 2.0).terminal(tree);
    for (int k = 0; k <= 10; ++k) {
        const auto ek = cond_expect(x, k);
        for (int j = 0; j <= k; ++j) {
            const auto direct = cond_expect(x, j);
            const auto tower = cond_expect(ek, j);
            CHECK(max_abs_difference(direct, tower, j) < 1e-14);
        }
    }
    CHECK_THROWS(cond_expect(x, 11));
    CHECK_THROWS(cond_expect(x, -1));
}

TEST_CASE("conditional expectation matches enumeration")
{
    const int N = 9;
    const auto tree = ScenarioTree::full(1.0, N);
    const auto claim = claims::path_max(1.0);
    const auto x = claim.terminal(tree);
    double mean = 0.0;
    const auto paths = oracle::all_paths(N, tree.sqrt_dt());
    for (const auto& p : paths) {
        mean += claim(p);
    }
    mean /= static_cast<double>(paths.size());
    CHECK(std::abs(cond_expect(x, 0).root() - mean) < 1e-14);
}

TEST_CASE("recombining lattice matches binomial sums")
{
    const int N = 400;
    const auto lat = ScenarioTree::recombining(1.0, N);
    const auto claim = claims::call(0.3);
    const double mean = cond_expect(claim.terminal(lat), 0).root();
    CHECK(std::abs(mean - oracle::binomial_mean(1.0, N, [](double b) { return std::max(b - 0.3, 0.0); })) < 1e-13);
}

TEST_CASE("integrals")
{
    const auto tree = ScenarioTree::full(2.0, 8);
    const TreeProcess one(tree, 8, 1.0);
    const auto ti = integrate(IntegralKind::time, one, 0, 8);
    for (double v : ti.slice(8)) {
        CHECK(std::abs(v - 2.0) < 1e-14);
    }
    const TreeProcess z(tree, 8, -0.7);
    const auto si = integrate(IntegralKind::stochastic, z, 0, 8);
    const auto b = brownian(tree);
    for (std::size_t i = 0; i < tree.width(8); ++i) {
        CHECK(std::abs(si.at(8, i) + 0.7 * b.at(8, i)) < 1e-13);
    }
    // Stochastic integral of an adapted integrand is a martingale node-wise.
    const auto psi = TreeProcess::from_rule(tree, 8, [&](int k, std::size_t i) { return std::sin(3.0 * b.at(k, i) + k); });
    const auto m = integrate(IntegralKind::stochastic, psi, 0, 8);
    for (int k = 0; k < 8; ++k) {
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            const double avg = 0.5 * (m.at(k + 1, tree.up(k, i)) + m.at(k + 1, tree.down(k, i)));
            CHECK(std::abs(avg - m.at(k, i)) < 1e-14);
        }
    }
    CHECK_THROWS(integrate(IntegralKind::time, one, 5, 3));
    CHECK_THROWS(integrate(IntegralKind::time, one, 0, 9));
}

TEST_CASE("claims are adapted at the terminal slice")
{
    const auto tree = ScenarioTree::full(1.0, 6);
    const auto claim = claims::path_max(2.0);
    const auto x = claim.terminal(tree);
    for (std::size_t leaf = 0; leaf < tree.width(6); ++leaf) {
        CHECK(x.at(6, leaf) == claim(tree.path_increments(leaf)));
    }
    // A path-dependent claim forces the full layout.
    const std::vector<Claim> pd{claim};
    CHECK(build_tree_for(1.0, 10, pd).is_full());
    CHECK_THROWS(build_tree_for(1.0, 40, pd));
    const std::vector<Claim> markov{claims::call(0.0)};
    CHECK_FALSE(build_tree_for(1.0, 40, markov).is_full());
    CHECK(claims::random_leaf(5).label() == claims::random_leaf(5).label());
}

TEST_CASE("stopping times")
{
    const auto tree = ScenarioTree::full(1.0, 8);
    const auto c = StoppingTime::constant(tree, 3);
    for (std::size_t leaf = 0; leaf < tree.width(8); ++leaf) {
        CHECK(c.at_leaf(leaf) == 3);
    }
    const auto h = StoppingTime::first_hitting(tree, 0.9);
    const auto b = brownian(tree);
    for (std::size_t leaf = 0; leaf < tree.width(8); ++leaf) {
        int expect = 8;
        for (int k = 0; k <= 8; ++k) {
            if (std::abs(b.at(k, tree.ancestor(8, leaf, k))) >= 0.9) {
                expect = k;
                break;
            }
        }
        CHECK(h.at_leaf(leaf) == expect);
    }
    const auto r1 = StoppingTime::random(tree, 3, 0.3);
    const auto r2 = StoppingTime::random(tree, 3, 0.3);
    for (std::size_t leaf = 0; leaf < tree.width(8); ++leaf) {
        CHECK(r1.at_leaf(leaf) == r2.at_leaf(leaf));
        CHECK(r1.at_leaf(leaf) <= 8);
    }
    CHECK_THROWS(StoppingTime::constant(ScenarioTree::recombining(1.0, 8), 2));
}
