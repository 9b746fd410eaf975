#include "gexp/generator.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gexp;

namespace {

const std::vector<double> kZ = linspace(-3.0, 3.0, 25);
const std::vector<double> kT{0.0, 0.5, 1.0};
const std::vector<double> kTheta{0.1, 0.3, 0.5, 0.7, 0.9};

}  // namespace

TEST_CASE("builtin values and flags")
{
    const auto q = quadratic_upper(1.0, 1.0);
    CHECK(q(0.0, 2.0) == 6.0);
    CHECK(q(0.3, -2.0) == 6.0);
    CHECK(quadratic_lower(1.0, 1.0)(0.0, 2.0) == -6.0);

    const auto e = entropy_generator(0.5);
    CHECK(e.mu() == 0.0);
    CHECK(e.nu() == 0.5);
    CHECK(e.flags().convex);
    CHECK(e.flags().theta_dominated);
    CHECK_FALSE(e.flags().sublinear);

    const auto s = sublinear_interval(-1.5, 1.5);
    CHECK(s.flags().sublinear);
    for (double z : kZ) {
        CHECK(s(0.0, z) == doctest::Approx(1.5 * std::abs(z)));
        CHECK(scaled_abs(1.5)(0.0, z) == doctest::Approx(s(0.0, z)));
    }
    const auto a = sublinear_interval(-0.5, 2.0);
    CHECK(a(0.0, 1.0) == 2.0);
    CHECK(a(0.0, -1.0) == 0.5);
    CHECK(a.mu() == 2.0);

    CHECK_THROWS_AS(quadratic_upper(-1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(entropy_generator(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(sublinear_interval(1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(sublinear_interval(-2.0, 2.0, 1.0), std::invalid_argument);

    for (auto kind : {BuiltinKind::quadratic_upper, BuiltinKind::quadratic_lower, BuiltinKind::entropy,
                      BuiltinKind::sublinear_interval, BuiltinKind::scaled_abs}) {
        CHECK(parse_builtin_kind(to_string(kind)) == kind);
        const auto g = make_builtin(kind, BuiltinParams{1.0, 0.5, -1.0, 1.0});
        for (double t : kT) {
            CHECK(g(t, 0.0) == 0.0);
        }
    }
    CHECK_FALSE(parse_builtin_kind("cubic"));
}

TEST_CASE("verify_class on builtins")
{
    for (const auto& g : {quadratic_upper(1.0, 1.0), entropy_generator(0.5), sublinear_interval(-1.0, 1.0),
                          scaled_abs(2.0), quadratic_upper(0.0, 2.0)}) {
        const auto r = verify_class(g, kZ, kT, kTheta);
        CHECK_MESSAGE(r.passed(), g.name());
    }
    // Concave lower bound: growth holds, convexity is not claimed.
    const auto low = verify_class(quadratic_lower(1.0, 1.0), kZ, kT, kTheta);
    CHECK(low.passed());
    CHECK_FALSE(low.find("convexity")->claimed);
}

TEST_CASE("verify_class reports violations with witnesses")
{
    const Generator cubic("cubic", [](double, double z) { return std::clamp(z * z * z, -1e3, 1e3); }, 1.0, 1.0,
                          GeneratorClass{false, false, false});
    const auto r = verify_class(cubic, kZ, kT, kTheta);
    CHECK_FALSE(r.passed());
    const auto* growth = r.find("growth");
    REQUIRE(growth != nullptr);
    CHECK_FALSE(growth->holds);
    CHECK(growth->gap > 0.0);
    CHECK_FALSE(growth->witness.empty());

    const Generator fake("fake convex", [](double, double z) { return -std::abs(z); }, 1.0, 0.0,
                         GeneratorClass{true, false, false});
    const auto f = verify_class(fake, kZ, kT, kTheta);
    CHECK_FALSE(f.find("convexity")->holds);

    // At z = 0 the inequality reads theta w^2 <= theta^2 w^2 / (1 - theta).
    const Generator concave("concave", [](double, double z) { return -z * z; }, 0.0, 1.0,
                            GeneratorClass{false, false, true});
    const auto* th = verify_class(concave, kZ, kT, kTheta).find("theta_domination");
    CHECK_FALSE(th->holds);
    CHECK(th->gap > 0.0);
}

TEST_CASE("analytic conjugates agree with a dense grid search")
{
    const auto q = quadratic_upper(1.0, 1.0);
    for (double x : linspace(-5.0, 5.0, 41)) {
        const auto c = conjugate(q, 0.0, x);
        REQUIRE(c.f_value.is_finite());
        const double ref = oracle::dense_conjugate([&](double z) { return q(0.0, z); }, x, -20.0, 20.0);
        CHECK(std::abs(c.f_value.value() - ref) < 1e-9);
        CHECK(std::abs(c.f_value.value() - oracle::quadratic_conjugate(1.0, 1.0, x)) < 1e-14);
    }
    CHECK(conjugate(q, 0.0, 3.0).f_value.value() == doctest::Approx(1.0));
    CHECK(conjugate(q, 0.0, 0.5).f_value.value() == 0.0);
    CHECK(conjugate(q, 0.0, -1.0).f_value.value() == 0.0);

    const auto e = entropy_generator(0.5);
    for (double x : {-2.0, 0.0, 1.0, 3.0}) {
        CHECK(conjugate(e, 0.0, x).f_value.value() == doctest::Approx(x * x / 2.0));
    }
}

TEST_CASE("numeric conjugate of the quadratic family")
{
    for (auto [mu, nu] : {std::pair{1.0, 1.0}, std::pair{0.5, 0.25}, std::pair{0.0, 2.0}}) {
        const auto g = quadratic_upper(mu, nu);
        double worst = 0.0;
        for (double x : linspace(-6.0, 6.0, 1000)) {
            const auto c = conjugate(g, 0.0, x, ConjugateMethod::numeric);
            REQUIRE(c.f_value.is_finite());
            REQUIRE(c.argmax_z.has_value());
            const double exact = oracle::quadratic_conjugate(mu, nu, x);
            worst = std::max(worst, std::abs(c.f_value.value() - exact));
            CHECK(c.f_value.value() <= exact + 1e-15);
            CHECK(exact - c.f_value.value() <= c.tolerance + 1e-15);
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("conjugate of sublinear drivers is an indicator")
{
    const auto s = sublinear_interval(-1.0, 1.0);
    const auto bare = s.without_analytic();
    CHECK_FALSE(bare.has_analytic_conjugate());
    for (double x : linspace(-2.0, 2.0, 81)) {
        for (const auto& g : {s, bare}) {
            const auto c = conjugate(g, 0.0, x);
            if (std::abs(x) <= 1.0) {
                CHECK(c.f_value == ExtReal(0.0));
            }
            else {
                CHECK(c.f_value.is_plus_infinity());
            }
        }
    }
    // Linear growth without homogeneity flag still detects +inf.
    const auto abs2 = scaled_abs(2.0).without_analytic();
    CHECK(conjugate(abs2, 0.0, 2.5).f_value.is_plus_infinity());
    CHECK(conjugate(abs2, 0.0, 1.5).f_value.is_finite());
}

TEST_CASE("Fenchel-Young inequality and equality")
{
    for (const auto& g : {quadratic_upper(1.0, 1.0), entropy_generator(0.7), quadratic_upper(0.3, 0.0)}) {
        for (double x : linspace(-3.0, 3.0, 13)) {
            const auto f = conjugate(g, 0.0, x, ConjugateMethod::numeric).f_value;
            if (!f.is_finite()) {
                continue;
            }
            for (double z : kZ) {
                CHECK(x * z <= g(0.0, z) + f.value() + 1e-9);
            }
        }
        for (double z : kZ) {
            const auto sd = subdifferential(g, 0.0, z);
            for (double x : {sd.lo, sd.midpoint(), sd.hi}) {
                const auto f = conjugate(g, 0.0, x);
                CHECK(std::abs(x * z - g(0.0, z) - f.f_value.value()) < 1e-9);
            }
        }
    }
}

TEST_CASE("double conjugate recovers convex builtins")
{
    for (const auto& g : {quadratic_upper(1.0, 1.0), entropy_generator(0.5)}) {
        const auto xs = linspace(-12.0, 12.0, 2401);
        std::vector<double> f;
        for (double x : xs) {
            f.push_back(conjugate(g, 0.0, x, ConjugateMethod::numeric).f_value.value());
        }
        for (double z : linspace(-2.0, 2.0, 17)) {
            double best = -HUGE_VAL;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                best = std::max(best, xs[i] * z - f[i]);
            }
            CHECK(std::abs(best - g(0.0, z)) < 1e-3);
        }
    }
}

TEST_CASE("subdifferentials")
{
    const auto e = entropy_generator(0.5);
    for (double z : kZ) {
        const auto sd = subdifferential(e, 0.0, z);
        CHECK(sd.lo == doctest::Approx(z));
        CHECK(sd.width() == 0.0);
        const auto num = subdifferential(e.without_analytic(), 0.0, z);
        CHECK(std::abs(num.midpoint() - z) < 1e-5);
    }
    const auto q = quadratic_upper(1.0, 1.0);
    const auto at0 = subdifferential(q, 0.0, 0.0);
    CHECK(at0.lo == -1.0);
    CHECK(at0.hi == 1.0);
    const auto num0 = subdifferential(q.without_analytic(), 0.0, 0.0);
    CHECK(std::abs(num0.lo + 1.0) < 1e-5);
    CHECK(std::abs(num0.hi - 1.0) < 1e-5);
    const auto k = subdifferential(sublinear_interval(-0.5, 2.0), 0.0, 0.0);
    CHECK(k.lo == -0.5);
    CHECK(k.hi == 2.0);
    CHECK_THROWS_AS(subdifferential(quadratic_lower(1.0, 1.0), 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("tabulated generators interpolate and extrapolate")
{
    const auto zs = linspace(-1.0, 1.0, 21);
    std::vector<std::vector<double>> vals(2);
    for (double z : zs) {
        vals[0].push_back(z * z);
        vals[1].push_back(2.0 * z * z);
    }
    const auto g = tabulated_generator("tab", {0.0, 1.0}, zs, vals, 0.0, 2.0, GeneratorClass{true, false, true});
    CHECK(g(0.0, 0.5) == doctest::Approx(0.25));
    CHECK(g(1.0, 0.5) == doctest::Approx(0.5));
    CHECK(g(0.5, 0.5) == doctest::Approx(0.375));
    CHECK(g(0.0, 2.0) == doctest::Approx(4.0));
    CHECK(g(-1.0, 0.5) == doctest::Approx(0.25));
    CHECK(g(3.0, 0.5) == doctest::Approx(0.5));
    CHECK_THROWS(tabulated_generator("bad", {0.0}, {0.0, 1.0}, {{0.0}}, 0.0, 0.0, {}));
}
