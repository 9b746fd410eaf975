// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed here.

#include "gexp/axioms.hpp"
#include "gexp/claims.hpp"
#include "gexp/dual.hpp"
#include "gexp/penalization.hpp"
#include "gexp/represent.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

using namespace gexp;

namespace {

constexpr double kClosedFormTol = 1e-12;
constexpr double kContinuumRelTol = 0.01;
constexpr double kRatioTarget = 2.0;
constexpr double kRatioTol = 0.2;
constexpr double kGibbsTol = 1e-9;
constexpr double kSlackC = 1.0;
constexpr double kConjugateTol = 1e-6;
constexpr double kRepresentRelTol = 0.02;
constexpr double kSlopeRelTol = 0.02;
constexpr double kC1Seconds = 5.0;
constexpr double kC7Seconds = 30.0;
constexpr double kC10Seconds = 60.0;

struct Outcome {
    bool passed = true;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome c1()
{
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    double rho1024 = 0.0;
    for (int N : {8, 64, 256, 1024}) {
        const auto tree = ScenarioTree::recombining(1.0, N);
        const double nu = 0.5;
        const auto s = entropy_exact(nu, brownian(tree));
        const double closed = N / (2.0 * nu) * std::log(std::cosh(2.0 * nu * tree.sqrt_dt()));
        worst = std::max(worst, std::abs(s.Y.root() - closed));
        if (N == 1024) {
            rho1024 = DynamicRiskMeasure::entropy(nu, tree).evaluate(claims::linear(-1.0)).Y.root();
        }
    }
    const double rel = std::abs(rho1024 - 0.5) / 0.5;
    const double secs = seconds_since(t0);
    return {worst <= kClosedFormTol && rel <= kContinuumRelTol && secs < kC1Seconds,
            fmt("max |tree - closed form| %.2e", worst) + fmt(", rho0(N=1024) %.8f", rho1024) +
                fmt(" (rel %.2e vs 0.5)", rel) + fmt(", %.2f s", secs)};
}

Outcome c2()
{
    bool ok = true;
    double lo = HUGE_VAL;
    double hi = -HUGE_VAL;
    for (const auto& xi : {claims::linear(-1.0), claims::call(1.0)}) {
        double prev = 0.0;
        for (int N : {64, 128, 256, 512, 1024}) {
            const auto tree = ScenarioTree::recombining(1.0, N);
            const double a = DynamicRiskMeasure::from_generator(entropy_generator(0.5), tree).evaluate(xi).Y.root();
            const double b = DynamicRiskMeasure::entropy(0.5, tree).evaluate(xi).Y.root();
            const double err = std::abs(a - b);
            if (N > 64) {
                const double r = prev / err;
                lo = std::min(lo, r);
                hi = std::max(hi, r);
                ok = ok && std::abs(r - kRatioTarget) <= kRatioTarget * kRatioTol;
            }
            prev = err;
        }
    }
    return {ok, fmt("error ratios per doubling in [%.4f", lo) + fmt(", %.4f]", hi)};
}

Outcome c3()
{
    double worst = 0.0;
    int cases = 0;
    for (int N : {4, 8, 12}) {
        const auto tree = ScenarioTree::full(1.0, N);
        const auto drm = DynamicRiskMeasure::entropy(0.5, tree);
        for (const auto& xi : claims::random_family(2024, 20, 1.0)) {
            const auto r = verify_duality(drm, xi, {});
            worst = std::max(worst, std::abs(*r.gibbs_gap));
            ++cases;
        }
    }
    return {worst <= kGibbsTol, fmt("max |rho0 - Gibbs value| %.2e", worst) + " over " + std::to_string(cases) + " claims"};
}

// Largest normalized excess (dual - rho0)/dt over the sweep, including the
// optimal row's |gap|/dt.
double duality_constant(int N, const Claim& xi, bool* weak_ok, double* opt_gap)
{
    const auto tree = ScenarioTree::recombining(1.0, N);
    const auto drm = DynamicRiskMeasure::from_generator(quadratic_upper(1.0, 1.0), tree);
    std::vector<SweepEntry> sweep;
    for (double q : {-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0}) {
        sweep.push_back({"const", DensityProcess::constant(tree, q)});
    }
    for (int s = 0; s < 4; ++s) {
        auto q = TreeProcess::from_rule(tree, N - 1, [&](int k, std::size_t i) {
            return 2.0 * std::sin(1.3 * s + 0.37 * k + 0.91 * static_cast<double>(i));
        });
        sweep.push_back({"osc", DensityProcess::make(q)});
    }
    DualityOptions o;
    o.slack_c = kSlackC;
    const auto r = verify_duality(drm, xi, sweep, o);
    double excess = std::abs(r.optimal.gap.value());
    for (const auto& row : r.rows) {
        if (row.dual_value.is_finite()) {
            excess = std::max(excess, row.dual_value.value() - r.rho0);
        }
    }
    *weak_ok = r.passed;
    *opt_gap = std::abs(r.optimal.gap.value());
    return excess / tree.dt();
}

Outcome c4()
{
    bool ok = true;
    double c_worst = 0.0;
    double drift = 0.0;
    double gap_worst = 0.0;
    for (const auto& xi : {claims::linear(-1.0), claims::put(0.5), claims::call(-0.25, -1.0)}) {
        bool w1 = true;
        bool w2 = true;
        double g1 = 0.0;
        double g2 = 0.0;
        const double c64 = duality_constant(64, xi, &w1, &g1);
        const double c128 = duality_constant(128, xi, &w2, &g2);
        c_worst = std::max({c_worst, c64, c128});
        drift = std::max(drift, std::abs(c64 - c128));
        gap_worst = std::max({gap_worst, g1, g2});
        ok = ok && w1 && w2 && c64 <= kSlackC && c128 <= kSlackC && std::abs(c64 - c128) <= 0.5 * kSlackC;
    }
    return {ok, fmt("C estimate %.2e", c_worst) + fmt(" (N vs 2N change %.2e", drift) +
                    fmt(", pinned C = %.1f)", kSlackC) + fmt(", optimal gap %.2e", gap_worst)};
}

Outcome c5()
{
    const int N = 256;
    const auto tree = ScenarioTree::recombining(1.0, N);
    const auto drm = DynamicRiskMeasure::from_generator(sublinear_interval(-1.0, 1.0), tree);
    const auto f = conjugate_penalty(*drm.generator());
    bool ok = true;
    double worst = 0.0;
    int markers = 0;
    for (const auto& xi : {claims::linear(1.0), claims::linear(-2.0), claims::call(0.0), claims::put(0.3, 0.5),
                           claims::indicator(0.2, -1.0)}) {
        const double r0 = drm.evaluate(xi).Y.root();
        double best = -HUGE_VAL;
        for (double q : linspace(-1.0, 1.0, 21)) {
            const auto m = tilt(DensityProcess::constant(tree, q));
            const auto d = dual_value(m, xi, f);
            const double eq = -cond_expect(xi.terminal(tree), 0, m).root();
            ok = ok && d.feasible && std::abs(d.root().value() - eq) <= 1e-14 * (1.0 + std::abs(eq));
            best = std::max(best, eq);
        }
        for (double q : {-1.5, 1.5}) {
            const auto d = dual_value(tilt(DensityProcess::constant(tree, q)), xi, f);
            const bool marked = !d.feasible && d.root().is_minus_infinity();
            markers += marked ? 1 : 0;
            ok = ok && marked;
        }
        const double gap = std::abs(r0 - best);
        worst = std::max(worst, gap / tree.dt());
        ok = ok && gap <= kSlackC * tree.dt();
    }
    return {ok, fmt("max |rho0 - max_q E_Q[-xi]| / dt = %.2e", worst) + ", zero penalties inside [-1,1], " +
                    std::to_string(markers) + "/10 -inf markers outside"};
}

Outcome c6()
{
    double worst = 0.0;
    const auto g = quadratic_upper(1.0, 1.0).without_analytic();
    for (double x : linspace(-6.0, 6.0, 1000)) {
        const auto c = conjugate(g, 0.0, x, ConjugateMethod::numeric);
        const double e = std::max(std::abs(x) - 1.0, 0.0);
        worst = std::max(worst, c.f_value.is_finite() ? std::abs(c.f_value.value() - e * e / 4.0) : HUGE_VAL);
    }
    return {worst <= kConjugateTol, fmt("max error %.2e on 1000 points", worst)};
}

Outcome c7()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto tree = ScenarioTree::full(1.0, 10);
    const auto fam = claims::random_family(77, 11, 0.25);
    AxiomOptions o;
    o.max_pairs = 50;
    bool ok = true;
    std::string notes;
    {
        const auto r = check_axioms(DynamicRiskMeasure::from_generator(quadratic_upper(1.0, 1.0), tree), fam, 5, o);
        for (Axiom a : {Axiom::monotonicity, Axiom::time_consistency, Axiom::constant_preservation, Axiom::convexity,
                        Axiom::translation_invariance, Axiom::regularity}) {
            ok = ok && r.status(a) == CheckStatus::pass && r.at(a).skipped == 0;
        }
    }
    {
        const auto r = check_axioms(DynamicRiskMeasure::from_generator(sublinear_interval(-1.0, 1.0), tree), fam, 5, o);
        for (Axiom a : kAllAxioms) {
            ok = ok && r.status(a) == CheckStatus::pass && r.at(a).skipped == 0;
        }
    }
    {
        const auto drm = DynamicRiskMeasure::entropy(0.5, tree);
        const auto r = check_axioms(drm, fam, 5, o);
        const auto& ph = r.at(Axiom::positive_homogeneity);
        ok = ok && ph.status == CheckStatus::fail && ph.witness && reproduce(drm, *ph.witness) == ph.witness->gap;
        for (Axiom a : {Axiom::monotonicity, Axiom::time_consistency, Axiom::constant_preservation, Axiom::convexity,
                        Axiom::translation_invariance, Axiom::regularity}) {
            ok = ok && r.status(a) == CheckStatus::pass;
        }
        if (ph.witness) {
            notes = fmt(", entropy r6 witness gap %.4g", ph.witness->gap) + " at " + to_string(ph.witness->node);
        }
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < kC7Seconds;
    return {ok, "quadratic r1-r4,r7,r8 pass; sublinear r1-r8 pass" + notes + fmt(", %.2f s", secs)};
}

Outcome c8()
{
    const auto tree = ScenarioTree::full(1.0, 8);
    DominationOptions o;
    o.max_pairs = 20;
    const auto r = check_domination(DynamicRiskMeasure::entropy(0.5, tree), 0.0, 0.5,
                                    claims::random_family(88, 8, 1.0), 8, o);
    int violations = 0;
    int tested = 0;
    int skipped = 0;
    for (const PropertyCheck* c : {&r.condition_a, &r.theta_domination, &r.linf_bound}) {
        violations += c->violations;
        tested += c->tested;
        skipped += c->skipped;
    }
    const bool ok = violations == 0 && skipped == 0 && r.condition_a.status == CheckStatus::pass &&
                    r.theta_domination.status == CheckStatus::pass && r.linf_bound.status == CheckStatus::pass;
    return {ok, std::to_string(tested) + " cases, " + std::to_string(violations) + " violations"};
}

Outcome c9()
{
    const int N = 1024;
    const auto tree = ScenarioTree::recombining(1.0, N);
    const auto drm = DynamicRiskMeasure::entropy(0.5, tree);
    RepresentOptions o;
    o.claims = claims::random_family(9, 6, 0.25);
    o.mu = 0.0;
    o.nu = 0.5;
    const auto rep = represent(drm, linspace(-4.0, 4.0, 321), {0.0, 0.5}, o);
    double rel = 0.0;
    for (std::size_t a = 0; a < rep.t_grid.size(); ++a) {
        for (std::size_t b = 0; b < rep.z_grid.size(); ++b) {
            const double z = rep.z_grid[b];
            if (z != 0.0 && std::abs(z) <= 2.0) {
                rel = std::max(rel, std::abs(rep.values[a][b] - 0.5 * z * z) / (0.5 * z * z));
            }
        }
    }
    const std::vector<Claim> test{claims::linear(-1.0),      claims::linear(2.0, 1.0), claims::call(0.0),
                                  claims::call(-1.0, -1.0), claims::put(0.5),         claims::put(-0.5, 2.0),
                                  claims::square(0.3),      claims::square(-0.2),     claims::indicator(0.0, 0.5),
                                  claims::constant(1.5)};
    bool ok = rel <= kRepresentRelTol;
    double worst = 0.0;
    for (const auto& row : round_trip(drm, rep.generator, test)) {
        const double allowed = tree.dt() * (1.0 + std::abs(row.rho0));
        worst = std::max(worst, row.gap / allowed);
        ok = ok && row.gap <= allowed;
    }
    return {ok, fmt("max relative error %.2e on [-2,2]", rel) +
                    fmt("; round trip on 10 claims uses %.2f of the dt(1+|rho0|) budget", worst)};
}

Outcome c10()
{
    const auto t0 = std::chrono::steady_clock::now();
    const int N = 256;
    const auto tree = ScenarioTree::recombining(1.0, N);
    const auto drm = DynamicRiskMeasure::entropy(0.5, tree);
    const double mu_bar = 1.0;
    const double nu_bar = 0.5;
    bool ok = true;
    double worst = 0.0;
    double a_max = 0.0;
    for (double z : {-1.0, 0.5, 1.0}) {
        const auto Y = linear_drift(tree, canonical_drift(mu_bar, nu_bar, z));
        const auto d = doob_meyer(drm, Y, z);
        double err = 0.0;
        for (int k = 0; k <= N; ++k) {
            err = std::max(err, std::abs(d.A.at(k, 0) - mu_bar * std::abs(z) * tree.time(k)));
        }
        worst = std::max(worst, err / (mu_bar * std::abs(z) * tree.horizon()));
        const double bound = 2.0 * tree.horizon() * canonical_drift(mu_bar, nu_bar, z);
        a_max = std::max(a_max, d.A.max_abs(N) / bound);
        ok = ok && d.monotone_in_n && d.gap_nonincreasing && d.n_achieved == 16384.0 && err <= kSlopeRelTol * std::abs(z) &&
             d.A.max_abs(N) <= bound;
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < kC10Seconds;
    return {ok, fmt("max |A_t - |z|t| relative %.2e", worst) + fmt(", A_T at %.3f of the bound", a_max) +
                    fmt(", %.2f s", secs)};
}

Outcome c11()
{
    const int N = 12;
    const auto tree = ScenarioTree::full(1.0, N);
    const auto drm = DynamicRiskMeasure::entropy(0.5, tree);
    bool ok = true;
    int nodes = 0;
    double worst = -HUGE_VAL;
    for (int pair = 0; pair < 10; ++pair) {
        const double z = pair % 2 == 0 ? 1.0 : -0.5;
        const auto Y = canonical_supermartingale(pair < 5 ? 0.0 : 1.0, 0.5, z, tree);
        const auto sigma = StoppingTime::random(tree, 100 + pair, 0.15);
        const auto tau = pair % 3 == 0 ? StoppingTime::first_hitting(tree, 0.6 + 0.1 * pair)
                                       : StoppingTime::random(tree, 200 + pair, 0.25);
        const auto r = optional_stopping_check(drm, Y, sigma, tau);
        ok = ok && r.passed();
        nodes += r.checked_nodes;
        worst = std::max(worst, r.max_gap);
    }
    // A drift too weak for the driver is caught as a precondition, not a pass.
    const auto q = DynamicRiskMeasure::from_generator(quadratic_upper(1.0, 1.0), tree);
    const auto planted = optional_stopping_check(q, canonical_supermartingale(1.0, 1.0, 1.0, tree, 0.5),
                                                 StoppingTime::constant(tree, 0), StoppingTime::constant(tree, N));
    ok = ok && !planted.precondition_holds;
    return {ok, "10 pairs, " + std::to_string(nodes) + " stopping nodes, max rho_sigma(-Y_tau) - Y_{sigma^tau} = " +
                    fmt("%.2e", worst) + "; halved drift rejected"};
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"C1 entropy closed form", c1},        {"C2 scheme consistency", c2},   {"C3 Gibbs duality", c3},
        {"C4 convex dual representation", c4}, {"C5 coherent dual", c5},        {"C6 conjugate closed form", c6},
        {"C7 axiom suites", c7},               {"C8 domination", c8},           {"C9 representation round trip", c9},
        {"C10 Doob-Meyer penalization", c10},  {"C11 optional stopping", c11}};
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        }
        catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.passed ? 0 : 1;
        std::printf("%s %s: %s\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
