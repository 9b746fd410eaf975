#include "gexp/cli/tasks.hpp"

#include "gexp/claims.hpp"
#include "gexp/dual.hpp"
#include "gexp/penalization.hpp"
#include "gexp/represent.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

namespace gexp::cli {

using nlohmann::json;

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++) {
                try {
                    body(i);
                }
                catch (...) {
                    if (!failed.exchange(true)) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

namespace {

struct Context {
    const ScenarioConfig& cfg;
    const RunOptions& options;
    RunReport& report;
    std::vector<Claim> claims;
};

ScenarioTree make_tree(const TreeSpec& t, const std::vector<Claim>& claims, bool need_full)
{
    try {
        if (t.layout == "full" || need_full) {
            return ScenarioTree::full(t.horizon, t.steps, t.depth_cap);
        }
        const bool markov =
            std::all_of(claims.begin(), claims.end(), [](const Claim& c) { return c.path_independent(); });
        if (t.layout == "recombining") {
            if (!markov) {
                throw ConfigError("/tree/layout: path-dependent claims need a full tree");
            }
            return ScenarioTree::recombining(t.horizon, t.steps);
        }
        return build_tree_for(t.horizon, t.steps, claims, t.steps <= 12, t.depth_cap);
    }
    catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("/tree: ") + e.what());
    }
}

json tree_json(const ScenarioTree& tree)
{
    return json{{"layout", tree.is_full() ? "full" : "recombining"},
                {"horizon", tree.horizon()},
                {"steps", tree.steps()},
                {"dt", tree.dt()}};
}

const DrmSpec& require_drm(const ScenarioConfig& cfg)
{
    if (!cfg.drm) {
        throw ConfigError("/drm: this task needs a risk measure (\"drm\" or \"generator\")");
    }
    return *cfg.drm;
}

void require_claims(const std::vector<Claim>& claims, const char* task)
{
    if (claims.empty()) {
        throw ConfigError(std::string("/claims: task ") + task + " needs at least one claim");
    }
}

std::optional<double> entropy_nu(const DrmSpec& d)
{
    if (d.source == "entropy") {
        return d.nu;
    }
    if (d.source == "generator" && d.generator->kind == BuiltinKind::entropy) {
        return d.generator->params.nu;
    }
    return std::nullopt;
}

/// Growth constants of the configured measure.
std::pair<double, double> bounds_of(const DrmSpec& d)
{
    if (d.source == "entropy") {
        return {0.0, d.nu};
    }
    if (d.source == "generator") {
        const auto g = build_generator(*d.generator);
        return {g.mu(), g.nu()};
    }
    return {0.0, 0.0};
}

TreeProcess negated_terminal(const Claim& c, const ScenarioTree& tree)
{
    TreeProcess x = c.terminal(tree);
    for (double& v : x.slice(tree.steps())) {
        v = -v;
    }
    return x;
}

SolvedBSDE run_scheme(const DrmSpec& d, const std::string& scheme, const ScenarioTree& tree, const Claim& c)
{
    if (scheme == "auto") {
        return build_drm(d, tree).evaluate(c);
    }
    if (scheme == "explicit_euler") {
        const auto drm = build_drm(d, tree);
        if (!drm.generator()) {
            throw ConfigError("/params/scheme: explicit_euler needs a generator-based measure");
        }
        return DynamicRiskMeasure::from_generator(*drm.generator(), tree).evaluate(c);
    }
    if (scheme == "entropy_exact") {
        const auto nu = entropy_nu(d);
        if (!nu) {
            throw ConfigError("/params/scheme: entropy_exact needs an entropic measure");
        }
        return DynamicRiskMeasure::entropy(*nu, tree).evaluate(c);
    }
    if (scheme == "exp_transform") {
        double mu = 0.0;
        double nu = 0.0;
        if (auto e = entropy_nu(d)) {
            nu = *e;
        }
        else if (d.source == "generator" && d.generator->kind == BuiltinKind::quadratic_upper &&
                 d.generator->params.nu > 0.0) {
            mu = d.generator->params.mu;
            nu = d.generator->params.nu;
        }
        else {
            throw ConfigError("/params/scheme: exp_transform needs quadratic_upper with nu > 0 or an entropic measure");
        }
        auto s = exp_transform_solve(mu, nu, negated_terminal(c, tree));
        s.claim_label = c.label();
        s.claim_negated = true;
        return s;
    }
    throw ConfigError("/params/scheme: unknown scheme '" + scheme +
                      "' (auto, explicit_euler, entropy_exact, exp_transform)");
}

json witness_claims(const std::optional<Witness>& w)
{
    if (!w) {
        return "";
    }
    std::string out;
    for (const auto& c : w->claims) {
        out += (out.empty() ? "" : " | ") + c;
    }
    return out;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- solve

void task_solve(Context& ctx)
{
    ObjectReader p(ctx.cfg.params, "/params");
    const std::string scheme = p.text("scheme", "auto");
    const bool has_expect = p.has("expect_rho0");
    const double expect = has_expect ? p.number("expect_rho0") : 0.0;
    const double rel_tol = p.number("rel_tol", 0.01);
    const double abs_tol = p.number("abs_tol", 0.0);
    p.finish();
    const auto& d = require_drm(ctx.cfg);
    require_claims(ctx.claims, "solve");
    const auto tree = make_tree(ctx.cfg.tree, ctx.claims, false);
    ctx.report.tree = tree_json(tree);

    std::vector<std::optional<SolvedBSDE>> solved(ctx.claims.size());
    parallel_for(ctx.claims.size(), ctx.options.jobs,
                 [&](std::size_t i) { solved[i] = run_scheme(d, scheme, tree, ctx.claims[i]); });

    auto& t = ctx.report.table(
        "solve", {"claim", "scheme", "rho0", "max_residual", "max_abs_z", "certificate_bound", "monotone"});
    json values = json::array();
    for (std::size_t i = 0; i < solved.size(); ++i) {
        const auto& s = *solved[i];
        const double r0 = s.Y.root();
        t.add({ctx.claims[i].label(), to_string(s.scheme), r0, s.max_residual(), s.certificate.max_abs_z,
               s.certificate.bound, s.certificate.monotone});
        values.push_back(json{{"claim", ctx.claims[i].label()}, {"rho0", r0}});
        for (const auto& w : s.warnings) {
            ctx.report.warnings.push_back(ctx.claims[i].label() + ": " + w);
        }
        if (has_expect) {
            const double err = std::abs(r0 - expect);
            ctx.report.check("rho0 " + ctx.claims[i].label(), err <= rel_tol * std::abs(expect) + abs_tol,
                             "rho0 " + fmt(r0) + " vs expected " + fmt(expect) + " (error " + fmt(err) + ")");
        }
    }
    ctx.report.results["rho0"] = values;
}

// ---------------------------------------------------------------- axioms

void task_axioms(Context& ctx)
{
    ObjectReader p(ctx.cfg.params, "/params");
    AxiomOptions o;
    o.thetas = p.numbers("thetas", o.thetas);
    o.lambdas = p.numbers("lambdas", o.lambdas);
    o.max_pairs = static_cast<int>(p.integer("max_pairs", o.max_pairs));
    o.events_per_depth = static_cast<int>(p.integer("events_per_depth", o.events_per_depth));
    o.tol = p.number("tol", o.tol);
    std::map<Axiom, std::string> expect;
    if (p.has("expect")) {
        const json& e = p.child("expect");
        if (!e.is_object()) {
            p.fail("expect", "expected an object mapping axioms to \"pass\", \"fail\" or \"any\"");
        }
        for (auto it = e.begin(); it != e.end(); ++it) {
            const auto a = parse_axiom(it.key());
            if (!a) {
                throw ConfigError("/params/expect/" + it.key() + ": unknown axiom (r1..r8)");
            }
            if (!it->is_string() || (*it != "pass" && *it != "fail" && *it != "any")) {
                throw ConfigError("/params/expect/" + it.key() + ": expected \"pass\", \"fail\" or \"any\"");
            }
            expect[*a] = it->get<std::string>();
        }
    }
    p.finish();
    const auto& d = require_drm(ctx.cfg);
    require_claims(ctx.claims, "axioms");
    const auto tree = make_tree(ctx.cfg.tree, ctx.claims, true);
    ctx.report.tree = tree_json(tree);
    const auto drm = build_drm(d, tree);
    const auto r = check_axioms(drm, ctx.claims, ctx.cfg.seed, o);

    auto& t = ctx.report.table("axioms", {"axiom", "name", "status", "tested", "skipped", "violations", "max_gap",
                                          "witness_claims", "witness_depth", "witness_node", "witness_param",
                                          "reproduced_gap"});
    for (Axiom a : kAllAxioms) {
        const auto& c = r.at(a);
        json depth = nullptr, node = nullptr, param = nullptr, reproduced = nullptr;
        if (c.witness) {
            depth = c.witness->node.depth;
            node = c.witness->node.index;
            param = c.witness->param;
            const double again = reproduce(drm, *c.witness);
            reproduced = again;
            ctx.report.check(axiom_code(a) + " witness reproduces",
                             std::abs(again - c.witness->gap) <= 1e-12 * (1.0 + std::abs(c.witness->gap)),
                             "gap " + fmt(c.witness->gap) + ", re-evaluated " + fmt(again));
        }
        t.add({axiom_code(a), axiom_name(a), to_string(c.status), c.tested, c.skipped, c.violations, c.max_gap,
               witness_claims(c.witness), depth, node, param, reproduced});
        const auto it = expect.find(a);
        const std::string want = it == expect.end() ? "pass" : it->second;
        if (want == "any") {
            continue;
        }
        if (c.status == CheckStatus::not_tested && it == expect.end()) {
            ctx.report.warnings.push_back(axiom_code(a) + " not tested (no certified evaluation)");
            continue;
        }
        ctx.report.check(axiom_code(a) + " " + want, to_string(c.status) == want,
                         "status " + to_string(c.status) + ", max gap " + fmt(c.max_gap));
    }
}

// ---------------------------------------------------------------- domination

void task_domination(Context& ctx)
{
    const auto& d = require_drm(ctx.cfg);
    const auto [mu0, nu0] = bounds_of(d);
    ObjectReader p(ctx.cfg.params, "/params");
    const double mu = p.number("mu", mu0);
    const double nu = p.number("nu", nu0);
    DominationOptions o;
    o.thetas = p.numbers("thetas", o.thetas);
    o.z_grid = p.numbers("z_grid", o.z_grid);
    o.max_pairs = static_cast<int>(p.integer("max_pairs", o.max_pairs));
    o.tol = p.number("tol", o.tol);
    p.finish();
    if (std::any_of(o.thetas.begin(), o.thetas.end(), [](double th) { return !(th > 0.0 && th < 1.0); })) {
        throw ConfigError("/params/thetas: every theta must lie in (0, 1)");
    }
    require_claims(ctx.claims, "domination");
    const auto tree = make_tree(ctx.cfg.tree, ctx.claims, false);
    ctx.report.tree = tree_json(tree);
    const auto r = check_domination(build_drm(d, tree), mu, nu, ctx.claims, ctx.cfg.seed, o);
    auto& t = ctx.report.table("domination", {"check", "status", "tested", "violations", "max_gap", "witness_claims",
                                              "witness_depth", "witness_node", "witness_param"});
    for (const PropertyCheck* c : {&r.condition_a, &r.theta_domination, &r.linf_bound}) {
        json depth = nullptr, node = nullptr, param = nullptr;
        if (c->witness) {
            depth = c->witness->node.depth;
            node = c->witness->node.index;
            param = c->witness->param;
        }
        t.add({c->name, to_string(c->status), c->tested, c->violations, c->max_gap, witness_claims(c->witness), depth,
               node, param});
        ctx.report.check(c->name, c->status != CheckStatus::fail,
                         std::to_string(c->violations) + " violations, max gap " + fmt(c->max_gap));
    }
    ctx.report.results["bounds"] = json{{"mu", mu}, {"nu", nu}};
    if (r.uncertified_bounds > 0) {
        ctx.report.warnings.push_back(std::to_string(r.uncertified_bounds) +
                                      " bounding solves lack the step certificate");
    }
}

// ---------------------------------------------------------------- dual

TreeProcess random_density(const ScenarioTree& tree, std::uint64_t seed, double amplitude, double delta)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    const double cap = (1.0 - delta) / tree.sqrt_dt() * (1.0 - 1e-9);
    TreeProcess q(tree, tree.steps() - 1);
    for (int k = 0; k < tree.steps(); ++k) {
        for (double& v : q.slice(k)) {
            v = std::clamp(u(rng), -cap, cap);
        }
    }
    return q;
}

void task_dual(Context& ctx)
{
    ObjectReader p(ctx.cfg.params, "/params");
    const auto constants = p.numbers("q_constant", std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
    long long random_count = 0;
    double amplitude = 1.0;
    if (p.has("q_random")) {
        ObjectReader rq(p.child("q_random"), "/params/q_random");
        random_count = rq.integer("count");
        amplitude = rq.number("amplitude", 1.0);
        rq.finish();
    }
    DualityOptions o;
    o.slack_c = p.number("slack_c", 0.0);
    o.optimal_tol = p.number("optimal_tol", o.optimal_tol);
    o.delta = p.number("delta", o.delta);
    p.finish();
    const auto& d = require_drm(ctx.cfg);
    require_claims(ctx.claims, "dual");
    if (ctx.claims.size() != 1) {
        throw ConfigError("/claims: task dual takes exactly one claim");
    }
    const auto tree = make_tree(ctx.cfg.tree, ctx.claims, false);
    ctx.report.tree = tree_json(tree);
    const auto drm = build_drm(d, tree);

    std::vector<SweepEntry> sweep;
    for (double q : constants) {
        if (std::abs(q) * tree.sqrt_dt() > 1.0 - o.delta) {
            ctx.report.warnings.push_back("constant q = " + fmt(q) + " is not admissible at this step size; skipped");
            continue;
        }
        sweep.push_back(SweepEntry{"const:" + fmt(q), DensityProcess::constant(tree, q, o.delta)});
    }
    for (long long i = 0; i < random_count; ++i) {
        sweep.push_back(SweepEntry{"random:" + std::to_string(i),
                                   DensityProcess::make(random_density(tree, ctx.cfg.seed + static_cast<std::uint64_t>(i),
                                                                       amplitude, o.delta),
                                                        o.delta)});
    }
    DualityReport r;
    try {
        r = verify_duality(drm, ctx.claims.front(), sweep, o);
    }
    catch (const std::invalid_argument& e) {
        throw PreconditionError(e.what());
    }
    auto& t = ctx.report.table("duality", {"q_param", "dual_value", "gap"});
    double worst_excess = 0.0;
    for (const auto& row : r.rows) {
        t.add({row.label, to_json(row.dual_value), to_json(row.gap)});
        if (row.dual_value.is_finite()) {
            worst_excess = std::max(worst_excess, row.dual_value.value() - r.rho0);
        }
    }
    t.add({r.optimal.label, to_json(r.optimal.dual_value), to_json(r.optimal.gap)});
    ctx.report.results["rho0"] = r.rho0;
    ctx.report.results["optimal_gap"] = to_json(r.optimal.gap);
    ctx.report.results["max_fenchel_residual"] = r.max_fenchel_residual;
    ctx.report.results["weak_duality_c"] = worst_excess / tree.dt();
    if (r.gibbs_gap) {
        ctx.report.results["gibbs_gap"] = *r.gibbs_gap;
    }
    const auto infeasible = std::count_if(r.rows.begin(), r.rows.end(), [](const DualityRow& x) { return !x.feasible; });
    ctx.report.results["infeasible_rows"] = infeasible;
    const auto violations = std::count_if(r.rows.begin(), r.rows.end(), [](const DualityRow& x) { return x.violation; });
    ctx.report.check("weak duality", violations == 0, std::to_string(violations) + " swept densities exceed rho0");
    ctx.report.check("optimal gap", r.passed || violations > 0,
                     "gap at the " + r.optimal.label + " density " + r.optimal.gap.to_string());
}

// ---------------------------------------------------------------- penalize

void task_penalize(Context& ctx)
{
    const auto& d = require_drm(ctx.cfg);
    const auto [mu0, nu0] = bounds_of(d);
    ObjectReader p(ctx.cfg.params, "/params");
    const double z = p.number("z", 1.0);
    const double mu_bar = p.number("mu_bar", mu0);
    const double nu_bar = p.number("nu_bar", nu0);
    const std::string input = p.text("input", "canonical");
    const double drift_scale = p.number("drift_scale", 1.0);
    const auto schedule = p.numbers("schedule", default_schedule());
    const bool has_slope = p.has("expect_slope");
    const double slope = has_slope ? p.number("expect_slope") : 0.0;
    const double slope_tol = p.number("slope_rel_tol", 0.02);
    p.finish();
    if (input != "canonical" && input != "matched") {
        throw ConfigError("/params/input: expected \"canonical\" or \"matched\"");
    }
    const auto tree = make_tree(ctx.cfg.tree, {}, false);
    ctx.report.tree = tree_json(tree);
    const auto drm = build_drm(d, tree);
    const TreeProcess Y = input == "canonical" ? linear_drift(tree, drift_scale * canonical_drift(mu_bar, nu_bar, z))
                                               : matched_drift(drm, z);
    std::optional<Decomposition> solved;
    try {
        solved = doob_meyer(drm, Y, z, schedule);
    }
    catch (const PreconditionError& e) {
        ctx.report.table("penalization", {"n", "max_gap", "max_Y_minus_y"});
        ctx.report.table("compensator", {"depth", "t", "A_min", "A_max"});
        ctx.report.check("supermartingale input", false, e.what());
        return;
    }
    const Decomposition& dm = *solved;
    auto& t = ctx.report.table("penalization", {"n", "max_gap", "max_Y_minus_y"});
    for (const auto& l : dm.levels) {
        t.add({l.n, l.max_gap, l.max_Y_minus_y});
    }
    auto& a = ctx.report.table("compensator", {"depth", "t", "A_min", "A_max"});
    double slope_err = 0.0;
    for (int k = 0; k <= tree.steps(); ++k) {
        const auto s = dm.A.slice(k);
        const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
        a.add({k, tree.time(k), *lo, *hi});
        slope_err = std::max({slope_err, std::abs(*lo - slope * tree.time(k)), std::abs(*hi - slope * tree.time(k))});
    }
    const double bound = 2.0 * tree.horizon() * canonical_drift(mu_bar, nu_bar, z);
    const double a_max = dm.A.max_abs(tree.steps());
    ctx.report.results["n_achieved"] = dm.n_achieved;
    ctx.report.results["early_stop"] = dm.early_stop;
    ctx.report.results["max_martingale_gap"] = dm.max_martingale_gap;
    ctx.report.results["A_T_max"] = a_max;
    ctx.report.results["A_T_bound"] = bound;
    ctx.report.check("monotone in n", dm.monotone_in_n,
                     dm.monotonicity_witness ? "y^n decreased by " + fmt(dm.monotonicity_gap) + " at " +
                                                   to_string(*dm.monotonicity_witness)
                                             : "y^n nondecreasing across the schedule");
    ctx.report.check("gap nonincreasing", dm.gap_nonincreasing, "final gap " + fmt(dm.max_martingale_gap));
    ctx.report.check("A_T bound", a_max <= bound * (1.0 + 1e-12), "max A_T " + fmt(a_max) + " vs " + fmt(bound));
    if (has_slope) {
        const double allowed = slope_tol * std::abs(slope) * tree.horizon();
        ctx.report.check("A matches slope", slope_err <= allowed,
                         "max |A_t - " + fmt(slope) + " t| = " + fmt(slope_err) + " (allowed " + fmt(allowed) + ")");
    }
}

// ---------------------------------------------------------------- represent

void task_represent(Context& ctx)
{
    const auto& d = require_drm(ctx.cfg);
    const auto [mu0, nu0] = bounds_of(d);
    ObjectReader p(ctx.cfg.params, "/params");
    double lo = -2.0, hi = 2.0;
    long long count = 81;
    if (p.has("z_grid")) {
        ObjectReader zg(p.child("z_grid"), "/params/z_grid");
        lo = zg.number("lo");
        hi = zg.number("hi");
        count = zg.integer("count");
        zg.finish();
        if (!(hi > lo) || count < 3) {
            p.fail("z_grid", "need lo < hi and count >= 3");
        }
    }
    RepresentOptions o;
    const auto t_grid = p.numbers("t_grid", std::vector<double>{0.0});
    o.mu = p.number("mu", mu0);
    o.nu = p.number("nu", nu0);
    o.check_preconditions = p.boolean("check_preconditions", true);
    o.check_depth = static_cast<int>(p.integer("check_depth", o.check_depth));
    const double rel_tol = p.number("rel_tol", 0.02);
    const double roundtrip_c = p.number("roundtrip_c", 1.0);
    const long long pre_count = p.integer("precondition_claims", 6);
    p.finish();
    o.seed = ctx.cfg.seed;
    o.claims = claims::random_family(ctx.cfg.seed, static_cast<int>(pre_count), 0.25);

    const auto tree = make_tree(ctx.cfg.tree, ctx.claims, false);
    ctx.report.tree = tree_json(tree);
    const auto drm = build_drm(d, tree);
    Representation rep = [&] {
        try {
            return represent(drm, linspace(lo, hi, static_cast<int>(count)), t_grid, o);
        }
        catch (const PreconditionError& e) {
            ctx.report.check("preconditions", false, e.what());
            throw;
        }
    }();
    auto& pc = ctx.report.table("preconditions", {"check", "status", "tested", "skipped", "max_gap"});
    for (const auto& c : rep.preconditions) {
        pc.add({c.name, to_string(c.status), c.tested, c.skipped, c.max_gap});
    }
    const std::optional<Generator>& reference = drm.generator();
    auto& gt = ctx.report.table("generator", {"t", "z", "g_hat", "reference"});
    double worst_rel = 0.0;
    for (std::size_t i = 0; i < rep.t_grid.size(); ++i) {
        for (std::size_t j = 0; j < rep.z_grid.size(); ++j) {
            const double t = rep.t_grid[i];
            const double z = rep.z_grid[j];
            json ref = nullptr;
            if (reference) {
                const double g = (*reference)(t, z);
                ref = g;
                if (g != 0.0) {
                    worst_rel = std::max(worst_rel, std::abs(rep.values[i][j] - g) / std::abs(g));
                }
            }
            gt.add({t, z, rep.values[i][j], ref});
        }
    }
    if (reference) {
        ctx.report.results["max_relative_error"] = worst_rel;
        ctx.report.check("driver recovered", worst_rel <= rel_tol,
                         "max relative error " + fmt(worst_rel) + " against " + reference->name());
    }
    auto& rt = ctx.report.table("roundtrip", {"claim", "rho0", "rho0_hat", "gap"});
    std::vector<Claim> usable;
    for (const auto& c : ctx.claims) {
        if (tree.is_full() || c.path_independent()) {
            usable.push_back(c);
        }
        else {
            ctx.report.warnings.push_back("claim " + c.label() + " skipped: needs a full tree");
        }
    }
    for (const auto& row : round_trip(drm, rep.generator, usable)) {
        rt.add({row.claim, row.rho0, row.rho0_hat, row.gap});
        const double allowed = roundtrip_c * tree.dt() * (1.0 + std::abs(row.rho0));
        ctx.report.check("round trip " + row.claim, row.gap <= allowed,
                         "gap " + fmt(row.gap) + " (allowed " + fmt(allowed) + ")");
    }
}

// ---------------------------------------------------------------- converge

void task_converge(Context& ctx)
{
    ObjectReader p(ctx.cfg.params, "/params");
    std::vector<long long> steps;
    if (p.has("steps")) {
        const json& s = p.child("steps");
        if (!s.is_array() || s.empty()) {
            p.fail("steps", "expected a non-empty array of step counts");
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!s[i].is_number_integer() || s[i].get<long long>() < 1) {
                throw ConfigError("/params/steps/" + std::to_string(i) + ": expected a positive integer");
            }
            steps.push_back(s[i].get<long long>());
        }
    }
    else {
        steps = {64, 128, 256, 512, 1024};
    }
    std::vector<std::string> schemes{"explicit_euler", "entropy_exact"};
    if (p.has("schemes")) {
        const json& s = p.child("schemes");
        if (!s.is_array() || s.size() != 2 || !s[0].is_string() || !s[1].is_string()) {
            p.fail("schemes", "expected [scheme, reference scheme]");
        }
        schemes = {s[0].get<std::string>(), s[1].get<std::string>()};
    }
    const double ratio_tol = p.number("ratio_tol", 0.2);
    p.finish();
    const auto& d = require_drm(ctx.cfg);
    require_claims(ctx.claims, "converge");

    struct Cell {
        double value = 0.0;
        double reference = 0.0;
    };
    std::vector<Cell> cells(ctx.claims.size() * steps.size());
    std::vector<json> trees(steps.size());
    for (std::size_t j = 0; j < steps.size(); ++j) {
        TreeSpec ts = ctx.cfg.tree;
        ts.steps = static_cast<int>(steps[j]);
        trees[j] = tree_json(make_tree(ts, ctx.claims, false));
    }
    parallel_for(cells.size(), ctx.options.jobs, [&](std::size_t idx) {
        const std::size_t i = idx / steps.size();
        const std::size_t j = idx % steps.size();
        TreeSpec ts = ctx.cfg.tree;
        ts.steps = static_cast<int>(steps[j]);
        const auto tree = make_tree(ts, {ctx.claims[i]}, false);
        cells[idx].value = run_scheme(d, schemes[0], tree, ctx.claims[i]).Y.root();
        cells[idx].reference = run_scheme(d, schemes[1], tree, ctx.claims[i]).Y.root();
    });
    ctx.report.tree = json{{"horizon", ctx.cfg.tree.horizon}, {"levels", trees}};
    auto& t = ctx.report.table("convergence", {"claim", "steps", "value", "reference", "error", "ratio"});
    for (std::size_t i = 0; i < ctx.claims.size(); ++i) {
        double previous = 0.0;
        for (std::size_t j = 0; j < steps.size(); ++j) {
            const auto& c = cells[i * steps.size() + j];
            const double err = std::abs(c.value - c.reference);
            json ratio = nullptr;
            if (j > 0) {
                const double r = err > 0.0 ? previous / err : HUGE_VAL;
                ratio = r;
                const bool ok = std::isfinite(r) && std::abs(r - 2.0) <= 2.0 * ratio_tol;
                ctx.report.check("ratio " + ctx.claims[i].label() + " N=" + std::to_string(steps[j]), ok,
                                 "error ratio " + fmt(r));
            }
            t.add({ctx.claims[i].label(), steps[j], c.value, c.reference, err, ratio});
            previous = err;
        }
    }
    ctx.report.results["schemes"] = schemes;
}

}  // namespace

RunReport run(ScenarioConfig config, Task task, const RunOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    if (config.task && *config.task != task) {
        throw ConfigError("/task: config names task '" + to_string(*config.task) + "' but '" + to_string(task) +
                          "' was requested");
    }
    if (options.seed) {
        config.seed = *options.seed;
    }
    RunReport report;
    report.task = to_string(task);
    report.config = config.echo;
    report.results["seed"] = config.seed;
    Context ctx{config, options, report, config.claims()};
    try {
        switch (task) {
        case Task::solve: task_solve(ctx); break;
        case Task::axioms: task_axioms(ctx); break;
        case Task::domination: task_domination(ctx); break;
        case Task::dual: task_dual(ctx); break;
        case Task::penalize: task_penalize(ctx); break;
        case Task::represent: task_represent(ctx); break;
        case Task::converge: task_converge(ctx); break;
        }
    }
    catch (const PreconditionError& e) {
        if (report.passed()) {
            report.check("preconditions", false, e.what());
        }
    }
    report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace gexp::cli
