#include "gexp/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace gexp {

std::string axiom_code(Axiom axiom)
{
    return "r" + std::to_string(static_cast<int>(axiom));
}

std::string axiom_name(Axiom axiom)
{
    switch (axiom) {
    case Axiom::monotonicity: return "monotonicity";
    case Axiom::time_consistency: return "time_consistency";
    case Axiom::constant_preservation: return "constant_preservation";
    case Axiom::convexity: return "convexity";
    case Axiom::subadditivity: return "subadditivity";
    case Axiom::positive_homogeneity: return "positive_homogeneity";
    case Axiom::translation_invariance: return "translation_invariance";
    case Axiom::regularity: return "regularity";
    }
    return "unknown";
}

std::optional<Axiom> parse_axiom(const std::string& text)
{
    for (Axiom a : kAllAxioms) {
        if (text == axiom_code(a) || text == axiom_name(a)) {
            return a;
        }
    }
    return std::nullopt;
}

std::string to_string(CheckStatus status)
{
    switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::not_tested: return "not_tested";
    }
    return "unknown";
}

namespace {

template <class F>
TreeProcess leafwise(const TreeProcess& a, const TreeProcess& b, F&& f)
{
    const int n = a.tree().steps();
    TreeProcess out(a.tree(), n);
    auto sa = a.slice(n);
    auto sb = b.slice(n);
    auto so = out.slice(n);
    for (std::size_t i = 0; i < so.size(); ++i) {
        so[i] = f(sa[i], sb[i]);
    }
    return out;
}

template <class F>
TreeProcess leafwise(const TreeProcess& a, F&& f)
{
    return leafwise(a, a, [&](double x, double) { return f(x); });
}

bool certified_of(const SolvedBSDE& s)
{
    return !s.certificate.available || s.certificate.monotone;
}

// Collects per-node gaps and the magnitude scale.
struct GapBuilder {
    TreeProcess gap;
    double scale = 1.0;
    bool certified = true;

    explicit GapBuilder(const ScenarioTree& tree) : gap(tree, tree.steps()) {}

    void see(const SolvedBSDE& s)
    {
        scale = std::max(scale, 1.0 + s.Y.max_abs());
        certified = certified && certified_of(s);
    }
};

}  // namespace

TreeProcess axiom_gap(const DynamicRiskMeasure& drm, const AxiomCase& c, double* scale, bool* certified)
{
    const auto& tree = drm.tree();
    tree.require_full("axiom checks");
    const int n = tree.steps();
    if (c.claims.empty()) {
        throw std::invalid_argument("axiom case without claims");
    }
    const Claim& ca = c.claims.front();
    const Claim& cb = c.claims.size() > 1 ? c.claims[1] : c.claims.front();
    const TreeProcess a = ca.terminal(tree);
    const TreeProcess b = cb.terminal(tree);
    GapBuilder out(tree);
    auto eval = [&](const TreeProcess& x, int depth = -1) {
        auto s = drm.evaluate(x, depth);
        out.see(s);
        return s;
    };
    auto each_node = [&](int from, int to, auto&& f) {
        for (int k = from; k <= to; ++k) {
            auto g = out.gap.slice(k);
            for (std::size_t i = 0; i < g.size(); ++i) {
                g[i] = f(k, i);
            }
        }
    };

    switch (c.axiom) {
    case Axiom::monotonicity: {
        // max(a, b) >= min(a, b) must not cost more capital.
        const auto hi = eval(leafwise(a, b, [](double x, double y) { return std::max(x, y); }));
        const auto lo = eval(leafwise(a, b, [](double x, double y) { return std::min(x, y); }));
        each_node(0, n, [&](int k, std::size_t i) { return hi.Y.at(k, i) - lo.Y.at(k, i); });
        break;
    }
    case Axiom::time_consistency: {
        const int t = c.depth;
        const auto full = eval(a);
        TreeProcess position(tree, t);
        auto src = full.Y.slice(t);
        auto dst = position.slice(t);
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = -src[i];
        }
        const auto nested = eval(position, t);
        each_node(0, t, [&](int k, std::size_t i) { return std::abs(nested.Y.at(k, i) - full.Y.at(k, i)); });
        break;
    }
    case Axiom::constant_preservation: {
        // An F_t-measurable position (or a constant when t = 0) is its own
        // negative capital requirement from t on.
        const int t = c.depth;
        const TreeProcess x = cond_expect(a, t);
        const auto r = eval(x);
        each_node(t, n, [&](int k, std::size_t i) { return std::abs(r.Y.at(k, i) + x.at(k, i)); });
        break;
    }
    case Axiom::convexity: {
        const double l = c.param;
        const auto ra = eval(a);
        const auto rb = eval(b);
        const auto mix = eval(leafwise(a, b, [l](double x, double y) { return l * x + (1.0 - l) * y; }));
        each_node(0, n, [&](int k, std::size_t i) {
            return mix.Y.at(k, i) - (l * ra.Y.at(k, i) + (1.0 - l) * rb.Y.at(k, i));
        });
        break;
    }
    case Axiom::subadditivity: {
        const auto ra = eval(a);
        const auto rb = eval(b);
        const auto sum = eval(leafwise(a, b, [](double x, double y) { return x + y; }));
        each_node(0, n, [&](int k, std::size_t i) { return sum.Y.at(k, i) - ra.Y.at(k, i) - rb.Y.at(k, i); });
        break;
    }
    case Axiom::positive_homogeneity: {
        const double l = c.param;
        const auto ra = eval(a);
        const auto scaled = eval(leafwise(a, [l](double x) { return l * x; }));
        each_node(0, n, [&](int k, std::size_t i) { return std::abs(scaled.Y.at(k, i) - l * ra.Y.at(k, i)); });
        break;
    }
    case Axiom::translation_invariance: {
        const int t = c.depth;
        const TreeProcess eta = cond_expect(b, t);
        const auto ra = eval(a);
        const auto shifted = eval(leafwise(a, eta, [](double x, double y) { return x + y; }));
        each_node(t, n, [&](int k, std::size_t i) {
            return std::abs(shifted.Y.at(k, i) - (ra.Y.at(k, i) - eta.at(k, i)));
        });
        break;
    }
    case Axiom::regularity: {
        if (!c.event) {
            throw std::invalid_argument("regularity case without an event");
        }
        const int t = c.event->depth;
        const std::size_t root = c.event->index;
        auto in_event = [&](int k, std::size_t i) { return tree.ancestor(k, i, t) == root; };
        TreeProcess x(tree, n);
        {
            auto sa = a.slice(n);
            auto sx = x.slice(n);
            for (std::size_t i = 0; i < sx.size(); ++i) {
                sx[i] = in_event(n, i) ? sa[i] : 0.0;
            }
        }
        const auto ra = eval(a);
        const auto rx = eval(x);
        each_node(t, n, [&](int k, std::size_t i) {
            const double expect = in_event(k, i) ? ra.Y.at(k, i) : 0.0;
            return std::abs(rx.Y.at(k, i) - expect);
        });
        break;
    }
    }
    if (scale != nullptr) {
        *scale = out.scale;
    }
    if (certified != nullptr) {
        *certified = out.certified;
    }
    return std::move(out.gap);
}

namespace {

bool gated(Axiom a)
{
    return a == Axiom::monotonicity || a == Axiom::convexity || a == Axiom::subadditivity;
}

std::vector<std::string> labels_of(const AxiomCase& c)
{
    std::vector<std::string> out;
    for (const auto& cl : c.claims) {
        out.push_back(cl.label());
    }
    return out;
}

void record(PropertyCheck& check, const std::string& property, const std::vector<std::string>& claims,
            const TreeProcess& gap, double scale, double tol, double param, const std::optional<AxiomCase>& replay)
{
    ++check.tested;
    double worst = -std::numeric_limits<double>::infinity();
    NodeId where;
    for (int k = 0; k <= gap.last_depth(); ++k) {
        auto s = gap.slice(k);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] > worst) {
                worst = s[i];
                where = NodeId{k, i};
            }
        }
    }
    const double relative = worst / scale;
    check.max_gap = std::max(check.max_gap, worst);
    if (relative > tol) {
        ++check.violations;
        if (!check.witness || worst > check.witness->gap) {
            check.witness = Witness{property, claims, where, worst, param, replay};
        }
    }
}

void finalize(PropertyCheck& check)
{
    if (check.violations > 0) {
        check.status = CheckStatus::fail;
    }
    else {
        check.status = check.tested > 0 ? CheckStatus::pass : CheckStatus::not_tested;
    }
}

std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t m, int max_pairs, std::mt19937_64& rng)
{
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i != j || m == 1) {
                pairs.emplace_back(i, j);
            }
        }
    }
    std::shuffle(pairs.begin(), pairs.end(), rng);
    if (static_cast<int>(pairs.size()) > max_pairs) {
        pairs.resize(static_cast<std::size_t>(max_pairs));
    }
    return pairs;
}

// At most `limit` distinct depths spread over [lo, hi].
std::vector<int> spread_depths(int lo, int hi, int limit)
{
    std::vector<int> out;
    const int count = hi - lo + 1;
    if (count <= limit) {
        for (int k = lo; k <= hi; ++k) {
            out.push_back(k);
        }
        return out;
    }
    for (int j = 0; j < limit; ++j) {
        out.push_back(lo + static_cast<int>(std::lround(static_cast<double>(j) * (count - 1) / (limit - 1))));
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

AxiomReport check_axioms(const DynamicRiskMeasure& drm, const std::vector<Claim>& claims, std::uint64_t seed,
                         const AxiomOptions& options)
{
    if (claims.empty()) {
        throw std::invalid_argument("check_axioms: empty claim set");
    }
    const auto& tree = drm.tree();
    tree.require_full("check_axioms");
    const int n = tree.steps();
    std::mt19937_64 rng(seed);
    const auto pairs = sample_pairs(claims.size(), options.max_pairs, rng);
    const auto depths = spread_depths(0, n, 12);

    AxiomReport report;
    for (Axiom a : kAllAxioms) {
        report.checks.push_back(PropertyCheck{axiom_code(a) + " " + axiom_name(a)});
    }
    auto run = [&](AxiomCase c) {
        auto& check = report.checks[static_cast<std::size_t>(c.axiom) - 1];
        double scale = 1.0;
        bool certified = true;
        const TreeProcess gap = axiom_gap(drm, c, &scale, &certified);
        if (gated(c.axiom) && !certified) {
            ++check.skipped;
            return;
        }
        record(check, axiom_code(c.axiom), labels_of(c), gap, scale, options.tol, c.param, c);
    };

    for (const auto& [i, j] : pairs) {
        const std::vector<Claim> pair{claims[i], claims[j]};
        run(AxiomCase{Axiom::monotonicity, pair});
        for (double l : options.thetas) {
            run(AxiomCase{Axiom::convexity, pair, l});
        }
        run(AxiomCase{Axiom::subadditivity, pair});
        for (int t : depths) {
            run(AxiomCase{Axiom::translation_invariance, pair, 0.0, t});
        }
    }
    for (const auto& c : claims) {
        const std::vector<Claim> one{c};
        for (int t : depths) {
            run(AxiomCase{Axiom::time_consistency, one, 0.0, t});
            run(AxiomCase{Axiom::constant_preservation, one, 0.0, t});
        }
        for (double l : options.lambdas) {
            run(AxiomCase{Axiom::positive_homogeneity, one, l});
        }
        for (int t = 1; t < n; ++t) {
            std::uniform_int_distribution<std::size_t> pick(0, tree.width(t) - 1);
            for (int e = 0; e < options.events_per_depth; ++e) {
                run(AxiomCase{Axiom::regularity, one, 0.0, t, NodeId{t, pick(rng)}});
            }
        }
    }
    for (auto& check : report.checks) {
        finalize(check);
    }
    return report;
}

double reproduce(const DynamicRiskMeasure& drm, const Witness& witness)
{
    if (!witness.replay) {
        throw std::invalid_argument("reproduce: witness carries no replay case");
    }
    return axiom_gap(drm, *witness.replay).at(witness.node.depth, witness.node.index);
}

DominationReport check_domination(const DynamicRiskMeasure& drm, double mu, double nu,
                                  const std::vector<Claim>& claims, std::uint64_t seed,
                                  const DominationOptions& options)
{
    if (claims.empty()) {
        throw std::invalid_argument("check_domination: empty claim set");
    }
    const auto& tree = drm.tree();
    const int n = tree.steps();
    DominationReport report;
    report.condition_a.name = "condition_a";
    report.theta_domination.name = "theta_domination";
    report.linf_bound.name = "linf_bound";

    const auto upper = quadratic_upper(mu, nu);
    const auto lower = quadratic_lower(mu, nu);
    for (const auto& c : claims) {
        const auto x = c.terminal(tree);
        const auto r = drm.evaluate(x);
        const auto hi = DynamicRiskMeasure::from_generator(upper, tree).evaluate(x);
        const auto lo = DynamicRiskMeasure::from_generator(lower, tree).evaluate(x);
        report.uncertified_bounds += (hi.certificate.monotone ? 0 : 1) + (lo.certificate.monotone ? 0 : 1);
        // Comparison only holds for monotone discrete solves.
        if (!certified_of(r) || !hi.certificate.monotone || !lo.certificate.monotone) {
            ++report.condition_a.skipped;
            continue;
        }
        TreeProcess gap(tree, n);
        for (int k = 0; k <= n; ++k) {
            auto g = gap.slice(k);
            for (std::size_t i = 0; i < g.size(); ++i) {
                g[i] = std::max(lo.Y.at(k, i) - r.Y.at(k, i), r.Y.at(k, i) - hi.Y.at(k, i));
            }
        }
        const double scale = 1.0 + std::max({r.Y.max_abs(), hi.Y.max_abs(), lo.Y.max_abs()});
        record(report.condition_a, "condition_a", {c.label()}, gap, scale, options.tol, 0.0, std::nullopt);
    }

    std::mt19937_64 rng(seed);
    const auto pairs = sample_pairs(claims.size(), options.max_pairs, rng);
    const TreeProcess bt = brownian(tree);
    for (const auto& [i, j] : pairs) {
        const auto a = claims[i].terminal(tree);
        const auto b = claims[j].terminal(tree);
        const std::vector<std::string> labels{claims[i].label(), claims[j].label()};
        const auto ra = drm.evaluate(a);
        const auto rb = drm.evaluate(b);
        for (double th : options.thetas) {
            const auto rc = drm.evaluate(leafwise(a, b, [th](double x, double y) { return (x - th * y) / (1.0 - th); }));
            TreeProcess gap(tree, n);
            for (int k = 0; k <= n; ++k) {
                auto g = gap.slice(k);
                for (std::size_t m = 0; m < g.size(); ++m) {
                    g[m] = ra.Y.at(k, m) - th * rb.Y.at(k, m) - (1.0 - th) * rc.Y.at(k, m);
                }
            }
            const double scale = 1.0 + std::max({ra.Y.max_abs(), rb.Y.max_abs(), rc.Y.max_abs()});
            record(report.theta_domination, "theta_domination", labels, gap, scale, options.tol, th, std::nullopt);
        }
        double sup_diff = 0.0;
        {
            auto sa = a.slice(n);
            auto sb = b.slice(n);
            for (std::size_t m = 0; m < sa.size(); ++m) {
                sup_diff = std::max(sup_diff, std::abs(sa[m] - sb[m]));
            }
        }
        for (double z : options.z_grid) {
            const auto az = drm.evaluate(leafwise(a, bt, [z](double x, double w) { return x - z * w; }));
            const auto bz = drm.evaluate(leafwise(b, bt, [z](double x, double w) { return x - z * w; }));
            if (!certified_of(az) || !certified_of(bz)) {
                ++report.linf_bound.skipped;
                continue;
            }
            TreeProcess gap(tree, n);
            for (int k = 0; k <= n; ++k) {
                auto g = gap.slice(k);
                for (std::size_t m = 0; m < g.size(); ++m) {
                    g[m] = std::abs(az.Y.at(k, m) - bz.Y.at(k, m)) - sup_diff;
                }
            }
            const double scale = 1.0 + std::max(az.Y.max_abs(), bz.Y.max_abs());
            record(report.linf_bound, "linf_bound", labels, gap, scale, options.tol, z, std::nullopt);
        }
    }
    finalize(report.condition_a);
    finalize(report.theta_domination);
    finalize(report.linf_bound);
    return report;
}

SupermartingaleCheck check_supermartingale(const DynamicRiskMeasure& drm, const TreeProcess& X, double tol)
{
    const auto& tree = drm.tree();
    SupermartingaleCheck out;
    out.max_violation = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < X.last_depth(); ++k) {
        auto x = X.slice(k);
        auto next = X.slice(k + 1);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = drm.one_step(k, i, -next[tree.up(k, i)], -next[tree.down(k, i)]);
            const double v = r - x[i];
            out.max_martingale_gap = std::max(out.max_martingale_gap, std::abs(v));
            if (v > out.max_violation) {
                out.max_violation = v;
                out.worst = NodeId{k, i};
            }
            if (v > tol * (1.0 + std::abs(x[i]))) {
                out.holds = false;
            }
        }
    }
    if (X.last_depth() == 0) {
        out.max_violation = 0.0;
    }
    return out;
}

StoppingReport optional_stopping_check(const DynamicRiskMeasure& drm, const TreeProcess& Y, const StoppingTime& sigma,
                                       const StoppingTime& tau, double tol)
{
    const auto& tree = drm.tree();
    tree.require_full("optional stopping");
    if (!(sigma.tree() == tree) || !(tau.tree() == tree)) {
        throw std::invalid_argument("optional stopping: stopping times live on a different tree");
    }
    const int n = tree.steps();
    StoppingReport report;
    report.precondition = check_supermartingale(drm, Y, tol);
    report.precondition_holds = report.precondition.holds;
    if (!report.precondition_holds) {
        return report;
    }
    // V_k = rho_k(-Y_tau).
    TreeProcess value(tree, n);
    for (int k = n; k >= 0; --k) {
        auto v = value.slice(k);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (auto stop = tau.stopped_by(k, i)) {
                v[i] = Y.at(*stop, tree.ancestor(k, i, *stop));
            }
            else {
                v[i] = drm.one_step(k, i, -value.at(k + 1, tree.up(k, i)), -value.at(k + 1, tree.down(k, i)));
            }
        }
    }
    for (int k = 0; k <= n; ++k) {
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            const auto s = sigma.stopped_by(k, i);
            if (!s || *s != k) {
                continue;
            }
            const auto t = tau.stopped_by(k, i);
            const int m = t ? *t : k;
            const double bound = Y.at(m, tree.ancestor(k, i, m));
            const double gap = value.at(k, i) - bound;
            ++report.checked_nodes;
            report.max_gap = std::max(report.max_gap, gap);
            if (gap > tol * (1.0 + std::abs(bound))) {
                ++report.violations;
                if (!report.witness || gap > report.witness->gap) {
                    report.witness = Witness{"optional_stopping", {sigma.label(), tau.label()}, NodeId{k, i}, gap, 0.0,
                                             std::nullopt};
                }
            }
        }
    }
    return report;
}

}  // namespace gexp
