#include "gexp/dual.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gexp {

DensityProcess DensityProcess::make(const TreeProcess& q, double delta)
{
    const auto& tree = q.tree();
    const int n = tree.steps();
    if (q.last_depth() < n - 1) {
        throw std::invalid_argument("density: q must be defined on depths 0..N-1");
    }
    if (!(delta >= 0.0 && delta < 1.0)) {
        throw std::invalid_argument("density: admissibility margin must lie in [0, 1)");
    }
    TreeProcess copy(tree, n - 1);
    for (int k = 0; k < n; ++k) {
        auto src = q.slice(k);
        auto dst = copy.slice(k);
        for (std::size_t i = 0; i < dst.size(); ++i) {
            const double v = src[i];
            if (!std::isfinite(v) || std::abs(v) * tree.sqrt_dt() > 1.0 - delta) {
                std::ostringstream os;
                os << "density: q = " << v << " at " << to_string(NodeId{k, i}) << " violates |q| sqrt(dt) <= 1 - "
                   << delta;
                throw std::invalid_argument(os.str());
            }
            dst[i] = v;
        }
    }
    return DensityProcess(std::move(copy), delta);
}

DensityProcess DensityProcess::constant(const ScenarioTree& tree, double q, double delta)
{
    return make(TreeProcess(tree, tree.steps() - 1, q), delta);
}

namespace {

void attach_theta(TiltedMeasure& m)
{
    const auto& tree = m.p_up.tree();
    if (!tree.is_full()) {
        return;
    }
    const int n = tree.steps();
    TreeProcess theta(tree, n, 1.0);
    TreeProcess log_theta(tree, n, 0.0);
    for (int k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            const std::size_t parent = i >> 1;
            // One-step density ratio 2p for up, 2(1-p) for down.
            const double p = m.p_up.at(k - 1, parent);
            const double ratio = (i & 1U) ? 2.0 * p : 2.0 * (1.0 - p);
            theta.at(k, i) = theta.at(k - 1, parent) * ratio;
            log_theta.at(k, i) = log_theta.at(k - 1, parent) + std::log(ratio);
        }
    }
    m.theta = std::move(theta);
    m.log_theta = std::move(log_theta);
}

}  // namespace

TiltedMeasure tilt(const DensityProcess& q)
{
    const auto& tree = q.tree();
    const double s = tree.sqrt_dt();
    TiltedMeasure m{q, TreeProcess::from_rule(tree, tree.steps() - 1,
                                              [&](int k, std::size_t i) { return 0.5 * (1.0 + q.q().at(k, i) * s); }),
                    std::nullopt, std::nullopt};
    attach_theta(m);
    return m;
}

TiltedMeasure tilt_from_probabilities(const TreeProcess& p_up)
{
    const auto& tree = p_up.tree();
    const int n = tree.steps();
    if (p_up.last_depth() < n - 1) {
        throw std::invalid_argument("tilt: probabilities must cover depths 0..N-1");
    }
    TreeProcess p(tree, n - 1);
    TreeProcess q(tree, n - 1);
    for (int k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            const double v = p_up.at(k, i);
            if (!(v > 0.0 && v < 1.0)) {
                throw std::invalid_argument("tilt: probability outside (0, 1) at " + to_string(NodeId{k, i}));
            }
            p.at(k, i) = v;
            q.at(k, i) = (2.0 * v - 1.0) / tree.sqrt_dt();
        }
    }
    TiltedMeasure m{DensityProcess::make(q, 0.0), std::move(p), std::nullopt, std::nullopt};
    attach_theta(m);
    return m;
}

TreeProcess cond_expect(const TreeProcess& proc, int depth, const TiltedMeasure& measure)
{
    return cond_expect(proc, depth, &measure.p_up);
}

RelativeEntropy relative_entropy(const TiltedMeasure& m, int depth)
{
    const auto& tree = m.p_up.tree();
    if (depth < 0) {
        depth = tree.steps();
    }
    tree.require_depth(depth, 0, "relative_entropy");
    RelativeEntropy out{TreeProcess(tree, depth), TreeProcess(tree, depth)};
    const double dt = tree.dt();
    for (int k = depth - 1; k >= 0; --k) {
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            const double p = m.p_up.at(k, i);
            const double q = m.density.q().at(k, i);
            const std::size_t u = tree.up(k, i);
            const std::size_t d = tree.down(k, i);
            out.discrete.at(k, i) = p * (std::log(2.0 * p) + out.discrete.at(k + 1, u)) +
                                    (1.0 - p) * (std::log(2.0 * (1.0 - p)) + out.discrete.at(k + 1, d));
            out.formula.at(k, i) =
                0.5 * q * q * dt + p * out.formula.at(k + 1, u) + (1.0 - p) * out.formula.at(k + 1, d);
        }
    }
    return out;
}

Penalty conjugate_penalty(const Generator& g)
{
    return [g](double t, double x) { return conjugate(g, t, x).f_value; };
}

DualValue dual_value(const TiltedMeasure& m, const Claim& xi, const Penalty& f)
{
    return dual_value(m, xi.terminal(m.p_up.tree()), f);
}

DualValue dual_value(const TiltedMeasure& m, const TreeProcess& xi_terminal, const Penalty& f)
{
    const auto& tree = m.p_up.tree();
    const int n = tree.steps();
    if (!(xi_terminal.tree() == tree) || xi_terminal.last_depth() != n) {
        throw std::invalid_argument("dual_value: claim and measure live on different trees");
    }
    DualValue out{TreeProcess(tree, n), TreeProcess(tree, n)};
    {
        auto src = xi_terminal.slice(n);
        auto dst = out.value.slice(n);
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = -src[i];
        }
    }
    const double dt = tree.dt();
    for (int k = n - 1; k >= 0; --k) {
        const double t = tree.time(k);
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            const std::size_t u = tree.up(k, i);
            const std::size_t d = tree.down(k, i);
            const ExtReal pen = f(t, m.density.q().at(k, i));
            if (!pen.is_finite() || out.minus_infinity.at(k + 1, u) != 0.0 ||
                out.minus_infinity.at(k + 1, d) != 0.0) {
                out.minus_infinity.at(k, i) = 1.0;
                out.feasible = false;
                if (!pen.is_finite()) {
                    // Depth-major traversal from the bottom: keep the shallowest.
                    out.infeasible_node = NodeId{k, i};
                }
                continue;
            }
            const double p = m.p_up.at(k, i);
            out.value.at(k, i) = p * out.value.at(k + 1, u) + (1.0 - p) * out.value.at(k + 1, d) - pen.value() * dt;
        }
    }
    return out;
}

TreeProcess entropic_dual_value(const TiltedMeasure& m, const TreeProcess& xi_terminal, double nu)
{
    const auto& tree = m.p_up.tree();
    const int n = tree.steps();
    TreeProcess v(tree, n);
    {
        auto src = xi_terminal.slice(n);
        auto dst = v.slice(n);
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = -src[i];
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            const double p = m.p_up.at(k, i);
            const double h = p * std::log(2.0 * p) + (1.0 - p) * std::log(2.0 * (1.0 - p));
            v.at(k, i) = p * v.at(k + 1, tree.up(k, i)) + (1.0 - p) * v.at(k + 1, tree.down(k, i)) - h / (2.0 * nu);
        }
    }
    return v;
}

OptimalDensity optimal_density(const SolvedBSDE& solved, double delta)
{
    if (!solved.generator || !solved.generator->flags().convex) {
        throw std::invalid_argument("optimal_density: needs a solve with a convex generator");
    }
    const Generator& g = *solved.generator;
    const auto& tree = solved.Y.tree();
    const int n = tree.steps();
    if (solved.terminal_depth != n) {
        throw std::invalid_argument("optimal_density: the solve must start at depth N");
    }
    TreeProcess q(tree, n - 1);
    TreeProcess residual(tree, n - 1);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t = tree.time(k);
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            const double z = solved.Z.at(k, i);
            const double x = subdifferential(g, t, z).midpoint();
            if (std::abs(x) * tree.sqrt_dt() > 1.0 - delta) {
                const double need = tree.horizon() * x * x / ((1.0 - delta) * (1.0 - delta));
                std::ostringstream os;
                os << "optimal_density: q = " << x << " at " << to_string(NodeId{k, i})
                   << " is not admissible; use at least " << static_cast<long long>(std::ceil(need)) + 1 << " steps";
                throw std::invalid_argument(os.str());
            }
            q.at(k, i) = x;
            const ExtReal f = conjugate(g, t, x).f_value;
            const double r = f.is_finite() ? std::abs(f.value() - (z * x - g(t, z))) : HUGE_VAL;
            residual.at(k, i) = r;
            worst = std::max(worst, r);
        }
    }
    return OptimalDensity{DensityProcess::make(q, delta), std::move(residual), worst};
}

TiltedMeasure gibbs_tilt(const TreeProcess& rho_process, double nu)
{
    const auto& tree = rho_process.tree();
    const int n = tree.steps();
    if (rho_process.last_depth() < n) {
        throw std::invalid_argument("gibbs_tilt: rho must be defined up to depth N");
    }
    auto p = TreeProcess::from_rule(tree, n - 1, [&](int k, std::size_t i) {
        const double a = rho_process.at(k + 1, tree.up(k, i));
        const double b = rho_process.at(k + 1, tree.down(k, i));
        return 1.0 / (1.0 + std::exp(2.0 * nu * (b - a)));
    });
    return tilt_from_probabilities(p);
}

DualityReport verify_duality(const DynamicRiskMeasure& drm, const Claim& xi, const std::vector<SweepEntry>& sweep,
                             const DualityOptions& options)
{
    const auto& tree = drm.tree();
    const auto solved = drm.evaluate(xi);
    const TreeProcess x = xi.terminal(tree);
    DualityReport report;
    report.rho0 = solved.Y.root();
    const double roundoff = 1e-11 * (1.0 + std::abs(report.rho0));
    const double slack = options.slack_c * tree.dt() + roundoff;

    std::function<ExtReal(const TiltedMeasure&)> value_of;
    if (drm.source() == DrmSource::entropy) {
        const double nu = drm.nu();
        value_of = [&x, nu](const TiltedMeasure& m) { return ExtReal(entropic_dual_value(m, x, nu).root()); };
    }
    else if (drm.source() == DrmSource::from_generator && drm.generator()->flags().convex) {
        value_of = [&x, f = conjugate_penalty(*drm.generator())](const TiltedMeasure& m) {
            return dual_value(m, x, f).root();
        };
    }
    else {
        throw std::invalid_argument("verify_duality: needs an entropic or convex from-generator measure");
    }

    auto make_row = [&](const std::string& label, const TiltedMeasure& m) {
        DualityRow row;
        row.label = label;
        row.dual_value = value_of(m);
        if (row.dual_value.is_finite()) {
            row.gap = ExtReal(report.rho0 - row.dual_value.value());
            row.violation = row.dual_value.value() > report.rho0 + slack;
        }
        else {
            row.feasible = false;
            row.gap = ExtReal::plus_infinity();
        }
        return row;
    };
    for (const auto& entry : sweep) {
        report.rows.push_back(make_row(entry.label, tilt(entry.density)));
        report.passed = report.passed && !report.rows.back().violation;
    }

    double optimal_tol = options.optimal_tol * (1.0 + std::abs(report.rho0));
    if (drm.source() == DrmSource::entropy) {
        report.optimal = make_row("gibbs", gibbs_tilt(solved.Y, drm.nu()));
        report.gibbs_value = report.optimal.dual_value.value();
        report.gibbs_gap = std::abs(report.rho0 - *report.gibbs_value);
    }
    else {
        const auto opt = optimal_density(solved, options.delta);
        report.max_fenchel_residual = opt.max_fenchel_residual;
        optimal_tol += tree.horizon() * opt.max_fenchel_residual;
        report.optimal = make_row("optimal", tilt(opt.density));
    }
    const bool optimal_ok = report.optimal.dual_value.is_finite() &&
                            std::abs(report.optimal.gap.value()) <= optimal_tol;
    report.passed = report.passed && optimal_ok && !report.optimal.violation;
    return report;
}

}  // namespace gexp
