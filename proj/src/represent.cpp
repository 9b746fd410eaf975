#include "gexp/represent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gexp {

namespace {

std::string describe(const Witness& w)
{
    std::ostringstream os;
    os << w.property << " violated at " << to_string(w.node) << " by " << w.gap;
    if (!w.claims.empty()) {
        os << " for claims";
        for (const auto& c : w.claims) {
            os << " '" << c << "'";
        }
    }
    if (w.param != 0.0) {
        os << " (param " << w.param << ")";
    }
    return os.str();
}

std::vector<PropertyCheck> check_preconditions(const DynamicRiskMeasure& drm, const RepresentOptions& options)
{
    std::vector<PropertyCheck> out;
    if (options.claims.empty()) {
        throw PreconditionError("represent: no sample claims for the precondition checks");
    }
    const auto& tree = drm.tree();
    const bool own = tree.is_full() && tree.steps() <= options.check_depth;
    const DynamicRiskMeasure probe =
        own ? drm : drm.on(ScenarioTree::full(tree.horizon(), std::min(tree.steps(), options.check_depth)));
    const auto axioms = check_axioms(probe, options.claims, options.seed);
    for (Axiom a : {Axiom::monotonicity, Axiom::time_consistency, Axiom::constant_preservation, Axiom::convexity}) {
        const auto& c = axioms.at(a);
        if (c.status == CheckStatus::fail) {
            throw PreconditionError("represent: " + describe(*c.witness));
        }
        if (c.status != CheckStatus::pass) {
            throw PreconditionError("represent: " + c.name + " could not be tested (no certified evaluation)");
        }
        out.push_back(c);
    }
    const auto dom = check_domination(probe, options.mu, options.nu, options.claims, options.seed);
    for (const PropertyCheck* c : {&dom.condition_a, &dom.theta_domination, &dom.linf_bound}) {
        if (c->status == CheckStatus::fail) {
            throw PreconditionError("represent: " + describe(*c->witness));
        }
        out.push_back(*c);
    }
    return out;
}

}  // namespace

Representation represent(const DynamicRiskMeasure& drm, std::vector<double> z_grid, std::vector<double> t_grid,
                         const RepresentOptions& options)
{
    if (z_grid.size() < 3 || t_grid.empty()) {
        throw std::invalid_argument("represent: need at least three z points and one t point");
    }
    std::sort(z_grid.begin(), z_grid.end());
    if (!std::binary_search(z_grid.begin(), z_grid.end(), 0.0)) {
        z_grid.insert(std::upper_bound(z_grid.begin(), z_grid.end(), 0.0), 0.0);
    }
    std::sort(t_grid.begin(), t_grid.end());
    std::vector<PropertyCheck> checked;
    if (options.check_preconditions) {
        checked = check_preconditions(drm, options);
    }
    const auto op = drm.as_operator();
    std::vector<std::vector<double>> values(t_grid.size(), std::vector<double>(z_grid.size()));
    for (std::size_t a = 0; a < t_grid.size(); ++a) {
        for (std::size_t b = 0; b < z_grid.size(); ++b) {
            values[a][b] = recover_generator(op, t_grid[a], z_grid[b], drm.tree());
        }
    }
    auto g = tabulated_generator("extracted from " + drm.label(), t_grid, z_grid, values, options.mu, options.nu,
                                 options.flags);
    return Representation{std::move(g), std::move(t_grid), std::move(z_grid), std::move(values), std::move(checked)};
}

std::vector<RoundTripRow> round_trip(const DynamicRiskMeasure& drm, const Generator& g_hat,
                                     const std::vector<Claim>& claims)
{
    const auto back = DynamicRiskMeasure::from_generator(g_hat, drm.tree());
    std::vector<RoundTripRow> rows;
    for (const auto& c : claims) {
        const double r = drm.evaluate(c).Y.root();
        const double rh = back.evaluate(c).Y.root();
        rows.push_back(RoundTripRow{c.label(), r, rh, std::abs(r - rh)});
    }
    return rows;
}

TabulationDiff compare_tabulations(const Representation& a, const Representation& b)
{
    if (a.t_grid != b.t_grid || a.z_grid != b.z_grid) {
        throw std::invalid_argument("compare_tabulations: grids differ");
    }
    TabulationDiff out;
    for (std::size_t i = 0; i < a.t_grid.size(); ++i) {
        for (std::size_t j = 0; j < a.z_grid.size(); ++j) {
            const double d = std::abs(a.values[i][j] - b.values[i][j]);
            if (d > out.max_abs) {
                out = TabulationDiff{d, a.t_grid[i], a.z_grid[j]};
            }
        }
    }
    return out;
}

}  // namespace gexp
