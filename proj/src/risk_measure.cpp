#include "gexp/risk_measure.hpp"

#include <cmath>
#include <stdexcept>

namespace gexp {

std::string to_string(DrmSource source)
{
    switch (source) {
    case DrmSource::from_generator: return "from_generator";
    case DrmSource::entropy: return "entropy";
    case DrmSource::custom: return "custom";
    }
    return "unknown";
}

DynamicRiskMeasure DynamicRiskMeasure::from_generator(const Generator& g, const ScenarioTree& tree)
{
    DynamicRiskMeasure d(DrmSource::from_generator, "g-expectation of " + g.name(), tree);
    d.generator_ = g;
    return d;
}

DynamicRiskMeasure DynamicRiskMeasure::entropy(double nu, const ScenarioTree& tree)
{
    if (!(nu > 0.0)) {
        throw std::invalid_argument("entropy risk measure: nu must be positive");
    }
    DynamicRiskMeasure d(DrmSource::entropy, "entropic nu=" + std::to_string(nu), tree);
    d.generator_ = entropy_generator(nu);
    d.nu_ = nu;
    return d;
}

DynamicRiskMeasure DynamicRiskMeasure::custom(std::string label, OneStepRisk op, const ScenarioTree& tree)
{
    if (!op) {
        throw std::invalid_argument("custom risk measure: empty operator");
    }
    DynamicRiskMeasure d(DrmSource::custom, std::move(label), tree);
    d.custom_ = std::move(op);
    return d;
}

DynamicRiskMeasure DynamicRiskMeasure::on(const ScenarioTree& tree) const
{
    DynamicRiskMeasure d = *this;
    d.tree_ = tree;
    return d;
}

double DynamicRiskMeasure::one_step(int depth, std::size_t index, double x_up, double x_down) const
{
    switch (source_) {
    case DrmSource::from_generator:
        return euler_step(*generator_, tree_.time(depth), tree_.dt(), tree_.sqrt_dt(), -x_up, -x_down);
    case DrmSource::entropy: return entropy_step(nu_, -x_up, -x_down);
    case DrmSource::custom: return custom_(depth, index, x_up, x_down);
    }
    return 0.0;
}

OneStepRisk DynamicRiskMeasure::as_operator() const
{
    return [self = *this](int depth, std::size_t index, double x_up, double x_down) {
        return self.one_step(depth, index, x_up, x_down);
    };
}

SolvedBSDE DynamicRiskMeasure::evaluate(const TreeProcess& position, int depth) const
{
    if (!(position.tree() == tree_)) {
        throw std::invalid_argument("risk measure: position lives on a different tree");
    }
    if (depth < 0) {
        depth = position.last_depth();
    }
    if (depth > position.last_depth()) {
        throw std::out_of_range("risk measure: position undefined at depth " + std::to_string(depth));
    }
    TreeProcess terminal(tree_, depth);
    {
        auto src = position.slice(depth);
        auto dst = terminal.slice(depth);
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = -src[i];
        }
    }
    SolvedBSDE out = [&] {
        switch (source_) {
        case DrmSource::from_generator: return solve_bsde(*generator_, terminal, depth);
        case DrmSource::entropy: return entropy_exact(nu_, terminal, depth);
        case DrmSource::custom: break;
        }
        SolvedBSDE s{TreeProcess(tree_, depth), TreeProcess(tree_, std::max(depth - 1, 0)), Scheme::custom_operator,
                     TreeProcess(tree_, depth), std::nullopt, {}, false, depth, {}, {}};
        auto leaves = terminal.slice(depth);
        std::copy(leaves.begin(), leaves.end(), s.Y.slice(depth).begin());
        double max_z = 0.0;
        for (int k = depth - 1; k >= 0; --k) {
            auto next = s.Y.slice(k + 1);
            auto y = s.Y.slice(k);
            auto z = s.Z.slice(k);
            for (std::size_t i = 0; i < y.size(); ++i) {
                const double ru = next[tree_.up(k, i)];
                const double rd = next[tree_.down(k, i)];
                // Time consistency: rho_k(xi) = rho_k(-rho_{k+1}(xi)).
                y[i] = custom_(k, i, -ru, -rd);
                z[i] = (ru - rd) / (2.0 * tree_.sqrt_dt());
                max_z = std::max(max_z, std::abs(z[i]));
            }
        }
        s.certificate.available = false;
        s.certificate.max_abs_z = max_z;
        s.certificate.monotone = false;
        return s;
    }();
    out.claim_negated = true;
    return out;
}

SolvedBSDE DynamicRiskMeasure::evaluate(const Claim& claim) const
{
    auto out = evaluate(claim.terminal(tree_));
    out.claim_label = claim.label();
    return out;
}

TreeProcess rho(const DynamicRiskMeasure& drm, const TreeProcess& position, int depth)
{
    return drm.evaluate(position, depth).Y;
}

TreeProcess rho(const DynamicRiskMeasure& drm, const Claim& claim)
{
    return drm.evaluate(claim).Y;
}

DynamicRiskMeasure planted_nonmonotone(const ScenarioTree& tree)
{
    return DynamicRiskMeasure::custom(
        "planted non-monotone",
        [](int, std::size_t, double xu, double xd) { return -0.5 * (xu + xd) - (xu - xd); }, tree);
}

}  // namespace gexp
