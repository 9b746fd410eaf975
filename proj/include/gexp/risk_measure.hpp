#pragma once

// Dynamic risk measures rho_t(xi) = E^g[-xi | F_t] and node-local custom
// operators, all evaluated by backward composition of one-step operators.

#include "gexp/bsde.hpp"

#include <optional>
#include <string>

namespace gexp {

enum class DrmSource { from_generator, entropy, custom };
std::string to_string(DrmSource source);

class DynamicRiskMeasure {
public:
    static DynamicRiskMeasure from_generator(const Generator& g, const ScenarioTree& tree);
    static DynamicRiskMeasure entropy(double nu, const ScenarioTree& tree);
    /// `op` must be node-local: rho at a node from the position's two child
    /// values.
    static DynamicRiskMeasure custom(std::string label, OneStepRisk op, const ScenarioTree& tree);

    DrmSource source() const { return source_; }
    const ScenarioTree& tree() const { return tree_; }
    const std::string& label() const { return label_; }
    /// The driver for from_generator and entropy sources.
    const std::optional<Generator>& generator() const { return generator_; }
    double nu() const { return nu_; }

    /// rho at (depth, index) of a position worth x_up / x_down on the children.
    double one_step(int depth, std::size_t index, double x_up, double x_down) const;
    OneStepRisk as_operator() const;

    /// rho_k of the position given by the depth-`depth` slice of `position`,
    /// for k = 0..depth (default: the last slice). The result's Y is rho, its
    /// terminal slice is -position and claim_negated is set. Custom sources
    /// carry no step certificate (certificate.available is false).
    SolvedBSDE evaluate(const TreeProcess& position, int depth = -1) const;
    SolvedBSDE evaluate(const Claim& claim) const;

    /// Same measure on another tree.
    DynamicRiskMeasure on(const ScenarioTree& tree) const;

private:
    DynamicRiskMeasure(DrmSource source, std::string label, const ScenarioTree& tree)
        : source_(source), label_(std::move(label)), tree_(tree)
    {
    }

    DrmSource source_;
    std::string label_;
    ScenarioTree tree_;
    std::optional<Generator> generator_;
    double nu_ = 0.0;
    OneStepRisk custom_;
};

/// rho_k(position) for k <= depth.
TreeProcess rho(const DynamicRiskMeasure& drm, const TreeProcess& position, int depth = -1);
TreeProcess rho(const DynamicRiskMeasure& drm, const Claim& claim);

/// Translation-invariant, linear custom operator that is not monotone:
/// -(x_up + x_down)/2 - (x_up - x_down).
DynamicRiskMeasure planted_nonmonotone(const ScenarioTree& tree);

}  // namespace gexp
