#pragma once

// Measure changes on the tree and the dual side of convex risk measures.
//
// A density q (one value per node of depths 0..N-1) tilts the one-step
// probabilities to p_up = (1 + q sqrt(dt)) / 2; on full trees the density
// theta_{k+1} = theta_k (1 + q_k dB_k) is carried explicitly.

#include "gexp/risk_measure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gexp {

class DensityProcess {
public:
    /// Certifies |q| sqrt(dt) <= 1 - delta at every node of depths 0..N-1;
    /// throws std::invalid_argument naming the first offending node.
    static DensityProcess make(const TreeProcess& q, double delta = 1e-6);
    static DensityProcess constant(const ScenarioTree& tree, double q, double delta = 1e-6);

    const TreeProcess& q() const { return q_; }
    const ScenarioTree& tree() const { return q_.tree(); }
    double delta() const { return delta_; }

private:
    DensityProcess(TreeProcess q, double delta) : q_(std::move(q)), delta_(delta) {}

    TreeProcess q_;
    double delta_;
};

struct TiltedMeasure {
    DensityProcess density;
    /// Depths 0..N-1.
    TreeProcess p_up;
    /// Depths 0..N; full trees only.
    std::optional<TreeProcess> theta;
    std::optional<TreeProcess> log_theta;
};

TiltedMeasure tilt(const DensityProcess& q);
/// Measure from explicit one-step probabilities in (0, 1); the implied
/// density q = (2p - 1)/sqrt(dt) is certified with margin 0.
TiltedMeasure tilt_from_probabilities(const TreeProcess& p_up);

/// E_Q[last slice | F_depth]; see the lattice overload.
TreeProcess cond_expect(const TreeProcess& proc, int depth, const TiltedMeasure& measure);

struct RelativeEntropy {
    /// E_Q[ln(theta_N / theta_k) | F_k], exact on the tree.
    TreeProcess discrete;
    /// (1/2) E_Q[sum_{j >= k} q_j^2 dt | F_k].
    TreeProcess formula;
};

/// Both entropy notions for depths 0..depth (default N), conditioned at
/// each node and counting increments up to `depth`.
RelativeEntropy relative_entropy(const TiltedMeasure& m, int depth = -1);

using Penalty = std::function<ExtReal(double t, double x)>;
/// The conjugate of g as a penalty.
Penalty conjugate_penalty(const Generator& g);

struct DualValue {
    /// E_Q[-xi - sum_j f(t_j, q_j) dt | F_k] where finite.
    TreeProcess value;
    /// 1 where the value is -infinity (an infinite penalty downstream).
    TreeProcess minus_infinity;
    bool feasible = true;
    std::optional<NodeId> infeasible_node;

    ExtReal at(int depth, std::size_t i) const
    {
        return minus_infinity.at(depth, i) != 0.0 ? ExtReal::minus_infinity() : ExtReal(value.at(depth, i));
    }
    ExtReal root() const { return at(0, 0); }
};

DualValue dual_value(const TiltedMeasure& m, const Claim& xi, const Penalty& f);
DualValue dual_value(const TiltedMeasure& m, const TreeProcess& xi_terminal, const Penalty& f);

/// E_Q[-xi | F_k] - (1/2nu) times the discrete relative entropy.
TreeProcess entropic_dual_value(const TiltedMeasure& m, const TreeProcess& xi_terminal, double nu);

struct OptimalDensity {
    DensityProcess density;
    /// |f(t, q) - (Z q - g(t, Z))| per node.
    TreeProcess fenchel_residual;
    double max_fenchel_residual = 0.0;
};

/// Midpoint selection from the subdifferential of g at Z of a solved
/// risk-measure equation. Throws with the offending node and a suggested
/// step count when q is not admissible.
OptimalDensity optimal_density(const SolvedBSDE& solved, double delta = 1e-6);

/// Gibbs tilt dQ/dP proportional to exp(2 nu rho_{k+1}) per step, built from
/// the entropic rho process of xi.
TiltedMeasure gibbs_tilt(const TreeProcess& rho_process, double nu);

struct SweepEntry {
    std::string label;
    DensityProcess density;
};

struct DualityRow {
    std::string label;
    ExtReal dual_value;
    /// rho_0 - dual value (+infinity for infeasible rows).
    ExtReal gap;
    bool feasible = true;
    bool violation = false;
};

struct DualityOptions {
    /// Weak duality slack is slack_c * dt.
    double slack_c = 0.0;
    /// Tolerance for the gap at the optimal density.
    double optimal_tol = 1e-9;
    double delta = 1e-6;
};

struct DualityReport {
    double rho0 = 0.0;
    std::vector<DualityRow> rows;
    /// The optimal row (Gibbs tilt for entropic measures).
    DualityRow optimal;
    double max_fenchel_residual = 0.0;
    /// Entropic measures: exact Gibbs value and its gap.
    std::optional<double> gibbs_value;
    std::optional<double> gibbs_gap;
    bool passed = true;
};

/// Weak duality over the sweep and the gap at the optimum. From-generator
/// measures use conjugate penalties and optimal_density; entropic measures
/// use the discrete relative entropy and the Gibbs tilt.
DualityReport verify_duality(const DynamicRiskMeasure& drm, const Claim& xi, const std::vector<SweepEntry>& sweep,
                             const DualityOptions& options = {});

}  // namespace gexp
