#pragma once

// Penalized backward equations and the Doob-Meyer decomposition of
// rho-supermartingales of the form Y_t + z B_t.

#include "gexp/axioms.hpp"

#include <optional>
#include <vector>

namespace gexp {

struct PenalizedSolution {
    double n = 0.0;
    TreeProcess y;
    /// A_k = sum_{j<k} n (Y_j - y_j) dt, with A_0 = 0.
    TreeProcess A;
    bool y_below_Y = true;
    bool A_increasing = true;
    /// max over nodes of y - Y (positive means the bound failed).
    double max_excess = 0.0;
    double max_Y_minus_y = 0.0;
};

/// Backward recursion y_N = Y_N,
///   y_k = (rho_k(-y_{k+1} - z dB_k) + n dt Y_k) / (1 + n dt).
/// Requires Y + zB to be a rho-supermartingale (throws PreconditionError with
/// the worst node otherwise). On a recombining lattice A is formed only when
/// Y - y is constant on each depth.
PenalizedSolution solve_penalized(const DynamicRiskMeasure& drm, const TreeProcess& Y, double z, double n,
                                  double tol = 1e-12);

struct PenalizationLevel {
    double n = 0.0;
    /// Largest one-step rho-martingale defect of Y + zB + A^n.
    double max_gap = 0.0;
    double max_Y_minus_y = 0.0;
};

struct Decomposition {
    TreeProcess A;
    double n_achieved = 0.0;
    std::vector<PenalizationLevel> levels;
    /// Node-wise |rho_k(-X_{k+1}) - X_k| for X = Y + zB + A.
    TreeProcess martingale_gap;
    double max_martingale_gap = 0.0;
    bool monotone_in_n = true;
    bool gap_nonincreasing = true;
    bool early_stop = false;
    std::optional<NodeId> monotonicity_witness;
    double monotonicity_gap = 0.0;
};

/// 2, 4, ..., 2^14.
std::vector<double> default_schedule();

/// Runs the schedule, stopping early once max(Y - y^n) < 1e-8 (1 + max|Y|).
Decomposition doob_meyer(const DynamicRiskMeasure& drm, const TreeProcess& Y, double z,
                         std::vector<double> schedule = default_schedule(), double tol = 1e-12);

/// mu |z| + nu z^2
double canonical_drift(double mu, double nu, double z);

/// Deterministic process -rate * t_k.
TreeProcess linear_drift(const ScenarioTree& tree, double rate);

/// -drift_scale (mu|z| + nu z^2) t_k + z B_k.
TreeProcess canonical_supermartingale(double mu, double nu, double z, const ScenarioTree& tree,
                                      double drift_scale = 1.0);

/// Deterministic Y with Y_k = -sum_{j<k} rho_j(-z dB_j), read at node 0 of
/// each depth, so that Y + zB is a rho-martingale for deterministic drivers.
TreeProcess matched_drift(const DynamicRiskMeasure& drm, double z);

/// Y (a depth-only process) plus z B.
TreeProcess add_brownian(const TreeProcess& Y, double z);

}  // namespace gexp
