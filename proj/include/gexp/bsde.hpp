#pragma once

// Backward solvers for conditional g-expectations on a scenario tree.
//
// All solvers act on their literal terminal argument: E^g[X | F_k]. The sign
// flip rho_t(xi) = E^g[-xi | F_t] lives in risk_measure.hpp.

#include "gexp/generator.hpp"
#include "gexp/lattice.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gexp {

/// A one-step risk operator: rho at node (depth, index) of a position whose
/// value is `position_up` / `position_down` on the two children.
using OneStepRisk = std::function<double(int depth, std::size_t index, double position_up, double position_down)>;

enum class Scheme { explicit_euler, entropy_exact, exp_transform, custom_operator };
std::string to_string(Scheme scheme);

/// Discrete comparison holds when (mu + 2 nu max|Z|) sqrt(dt) <= 1.
struct StepCertificate {
    /// False for operators without a known driver.
    bool available = true;
    double max_abs_z = 0.0;
    double bound = 0.0;
    bool monotone = true;
};

struct SolvedBSDE {
    TreeProcess Y;
    /// Depths 0..terminal_depth-1 (a single zero slice when terminal_depth is 0).
    TreeProcess Z;
    Scheme scheme = Scheme::explicit_euler;
    /// Per-node defect of the defining one-step recursion.
    TreeProcess residuals;
    std::optional<Generator> generator;
    std::string claim_label;
    /// True when the terminal slice is -claim (risk-measure convention).
    bool claim_negated = false;
    int terminal_depth = 0;
    StepCertificate certificate;
    std::vector<std::string> warnings;

    double max_residual() const { return residuals.max_abs(); }
};

/// Explicit one-step scheme Z = (y_up - y_down) / (2 sqrt dt),
/// Y = (y_up + y_down)/2 + g(t, Z) dt.
double euler_step(const Generator& g, double t, double dt, double sqrt_dt, double y_up, double y_down,
                  double* z_out = nullptr);
/// Exact log-exp step (1/2nu) ln((e^{2nu y_up} + e^{2nu y_down}) / 2), max-shifted.
double entropy_step(double nu, double y_up, double y_down);

/// Backward induction from the depth-`depth` slice of `terminal` (default:
/// its last slice). Y_0 is the g-expectation of the terminal variable.
SolvedBSDE solve_bsde(const Generator& g, const TreeProcess& terminal, int depth = -1);

/// Closed-form entropic recursion; equals (1/2nu) ln E[exp(2nu X) | F_k].
SolvedBSDE entropy_exact(double nu, const TreeProcess& terminal, int depth = -1);

/// Solves the mu|z| equation for U = exp(2 nu X) and returns ln(U) / (2 nu),
/// computed in the log domain. For mu = 0 it coincides with entropy_exact.
SolvedBSDE exp_transform_solve(double mu, double nu, const TreeProcess& terminal, int depth = -1);

/// Driver estimate (1/dt) * rho_t(-z dB_t) read off at the node of depth
/// round(t/dt) (clamped to N-1) with the given index.
double recover_generator(const OneStepRisk& op, double t, double z, const ScenarioTree& tree, std::size_t index = 0);

}  // namespace gexp
