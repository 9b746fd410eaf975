#pragma once

// Property suites for dynamic risk measures: the eight axioms, domination
// bounds, supermartingale tests and optional stopping.

#include "gexp/risk_measure.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gexp {

/// A precondition failed; what() names the failing check and its witness.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Axiom {
    monotonicity = 1,
    time_consistency,
    constant_preservation,
    convexity,
    subadditivity,
    positive_homogeneity,
    translation_invariance,
    regularity,
};

inline constexpr Axiom kAllAxioms[] = {Axiom::monotonicity,          Axiom::time_consistency,
                                       Axiom::constant_preservation, Axiom::convexity,
                                       Axiom::subadditivity,         Axiom::positive_homogeneity,
                                       Axiom::translation_invariance, Axiom::regularity};

/// "r1".."r8"
std::string axiom_code(Axiom axiom);
std::string axiom_name(Axiom axiom);
std::optional<Axiom> parse_axiom(const std::string& text);

/// One evaluated instance of an axiom. `depth` is the conditioning time t
/// for the axioms that have one; `event` is the root of the subtree A for
/// regularity.
struct AxiomCase {
    Axiom axiom = Axiom::monotonicity;
    std::vector<Claim> claims;
    double param = 0.0;
    int depth = 0;
    std::optional<NodeId> event;
};

/// Node-wise violation of the case: positive values violate inequalities,
/// equalities report |lhs - rhs|. Nodes the axiom does not speak about are 0.
/// `scale` receives 1 + the largest |rho| involved.
TreeProcess axiom_gap(const DynamicRiskMeasure& drm, const AxiomCase& c, double* scale = nullptr,
                      bool* certified = nullptr);

struct Witness {
    std::string property;
    std::vector<std::string> claims;
    NodeId node;
    double gap = 0.0;
    double param = 0.0;
    std::optional<AxiomCase> replay;
};

enum class CheckStatus { pass, fail, not_tested };
std::string to_string(CheckStatus status);

struct PropertyCheck {
    std::string name;
    CheckStatus status = CheckStatus::not_tested;
    int tested = 0;
    /// Cases skipped because a step certificate failed.
    int skipped = 0;
    int violations = 0;
    double max_gap = 0.0;
    std::optional<Witness> witness;
};

struct AxiomOptions {
    std::vector<double> thetas{0.1, 0.25, 0.5, 0.75, 0.9};
    std::vector<double> lambdas{0.0, 0.5, 2.0, 3.0};
    int max_pairs = 50;
    int events_per_depth = 2;
    /// Relative tolerance: a gap counts when it exceeds tol * (1 + |rho|).
    double tol = 1e-11;
};

struct AxiomReport {
    std::vector<PropertyCheck> checks;

    const PropertyCheck& at(Axiom axiom) const { return checks.at(static_cast<std::size_t>(axiom) - 1); }
    CheckStatus status(Axiom axiom) const { return at(axiom).status; }
};

/// Full trees only. Monotonicity, convexity and subadditivity are comparison
/// statements and are skipped for evaluations without a step certificate
/// (custom operators are always tested).
AxiomReport check_axioms(const DynamicRiskMeasure& drm, const std::vector<Claim>& claims, std::uint64_t seed,
                         const AxiomOptions& options = {});

/// Re-evaluates the replay case of a witness at its node.
double reproduce(const DynamicRiskMeasure& drm, const Witness& witness);

struct DominationOptions {
    std::vector<double> thetas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> z_grid{-1.0, 0.0, 1.0};
    int max_pairs = 20;
    double tol = 1e-11;
};

struct DominationReport {
    PropertyCheck condition_a;
    PropertyCheck theta_domination;
    PropertyCheck linf_bound;
    /// Bounding solves whose step certificate failed.
    int uncertified_bounds = 0;

    bool passed() const
    {
        return condition_a.status != CheckStatus::fail && theta_domination.status != CheckStatus::fail &&
               linf_bound.status != CheckStatus::fail;
    }
};

/// Sandwich E^{-mu,-nu}[-xi] <= rho(xi) <= E^{mu,nu}[-xi], the theta
/// inequality rho(a) - theta rho(b) <= (1-theta) rho((a - theta b)/(1-theta)),
/// and |rho(a - zB_T) - rho(b - zB_T)| <= max|a - b| node-wise.
DominationReport check_domination(const DynamicRiskMeasure& drm, double mu, double nu,
                                  const std::vector<Claim>& claims, std::uint64_t seed,
                                  const DominationOptions& options = {});

struct SupermartingaleCheck {
    bool holds = true;
    /// max over nodes of rho_k(-X_{k+1}) - X_k.
    double max_violation = 0.0;
    NodeId worst;
    /// max over nodes of |rho_k(-X_{k+1}) - X_k|.
    double max_martingale_gap = 0.0;
};

/// One-step inequality rho_k(-X_{k+1}) <= X_k at every node of depth < last.
SupermartingaleCheck check_supermartingale(const DynamicRiskMeasure& drm, const TreeProcess& X, double tol = 1e-12);

struct StoppingReport {
    bool precondition_holds = true;
    SupermartingaleCheck precondition;
    int checked_nodes = 0;
    int violations = 0;
    double max_gap = 0.0;
    std::optional<Witness> witness;

    bool passed() const { return precondition_holds && violations == 0; }
};

/// rho_{sigma}(-Y_tau) <= Y_{sigma ^ tau} at every node where sigma stops.
/// rho_k(-Y_tau) is computed by backward induction frozen once tau has
/// stopped. Full trees only.
StoppingReport optional_stopping_check(const DynamicRiskMeasure& drm, const TreeProcess& Y, const StoppingTime& sigma,
                                       const StoppingTime& tau, double tol = 1e-12);

}  // namespace gexp
