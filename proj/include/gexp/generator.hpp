#pragma once

// Drivers g(t, z) of backward equations, their growth/structure classes,
// Legendre-Fenchel conjugates and subdifferentials.

#include "gexp/extended_real.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gexp {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double midpoint() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

struct GeneratorClass {
    bool convex = false;
    bool sublinear = false;
    bool theta_dominated = false;
};

/// Immutable deterministic driver. `mu` and `nu` are the growth constants of
/// |g(t,z)| <= mu|z| + nu z^2; analytic conjugate and subdifferential are
/// optional and take precedence over the numeric routines when attached.
class Generator {
public:
    using Eval = std::function<double(double t, double z)>;
    using Conjugate = std::function<ExtReal(double t, double x)>;
    using Subdifferential = std::function<Interval(double t, double z)>;

    Generator(std::string name, Eval eval, double mu, double nu, GeneratorClass flags, Conjugate conjugate = {},
              Subdifferential subdifferential = {});

    const std::string& name() const { return state_->name; }
    double operator()(double t, double z) const { return state_->eval(t, z); }
    double mu() const { return state_->mu; }
    double nu() const { return state_->nu; }
    const GeneratorClass& flags() const { return state_->flags; }

    bool has_analytic_conjugate() const { return static_cast<bool>(state_->conjugate); }
    bool has_analytic_subdifferential() const { return static_cast<bool>(state_->subdifferential); }
    const Conjugate& analytic_conjugate() const { return state_->conjugate; }
    const Subdifferential& analytic_subdifferential() const { return state_->subdifferential; }

    /// Same driver with the analytic conjugate and subdifferential removed.
    Generator without_analytic() const;

private:
    struct State {
        std::string name;
        Eval eval;
        double mu;
        double nu;
        GeneratorClass flags;
        Conjugate conjugate;
        Subdifferential subdifferential;
    };
    std::shared_ptr<const State> state_;
};

enum class BuiltinKind { quadratic_upper, quadratic_lower, entropy, sublinear_interval, scaled_abs };

struct BuiltinParams {
    double mu = 0.0;
    double nu = 0.0;
    /// sublinear_interval: slope set K = [lo, hi]; must lie in [-mu, mu]
    /// (mu defaults to max(|lo|, |hi|) when left at 0).
    double lo = 0.0;
    double hi = 0.0;
};

Generator make_builtin(BuiltinKind kind, const BuiltinParams& params);
std::optional<BuiltinKind> parse_builtin_kind(const std::string& name);
std::string to_string(BuiltinKind kind);

/// mu|z| + nu z^2
Generator quadratic_upper(double mu, double nu);
/// -mu|z| - nu z^2
Generator quadratic_lower(double mu, double nu);
/// nu z^2
Generator entropy_generator(double nu);
/// sup_{q in [lo, hi]} q z
Generator sublinear_interval(double lo, double hi, double mu = 0.0);
/// mu|z|
Generator scaled_abs(double mu);

struct ConjugatePoint {
    double x = 0.0;
    ExtReal f_value;
    std::optional<double> argmax_z;
    /// Accuracy of a numeric value: final grid spacing times the local slope
    /// bound. Zero for analytic values.
    double tolerance = 0.0;
};

enum class ConjugateMethod { automatic, numeric };

/// f(t, x) = sup_z { x z - g(t, z) }.
ConjugatePoint conjugate(const Generator& g, double t, double x, ConjugateMethod method = ConjugateMethod::automatic);

/// Closed interval of subgradients of z -> g(t, z). Rejects drivers not
/// flagged convex.
Interval subdifferential(const Generator& g, double t, double z);

struct ClassCheck {
    std::string property;
    bool claimed = false;
    bool holds = true;
    std::string witness;
    double gap = 0.0;
};

struct ClassReport {
    std::vector<ClassCheck> checks;

    /// True when every claimed property holds (growth is always claimed).
    bool passed() const;
    const ClassCheck* find(const std::string& property) const;
};

/// Grid verification of growth, convexity (midpoint test), sublinearity and
/// the G_theta inequality g(z) - theta g(w) <= mu|z-theta w| + nu|z-theta w|^2/(1-theta).
ClassReport verify_class(const Generator& g, const std::vector<double>& z_grid, const std::vector<double>& t_grid,
                         const std::vector<double>& theta_grid);

/// Generator tabulated on a tensor grid, bilinear in (t, z). Outside the z
/// range it extends by the quadratic through the three outermost nodes; t is
/// clamped to the grid.
Generator tabulated_generator(std::string name, std::vector<double> t_grid, std::vector<double> z_grid,
                              std::vector<std::vector<double>> values, double mu, double nu, GeneratorClass flags);

/// Uniform grid of `count` points on [lo, hi].
std::vector<double> linspace(double lo, double hi, int count);

}  // namespace gexp
