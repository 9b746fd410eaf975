#include "gexp/bsde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gexp {

std::string to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::explicit_euler: return "explicit_euler";
    case Scheme::entropy_exact: return "entropy_exact";
    case Scheme::exp_transform: return "exp_transform";
    case Scheme::custom_operator: return "custom_operator";
    }
    return "unknown";
}

double euler_step(const Generator& g, double t, double dt, double sqrt_dt, double y_up, double y_down, double* z_out)
{
    const double z = (y_up - y_down) / (2.0 * sqrt_dt);
    if (z_out != nullptr) {
        *z_out = z;
    }
    return 0.5 * (y_up + y_down) + g(t, z) * dt;
}

double entropy_step(double nu, double y_up, double y_down)
{
    const double a = 2.0 * nu * y_up;
    const double b = 2.0 * nu * y_down;
    const double m = std::max(a, b);
    return (m + std::log1p(std::exp(-std::abs(a - b))) - std::log(2.0)) / (2.0 * nu);
}

namespace {

int resolve_depth(const TreeProcess& terminal, int depth)
{
    if (depth < 0) {
        return terminal.last_depth();
    }
    if (depth > terminal.last_depth()) {
        throw std::out_of_range("backward solve: terminal depth " + std::to_string(depth) +
                                " beyond the process (last depth " + std::to_string(terminal.last_depth()) + ")");
    }
    return depth;
}

// Shared backward sweep. `step(k, i, y_up, y_down, z&, residual&)` returns Y.
template <class Step>
SolvedBSDE sweep(const TreeProcess& terminal, int depth, Scheme scheme, Step&& step)
{
    const auto& tree = terminal.tree();
    SolvedBSDE out{TreeProcess(tree, depth), TreeProcess(tree, std::max(depth - 1, 0)), scheme,
                   TreeProcess(tree, depth), std::nullopt, {}, false, depth, {}, {}};
    auto leaves = terminal.slice(depth);
    std::copy(leaves.begin(), leaves.end(), out.Y.slice(depth).begin());
    double max_z = 0.0;
    for (int k = depth - 1; k >= 0; --k) {
        auto next = out.Y.slice(k + 1);
        auto y = out.Y.slice(k);
        auto z = out.Z.slice(k);
        auto r = out.residuals.slice(k);
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double yu = next[tree.up(k, i)];
            const double yd = next[tree.down(k, i)];
            y[i] = step(k, i, yu, yd, z[i], r[i]);
            max_z = std::max(max_z, std::abs(z[i]));
        }
    }
    out.certificate.max_abs_z = max_z;
    return out;
}

void certify(SolvedBSDE& s, double mu, double nu, double sqrt_dt, bool always_monotone)
{
    s.certificate.bound = (mu + 2.0 * nu * s.certificate.max_abs_z) * sqrt_dt;
    s.certificate.monotone = always_monotone || s.certificate.bound <= 1.0;
    if (!s.certificate.monotone) {
        std::ostringstream os;
        os << "step monotonicity bound (mu + 2 nu max|Z|) sqrt(dt) = " << s.certificate.bound
           << " exceeds 1; comparison may fail";
        s.warnings.push_back(os.str());
    }
}

}  // namespace

SolvedBSDE solve_bsde(const Generator& g, const TreeProcess& terminal, int depth)
{
    depth = resolve_depth(terminal, depth);
    const auto& tree = terminal.tree();
    const double dt = tree.dt();
    const double sdt = tree.sqrt_dt();
    auto out = sweep(terminal, depth, Scheme::explicit_euler,
                     [&](int k, std::size_t, double yu, double yd, double& z, double& r) {
                         const double t = tree.time(k);
                         const double y = euler_step(g, t, dt, sdt, yu, yd, &z);
                         r = std::abs(y - (0.5 * (yu + yd) + g(t, z) * dt));
                         return y;
                     });
    out.generator = g;
    certify(out, g.mu(), g.nu(), sdt, false);
    return out;
}

SolvedBSDE entropy_exact(double nu, const TreeProcess& terminal, int depth)
{
    if (!(nu > 0.0)) {
        throw std::invalid_argument("entropy_exact: nu must be positive");
    }
    depth = resolve_depth(terminal, depth);
    const auto& tree = terminal.tree();
    const double sdt = tree.sqrt_dt();
    auto out = sweep(terminal, depth, Scheme::entropy_exact,
                     [&](int, std::size_t, double yu, double yd, double& z, double& r) {
                         const double y = entropy_step(nu, yu, yd);
                         z = (yu - yd) / (2.0 * sdt);
                         // Multiplicative defect of e^{2nu Y} = E[e^{2nu Y_next}].
                         const double mean = 0.5 * (std::exp(2.0 * nu * (yu - y)) + std::exp(2.0 * nu * (yd - y)));
                         r = std::abs(1.0 - mean) / (2.0 * nu);
                         return y;
                     });
    out.generator = entropy_generator(nu);
    certify(out, 0.0, nu, sdt, true);
    return out;
}

SolvedBSDE exp_transform_solve(double mu, double nu, const TreeProcess& terminal, int depth)
{
    if (!(nu > 0.0) || !(mu >= 0.0)) {
        throw std::invalid_argument("exp_transform_solve: need mu >= 0 and nu > 0");
    }
    depth = resolve_depth(terminal, depth);
    const auto& tree = terminal.tree();
    const double sdt = tree.sqrt_dt();
    const double half_tilt = 0.5 * mu * sdt;
    auto out = sweep(terminal, depth, Scheme::exp_transform,
                     [&](int k, std::size_t i, double yu, double yd, double& z, double& r) {
                         // U_k = (U_u + U_d)/2 + mu |U_u - U_d| sqrt(dt) / 2 with
                         // U = exp(2 nu Y), scaled by exp(-2 nu max(y_u, y_d)).
                         const double m = std::max(yu, yd);
                         const double u = std::exp(2.0 * nu * (yu - m));
                         const double d = std::exp(2.0 * nu * (yd - m));
                         const double scaled = 0.5 * (u + d) + half_tilt * std::abs(u - d);
                         if (!(scaled > 0.0) || !std::isfinite(scaled)) {
                             throw std::runtime_error("exp_transform_solve: lost positivity of U at " +
                                                      to_string(NodeId{k, i}) + "; refine the time step");
                         }
                         const double y = m + std::log(scaled) / (2.0 * nu);
                         z = (yu - yd) / (2.0 * sdt);
                         const double uu = std::exp(2.0 * nu * (yu - y));
                         const double dd = std::exp(2.0 * nu * (yd - y));
                         r = std::abs(1.0 - (0.5 * (uu + dd) + half_tilt * std::abs(uu - dd))) / (2.0 * nu);
                         return y;
                     });
    out.generator = quadratic_upper(mu, nu);
    out.certificate.bound = mu * sdt;
    out.certificate.monotone = mu * sdt <= 1.0;
    if (!out.certificate.monotone) {
        out.warnings.push_back("mu sqrt(dt) exceeds 1; the transformed scheme is not monotone");
    }
    return out;
}

double recover_generator(const OneStepRisk& op, double t, double z, const ScenarioTree& tree, std::size_t index)
{
    const int n = tree.steps();
    const int k = std::clamp(static_cast<int>(std::lround(t / tree.dt())), 0, n - 1);
    if (index >= tree.width(k)) {
        throw std::out_of_range("recover_generator: node index outside the slice");
    }
    // Position -z dB on the two children.
    const double s = tree.sqrt_dt();
    return op(k, index, -z * s, z * s) / tree.dt();
}

}  // namespace gexp
