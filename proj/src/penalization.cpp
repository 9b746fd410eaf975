#include "gexp/penalization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gexp {

TreeProcess add_brownian(const TreeProcess& Y, double z)
{
    const TreeProcess b = brownian(Y.tree());
    return TreeProcess::from_rule(Y.tree(), Y.last_depth(), [&](int k, std::size_t i) { return Y.at(k, i) + z * b.at(k, i); });
}

PenalizedSolution solve_penalized(const DynamicRiskMeasure& drm, const TreeProcess& Y, double z, double n, double tol)
{
    const auto& tree = drm.tree();
    const int N = tree.steps();
    if (!(Y.tree() == tree) || Y.last_depth() != N) {
        throw std::invalid_argument("solve_penalized: Y must be a full process on the measure's tree");
    }
    if (!(n > 0.0)) {
        throw std::invalid_argument("solve_penalized: penalization level must be positive");
    }
    const auto pre = check_supermartingale(drm, add_brownian(Y, z), tol);
    if (!pre.holds) {
        std::ostringstream os;
        os << "solve_penalized: Y + zB is not a rho-supermartingale; one-step excess " << pre.max_violation << " at "
           << to_string(pre.worst);
        throw PreconditionError(os.str());
    }
    const double dt = tree.dt();
    const double s = tree.sqrt_dt();
    const double a = n * dt;
    PenalizedSolution out{n, TreeProcess(tree, N), TreeProcess(tree, N)};
    {
        auto src = Y.slice(N);
        std::copy(src.begin(), src.end(), out.y.slice(N).begin());
    }
    for (int k = N - 1; k >= 0; --k) {
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            const double yu = out.y.at(k + 1, tree.up(k, i));
            const double yd = out.y.at(k + 1, tree.down(k, i));
            const double r = drm.one_step(k, i, -yu - z * s, -yd + z * s);
            out.y.at(k, i) = (r + a * Y.at(k, i)) / (1.0 + a);
        }
    }
    for (int k = 0; k <= N; ++k) {
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            const double d = Y.at(k, i) - out.y.at(k, i);
            out.max_Y_minus_y = std::max(out.max_Y_minus_y, d);
            out.max_excess = std::max(out.max_excess, -d);
            if (-d > tol * (1.0 + std::abs(Y.at(k, i)))) {
                out.y_below_Y = false;
            }
        }
    }
    if (tree.is_full()) {
        for (int k = 1; k <= N; ++k) {
            for (std::size_t i = 0; i < tree.width(k); ++i) {
                const std::size_t p = i >> 1;
                const double inc = n * (Y.at(k - 1, p) - out.y.at(k - 1, p)) * dt;
                out.A.at(k, i) = out.A.at(k - 1, p) + inc;
                out.A_increasing = out.A_increasing && inc >= -tol;
            }
        }
        return out;
    }
    double acc = 0.0;
    for (int k = 0; k <= N; ++k) {
        std::fill(out.A.slice(k).begin(), out.A.slice(k).end(), acc);
        if (k == N) {
            break;
        }
        const double d0 = Y.at(k, 0) - out.y.at(k, 0);
        for (std::size_t i = 1; i < tree.width(k); ++i) {
            const double d = Y.at(k, i) - out.y.at(k, i);
            if (std::abs(d - d0) > 1e-12 * (1.0 + std::abs(Y.at(k, i)))) {
                throw std::invalid_argument("solve_penalized: Y - y varies across depth " + std::to_string(k) +
                                            "; the compensator needs a full tree");
            }
        }
        const double inc = n * d0 * dt;
        out.A_increasing = out.A_increasing && inc >= -tol;
        acc += inc;
    }
    return out;
}

std::vector<double> default_schedule()
{
    std::vector<double> out;
    for (int e = 1; e <= 14; ++e) {
        out.push_back(std::ldexp(1.0, e));
    }
    return out;
}

namespace {

TreeProcess martingale_gap(const DynamicRiskMeasure& drm, const TreeProcess& X)
{
    const auto& tree = drm.tree();
    TreeProcess gap(tree, X.last_depth());
    for (int k = 0; k < X.last_depth(); ++k) {
        for (std::size_t i = 0; i < tree.width(k); ++i) {
            const double r = drm.one_step(k, i, -X.at(k + 1, tree.up(k, i)), -X.at(k + 1, tree.down(k, i)));
            gap.at(k, i) = std::abs(r - X.at(k, i));
        }
    }
    return gap;
}

}  // namespace

Decomposition doob_meyer(const DynamicRiskMeasure& drm, const TreeProcess& Y, double z, std::vector<double> schedule,
                         double tol)
{
    if (schedule.empty()) {
        throw std::invalid_argument("doob_meyer: empty schedule");
    }
    if (!std::is_sorted(schedule.begin(), schedule.end())) {
        throw std::invalid_argument("doob_meyer: schedule must be increasing");
    }
    const auto& tree = drm.tree();
    const TreeProcess X0 = add_brownian(Y, z);
    const double stop = 1e-8 * (1.0 + Y.max_abs());
    Decomposition out{TreeProcess(tree, tree.steps()), 0.0, {}, TreeProcess(tree, tree.steps())};
    std::optional<TreeProcess> previous;
    for (double n : schedule) {
        auto sol = solve_penalized(drm, Y, z, n, tol);
        if (previous) {
            for (int k = 0; k <= tree.steps(); ++k) {
                for (std::size_t i = 0; i < tree.width(k); ++i) {
                    const double drop = previous->at(k, i) - sol.y.at(k, i);
                    if (drop > tol * (1.0 + std::abs(Y.at(k, i))) && drop > out.monotonicity_gap) {
                        out.monotone_in_n = false;
                        out.monotonicity_gap = drop;
                        out.monotonicity_witness = NodeId{k, i};
                    }
                }
            }
        }
        const TreeProcess X = TreeProcess::from_rule(
            tree, tree.steps(), [&](int k, std::size_t i) { return X0.at(k, i) + sol.A.at(k, i); });
        TreeProcess gap = martingale_gap(drm, X);
        const double max_gap = gap.max_abs();
        if (!out.levels.empty() && max_gap > out.levels.back().max_gap * (1.0 + 1e-9) + 1e-15) {
            out.gap_nonincreasing = false;
        }
        out.levels.push_back(PenalizationLevel{n, max_gap, sol.max_Y_minus_y});
        out.A = std::move(sol.A);
        out.n_achieved = n;
        out.martingale_gap = std::move(gap);
        out.max_martingale_gap = max_gap;
        previous = std::move(sol.y);
        if (out.levels.back().max_Y_minus_y < stop) {
            out.early_stop = true;
            break;
        }
    }
    return out;
}

double canonical_drift(double mu, double nu, double z)
{
    return mu * std::abs(z) + nu * z * z;
}

TreeProcess linear_drift(const ScenarioTree& tree, double rate)
{
    return TreeProcess::from_rule(tree, tree.steps(), [&](int k, std::size_t) { return -rate * tree.time(k); });
}

TreeProcess canonical_supermartingale(double mu, double nu, double z, const ScenarioTree& tree, double drift_scale)
{
    return add_brownian(linear_drift(tree, drift_scale * canonical_drift(mu, nu, z)), z);
}

TreeProcess matched_drift(const DynamicRiskMeasure& drm, double z)
{
    const auto& tree = drm.tree();
    const double s = tree.sqrt_dt();
    std::vector<double> level(static_cast<std::size_t>(tree.steps()) + 1, 0.0);
    for (int k = 0; k < tree.steps(); ++k) {
        level[static_cast<std::size_t>(k) + 1] = level[static_cast<std::size_t>(k)] - drm.one_step(k, 0, -z * s, z * s);
    }
    return TreeProcess::from_rule(tree, tree.steps(),
                                  [&](int k, std::size_t) { return level[static_cast<std::size_t>(k)]; });
}

}  // namespace gexp
