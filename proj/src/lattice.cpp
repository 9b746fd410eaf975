#include "gexp/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace gexp {

TimeGrid TimeGrid::make(double horizon, int steps)
{
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("time grid: horizon must be positive and finite");
    }
    if (steps < 1) {
        throw std::invalid_argument("time grid: steps must be at least 1");
    }
    return TimeGrid{horizon, steps, horizon / steps};
}

std::string to_string(const NodeId& node)
{
    return "(depth " + std::to_string(node.depth) + ", index " + std::to_string(node.index) + ")";
}

ScenarioTree::ScenarioTree(TimeGrid grid, Layout layout)
    : grid_(grid), layout_(layout), sqrt_dt_(std::sqrt(grid.dt))
{
}

ScenarioTree ScenarioTree::full(double horizon, int steps, int depth_cap)
{
    auto grid = TimeGrid::make(horizon, steps);
    if (depth_cap > 62) {
        throw std::invalid_argument("full tree: depth cap cannot exceed 62");
    }
    if (steps > depth_cap) {
        throw std::invalid_argument("full tree: " + std::to_string(steps) + " steps exceeds the depth cap of " +
                                    std::to_string(depth_cap));
    }
    return ScenarioTree(grid, Layout::full);
}

ScenarioTree ScenarioTree::recombining(double horizon, int steps)
{
    auto grid = TimeGrid::make(horizon, steps);
    if (steps > kRecombiningDepthCap) {
        throw std::invalid_argument("recombining lattice: " + std::to_string(steps) + " steps exceeds the cap of " +
                                    std::to_string(kRecombiningDepthCap));
    }
    return ScenarioTree(grid, Layout::recombining);
}

int ScenarioTree::ups(int /*depth*/, std::size_t i) const
{
    if (layout_ == Layout::full) {
        return std::popcount(static_cast<std::uint64_t>(i));
    }
    return static_cast<int>(i);
}

void ScenarioTree::require_full(const char* what) const
{
    if (layout_ != Layout::full) {
        throw std::invalid_argument(std::string(what) + " requires a full (non-recombining) tree");
    }
}

void ScenarioTree::require_depth(int depth, int lo, const char* what) const
{
    if (depth < lo || depth > grid_.steps) {
        throw std::out_of_range(std::string(what) + ": depth " + std::to_string(depth) + " outside [" +
                                std::to_string(lo) + ", " + std::to_string(grid_.steps) + "]");
    }
}

std::size_t ScenarioTree::ancestor(int depth, std::size_t i, int at) const
{
    require_full("ancestor lookup");
    if (at > depth || at < 0) {
        throw std::out_of_range("ancestor depth must lie in [0, depth]");
    }
    return i >> (depth - at);
}

double ScenarioTree::increment_into(int depth, std::size_t i) const
{
    require_full("increment lookup");
    if (depth < 1) {
        throw std::out_of_range("the root has no incoming increment");
    }
    return (i & 1U) ? sqrt_dt_ : -sqrt_dt_;
}

std::vector<double> ScenarioTree::path_increments(std::size_t leaf) const
{
    require_full("path enumeration");
    const int n = grid_.steps;
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        out[static_cast<std::size_t>(k)] = ((leaf >> (n - 1 - k)) & 1U) ? sqrt_dt_ : -sqrt_dt_;
    }
    return out;
}

TreeProcess::TreeProcess(const ScenarioTree& tree, int last_depth, double fill) : tree_(tree)
{
    tree.require_depth(last_depth, 0, "tree process");
    slices_.resize(static_cast<std::size_t>(last_depth) + 1);
    for (int k = 0; k <= last_depth; ++k) {
        slices_[static_cast<std::size_t>(k)].assign(tree.width(k), fill);
    }
}

TreeProcess TreeProcess::from_rule(const ScenarioTree& tree, int last_depth,
                                   const std::function<double(int, std::size_t)>& rule)
{
    TreeProcess out(tree, last_depth);
    for (int k = 0; k <= last_depth; ++k) {
        auto s = out.slice(k);
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] = rule(k, i);
        }
    }
    return out;
}

double TreeProcess::max_abs() const
{
    double m = 0.0;
    for (int k = 0; k <= last_depth(); ++k) {
        m = std::max(m, max_abs(k));
    }
    return m;
}

double TreeProcess::max_abs(int depth) const
{
    double m = 0.0;
    for (double v : slice(depth)) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

TreeProcess difference(const TreeProcess& a, const TreeProcess& b)
{
    if (!(a.tree() == b.tree())) {
        throw std::invalid_argument("difference: processes live on different trees");
    }
    const int last = std::min(a.last_depth(), b.last_depth());
    return TreeProcess::from_rule(a.tree(), last, [&](int k, std::size_t i) { return a.at(k, i) - b.at(k, i); });
}

double max_abs_difference(const TreeProcess& a, const TreeProcess& b, int up_to)
{
    if (!(a.tree() == b.tree())) {
        throw std::invalid_argument("max_abs_difference: processes live on different trees");
    }
    int last = std::min(a.last_depth(), b.last_depth());
    if (up_to >= 0) {
        last = std::min(last, up_to);
    }
    double m = 0.0;
    for (int k = 0; k <= last; ++k) {
        auto sa = a.slice(k);
        auto sb = b.slice(k);
        for (std::size_t i = 0; i < sa.size(); ++i) {
            m = std::max(m, std::abs(sa[i] - sb[i]));
        }
    }
    return m;
}

Claim::Claim(std::string label, PathRule path_rule) : label_(std::move(label)), path_rule_(std::move(path_rule))
{
    if (!path_rule_) {
        throw std::invalid_argument("claim: empty path rule");
    }
}

Claim::Claim(std::string label, StateRule state_rule) : label_(std::move(label)), state_rule_(std::move(state_rule))
{
    if (!state_rule_) {
        throw std::invalid_argument("claim: empty state rule");
    }
    path_rule_ = [rule = state_rule_](std::span<const double> increments) {
        double b = 0.0;
        for (double db : increments) {
            b += db;
        }
        return rule(b);
    };
}

TreeProcess Claim::terminal(const ScenarioTree& tree) const
{
    const int n = tree.steps();
    TreeProcess out(tree, n);
    auto leaves = out.slice(n);
    if (tree.is_full()) {
        std::vector<double> increments(static_cast<std::size_t>(n));
        for (std::size_t leaf = 0; leaf < leaves.size(); ++leaf) {
            for (int k = 0; k < n; ++k) {
                increments[static_cast<std::size_t>(k)] =
                    ((leaf >> (n - 1 - k)) & 1U) ? tree.sqrt_dt() : -tree.sqrt_dt();
            }
            // Path rule on the increments; for state rules this sums them in
            // path order, matching brownian() on the same leaf.
            leaves[leaf] = path_rule_(increments);
        }
    }
    else {
        if (!state_rule_) {
            throw std::invalid_argument("claim '" + label_ + "' is path-dependent and needs a full tree");
        }
        for (std::size_t j = 0; j < leaves.size(); ++j) {
            leaves[j] = state_rule_(tree.brownian(n, j));
        }
    }
    return out;
}

ScenarioTree build_tree_for(double horizon, int steps, std::span<const Claim> claims, bool prefer_full, int depth_cap)
{
    const bool all_markov = std::all_of(claims.begin(), claims.end(), [](const Claim& c) { return c.path_independent(); });
    if (!all_markov || (prefer_full && steps <= depth_cap)) {
        return ScenarioTree::full(horizon, steps, depth_cap);
    }
    return ScenarioTree::recombining(horizon, steps);
}

StoppingTime::StoppingTime(const ScenarioTree& tree, const Rule& rule, std::string label)
    : tree_(tree), label_(std::move(label))
{
    tree.require_full("stopping time");
    const int n = tree.steps();
    stop_.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        auto& s = stop_[static_cast<std::size_t>(k)];
        s.assign(tree.width(k), 0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] = (k == n || rule(tree, k, i)) ? 1 : 0;
        }
    }
}

StoppingTime StoppingTime::constant(const ScenarioTree& tree, int depth)
{
    tree.require_depth(depth, 0, "constant stopping time");
    return StoppingTime(
        tree, [depth](const ScenarioTree&, int k, std::size_t) { return k == depth; },
        "constant " + std::to_string(depth));
}

StoppingTime StoppingTime::first_hitting(const ScenarioTree& tree, double level)
{
    // Stop marks from deeper than the first hit never matter: stopped_by()
    // returns the first mark along the path.
    return StoppingTime(
        tree,
        [level](const ScenarioTree& t, int k, std::size_t i) { return std::abs(t.brownian(k, i)) >= level - 1e-12; },
        "first hit of |B| >= " + std::to_string(level));
}

StoppingTime StoppingTime::random(const ScenarioTree& tree, std::uint64_t seed, double p)
{
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<std::vector<char>> marks(static_cast<std::size_t>(tree.steps()) + 1);
    for (int k = 0; k <= tree.steps(); ++k) {
        auto& s = marks[static_cast<std::size_t>(k)];
        s.resize(tree.width(k));
        for (auto& m : s) {
            m = coin(rng) ? 1 : 0;
        }
    }
    return StoppingTime(
        tree,
        [marks = std::move(marks)](const ScenarioTree&, int k, std::size_t i) {
            return marks[static_cast<std::size_t>(k)][i] != 0;
        },
        "random seed " + std::to_string(seed));
}

std::optional<int> StoppingTime::stopped_by(int depth, std::size_t i) const
{
    for (int k = 0; k <= depth; ++k) {
        if (stop_[static_cast<std::size_t>(k)][i >> (depth - k)] != 0) {
            return k;
        }
    }
    return std::nullopt;
}

TreeProcess brownian(const ScenarioTree& tree)
{
    // Accumulated along the path on full trees so that B_N agrees bit for
    // bit with the increment sum used by Claim::terminal.
    if (!tree.is_full()) {
        return TreeProcess::from_rule(tree, tree.steps(), [&](int k, std::size_t i) { return tree.brownian(k, i); });
    }
    TreeProcess out(tree, tree.steps());
    for (int k = 1; k <= tree.steps(); ++k) {
        auto parent = out.slice(k - 1);
        auto s = out.slice(k);
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] = parent[i >> 1] + tree.increment_into(k, i);
        }
    }
    return out;
}

TreeProcess cond_expect(const TreeProcess& proc, int depth, const TreeProcess* up_probability)
{
    const auto& tree = proc.tree();
    const int last = proc.last_depth();
    if (depth < 0 || depth > last) {
        throw std::out_of_range("cond_expect: depth " + std::to_string(depth) + " outside [0, " +
                                std::to_string(last) + "]");
    }
    if (up_probability != nullptr && (!(up_probability->tree() == tree) || up_probability->last_depth() < last - 1)) {
        throw std::invalid_argument("cond_expect: measure does not cover the process");
    }
    const int out_last = tree.is_full() ? last : depth;
    TreeProcess out(tree, out_last);
    std::vector<double> level(proc.slice(last).begin(), proc.slice(last).end());
    for (int k = last; k >= 0; --k) {
        if (k < last) {
            std::vector<double> next(tree.width(k));
            for (std::size_t i = 0; i < next.size(); ++i) {
                const double p = up_probability ? up_probability->at(k, i) : 0.5;
                const double u = level[tree.up(k, i)];
                const double d = level[tree.down(k, i)];
                next[i] = up_probability ? p * u + (1.0 - p) * d : 0.5 * (u + d);
            }
            level = std::move(next);
        }
        if (k <= depth) {
            std::copy(level.begin(), level.end(), out.slice(k).begin());
        }
    }
    if (tree.is_full()) {
        for (int k = depth + 1; k <= last; ++k) {
            auto s = out.slice(k);
            auto base = out.slice(depth);
            for (std::size_t i = 0; i < s.size(); ++i) {
                s[i] = base[i >> (k - depth)];
            }
        }
    }
    return out;
}

TreeProcess lift(const TreeProcess& proc, int depth)
{
    const auto& tree = proc.tree();
    tree.require_full("lift");
    if (depth < 0 || depth > proc.last_depth()) {
        throw std::out_of_range("lift: depth out of range");
    }
    TreeProcess out(tree, tree.steps());
    for (int k = 0; k <= tree.steps(); ++k) {
        auto s = out.slice(k);
        if (k <= depth) {
            auto src = proc.slice(k);
            std::copy(src.begin(), src.end(), s.begin());
        }
        else {
            auto base = proc.slice(depth);
            for (std::size_t i = 0; i < s.size(); ++i) {
                s[i] = base[i >> (k - depth)];
            }
        }
    }
    return out;
}

namespace {

bool depth_constant(const TreeProcess& p, int from, int to)
{
    for (int k = from; k < to; ++k) {
        auto s = p.slice(k);
        if (std::any_of(s.begin(), s.end(), [&](double v) { return v != s[0]; })) {
            return false;
        }
    }
    return true;
}

}  // namespace

TreeProcess integrate(IntegralKind kind, const TreeProcess& integrand, int from, int to)
{
    const auto& tree = integrand.tree();
    const int n = tree.steps();
    if (from < 0 || to > n || from > to) {
        throw std::out_of_range("integrate: need 0 <= from <= to <= N");
    }
    if (to > from && integrand.last_depth() < to - 1) {
        throw std::out_of_range("integrate: integrand not defined up to depth to - 1");
    }
    TreeProcess out(tree, n);
    if (tree.is_full()) {
        for (int k = 1; k <= n; ++k) {
            auto prev = out.slice(k - 1);
            auto s = out.slice(k);
            const int j = k - 1;
            for (std::size_t i = 0; i < s.size(); ++i) {
                double v = prev[i >> 1];
                if (j >= from && j < to) {
                    const double psi = integrand.at(j, i >> 1);
                    v += kind == IntegralKind::time ? psi * tree.dt() : psi * tree.increment_into(k, i);
                }
                s[i] = v;
            }
        }
        return out;
    }
    // Recombining lattice: only integrals that stay functions of (depth, ups).
    if (kind == IntegralKind::time) {
        if (!depth_constant(integrand, from, to)) {
            throw std::invalid_argument("integrate: path-dependent time integral needs a full tree");
        }
        double acc = 0.0;
        for (int k = 0; k <= n; ++k) {
            auto s = out.slice(k);
            std::fill(s.begin(), s.end(), acc);
            if (k >= from && k < to) {
                acc += integrand.at(k, 0) * tree.dt();
            }
        }
        return out;
    }
    if (from != 0 || to != n) {
        throw std::invalid_argument("integrate: partial-range stochastic integral needs a full tree");
    }
    const double z = integrand.at(0, 0);
    for (int k = 0; k < n; ++k) {
        auto s = integrand.slice(k);
        if (std::any_of(s.begin(), s.end(), [&](double v) { return v != z; })) {
            throw std::invalid_argument("integrate: non-constant stochastic integrand needs a full tree");
        }
    }
    for (int k = 0; k <= n; ++k) {
        auto s = out.slice(k);
        for (std::size_t i = 0; i < s.size(); ++i) {
            s[i] = z * tree.brownian(k, i);
        }
    }
    return out;
}

}  // namespace gexp
