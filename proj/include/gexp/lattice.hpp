#pragma once

// Exact finite model of a one-dimensional Brownian filtration.
//
// The ground-truth structure is a full binary tree: a node at depth k is the
// bit-string of its k moves (most significant bit = first move, 1 = up), so
// depth-k nodes are indexed 0..2^k-1 in lexicographic order. For claims that
// depend on the terminal Brownian value only, a recombining lattice indexes a
// depth-k node by its number of up moves (0..k). Every backward operation in
// this library is written against the up()/down() child maps and therefore
// runs unchanged on both layouts.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gexp {

inline constexpr int kDefaultDepthCap = 22;
inline constexpr int kRecombiningDepthCap = 10000;

struct TimeGrid {
    double horizon = 1.0;
    int steps = 1;
    double dt = 1.0;

    static TimeGrid make(double horizon, int steps);
    double time(int depth) const { return dt * depth; }
};

enum class Layout { full, recombining };

struct NodeId {
    int depth = 0;
    std::size_t index = 0;

    friend bool operator==(const NodeId&, const NodeId&) = default;
};

std::string to_string(const NodeId& node);

class ScenarioTree {
public:
    /// Full binary tree. Rejects steps < 1, horizon <= 0 and steps > depth_cap.
    static ScenarioTree full(double horizon, int steps, int depth_cap = kDefaultDepthCap);
    static ScenarioTree recombining(double horizon, int steps);

    const TimeGrid& grid() const { return grid_; }
    Layout layout() const { return layout_; }
    bool is_full() const { return layout_ == Layout::full; }
    int steps() const { return grid_.steps; }
    double horizon() const { return grid_.horizon; }
    double dt() const { return grid_.dt; }
    double sqrt_dt() const { return sqrt_dt_; }
    double time(int depth) const { return grid_.time(depth); }

    std::size_t width(int depth) const
    {
        return layout_ == Layout::full ? (std::size_t{1} << depth) : static_cast<std::size_t>(depth) + 1;
    }
    std::size_t up(int /*depth*/, std::size_t i) const { return layout_ == Layout::full ? 2 * i + 1 : i + 1; }
    std::size_t down(int /*depth*/, std::size_t i) const { return layout_ == Layout::full ? 2 * i : i; }

    /// Number of up moves on the path to the node.
    int ups(int depth, std::size_t i) const;
    /// Brownian value (2 ups - depth) * sqrt(dt).
    double brownian(int depth, std::size_t i) const { return (2.0 * ups(depth, i) - depth) * sqrt_dt_; }
    /// Ancestor index at depth `at` (full trees only).
    std::size_t ancestor(int depth, std::size_t i, int at) const;
    /// Increment +-sqrt(dt) that led into the node (full trees only, depth >= 1).
    double increment_into(int depth, std::size_t i) const;
    /// The N increments of the path through leaf `leaf` (full trees only).
    std::vector<double> path_increments(std::size_t leaf) const;

    void require_full(const char* what) const;
    void require_depth(int depth, int lo, const char* what) const;

    friend bool operator==(const ScenarioTree& a, const ScenarioTree& b)
    {
        return a.layout_ == b.layout_ && a.grid_.steps == b.grid_.steps && a.grid_.horizon == b.grid_.horizon;
    }

private:
    ScenarioTree(TimeGrid grid, Layout layout);

    TimeGrid grid_;
    Layout layout_ = Layout::full;
    double sqrt_dt_ = 1.0;
};

/// One real value per node for depths 0..last_depth.
class TreeProcess {
public:
    TreeProcess(const ScenarioTree& tree, int last_depth, double fill = 0.0);
    explicit TreeProcess(const ScenarioTree& tree) : TreeProcess(tree, tree.steps()) {}

    static TreeProcess from_rule(const ScenarioTree& tree, int last_depth,
                                 const std::function<double(int depth, std::size_t index)>& rule);

    const ScenarioTree& tree() const { return tree_; }
    int last_depth() const { return static_cast<int>(slices_.size()) - 1; }

    std::span<double> slice(int depth) { return slices_.at(static_cast<std::size_t>(depth)); }
    std::span<const double> slice(int depth) const { return slices_.at(static_cast<std::size_t>(depth)); }

    double& at(int depth, std::size_t i) { return slices_[static_cast<std::size_t>(depth)][i]; }
    double at(int depth, std::size_t i) const { return slices_[static_cast<std::size_t>(depth)][i]; }
    double root() const { return slices_.front().front(); }

    double max_abs() const;
    double max_abs(int depth) const;

private:
    ScenarioTree tree_;
    std::vector<std::vector<double>> slices_;
};

/// Node-wise a - b on common depths.
TreeProcess difference(const TreeProcess& a, const TreeProcess& b);
/// Largest |a - b| over nodes of depths 0..up_to (defaults to all common depths).
double max_abs_difference(const TreeProcess& a, const TreeProcess& b, int up_to = -1);

/// A terminal variable given by a pure rule on full paths. Claims that depend
/// on the terminal Brownian value only also carry `state_rule`, which marks
/// them path-independent and lets them live on a recombining lattice.
class Claim {
public:
    using PathRule = std::function<double(std::span<const double> increments)>;
    using StateRule = std::function<double(double terminal_brownian)>;

    Claim(std::string label, PathRule path_rule);
    Claim(std::string label, StateRule state_rule);

    const std::string& label() const { return label_; }
    bool path_independent() const { return static_cast<bool>(state_rule_); }
    double operator()(std::span<const double> increments) const { return path_rule_(increments); }

    /// Process whose depth-N slice holds the claim (earlier slices are zero).
    TreeProcess terminal(const ScenarioTree& tree) const;

private:
    std::string label_;
    PathRule path_rule_;
    StateRule state_rule_;
};

/// Full tree when any claim is path-dependent or N is within `depth_cap` and
/// `prefer_full` is set; recombining lattice otherwise.
ScenarioTree build_tree_for(double horizon, int steps, std::span<const Claim> claims, bool prefer_full = false,
                            int depth_cap = kDefaultDepthCap);

/// Stop/continue decision per node with stop forced at depth N. Full trees only.
class StoppingTime {
public:
    using Rule = std::function<bool(const ScenarioTree&, int depth, std::size_t index)>;

    StoppingTime(const ScenarioTree& tree, const Rule& rule, std::string label = {});

    static StoppingTime constant(const ScenarioTree& tree, int depth);
    /// First depth at which |B| >= level.
    static StoppingTime first_hitting(const ScenarioTree& tree, double level);
    /// Seeded random decisions: each node stops with probability p.
    static StoppingTime random(const ScenarioTree& tree, std::uint64_t seed, double p);

    const ScenarioTree& tree() const { return tree_; }
    const std::string& label() const { return label_; }
    /// Raw decision at the node.
    bool marks_stop(int depth, std::size_t i) const { return stop_[static_cast<std::size_t>(depth)][i] != 0; }
    /// Stopping depth of the path through leaf or interior node, i.e. the
    /// first depth <= `depth` along the path with a stop mark, or nullopt.
    std::optional<int> stopped_by(int depth, std::size_t i) const;
    /// Stopping depth along the path of a leaf.
    int at_leaf(std::size_t leaf) const { return *stopped_by(tree_.steps(), leaf); }

private:
    ScenarioTree tree_;
    std::vector<std::vector<char>> stop_;
    std::string label_;
};

/// B_k at every node.
TreeProcess brownian(const ScenarioTree& tree);

/// Conditional expectation of the last slice X of `proc` given F_depth.
/// At depths j <= depth the result holds E[X | F_j]; on full trees the slices
/// below `depth` repeat the depth-`depth` value of each subtree, so the result
/// is the F_depth-measurable variable seen at every later depth. On a
/// recombining lattice the result stops at `depth`. `up_probability`, when
/// given, supplies the one-step probability of the up move at each node.
TreeProcess cond_expect(const TreeProcess& proc, int depth, const TreeProcess* up_probability = nullptr);

/// Extends the depth-`depth` slice to all later depths (full trees only).
TreeProcess lift(const TreeProcess& proc, int depth);

enum class IntegralKind { time, stochastic };

/// Left-endpoint integral of `integrand` from depth `from` to depth `to`: the
/// value at depth k is sum over from <= j < min(k, to) of psi_j * dt (time) or
/// psi_j * (B_{j+1} - B_j) (stochastic); zero before `from`, frozen after `to`.
TreeProcess integrate(IntegralKind kind, const TreeProcess& integrand, int from, int to);

}  // namespace gexp
