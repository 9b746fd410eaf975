#include "gexp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gexp {

double ExtReal::value() const
{
    if (kind_ != Kind::finite) {
        throw std::domain_error("ExtReal::value on an infinite value");
    }
    return value_;
}

std::string ExtReal::to_string() const
{
    switch (kind_) {
    case Kind::plus_infinity: return "+inf";
    case Kind::minus_infinity: return "-inf";
    default: break;
    }
    std::ostringstream os;
    os.precision(17);
    os << value_;
    return os.str();
}

Generator::Generator(std::string name, Eval eval, double mu, double nu, GeneratorClass flags, Conjugate conjugate,
                     Subdifferential subdifferential)
{
    if (!eval) {
        throw std::invalid_argument("generator: empty evaluation function");
    }
    if (!(mu >= 0.0) || !(nu >= 0.0)) {
        throw std::invalid_argument("generator '" + name + "': growth constants mu and nu must be nonnegative");
    }
    state_ = std::make_shared<const State>(State{std::move(name), std::move(eval), mu, nu, flags, std::move(conjugate),
                                                 std::move(subdifferential)});
}

Generator Generator::without_analytic() const
{
    return Generator(name() + " [numeric]", state_->eval, mu(), nu(), flags());
}

namespace {

void require_nonnegative(double mu, double nu, const char* kind)
{
    if (!(mu >= 0.0) || !(nu >= 0.0)) {
        throw std::invalid_argument(std::string(kind) + ": mu and nu must be nonnegative");
    }
}

std::string num(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

Generator quadratic_upper(double mu, double nu)
{
    require_nonnegative(mu, nu, "quadratic_upper");
    GeneratorClass flags{true, nu == 0.0, true};
    auto conj = [mu, nu](double, double x) {
        const double excess = std::abs(x) - mu;
        if (excess <= 0.0) {
            return ExtReal(0.0);
        }
        if (nu == 0.0) {
            return ExtReal::plus_infinity();
        }
        return ExtReal(excess * excess / (4.0 * nu));
    };
    auto sub = [mu, nu](double, double z) {
        if (z > 0.0) {
            const double s = mu + 2.0 * nu * z;
            return Interval{s, s};
        }
        if (z < 0.0) {
            const double s = -mu + 2.0 * nu * z;
            return Interval{s, s};
        }
        return Interval{-mu, mu};
    };
    return Generator(
        "quadratic_upper(" + num(mu) + "," + num(nu) + ")",
        [mu, nu](double, double z) { return mu * std::abs(z) + nu * z * z; }, mu, nu, flags, conj, sub);
}

Generator quadratic_lower(double mu, double nu)
{
    require_nonnegative(mu, nu, "quadratic_lower");
    const bool linear_zero = mu == 0.0 && nu == 0.0;
    GeneratorClass flags{linear_zero, linear_zero, linear_zero};
    auto conj = [mu, nu](double, double x) {
        if (nu > 0.0 || mu > 0.0 || x != 0.0) {
            return ExtReal::plus_infinity();
        }
        return ExtReal(0.0);
    };
    return Generator(
        "quadratic_lower(" + num(mu) + "," + num(nu) + ")",
        [mu, nu](double, double z) { return -mu * std::abs(z) - nu * z * z; }, mu, nu, flags, conj);
}

Generator entropy_generator(double nu)
{
    if (!(nu > 0.0)) {
        throw std::invalid_argument("entropy: nu must be positive");
    }
    GeneratorClass flags{true, false, true};
    return Generator(
        "entropy(" + num(nu) + ")", [nu](double, double z) { return nu * z * z; }, 0.0, nu, flags,
        [nu](double, double x) { return ExtReal(x * x / (4.0 * nu)); },
        [nu](double, double z) {
            const double s = 2.0 * nu * z;
            return Interval{s, s};
        });
}

Generator sublinear_interval(double lo, double hi, double mu)
{
    if (!(lo <= hi)) {
        throw std::invalid_argument("sublinear_interval: need lo <= hi");
    }
    const double bound = std::max(std::abs(lo), std::abs(hi));
    if (mu == 0.0) {
        mu = bound;
    }
    if (mu < 0.0) {
        throw std::invalid_argument("sublinear_interval: mu must be nonnegative");
    }
    if (bound > mu) {
        throw std::invalid_argument("sublinear_interval: slope set must lie in [-mu, mu]");
    }
    GeneratorClass flags{true, true, true};
    return Generator(
        "sublinear_interval([" + num(lo) + "," + num(hi) + "])",
        [lo, hi](double, double z) { return z > 0.0 ? hi * z : lo * z; }, mu, 0.0, flags,
        [lo, hi](double, double x) { return (x >= lo && x <= hi) ? ExtReal(0.0) : ExtReal::plus_infinity(); },
        [lo, hi](double, double z) {
            if (z > 0.0) {
                return Interval{hi, hi};
            }
            if (z < 0.0) {
                return Interval{lo, lo};
            }
            return Interval{lo, hi};
        });
}

Generator scaled_abs(double mu)
{
    require_nonnegative(mu, 0.0, "scaled_abs");
    auto g = quadratic_upper(mu, 0.0);
    return Generator("scaled_abs(" + num(mu) + ")", [mu](double, double z) { return mu * std::abs(z); }, mu, 0.0,
                     g.flags(), g.analytic_conjugate(), g.analytic_subdifferential());
}

Generator make_builtin(BuiltinKind kind, const BuiltinParams& p)
{
    switch (kind) {
    case BuiltinKind::quadratic_upper: return quadratic_upper(p.mu, p.nu);
    case BuiltinKind::quadratic_lower: return quadratic_lower(p.mu, p.nu);
    case BuiltinKind::entropy:
        require_nonnegative(p.mu, p.nu, "entropy");
        return entropy_generator(p.nu);
    case BuiltinKind::sublinear_interval: return sublinear_interval(p.lo, p.hi, p.mu);
    case BuiltinKind::scaled_abs: return scaled_abs(p.mu);
    }
    throw std::invalid_argument("unknown builtin generator kind");
}

std::optional<BuiltinKind> parse_builtin_kind(const std::string& name)
{
    if (name == "quadratic_upper") return BuiltinKind::quadratic_upper;
    if (name == "quadratic_lower") return BuiltinKind::quadratic_lower;
    if (name == "entropy") return BuiltinKind::entropy;
    if (name == "sublinear_interval") return BuiltinKind::sublinear_interval;
    if (name == "scaled_abs") return BuiltinKind::scaled_abs;
    return std::nullopt;
}

std::string to_string(BuiltinKind kind)
{
    switch (kind) {
    case BuiltinKind::quadratic_upper: return "quadratic_upper";
    case BuiltinKind::quadratic_lower: return "quadratic_lower";
    case BuiltinKind::entropy: return "entropy";
    case BuiltinKind::sublinear_interval: return "sublinear_interval";
    case BuiltinKind::scaled_abs: return "scaled_abs";
    }
    return "unknown";
}

std::vector<double> linspace(double lo, double hi, int count)
{
    if (count < 1) {
        throw std::invalid_argument("linspace: count must be positive");
    }
    std::vector<double> out(static_cast<std::size_t>(count));
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    }
    return out;
}

namespace {

constexpr int kGridPoints = 1024;
constexpr int kPasses = 3;
constexpr double kZoom = 16.0;

struct GridMax {
    double z = 0.0;
    double value = 0.0;
    double spacing = 0.0;
    bool on_outer_edge = false;
};

// Three zooming passes of 1024 points each, plus the window centre.
template <class Objective>
GridMax zoom_maximize(Objective&& obj, double half_width)
{
    double centre = 0.0;
    double half = half_width;
    GridMax best{0.0, obj(0.0), 0.0, false};
    for (int pass = 0; pass < kPasses; ++pass) {
        const double lo = centre - half;
        const double step = 2.0 * half / (kGridPoints - 1);
        for (int i = 0; i < kGridPoints; ++i) {
            const double z = lo + step * i;
            const double v = obj(z);
            if (v > best.value) {
                best.value = v;
                best.z = z;
            }
        }
        if (pass == 0) {
            best.on_outer_edge = std::abs(std::abs(best.z) - half_width) < 0.5 * step;
        }
        best.spacing = step;
        centre = best.z;
        half /= kZoom;
    }
    return best;
}

}  // namespace

ConjugatePoint conjugate(const Generator& g, double t, double x, ConjugateMethod method)
{
    if (method == ConjugateMethod::automatic && g.has_analytic_conjugate()) {
        ConjugatePoint out;
        out.x = x;
        out.f_value = g.analytic_conjugate()(t, x);
        return out;
    }
    const double mu = g.mu();
    const double nu = g.nu();
    auto obj = [&](double z) { return x * z - g(t, z); };
    ConjugatePoint out;
    out.x = x;

    if (nu == 0.0) {
        if (g.flags().sublinear) {
            // Positively homogeneous: the sup is 0 unless some direction has
            // x z > g(t, z), in which case scaling sends it to +inf.
            const double half = 8.0;
            const double step = 2.0 * half / (kGridPoints - 1);
            for (int i = 0; i < kGridPoints; ++i) {
                const double z = -half + step * i;
                const double v = obj(z);
                if (v > 1e-12 * (1.0 + std::abs(x * z) + std::abs(g(t, z)))) {
                    out.f_value = ExtReal::plus_infinity();
                    return out;
                }
            }
            out.f_value = ExtReal(0.0);
            out.argmax_z = 0.0;
            return out;
        }
        const double far = 1e6;
        const double slope_up = g(t, far) / far;
        const double slope_down = g(t, -far) / far;
        if (x > slope_up + 1e-9 || -x > slope_down + 1e-9) {
            out.f_value = ExtReal::plus_infinity();
            return out;
        }
    }

    const double z_max = nu > 0.0 ? std::max(8.0, (std::abs(x) + mu) / (2.0 * nu) * 2.0) : 8.0;
    const GridMax best = zoom_maximize(obj, z_max);
    if (best.on_outer_edge) {
        // The incumbent sits on the search boundary: probe outward and
        // declare +inf if the objective keeps growing.
        double z = best.z;
        double v = best.value;
        bool growing = true;
        for (int i = 0; i < 20 && growing; ++i) {
            const double z2 = 2.0 * z;
            const double v2 = obj(z2);
            growing = v2 > v;
            z = z2;
            v = v2;
        }
        if (growing) {
            out.f_value = ExtReal::plus_infinity();
            return out;
        }
    }
    out.f_value = ExtReal(best.value);
    out.argmax_z = best.z;
    out.tolerance = best.spacing * (std::abs(x) + mu + 2.0 * nu * (std::abs(best.z) + best.spacing));
    return out;
}

Interval subdifferential(const Generator& g, double t, double z)
{
    if (!g.flags().convex) {
        throw std::invalid_argument("subdifferential: generator '" + g.name() + "' is not flagged convex");
    }
    if (g.has_analytic_subdifferential()) {
        return g.analytic_subdifferential()(t, z);
    }
    const double h = std::ldexp(1.0, -20) * std::max(1.0, std::abs(z));
    const double gz = g(t, z);
    double left = (gz - g(t, z - h)) / h;
    double right = (g(t, z + h) - gz) / h;
    if (left > right) {
        const double mid = 0.5 * (left + right);
        left = mid;
        right = mid;
    }
    return Interval{left, right};
}

bool ClassReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const ClassCheck& c) { return !c.claimed || c.holds; });
}

const ClassCheck* ClassReport::find(const std::string& property) const
{
    for (const auto& c : checks) {
        if (c.property == property) {
            return &c;
        }
    }
    return nullptr;
}

namespace {

double tol_for(double a, double b) { return 1e-11 * (1.0 + std::abs(a) + std::abs(b)); }

void record(ClassCheck& check, double gap, const std::string& witness)
{
    if (check.holds) {
        check.holds = false;
        check.gap = gap;
        check.witness = witness;
    }
}

}  // namespace

ClassReport verify_class(const Generator& g, const std::vector<double>& z_grid, const std::vector<double>& t_grid,
                         const std::vector<double>& theta_grid)
{
    const double mu = g.mu();
    const double nu = g.nu();
    ClassCheck zero{"zero_at_origin", true, true, {}, 0.0};
    ClassCheck growth{"growth", true, true, {}, 0.0};
    ClassCheck convex{"convexity", g.flags().convex, true, {}, 0.0};
    ClassCheck homog{"positive_homogeneity", g.flags().sublinear, true, {}, 0.0};
    ClassCheck subadd{"subadditivity", g.flags().sublinear, true, {}, 0.0};
    ClassCheck theta{"theta_domination", g.flags().theta_dominated, true, {}, 0.0};

    const std::vector<double> betas{0.0, 0.5, 2.0, 3.0};
    for (double t : t_grid) {
        const std::string at_t = "t=" + num(t);
        if (std::abs(g(t, 0.0)) > 0.0) {
            record(zero, std::abs(g(t, 0.0)), at_t);
        }
        for (double z : z_grid) {
            const double v = g(t, z);
            const double bound = mu * std::abs(z) + nu * z * z;
            if (std::abs(v) > bound + tol_for(v, bound)) {
                record(growth, std::abs(v) - bound, at_t + " z=" + num(z) + " |g|=" + num(std::abs(v)) +
                                                        " bound=" + num(bound));
            }
            for (double beta : betas) {
                const double lhs = g(t, beta * z);
                const double rhs = beta * v;
                if (std::abs(lhs - rhs) > tol_for(lhs, rhs)) {
                    record(homog, std::abs(lhs - rhs), at_t + " z=" + num(z) + " beta=" + num(beta));
                }
            }
        }
        for (std::size_t a = 0; a < z_grid.size(); ++a) {
            for (std::size_t b = 0; b < z_grid.size(); ++b) {
                const double za = z_grid[a];
                const double zb = z_grid[b];
                const double ga = g(t, za);
                const double gb = g(t, zb);
                if (a < b) {
                    const double mid = g(t, 0.5 * (za + zb));
                    const double chord = 0.5 * (ga + gb);
                    if (mid > chord + tol_for(mid, chord)) {
                        record(convex, mid - chord, at_t + " z1=" + num(za) + " z2=" + num(zb));
                    }
                }
                const double sum = g(t, za + zb);
                if (sum > ga + gb + tol_for(sum, ga + gb)) {
                    record(subadd, sum - ga - gb, at_t + " z1=" + num(za) + " z2=" + num(zb));
                }
                for (double th : theta_grid) {
                    const double d = std::abs(za - th * zb);
                    const double lhs = ga - th * gb;
                    const double rhs = mu * d + nu * d * d / (1.0 - th);
                    if (lhs > rhs + tol_for(lhs, rhs)) {
                        record(theta, lhs - rhs,
                               at_t + " z=" + num(za) + " z~=" + num(zb) + " theta=" + num(th));
                    }
                }
            }
        }
    }
    return ClassReport{{zero, growth, convex, homog, subadd, theta}};
}

Generator tabulated_generator(std::string name, std::vector<double> t_grid, std::vector<double> z_grid,
                              std::vector<std::vector<double>> values, double mu, double nu, GeneratorClass flags)
{
    if (t_grid.empty() || z_grid.size() < 3) {
        throw std::invalid_argument("tabulated generator: need at least one t and three z nodes");
    }
    if (values.size() != t_grid.size()) {
        throw std::invalid_argument("tabulated generator: value rows do not match the t grid");
    }
    for (const auto& row : values) {
        if (row.size() != z_grid.size()) {
            throw std::invalid_argument("tabulated generator: value columns do not match the z grid");
        }
    }
    if (!std::is_sorted(t_grid.begin(), t_grid.end()) || !std::is_sorted(z_grid.begin(), z_grid.end())) {
        throw std::invalid_argument("tabulated generator: grids must be sorted");
    }
    struct Table {
        std::vector<double> t, z;
        std::vector<std::vector<double>> v;
    };
    auto table = std::make_shared<const Table>(Table{std::move(t_grid), std::move(z_grid), std::move(values)});

    auto along_z = [](const std::vector<double>& zs, const std::vector<double>& row, double z) {
        const std::size_t n = zs.size();
        auto quadratic = [&](std::size_t i0, double x) {
            const double x0 = zs[i0], x1 = zs[i0 + 1], x2 = zs[i0 + 2];
            return row[i0] * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2)) +
                   row[i0 + 1] * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2)) +
                   row[i0 + 2] * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
        };
        if (z < zs.front()) {
            return quadratic(0, z);
        }
        if (z > zs.back()) {
            return quadratic(n - 3, z);
        }
        auto it = std::upper_bound(zs.begin(), zs.end(), z);
        std::size_t hi = static_cast<std::size_t>(it - zs.begin());
        if (hi >= n) {
            return row.back();
        }
        const std::size_t lo = hi - 1;
        const double w = (z - zs[lo]) / (zs[hi] - zs[lo]);
        return (1.0 - w) * row[lo] + w * row[hi];
    };

    auto eval = [table, along_z](double t, double z) {
        const auto& ts = table->t;
        if (ts.size() == 1 || t <= ts.front()) {
            return along_z(table->z, table->v.front(), z);
        }
        if (t >= ts.back()) {
            return along_z(table->z, table->v.back(), z);
        }
        auto it = std::upper_bound(ts.begin(), ts.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
        const std::size_t lo = hi - 1;
        const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
        return (1.0 - w) * along_z(table->z, table->v[lo], z) + w * along_z(table->z, table->v[hi], z);
    };
    return Generator(std::move(name), eval, mu, nu, flags);
}

}  // namespace gexp
