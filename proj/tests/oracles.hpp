#pragma once

// Reference computations that do not go through the library's backward
// solvers: explicit path enumeration, binomial sums and dense grid searches.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

using Payoff = std::function<double(std::span<const double> increments)>;

/// Increment sequences of all 2^n paths, first move most significant, up = 1.
inline std::vector<std::vector<double>> all_paths(int n, double sqrt_dt)
{
    std::vector<std::vector<double>> out;
    for (std::size_t leaf = 0; leaf < (std::size_t{1} << n); ++leaf) {
        std::vector<double> inc(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            inc[static_cast<std::size_t>(j)] = ((leaf >> (n - 1 - j)) & 1U) ? sqrt_dt : -sqrt_dt;
        }
        out.push_back(std::move(inc));
    }
    return out;
}

namespace detail {

inline double euler_recurse(const std::function<double(double, double)>& g, const Payoff& payoff, int N,
                            double dt, double s, std::vector<double>& prefix)
{
    const int k = static_cast<int>(prefix.size());
    if (k == N) {
        return payoff(prefix);
    }
    prefix.push_back(s);
    const double yu = euler_recurse(g, payoff, N, dt, s, prefix);
    prefix.back() = -s;
    const double yd = euler_recurse(g, payoff, N, dt, s, prefix);
    prefix.pop_back();
    const double z = (yu - yd) / (2.0 * s);
    return 0.5 * (yu + yd) + g(k * dt, z) * dt;
}

}  // namespace detail

/// Root of the explicit scheme for terminal `payoff`, by recursion over path
/// prefixes.
inline double euler_root(const std::function<double(double t, double z)>& g, double T, int N, const Payoff& payoff)
{
    std::vector<double> prefix;
    const double dt = T / N;
    return detail::euler_recurse(g, payoff, N, dt, std::sqrt(dt), prefix);
}

/// (1/2nu) ln E[exp(2 nu X)] over all 2^N equally likely paths.
inline double entropic_paths(double nu, double T, int N, const Payoff& payoff)
{
    const auto paths = all_paths(N, std::sqrt(T / N));
    std::vector<long double> x;
    for (const auto& p : paths) {
        x.push_back(2.0L * nu * payoff(p));
    }
    const long double m = *std::max_element(x.begin(), x.end());
    long double s = 0.0L;
    for (long double v : x) {
        s += std::exp(v - m);
    }
    return static_cast<double>((m + std::log(s / x.size())) / (2.0L * nu));
}

/// (1/2nu) ln E[exp(2 nu f(B_T))] with binomial weights.
inline double entropic_binomial(double nu, double T, int N, const std::function<double(double)>& f)
{
    const long double s = std::sqrt(static_cast<long double>(T) / N);
    std::vector<long double> terms;
    for (int j = 0; j <= N; ++j) {
        const long double logw = std::lgamma(N + 1.0L) - std::lgamma(j + 1.0L) - std::lgamma(N - j + 1.0L) -
                                 N * std::log(2.0L);
        terms.push_back(logw + 2.0L * nu * f(static_cast<double>((2 * j - N) * s)));
    }
    const long double m = *std::max_element(terms.begin(), terms.end());
    long double sum = 0.0L;
    for (long double v : terms) {
        sum += std::exp(v - m);
    }
    return static_cast<double>((m + std::log(sum)) / (2.0L * nu));
}

/// E[f(B_T)] with binomial weights.
inline double binomial_mean(double T, int N, const std::function<double(double)>& f, double p_up = 0.5)
{
    const double s = std::sqrt(T / N);
    double sum = 0.0;
    for (int j = 0; j <= N; ++j) {
        const double logw = std::lgamma(N + 1.0) - std::lgamma(j + 1.0) - std::lgamma(N - j + 1.0) +
                            j * std::log(p_up) + (N - j) * std::log(1.0 - p_up);
        sum += std::exp(logw) * f((2 * j - N) * s);
    }
    return sum;
}

/// sup_z {x z - g(z)} by a uniform grid on [lo, hi] followed by golden-section
/// refinement around the best grid point.
inline double dense_conjugate(const std::function<double(double)>& g, double x, double lo, double hi, int n = 20001)
{
    const double h = (hi - lo) / (n - 1);
    double best = -HUGE_VAL;
    double arg = lo;
    for (int i = 0; i < n; ++i) {
        const double z = lo + i * h;
        const double v = x * z - g(z);
        if (v > best) {
            best = v;
            arg = z;
        }
    }
    double a = std::max(lo, arg - h);
    double b = std::min(hi, arg + h);
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 200; ++it) {
        const double c = b - r * (b - a);
        const double d = a + r * (b - a);
        if (x * c - g(c) > x * d - g(d)) {
            b = d;
        }
        else {
            a = c;
        }
    }
    const double z = 0.5 * (a + b);
    return std::max(best, x * z - g(z));
}

/// (|x| - mu)_+^2 / (4 nu)
inline double quadratic_conjugate(double mu, double nu, double x)
{
    const double e = std::max(std::abs(x) - mu, 0.0);
    return e * e / (4.0 * nu);
}

/// KL(Q | P) over all paths for a measure with one-step up-probability
/// p(depth, prefix-as-leaf-index), P uniform.
inline double path_relative_entropy(int N, const std::function<double(int depth, std::size_t index)>& p_up)
{
    double total = 0.0;
    for (std::size_t leaf = 0; leaf < (std::size_t{1} << N); ++leaf) {
        double q = 1.0;
        for (int k = 0; k < N; ++k) {
            const std::size_t node = leaf >> (N - k);
            const bool up = (leaf >> (N - 1 - k)) & 1U;
            const double p = p_up(k, node);
            q *= up ? p : 1.0 - p;
        }
        if (q > 0.0) {
            total += q * std::log(q * static_cast<double>(std::size_t{1} << N));
        }
    }
    return total;
}

// Values computed with mpmath at 40 digits, nu = 0.5, T = 1.
/// N ln cosh(1 / sqrt N): entropic value of B_T on the N-step tree.
inline constexpr double kEntropyTreeN8 = 0.48991789203224659697;
inline constexpr double kEntropyTreeN64 = 0.4987033164094881786;
inline constexpr double kEntropyTreeN1024 = 0.49991864097814851018;
/// ln E[exp(-(B_T - 1)_+)] on the 64-step lattice.
inline constexpr double kEntropyCallN64 = -0.057175931873992396846;

}  // namespace oracle
