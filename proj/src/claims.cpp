#include "gexp/claims.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gexp::claims {

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

Claim constant(double c)
{
    return Claim("constant(" + fmt(c) + ")", Claim::StateRule([c](double) { return c; }));
}

Claim linear(double a, double b)
{
    return Claim("linear(" + fmt(a) + "," + fmt(b) + ")", Claim::StateRule([a, b](double x) { return a * x + b; }));
}

Claim call(double strike, double a)
{
    return Claim("call(" + fmt(strike) + "," + fmt(a) + ")",
                 Claim::StateRule([strike, a](double x) { return a * std::max(x - strike, 0.0); }));
}

Claim put(double strike, double a)
{
    return Claim("put(" + fmt(strike) + "," + fmt(a) + ")",
                 Claim::StateRule([strike, a](double x) { return a * std::max(strike - x, 0.0); }));
}

Claim indicator(double strike, double a)
{
    return Claim("indicator(" + fmt(strike) + "," + fmt(a) + ")",
                 Claim::StateRule([strike, a](double x) { return x > strike ? a : 0.0; }));
}

Claim square(double a)
{
    return Claim("square(" + fmt(a) + ")", Claim::StateRule([a](double x) { return a * x * x; }));
}

Claim path_max(double a)
{
    return Claim("path_max(" + fmt(a) + ")", Claim::PathRule([a](std::span<const double> inc) {
                     double b = 0.0;
                     double m = 0.0;
                     for (double db : inc) {
                         b += db;
                         m = std::max(m, b);
                     }
                     return a * m;
                 }));
}

Claim random_leaf(std::uint64_t seed, double scale)
{
    return Claim("random_leaf(" + std::to_string(seed) + "," + fmt(scale) + ")",
                 Claim::PathRule([seed, scale](std::span<const double> inc) {
                     // Hash the up/down pattern together with the path length.
                     std::uint64_t h = splitmix(seed ^ (0xA5A5A5A5ULL + inc.size()));
                     std::uint64_t bits = 0;
                     for (std::size_t k = 0; k < inc.size(); ++k) {
                         bits = (bits << 1) | (inc[k] > 0.0 ? 1U : 0U);
                     }
                     h = splitmix(h ^ bits);
                     const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
                     return scale * (2.0 * u - 1.0);
                 }));
}

std::vector<Claim> random_family(std::uint64_t seed, int count, double scale)
{
    std::vector<Claim> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        out.push_back(random_leaf(splitmix(seed + static_cast<std::uint64_t>(i) * 0x632BE59BD9B4E019ULL), scale));
    }
    return out;
}

}  // namespace gexp::claims
