#pragma once

// Extraction of a driver from a dynamic risk measure and the round trip back.

#include "gexp/axioms.hpp"

#include <vector>

namespace gexp {

struct RepresentOptions {
    /// Sample suite for the axiom and domination preconditions.
    std::vector<Claim> claims;
    /// Growth constants assumed for the domination check and the result.
    double mu = 0.0;
    double nu = 0.0;
    std::uint64_t seed = 1;
    bool check_preconditions = true;
    /// Depth of the full tree used for the preconditions when the measure
    /// itself lives on a lattice or a deep tree.
    int check_depth = 8;
    GeneratorClass flags{true, false, true};
};

struct Representation {
    Generator generator;
    std::vector<double> t_grid;
    std::vector<double> z_grid;
    std::vector<std::vector<double>> values;
    /// Precondition checks that were run, in order r1..r4 then domination.
    std::vector<PropertyCheck> preconditions;
};

/// g_hat(t, z) = recover_generator(drm, t, z) on the grids, interpolated by
/// tabulated_generator. 0 is added to the z grid when absent.
Representation represent(const DynamicRiskMeasure& drm, std::vector<double> z_grid, std::vector<double> t_grid,
                         const RepresentOptions& options = {});

struct RoundTripRow {
    std::string claim;
    double rho0 = 0.0;
    double rho0_hat = 0.0;
    double gap = 0.0;
};

/// rho_0 under drm against rho_0 under from_generator(g_hat) on drm's tree.
std::vector<RoundTripRow> round_trip(const DynamicRiskMeasure& drm, const Generator& g_hat,
                                     const std::vector<Claim>& claims);

struct TabulationDiff {
    double max_abs = 0.0;
    double t = 0.0;
    double z = 0.0;
};

/// Largest |a - b| over the shared grid; the grids must coincide.
TabulationDiff compare_tabulations(const Representation& a, const Representation& b);

}  // namespace gexp
