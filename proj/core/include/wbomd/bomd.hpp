#pragma once

#include "wbomd/grid.hpp"
#include "wbomd/model.hpp"

#include <Eigen/Core>

namespace wbomd {

struct PhasePoint {
    double x = 0.0;
    double p = 0.0;
};

/// Position-Verlet stepping parameters.  n_steps * dt must reproduce the
/// requested lag to 1e-12; use steps_for() to build a compliant pair.
struct VerletParams {
    double dt = 1e-3;
    long n_steps = 0;
};

/// Split |tau| into n equal steps with dt <= min(dt_cap, |tau|/min_steps);
/// the product n * dt recovers |tau| to rounding.  tau = 0 yields zero steps.
VerletParams steps_for(double tau, double dt_cap = 1e-3, long min_steps = 200);

struct TrajectoryResult {
    PhasePoint z;
    bool escaped = false; // |x| exceeded the bound; state frozen at last valid point
};

/// Integrate the single-surface Hamiltonian flow dx = p dt, dp = -dlambda_j dt
/// with the position-Verlet scheme (half-drift, kick at the midpoint,
/// half-drift).  Negative tau integrates backwards.  A trajectory whose |x|
/// exceeds escape_bound is frozen at its last in-bound state and flagged.
TrajectoryResult verlet_trajectory(const MatrixPotential& pot, int surface, PhasePoint z0,
                                   double tau, const VerletParams& params,
                                   double escape_bound = 1e8);

/// Canonical probability of each surface plus the log of its configurational
/// partition integral.
struct GibbsWeights {
    Eigen::VectorXd q;
    Eigen::VectorXd log_partition;
};

/// Surface weights q_j = Z_j / sum_k Z_k with Z_j the trapezoid approximation
/// of the configurational integral of e^{-lambda_j/T} (momentum Gaussians are
/// shared by all surfaces and cancel in the ratio).  Integrands are shifted by
/// the global surface minimum before exponentiation.
GibbsWeights gibbs_weights(const MatrixPotential& pot, double temperature,
                           const SpatialGrid& grid);

/// Surface-weighted classical position density on the grid nodes:
///   rho(x) = sum_j q_j e^{-lambda_j(x)/T} / Z_j.
Eigen::VectorXd md_equilibrium_density(const MatrixPotential& pot, double temperature,
                                       const SpatialGrid& grid);

struct MdCorrelationOptions {
    double dt_cap = 1e-3;
    double escape_bound = 1e8;
    int threads = 0; // <1 = hardware concurrency
};

struct MdCorrelationResult {
    double value = 0.0;
    double escaped_fraction = 0.0;
    bool reliable = true; // false once escaped_fraction exceeds 1%
    /// Largest boundary Boltzmann weight relative to the in-domain maximum; a
    /// domain-coverage diagnostic (1e-8 or less means fully thermally covered).
    double boundary_weight_ratio = 0.0;
};

/// Surface-weighted phase-space quadrature of the classical position
/// autocorrelation sum_j q_j < x_tau^j * x_0 >_j, with per-surface Gibbs
/// averages evaluated by the product trapezoid rule and trajectories advanced
/// independently per initial condition.  The reduction over initial conditions
/// is fixed-order pairwise summation, so results are identical for every
/// thread count.
MdCorrelationResult md_correlation(const MatrixPotential& pot, double temperature,
                                   double tau, const PhaseSpaceGrid& grid,
                                   const GibbsWeights& weights,
                                   const MdCorrelationOptions& options = {});

} // namespace wbomd
