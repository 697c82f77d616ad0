#pragma once

#include "wbomd/bomd.hpp"
#include "wbomd/model.hpp"

#include <cstdint>
#include <functional>

namespace wbomd {

/// Parameters of the underdamped Langevin sampler.
struct LangevinParams {
    double friction = 1.0;
    double temperature = 1.0;
    double dt = 1e-3;
    long burn_in = 100000;
    long steps = 2000000; // total steps including burn-in
    std::uint64_t seed = 0;
    int batches = 20; // batch-means blocks for the error bar
};

/// Ergodic-average estimate with a batch-means error bar.
struct ErgodicEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double effective_samples = 0.0;
    long samples = 0;
};

/// Time average of an observable along one Langevin path on surface j.  One
/// step is the symmetric splitting kick / drift / exact Ornstein-Uhlenbeck
/// momentum refresh / drift / kick; the OU substep uses the exact damping
/// e^{-alpha dt} and stationary-consistent noise variance T(1 - e^{-2 alpha dt}),
/// so the momentum marginal carries no discretization bias.  The noise stream
/// is counter-based on (seed, stream): identical inputs give bit-identical
/// paths on every platform and thread layout.
ErgodicEstimate langevin_average(const MatrixPotential& pot, int surface,
                                 const std::function<double(PhasePoint)>& observable,
                                 const LangevinParams& params, PhasePoint z0 = {},
                                 std::uint64_t stream = 0);

/// Surface weights estimated from a single ground-surface path: the running
/// averages of e^{-(lambda_j - lambda_1)/T}, normalized across surfaces.
/// Error bars are batch means of the normalized batch weights.
struct WeightEstimate {
    Eigen::VectorXd q;
    Eigen::VectorXd std_error;
};

WeightEstimate estimate_weights_groundstate(const MatrixPotential& pot, double temperature,
                                            const LangevinParams& params, PhasePoint z0 = {},
                                            std::uint64_t stream = 0);

/// Scalar effective potential whose Gibbs density is the sum over surfaces:
///   merged(x) = -T log sum_j e^{-lambda_j(x)/T}
/// (log-sum-exp with max shift).  Its force is the Boltzmann-weighted average
/// of the per-surface forces, so a single path on this potential samples the
/// full multi-surface canonical ensemble.
MatrixPotential merged_potential(const MatrixPotential& pot, double temperature);

/// Single-path estimator of the surface-summed canonical average of a
/// surface-independent observable, via Langevin sampling of merged_potential.
ErgodicEstimate merged_path_average(const MatrixPotential& pot, double temperature,
                                    const std::function<double(PhasePoint)>& observable,
                                    const LangevinParams& params, PhasePoint z0 = {},
                                    std::uint64_t stream = 0);

} // namespace wbomd
