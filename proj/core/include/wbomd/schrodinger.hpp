#pragma once

#include "wbomd/grid.hpp"
#include "wbomd/model.hpp"

#include <Eigen/Core>

namespace wbomd {

/// Finite-difference discretization of the matrix-valued Schroedinger operator
/// -(2M)^{-1} d^2/dx^2 + V(x) on a uniform grid.  Rows are indexed node-major:
/// row d*k + c is channel c at node k.  The matrix couples neighbouring nodes
/// channel-by-channel with -1/(2M dx^2) and carries V(x_k) + I/(M dx^2) on the
/// diagonal blocks (zero boundary values beyond the first and last node).
struct DiscreteHamiltonian {
    SpatialGrid grid;
    int dim = 0;
    double mass_ratio = 0.0;
    Eigen::MatrixXd matrix;
};

DiscreteHamiltonian assemble_hamiltonian(const MatrixPotential& pot,
                                         const SpatialGrid& grid, double mass_ratio);

/// Full symmetric eigendecomposition of a DiscreteHamiltonian: ascending
/// eigenvalues, orthonormal eigenvector columns.
struct SpectralDecomposition {
    SpatialGrid grid;
    int dim = 0;
    double mass_ratio = 0.0;
    Eigen::VectorXd energies; // ascending
    Eigen::MatrixXd modes;    // column n = eigenvector n
};

/// Dense symmetric eigensolve (LAPACK divide and conquer).  All eigenpairs are
/// computed; failures are reported with the matrix size and the LAPACK code.
SpectralDecomposition solve_eigenproblem(const DiscreteHamiltonian& h);

/// Thermal position density on the grid nodes:
///   rho_k proportional to sum_n e^{-e_n/T} sum_c phi_n(k,c)^2,
/// normalized so that sum_k rho_k dx = 1.  Exponents are shifted by the ground
/// state energy before exponentiation; the shift cancels in the normalization.
Eigen::VectorXd equilibrium_density(const SpectralDecomposition& spec,
                                    double temperature);

/// Symmetrized thermal position autocorrelation at lag tau:
///   Re tr(e^{i tau sqrt(M) D} X~ e^{-i tau sqrt(M) D} (X~ E + E X~)) / (2 tr E)
/// with X~ the position operator rotated to the eigenbasis, D the eigenvalue
/// matrix and E the (shifted) Boltzmann weights.  The imaginary part of the
/// trace must vanish; if it exceeds 1e-8 relative to the result a
/// NumericalError is raised.
double quantum_correlation(const SpectralDecomposition& spec, double temperature,
                           double tau);

} // namespace wbomd
