#pragma once

#include "wbomd/grid.hpp"
#include "wbomd/model.hpp"

#include <Eigen/Dense>
#include <vector>

namespace wbomd {

/// Hierarchy of eigenframe fields produced by iterated diagonalization of a
/// matrix potential on a spatial grid.
///
/// Level 1 is the plain pointwise eigendecomposition of V(x).  Level j+1
/// diagonalizes the curvature-corrected matrix
///
///     W^(j+1)(x) = V(x) + (1/4M) B^(j)(x),
///     B^(j) = G^T G,   G = (d Psi^(j)/dx) Psi^(j)T,
///
/// where Psi^(j) is the level-j frame field and the x-derivative is a grid
/// finite difference.  Successive levels agree to increasingly high order in
/// 1/M, which `sup_frame_increment` and `sup_residual` measure.
struct DiagonalizationLevels {
    SpatialGrid grid;
    int dim = 0;
    double mass_ratio = 0.0;
    int order = 0;
    /// frames[j-1][k]: level-j eigenvector columns at node k (d x d, orthonormal,
    /// leading-component-positive sign convention).
    std::vector<std::vector<Eigen::MatrixXd>> frames;
    /// values[j-1][k]: level-j ascending eigenvalues at node k.
    std::vector<std::vector<Eigen::VectorXd>> values;
};

/// Runs the recursion for levels 1..order (order in [1, 4]).  Level 1 uses the
/// family's own eigendecomposition.  Every level requires the surfaces to stay
/// separated by more than 1e-6 at every node; a smaller gap makes the frame
/// field ill-conditioned and raises NumericalError naming the offending x.
DiagonalizationLevels psi_recursion(const MatrixPotential& pot, const SpatialGrid& grid,
                                    double mass_ratio, int order);

/// sup over nodes and entries of |Psi^(j+1) - Psi^(j)|, 1 <= j <= order-1.
/// Decays like M^-j for a smooth well-gapped family.
double sup_frame_increment(const DiagonalizationLevels& levels, int j);

/// Same for the eigenvalue fields |Lambda^(j+1) - Lambda^(j)|; decays like M^-j.
double sup_value_increment(const DiagonalizationLevels& levels, int j);

/// Residual coupling left after stopping the recursion at level kappa >= 2:
///
///     r0(x) = (1/4M) Psi^(kappa)T (B^(kappa) - B^(kappa-1)) Psi^(kappa),
///
/// one d x d matrix per node.  Its sup-norm decays like M^-kappa.
std::vector<Eigen::MatrixXd> residual_r0(const DiagonalizationLevels& levels, int kappa);

/// Max absolute entry of residual_r0 over all nodes.
double sup_residual(const DiagonalizationLevels& levels, int kappa);

} // namespace wbomd
