#pragma once

#include <Eigen/Core>

namespace wbomd {

/// Uniform 1-D grid with n_intervals subintervals and n_intervals + 1 nodes,
/// node k at x_min + k * dx.  Used both for spatial discretizations and as one
/// axis of a phase-space quadrature.
struct SpatialGrid {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_intervals = 2;

    SpatialGrid() = default;
    SpatialGrid(double x_min, double x_max, int n_intervals);

    double dx() const { return (x_max - x_min) / n_intervals; }
    int n_nodes() const { return n_intervals + 1; }
    double node(int k) const { return x_min + k * dx(); }

    /// Trapezoid quadrature weight of node k (dx, halved at the two ends).
    double trapezoid_weight(int k) const
    {
        return (k == 0 || k == n_intervals) ? 0.5 * dx() : dx();
    }

    Eigen::VectorXd nodes() const;
};

/// Tensor grid in (x, p) with product trapezoid weights.
struct PhaseSpaceGrid {
    SpatialGrid x;
    SpatialGrid p;

    PhaseSpaceGrid() = default;
    PhaseSpaceGrid(SpatialGrid x_grid, SpatialGrid p_grid)
        : x(std::move(x_grid)), p(std::move(p_grid))
    {
    }

    long n_points() const
    {
        return static_cast<long>(x.n_nodes()) * p.n_nodes();
    }
    double weight(int k, int l) const
    {
        return x.trapezoid_weight(k) * p.trapezoid_weight(l);
    }
};

/// Trapezoid integral of nodal values f_k over the grid.
double trapezoid_integral(const SpatialGrid& grid, const Eigen::VectorXd& values);

/// l1 distance of two nodal vectors, sum |a_k - b_k| * dx.
double grid_l1_distance(const SpatialGrid& grid, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b);

/// Max-norm distance of two nodal vectors.
double grid_linf_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

} // namespace wbomd
