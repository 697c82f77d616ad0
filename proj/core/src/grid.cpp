#include "wbomd/grid.hpp"

#include <stdexcept>
#include <string>

namespace wbomd {

SpatialGrid::SpatialGrid(double x_min_, double x_max_, int n_intervals_)
    : x_min(x_min_), x_max(x_max_), n_intervals(n_intervals_)
{
    if (!(x_min < x_max))
        throw std::invalid_argument("SpatialGrid: x_min (" + std::to_string(x_min) +
                                    ") must be below x_max (" + std::to_string(x_max) + ")");
    if (n_intervals < 2)
        throw std::invalid_argument("SpatialGrid: need at least 2 intervals, got " +
                                    std::to_string(n_intervals));
}

Eigen::VectorXd SpatialGrid::nodes() const
{
    Eigen::VectorXd xs(n_nodes());
    for (int k = 0; k < n_nodes(); ++k)
        xs[k] = node(k);
    return xs;
}

double trapezoid_integral(const SpatialGrid& grid, const Eigen::VectorXd& values)
{
    if (values.size() != grid.n_nodes())
        throw std::invalid_argument("trapezoid_integral: value count " +
                                    std::to_string(values.size()) + " does not match node count " +
                                    std::to_string(grid.n_nodes()));
    double acc = 0.0;
    for (int k = 0; k < grid.n_nodes(); ++k)
        acc += grid.trapezoid_weight(k) * values[k];
    return acc;
}

double grid_l1_distance(const SpatialGrid& grid, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b)
{
    if (a.size() != b.size() || a.size() != grid.n_nodes())
        throw std::invalid_argument("grid_l1_distance: size mismatch");
    double acc = 0.0;
    for (int k = 0; k < a.size(); ++k)
        acc += std::abs(a[k] - b[k]) * grid.dx();
    return acc;
}

double grid_linf_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("grid_linf_distance: size mismatch");
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace wbomd
