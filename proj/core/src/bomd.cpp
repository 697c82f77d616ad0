#include "wbomd/bomd.hpp"

#include "wbomd/parallel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace wbomd {

VerletParams steps_for(double tau, double dt_cap, long min_steps)
{
    if (!(dt_cap > 0.0))
        throw std::invalid_argument("steps_for: dt cap must be > 0");
    if (min_steps < 1)
        throw std::invalid_argument("steps_for: min_steps must be >= 1");
    VerletParams vp;
    if (tau == 0.0) {
        vp.dt = dt_cap;
        vp.n_steps = 0;
        return vp;
    }
    const double atau = std::abs(tau);
    const long by_cap = static_cast<long>(std::ceil(atau / dt_cap - 1e-12));
    vp.n_steps = std::max(min_steps, by_cap);
    vp.dt = atau / vp.n_steps;
    return vp;
}

TrajectoryResult verlet_trajectory(const MatrixPotential& pot, int surface, PhasePoint z0,
                                   double tau, const VerletParams& params,
                                   double escape_bound)
{
    if (!(params.dt > 0.0))
        throw std::invalid_argument("verlet_trajectory: dt must be > 0");
    if (params.n_steps < 0)
        throw std::invalid_argument("verlet_trajectory: negative step count");
    const double atau = std::abs(tau);
    if (std::abs(params.n_steps * params.dt - atau) > 1e-12)
        throw std::invalid_argument(
            "verlet_trajectory: n_steps * dt = " + std::to_string(params.n_steps * params.dt) +
            " does not reproduce |tau| = " + std::to_string(atau) + " to 1e-12");

    const double h = std::copysign(params.dt, tau);
    double x = z0.x, p = z0.p;
    TrajectoryResult out;
    for (long s = 0; s < params.n_steps; ++s) {
        const double x_prev = x, p_prev = p;
        x += 0.5 * h * p;
        p += h * pot.surface_force(x, surface);
        x += 0.5 * h * p;
        if (!(std::abs(x) <= escape_bound) || !std::isfinite(p)) {
            x = x_prev;
            p = p_prev;
            out.escaped = true;
            break;
        }
    }
    out.z = {x, p};
    return out;
}

namespace {

// Surface values lambda_j(x_k) tabulated over a grid, plus the global minimum
// used as a common exponent shift.
struct SurfaceTable {
    Eigen::MatrixXd lambda; // (n_nodes, d)
    double min = 0.0;

    SurfaceTable(const MatrixPotential& pot, const SpatialGrid& grid)
        : lambda(grid.n_nodes(), pot.dim())
    {
        for (int k = 0; k < grid.n_nodes(); ++k)
            lambda.row(k) = pot.eigenvalues(grid.node(k)).transpose();
        min = lambda.minCoeff();
    }
};

} // namespace

GibbsWeights gibbs_weights(const MatrixPotential& pot, double temperature,
                           const SpatialGrid& grid)
{
    if (!(temperature > 0.0))
        throw std::invalid_argument("gibbs_weights: temperature must be > 0");
    const SurfaceTable table(pot, grid);
    const int d = pot.dim();

    GibbsWeights w;
    w.q.resize(d);
    w.log_partition.resize(d);
    Eigen::VectorXd shifted(d);
    for (int j = 0; j < d; ++j) {
        double z = 0.0;
        for (int k = 0; k < grid.n_nodes(); ++k)
            z += grid.trapezoid_weight(k) *
                 std::exp(-(table.lambda(k, j) - table.min) / temperature);
        shifted[j] = z;
    }
    const double total = shifted.sum();
    if (!(total > 0.0))
        throw NumericalError("gibbs_weights: all partition integrals underflowed; "
                             "shift exponents by the minimum surface value");
    for (int j = 0; j < d; ++j) {
        w.q[j] = shifted[j] / total;
        w.log_partition[j] = std::log(shifted[j]) - table.min / temperature;
    }
    return w;
}

Eigen::VectorXd md_equilibrium_density(const MatrixPotential& pot, double temperature,
                                       const SpatialGrid& grid)
{
    if (!(temperature > 0.0))
        throw std::invalid_argument("md_equilibrium_density: temperature must be > 0");
    const SurfaceTable table(pot, grid);
    const int d = pot.dim();

    // Shifted per-surface partition sums on this grid; the shift cancels in
    // the e^{-lambda/T} / Z_j ratios below.
    Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < grid.n_nodes(); ++k)
            z[j] += grid.trapezoid_weight(k) *
                    std::exp(-(table.lambda(k, j) - table.min) / temperature);
    const double total = z.sum();
    if (!(total > 0.0))
        throw NumericalError("md_equilibrium_density: all partition integrals underflowed");

    // q_j / Z_j = 1 / sum_k Z_k in the shifted convention.
    Eigen::VectorXd rho(grid.n_nodes());
    for (int k = 0; k < grid.n_nodes(); ++k) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j)
            acc += std::exp(-(table.lambda(k, j) - table.min) / temperature);
        rho[k] = acc / total;
    }
    return rho;
}

MdCorrelationResult md_correlation(const MatrixPotential& pot, double temperature,
                                   double tau, const PhaseSpaceGrid& grid,
                                   const GibbsWeights& weights,
                                   const MdCorrelationOptions& options)
{
    if (!(temperature > 0.0))
        throw std::invalid_argument("md_correlation: temperature must be > 0");
    const int d = pot.dim();
    if (weights.q.size() != d)
        throw std::invalid_argument("md_correlation: weight vector has " +
                                    std::to_string(weights.q.size()) +
                                    " entries for a " + std::to_string(d) +
                                    "-surface potential");

    const SurfaceTable table(pot, grid.x);
    const int nx = grid.x.n_nodes();
    const int np = grid.p.n_nodes();
    const VerletParams vp = steps_for(tau, options.dt_cap);

    double p_min_half = std::numeric_limits<double>::infinity();
    for (int l = 0; l < np; ++l) {
        const double p = grid.p.node(l);
        p_min_half = std::min(p_min_half, 0.5 * p * p);
    }
    Eigen::VectorXd shift(d);
    for (int j = 0; j < d; ++j)
        shift[j] = table.lambda.col(j).minCoeff() + p_min_half;

    // One slot per x-row and surface; each row is filled by exactly one thread
    // and the cross-row reduction is fixed-order pairwise, so the result does
    // not depend on the thread count.
    std::vector<std::vector<double>> row_obs(d, std::vector<double>(nx, 0.0));
    std::vector<std::vector<double>> row_z(d, std::vector<double>(nx, 0.0));
    std::vector<long> row_escaped(nx, 0), row_total(nx, 0);

    parallel_for(nx, options.threads, [&](long k) {
        const double x0 = grid.x.node(static_cast<int>(k));
        long escaped = 0, total = 0;
        for (int j = 0; j < d; ++j) {
            double acc_obs = 0.0, acc_z = 0.0;
            for (int l = 0; l < np; ++l) {
                const double p0 = grid.p.node(l);
                const double weight = grid.weight(static_cast<int>(k), l);
                const double energy = 0.5 * p0 * p0 + table.lambda(k, j);
                const double boltz = std::exp(-(energy - shift[j]) / temperature);
                if (boltz == 0.0)
                    continue;
                const TrajectoryResult tr =
                    verlet_trajectory(pot, j + 1, {x0, p0}, tau, vp, options.escape_bound);
                ++total;
                if (tr.escaped)
                    ++escaped;
                acc_obs += weight * x0 * tr.z.x * boltz;
                acc_z += weight * boltz;
            }
            row_obs[j][k] = acc_obs;
            row_z[j][k] = acc_z;
        }
        row_escaped[k] = escaped;
        row_total[k] = total;
    });

    MdCorrelationResult out;
    double value = 0.0;
    for (int j = 0; j < d; ++j) {
        const double obs = pairwise_sum(row_obs[j]);
        const double z = pairwise_sum(row_z[j]);
        if (!(z > 0.0))
            throw NumericalError("md_correlation: partition sum underflowed on surface " +
                                 std::to_string(j + 1));
        value += weights.q[j] * obs / z;
    }
    out.value = value;

    long escaped = 0, total = 0;
    for (int k = 0; k < nx; ++k) {
        escaped += row_escaped[k];
        total += row_total[k];
    }
    out.escaped_fraction = total == 0 ? 0.0 : static_cast<double>(escaped) / total;
    out.reliable = out.escaped_fraction <= 0.01;

    // Boundary-coverage diagnostic: Boltzmann weight of the most favourable
    // boundary point relative to the in-domain maximum.
    Eigen::VectorXd row_min = table.lambda.rowwise().minCoeff();
    const double interior_min = row_min.minCoeff() + p_min_half;
    const double p_edge_half =
        0.5 * std::min(grid.p.node(0) * grid.p.node(0),
                       grid.p.node(np - 1) * grid.p.node(np - 1));
    double boundary_min = std::min(row_min[0], row_min[nx - 1]) + p_min_half;
    boundary_min = std::min(boundary_min, row_min.minCoeff() + p_edge_half);
    out.boundary_weight_ratio = std::exp(-(boundary_min - interior_min) / temperature);
    return out;
}

} // namespace wbomd
