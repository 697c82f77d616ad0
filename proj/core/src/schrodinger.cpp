#include "wbomd/schrodinger.hpp"

#include <cblas.h>
#include <cmath>
#include <lapacke.h>
#include <stdexcept>
#include <string>

namespace wbomd {

DiscreteHamiltonian assemble_hamiltonian(const MatrixPotential& pot,
                                         const SpatialGrid& grid, double mass_ratio)
{
    if (!(mass_ratio > 0.0))
        throw std::invalid_argument("assemble_hamiltonian: mass ratio must be > 0");

    const int d = pot.dim();
    const int nn = grid.n_nodes();
    const long size = static_cast<long>(d) * nn;
    const double dx2 = grid.dx() * grid.dx();
    const double hop = -1.0 / (2.0 * mass_ratio * dx2);
    const double onsite = 1.0 / (mass_ratio * dx2);

    DiscreteHamiltonian h;
    h.grid = grid;
    h.dim = d;
    h.mass_ratio = mass_ratio;
    h.matrix = Eigen::MatrixXd::Zero(size, size);

    for (int k = 0; k < nn; ++k) {
        const Eigen::MatrixXd v = pot.value(grid.node(k));
        if (!v.allFinite())
            throw std::invalid_argument("assemble_hamiltonian: non-finite potential at x = " +
                                        std::to_string(grid.node(k)));
        // Symmetrized once so the assembled matrix is exactly symmetric.
        const Eigen::MatrixXd vs = 0.5 * (v + v.transpose());
        h.matrix.block(d * k, d * k, d, d) = vs;
        for (int c = 0; c < d; ++c)
            h.matrix(d * k + c, d * k + c) += onsite;
        if (k + 1 < nn) {
            for (int c = 0; c < d; ++c) {
                h.matrix(d * k + c, d * (k + 1) + c) = hop;
                h.matrix(d * (k + 1) + c, d * k + c) = hop;
            }
        }
    }
    return h;
}

SpectralDecomposition solve_eigenproblem(const DiscreteHamiltonian& h)
{
    const long n = h.matrix.rows();
    if (n == 0 || h.matrix.cols() != n)
        throw std::invalid_argument("solve_eigenproblem: empty or non-square matrix");

    SpectralDecomposition spec;
    spec.grid = h.grid;
    spec.dim = h.dim;
    spec.mass_ratio = h.mass_ratio;
    spec.modes = h.matrix; // overwritten with eigenvectors in place
    spec.energies.resize(n);

    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                       spec.modes.data(), static_cast<lapack_int>(n), spec.energies.data());
    if (info != 0)
        throw NumericalError("solve_eigenproblem: dsyevd failed (size " + std::to_string(n) +
                             ", info " + std::to_string(info) +
                             ", max |entry| " + std::to_string(h.matrix.cwiseAbs().maxCoeff()) + ")");
    return spec;
}

Eigen::VectorXd equilibrium_density(const SpectralDecomposition& spec, double temperature)
{
    if (!(temperature > 0.0))
        throw std::invalid_argument("equilibrium_density: temperature must be > 0");
    const int d = spec.dim;
    const int nn = spec.grid.n_nodes();
    const long n = spec.energies.size();
    const double e1 = spec.energies[0];

    Eigen::VectorXd rho = Eigen::VectorXd::Zero(nn);
    for (long m = 0; m < n; ++m) {
        const double w = std::exp(-(spec.energies[m] - e1) / temperature);
        if (w == 0.0)
            continue;
        for (int k = 0; k < nn; ++k) {
            double node = 0.0;
            for (int c = 0; c < d; ++c) {
                const double phi = spec.modes(d * k + c, m);
                node += phi * phi;
            }
            rho[k] += w * node;
        }
    }
    const double mass = rho.sum() * spec.grid.dx();
    if (!(mass > 0.0))
        throw NumericalError("equilibrium_density: zero total mass (all weights underflowed)");
    return rho / mass;
}

double quantum_correlation(const SpectralDecomposition& spec, double temperature, double tau)
{
    if (!(temperature > 0.0))
        throw std::invalid_argument("quantum_correlation: temperature must be > 0");
    const int d = spec.dim;
    const int nn = spec.grid.n_nodes();
    const long n = spec.energies.size();

    // Position operator is diagonal on the grid: scale row d*k+c by x_k, then
    // rotate to the eigenbasis, A = P^T (X P).
    Eigen::VectorXd xrow(n);
    for (int k = 0; k < nn; ++k) {
        const double x = spec.grid.node(k);
        for (int c = 0; c < d; ++c)
            xrow[d * k + c] = x;
    }
    Eigen::MatrixXd scaled = xrow.asDiagonal() * spec.modes;
    Eigen::MatrixXd a(n, n);
    cblas_dgemm(CblasColMajor, CblasTrans, CblasNoTrans, static_cast<int>(n),
                static_cast<int>(n), static_cast<int>(n), 1.0, spec.modes.data(),
                static_cast<int>(n), scaled.data(), static_cast<int>(n), 0.0, a.data(),
                static_cast<int>(n));

    const double e1 = spec.energies[0];
    Eigen::VectorXd boltz(n);
    for (long m = 0; m < n; ++m)
        boltz[m] = std::exp(-(spec.energies[m] - e1) / temperature);
    const double z = boltz.sum();

    const double theta = tau * std::sqrt(spec.mass_ratio);
    double re = 0.0, im = 0.0, magnitude = 0.0;
    for (long j = 0; j < n; ++j) {
        for (long i = 0; i < n; ++i) {
            const double w = boltz[i] + boltz[j];
            if (w == 0.0)
                continue;
            const double aij = a(i, j);
            const double term = aij * aij * w;
            const double angle = theta * (spec.energies[i] - spec.energies[j]);
            re += term * std::cos(angle);
            im += term * std::sin(angle);
            magnitude += term;
        }
    }
    re /= 2.0 * z;
    im /= 2.0 * z;
    magnitude /= 2.0 * z;

    if (std::abs(im) > 1e-8 * std::max(magnitude, 1e-300))
        throw NumericalError("quantum_correlation: imaginary residual " + std::to_string(im) +
                             " exceeds 1e-8 relative to scale " + std::to_string(magnitude));
    return re;
}

} // namespace wbomd
