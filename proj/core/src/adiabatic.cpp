#include "wbomd/adiabatic.hpp"

#include <cstddef>
#include <sstream>
#include <stdexcept>

namespace wbomd {

namespace {

// x-derivative of a node-indexed matrix field: centered differences in the
// interior, one-sided two-point stencils at the boundary nodes.
std::vector<Eigen::MatrixXd> field_derivative(const std::vector<Eigen::MatrixXd>& f, double dx)
{
    const std::size_t n = f.size();
    std::vector<Eigen::MatrixXd> d(n);
    d[0] = (f[1] - f[0]) / dx;
    for (std::size_t k = 1; k + 1 < n; ++k)
        d[k] = (f[k + 1] - f[k - 1]) / (2.0 * dx);
    d[n - 1] = (f[n - 1] - f[n - 2]) / dx;
    return d;
}

// B = G^T G with G = (dPsi/dx) Psi^T: symmetric positive semi-definite
// curvature of the frame field, invariant under per-column sign changes that
// are constant in x.
std::vector<Eigen::MatrixXd> frame_curvature(const std::vector<Eigen::MatrixXd>& psi, double dx)
{
    const std::vector<Eigen::MatrixXd> dpsi = field_derivative(psi, dx);
    std::vector<Eigen::MatrixXd> b(psi.size());
    for (std::size_t k = 0; k < psi.size(); ++k) {
        const Eigen::MatrixXd g = dpsi[k] * psi[k].transpose();
        b[k] = g.transpose() * g;
    }
    return b;
}

void check_gap(const Eigen::VectorXd& lam, double x)
{
    for (int j = 0; j + 1 < lam.size(); ++j) {
        const double gap = lam[j + 1] - lam[j];
        if (!(gap > 1e-6)) {
            std::ostringstream msg;
            msg << "psi_recursion: surfaces " << (j + 1) << " and " << (j + 2)
                << " nearly degenerate at x = " << x << " (gap " << gap << ")";
            throw NumericalError(msg.str());
        }
    }
}

void decompose(const Eigen::MatrixXd& w, double x, Eigen::VectorXd& lam, Eigen::MatrixXd& psi)
{
    if (w.rows() == 2) {
        const Eigenpair2 e = eig2(w);
        lam = e.values;
        psi = e.vectors;
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
        if (es.info() != Eigen::Success)
            throw NumericalError("psi_recursion: dense eigensolve failed");
        lam = es.eigenvalues();
        psi = es.eigenvectors();
        apply_sign_convention(psi);
    }
    check_gap(lam, x);
}

void check_level_pair(const DiagonalizationLevels& levels, int lo, int hi, const char* who)
{
    if (lo < 1 || hi > levels.order)
        throw std::invalid_argument(std::string(who) + ": level out of range for order "
                                    + std::to_string(levels.order));
}

} // namespace

DiagonalizationLevels psi_recursion(const MatrixPotential& pot, const SpatialGrid& grid,
                                    double mass_ratio, int order)
{
    if (order < 1 || order > 4)
        throw std::invalid_argument("psi_recursion: order must be in [1, 4]");
    if (!(mass_ratio > 0.0))
        throw std::invalid_argument("psi_recursion: mass ratio must be > 0");

    DiagonalizationLevels out;
    out.grid = grid;
    out.dim = pot.dim();
    out.mass_ratio = mass_ratio;
    out.order = order;
    const std::size_t n = grid.n_nodes();
    out.frames.assign(order, std::vector<Eigen::MatrixXd>(n));
    out.values.assign(order, std::vector<Eigen::VectorXd>(n));

    for (std::size_t k = 0; k < n; ++k) {
        pot.eigen(grid.node(k), out.values[0][k], out.frames[0][k]);
        check_gap(out.values[0][k], grid.node(k));
    }

    if (order == 1)
        return out;

    std::vector<Eigen::MatrixXd> v(n);
    for (std::size_t k = 0; k < n; ++k)
        v[k] = pot.value(grid.node(k));

    for (int level = 2; level <= order; ++level) {
        const std::vector<Eigen::MatrixXd> b =
            frame_curvature(out.frames[level - 2], grid.dx());
        for (std::size_t k = 0; k < n; ++k) {
            const Eigen::MatrixXd w = v[k] + b[k] / (4.0 * mass_ratio);
            decompose(w, grid.node(k), out.values[level - 1][k], out.frames[level - 1][k]);
        }
    }
    return out;
}

double sup_frame_increment(const DiagonalizationLevels& levels, int j)
{
    check_level_pair(levels, j, j + 1, "sup_frame_increment");
    double sup = 0.0;
    for (std::size_t k = 0; k < levels.frames[j].size(); ++k)
        sup = std::max(sup,
                       (levels.frames[j][k] - levels.frames[j - 1][k]).cwiseAbs().maxCoeff());
    return sup;
}

double sup_value_increment(const DiagonalizationLevels& levels, int j)
{
    check_level_pair(levels, j, j + 1, "sup_value_increment");
    double sup = 0.0;
    for (std::size_t k = 0; k < levels.values[j].size(); ++k)
        sup = std::max(sup,
                       (levels.values[j][k] - levels.values[j - 1][k]).cwiseAbs().maxCoeff());
    return sup;
}

std::vector<Eigen::MatrixXd> residual_r0(const DiagonalizationLevels& levels, int kappa)
{
    if (kappa < 2)
        throw std::invalid_argument("residual_r0: kappa must be >= 2");
    check_level_pair(levels, kappa - 1, kappa, "residual_r0");

    const double dx = levels.grid.dx();
    const std::vector<Eigen::MatrixXd> b_hi = frame_curvature(levels.frames[kappa - 1], dx);
    const std::vector<Eigen::MatrixXd> b_lo = frame_curvature(levels.frames[kappa - 2], dx);

    std::vector<Eigen::MatrixXd> r(b_hi.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
        const Eigen::MatrixXd& psi = levels.frames[kappa - 1][k];
        r[k] = psi.transpose() * (b_hi[k] - b_lo[k]) * psi / (4.0 * levels.mass_ratio);
    }
    return r;
}

double sup_residual(const DiagonalizationLevels& levels, int kappa)
{
    double sup = 0.0;
    for (const Eigen::MatrixXd& m : residual_r0(levels, kappa))
        sup = std::max(sup, m.cwiseAbs().maxCoeff());
    return sup;
}

} // namespace wbomd
