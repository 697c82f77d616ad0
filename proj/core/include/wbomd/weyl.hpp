#pragma once

#include "wbomd/grid.hpp"

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace wbomd {

/// Matrix-valued phase-space function A(x_k, p_l) sampled on a tensor grid.
/// Component (i, j) is stored as one dense complex plane indexed (k, l), which
/// keeps Fourier differentiation and quadrature cache-friendly.
struct SymbolField {
    PhaseSpaceGrid grid;
    int dim = 0;
    /// planes[i * dim + j](k, l) = A_ij(x_k, p_l).
    std::vector<Eigen::MatrixXcd> planes;

    Eigen::MatrixXcd value(int k, int l) const;
    void set_value(int k, int l, const Eigen::MatrixXcd& a);

    /// Max |A| over the grid-boundary points divided by max |A| overall.
    /// Small (< 1e-8) when the symbol is effectively supported inside the
    /// truncated domain; order 1 for symbols that do not decay, which makes
    /// Fourier differentiation and domain truncation unreliable.
    double boundary_decay_ratio() const;
};

/// Samples a callback A(x, p) -> d x d matrix on the grid.
SymbolField make_symbol(const PhaseSpaceGrid& grid, int dim,
                        const std::function<Eigen::MatrixXcd(double, double)>& a);

/// Scalar (d = 1) convenience overload.
SymbolField make_scalar_symbol(const PhaseSpaceGrid& grid,
                               const std::function<std::complex<double>(double, double)>& a);

/// Integral kernel K(x_k, x_m) of an operator on d-component wavefunctions,
/// stored as one dense matrix of d x d blocks in node-major order (row d*k+i,
/// column d*m+j).  Trace and composition supply the dx quadrature factor.
struct OperatorKernel {
    SpatialGrid grid;
    int dim = 0;
    double mass_ratio = 0.0;
    Eigen::MatrixXcd matrix;

    Eigen::MatrixXcd block(int k, int m) const;
};

/// Oscillatory-integral quantization of a symbol:
///
///   K(x_k, x_m) = (sqrt(M)/2pi) * sum_l w_l e^{i sqrt(M) (x_k - x_m) p_l}
///                 * A((x_k + x_m)/2, p_l)
///
/// with trapezoid p-weights w_l; when the midpoint falls between nodes the
/// symbol is linearly interpolated (average of the two neighbours).  Requires
/// the x grid to resolve the fastest phase: sqrt(M) * dx * p_max <= pi.  A
/// coarser grid is rejected with the number of intervals that would be needed.
/// A Hermitian symbol field yields a Hermitian kernel matrix by construction.
OperatorKernel weyl_quantize(const SymbolField& a, double mass_ratio, int n_threads = 0);

/// sum_k trace K(x_k, x_k) * dx.
std::complex<double> trace_of(const OperatorKernel& kernel);

/// Discrete integral-operator product: (A o B)(x_k, x_m) =
/// sum_j A(x_k, x_j) B(x_j, x_m) * dx.  This is the ground truth against which
/// truncated symbol products are measured.
OperatorKernel compose(const OperatorKernel& a, const OperatorKernel& b);

/// Inverse of the quantization map: recovers the symbol on the kernel's x grid
/// at the p nodes of `phase_grid` (whose x axis must equal the kernel grid):
///
///   A(x_k, p_l) = sum_j e^{-i sqrt(M) (2 j dx) p_l} K(x_{k+j}, x_{k-j}) * 2 dx
///
/// with j truncated to the symmetric range that stays on the grid.
SymbolField kernel_to_symbol(const OperatorKernel& kernel, const PhaseSpaceGrid& phase_grid);

/// Truncated composition expansion of two symbols on a common grid:
///
///   sum_{n=0}^{m} (1/n!) (-i/(2 sqrt(M)))^n
///       sum_{k=0}^{n} C(n,k) (-1)^k (d_x^k d_p^{n-k} A)(d_x^{n-k} d_p^k B)
///
/// with all derivatives by discrete Fourier differentiation, so both symbols
/// must decay at the grid boundary (ratio < 1e-8).  Orders above 4 are
/// rejected: higher discrete derivatives amplify grid noise beyond usefulness.
/// Order 0 is the pointwise matrix product.
SymbolField moyal_compose(const SymbolField& a, const SymbolField& b, double mass_ratio,
                          int order);

/// Phase-space L2 (Frobenius) norm, trapezoid-weighted.
double symbol_l2_norm(const SymbolField& a);
double symbol_l2_distance(const SymbolField& a, const SymbolField& b);

/// Coarsest x grid on [x_min, x_max] satisfying the quantization admissibility
/// bound for the given mass ratio and p cutoff, with at least min_intervals.
SpatialGrid admissible_x_grid(double x_min, double x_max, double mass_ratio, double p_max,
                              int min_intervals);

} // namespace wbomd
