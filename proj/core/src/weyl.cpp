#include "wbomd/weyl.hpp"

#include "wbomd/parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace wbomd {

namespace {

constexpr double kPi = std::numbers::pi;

bool same_axis(const SpatialGrid& a, const SpatialGrid& b)
{
    return a.x_min == b.x_min && a.x_max == b.x_max && a.n_intervals == b.n_intervals;
}

bool same_phase_grid(const PhaseSpaceGrid& a, const PhaseSpaceGrid& b)
{
    return same_axis(a.x, b.x) && same_axis(a.p, b.p);
}

void check_symbol(const SymbolField& s, const char* who)
{
    if (s.dim < 1 || s.planes.size() != static_cast<std::size_t>(s.dim) * s.dim)
        throw std::invalid_argument(std::string(who) + ": malformed symbol field");
}

double p_cutoff(const SpatialGrid& gp)
{
    return std::max(std::abs(gp.node(0)), std::abs(gp.node(gp.n_intervals)));
}

long binomial(int n, int k)
{
    long b = 1;
    for (int i = 0; i < k; ++i)
        b = b * (n - i) / (i + 1);
    return b;
}

// Spectral derivative of one plane along axis 0 (x, row index) or 1 (p, column
// index): FFT each line, multiply by (i*kappa)^order with the Nyquist mode
// zeroed for odd orders, transform back.  Treats the n samples as one period
// of length n*step, which is accurate exactly when the field decays at the
// boundary -- the caller gates on boundary_decay_ratio().
Eigen::MatrixXcd spectral_derivative(const Eigen::MatrixXcd& plane, double step, int axis,
                                     int order)
{
    if (order == 0)
        return plane;
    const int n = axis == 0 ? static_cast<int>(plane.rows()) : static_cast<int>(plane.cols());
    const double period = n * step;

    std::vector<std::complex<double>> factor(n);
    for (int j = 0; j < n; ++j) {
        const int folded = j <= n / 2 ? j : j - n;
        if (n % 2 == 0 && j == n / 2 && order % 2 == 1) {
            factor[j] = 0.0;
            continue;
        }
        const std::complex<double> ik(0.0, 2.0 * kPi * folded / period);
        std::complex<double> f = 1.0;
        for (int q = 0; q < order; ++q)
            f *= ik;
        factor[j] = f / static_cast<double>(n);
    }

    std::vector<std::complex<double>> buf(n);
    fftw_complex* raw = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan fwd = fftw_plan_dft_1d(n, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_1d(n, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);

    Eigen::MatrixXcd out(plane.rows(), plane.cols());
    const int n_lines = axis == 0 ? static_cast<int>(plane.cols()) : static_cast<int>(plane.rows());
    for (int line = 0; line < n_lines; ++line) {
        for (int j = 0; j < n; ++j)
            buf[j] = axis == 0 ? plane(j, line) : plane(line, j);
        fftw_execute(fwd);
        for (int j = 0; j < n; ++j)
            buf[j] *= factor[j];
        fftw_execute(bwd);
        for (int j = 0; j < n; ++j)
            (axis == 0 ? out(j, line) : out(line, j)) = buf[j];
    }
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    return out;
}

} // namespace

Eigen::MatrixXcd SymbolField::value(int k, int l) const
{
    Eigen::MatrixXcd v(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            v(i, j) = planes[i * dim + j](k, l);
    return v;
}

void SymbolField::set_value(int k, int l, const Eigen::MatrixXcd& a)
{
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            planes[i * dim + j](k, l) = a(i, j);
}

double SymbolField::boundary_decay_ratio() const
{
    const int nx = grid.x.n_nodes(), np = grid.p.n_nodes();
    double interior = 0.0, boundary = 0.0;
    for (const Eigen::MatrixXcd& pl : planes) {
        interior = std::max(interior, pl.cwiseAbs().maxCoeff());
        boundary = std::max({boundary, pl.row(0).cwiseAbs().maxCoeff(),
                             pl.row(nx - 1).cwiseAbs().maxCoeff(),
                             pl.col(0).cwiseAbs().maxCoeff(),
                             pl.col(np - 1).cwiseAbs().maxCoeff()});
    }
    return interior > 0.0 ? boundary / interior : 0.0;
}

SymbolField make_symbol(const PhaseSpaceGrid& grid, int dim,
                        const std::function<Eigen::MatrixXcd(double, double)>& a)
{
    if (dim < 1)
        throw std::invalid_argument("make_symbol: dim must be >= 1");
    if (!a)
        throw std::invalid_argument("make_symbol: callback required");
    const int nx = grid.x.n_nodes(), np = grid.p.n_nodes();
    SymbolField s;
    s.grid = grid;
    s.dim = dim;
    s.planes.assign(static_cast<std::size_t>(dim) * dim, Eigen::MatrixXcd::Zero(nx, np));
    for (int l = 0; l < np; ++l) {
        for (int k = 0; k < nx; ++k) {
            const Eigen::MatrixXcd v = a(grid.x.node(k), grid.p.node(l));
            if (v.rows() != dim || v.cols() != dim)
                throw std::invalid_argument("make_symbol: callback returned wrong size");
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    s.planes[i * dim + j](k, l) = v(i, j);
        }
    }
    return s;
}

SymbolField make_scalar_symbol(const PhaseSpaceGrid& grid,
                               const std::function<std::complex<double>(double, double)>& a)
{
    if (!a)
        throw std::invalid_argument("make_scalar_symbol: callback required");
    return make_symbol(grid, 1, [&a](double x, double p) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = a(x, p);
        return m;
    });
}

Eigen::MatrixXcd OperatorKernel::block(int k, int m) const
{
    return matrix.block(static_cast<long>(dim) * k, static_cast<long>(dim) * m, dim, dim);
}

OperatorKernel weyl_quantize(const SymbolField& a, double mass_ratio, int n_threads)
{
    check_symbol(a, "weyl_quantize");
    if (!(mass_ratio > 0.0))
        throw std::invalid_argument("weyl_quantize: mass ratio must be > 0");
    const SpatialGrid& gx = a.grid.x;
    const SpatialGrid& gp = a.grid.p;
    const int nx = gx.n_nodes(), np = gp.n_nodes(), d = a.dim;
    const double dx = gx.dx();
    const double sm = std::sqrt(mass_ratio);
    const double pmax = p_cutoff(gp);

    if (sm * dx * pmax > kPi * (1.0 + 1e-12)) {
        const int needed =
            static_cast<int>(std::ceil((gx.x_max - gx.x_min) * sm * pmax / kPi - 1e-12));
        std::ostringstream msg;
        msg << "weyl_quantize: x grid too coarse to resolve the oscillatory phase "
               "(sqrt(M)*dx*p_max = "
            << sm * dx * pmax << " > pi); need at least " << needed << " intervals, have "
            << gx.n_intervals;
        throw std::invalid_argument(msg.str());
    }

    // Dual condition: the p quadrature samples e^{i sqrt(M)(x_k - x_m) p}
    // whose frequency reaches sqrt(M) * L_x at the far corners of the kernel.
    // A p step above pi / (sqrt(M) L_x) aliases those entries into O(1)
    // garbage instead of their true (tiny) values.
    const double lx = gx.x_max - gx.x_min;
    if (sm * lx * gp.dx() > kPi * (1.0 + 1e-12)) {
        const int needed = static_cast<int>(std::ceil(2.0 * pmax * sm * lx / kPi - 1e-12));
        std::ostringstream msg;
        msg << "weyl_quantize: p grid too coarse for the kernel phase at maximal "
               "node separation (sqrt(M)*L_x*dp = "
            << sm * lx * gp.dx() << " > pi); need at least " << needed
            << " momentum intervals, have " << gp.n_intervals;
        throw std::invalid_argument(msg.str());
    }

    // Tables in (l, index) layout so the inner reductions run down contiguous
    // columns.  phase(l, diff + nx - 1) = e^{i sqrt(M) diff dx p_l};
    // wmid[c](l, s) = w_l * A_c(midpoint of nodes summing to s, p_l).
    Eigen::MatrixXcd phase(np, 2 * nx - 1);
    for (int diff = -(nx - 1); diff <= nx - 1; ++diff)
        for (int l = 0; l < np; ++l)
            phase(l, diff + nx - 1) = std::polar(1.0, sm * diff * dx * gp.node(l));

    std::vector<Eigen::MatrixXcd> wmid(static_cast<std::size_t>(d) * d,
                                       Eigen::MatrixXcd(np, 2 * nx - 1));
    Eigen::VectorXd pw(np);
    for (int l = 0; l < np; ++l)
        pw[l] = gp.trapezoid_weight(l);
    for (int c = 0; c < d * d; ++c) {
        const Eigen::MatrixXcd& pl = a.planes[c];
        for (int s = 0; s <= 2 * (nx - 1); ++s) {
            Eigen::VectorXcd row = s % 2 == 0
                                       ? pl.row(s / 2).transpose().eval()
                                       : (0.5 * (pl.row(s / 2) + pl.row(s / 2 + 1)))
                                             .transpose()
                                             .eval();
            wmid[c].col(s) = row.cwiseProduct(pw.cast<std::complex<double>>());
        }
    }

    OperatorKernel out;
    out.grid = gx;
    out.dim = d;
    out.mass_ratio = mass_ratio;
    out.matrix.resize(static_cast<long>(d) * nx, static_cast<long>(d) * nx);
    const double pref = sm / (2.0 * kPi);

    parallel_for(nx, n_threads, [&](long kl) {
        const int k = static_cast<int>(kl);
        for (int m = 0; m < nx; ++m) {
            const auto ph = phase.col(k - m + nx - 1);
            for (int c = 0; c < d * d; ++c) {
                const std::complex<double> acc =
                    (ph.array() * wmid[c].col(k + m).array()).sum();
                out.matrix(static_cast<long>(d) * k + c / d,
                           static_cast<long>(d) * m + c % d) = pref * acc;
            }
        }
    });
    return out;
}

std::complex<double> trace_of(const OperatorKernel& kernel)
{
    std::complex<double> acc = 0.0;
    const long n = kernel.matrix.rows();
    for (long i = 0; i < n; ++i)
        acc += kernel.matrix(i, i);
    return acc * kernel.grid.dx();
}

OperatorKernel compose(const OperatorKernel& a, const OperatorKernel& b)
{
    if (!same_axis(a.grid, b.grid) || a.dim != b.dim)
        throw std::invalid_argument("compose: kernels live on different grids");
    if (a.mass_ratio != b.mass_ratio)
        throw std::invalid_argument("compose: kernels built with different mass ratios");
    OperatorKernel out;
    out.grid = a.grid;
    out.dim = a.dim;
    out.mass_ratio = a.mass_ratio;
    out.matrix = a.matrix * b.matrix * a.grid.dx();
    return out;
}

SymbolField kernel_to_symbol(const OperatorKernel& kernel, const PhaseSpaceGrid& phase_grid)
{
    if (!same_axis(kernel.grid, phase_grid.x))
        throw std::invalid_argument(
            "kernel_to_symbol: phase grid x axis must match the kernel grid");
    const int nx = kernel.grid.n_nodes(), np = phase_grid.p.n_nodes(), d = kernel.dim;
    const double dx = kernel.grid.dx();
    const double sm = std::sqrt(kernel.mass_ratio);

    // phase2(l, j + nx - 1) = e^{-i sqrt(M) (2 j dx) p_l}
    Eigen::MatrixXcd phase2(np, 2 * nx - 1);
    for (int j = -(nx - 1); j <= nx - 1; ++j)
        for (int l = 0; l < np; ++l)
            phase2(l, j + nx - 1) = std::polar(1.0, -sm * 2.0 * j * dx * phase_grid.p.node(l));

    SymbolField out;
    out.grid = phase_grid;
    out.dim = d;
    out.planes.assign(static_cast<std::size_t>(d) * d, Eigen::MatrixXcd::Zero(nx, np));

    Eigen::VectorXcd acc(np);
    for (int k = 0; k < nx; ++k) {
        const int jmax = std::min(k, nx - 1 - k);
        for (int c = 0; c < d * d; ++c) {
            acc.setZero();
            for (int j = -jmax; j <= jmax; ++j) {
                const std::complex<double> kv =
                    kernel.matrix(static_cast<long>(d) * (k + j) + c / d,
                                  static_cast<long>(d) * (k - j) + c % d);
                acc += kv * phase2.col(j + nx - 1);
            }
            out.planes[c].row(k) = (2.0 * dx) * acc.transpose();
        }
    }
    return out;
}

SymbolField moyal_compose(const SymbolField& a, const SymbolField& b, double mass_ratio,
                          int order)
{
    check_symbol(a, "moyal_compose");
    check_symbol(b, "moyal_compose");
    if (a.dim != b.dim || !same_phase_grid(a.grid, b.grid))
        throw std::invalid_argument("moyal_compose: symbols live on different grids");
    if (!(mass_ratio > 0.0))
        throw std::invalid_argument("moyal_compose: mass ratio must be > 0");
    if (order < 0 || order > 4)
        throw std::invalid_argument("moyal_compose: order must be in [0, 4]; higher "
                                    "discrete derivatives amplify grid noise");
    if (order >= 1) {
        const double decay = std::max(a.boundary_decay_ratio(), b.boundary_decay_ratio());
        if (!(decay < 1e-8)) {
            std::ostringstream msg;
            msg << "moyal_compose: Fourier differentiation needs symbols that decay at "
                   "the grid boundary (decay ratio "
                << decay << " >= 1e-8)";
            throw std::invalid_argument(msg.str());
        }
    }

    const int d = a.dim;
    const int nx = a.grid.x.n_nodes(), np = a.grid.p.n_nodes();
    const double hx = a.grid.x.dx(), hp = a.grid.p.dx();

    // der(s)[c][ax][ap] = d_x^ax d_p^ap of component plane c.
    auto deriv_table = [&](const SymbolField& s) {
        std::vector<std::vector<std::vector<Eigen::MatrixXcd>>> t(d * d);
        for (int c = 0; c < d * d; ++c) {
            t[c].resize(order + 1);
            for (int ax = 0; ax <= order; ++ax) {
                const Eigen::MatrixXcd base = spectral_derivative(s.planes[c], hx, 0, ax);
                t[c][ax].resize(order + 1 - ax);
                for (int ap = 0; ap + ax <= order; ++ap)
                    t[c][ax][ap] = spectral_derivative(base, hp, 1, ap);
            }
        }
        return t;
    };
    const auto da = deriv_table(a);
    const auto db = deriv_table(b);

    SymbolField out;
    out.grid = a.grid;
    out.dim = d;
    out.planes.assign(static_cast<std::size_t>(d) * d, Eigen::MatrixXcd::Zero(nx, np));

    // n-th term of A e^{(i/(2 sqrt M))(<-d_x -> d_p  -  <-d_p -> d_x)} B, the
    // bidifferential series whose truncations converge to the symbol of the
    // operator product for the e^{+i sqrt(M)(x-y)p} kernel convention.  The
    // expansion of the n-th power pairs d_x^k d_p^{n-k} A with
    // d_x^{n-k} d_p^k B and weight C(n,k) (-1)^{n-k}; folding (-1)^n into the
    // coefficient leaves the (-1)^k alternation below.
    const std::complex<double> half_i(0.0, -1.0 / (2.0 * std::sqrt(mass_ratio)));
    std::complex<double> coef_n = 1.0; // (-i/(2 sqrt M))^n / n!
    for (int n = 0; n <= order; ++n) {
        if (n > 0)
            coef_n *= half_i / static_cast<double>(n);
        for (int k = 0; k <= n; ++k) {
            const std::complex<double> w =
                coef_n * static_cast<double>(binomial(n, k)) * (k % 2 == 0 ? 1.0 : -1.0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int r = 0; r < d; ++r)
                        out.planes[i * d + j].array() +=
                            w * (da[i * d + r][k][n - k].array() *
                                 db[r * d + j][n - k][k].array());
        }
    }
    return out;
}

double symbol_l2_norm(const SymbolField& a)
{
    check_symbol(a, "symbol_l2_norm");
    const int nx = a.grid.x.n_nodes(), np = a.grid.p.n_nodes();
    double acc = 0.0;
    for (int l = 0; l < np; ++l)
        for (int k = 0; k < nx; ++k) {
            double sq = 0.0;
            for (const Eigen::MatrixXcd& pl : a.planes)
                sq += std::norm(pl(k, l));
            acc += a.grid.weight(k, l) * sq;
        }
    return std::sqrt(acc);
}

double symbol_l2_distance(const SymbolField& a, const SymbolField& b)
{
    check_symbol(a, "symbol_l2_distance");
    check_symbol(b, "symbol_l2_distance");
    if (a.dim != b.dim || !same_phase_grid(a.grid, b.grid))
        throw std::invalid_argument("symbol_l2_distance: symbols live on different grids");
    const int nx = a.grid.x.n_nodes(), np = a.grid.p.n_nodes();
    double acc = 0.0;
    for (int l = 0; l < np; ++l)
        for (int k = 0; k < nx; ++k) {
            double sq = 0.0;
            for (std::size_t c = 0; c < a.planes.size(); ++c)
                sq += std::norm(a.planes[c](k, l) - b.planes[c](k, l));
            acc += a.grid.weight(k, l) * sq;
        }
    return std::sqrt(acc);
}

SpatialGrid admissible_x_grid(double x_min, double x_max, double mass_ratio, double p_max,
                              int min_intervals)
{
    if (!(x_max > x_min) || !(mass_ratio > 0.0) || !(p_max > 0.0))
        throw std::invalid_argument("admissible_x_grid: bad domain or parameters");
    const int needed =
        static_cast<int>(std::ceil((x_max - x_min) * std::sqrt(mass_ratio) * p_max / kPi - 1e-12));
    return SpatialGrid(x_min, x_max, std::max({min_intervals, needed, 2}));
}

} // namespace wbomd
