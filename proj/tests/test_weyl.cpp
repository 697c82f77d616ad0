#include <catch2/catch_amalgamated.hpp>

#include <wbomd/grid.hpp>
#include <wbomd/weyl.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

using namespace wbomd;

namespace {

constexpr double kPi = std::numbers::pi;

SymbolField gauss(const PhaseSpaceGrid& g, double cx, double cp)
{
    return make_scalar_symbol(g, [cx, cp](double x, double p) {
        return std::complex<double>(
            std::exp(-(x - cx) * (x - cx) - (p - cp) * (p - cp)), 0.0);
    });
}

/// x grid refined past the admissibility bound plus a p grid fine enough for
/// the maximal-separation kernel phase, with a 25% alias margin.
PhaseSpaceGrid working_grid(double halfwidth, double mass_ratio, int refine)
{
    SpatialGrid x = admissible_x_grid(-halfwidth, halfwidth, mass_ratio,
                                      halfwidth, 16);
    x = SpatialGrid(-halfwidth, halfwidth, x.n_intervals * refine);
    const double lx = 2.0 * halfwidth;
    const int np_min = static_cast<int>(
        std::ceil(halfwidth * std::sqrt(mass_ratio) * lx * 2.0 / kPi - 1e-12));
    return PhaseSpaceGrid(
        x, SpatialGrid(-halfwidth, halfwidth, np_min + np_min / 4));
}

std::string thrown_message(const std::function<void()>& f)
{
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("admissible x grid satisfies the phase bound", "[weyl]")
{
    const SpatialGrid g = admissible_x_grid(-6.0, 6.0, 25.0, 6.0, 16);
    CHECK(std::sqrt(25.0) * g.dx() * 6.0 <= kPi * (1.0 + 1e-12));
    CHECK(g.n_intervals >= 16);
    // When the bound is loose the minimum interval count wins.
    CHECK(admissible_x_grid(-1.0, 1.0, 0.01, 1.0, 7).n_intervals == 7);
}

TEST_CASE("quantization rejects unresolvable grids", "[weyl]")
{
    const double m = 25.0;
    // Coarse x: the kernel phase aliases across neighbouring nodes.
    const PhaseSpaceGrid coarse_x(SpatialGrid(-6.0, 6.0, 10),
                                  SpatialGrid(-6.0, 6.0, 300));
    const std::string msg_x = thrown_message(
        [&] { weyl_quantize(gauss(coarse_x, 0.0, 0.0), m); });
    CHECK(msg_x.find("intervals, have 10") != std::string::npos);

    // Coarse p: the momentum quadrature aliases the far-corner phase.
    const SpatialGrid fine_x = admissible_x_grid(-6.0, 6.0, m, 6.0, 16);
    const PhaseSpaceGrid coarse_p(fine_x, SpatialGrid(-6.0, 6.0, 40));
    const std::string msg_p = thrown_message(
        [&] { weyl_quantize(gauss(coarse_p, 0.0, 0.0), m); });
    CHECK(msg_p.find("momentum intervals, have 40") != std::string::npos);

    CHECK_THROWS_AS(weyl_quantize(gauss(working_grid(6.0, m, 1), 0.0, 0.0), 0.0),
                    std::invalid_argument);
}

TEST_CASE("hermitian symbols quantize to hermitian kernels", "[weyl]")
{
    const double m = 25.0;
    const PhaseSpaceGrid g = working_grid(6.0, m, 1);
    const OperatorKernel k = weyl_quantize(gauss(g, 0.3, -0.2), m);
    CHECK((k.matrix - k.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quantization is linear", "[weyl]")
{
    const double m = 25.0;
    const PhaseSpaceGrid g = working_grid(6.0, m, 1);
    const SymbolField a = gauss(g, 0.0, 0.0);
    const SymbolField b = gauss(g, 0.5, -0.3);
    SymbolField sum = a;
    for (int kk = 0; kk < g.x.n_nodes(); ++kk)
        for (int l = 0; l < g.p.n_nodes(); ++l)
            sum.planes[0](kk, l) = 2.0 * a.planes[0](kk, l) - b.planes[0](kk, l);
    const Eigen::MatrixXcd lhs = weyl_quantize(sum, m).matrix;
    const Eigen::MatrixXcd rhs =
        2.0 * weyl_quantize(a, m).matrix - weyl_quantize(b, m).matrix;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("momentum-independent symbols reproduce the discrete delta kernel",
          "[weyl]")
{
    // For A(x, p) = f(x) the p quadrature factors out of the oscillatory sum,
    // so every kernel entry is exactly pref * f(midpoint) * S(k - m) with S
    // the trapezoid sum of the phase factors.  This pins the midpoint
    // interpolation rule (node value when k + m is even, neighbour average
    // when odd) and the overall normalization.
    const double m = 25.0;
    const PhaseSpaceGrid g = working_grid(6.0, m, 1);
    auto f = [](double x) { return std::exp(-x * x / 8.0) + 0.5; };
    const SymbolField a = make_scalar_symbol(
        g, [&](double x, double) { return std::complex<double>(f(x), 0.0); });
    const OperatorKernel k = weyl_quantize(a, m);

    const double sm = std::sqrt(m);
    const int nx = g.x.n_nodes();
    const double scale = k.matrix.cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (int kk = 0; kk < nx; ++kk)
        for (int mm = 0; mm < nx; ++mm) {
            std::complex<double> s(0.0, 0.0);
            for (int l = 0; l < g.p.n_nodes(); ++l)
                s += g.p.trapezoid_weight(l) *
                     std::polar(1.0, sm * (g.x.node(kk) - g.x.node(mm)) *
                                         g.p.node(l));
            const double mid = 0.5 * (g.x.node(kk) + g.x.node(mm));
            const double fv =
                (kk + mm) % 2 == 0
                    ? f(mid)
                    : 0.5 * (f(mid - 0.5 * g.x.dx()) + f(mid + 0.5 * g.x.dx()));
            const std::complex<double> expect = sm / (2.0 * kPi) * fv * s;
            worst = std::max(worst, std::abs(k.matrix(kk, mm) - expect));
        }
    CHECK(worst / scale < 1e-10);
}

TEST_CASE("gaussian trace identity", "[weyl]")
{
    // tr Op(A) = (sqrt(M)/2pi) * integral of A; for the unit Gaussian the
    // integral is pi.  On a thermally covering grid the discrete trace agrees
    // with the analytic value to rounding.
    const double m = 25.0;
    const PhaseSpaceGrid g = working_grid(6.0, m, 2);
    const std::complex<double> tr = trace_of(weyl_quantize(gauss(g, 0.0, 0.0), m));
    const double exact = std::sqrt(m) / (2.0 * kPi) * kPi;
    CHECK(std::abs(tr.imag()) < 1e-12 * exact);
    CHECK(std::abs(tr.real() - exact) / exact < 1e-10);
}

TEST_CASE("composition trace matches the analytic gaussian overlap", "[weyl]")
{
    // tr(Op(A) Op(B)) -> (sqrt(M)/2pi) * integral of A*B; for unit Gaussians
    // at offsets (0.5, -0.3) the overlap integral is (pi/2) e^{-0.17}.  The
    // discrete composition converges at rate 1/(refine^2 * M); at M = 25 and
    // refine 3 the error measures ~1.1e-4.
    const double m = 25.0;
    const PhaseSpaceGrid g = working_grid(6.0, m, 3);
    const OperatorKernel ka = weyl_quantize(gauss(g, 0.0, 0.0), m);
    const OperatorKernel kb = weyl_quantize(gauss(g, 0.5, -0.3), m);
    const std::complex<double> tr = trace_of(compose(ka, kb));
    const double exact =
        std::sqrt(m) / (2.0 * kPi) * (kPi / 2.0) * std::exp(-0.17);
    CHECK(std::abs(tr - exact) / exact < 1e-3);
}

TEST_CASE("trace is stable under momentum refinement", "[weyl]")
{
    const double m = 16.0;
    const PhaseSpaceGrid g = working_grid(6.0, m, 1);
    const PhaseSpaceGrid g2(
        g.x, SpatialGrid(g.p.x_min, g.p.x_max, 2 * g.p.n_intervals));
    const std::complex<double> t1 = trace_of(weyl_quantize(gauss(g, 0.0, 0.0), m));
    const std::complex<double> t2 = trace_of(weyl_quantize(gauss(g2, 0.0, 0.0), m));
    CHECK(std::abs(t1 - t2) < 1e-10 * std::abs(t1));
}

TEST_CASE("kernel composition has a cyclic trace", "[weyl]")
{
    const double m = 16.0;
    const PhaseSpaceGrid g = working_grid(6.0, m, 1);
    const OperatorKernel ka = weyl_quantize(gauss(g, 0.0, 0.0), m);
    const OperatorKernel kb = weyl_quantize(gauss(g, 0.5, -0.3), m);
    const std::complex<double> ab = trace_of(compose(ka, kb));
    const std::complex<double> ba = trace_of(compose(kb, ka));
    CHECK(std::abs(ab - ba) < 1e-10 * std::abs(ab));
}

TEST_CASE("kernel to symbol inverts quantization", "[weyl]")
{
    const double m = 25.0;
    const PhaseSpaceGrid g = working_grid(6.0, m, 2);
    const SymbolField a = gauss(g, 0.0, 0.0);
    const SymbolField back = kernel_to_symbol(weyl_quantize(a, m), g);
    double sup = 0.0;
    for (int kk = 0; kk < g.x.n_nodes(); ++kk)
        for (int l = 0; l < g.p.n_nodes(); ++l)
            sup = std::max(sup,
                           std::abs(back.planes[0](kk, l) - a.planes[0](kk, l)));
    CHECK(sup < 1e-10);
    CHECK_THROWS_AS(
        kernel_to_symbol(weyl_quantize(a, m),
                         PhaseSpaceGrid(SpatialGrid(-6.0, 6.0, 10), g.p)),
        std::invalid_argument);
}

TEST_CASE("order-zero symbol composition is the pointwise product", "[weyl]")
{
    const double m = 9.0;
    const PhaseSpaceGrid g(SpatialGrid(-6.0, 6.0, 48), SpatialGrid(-6.0, 6.0, 48));
    const SymbolField a = gauss(g, 0.0, 0.0);
    const SymbolField b = gauss(g, 0.5, -0.3);
    const SymbolField s0 = moyal_compose(a, b, m, 0);
    double sup = 0.0;
    for (int kk = 0; kk < g.x.n_nodes(); ++kk)
        for (int l = 0; l < g.p.n_nodes(); ++l)
            sup = std::max(sup, std::abs(s0.planes[0](kk, l) -
                                         a.planes[0](kk, l) *
                                             b.planes[0](kk, l)));
    CHECK(sup < 1e-14);
}

TEST_CASE("first-order symbol composition adds the scaled bracket", "[weyl]")
{
    // S1 - S0 = (i / 2 sqrt(M)) (d_x A d_p B - d_p A d_x B); for Gaussians
    // A = e^{-x^2-p^2}, B = e^{-(x-cx)^2-(p-cp)^2} the bracket is
    // 4 A B (p cx - x cp).
    const double m = 49.0;
    const double cx = 0.5, cp = -0.3;
    const PhaseSpaceGrid g(SpatialGrid(-6.0, 6.0, 64), SpatialGrid(-6.0, 6.0, 64));
    const SymbolField a = gauss(g, 0.0, 0.0);
    const SymbolField b = gauss(g, cx, cp);
    const SymbolField s0 = moyal_compose(a, b, m, 0);
    const SymbolField s1 = moyal_compose(a, b, m, 1);

    double sup = 0.0;
    for (int kk = 0; kk < g.x.n_nodes(); ++kk)
        for (int l = 0; l < g.p.n_nodes(); ++l) {
            const double x = g.x.node(kk), p = g.p.node(l);
            const std::complex<double> analytic =
                std::complex<double>(0.0, 1.0 / (2.0 * std::sqrt(m))) * 4.0 *
                a.planes[0](kk, l) * b.planes[0](kk, l) * (p * cx - x * cp);
            sup = std::max(sup, std::abs(s1.planes[0](kk, l) -
                                         s0.planes[0](kk, l) - analytic));
        }
    CHECK(sup < 1e-10);

    // The first-order correction is antisymmetric under swapping the factors.
    const SymbolField t0 = moyal_compose(b, a, m, 0);
    const SymbolField t1 = moyal_compose(b, a, m, 1);
    double anti = 0.0;
    for (int kk = 0; kk < g.x.n_nodes(); ++kk)
        for (int l = 0; l < g.p.n_nodes(); ++l)
            anti = std::max(anti,
                            std::abs((s1.planes[0](kk, l) - s0.planes[0](kk, l)) +
                                     (t1.planes[0](kk, l) - t0.planes[0](kk, l))));
    CHECK(anti < 1e-12);
}

TEST_CASE("higher symbol-composition orders shrink the true remainder", "[weyl]")
{
    // Measured at M = 16, refine 2: relative remainders 0.106 / 0.038 / 0.007
    // for orders 0 / 1 / 2.  A sign error in the odd terms would make the
    // order-1 remainder larger than order 0 instead of halving it.
    const double m = 16.0;
    const PhaseSpaceGrid g = working_grid(6.0, m, 2);
    const SymbolField a = gauss(g, 0.0, 0.0);
    const SymbolField b = gauss(g, 0.5, -0.3);
    const SymbolField truth =
        kernel_to_symbol(compose(weyl_quantize(a, m), weyl_quantize(b, m)), g);
    const double scale = symbol_l2_norm(truth);
    const double r0 = symbol_l2_distance(truth, moyal_compose(a, b, m, 0)) / scale;
    const double r1 = symbol_l2_distance(truth, moyal_compose(a, b, m, 1)) / scale;
    const double r2 = symbol_l2_distance(truth, moyal_compose(a, b, m, 2)) / scale;
    CHECK(r0 < 0.2);
    CHECK(r1 < 0.5 * r0);
    CHECK(r2 < 0.5 * r1);
}

TEST_CASE("symbol composition rejects unusable inputs", "[weyl]")
{
    const double m = 9.0;
    const PhaseSpaceGrid g(SpatialGrid(-6.0, 6.0, 32), SpatialGrid(-6.0, 6.0, 32));
    const SymbolField a = gauss(g, 0.0, 0.0);
    CHECK_THROWS_AS(moyal_compose(a, a, m, 5), std::invalid_argument);
    CHECK_THROWS_AS(moyal_compose(a, a, m, -1), std::invalid_argument);
    CHECK_THROWS_AS(moyal_compose(a, a, 0.0, 1), std::invalid_argument);

    // A constant symbol cannot be Fourier-differentiated...
    const SymbolField flat = make_scalar_symbol(
        g, [](double, double) { return std::complex<double>(1.0, 0.0); });
    CHECK(flat.boundary_decay_ratio() == Catch::Approx(1.0));
    const std::string msg =
        thrown_message([&] { moyal_compose(flat, flat, m, 1); });
    CHECK(msg.find("decay ratio") != std::string::npos);
    // ... but its order-0 product is still fine.
    CHECK_NOTHROW(moyal_compose(flat, flat, m, 0));

    const PhaseSpaceGrid other(SpatialGrid(-6.0, 6.0, 16),
                               SpatialGrid(-6.0, 6.0, 32));
    CHECK_THROWS_AS(moyal_compose(a, gauss(other, 0.0, 0.0), m, 0),
                    std::invalid_argument);
}

TEST_CASE("symbol norms and decay diagnostic", "[weyl]")
{
    const PhaseSpaceGrid g(SpatialGrid(0.0, 2.0, 10), SpatialGrid(0.0, 3.0, 10));
    const SymbolField flat = make_scalar_symbol(
        g, [](double, double) { return std::complex<double>(2.0, 0.0); });
    // ||2||_L2 over a 2 x 3 box = 2 sqrt(6).
    CHECK(symbol_l2_norm(flat) == Catch::Approx(2.0 * std::sqrt(6.0)).epsilon(1e-12));
    CHECK(symbol_l2_distance(flat, flat) == 0.0);

    const PhaseSpaceGrid wide(SpatialGrid(-6.0, 6.0, 48), SpatialGrid(-6.0, 6.0, 48));
    CHECK(gauss(wide, 0.0, 0.0).boundary_decay_ratio() < 1e-8);
}
