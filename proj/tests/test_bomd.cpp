#include <catch2/catch_amalgamated.hpp>

#include <wbomd/bomd.hpp>
#include <wbomd/model.hpp>

#include <cmath>
#include <numbers>
#include <vector>

using namespace wbomd;

namespace {

MatrixPotential harmonic()
{
    return MatrixPotential::scalar([](double x) { return 0.5 * x * x; },
                                   [](double x) { return x; });
}

} // namespace

TEST_CASE("steps_for splits a lag into compliant pairs", "[bomd]")
{
    const VerletParams zero = steps_for(0.0);
    CHECK(zero.n_steps == 0);

    const VerletParams fine = steps_for(0.2);
    CHECK(fine.n_steps >= 200);
    CHECK(fine.dt <= 1e-3 + 1e-15);
    CHECK(fine.n_steps * fine.dt == Catch::Approx(0.2).margin(1e-12));

    // Short lags are resolved by min_steps, not the dt cap.
    const VerletParams shortlag = steps_for(0.01);
    CHECK(shortlag.n_steps >= 200);
    CHECK(shortlag.n_steps * shortlag.dt == Catch::Approx(0.01).margin(1e-14));

    // Long lags are resolved by the dt cap.
    const VerletParams longlag = steps_for(5.0, 1e-3, 200);
    CHECK(longlag.dt <= 1e-3 + 1e-15);
    CHECK(longlag.n_steps >= 5000);
    CHECK(longlag.n_steps * longlag.dt == Catch::Approx(5.0).margin(1e-11));

    // Sign of tau does not change the stepping.
    const VerletParams neg = steps_for(-0.2);
    CHECK(neg.n_steps == fine.n_steps);
    CHECK(neg.dt == fine.dt);
}

TEST_CASE("verlet on the harmonic oscillator is second order", "[bomd]")
{
    const MatrixPotential pot = harmonic();
    const PhasePoint z0{1.0, 0.0};
    const double tau = 0.5 * std::numbers::pi;
    // Exact flow: x(tau) = cos(tau) = 0, p(tau) = -sin(tau) = -1.
    auto error_at = [&](double dt) {
        const long n = std::lround(tau / dt);
        const TrajectoryResult r =
            verlet_trajectory(pot, 1, z0, tau, {tau / n, n});
        REQUIRE_FALSE(r.escaped);
        return std::hypot(r.z.x - 0.0, r.z.p + 1.0);
    };
    const double coarse = error_at(1e-3);
    const double fine = error_at(5e-4);
    const double ratio = coarse / fine;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
    CHECK(coarse < 1e-5);
}

TEST_CASE("verlet is time-reversible to rounding", "[bomd]")
{
    const MatrixPotential pot = build_avoided_crossing(0.1, 1.0, 10.0);
    for (int surface : {1, 2}) {
        const PhasePoint z0{0.7, -0.4};
        const VerletParams params = steps_for(0.3);
        const TrajectoryResult fwd =
            verlet_trajectory(pot, surface, z0, 0.3, params);
        REQUIRE_FALSE(fwd.escaped);
        const TrajectoryResult back =
            verlet_trajectory(pot, surface, fwd.z, -0.3, params);
        REQUIRE_FALSE(back.escaped);
        CHECK(std::abs(back.z.x - z0.x) < 1e-10);
        CHECK(std::abs(back.z.p - z0.p) < 1e-10);
    }
}

TEST_CASE("verlet preserves phase-space volume", "[bomd]")
{
    const MatrixPotential pot = build_avoided_crossing(0.1, 1.0, 10.0);
    const PhasePoint z0{0.5, 0.2};
    const VerletParams params = steps_for(0.2);
    const double h = 1e-6;
    auto flow = [&](double x, double p) {
        return verlet_trajectory(pot, 1, {x, p}, 0.2, params).z;
    };
    const PhasePoint xp = flow(z0.x + h, z0.p);
    const PhasePoint xm = flow(z0.x - h, z0.p);
    const PhasePoint pp = flow(z0.x, z0.p + h);
    const PhasePoint pm = flow(z0.x, z0.p - h);
    const double dxdx = (xp.x - xm.x) / (2 * h);
    const double dpdx = (xp.p - xm.p) / (2 * h);
    const double dxdp = (pp.x - pm.x) / (2 * h);
    const double dpdp = (pp.p - pm.p) / (2 * h);
    const double det = dxdx * dpdp - dpdx * dxdp;
    CHECK(std::abs(det - 1.0) < 1e-6);
}

TEST_CASE("energy error shrinks fourfold when dt halves", "[bomd]")
{
    const MatrixPotential pot = build_avoided_crossing(0.1, 1.0, 10.0);
    const PhasePoint z0{1.2, 0.3};
    auto energy = [&](const PhasePoint& z) {
        return 0.5 * z.p * z.p + pot.surface(z.x, 1);
    };
    const double e0 = energy(z0);
    auto drift = [&](double dt) {
        const double tau = 2.0;
        const long n = std::lround(tau / dt);
        double worst = 0.0;
        PhasePoint z = z0;
        const VerletParams one{tau / n, 1};
        for (long i = 0; i < n; ++i) {
            z = verlet_trajectory(pot, 1, z, tau / n, one).z;
            worst = std::max(worst, std::abs(energy(z) - e0));
        }
        return worst;
    };
    const double ratio = drift(1e-3) / drift(5e-4);
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
}

TEST_CASE("escaped trajectories freeze and flag", "[bomd]")
{
    // Inverted parabola: force +x pushes the particle out exponentially.
    const MatrixPotential pot =
        MatrixPotential::scalar([](double x) { return -0.5 * x * x; },
                                [](double x) { return -x; });
    const TrajectoryResult r =
        verlet_trajectory(pot, 1, {1.0, 1.0}, 30.0, steps_for(30.0), 1e3);
    CHECK(r.escaped);
    CHECK(std::abs(r.z.x) <= 1e3 + 1.0);
}

TEST_CASE("gibbs weights on the benchmark well", "[bomd]")
{
    const MatrixPotential pot = build_avoided_crossing(0.1, 1.0, 10.0);
    const SpatialGrid grid(-6.0, 6.0, 4000);
    const GibbsWeights w = gibbs_weights(pot, 1.9947, grid);
    REQUIRE(w.q.size() == 2);
    CHECK(w.q.sum() == Catch::Approx(1.0).epsilon(1e-13));
    CHECK(w.q[0] > 0.79);
    CHECK(w.q[0] < 0.81);
    // Partition logs are finite and ordered: the lower surface dominates.
    CHECK(std::isfinite(w.log_partition[0]));
    CHECK(w.log_partition[0] > w.log_partition[1]);
}

TEST_CASE("identical surfaces share the weight equally", "[bomd]")
{
    const MatrixPotential pot = MatrixPotential::from_callback(2, [](double x) {
        return (0.5 * x * x) * Eigen::MatrixXd::Identity(2, 2);
    });
    const GibbsWeights w = gibbs_weights(pot, 1.0, SpatialGrid(-8.0, 8.0, 800));
    CHECK(w.q[0] == Catch::Approx(0.5).epsilon(1e-10));
    CHECK(w.q[1] == Catch::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("classical density is normalized and mixture-shaped", "[bomd]")
{
    const MatrixPotential pot = build_avoided_crossing(0.1, 1.0, 10.0);
    const SpatialGrid grid(-6.0, 6.0, 751 - 1);
    const Eigen::VectorXd rho = md_equilibrium_density(pot, 1.9946, grid);
    REQUIRE(rho.size() == grid.n_nodes());
    double mass = 0.0;
    for (int k = 0; k < rho.size(); ++k) {
        REQUIRE(rho[k] >= 0.0);
        mass += rho[k] * grid.trapezoid_weight(k);
    }
    CHECK(mass == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero-lag md correlation equals the quadrature second moment", "[bomd]")
{
    const MatrixPotential pot = build_avoided_crossing(0.1, 1.0, 10.0);
    const double temperature = 1.9947;
    const SpatialGrid xg(-4.5, 4.5, 200);
    const SpatialGrid pg(-4.5, 4.5, 200);
    const GibbsWeights w = gibbs_weights(pot, temperature, xg);
    const MdCorrelationResult r =
        md_correlation(pot, temperature, 0.0, PhaseSpaceGrid(xg, pg), w);

    // Direct x^2 quadrature over the same spatial grid, same weighting.  Any
    // constant Boltzmann shift cancels in the ratio, so none is applied here.
    double total = 0.0;
    for (int j = 0; j < 2; ++j) {
        double num = 0.0, den = 0.0;
        for (int k = 0; k <= 200; ++k) {
            const double x = xg.node(k);
            const double bolt = std::exp(-pot.surface(x, j + 1) / temperature);
            num += x * x * bolt * xg.trapezoid_weight(k);
            den += bolt * xg.trapezoid_weight(k);
        }
        total += w.q[j] * num / den;
    }
    CHECK(r.value == Catch::Approx(total).epsilon(1e-12));
    CHECK(r.escaped_fraction == 0.0);
    CHECK(r.reliable);
    // The +-4.5 box clips the momentum Gaussian at exp(-4.5^2/(2T)) ~ 6e-3.
    CHECK(r.boundary_weight_ratio < 0.05);
}

TEST_CASE("harmonic md correlation follows the classical cosine law", "[bomd]")
{
    // For 0.5 x^2 at temperature T: <x(tau) x(0)> = T cos tau.
    const MatrixPotential pot = harmonic();
    const double temperature = 1.3;
    const SpatialGrid xg(-8.0, 8.0, 200);
    const SpatialGrid pg(-8.0, 8.0, 200);
    const GibbsWeights w = gibbs_weights(pot, temperature, xg);
    for (double tau : {0.0, 0.4, 1.1}) {
        const MdCorrelationResult r =
            md_correlation(pot, temperature, tau, PhaseSpaceGrid(xg, pg), w);
        REQUIRE(r.reliable);
        CHECK(r.value ==
              Catch::Approx(temperature * std::cos(tau)).margin(2e-3));
        // A +-8 box at T = 1.3 covers the thermal support completely.
        CHECK(r.boundary_weight_ratio < 1e-8);
    }
}

TEST_CASE("md correlation is thread-count invariant bit for bit", "[bomd]")
{
    const MatrixPotential pot = build_avoided_crossing(0.1, 1.0, 10.0);
    const double temperature = 1.9947;
    const SpatialGrid xg(-4.5, 4.5, 60);
    const SpatialGrid pg(-4.5, 4.5, 60);
    const GibbsWeights w = gibbs_weights(pot, temperature, xg);
    std::vector<double> values;
    for (int threads : {1, 4, 8}) {
        MdCorrelationOptions opt;
        opt.threads = threads;
        values.push_back(md_correlation(pot, temperature, 0.1,
                                        PhaseSpaceGrid(xg, pg), w, opt)
                             .value);
    }
    CHECK(values[1] == values[0]);
    CHECK(values[2] == values[0]);
}
