#include <catch2/catch_amalgamated.hpp>

#include <wbomd/bomd.hpp>
#include <wbomd/langevin.hpp>
#include <wbomd/model.hpp>

#include <cmath>
#include <stdexcept>

using namespace wbomd;

namespace {

MatrixPotential harmonic()
{
    return MatrixPotential::scalar([](double x) { return 0.5 * x * x; },
                                   [](double x) { return x; });
}

LangevinParams quick_params(double temperature, std::uint64_t seed)
{
    LangevinParams p;
    p.temperature = temperature;
    p.friction = 1.0;
    p.dt = 1e-3;
    p.burn_in = 20000;
    p.steps = 420000;
    p.seed = seed;
    p.batches = 20;
    return p;
}

} // namespace

TEST_CASE("harmonic equipartition within error bars", "[langevin]")
{
    const MatrixPotential pot = harmonic();
    const double temperature = 1.3;
    LangevinParams params = quick_params(temperature, 11);
    params.steps = 1020000;

    const ErgodicEstimate x2 = langevin_average(
        pot, 1, [](PhasePoint z) { return z.x * z.x; }, params);
    const ErgodicEstimate p2 = langevin_average(
        pot, 1, [](PhasePoint z) { return z.p * z.p; }, params, {}, 1);

    REQUIRE(x2.samples == params.steps - params.burn_in);
    CHECK(x2.std_error > 0.0);
    CHECK(x2.effective_samples > 100.0);
    CHECK(std::abs(x2.mean - temperature) < 3.0 * x2.std_error);
    CHECK(std::abs(p2.mean - temperature) < 3.0 * p2.std_error);
    // Error bars should be in a sane window for ~1M correlated samples (the
    // x^2 autocorrelation time at friction 1 is a few time units).
    CHECK(x2.std_error < 0.15);

    // Gaussian fourth moment <x^4> = 3 T^2.
    const ErgodicEstimate x4 = langevin_average(
        pot, 1, [](PhasePoint z) { return z.x * z.x * z.x * z.x; }, params, {}, 2);
    CHECK(std::abs(x4.mean - 3.0 * temperature * temperature) <
          4.0 * x4.std_error);
}

TEST_CASE("langevin runs are deterministic in seed and stream", "[langevin]")
{
    const MatrixPotential pot = harmonic();
    LangevinParams params = quick_params(1.0, 5);
    params.steps = 60000;
    params.burn_in = 10000;
    auto run = [&](std::uint64_t seed, std::uint64_t stream) {
        LangevinParams p = params;
        p.seed = seed;
        return langevin_average(
                   pot, 1, [](PhasePoint z) { return z.x * z.x; }, p, {}, stream)
            .mean;
    };
    CHECK(run(5, 0) == run(5, 0));
    CHECK(run(5, 0) != run(6, 0));
    CHECK(run(5, 0) != run(5, 1));
}

TEST_CASE("parameter validation rejects unusable settings", "[langevin]")
{
    const MatrixPotential pot = harmonic();
    auto obs = [](PhasePoint z) { return z.x; };

    LangevinParams bad_batches = quick_params(1.0, 0);
    bad_batches.batches = 19;
    CHECK_THROWS_AS(langevin_average(pot, 1, obs, bad_batches),
                    std::invalid_argument);

    LangevinParams no_samples = quick_params(1.0, 0);
    no_samples.steps = no_samples.burn_in;
    CHECK_THROWS_AS(langevin_average(pot, 1, obs, no_samples),
                    std::invalid_argument);

    LangevinParams bad_dt = quick_params(1.0, 0);
    bad_dt.dt = 0.0;
    CHECK_THROWS_AS(langevin_average(pot, 1, obs, bad_dt),
                    std::invalid_argument);

    LangevinParams bad_t = quick_params(-1.0, 0);
    CHECK_THROWS_AS(langevin_average(pot, 1, obs, bad_t),
                    std::invalid_argument);
}

TEST_CASE("ground-path weight estimate matches quadrature", "[langevin]")
{
    const MatrixPotential pot = build_avoided_crossing(0.1, 1.0, 10.0);
    const double temperature = 1.9947;
    const GibbsWeights exact =
        gibbs_weights(pot, temperature, SpatialGrid(-6.0, 6.0, 4000));

    LangevinParams params = quick_params(temperature, 123);
    params.steps = 1020000;
    const WeightEstimate est =
        estimate_weights_groundstate(pot, temperature, params);

    REQUIRE(est.q.size() == 2);
    CHECK(est.q.sum() == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(est.std_error[0] > 0.0);
    CHECK(est.std_error[0] < 0.02);
    CHECK(std::abs(est.q[0] - exact.q[0]) < 3.0 * est.std_error[0]);
}

TEST_CASE("merged potential is the log-sum-exp of the surfaces", "[langevin]")
{
    const MatrixPotential pot = build_avoided_crossing(0.1, 1.0, 10.0);
    const double temperature = 1.9947;
    const MatrixPotential merged = merged_potential(pot, temperature);
    REQUIRE(merged.dim() == 1);
    REQUIRE(merged.has_analytic_force());

    for (double x : {-2.0, -0.3, 0.0, 0.8, 2.5}) {
        const double l1 = pot.surface(x, 1);
        const double l2 = pot.surface(x, 2);
        const double expected =
            -temperature *
            std::log(std::exp(-l1 / temperature) + std::exp(-l2 / temperature));
        CHECK(merged.surface(x, 1) == Catch::Approx(expected).margin(1e-12));

        // Force = Boltzmann-weighted surface forces; cross-check against a
        // central difference of the merged value itself.
        const double h = 1e-6;
        const double fd =
            -(merged.surface(x + h, 1) - merged.surface(x - h, 1)) / (2.0 * h);
        CHECK(merged.surface_force(x, 1) == Catch::Approx(fd).margin(1e-5));
    }
}

TEST_CASE("merged-path average matches the weighted quadrature", "[langevin]")
{
    const MatrixPotential pot = build_avoided_crossing(0.1, 1.0, 10.0);
    const double temperature = 1.9947;

    // Reference: sum_j q_j <x^2>_j by 1-D quadrature.
    const SpatialGrid grid(-6.0, 6.0, 8000);
    const GibbsWeights w = gibbs_weights(pot, temperature, grid);
    double reference = 0.0;
    for (int j = 1; j <= 2; ++j) {
        double num = 0.0, den = 0.0;
        for (int k = 0; k < grid.n_nodes(); ++k) {
            const double x = grid.node(k);
            const double bolt = std::exp(-pot.surface(x, j) / temperature);
            num += x * x * bolt * grid.trapezoid_weight(k);
            den += bolt * grid.trapezoid_weight(k);
        }
        reference += w.q[j - 1] * num / den;
    }

    LangevinParams params = quick_params(temperature, 777);
    params.steps = 1020000;
    const ErgodicEstimate est = merged_path_average(
        pot, temperature, [](PhasePoint z) { return z.x * z.x; }, params);
    CHECK(est.std_error > 0.0);
    CHECK(est.std_error < 0.15);
    CHECK(std::abs(est.mean - reference) < 3.0 * est.std_error);
}
