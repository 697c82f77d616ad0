// Command-line driver: runs the equilibrium-density, correlation, surface-
// weight, sampling, and operator-calculus experiments from a JSON config and
// emits CSV/JSON results.  Exit codes: 0 success, 2 config error, 3 when a
// numerical-reliability flag (trajectory escapes) was raised, 1 for any other
// numerical failure.

#include "wbomd/adiabatic.hpp"
#include "wbomd/bomd.hpp"
#include "wbomd/config.hpp"
#include "wbomd/csvio.hpp"
#include "wbomd/fit.hpp"
#include "wbomd/langevin.hpp"
#include "wbomd/model.hpp"
#include "wbomd/schrodinger.hpp"
#include "wbomd/weyl.hpp"

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace {

using namespace wbomd;
namespace fs = std::filesystem;
using nlohmann::json;

fs::path out_path(const ExperimentConfig& cfg, const char* name)
{
    fs::create_directories(cfg.out_dir);
    return fs::path(cfg.out_dir) / name;
}

void write_json_file(const ExperimentConfig& cfg, const char* name, json j)
{
    j["provenance"] = provenance_line(cfg);
    std::ofstream out(out_path(cfg, name), std::ios::binary | std::ios::trunc);
    out << j.dump(2) << "\n";
    if (!out)
        throw std::runtime_error(std::string("cannot write ") + name);
}

std::vector<double> to_std(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

/// Adds slopes["key"] and r_squared["key"] from a log-log fit of series
/// against the ladder; skipped for degenerate (single-point) ladders.
void add_slope(json& j, const std::string& key, const std::vector<double>& ladder,
               const std::vector<double>& series)
{
    if (ladder.size() < 2)
        return;
    const SlopeFit f = fit_loglog(ladder, series);
    j["slopes"][key] = f.slope;
    j["r_squared"][key] = f.r_squared;
}

MatrixPotential config_potential(const ExperimentConfig& cfg)
{
    return build_avoided_crossing(cfg.delta, cfg.a, cfg.b);
}

int run_density(const ExperimentConfig& cfg)
{
    const MatrixPotential pot = config_potential(cfg);
    const SpatialGrid grid = cfg.density_grid.build();
    const double temperature = cfg.density_temperature;
    const double mass_ratio = cfg.density_mass_ratio;

    const SpectralDecomposition spec =
        solve_eigenproblem(assemble_hamiltonian(pot, grid, mass_ratio));
    const Eigen::VectorXd rho_q = equilibrium_density(spec, temperature);
    const Eigen::VectorXd rho_md = md_equilibrium_density(pot, temperature, grid);

    {
        CsvWriter csv(out_path(cfg, "density_quantum.csv"), provenance_line(cfg));
        csv.header({"mass_ratio", "x", "rho"});
        for (int k = 0; k < grid.n_nodes(); ++k)
            csv.row({mass_ratio, grid.node(k), rho_q[k]});
    }
    {
        CsvWriter csv(out_path(cfg, "density_md.csv"), provenance_line(cfg));
        csv.header({"mass_ratio", "x", "rho"});
        for (int k = 0; k < grid.n_nodes(); ++k)
            csv.row({mass_ratio, grid.node(k), rho_md[k]});
    }

    json j;
    j["mass_ratio"] = mass_ratio;
    j["temperature"] = temperature;
    j["l1"] = grid_l1_distance(grid, rho_q, rho_md);
    j["linf"] = grid_linf_distance(rho_q, rho_md);
    write_json_file(cfg, "density_error.json", j);
    return 0;
}

int run_correlate(const ExperimentConfig& cfg)
{
    check_tau_divisibility(cfg);
    const MatrixPotential pot = config_potential(cfg);
    const SpatialGrid grid = cfg.correlation_grid.build();
    const double temperature = cfg.correlation_temperature;
    const double mass_ratio = cfg.correlation_mass_ratio;

    const SpectralDecomposition spec =
        solve_eigenproblem(assemble_hamiltonian(pot, grid, mass_ratio));
    const PhaseSpaceGrid phase = cfg.phase_grid.build();
    const GibbsWeights weights = gibbs_weights(pot, temperature, phase.x);
    const MdCorrelationOptions options{cfg.verlet_dt, 1e8, cfg.threads};

    bool reliable = true;
    CsvWriter csv(out_path(cfg, "correlation.csv"), provenance_line(cfg));
    csv.header({"tau", "mass_ratio", "quantum", "md", "abs_error"});
    for (double tau : cfg.taus) {
        const double q = quantum_correlation(spec, temperature, tau);
        const MdCorrelationResult md =
            md_correlation(pot, temperature, tau, phase, weights, options);
        reliable = reliable && md.reliable;
        csv.row({tau, mass_ratio, q, md.value, std::abs(q - md.value)});
    }
    return reliable ? 0 : 3;
}

int run_weights(const ExperimentConfig& cfg)
{
    const MatrixPotential pot = config_potential(cfg);
    const double temperature = cfg.correlation_temperature;

    const GibbsWeights quad = gibbs_weights(pot, temperature, cfg.correlation_grid.build());
    LangevinParams lp = cfg.langevin;
    lp.temperature = temperature;
    lp.seed = cfg.seed;
    const WeightEstimate sampled = estimate_weights_groundstate(pot, temperature, lp);

    json j;
    j["temperature"] = temperature;
    j["quadrature"]["q"] = to_std(quad.q);
    j["langevin"]["q"] = to_std(sampled.q);
    j["langevin"]["std_error"] = to_std(sampled.std_error);
    std::vector<double> sigmas(quad.q.size());
    for (int i = 0; i < quad.q.size(); ++i)
        sigmas[i] = sampled.std_error[i] > 0.0
                        ? std::abs(quad.q[i] - sampled.q[i]) / sampled.std_error[i]
                        : 0.0;
    j["agreement_sigmas"] = sigmas;
    write_json_file(cfg, "weights.json", j);
    return 0;
}

int run_sample_langevin(const ExperimentConfig& cfg)
{
    const MatrixPotential pot = config_potential(cfg);
    const double temperature = cfg.correlation_temperature;
    LangevinParams lp = cfg.langevin;
    lp.temperature = temperature;
    lp.seed = cfg.seed;

    const std::vector<std::pair<std::string, std::function<double(PhasePoint)>>> obs = {
        {"x", [](PhasePoint z) { return z.x; }},
        {"x_squared", [](PhasePoint z) { return z.x * z.x; }},
        {"p", [](PhasePoint z) { return z.p; }},
        {"p_squared", [](PhasePoint z) { return z.p * z.p; }},
    };

    CsvWriter csv(out_path(cfg, "langevin.csv"), provenance_line(cfg));
    csv.header({"observable", "mean", "std_error", "effective_samples", "samples"});
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const ErgodicEstimate e = langevin_average(pot, 1, obs[i].second, lp, {}, i);
        csv.labeled_row(obs[i].first,
                        std::array{e.mean, e.std_error, e.effective_samples,
                                   static_cast<double>(e.samples)});
    }
    const ErgodicEstimate merged = merged_path_average(
        pot, temperature, [](PhasePoint z) { return z.x * z.x; }, lp, {}, obs.size());
    csv.labeled_row("merged_x_squared",
                    std::array{merged.mean, merged.std_error, merged.effective_samples,
                               static_cast<double>(merged.samples)});
    return 0;
}

int run_diag_check(const ExperimentConfig& cfg)
{
    const MatrixPotential pot = build_avoided_crossing(cfg.diag_delta, cfg.a, cfg.b);
    const SpatialGrid grid = cfg.diag_grid.build();

    CsvWriter csv(out_path(cfg, "diag_orders.csv"), provenance_line(cfg));
    csv.header({"quantity", "mass_ratio", "value"});
    std::map<std::string, std::vector<double>> series;
    for (double mass_ratio : cfg.diag_ladder) {
        const DiagonalizationLevels levels =
            psi_recursion(pot, grid, mass_ratio, cfg.diag_order);
        for (int j = 1; j < cfg.diag_order; ++j) {
            const std::string frame_key = "frame_increment_" + std::to_string(j + 1) + "_"
                                          + std::to_string(j);
            const std::string value_key = "value_increment_" + std::to_string(j + 1) + "_"
                                          + std::to_string(j);
            const double fv = sup_frame_increment(levels, j);
            const double vv = sup_value_increment(levels, j);
            csv.labeled_row(frame_key, std::array{mass_ratio, fv});
            csv.labeled_row(value_key, std::array{mass_ratio, vv});
            series[frame_key].push_back(fv);
            series[value_key].push_back(vv);
        }
        const double rv = sup_residual(levels, cfg.diag_kappa);
        csv.labeled_row("residual", std::array{mass_ratio, rv});
        series["residual"].push_back(rv);
    }

    json j;
    j["order"] = cfg.diag_order;
    j["kappa"] = cfg.diag_kappa;
    j["ladder"] = cfg.diag_ladder;
    for (const auto& [key, values] : series)
        add_slope(j, key, cfg.diag_ladder, values);
    write_json_file(cfg, "diag_orders.json", j);
    return 0;
}

/// Trapezoid phase-space integral of the real part of trace A.
double symbol_trace_integral(const SymbolField& s)
{
    double acc = 0.0;
    const int nx = s.grid.x.n_nodes(), np = s.grid.p.n_nodes();
    for (int l = 0; l < np; ++l)
        for (int k = 0; k < nx; ++k) {
            double tr = 0.0;
            for (int i = 0; i < s.dim; ++i)
                tr += s.planes[i * s.dim + i](k, l).real();
            acc += s.grid.weight(k, l) * tr;
        }
    return acc;
}

/// Phase-space working grid for one weyl experiment: x refined `refine` times
/// beyond the oscillation limit, p sized for the kernel phase at maximal node
/// separation plus a 25% alias margin.
PhaseSpaceGrid weyl_working_grid(double halfwidth, double mass_ratio, int refine)
{
    const double w = halfwidth;
    const SpatialGrid coarse = admissible_x_grid(-w, w, mass_ratio, w, 16);
    const SpatialGrid gx(-w, w, refine * coarse.n_intervals);
    const double lx = 2.0 * w;
    const int np_min = static_cast<int>(
        std::ceil(2.0 * w * std::sqrt(mass_ratio) * lx / std::numbers::pi - 1e-12));
    const SpatialGrid gp(-w, w, np_min + np_min / 4);
    return PhaseSpaceGrid(gx, gp);
}

int run_weyl_check(const ExperimentConfig& cfg)
{
    const double w = cfg.weyl_halfwidth;
    auto gaussian = [](double cx, double cp) {
        return [cx, cp](double x, double p) {
            Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
            const double g = std::exp(-(x - cx) * (x - cx) - (p - cp) * (p - cp));
            m(0, 0) = g;
            m(1, 1) = g;
            return m;
        };
    };
    const double pi = std::numbers::pi;

    // Identity phase: trace and composition-trace identities on one strongly
    // refined grid, where the quadrature error sits well below the targets.
    json j;
    {
        const double mass_ratio = cfg.weyl_identity_mass_ratio;
        const PhaseSpaceGrid pg =
            weyl_working_grid(w, mass_ratio, cfg.weyl_identity_refine);
        const SymbolField a = make_symbol(pg, 2, gaussian(0.0, 0.0));
        const SymbolField b = make_symbol(pg, 2, gaussian(0.5, -0.3));
        const OperatorKernel ka = weyl_quantize(a, mass_ratio, cfg.threads);
        const OperatorKernel kb = weyl_quantize(b, mass_ratio, cfg.threads);

        const double pref = std::sqrt(mass_ratio) / (2.0 * pi);
        const double ia = symbol_trace_integral(a);
        const double trace_err =
            std::abs(trace_of(ka) - pref * ia) / (pref * std::abs(ia));

        const OperatorKernel kc = compose(ka, kb);
        const SymbolField ab = moyal_compose(a, b, mass_ratio, 0);
        const double iab = symbol_trace_integral(ab);
        const double comp_err =
            std::abs(trace_of(kc) - pref * iab) / (pref * std::abs(iab));

        j["identity"] = {{"mass_ratio", mass_ratio},
                         {"x_intervals", pg.x.n_intervals},
                         {"p_intervals", pg.p.n_intervals},
                         {"trace_relative_error", trace_err},
                         {"composition_relative_error", comp_err}};
    }

    // Remainder phase: Moyal truncation error against the kernel-composition
    // symbol over the mass-ratio ladder.
    CsvWriter csv(out_path(cfg, "weyl_orders.csv"), provenance_line(cfg));
    csv.header({"order", "mass_ratio", "remainder_l2"});
    std::vector<std::vector<double>> remainders(cfg.weyl_max_order + 1);
    for (double mass_ratio : cfg.weyl_ladder) {
        const PhaseSpaceGrid pg =
            weyl_working_grid(w, mass_ratio, cfg.weyl_remainder_refine);
        const SymbolField a = make_symbol(pg, 2, gaussian(0.0, 0.0));
        const SymbolField b = make_symbol(pg, 2, gaussian(0.5, -0.3));
        const OperatorKernel ka = weyl_quantize(a, mass_ratio, cfg.threads);
        const OperatorKernel kb = weyl_quantize(b, mass_ratio, cfg.threads);
        const SymbolField exact = kernel_to_symbol(compose(ka, kb), pg);
        for (int m = 0; m <= cfg.weyl_max_order; ++m) {
            const SymbolField trunc = moyal_compose(a, b, mass_ratio, m);
            const double rn = symbol_l2_distance(exact, trunc);
            csv.row({static_cast<double>(m), mass_ratio, rn});
            remainders[m].push_back(rn);
        }
    }

    j["ladder"] = cfg.weyl_ladder;
    for (int m = 0; m <= cfg.weyl_max_order; ++m)
        add_slope(j, "m" + std::to_string(m), cfg.weyl_ladder, remainders[m]);
    write_json_file(cfg, "weyl_orders.json", j);
    return 0;
}

int run_converge_density(const ExperimentConfig& cfg)
{
    const MatrixPotential pot = config_potential(cfg);
    const SpatialGrid grid = cfg.density_grid.build();
    const double temperature = cfg.density_temperature;
    const Eigen::VectorXd rho_md = md_equilibrium_density(pot, temperature, grid);

    CsvWriter csv(out_path(cfg, "density_convergence.csv"), provenance_line(cfg));
    csv.header({"mass_ratio", "l1", "linf"});
    std::vector<double> l1s, linfs;
    for (double mass_ratio : cfg.density_ladder) {
        const SpectralDecomposition spec =
            solve_eigenproblem(assemble_hamiltonian(pot, grid, mass_ratio));
        const Eigen::VectorXd rho_q = equilibrium_density(spec, temperature);
        const double l1 = grid_l1_distance(grid, rho_q, rho_md);
        const double linf = grid_linf_distance(rho_q, rho_md);
        csv.row({mass_ratio, l1, linf});
        l1s.push_back(l1);
        linfs.push_back(linf);
    }

    json j;
    j["temperature"] = temperature;
    j["ladder"] = cfg.density_ladder;
    add_slope(j, "l1", cfg.density_ladder, l1s);
    add_slope(j, "linf", cfg.density_ladder, linfs);
    write_json_file(cfg, "density_convergence.json", j);
    return 0;
}

int run_converge_correlation(const ExperimentConfig& cfg)
{
    check_tau_divisibility(cfg);
    const MatrixPotential pot = config_potential(cfg);
    const SpatialGrid grid = cfg.correlation_grid.build();
    const double temperature = cfg.correlation_temperature;
    const PhaseSpaceGrid phase = cfg.phase_grid.build();
    const GibbsWeights weights = gibbs_weights(pot, temperature, phase.x);
    const MdCorrelationOptions options{cfg.verlet_dt, 1e8, cfg.threads};

    // The classical correlation does not involve the mass ratio, so it is
    // computed once per tau and compared against every quantum run.
    bool reliable = true;
    std::vector<double> md_values;
    for (double tau : cfg.taus) {
        const MdCorrelationResult md =
            md_correlation(pot, temperature, tau, phase, weights, options);
        reliable = reliable && md.reliable;
        md_values.push_back(md.value);
    }

    CsvWriter csv(out_path(cfg, "correlation_convergence.csv"), provenance_line(cfg));
    csv.header({"tau", "mass_ratio", "quantum", "md", "abs_error"});
    std::vector<double> linf_per_mass;
    for (double mass_ratio : cfg.correlation_ladder) {
        const SpectralDecomposition spec =
            solve_eigenproblem(assemble_hamiltonian(pot, grid, mass_ratio));
        double linf = 0.0;
        for (std::size_t t = 0; t < cfg.taus.size(); ++t) {
            const double q = quantum_correlation(spec, temperature, cfg.taus[t]);
            const double err = std::abs(q - md_values[t]);
            csv.row({cfg.taus[t], mass_ratio, q, md_values[t], err});
            linf = std::max(linf, err);
        }
        linf_per_mass.push_back(linf);
    }

    json j;
    j["temperature"] = temperature;
    j["ladder"] = cfg.correlation_ladder;
    j["taus"] = cfg.taus;
    j["linf"] = linf_per_mass;
    add_slope(j, "linf", cfg.correlation_ladder, linf_per_mass);
    write_json_file(cfg, "correlation_convergence.json", j);
    return reliable ? 0 : 3;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact canonical observables of a matrix-potential quantum system and "
                 "their surface-weighted molecular-dynamics approximations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string preset = "paper";
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;

    int rc = 0;
    auto register_command = [&](const char* name, const char* help,
                                int (*run)(const ExperimentConfig&)) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON config file overlaid on the preset");
        sub->add_option("--preset", preset, "Parameter preset: paper (default) or desk");
        sub->add_option("--seed", seed, "RNG seed override");
        sub->add_option("--threads", threads, "Worker-thread cap (0 = all hardware threads)");
        sub->add_option("--out", out_dir, "Output directory");
        sub->callback([&, sub, run] {
            ExperimentConfig cfg = preset_config(preset);
            if (sub->count("--config"))
                apply_config_file(cfg, config_path);
            if (sub->count("--seed"))
                cfg.seed = seed;
            if (sub->count("--threads"))
                cfg.threads = threads;
            if (sub->count("--out"))
                cfg.out_dir = out_dir;
            validate_config(cfg);
            rc = run(cfg);
        });
        return sub;
    };

    register_command("density",
                     "Quantum equilibrium density vs surface-weighted classical density",
                     &run_density);
    register_command("correlate",
                     "Position autocorrelation: exact quantum vs weighted trajectories",
                     &run_correlate);
    register_command("weights", "Surface weights by quadrature and by Langevin sampling",
                     &run_weights);
    register_command("sample-langevin",
                     "Ergodic averages with batch-means error bars on the ground surface",
                     &run_sample_langevin);
    register_command("diag-check",
                     "Iterated-diagonalization convergence orders in the mass ratio",
                     &run_diag_check);
    register_command("weyl-check",
                     "Quantization trace identities and composition-remainder orders",
                     &run_weyl_check);
    register_command("converge-density",
                     "Density error vs mass-ratio ladder with log-log slope fit",
                     &run_converge_density);
    register_command("converge-correlation",
                     "Correlation error vs mass-ratio ladder with log-log slope fit",
                     &run_converge_correlation);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
