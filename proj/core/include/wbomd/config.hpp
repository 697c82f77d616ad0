#pragma once

#include "wbomd/grid.hpp"
#include "wbomd/langevin.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wbomd {

/// Invalid or inconsistent run configuration; carries a field-level message
/// ("config error at correlation.taus: ...").  The command-line driver maps
/// this to its config-error exit code.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    double min = 0.0;
    double max = 1.0;
    int intervals = 2;

    SpatialGrid build() const { return SpatialGrid(min, max, intervals); }
};

/// Phase-space quadrature grid given by point counts per axis (points = nodes,
/// so the spacing is (max-min)/(points-1)).
struct PhaseGridSpec {
    double x_min = -4.5;
    double x_max = 4.5;
    double p_min = -4.5;
    double p_max = 4.5;
    int x_points = 1000;
    int p_points = 1000;

    PhaseSpaceGrid build() const
    {
        return PhaseSpaceGrid(SpatialGrid(x_min, x_max, x_points - 1),
                              SpatialGrid(p_min, p_max, p_points - 1));
    }
};

/// Full experiment configuration.  The defaults reproduce the reference
/// experiments: density comparison at T = 1.9946, M = 1000 on [-6, 6] with 751
/// intervals; correlation runs at T = 1.9947 on [-4.5, 4.5] with 2048
/// intervals and a 1000 x 1000 phase-space quadrature; two-level potential
/// with delta = 0.1, a = 1, b = 10.  Each convergence study carries its own
/// mass-ratio ladder because the regimes of interest differ per study.
struct ExperimentConfig {
    // two-level potential family
    double delta = 0.1;
    double a = 1.0;
    double b = 10.0;

    // density experiment
    double density_temperature = 1.9946;
    double density_mass_ratio = 1000.0;
    GridSpec density_grid{-6.0, 6.0, 751};
    std::vector<double> density_ladder{125.0, 250.0, 500.0, 1000.0};

    // correlation experiment
    double correlation_temperature = 1.9947;
    double correlation_mass_ratio = 1000.0;
    GridSpec correlation_grid{-4.5, 4.5, 2048};
    PhaseGridSpec phase_grid{};
    std::vector<double> taus{0.0, 0.2};
    double verlet_dt = 1e-3;
    std::vector<double> correlation_ladder{25.0, 50.0, 100.0};

    // Langevin sampling (temperature and seed are taken from the experiment)
    LangevinParams langevin{};

    // iterated-diagonalization order check
    double diag_delta = 0.5;
    GridSpec diag_grid{-2.0, 2.0, 2000};
    std::vector<double> diag_ladder{1000.0, 2000.0, 4000.0, 8000.0};
    int diag_order = 3;
    int diag_kappa = 2;

    // phase-space quantization check (Gaussian symbols on a square domain)
    double weyl_halfwidth = 6.0;
    std::vector<double> weyl_ladder{8.0, 16.0, 32.0, 64.0, 128.0};
    int weyl_max_order = 2;
    double weyl_identity_mass_ratio = 64.0;
    int weyl_identity_refine = 8;
    int weyl_remainder_refine = 2;

    // run control
    std::uint64_t seed = 0;
    int threads = 0;          // <= 0 means all hardware threads; not hashed
    std::string out_dir = "."; // not hashed
};

/// Named parameter sets: "paper" (the defaults above) or "desk" (shrunk grids
/// -- 301 spatial intervals, 201 x 201 phase points, mass ratios capped at 100
/// -- for fast runs with correspondingly looser accuracy).
ExperimentConfig preset_config(const std::string& name);

/// Overlays the fields present in a JSON document onto `config`.  Unknown
/// keys, wrong types, and unreadable files raise ConfigError naming the field.
void apply_config_file(ExperimentConfig& config, const std::string& path);
void apply_config_json(ExperimentConfig& config, const std::string& text);

/// Cross-field validation; raises ConfigError naming the offending field.
void validate_config(const ExperimentConfig& config);

/// A tau list is usable for correlation runs only if every positive tau is an
/// integer multiple of the Verlet step cap; raises ConfigError naming the tau.
void check_tau_divisibility(const ExperimentConfig& config);

/// Canonical JSON rendering (sorted keys, round-trip numbers) of every field
/// that affects computed results; `threads` and `out_dir` are excluded so the
/// digest is stable across machines and output locations.
std::string canonical_json(const ExperimentConfig& config);

/// 16-hex-digit FNV-1a digest of canonical_json().
std::string config_hash(const ExperimentConfig& config);

/// Provenance stamp written into every output file:
/// "config=<hash> core=<version> seed=<seed>".
std::string provenance_line(const ExperimentConfig& config);

} // namespace wbomd
