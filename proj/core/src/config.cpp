#include "wbomd/config.hpp"

#include "wbomd/csvio.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace wbomd {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what)
{
    throw ConfigError("config error at " + where + ": " + what);
}

std::string join(const std::string& where, const std::string& key)
{
    return where.empty() ? key : where + "." + key;
}

void check_known_keys(const json& j, const std::string& where,
                      std::initializer_list<std::string_view> allowed)
{
    if (!j.is_object())
        fail(where.empty() ? "top level" : where, "expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (std::string_view k : allowed)
            known = known || k == it.key();
        if (!known)
            fail(join(where, it.key()), "unknown field");
    }
}

void get_double(const json& j, const std::string& where, const char* key, double& out)
{
    if (!j.contains(key))
        return;
    const json& v = j.at(key);
    if (!v.is_number())
        fail(join(where, key), "expected a number");
    out = v.get<double>();
}

void get_int(const json& j, const std::string& where, const char* key, int& out)
{
    if (!j.contains(key))
        return;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        fail(join(where, key), "expected an integer");
    out = v.get<int>();
}

void get_long(const json& j, const std::string& where, const char* key, long& out)
{
    if (!j.contains(key))
        return;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        fail(join(where, key), "expected an integer");
    out = v.get<long>();
}

void get_u64(const json& j, const std::string& where, const char* key, std::uint64_t& out)
{
    if (!j.contains(key))
        return;
    const json& v = j.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned()
                                   && v.get<long long>() < 0))
        fail(join(where, key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
}

void get_string(const json& j, const std::string& where, const char* key, std::string& out)
{
    if (!j.contains(key))
        return;
    const json& v = j.at(key);
    if (!v.is_string())
        fail(join(where, key), "expected a string");
    out = v.get<std::string>();
}

void get_double_list(const json& j, const std::string& where, const char* key,
                     std::vector<double>& out)
{
    if (!j.contains(key))
        return;
    const json& v = j.at(key);
    if (!v.is_array())
        fail(join(where, key), "expected an array of numbers");
    std::vector<double> parsed;
    parsed.reserve(v.size());
    for (const json& e : v) {
        if (!e.is_number())
            fail(join(where, key), "expected an array of numbers");
        parsed.push_back(e.get<double>());
    }
    out = std::move(parsed);
}

void get_grid(const json& j, const std::string& where, const char* key, GridSpec& out)
{
    if (!j.contains(key))
        return;
    const std::string here = join(where, key);
    const json& v = j.at(key);
    check_known_keys(v, here, {"min", "max", "intervals"});
    get_double(v, here, "min", out.min);
    get_double(v, here, "max", out.max);
    get_int(v, here, "intervals", out.intervals);
}

void get_phase_grid(const json& j, const std::string& where, const char* key,
                    PhaseGridSpec& out)
{
    if (!j.contains(key))
        return;
    const std::string here = join(where, key);
    const json& v = j.at(key);
    check_known_keys(v, here,
                     {"x_min", "x_max", "p_min", "p_max", "x_points", "p_points"});
    get_double(v, here, "x_min", out.x_min);
    get_double(v, here, "x_max", out.x_max);
    get_double(v, here, "p_min", out.p_min);
    get_double(v, here, "p_max", out.p_max);
    get_int(v, here, "x_points", out.x_points);
    get_int(v, here, "p_points", out.p_points);
}

void require_grid(const GridSpec& g, const std::string& where)
{
    if (!(g.max > g.min))
        fail(where, "max must exceed min");
    if (g.intervals < 2)
        fail(where + ".intervals", "need at least 2 intervals");
}

void require_ladder(const std::vector<double>& ladder, const std::string& where)
{
    if (ladder.empty())
        fail(where, "ladder must be nonempty");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] > 0.0) || !std::isfinite(ladder[i]))
            fail(where, "every mass ratio must be a positive finite number");
        if (i > 0 && !(ladder[i] > ladder[i - 1]))
            fail(where, "mass ratios must be strictly increasing");
    }
}

void require_positive(double v, const std::string& where)
{
    if (!(v > 0.0) || !std::isfinite(v))
        fail(where, "must be a positive finite number");
}

} // namespace

ExperimentConfig preset_config(const std::string& name)
{
    ExperimentConfig cfg;
    if (name == "paper")
        return cfg;
    if (name == "desk") {
        cfg.density_grid.intervals = 301;
        cfg.correlation_grid.intervals = 301;
        cfg.phase_grid.x_points = 201;
        cfg.phase_grid.p_points = 201;
        cfg.density_mass_ratio = 100.0;
        cfg.correlation_mass_ratio = 100.0;
        cfg.density_ladder = {25.0, 50.0, 100.0};
        return cfg;
    }
    throw ConfigError("config error at preset: unknown preset '" + name
                      + "' (expected 'paper' or 'desk')");
}

void apply_config_json(ExperimentConfig& cfg, const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
    }
    check_known_keys(j, "",
                     {"potential", "density", "correlation", "langevin", "diag", "weyl",
                      "seed", "threads", "out_dir"});

    if (j.contains("potential")) {
        const json& p = j.at("potential");
        check_known_keys(p, "potential", {"delta", "a", "b"});
        get_double(p, "potential", "delta", cfg.delta);
        get_double(p, "potential", "a", cfg.a);
        get_double(p, "potential", "b", cfg.b);
    }
    if (j.contains("density")) {
        const json& d = j.at("density");
        check_known_keys(d, "density", {"temperature", "mass_ratio", "grid", "ladder"});
        get_double(d, "density", "temperature", cfg.density_temperature);
        get_double(d, "density", "mass_ratio", cfg.density_mass_ratio);
        get_grid(d, "density", "grid", cfg.density_grid);
        get_double_list(d, "density", "ladder", cfg.density_ladder);
    }
    if (j.contains("correlation")) {
        const json& c = j.at("correlation");
        check_known_keys(c, "correlation",
                         {"temperature", "mass_ratio", "grid", "phase_grid", "taus", "dt",
                          "ladder"});
        get_double(c, "correlation", "temperature", cfg.correlation_temperature);
        get_double(c, "correlation", "mass_ratio", cfg.correlation_mass_ratio);
        get_grid(c, "correlation", "grid", cfg.correlation_grid);
        get_phase_grid(c, "correlation", "phase_grid", cfg.phase_grid);
        get_double_list(c, "correlation", "taus", cfg.taus);
        get_double(c, "correlation", "dt", cfg.verlet_dt);
        get_double_list(c, "correlation", "ladder", cfg.correlation_ladder);
    }
    if (j.contains("langevin")) {
        const json& l = j.at("langevin");
        check_known_keys(l, "langevin", {"friction", "dt", "burn_in", "steps", "batches"});
        get_double(l, "langevin", "friction", cfg.langevin.friction);
        get_double(l, "langevin", "dt", cfg.langevin.dt);
        get_long(l, "langevin", "burn_in", cfg.langevin.burn_in);
        get_long(l, "langevin", "steps", cfg.langevin.steps);
        get_int(l, "langevin", "batches", cfg.langevin.batches);
    }
    if (j.contains("diag")) {
        const json& d = j.at("diag");
        check_known_keys(d, "diag", {"delta", "grid", "ladder", "order", "kappa"});
        get_double(d, "diag", "delta", cfg.diag_delta);
        get_grid(d, "diag", "grid", cfg.diag_grid);
        get_double_list(d, "diag", "ladder", cfg.diag_ladder);
        get_int(d, "diag", "order", cfg.diag_order);
        get_int(d, "diag", "kappa", cfg.diag_kappa);
    }
    if (j.contains("weyl")) {
        const json& w = j.at("weyl");
        check_known_keys(w, "weyl",
                         {"halfwidth", "ladder", "max_order", "identity_mass_ratio",
                          "identity_refine", "remainder_refine"});
        get_double(w, "weyl", "halfwidth", cfg.weyl_halfwidth);
        get_double_list(w, "weyl", "ladder", cfg.weyl_ladder);
        get_int(w, "weyl", "max_order", cfg.weyl_max_order);
        get_double(w, "weyl", "identity_mass_ratio", cfg.weyl_identity_mass_ratio);
        get_int(w, "weyl", "identity_refine", cfg.weyl_identity_refine);
        get_int(w, "weyl", "remainder_refine", cfg.weyl_remainder_refine);
    }
    get_u64(j, "", "seed", cfg.seed);
    get_int(j, "", "threads", cfg.threads);
    get_string(j, "", "out_dir", cfg.out_dir);
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("config error: cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    apply_config_json(cfg, buf.str());
}

void validate_config(const ExperimentConfig& cfg)
{
    require_positive(cfg.delta, "potential.delta");
    if (!std::isfinite(cfg.a) || !std::isfinite(cfg.b))
        fail("potential", "a and b must be finite");

    require_positive(cfg.density_temperature, "density.temperature");
    require_positive(cfg.density_mass_ratio, "density.mass_ratio");
    require_grid(cfg.density_grid, "density.grid");
    require_ladder(cfg.density_ladder, "density.ladder");

    require_positive(cfg.correlation_temperature, "correlation.temperature");
    require_positive(cfg.correlation_mass_ratio, "correlation.mass_ratio");
    require_grid(cfg.correlation_grid, "correlation.grid");
    require_ladder(cfg.correlation_ladder, "correlation.ladder");
    if (!(cfg.phase_grid.x_max > cfg.phase_grid.x_min)
        || !(cfg.phase_grid.p_max > cfg.phase_grid.p_min))
        fail("correlation.phase_grid", "max must exceed min on both axes");
    if (cfg.phase_grid.x_points < 3 || cfg.phase_grid.p_points < 3)
        fail("correlation.phase_grid", "need at least 3 points per axis");
    if (cfg.taus.empty())
        fail("correlation.taus", "need at least one correlation time");
    for (double tau : cfg.taus)
        if (!(tau >= 0.0) || !std::isfinite(tau))
            fail("correlation.taus", "correlation times must be finite and >= 0");
    require_positive(cfg.verlet_dt, "correlation.dt");

    require_positive(cfg.langevin.friction, "langevin.friction");
    require_positive(cfg.langevin.dt, "langevin.dt");
    if (cfg.langevin.burn_in < 0 || cfg.langevin.steps <= cfg.langevin.burn_in)
        fail("langevin.steps", "need steps > burn_in >= 0");
    if (cfg.langevin.batches < 20)
        fail("langevin.batches", "need at least 20 batches for error bars");

    require_positive(cfg.diag_delta, "diag.delta");
    require_grid(cfg.diag_grid, "diag.grid");
    require_ladder(cfg.diag_ladder, "diag.ladder");
    if (cfg.diag_order < 1 || cfg.diag_order > 4)
        fail("diag.order", "order must be in [1, 4]");
    if (cfg.diag_kappa < 2 || cfg.diag_kappa > cfg.diag_order)
        fail("diag.kappa", "kappa must be in [2, order]");

    require_positive(cfg.weyl_halfwidth, "weyl.halfwidth");
    require_ladder(cfg.weyl_ladder, "weyl.ladder");
    if (cfg.weyl_max_order < 0 || cfg.weyl_max_order > 4)
        fail("weyl.max_order", "order must be in [0, 4]");
    require_positive(cfg.weyl_identity_mass_ratio, "weyl.identity_mass_ratio");
    if (cfg.weyl_identity_refine < 1)
        fail("weyl.identity_refine", "refinement factor must be >= 1");
    if (cfg.weyl_remainder_refine < 1)
        fail("weyl.remainder_refine", "refinement factor must be >= 1");
}

void check_tau_divisibility(const ExperimentConfig& cfg)
{
    for (double tau : cfg.taus) {
        if (tau == 0.0)
            continue;
        const double k = std::round(tau / cfg.verlet_dt);
        if (std::abs(tau - k * cfg.verlet_dt) > 1e-9 * std::max(1.0, std::abs(tau)))
            fail("correlation.taus",
                 "tau = " + format_full(tau) + " is not an integer multiple of dt = "
                     + format_full(cfg.verlet_dt));
    }
}

std::string canonical_json(const ExperimentConfig& cfg)
{
    json j;
    j["potential"] = {{"delta", cfg.delta}, {"a", cfg.a}, {"b", cfg.b}};
    j["density"] = {{"temperature", cfg.density_temperature},
                    {"mass_ratio", cfg.density_mass_ratio},
                    {"grid",
                     {{"min", cfg.density_grid.min},
                      {"max", cfg.density_grid.max},
                      {"intervals", cfg.density_grid.intervals}}},
                    {"ladder", cfg.density_ladder}};
    j["correlation"] = {{"temperature", cfg.correlation_temperature},
                        {"mass_ratio", cfg.correlation_mass_ratio},
                        {"grid",
                         {{"min", cfg.correlation_grid.min},
                          {"max", cfg.correlation_grid.max},
                          {"intervals", cfg.correlation_grid.intervals}}},
                        {"phase_grid",
                         {{"x_min", cfg.phase_grid.x_min},
                          {"x_max", cfg.phase_grid.x_max},
                          {"p_min", cfg.phase_grid.p_min},
                          {"p_max", cfg.phase_grid.p_max},
                          {"x_points", cfg.phase_grid.x_points},
                          {"p_points", cfg.phase_grid.p_points}}},
                        {"taus", cfg.taus},
                        {"dt", cfg.verlet_dt},
                        {"ladder", cfg.correlation_ladder}};
    j["langevin"] = {{"friction", cfg.langevin.friction},
                     {"dt", cfg.langevin.dt},
                     {"burn_in", cfg.langevin.burn_in},
                     {"steps", cfg.langevin.steps},
                     {"batches", cfg.langevin.batches}};
    j["diag"] = {{"delta", cfg.diag_delta},
                 {"grid",
                  {{"min", cfg.diag_grid.min},
                   {"max", cfg.diag_grid.max},
                   {"intervals", cfg.diag_grid.intervals}}},
                 {"ladder", cfg.diag_ladder},
                 {"order", cfg.diag_order},
                 {"kappa", cfg.diag_kappa}};
    j["weyl"] = {{"halfwidth", cfg.weyl_halfwidth},
                 {"ladder", cfg.weyl_ladder},
                 {"max_order", cfg.weyl_max_order},
                 {"identity_mass_ratio", cfg.weyl_identity_mass_ratio},
                 {"identity_refine", cfg.weyl_identity_refine},
                 {"remainder_refine", cfg.weyl_remainder_refine}};
    j["seed"] = cfg.seed;
    return j.dump();
}

std::string config_hash(const ExperimentConfig& cfg)
{
    return to_hex(fnv1a64(canonical_json(cfg)));
}

std::string provenance_line(const ExperimentConfig& cfg)
{
    return "config=" + config_hash(cfg) + " core=" + std::string(kCoreVersion)
           + " seed=" + std::to_string(cfg.seed);
}

} // namespace wbomd
