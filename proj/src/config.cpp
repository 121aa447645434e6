#include "dmdeco/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "dmdeco/error.hpp"
#include "dmdeco/units.hpp"
#include "embedded_data.hpp"
#include "yaml_util.hpp"

namespace dmdeco
{
namespace
{
using namespace yaml_util;

std::string const user_provenance = "user";

void read_double(YAML::Node const& block,
                 std::string_view block_name,
                 char const* key,
                 double& value,
                 bool* was_set = nullptr)
{
    auto const node = block[key];
    if (!node)
        return;
    value = as_double(node, join(block_name, key));
    if (!std::isfinite(value))
        fail(node, join(block_name, key), "must be finite");
    if (was_set)
        *was_set = true;
}

template<class T>
void read_count(YAML::Node const& block,
                std::string_view block_name,
                char const* key,
                T& value)
{
    auto const node = block[key];
    if (node)
        value = static_cast<T>(as_count(node, join(block_name, key)));
}

void read_string(YAML::Node const& block,
                 std::string_view block_name,
                 char const* key,
                 std::string& value)
{
    auto const node = block[key];
    if (node)
        value = as_string(node, join(block_name, key));
}

// Re-throw validation failures of a block as configuration errors
template<class F>
void validate_block(std::string_view block, F&& check)
{
    try
    {
        check();
    }
    catch (ConfigError const&)
    {
        throw;
    }
    catch (InvalidInput const& e)
    {
        throw ConfigError(fmt::format("{}: {}", block, e.what()));
    }
}

//---------------------------------------------------------------------------//
TargetBlock read_target(YAML::Node const& node,
                        TargetBlock base,
                        std::string_view name,
                        bool allow_preset,
                        bool mark_user)
{
    if (allow_preset)
    {
        require_keys(node,
                     name,
                     {"preset", "name", "material", "total_mass_amu",
                      "nucleus_A", "radius_m", "bulk_density_g_cm3",
                      "separation_m", "orientation", "angle_deg", "exposure_s",
                      "altitude_m", "shots", "provenance"});
    }
    else
    {
        require_keys(node,
                     name,
                     {"name", "material", "total_mass_amu", "nucleus_A",
                      "radius_m", "bulk_density_g_cm3", "separation_m",
                      "orientation", "angle_deg", "exposure_s", "altitude_m",
                      "shots", "provenance"});
    }
    TargetBlock t = std::move(base);
    if (auto const p = node["preset"])
    {
        auto const preset = as_string(p, join(name, "preset"));
        bool found = false;
        for (auto const& b : builtin_target_blocks())
        {
            if (b.name == preset)
            {
                t = b;
                found = true;
            }
        }
        if (!found)
            fail(p, join(name, "preset"), fmt::format("unknown preset '{}'", preset));
    }

    bool mass_set = false;
    bool radius_set = false;
    bool density_set = false;
    read_string(node, name, "name", t.name);
    read_string(node, name, "material", t.material);
    read_double(node, name, "total_mass_amu", t.total_mass_amu, &mass_set);
    read_double(node, name, "nucleus_A", t.nucleus_A);
    read_double(node, name, "radius_m", t.radius_m, &radius_set);
    read_double(node, name, "bulk_density_g_cm3", t.bulk_density_g_cm3, &density_set);
    read_double(node, name, "separation_m", t.separation_m);
    read_string(node, name, "orientation", t.orientation);
    read_double(node, name, "angle_deg", t.angle_deg);
    read_double(node, name, "exposure_s", t.exposure_s);
    read_double(node, name, "altitude_m", t.altitude_m);
    read_count(node, name, "shots", t.shots);
    if (auto const o = node["orientation"])
    {
        try
        {
            orientation_from_string(t.orientation);
        }
        catch (InvalidInput const& e)
        {
            fail(o, join(name, "orientation"), e.what());
        }
    }

    if (mark_user)
    {
        for (auto const& kv : node)
        {
            auto const key = kv.first.as<std::string>();
            if (key != "preset" && key != "provenance" && key != "name")
                t.provenance[key] = user_provenance;
        }
    }
    if (auto const prov = node["provenance"])
    {
        auto const pname = join(name, "provenance");
        if (!prov.IsMap())
            fail(prov, pname, "expected a mapping");
        // An explicit map replaces the inherited one
        t.provenance.clear();
        for (auto const& kv : prov)
        {
            auto const key = kv.first.as<std::string>();
            t.provenance[key] = as_string(kv.second, join(pname, key));
        }
    }

    // One of mass and radius follows from the other through the density
    double const density = units::bulk_density_from_g_cm3(t.bulk_density_g_cm3);
    if (density > 0)
    {
        if (mass_set && !radius_set)
        {
            t.radius_m = radius_from_bulk_density(
                units::mass_from_amu(t.total_mass_amu), density);
        }
        else if (radius_set && !mass_set)
        {
            double const volume = 4.0 / 3.0 * std::numbers::pi * t.radius_m
                                  * t.radius_m * t.radius_m;
            t.total_mass_amu = units::mass_to_amu(volume * density);
        }
        else if (density_set && !mass_set && !radius_set)
        {
            t.radius_m = radius_from_bulk_density(
                units::mass_from_amu(t.total_mass_amu), density);
        }
    }
    validate_block(name, [&] { t.spec().validate(); });
    return t;
}

void emit_target(YAML::Emitter& out, TargetBlock const& t)
{
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << t.name;
    out << YAML::Key << "material" << YAML::Value << YAML::DoubleQuoted
        << t.material;
    out << YAML::Key << "total_mass_amu" << YAML::Value << exact(t.total_mass_amu);
    out << YAML::Key << "nucleus_A" << YAML::Value << exact(t.nucleus_A);
    out << YAML::Key << "radius_m" << YAML::Value << exact(t.radius_m);
    out << YAML::Key << "bulk_density_g_cm3" << YAML::Value
        << exact(t.bulk_density_g_cm3);
    out << YAML::Key << "separation_m" << YAML::Value << exact(t.separation_m);
    out << YAML::Key << "orientation" << YAML::Value << t.orientation;
    out << YAML::Key << "angle_deg" << YAML::Value << exact(t.angle_deg);
    out << YAML::Key << "exposure_s" << YAML::Value << exact(t.exposure_s);
    out << YAML::Key << "altitude_m" << YAML::Value << exact(t.altitude_m);
    out << YAML::Key << "shots" << YAML::Value << t.shots;
    out << YAML::Key << "provenance" << YAML::Value << YAML::BeginMap;
    for (auto const& [k, v] : t.provenance)
        out << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << v;
    out << YAML::EndMap;
    out << YAML::EndMap;
}

YAML::Node load_yaml(std::string_view text)
{
    try
    {
        return YAML::Load(std::string(text));
    }
    catch (YAML::ParserException const& e)
    {
        throw ConfigError(fmt::format("line {}, column {}: {}",
                                      e.mark.line + 1,
                                      e.mark.column + 1,
                                      e.msg));
    }
}

void read_halo(YAML::Node const& node, HaloBlock& h)
{
    require_keys(node,
                 "halo",
                 {"density_GeV_cm3", "v0_km_s", "v_esc_km_s", "v_sun_km_s",
                  "orbit_speed_km_s", "orbit_inclination_deg", "peak_day",
                  "epoch_day"});
    read_double(node, "halo", "density_GeV_cm3", h.density_GeV_cm3);
    read_double(node, "halo", "v0_km_s", h.v0_km_s);
    read_double(node, "halo", "v_esc_km_s", h.v_esc_km_s);
    read_double(node, "halo", "v_sun_km_s", h.v_sun_km_s);
    read_double(node, "halo", "orbit_speed_km_s", h.orbit_speed_km_s);
    read_double(node, "halo", "orbit_inclination_deg", h.orbit_inclination_deg);
    read_double(node, "halo", "peak_day", h.peak_day);
    if (auto const e = node["epoch_day"])
    {
        if (e.IsNull())
        {
            h.epoch_day.reset();
        }
        else
        {
            double day = 0;
            read_double(node, "halo", "epoch_day", day);
            h.epoch_day = day;
        }
    }
    validate_block("halo", [&] { h.model().validate(); });
}

void read_scattering(YAML::Node const& node, ScatteringBlock& s)
{
    require_keys(node, "scattering", {"sigma_n_cm2", "mode"});
    read_double(node, "scattering", "sigma_n_cm2", s.sigma_n_cm2);
    read_string(node, "scattering", "mode", s.mode);
    if (auto const m = node["mode"]; m && s.mode != "pointlike" && s.mode != "extended")
        fail(m, "scattering.mode", "expected 'pointlike' or 'extended'");
    if (!(s.sigma_n_cm2 >= 0))
        fail(node["sigma_n_cm2"], "scattering.sigma_n_cm2", "must be non-negative");
}

void read_shielding(YAML::Node const& node, ShieldingBlock& s)
{
    require_keys(node,
                 "shielding",
                 {"table", "mean_nucleus_A", "n_crit", "mass_exponent",
                  "extra_column_g_cm2", "calibration_sigma_cm2",
                  "n_crit_provenance"});
    read_string(node, "shielding", "table", s.table);
    read_double(node, "shielding", "mean_nucleus_A", s.mean_nucleus_A);
    read_double(node, "shielding", "mass_exponent", s.mass_exponent);
    read_double(node, "shielding", "extra_column_g_cm2", s.extra_column_g_cm2);
    read_double(node, "shielding", "calibration_sigma_cm2", s.calibration_sigma_cm2);
    read_string(node, "shielding", "n_crit_provenance", s.n_crit_provenance);
    bool explicit_n = false;
    read_double(node, "shielding", "n_crit", s.n_crit, &explicit_n);
    if (explicit_n && !node["n_crit_provenance"])
        s.n_crit_provenance = user_provenance;
}

void read_scan(YAML::Node const& node, ScanBlock& s)
{
    require_keys(node,
                 "scan",
                 {"mass_min_eV", "mass_max_eV", "points_per_decade",
                  "sigma_ref_cm2", "per_campaign", "rel_tolerance",
                  "max_evaluations"});
    read_double(node, "scan", "mass_min_eV", s.mass_min_eV);
    read_double(node, "scan", "mass_max_eV", s.mass_max_eV);
    read_count(node, "scan", "points_per_decade", s.points_per_decade);
    read_double(node, "scan", "sigma_ref_cm2", s.sigma_ref_cm2);
    if (auto const p = node["per_campaign"])
        s.per_campaign = as_bool(p, "scan.per_campaign");
    read_double(node, "scan", "rel_tolerance", s.rel_tolerance);
    read_count(node, "scan", "max_evaluations", s.max_evaluations);
    auto bad = [&](char const* key, char const* msg) {
        fail(node[key] ? node[key] : node, join("scan", key), msg);
    };
    if (!(s.mass_min_eV > 0 && s.mass_max_eV >= s.mass_min_eV))
        bad("mass_max_eV", "needs 0 < mass_min_eV <= mass_max_eV");
    if (s.points_per_decade < 1)
        bad("points_per_decade", "must be at least 1");
    if (!(s.sigma_ref_cm2 > 0))
        bad("sigma_ref_cm2", "must be positive");
    if (!(s.rel_tolerance > 0 && s.rel_tolerance < 1))
        bad("rel_tolerance", "must lie in (0, 1)");
    if (s.max_evaluations == 0)
        bad("max_evaluations", "must be positive");
}

void read_montecarlo(YAML::Node const& node, MonteCarloBlock& m)
{
    require_keys(node,
                 "montecarlo",
                 {"seed", "mass_eV", "shots", "start_day", "window_days",
                  "gamma_background"});
    read_count(node, "montecarlo", "seed", m.seed);
    read_double(node, "montecarlo", "mass_eV", m.mass_eV);
    read_count(node, "montecarlo", "shots", m.shots);
    read_double(node, "montecarlo", "start_day", m.start_day);
    read_double(node, "montecarlo", "window_days", m.window_days);
    read_double(node, "montecarlo", "gamma_background", m.gamma_background);
    auto bad = [&](char const* key, char const* msg) {
        fail(node[key] ? node[key] : node, join("montecarlo", key), msg);
    };
    if (!(m.mass_eV > 0))
        bad("mass_eV", "must be positive");
    if (m.shots == 0)
        bad("shots", "must be at least 1");
    if (!(m.window_days >= 0))
        bad("window_days", "must be non-negative");
    if (!(m.gamma_background >= 0))
        bad("gamma_background", "must be non-negative");
}

// n_crit from the calibration unless it was given explicitly
void resolve_shielding(ShieldingBlock& s, std::filesystem::path const& base_dir)
{
    validate_block("shielding", [&] {
        auto const atm = s.atmosphere(base_dir);
        if (s.n_crit_provenance.empty())
        {
            if (!(s.calibration_sigma_cm2 > 0))
                throw InvalidInput("calibration_sigma_cm2 must be positive");
            s.n_crit = calibrate_n_crit(atm, s.calibration_sigma_cm2 * units::cm2);
            s.n_crit_provenance = fmt::format(
                "calibrated: sea-level ceiling {} cm^2 at mass_exponent 0",
                exact(s.calibration_sigma_cm2));
        }
        s.criterion().validate();
    });
}
}  // namespace

//---------------------------------------------------------------------------//
HaloModel HaloBlock::model() const
{
    using namespace units;
    return HaloModel{density_from_gev_cm3(density_GeV_cm3),
                     v0_km_s * km_per_s,
                     v_esc_km_s * km_per_s,
                     v_sun_km_s * km_per_s,
                     orbit_speed_km_s * km_per_s,
                     orbit_inclination_deg * degree,
                     peak_day};
}

WindState HaloBlock::wind() const
{
    auto const h = model();
    return wind_velocity(h, epoch_day.value_or(mean_wind_day(h)));
}

TargetSpec TargetBlock::spec() const
{
    TargetSpec s;
    s.name = name;
    s.material = material;
    s.total_mass = units::mass_from_amu(total_mass_amu);
    s.nucleus_A = nucleus_A;
    s.radius = radius_m;
    s.bulk_density = units::bulk_density_from_g_cm3(bulk_density_g_cm3);
    s.separation = separation_m;
    s.orientation = orientation_from_string(orientation);
    s.angle = angle_deg * units::degree;
    s.exposure = exposure_s;
    s.altitude = altitude_m;
    s.shots = shots;
    s.provenance = provenance;
    return s;
}

ScatteringModel ScatteringBlock::model() const
{
    return ScatteringModel{sigma_n_cm2 * units::cm2,
                           mode == "pointlike" ? ScatterMode::pointlike
                                               : ScatterMode::extended};
}

AtmosphereModel
ShieldingBlock::atmosphere(std::filesystem::path const& base_dir) const
{
    AtmosphereModel atm;
    if (table.empty())
    {
        atm = AtmosphereModel::standard();
    }
    else
    {
        std::filesystem::path path(table);
        if (path.is_relative() && !base_dir.empty())
            path = base_dir / path;
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError(fmt::format("shielding.table: cannot read '{}'",
                                          path.string()));
        std::stringstream buf;
        buf << in.rdbuf();
        atm = AtmosphereModel::from_csv(buf.str());
    }
    atm.mean_nucleus_A = mean_nucleus_A;
    atm.validate();
    return atm;
}

ShieldCriterion ShieldingBlock::criterion() const
{
    return ShieldCriterion{
        n_crit, mass_exponent, units::column_from_g_cm2(extra_column_g_cm2)};
}

RateOptions ScanBlock::rate_options() const
{
    return RateOptions{rel_tolerance, max_evaluations};
}

//---------------------------------------------------------------------------//
std::vector<TargetBlock> builtin_target_blocks()
{
    auto const root = load_yaml(embedded::targets_yaml);
    std::vector<TargetBlock> result;
    for (auto const& kv : root)
    {
        TargetBlock base;
        base.name = kv.first.as<std::string>();
        result.push_back(read_target(kv.second, base, base.name, false, false));
    }
    return result;
}

ExperimentConfig default_config()
{
    ExperimentConfig c;
    c.target = builtin_target_blocks().front();
    c.shielding.calibration_sigma_cm2 = std::pow(10.0, -28.5);
    resolve_shielding(c.shielding, {});
    return c;
}

namespace
{
ExperimentConfig parse_in(std::string_view yaml_text,
                          std::filesystem::path const& base_dir)
{
    ExperimentConfig c = default_config();
    c.base_dir = base_dir;
    auto const root = load_yaml(yaml_text);
    if (!root || root.IsNull())
        return c;
    require_keys(root,
                 "",
                 {"halo", "target", "scattering", "shielding", "scan",
                  "montecarlo"});
    if (auto const n = root["halo"])
        read_halo(n, c.halo);
    if (auto const n = root["target"])
        c.target = read_target(n, c.target, "target", true, true);
    if (auto const n = root["scattering"])
        read_scattering(n, c.scattering);
    if (auto const n = root["shielding"])
    {
        read_shielding(n, c.shielding);
        if (!n["n_crit"])
            c.shielding.n_crit_provenance.clear();
        resolve_shielding(c.shielding, base_dir);
    }
    if (auto const n = root["scan"])
        read_scan(n, c.scan);
    if (auto const n = root["montecarlo"])
        read_montecarlo(n, c.montecarlo);
    return c;
}
}  // namespace

ExperimentConfig parse_config(std::string_view yaml_text)
{
    return parse_in(yaml_text, {});
}

ExperimentConfig load_config(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    if (path.extension() == ".json")
    {
        try
        {
            text = nlohmann::json::parse(text).at("config_yaml").get<std::string>();
        }
        catch (nlohmann::json::exception const& e)
        {
            throw ConfigError(fmt::format(
                "{}: not a metadata file with config_yaml ({})",
                path.string(),
                e.what()));
        }
    }
    return parse_in(text, path.parent_path());
}

std::string to_yaml(TargetBlock const& target)
{
    YAML::Emitter out;
    emit_target(out, target);
    return std::string(out.c_str()) + "\n";
}

TargetBlock parse_target_block(std::string_view yaml_text)
{
    return read_target(load_yaml(yaml_text), TargetBlock{}, "target", false, false);
}

std::string to_yaml(ExperimentConfig const& c)
{
    YAML::Emitter out;
    auto num = [&](char const* key, double v) {
        out << YAML::Key << key << YAML::Value << exact(v);
    };
    out << YAML::BeginMap;

    out << YAML::Key << "halo" << YAML::Value << YAML::BeginMap;
    num("density_GeV_cm3", c.halo.density_GeV_cm3);
    num("v0_km_s", c.halo.v0_km_s);
    num("v_esc_km_s", c.halo.v_esc_km_s);
    num("v_sun_km_s", c.halo.v_sun_km_s);
    num("orbit_speed_km_s", c.halo.orbit_speed_km_s);
    num("orbit_inclination_deg", c.halo.orbit_inclination_deg);
    num("peak_day", c.halo.peak_day);
    out << YAML::Key << "epoch_day" << YAML::Value;
    if (c.halo.epoch_day)
        out << exact(*c.halo.epoch_day);
    else
        out << YAML::Null;
    out << YAML::EndMap;

    out << YAML::Key << "target" << YAML::Value;
    emit_target(out, c.target);

    out << YAML::Key << "scattering" << YAML::Value << YAML::BeginMap;
    num("sigma_n_cm2", c.scattering.sigma_n_cm2);
    out << YAML::Key << "mode" << YAML::Value << c.scattering.mode;
    out << YAML::EndMap;

    out << YAML::Key << "shielding" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "table" << YAML::Value << YAML::DoubleQuoted
        << c.shielding.table;
    num("mean_nucleus_A", c.shielding.mean_nucleus_A);
    num("n_crit", c.shielding.n_crit);
    num("mass_exponent", c.shielding.mass_exponent);
    num("extra_column_g_cm2", c.shielding.extra_column_g_cm2);
    num("calibration_sigma_cm2", c.shielding.calibration_sigma_cm2);
    out << YAML::Key << "n_crit_provenance" << YAML::Value << YAML::DoubleQuoted
        << c.shielding.n_crit_provenance;
    out << YAML::EndMap;

    out << YAML::Key << "scan" << YAML::Value << YAML::BeginMap;
    num("mass_min_eV", c.scan.mass_min_eV);
    num("mass_max_eV", c.scan.mass_max_eV);
    out << YAML::Key << "points_per_decade" << YAML::Value
        << c.scan.points_per_decade;
    num("sigma_ref_cm2", c.scan.sigma_ref_cm2);
    out << YAML::Key << "per_campaign" << YAML::Value
        << (c.scan.per_campaign ? "true" : "false");
    num("rel_tolerance", c.scan.rel_tolerance);
    out << YAML::Key << "max_evaluations" << YAML::Value
        << c.scan.max_evaluations;
    out << YAML::EndMap;

    out << YAML::Key << "montecarlo" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << c.montecarlo.seed;
    num("mass_eV", c.montecarlo.mass_eV);
    out << YAML::Key << "shots" << YAML::Value << c.montecarlo.shots;
    num("start_day", c.montecarlo.start_day);
    num("window_days", c.montecarlo.window_days);
    num("gamma_background", c.montecarlo.gamma_background);
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}
}  // namespace dmdeco
