// Command-line front end: rate, scan, campaign, graviton, shield.
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dmdeco/config.hpp"
#include "dmdeco/core.hpp"
#include "dmdeco/decoherence.hpp"
#include "dmdeco/error.hpp"
#include "dmdeco/gravwave.hpp"
#include "dmdeco/montecarlo.hpp"
#include "dmdeco/output.hpp"
#include "dmdeco/scan.hpp"
#include "dmdeco/shielding.hpp"
#include "dmdeco/units.hpp"

namespace fs = std::filesystem;
using namespace dmdeco;

namespace
{
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct Common
{
    std::string config_path;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::optional<double> tolerance;
};

ExperimentConfig load(Common const& c)
{
    ExperimentConfig cfg = c.config_path.empty() ? default_config()
                                                 : load_config(c.config_path);
    if (c.tolerance)
    {
        if (!(*c.tolerance > 0 && *c.tolerance < 1))
            throw ConfigError("--tolerance must lie in (0, 1)");
        cfg.scan.rel_tolerance = *c.tolerance;
    }
    return cfg;
}

void print(std::string_view key, double value)
{
    fmt::print("{} = {:.10g}\n", key, value);
}

void print(std::string_view key, std::string_view value)
{
    fmt::print("{} = {}\n", key, value);
}

//---------------------------------------------------------------------------//
struct RateArgs
{
    double mass_eV = 0;
    std::optional<double> sigma_cm2;
    std::optional<std::string> orientation;
    std::optional<double> angle_deg;
    std::optional<double> day;
};

int cmd_rate(Common const& common, RateArgs const& a)
{
    auto cfg = load(common);
    if (a.sigma_cm2)
        cfg.scattering.sigma_n_cm2 = *a.sigma_cm2;
    if (a.orientation)
        cfg.target.orientation = *a.orientation;
    if (a.angle_deg)
        cfg.target.angle_deg = *a.angle_deg;
    if (a.day)
        cfg.halo.epoch_day = *a.day;
    if (!(a.mass_eV > 0))
        throw InvalidInput("--mass-ev must be positive");

    auto const target = cfg.target.spec();
    target.validate();
    auto const halo = cfg.halo.model();
    auto const wind = cfg.halo.wind();
    auto const model = cfg.scattering.model();
    double const m_dm = units::mass_from_ev(a.mass_eV);
    auto const rate = decoherence_rate(halo,
                                       wind,
                                       model,
                                       target.composition(),
                                       m_dm,
                                       target.separation_vector(),
                                       cfg.scan.rate_options());
    auto const xs = total_cross_section(
        model, target.composition(), halo.v0, m_dm);
    if (xs.exceeds_geometric)
    {
        fmt::print(stderr,
                   "warning: total cross-section {:.4g} m^2 at v0 exceeds "
                   "the geometric area pi R^2; the Born formula is outside "
                   "its regime\n",
                   xs.value);
    }
    auto const g = exponent(rate, target.exposure);
    auto const gamma = gamma_from_exponent(g);

    print("model", model_tag);
    print("phase_convention", phase_convention);
    print("target", target.name);
    print("mass_eV", a.mass_eV);
    print("sigma_n_cm2", cfg.scattering.sigma_n_cm2);
    print("orientation", to_string(target.orientation));
    print("angle_from_wind_deg", target.wind_angle() / units::degree);
    print("separation_m", target.separation);
    print("epoch_day", wind.epoch);
    print("wind_speed_km_s", wind.speed() / units::km_per_s);
    print("F_re_per_s", rate.F.real());
    print("F_im_per_s", rate.F.imag());
    print("F_error_per_s", rate.quadrature_error);
    print("exposure_s", target.exposure);
    print("Gamma_re", g.re);
    print("Gamma_im", g.im);
    print("abs_gamma", visibility(gamma));
    print("p_dim", dim_port_probability(gamma));
    return 0;
}

//---------------------------------------------------------------------------//
struct ScanArgs
{
    std::string out;
    std::string overlay;
};

int cmd_scan(Common const& common, ScanArgs const& a)
{
    auto const cfg = load(common);
    ScanInputs in{cfg.target.spec(),
                  cfg.halo.model(),
                  cfg.halo.wind(),
                  cfg.scattering.model(),
                  cfg.shielding.atmosphere(cfg.base_dir),
                  cfg.shielding.criterion(),
                  FloorOptions{cfg.scan.per_campaign, cfg.scan.rate_options()}};
    in.model.sigma_n = cfg.scan.sigma_ref_cm2 * units::cm2;
    auto const masses = log_mass_grid(
        cfg.scan.mass_min_eV, cfg.scan.mass_max_eV, cfg.scan.points_per_decade);

    std::string overlay;
    if (!a.overlay.empty())
        overlay = read_file(a.overlay);

    auto const grid = exclusion_scan(
        in, masses, common.threads, [](ScanPoint const& p) {
            fmt::print(stderr,
                       "mass_eV={:.6g} floor_cm2={:.6g} ceiling_cm2={:.6g} {}{}\n",
                       p.mass_eV,
                       p.sigma_floor_cm2,
                       p.sigma_ceiling_cm2,
                       flags_to_string(p.flags),
                       p.message.empty() ? "" : " (" + p.message + ")");
        });

    fs::path const out(a.out);
    auto const csv = scan_csv(grid);
    auto meta = output_metadata(cfg, "scan", out.filename().string(), csv);
    std::size_t failed = 0;
    for (auto const& p : grid.points)
        failed += (p.flags & flag_quadrature_failed) ? 1 : 0;
    meta["points"] = grid.points.size();
    meta["quadrature_failed_points"] = failed;
    if (!a.overlay.empty())
    {
        fs::path overlay_out = out;
        overlay_out += ".overlay.csv";
        write_file(overlay_out, overlay);
        meta["overlay"] = {{"source", fs::path(a.overlay).filename().string()},
                           {"file", overlay_out.filename().string()},
                           {"git_blob_sha1", git_blob_sha1(overlay)}};
    }
    write_file(out, csv);
    write_file(metadata_path(out), meta.dump(2) + "\n");
    fmt::print("wrote {} ({} masses, {} failed)\n", out.string(), grid.points.size(), failed);
    return 0;
}

//---------------------------------------------------------------------------//
struct CampaignArgs
{
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> mass_eV;
    std::optional<double> sigma_cm2;
    std::optional<std::uint64_t> shots;
};

int cmd_campaign(Common const& common, CampaignArgs const& a)
{
    auto cfg = load(common);
    if (a.seed)
        cfg.montecarlo.seed = *a.seed;
    if (a.mass_eV)
        cfg.montecarlo.mass_eV = *a.mass_eV;
    if (a.sigma_cm2)
        cfg.scattering.sigma_n_cm2 = *a.sigma_cm2;
    if (a.shots)
        cfg.montecarlo.shots = *a.shots;

    CampaignInputs in;
    in.target = cfg.target.spec();
    in.halo = cfg.halo.model();
    in.model = cfg.scattering.model();
    in.m_dm = units::mass_from_ev(cfg.montecarlo.mass_eV);
    in.shots = cfg.montecarlo.shots;
    in.start_day = cfg.montecarlo.start_day;
    in.window_days = cfg.montecarlo.window_days;
    in.gamma_background = cfg.montecarlo.gamma_background;
    in.seed = cfg.montecarlo.seed;
    in.rate = cfg.scan.rate_options();
    auto const result = simulate_campaign(in, common.threads);

    fs::path const out(a.out);
    auto const csv = campaign_csv(result);
    auto meta = output_metadata(cfg, "campaign", out.filename().string(), csv);
    auto const& s = result.summary;
    meta["summary"] = {{"shots", s.shots},
                       {"dim", s.dim},
                       {"dim_fraction", s.dim_fraction},
                       {"dim_fraction_ci99", {s.ci99.lo, s.ci99.hi}},
                       {"rate_evaluations", s.rate_evaluations},
                       {"unconverged_rates", s.unconverged_rates}};
    meta["seed"] = result.seed;
    write_file(out, csv);
    write_file(metadata_path(out), meta.dump(2) + "\n");
    print("shots", static_cast<double>(s.shots));
    print("dim", static_cast<double>(s.dim));
    print("dim_fraction", s.dim_fraction);
    print("dim_fraction_ci99_lo", s.ci99.lo);
    print("dim_fraction_ci99_hi", s.ci99.hi);
    return 0;
}

//---------------------------------------------------------------------------//
struct GravitonArgs
{
    std::optional<double> mass_ug;
    std::optional<double> mass_amu;
    double beta = 0;
    double extent_m = 0;
    double duration_s = 0;
};

int cmd_graviton(GravitonArgs const& a)
{
    if (a.mass_ug.has_value() == a.mass_amu.has_value())
        throw InvalidInput("give exactly one of --mass-ug and --mass-amu");
    GravSuperposition s;
    s.mass = a.mass_ug ? *a.mass_ug * units::microgram
                       : units::mass_from_amu(*a.mass_amu);
    s.beta = a.beta;
    s.extent = a.extent_m;
    s.duration = a.duration_s;
    auto const g = grav_exponent(s);
    auto const gamma = gamma_from_exponent(g);
    print("model", graviton_model_tag);
    print("mass_kg", s.mass);
    print("beta", s.beta);
    print("extent_m", s.extent);
    print("duration_s", s.duration);
    print("alpha_G", gravitational_coupling(s.mass));
    print("Gamma_re", g.re);
    print("abs_gamma", visibility(gamma));
    print("p_dim", dim_port_probability(gamma));
    print("feasibility_note",
          "blackbody and electromagnetic bremsstrahlung decoherence are not "
          "computed; they must be suppressed separately for this exponent "
          "to dominate");
    double const m_p = constants::planck_mass();
    print("planck_mass_ug", m_p / units::microgram);
    print("planck_mass_amu", units::mass_to_amu(m_p));
    if (s.beta > 0)
    {
        double const m_x = planck_crossover_mass(s.beta, 1.0);
        print("crossover_mass_ug", m_x / units::microgram);
        print("crossover_mass_amu", units::mass_to_amu(m_x));
    }
    return 0;
}

//---------------------------------------------------------------------------//
struct ShieldArgs
{
    std::optional<double> altitude_m;
    double mass_eV = 0;
};

int cmd_shield(Common const& common, ShieldArgs const& a)
{
    auto const cfg = load(common);
    if (!(a.mass_eV > 0))
        throw InvalidInput("--mass-ev must be positive");
    double const altitude = a.altitude_m.value_or(cfg.target.altitude_m);
    auto const atm = cfg.shielding.atmosphere(cfg.base_dir);
    auto const crit = cfg.shielding.criterion();
    double const sigma = max_visible_sigma(
                             atm, crit, units::mass_from_ev(a.mass_eV), altitude)
                         / units::cm2;
    print("altitude_m", altitude);
    print("mass_eV", a.mass_eV);
    print("column_g_cm2", units::column_to_g_cm2(column_density(atm, altitude)));
    print("n_crit", crit.n_crit);
    print("max_visible_sigma_cm2", sigma);
    print("log10_max_visible_sigma_cm2", std::log10(sigma));
    return 0;
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Decoherence sensitivity of matter-wave interferometers to "
                 "a dark-matter halo flux"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    app.add_option("--config", common.config_path, "YAML configuration or .meta.json")
        ->check(CLI::ExistingFile);
    app.add_option("--threads", common.threads, "Worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    app.add_option("--tolerance", common.tolerance, "Relative quadrature tolerance");

    RateArgs rate;
    auto* rate_cmd = app.add_subcommand("rate", "Print F, Gamma, |gamma| and p_dim");
    rate_cmd->add_option("--mass-ev", rate.mass_eV, "Dark-matter mass [eV/c^2]")->required();
    rate_cmd->add_option("--sigma-cm2", rate.sigma_cm2, "Per-nucleon cross-section [cm^2]");
    rate_cmd->add_option("--orientation", rate.orientation, "parallel, perpendicular or angle");
    rate_cmd->add_option("--angle-deg", rate.angle_deg, "Separation angle from the wind");
    rate_cmd->add_option("--day", rate.day, "Epoch [day of year]");

    ScanArgs scan;
    auto* scan_cmd = app.add_subcommand("scan", "Exclusion band over the mass grid");
    scan_cmd->add_option("--out", scan.out, "Output CSV")->required();
    scan_cmd->add_option("--overlay", scan.overlay, "External curves copied beside the output")
        ->check(CLI::ExistingFile);

    CampaignArgs campaign;
    auto* campaign_cmd = app.add_subcommand("campaign", "Simulate shot outcomes");
    campaign_cmd->add_option("--out", campaign.out, "Output CSV")->required();
    campaign_cmd->add_option("--seed", campaign.seed, "64-bit seed");
    campaign_cmd->add_option("--mass-ev", campaign.mass_eV, "Dark-matter mass [eV/c^2]");
    campaign_cmd->add_option("--sigma-cm2", campaign.sigma_cm2, "Per-nucleon cross-section [cm^2]");
    campaign_cmd->add_option("--shots", campaign.shots, "Number of shots");

    GravitonArgs grav;
    auto* grav_cmd = app.add_subcommand("graviton", "Gravitational bremsstrahlung exponent");
    grav_cmd->add_option("--mass-ug", grav.mass_ug, "Superposed mass [ug]");
    grav_cmd->add_option("--mass-amu", grav.mass_amu, "Superposed mass [amu]");
    grav_cmd->add_option("--beta", grav.beta, "Speed ratio v/c")->required();
    grav_cmd->add_option("--extent-m", grav.extent_m, "Path extent (metadata)");
    grav_cmd->add_option("--duration-s", grav.duration_s, "Duration (metadata)");

    ShieldArgs shield;
    auto* shield_cmd = app.add_subcommand("shield", "Largest cross-section reaching the target");
    shield_cmd->add_option("--mass-ev", shield.mass_eV, "Dark-matter mass [eV/c^2]")->required();
    shield_cmd->add_option("--altitude-m", shield.altitude_m, "Altitude [m]; default from the target");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try
    {
        if (*rate_cmd)
            return cmd_rate(common, rate);
        if (*scan_cmd)
            return cmd_scan(common, scan);
        if (*campaign_cmd)
            return cmd_campaign(common, campaign);
        if (*grav_cmd)
            return cmd_graviton(grav);
        if (*shield_cmd)
            return cmd_shield(common, shield);
    }
    catch (QuadratureError const& e)
    {
        std::cerr << "dmdeco: " << e.what()
                  << fmt::format(" (partial F = {:.6g}{:+.6g}i, error {:.3g})",
                                 e.partial().real(),
                                 e.partial().imag(),
                                 e.error_estimate())
                  << '\n';
        return exit_numerical;
    }
    catch (NumericalError const& e)
    {
        std::cerr << "dmdeco: " << e.what() << '\n';
        return exit_numerical;
    }
    catch (InvalidInput const& e)
    {
        std::cerr << "dmdeco: " << e.what() << '\n';
        return exit_config;
    }
    return 0;
}
