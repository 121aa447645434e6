//! \file dmdeco/config.hpp
//! Experiment configuration in boundary units (YAML, strict).
//!
//! Blocks hold exactly what the file holds, so a resolved configuration
//! written with to_yaml parses back to an equal object. Physics structs (SI)
//! are derived from the blocks.
//!
//! Grammar: a YAML mapping with the optional blocks halo, target,
//! scattering, shielding, scan and montecarlo; each block is a mapping of the
//! keys below. Unknown keys are errors.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dmdeco/decoherence.hpp"
#include "dmdeco/halo.hpp"
#include "dmdeco/scattering.hpp"
#include "dmdeco/shielding.hpp"
#include "dmdeco/targets.hpp"

namespace dmdeco
{
struct HaloBlock
{
    double density_GeV_cm3 = 0.3;
    double v0_km_s = 220;
    double v_esc_km_s = 550;
    double v_sun_km_s = 230;
    double orbit_speed_km_s = 29.8;
    double orbit_inclination_deg = 60;
    double peak_day = 152.5;
    //! Epoch of single-shot evaluations; unset means the mean-wind day
    std::optional<double> epoch_day;

    HaloModel model() const;
    WindState wind() const;

    bool operator==(HaloBlock const&) const = default;
};

struct TargetBlock
{
    std::string name;
    std::string material;
    double total_mass_amu = 0;
    double nucleus_A = 1;
    double radius_m = 0;
    double bulk_density_g_cm3 = 0;
    double separation_m = 0;
    std::string orientation = "parallel";
    double angle_deg = 0;
    double exposure_s = 0;
    double altitude_m = 0;
    std::uint64_t shots = 1;
    std::map<std::string, std::string> provenance;

    TargetSpec spec() const;

    bool operator==(TargetBlock const&) const = default;
};

struct ScatteringBlock
{
    double sigma_n_cm2 = 1e-30;
    std::string mode = "extended";

    ScatteringModel model() const;

    bool operator==(ScatteringBlock const&) const = default;
};

struct ShieldingBlock
{
    //! CSV path; empty selects the bundled standard atmosphere
    std::string table;
    double mean_nucleus_A = 14.5;
    double n_crit = 0;  //!< set by default_config() from the calibration
    double mass_exponent = 0;
    double extra_column_g_cm2 = 0;
    double calibration_sigma_cm2 = 0;  //!< sea-level ceiling n_crit matches
    std::string n_crit_provenance;

    //! Table loaded relative to base_dir when the path is relative
    AtmosphereModel atmosphere(std::filesystem::path const& base_dir = {}) const;
    ShieldCriterion criterion() const;

    bool operator==(ShieldingBlock const&) const = default;
};

struct ScanBlock
{
    double mass_min_eV = 1;
    double mass_max_eV = 1e6;
    int points_per_decade = 33;
    double sigma_ref_cm2 = 1e-30;
    //! Re Gamma over shots x T (true) or over one shot (false)
    bool per_campaign = true;
    double rel_tolerance = 1e-4;
    std::uint64_t max_evaluations = 100'000'000;

    RateOptions rate_options() const;

    bool operator==(ScanBlock const&) const = default;
};

struct MonteCarloBlock
{
    std::uint64_t seed = 1;
    double mass_eV = 1e4;
    std::uint64_t shots = 10000;
    double start_day = 0;
    double window_days = 365.25;
    double gamma_background = 0;

    bool operator==(MonteCarloBlock const&) const = default;
};

struct ExperimentConfig
{
    HaloBlock halo;
    TargetBlock target;
    ScatteringBlock scattering;
    ShieldingBlock shielding;
    ScanBlock scan;
    MonteCarloBlock montecarlo;
    //! Directory relative paths in the file are resolved against
    std::filesystem::path base_dir;

    bool operator==(ExperimentConfig const& o) const
    {
        return halo == o.halo && target == o.target
               && scattering == o.scattering && shielding == o.shielding
               && scan == o.scan && montecarlo == o.montecarlo;
    }
};

//! Defaults: standard halo, OTIMA-6 target, calibrated shielding
ExperimentConfig default_config();

//! Parse on top of the defaults; throws ConfigError naming line and field.
//! target.preset selects the base preset before the other target keys.
ExperimentConfig parse_config(std::string_view yaml_text);

//! parse_config on a file; a JSON metadata file written by the tool is
//! accepted and its embedded configuration used
ExperimentConfig load_config(std::filesystem::path const& path);

//! Fully resolved configuration with every field written
std::string to_yaml(ExperimentConfig const& config);

//! Presets from the bundled defaults file, geometry resolved
std::vector<TargetBlock> builtin_target_blocks();

//! Serialise one target block (as it appears under "target:")
std::string to_yaml(TargetBlock const& target);
TargetBlock parse_target_block(std::string_view yaml_text);
}  // namespace dmdeco
