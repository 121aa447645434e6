#include "dmdeco/shielding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "dmdeco/error.hpp"
#include "dmdeco/units.hpp"
#include "embedded_data.hpp"

namespace dmdeco
{
namespace
{
double parse_number(std::string_view field, int line)
{
    // trim
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
        field.remove_prefix(1);
    while (!field.empty()
           && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
        field.remove_suffix(1);
    double value = 0;
    auto const [ptr, ec]
        = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
    {
        throw InvalidInput(fmt::format(
            "atmosphere table line {}: '{}' is not a number", line, field));
    }
    return value;
}
}  // namespace

AtmosphereModel AtmosphereModel::standard()
{
    return from_csv(embedded::atmosphere_csv);
}

AtmosphereModel AtmosphereModel::from_csv(std::string_view text)
{
    AtmosphereModel atm;
    int line_no = 0;
    bool header = true;
    while (!text.empty())
    {
        auto const eol = text.find('\n');
        auto line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{}
                                             : text.substr(eol + 1);
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        if (header)
        {
            header = false;
            if (line.substr(0, 10) != "altitude_m")
            {
                throw InvalidInput(
                    "atmosphere table must start with the header "
                    "'altitude_m,column_g_cm2'");
            }
            continue;
        }
        auto const comma = line.find(',');
        if (comma == std::string_view::npos)
        {
            throw InvalidInput(fmt::format(
                "atmosphere table line {}: expected two columns", line_no));
        }
        double const alt = parse_number(line.substr(0, comma), line_no);
        double const col = parse_number(line.substr(comma + 1), line_no);
        atm.layers.push_back({alt, units::column_from_g_cm2(col)});
    }
    atm.validate();
    return atm;
}

void AtmosphereModel::validate() const
{
    if (layers.size() < 2)
        throw InvalidInput("atmosphere table needs at least two rows");
    if (layers.front().altitude != 0)
        throw InvalidInput("atmosphere table must start at altitude 0");
    double const sea = units::column_to_g_cm2(layers.front().column);
    if (!(sea >= 1000 && sea <= 1060))
    {
        throw InvalidInput(fmt::format(
            "sea-level column {:g} g/cm^2 outside [1000, 1060]", sea));
    }
    for (std::size_t i = 1; i < layers.size(); ++i)
    {
        if (!(layers[i].altitude > layers[i - 1].altitude))
            throw InvalidInput("atmosphere altitudes must increase strictly");
        if (!(layers[i].column < layers[i - 1].column && layers[i].column > 0))
        {
            throw InvalidInput(
                "atmosphere column must be positive and decrease strictly");
        }
    }
    if (!(mean_nucleus_A >= 1))
        throw InvalidInput("mean nucleus mass number must be >= 1");
}

void ShieldCriterion::validate() const
{
    if (!(n_crit > 0))
        throw InvalidInput("shielding n_crit must be positive");
    if (!(mass_exponent >= 0 && mass_exponent <= 1))
        throw InvalidInput("shielding mass exponent must lie in [0, 1]");
    if (!(extra_column >= 0))
        throw InvalidInput("extra shield column must be non-negative");
}

double column_density(AtmosphereModel const& atm, double altitude)
{
    if (!(altitude >= 0))
        throw InvalidInput("altitude must be non-negative");
    auto const& L = atm.layers;
    if (std::isinf(altitude))
        return 0;
    auto const hi = std::upper_bound(
        L.begin(), L.end(), altitude, [](double a, auto const& layer) {
            return a < layer.altitude;
        });
    // Interval [lo, lo + 1] containing the altitude, or the last one
    std::size_t const i = hi == L.end()
                              ? L.size() - 2
                              : static_cast<std::size_t>(hi - L.begin()) - 1;
    double const x0 = L[i].altitude;
    double const x1 = L[i + 1].altitude;
    double const slope = std::log(L[i + 1].column / L[i].column) / (x1 - x0);
    return L[i].column * std::exp(slope * (altitude - x0));
}

double max_visible_sigma(AtmosphereModel const& atm,
                         ShieldCriterion const& crit,
                         double m_dm,
                         double altitude)
{
    if (!(m_dm > 0))
        throw InvalidInput("dark matter mass must be positive");
    crit.validate();
    double const a = atm.mean_nucleus_A;
    double const m_nucleus = a * constants::amu;
    double const column = column_density(atm, altitude) + crit.extra_column;
    double const targets_per_area = column / m_nucleus;
    double const allowed
        = crit.n_crit * std::pow(m_nucleus / m_dm, crit.mass_exponent);
    return allowed / (targets_per_area * a * a);
}

double calibrate_n_crit(AtmosphereModel const& atm, double sigma)
{
    if (!(sigma > 0))
        throw InvalidInput("calibration cross-section must be positive");
    double const a = atm.mean_nucleus_A;
    double const column = column_density(atm, 0.0);
    return column / (a * constants::amu) * sigma * a * a;
}

double reference_sea_level_sigma()
{
    return std::pow(10.0, -28.5) * units::cm2;
}
}  // namespace dmdeco
