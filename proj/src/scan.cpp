#include "dmdeco/scan.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "dmdeco/error.hpp"
#include "dmdeco/units.hpp"

namespace dmdeco
{
namespace
{
constexpr double nan = std::numeric_limits<double>::quiet_NaN();
}

std::string flags_to_string(unsigned flags)
{
    static constexpr std::pair<unsigned, char const*> names[] = {
        {flag_insensitive, "insensitive"},
        {flag_band_empty, "band_empty"},
        {flag_unconverged, "unconverged"},
        {flag_quadrature_failed, "quadrature_failed"},
    };
    std::string out;
    for (auto const& [bit, name] : names)
    {
        if (flags & bit)
        {
            if (!out.empty())
                out += '|';
            out += name;
        }
    }
    return out;
}

std::vector<double>
log_mass_grid(double min_eV, double max_eV, int points_per_decade)
{
    if (!(min_eV > 0 && max_eV >= min_eV && std::isfinite(max_eV)))
        throw InvalidInput("mass grid needs 0 < min <= max");
    if (points_per_decade < 1)
        throw InvalidInput("points per decade must be at least 1");
    double const lo = std::log10(min_eV);
    double const hi = std::log10(max_eV);
    auto const n = static_cast<long>(std::lround((hi - lo) * points_per_decade));
    if (n == 0)
        return {min_eV};
    std::vector<double> grid(n + 1);
    for (long i = 0; i <= n; ++i)
        grid[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / n);
    grid.front() = min_eV;
    grid.back() = max_eV;
    return grid;
}

double campaign_exposure(TargetSpec const& target, bool per_campaign)
{
    return target.exposure
           * (per_campaign ? static_cast<double>(target.shots) : 1.0);
}

FloorResult sensitivity_floor(TargetSpec const& target,
                              HaloModel const& halo,
                              WindState const& wind,
                              ScatteringModel const& model,
                              double m_dm,
                              FloorOptions const& opts)
{
    target.validate();
    if (!(model.sigma_n > 0))
        throw InvalidInput("reference cross-section must be positive");
    FloorResult result;
    try
    {
        result.rate = decoherence_rate(halo,
                                       wind,
                                       model,
                                       target.composition(),
                                       m_dm,
                                       target.separation_vector(),
                                       opts.rate);
    }
    catch (QuadratureError const& e)
    {
        double const magnitude = std::abs(e.partial().real());
        if (!(e.error_estimate() <= opts.accept_partial * magnitude))
            throw;
        result.rate.F = e.partial();
        result.rate.quadrature_error = e.error_estimate();
        result.rate.evaluations = e.evaluations();
        result.flags |= flag_unconverged;
    }
    double const exposure = campaign_exposure(target, opts.per_campaign);
    result.re_gamma_ref = result.rate.F.real() * exposure;
    if (!(result.re_gamma_ref > 0))
    {
        result.re_gamma_ref = 0;
        result.sigma = nan;
        result.flags |= flag_insensitive;
        return result;
    }
    result.sigma = model.sigma_n / result.re_gamma_ref;
    return result;
}

double bisection_floor(std::function<double(double)> const& re_gamma,
                       double lo,
                       double hi,
                       double rel_tol)
{
    if (!(lo > 0 && hi > lo))
        throw InvalidInput("bisection bracket needs 0 < lo < hi");
    double g_lo = re_gamma(lo) - 1;
    double const g_hi = re_gamma(hi) - 1;
    if (!(g_lo <= 0 && g_hi >= 0))
        throw NumericalError("bisection bracket does not straddle Re Gamma = 1");
    double a = std::log(lo);
    double b = std::log(hi);
    for (int iter = 0; iter < 200 && b - a > rel_tol; ++iter)
    {
        double const mid = 0.5 * (a + b);
        double const g = re_gamma(std::exp(mid)) - 1;
        if ((g < 0) == (g_lo < 0))
        {
            a = mid;
            g_lo = g;
        }
        else
        {
            b = mid;
        }
    }
    return std::exp(0.5 * (a + b));
}

namespace
{
ScanPoint scan_one(ScanInputs const& in, double mass_eV)
{
    ScanPoint p;
    p.mass_eV = mass_eV;
    double const m_dm = units::mass_from_ev(mass_eV);
    p.sigma_ceiling_cm2
        = max_visible_sigma(in.atmosphere, in.shield, m_dm, in.target.altitude)
          / units::cm2;
    try
    {
        auto const f
            = sensitivity_floor(in.target, in.halo, in.wind, in.model, m_dm, in.floor);
        p.flags = f.flags;
        p.sigma_floor_cm2 = f.sigma / units::cm2;
    }
    catch (NumericalError const& e)
    {
        p.flags = flag_quadrature_failed;
        p.sigma_floor_cm2 = nan;
        p.message = e.what();
    }
    if (!(p.sigma_floor_cm2 <= p.sigma_ceiling_cm2))
        p.flags |= flag_band_empty;
    return p;
}
}  // namespace

ExclusionGrid exclusion_scan(ScanInputs const& in,
                             std::vector<double> const& masses_eV,
                             unsigned threads,
                             ScanProgress const& progress)
{
    in.target.validate();
    in.atmosphere.validate();
    in.shield.validate();
    for (std::size_t i = 0; i < masses_eV.size(); ++i)
    {
        if (!(masses_eV[i] > 0))
            throw InvalidInput("masses must be positive");
        if (i > 0 && !(masses_eV[i] > masses_eV[i - 1]))
            throw InvalidInput("mass grid must increase strictly");
    }

    ExclusionGrid grid;
    grid.points.resize(masses_eV.size());
    std::atomic<std::size_t> next{0};
    std::mutex mutex;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t i = next++; i < masses_eV.size(); i = next++)
        {
            try
            {
                grid.points[i] = scan_one(in, masses_eV[i]);
            }
            catch (...)
            {
                std::lock_guard lock(mutex);
                if (!failure)
                    failure = std::current_exception();
                next = masses_eV.size();
                return;
            }
            if (progress)
            {
                std::lock_guard lock(mutex);
                progress(grid.points[i]);
            }
        }
    };
    unsigned const n = std::max(1u, std::min<unsigned>(threads, masses_eV.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < n; ++t)
            pool.emplace_back(worker);
        worker();
    }
    if (failure)
        std::rethrow_exception(failure);
    return grid;
}

std::string scan_csv(ExclusionGrid const& grid)
{
    std::string out = "mass_eV,sigma_floor_cm2,sigma_ceiling_cm2,flags\n";
    for (auto const& p : grid.points)
    {
        out += fmt::format("{},{},{},{}\n",
                           p.mass_eV,
                           p.sigma_floor_cm2,
                           p.sigma_ceiling_cm2,
                           flags_to_string(p.flags));
    }
    return out;
}
}  // namespace dmdeco
