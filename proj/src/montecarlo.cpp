#include "dmdeco/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

#include <boost/math/distributions/binomial.hpp>
#include <fmt/format.h>

#include "dmdeco/error.hpp"
#include "dmdeco/random.hpp"
#include "dmdeco/units.hpp"

namespace dmdeco
{
namespace
{
// Fixed partition of the samples; sums are combined in chunk order
constexpr std::uint64_t mc_chunks = 256;
constexpr double min_acceptance = 1e-4;

// Run body(i) for i in [0, n) on up to `threads` workers
template<class F>
void parallel_for(std::uint64_t n, unsigned threads, F&& body)
{
    std::atomic<std::uint64_t> next{0};
    std::mutex mutex;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::uint64_t i = next++; i < n; i = next++)
        {
            try
            {
                body(i);
            }
            catch (...)
            {
                std::lock_guard lock(mutex);
                if (!failure)
                    failure = std::current_exception();
                next = n;
                return;
            }
        }
    };
    auto const count = static_cast<unsigned>(
        std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, n)));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < count; ++t)
            pool.emplace_back(worker);
        worker();
    }
    if (failure)
        std::rethrow_exception(failure);
}

struct Integrand
{
    double n_dm;
    double k_per_v;
    double sigma_incoherent;
    double sigma_coherent;
    double radius;
    bool form_factor;
    Vec3 dx;
    double length;

    // n_dm |v| times the angular kernel, for one outgoing direction
    std::complex<double> operator()(Vec3 v, Vec3 n_out) const
    {
        double const speed = norm(v);
        double const k = k_per_v * speed;
        Vec3 const n_in = (1 / speed) * v;
        double const y = k * length;
        double const sinc = y == 0 ? 1.0 : std::sin(y) / y;
        double const a = k * dot(n_in, dx);
        std::complex<double> const in_phase{std::cos(a), -std::sin(a)};
        auto const incoherent = sigma_incoherent * (1.0 - in_phase * sinc);

        std::complex<double> coherent;
        if (form_factor)
        {
            Vec3 const dn = n_out - n_in;
            double const ff = form_factor_sphere(k * radius * norm(dn));
            double const b = k * dot(dn, dx);
            coherent = sigma_coherent * ff * ff
                       * (1.0 - std::complex<double>{std::cos(b), std::sin(b)});
        }
        else
        {
            coherent = sigma_coherent * (1.0 - in_phase * sinc);
        }
        return n_dm * speed * (incoherent + coherent);
    }
};

Vec3 uniform_direction(PhiloxStream& rng)
{
    double const mu = 2 * rng.uniform() - 1;
    double const phi = 2 * std::numbers::pi * rng.uniform();
    double const st = std::sqrt(std::max(0.0, 1 - mu * mu));
    return {st * std::cos(phi), st * std::sin(phi), mu};
}

struct Sums
{
    double re = 0;
    double im = 0;
    double re2 = 0;
    double im2 = 0;
    std::uint64_t attempts = 0;
};
}  // namespace

McEstimate mc_rate(HaloModel const& halo,
                   WindState const& wind,
                   ScatteringModel const& model,
                   TargetComposition const& comp,
                   double m_dm,
                   Vec3 dx,
                   std::uint64_t samples,
                   std::uint64_t seed,
                   unsigned threads)
{
    halo.validate();
    comp.validate();
    if (!(m_dm > 0))
        throw InvalidInput("dark-matter mass must be positive");
    if (samples < 1000)
        throw InvalidInput("at least 1000 samples are required");

    double const n = comp.nucleus_count;
    double const a2 = comp.nucleons_per_nucleus * comp.nucleons_per_nucleus;
    bool const pointlike = model.mode == ScatterMode::pointlike;
    Integrand const f{number_density(halo, m_dm),
                      m_dm / constants::hbar,
                      pointlike ? 0.0 : model.sigma_n * a2 * n,
                      pointlike ? pointlike_cross_section(model, comp)
                                : model.sigma_n * a2 * n * (n - 1),
                      comp.radius,
                      !pointlike,
                      dx,
                      norm(dx)};

    double const sd = halo.v0 / std::numbers::sqrt2;
    double const vesc2 = halo.v_esc * halo.v_esc;
    std::uint64_t const chunks = std::min(mc_chunks, samples);
    std::vector<Sums> partial(chunks);
    std::atomic<bool> starved{false};

    parallel_for(chunks, threads, [&](std::uint64_t c) {
        std::uint64_t const begin = samples * c / chunks;
        std::uint64_t const end = samples * (c + 1) / chunks;
        Sums s;
        for (std::uint64_t i = begin; i < end && !starved; ++i)
        {
            PhiloxStream rng(seed, i);
            Vec3 u;
            std::uint64_t tries = 0;
            do
            {
                ++tries;
                if (static_cast<double>(tries) > 1 / min_acceptance)
                {
                    starved = true;
                    break;
                }
                u = Vec3{sd * rng.normal(), sd * rng.normal(), sd * rng.normal()};
            } while (dot(u, u) >= vesc2);
            if (starved)
                break;
            s.attempts += tries;
            Vec3 const v = u - wind.v_lab;
            if (dot(v, v) == 0)
                continue;
            auto const x = f(v, uniform_direction(rng));
            s.re += x.real();
            s.im += x.imag();
            s.re2 += x.real() * x.real();
            s.im2 += x.imag() * x.imag();
        }
        partial[c] = s;
    });

    Sums total;
    for (auto const& s : partial)
    {
        total.re += s.re;
        total.im += s.im;
        total.re2 += s.re2;
        total.im2 += s.im2;
        total.attempts += s.attempts;
    }
    auto const ns = static_cast<double>(samples);
    if (starved || ns / static_cast<double>(total.attempts) < min_acceptance)
    {
        throw NumericalError(fmt::format(
            "velocity rejection efficiency below {} (v_esc {} m/s, v0 {} m/s)",
            min_acceptance,
            halo.v_esc,
            halo.v0));
    }
    McEstimate est;
    est.samples = samples;
    est.attempts = total.attempts;
    double const mean_re = total.re / ns;
    double const mean_im = total.im / ns;
    est.F = {mean_re, mean_im};
    auto se = [&](double sum2, double mean) {
        double const var = std::max(0.0, sum2 / ns - mean * mean) * ns / (ns - 1);
        return std::sqrt(var / ns);
    };
    est.se_re = se(total.re2, mean_re);
    est.se_im = se(total.im2, mean_im);
    return est;
}

//---------------------------------------------------------------------------//
Interval clopper_pearson(std::uint64_t successes,
                         std::uint64_t trials,
                         double confidence)
{
    using boost::math::binomial_distribution;
    if (trials == 0 || successes > trials)
        throw InvalidInput("need 0 <= successes <= trials, trials > 0");
    if (!(confidence > 0 && confidence < 1))
        throw InvalidInput("confidence must lie in (0, 1)");
    double const alpha = (1 - confidence) / 2;
    auto const n = static_cast<double>(trials);
    auto const k = static_cast<double>(successes);
    return {
        binomial_distribution<>::find_lower_bound_on_p(
            n, k, alpha, binomial_distribution<>::clopper_pearson_exact_interval),
        binomial_distribution<>::find_upper_bound_on_p(
            n, k, alpha, binomial_distribution<>::clopper_pearson_exact_interval)};
}

CountInterval
binomial_acceptance(std::uint64_t trials, double p, double confidence)
{
    if (trials == 0)
        throw InvalidInput("trials must be positive");
    if (!(p >= 0 && p <= 1))
        throw InvalidInput("probability must lie in [0, 1]");
    if (!(confidence > 0 && confidence < 1))
        throw InvalidInput("confidence must lie in (0, 1)");
    if (p == 0)
        return {0, 0};
    if (p == 1)
        return {trials, trials};
    boost::math::binomial_distribution<> const dist(static_cast<double>(trials), p);
    double const alpha = (1 - confidence) / 2;
    // Default policy rounds discrete quantiles outwards
    double const lo = boost::math::quantile(dist, alpha);
    double const hi = boost::math::quantile(boost::math::complement(dist, alpha));
    return {static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi)};
}

//---------------------------------------------------------------------------//
CampaignResult simulate_campaign(CampaignInputs const& in, unsigned threads)
{
    in.target.validate();
    in.halo.validate();
    if (in.shots < 1)
        throw InvalidInput("a campaign needs at least one shot");
    if (!(in.window_days >= 0) || !std::isfinite(in.start_day))
        throw InvalidInput("campaign window must be non-negative");
    if (!(in.gamma_background >= 0))
        throw InvalidInput("gamma_background must be non-negative");
    if (!(in.m_dm > 0))
        throw InvalidInput("dark-matter mass must be positive");
    if (!(in.model.sigma_n >= 0))
        throw InvalidInput("cross-section must be non-negative");

    CampaignResult result;
    result.seed = in.seed;
    result.records.resize(in.shots);
    auto const n = static_cast<double>(in.shots);

    // Distinct rounded wind speeds, evaluated once each
    std::map<long, std::size_t> speed_index;
    std::vector<long> keys;
    std::vector<long> shot_key(in.shots);
    for (std::uint64_t i = 0; i < in.shots; ++i)
    {
        double const day = in.start_day + in.window_days * static_cast<double>(i) / n;
        result.records[i].shot = i;
        result.records[i].day = day;
        double const speed = wind_velocity(in.halo, day).speed();
        long const key = std::lround(speed / campaign_speed_step);
        shot_key[i] = key;
        if (speed_index.emplace(key, 0).second)
            keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t j = 0; j < keys.size(); ++j)
        speed_index[keys[j]] = j;

    std::vector<std::complex<double>> rates(keys.size());
    std::vector<char> unconverged(keys.size(), 0);
    bool const silent = in.model.sigma_n == 0;
    parallel_for(keys.size(), silent ? 1 : threads, [&](std::uint64_t j) {
        if (silent)
            return;
        WindState const wind{
            Vec3{0, 0, static_cast<double>(keys[j]) * campaign_speed_step}, 0};
        try
        {
            rates[j] = decoherence_rate(in.halo,
                                        wind,
                                        in.model,
                                        in.target.composition(),
                                        in.m_dm,
                                        in.target.separation_vector(),
                                        in.rate)
                           .F;
        }
        catch (QuadratureError const& e)
        {
            if (!(e.error_estimate() <= in.accept_partial * std::abs(e.partial())))
                throw;
            rates[j] = e.partial();
            unconverged[j] = 1;
        }
    });

    parallel_for(in.shots, threads, [&](std::uint64_t i) {
        auto& r = result.records[i];
        auto const F = rates[speed_index.at(shot_key[i])];
        DecoherenceExponent const g{
            std::max(0.0, F.real()) * in.target.exposure + in.gamma_background,
            F.imag() * in.target.exposure};
        r.gamma = gamma_from_exponent(g);
        PhiloxStream rng(in.seed, i);
        r.dim = rng.uniform() < dim_port_probability(r.gamma);
    });

    auto& s = result.summary;
    s.shots = in.shots;
    for (auto const& r : result.records)
        s.dim += r.dim ? 1 : 0;
    s.dim_fraction = static_cast<double>(s.dim) / n;
    s.ci99 = clopper_pearson(s.dim, s.shots, 0.99);
    s.rate_evaluations = silent ? 0 : keys.size();
    for (char u : unconverged)
        s.unconverged_rates += u;
    return result;
}

std::string campaign_csv(CampaignResult const& result)
{
    std::string out = "shot,day,gamma_re,gamma_im,outcome\n";
    for (auto const& r : result.records)
    {
        out += fmt::format("{},{},{},{},{}\n",
                           r.shot,
                           r.day,
                           r.gamma.real(),
                           r.gamma.imag(),
                           r.dim ? "dim" : "bright");
    }
    return out;
}
}  // namespace dmdeco
