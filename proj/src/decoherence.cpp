#include "dmdeco/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "dmdeco/error.hpp"
#include "dmdeco/quadrature.hpp"
#include "dmdeco/units.hpp"

namespace dmdeco
{
namespace detail
{
namespace
{
double bessel_j0(double x)
{
    return ::j0(x);
}

double one_minus_sinc(double y)
{
    double const y2 = y * y;
    if (std::abs(y) < 1e-2)
        return y2 / 6 * (1 - y2 / 20 * (1 - y2 / 42));
    return 1 - std::sin(y) / y;
}

double one_minus_j0(double b)
{
    double const b2 = b * b;
    if (std::abs(b) < 1e-2)
        return b2 / 4 * (1 - b2 / 16 * (1 - b2 / 36));
    return 1 - bessel_j0(std::abs(b));
}

double one_minus_cos(double a)
{
    double const s = std::sin(0.5 * a);
    return 2 * s * s;
}
}  // namespace

std::complex<double> decoherence_kernel(double a, double b, double y)
{
    // w = J0(b) sinc(y);  1 - w e^{-ia} = (1 - w) + w (1 - cos a) + i w sin a
    double const omj = b == 0 ? 0.0 : one_minus_j0(b);
    double const oms = y == 0 ? 0.0 : one_minus_sinc(y);
    double const j0 = 1 - omj;
    double const one_minus_w = omj + j0 * oms;
    double const w = 1 - one_minus_w;
    return {one_minus_w + w * one_minus_cos(a), w * std::sin(a)};
}

std::complex<double> expm1_ratio(std::complex<double> z)
{
    if (std::abs(z) < 1e-4)
        return 1.0 - z / 2.0 + z * z / 6.0;
    double const x = z.real();
    double const y = z.imag();
    double const ex = std::exp(-x);
    // 1 - e^{-x} (cos y - i sin y)
    std::complex<double> const num{
        one_minus_cos(y) - std::cos(y) * std::expm1(-x), ex * std::sin(y)};
    return num / z;
}

std::complex<double> sinh_ratio(std::complex<double> q)
{
    if (std::abs(q) < 1e-6)
        return 1.0 + q / 6.0 + q * q / 120.0;
    auto const r = std::sqrt(q);
    return std::sinh(r) / r;
}
}  // namespace detail

namespace
{
// 2 k R below which F^2 = 1 to better than 1e-9
constexpr double coherent_cutoff = 1e-4;
// k |dx| above which the polar integrals are closed over the sphere
constexpr double closed_polar_phase = 1.0;
// Largest momentum-transfer argument q R / hbar at which the coherent term
// is split as (F^2 = 1) - (1 - F^2)
constexpr double remainder_split = 1.0;
// k |dx| up to which a resolved object's coherent term stays on the direct
// (tabulated-direction) quadrature
constexpr double coherent_direct_phase = 30.0;
// Share of the tolerance given to the escape-cap subtraction
constexpr double cap_share = 0.25;

constexpr double roundoff = 64 * std::numeric_limits<double>::epsilon();

struct SeparationFrame
{
    double length;  // |dx|
    double along;   // component along the wind axis
    double across;  // perpendicular component (rotated onto +x)
};

SeparationFrame frame_of(Vec3 dx)
{
    return {norm(dx), dx.z, std::hypot(dx.x, dx.y)};
}

int oscillation_intervals(double phase_span, int cap)
{
    return std::clamp(
        static_cast<int>(phase_span / (2 * std::numbers::pi)) + 1, 1, cap);
}

void check_inputs(HaloModel const& halo,
                  TargetComposition const& comp,
                  ScatteringModel const& model,
                  double m_dm,
                  RateOptions const& opts)
{
    halo.validate();
    comp.validate();
    if (!(m_dm > 0))
        throw InvalidInput("dark matter mass must be positive");
    if (!(model.sigma_n >= 0))
        throw InvalidInput("cross-section must be non-negative");
    if (!(opts.rel_tol > 0) || opts.max_evaluations == 0)
        throw InvalidInput("quadrature tolerance and budget must be positive");
}

Estimate scaled(Estimate e, double s)
{
    return {s * e.value, std::abs(s) * e.error_re, std::abs(s) * e.error_im};
}

Estimate sum(Estimate a, Estimate const& b)
{
    a.value += b.value;
    a.error_re += b.error_re;
    a.error_im += b.error_im;
    return a;
}

std::complex<double> unit_phase(double a)
{
    return {std::cos(a), -std::sin(a)};
}

//---------------------------------------------------------------------------//
/*
 * Polar structure of the lab-frame density at fixed speed v:
 * f(v, mu) = exp(-c - b mu) / N on mu in [-1, mu_max(v)].
 */
class PolarSlice
{
  public:
    PolarSlice(VelocityDistribution const& dist, double v)
        : mu_hi_(dist.mu_max(v)), inv_norm_(1 / dist.normalisation())
    {
        double const v0sq = dist.v0() * dist.v0();
        double const w = dist.wind_speed();
        c_ = (v * v + w * w) / v0sq;
        b_ = 2 * v * w / v0sq;
    }

    bool empty() const { return !(mu_hi_ > -1); }
    bool truncated() const { return mu_hi_ < 1; }
    double mu_hi() const { return mu_hi_; }
    double b() const { return b_; }
    double density(double mu) const
    {
        return std::exp(-c_ - b_ * mu) * inv_norm_;
    }

    //! \int_{-1}^{mu_hi} f(v, mu) exp(-i a mu) dmu
    std::complex<double> phase_moment(double a) const
    {
        std::complex<double> const beta{b_, a};
        double const width = mu_hi_ + 1;
        return std::exp(std::complex<double>{-c_ + b_, a}) * width
               * detail::expm1_ratio(beta * width) * inv_norm_;
    }

    //! (1/2pi) \int dOmega exp(-c + p.n) / N over the whole sphere, where
    //! p = -b z + (imaginary phase) and p_sq = p.p
    std::complex<double> sphere_moment(std::complex<double> p_sq) const
    {
        return 2.0 * std::exp(-c_) * inv_norm_ * detail::sinh_ratio(p_sq);
    }

    //! Bound on |sphere_moment(p.p)| for Re(p.p) <= -b^2
    double plane_wave_bound() const
    {
        return 2 * std::exp(-c_ + std::numbers::sqrt2 * b_) * inv_norm_;
    }

    //! Density mass over the whole sphere, ignoring the escape cut
    double sphere_mass() const { return sphere_moment(b_ * b_).real(); }

    //! Density mass beyond the escape speed
    double cap_mass() const
    {
        if (!truncated())
            return 0;
        return std::max(0.0, sphere_mass() - phase_moment(0.0).real());
    }

  private:
    double mu_hi_;
    double inv_norm_;
    double c_ = 0;
    double b_ = 0;
};

struct FluxQuadrature
{
    VelocityDistribution const& dist;
    SeparationFrame sep;
    double k_per_v;
    RateOptions opts;
    EvaluationBudget budget;

    AdaptiveOptions outer() const
    {
        AdaptiveOptions o;
        o.rel_tol = opts.rel_tol;
        o.initial_intervals = 4;
        return o;
    }
    AdaptiveOptions inner(double phase_span) const
    {
        AdaptiveOptions o;
        o.rel_tol = 0.25 * opts.rel_tol;
        o.max_intervals = 1000;
        o.initial_intervals = oscillation_intervals(phase_span, 16);
        return o;
    }
    double cap_tolerance(PolarSlice const& slice) const
    {
        return cap_share * opts.rel_tol * slice.sphere_mass();
    }
    double cos_theta() const { return sep.along / sep.length; }
    double sin_theta() const { return sep.across / sep.length; }

    /*
     * Density at speed v summed over the circle of directions n with
     * n.dx_hat = t, restricted to the allowed region (mu < mu_hi) or to the
     * escape cap. With mu = t cos(theta) + r cos(phi), r = sin(theta)
     * sqrt(1 - t^2), the circle integral is \int e^{-b r cos(phi)} dphi.
     */
    double projected_density(PolarSlice const& slice, double t, bool cap)
    {
        double const m0 = t * cos_theta();
        double const r = sin_theta() * std::sqrt(std::max(0.0, 1 - t * t));
        double const pre = slice.density(m0);
        double lo = 0;  // cap: phi in [0, phi0]; allowed: [phi0, pi]
        if (!slice.truncated())
        {
            lo = 0;
        }
        else if (r == 0)
        {
            lo = m0 < slice.mu_hi() ? 0 : std::numbers::pi;
        }
        else
        {
            double const c0 = (slice.mu_hi() - m0) / r;
            lo = std::acos(std::clamp(c0, -1.0, 1.0));
        }
        double const a = cap ? 0.0 : lo;
        double const b = cap ? lo : std::numbers::pi;
        if (!(b > a))
            return 0;
        double const br = slice.b() * r;
        if (br == 0)
            return 2 * pre * (b - a);
        AdaptiveOptions o;
        o.rel_tol = 1e-10;
        auto const e = integrate(
            [br](double phi) { return std::exp(-br * std::cos(phi)); },
            a,
            b,
            o,
            budget);
        return 2 * pre * e.value.real();
    }

    // Values of t where the circle n.dx_hat = t touches the escape boundary
    std::vector<double> direction_breaks(PolarSlice const& slice) const
    {
        std::vector<double> t{-1.0, 1.0};
        if (slice.truncated())
        {
            double const pi = std::numbers::pi;
            double const theta = std::atan2(sin_theta(), cos_theta());
            double const alpha = std::acos(std::clamp(slice.mu_hi(), -1.0, 1.0));
            for (double tau :
                 {std::abs(theta - alpha), theta + alpha, 2 * pi - theta - alpha})
            {
                if (tau > 0 && tau < pi)
                    t.push_back(std::cos(tau));
            }
        }
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
        return t;
    }

    /*
     * (1/2pi) \int dOmega f(v, n) h(n.dx_hat) over the allowed directions or
     * over the escape cap, as a t integral of the projected density.
     */
    template<class H>
    Estimate over_directions(PolarSlice const& slice,
                             bool cap,
                             AdaptiveOptions opts_t,
                             H&& h)
    {
        auto const breaks = direction_breaks(slice);
        opts_t.abs_tol /= static_cast<double>(breaks.size() - 1);
        double const intervals = opts_t.initial_intervals;
        Estimate total;
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        {
            auto o = opts_t;
            o.initial_intervals = std::max(
                1,
                static_cast<int>(intervals * (breaks[i + 1] - breaks[i]) / 2)
                    + 1);
            o.initial_intervals = std::min(o.initial_intervals, 16);
            total = sum(total,
                        integrate(
                            [&](double t) -> Estimate {
                                double const rho
                                    = projected_density(slice, t, cap);
                                if (rho == 0)
                                    return {};
                                return scaled(detail::as_estimate(h(t)),
                                              rho * 0.5 * std::numbers::inv_pi);
                            },
                            breaks[i],
                            breaks[i + 1],
                            o,
                            budget));
        }
        return total;
    }

    /*
     * Projected density over the allowed directions as a fixed rule in t,
     * weights including the 1/2pi of over_directions; the kinks sit on
     * segment ends.
     */
    WeightedNodes direction_rule(PolarSlice const& slice, double phase_span)
    {
        auto const breaks = direction_breaks(slice);
        AdaptiveOptions o;
        o.rel_tol = 1e-4 * opts.rel_tol;
        o.max_intervals = 400;
        int const intervals = oscillation_intervals(phase_span, 128);
        WeightedNodes rule;
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        {
            o.initial_intervals = static_cast<int>(
                                      intervals * (breaks[i + 1] - breaks[i]) / 2)
                                  + 1;
            tabulate(
                [&](double t) {
                    return projected_density(slice, t, false) * 0.5
                           * std::numbers::inv_pi;
                },
                breaks[i],
                breaks[i + 1],
                o,
                budget,
                rule);
        }
        return rule;
    }

    // Cap part of over_directions; |h| <= 1, so it is skipped when the
    // density mass there is below the tolerance.
    template<class H>
    Estimate escape_cap(PolarSlice const& slice, double phase, double tol, H&& h)
    {
        double const mass = slice.cap_mass();
        if (mass <= tol)
            return {0.0, mass, mass};
        auto o = inner(2 * phase);
        o.abs_tol = tol;
        return over_directions(slice, true, o, std::forward<H>(h));
    }

    /*
     * \int dmu f(v, mu) <1 - e^{-i k v.dx} sinc(k|dx|)>_phi at speed v: the
     * point-scatterer kernel averaged over the velocity azimuth.
     */
    Estimate point_kernel(PolarSlice const& slice, double v)
    {
        double const k = k_per_v * v;
        double const y = k * sep.length;
        if (sep.across == 0 && std::abs(k * sep.along) > closed_polar_phase)
        {
            double const s = std::sin(y) / y;
            auto const value = slice.phase_moment(0.0)
                               - s * slice.phase_moment(k * sep.along);
            double const err = roundoff * std::abs(slice.phase_moment(0.0));
            return {value, err, err};
        }
        if (y > closed_polar_phase)
            return point_kernel_closed(slice, k);
        return integrate(
            [&](double mu) {
                double const st = std::sqrt(std::max(0.0, 1 - mu * mu));
                return slice.density(mu)
                       * detail::decoherence_kernel(
                           k * mu * sep.along, k * st * sep.across, y);
            },
            -1.0,
            slice.mu_hi(),
            inner(y),
            budget);
    }

    // Whole-sphere plane wave minus its escape cap
    Estimate point_kernel_closed(PolarSlice const& slice, double k)
    {
        double const y = k * sep.length;
        double const s = std::sin(y) / y;
        double const b = slice.b();
        auto const full = slice.sphere_moment(
            std::complex<double>{b * b - y * y, 2 * b * k * sep.along});
        double const tol = cap_tolerance(slice)
                           / std::max(std::abs(s), 1e-300);
        // Over the wind azimuth the plane wave averages to a J0 factor
        Estimate cap{0.0, slice.cap_mass(), slice.cap_mass()};
        if (cap.error_re > tol)
        {
            auto o = inner(y * (1 - slice.mu_hi()));
            o.abs_tol = tol;
            cap = integrate(
                [&](double mu) {
                    double const st = std::sqrt(std::max(0.0, 1 - mu * mu));
                    return slice.density(mu)
                           * detail::bessel_j0(k * st * sep.across)
                           * unit_phase(k * mu * sep.along);
                },
                slice.mu_hi(),
                1.0,
                o,
                budget);
        }
        double const m_d = slice.phase_moment(0.0).real();
        double const round = roundoff * slice.sphere_mass();
        return {m_d - s * (full - cap.value),
                std::abs(s) * cap.error_re + round,
                std::abs(s) * cap.error_im + round};
    }

    //! n 2 pi \int dv v^3 g(v, slice), split at the kink of the support
    template<class G>
    RateResult speed_integral(double density, G&& g)
    {
        auto integrand = [&](double v) -> Estimate {
            PolarSlice const slice(dist, v);
            if (slice.empty())
                return {};
            return scaled(g(v, slice), v * v * v);
        };
        double const vmax = dist.max_speed();
        double const kink = dist.v_esc() - dist.wind_speed();
        Estimate total;
        if (kink > 0 && kink < vmax)
        {
            total = sum(integrate(integrand, 0.0, kink, outer(), budget),
                        integrate(integrand, kink, vmax, outer(), budget));
        }
        else
        {
            total = integrate(integrand, 0.0, vmax, outer(), budget);
        }
        total = scaled(total, 2 * std::numbers::pi * density);

        RateResult result{total.value,
                          total.error(),
                          total.error_re,
                          total.error_im,
                          budget.used()};
        if (!converged(total, outer()))
        {
            throw QuadratureError(
                fmt::format("rate quadrature did not converge ({} of {} "
                            "evaluations; estimate {:.6e}{:+.6e}i +- {:.3e} "
                            "1/s)",
                            budget.used(),
                            budget.limit(),
                            result.F.real(),
                            result.F.imag(),
                            result.quadrature_error),
                result.F,
                result.quadrature_error,
                result.evaluations);
        }
        return result;
    }
};
}  // namespace

Vec3 separation_vector(double length, double angle_from_wind)
{
    return {length * std::sin(angle_from_wind),
            0.0,
            length * std::cos(angle_from_wind)};
}

RateResult rate_pointlike(HaloModel const& halo,
                          WindState const& wind,
                          ScatteringModel const& model,
                          TargetComposition const& comp,
                          double m_dm,
                          Vec3 dx,
                          RateOptions const& opts)
{
    check_inputs(halo, comp, model, m_dm, opts);
    auto const sep = frame_of(dx);
    if (sep.length == 0)
        return {};

    VelocityDistribution const dist(halo, wind);
    double const sigma = pointlike_cross_section(model, comp);
    FluxQuadrature quad{dist,
                        sep,
                        m_dm / constants::hbar,
                        opts,
                        EvaluationBudget(opts.max_evaluations)};
    return quad.speed_integral(
        number_density(halo, m_dm), [&](double v, PolarSlice const& slice) {
            return scaled(quad.point_kernel(slice, v), sigma);
        });
}

RateResult rate_extended(HaloModel const& halo,
                         WindState const& wind,
                         ScatteringModel const& model,
                         TargetComposition const& comp,
                         double m_dm,
                         Vec3 dx,
                         RateOptions const& opts)
{
    check_inputs(halo, comp, model, m_dm, opts);
    auto const sep = frame_of(dx);
    if (sep.length == 0)
        return {};

    VelocityDistribution const dist(halo, wind);
    double const n = comp.nucleus_count;
    double const a2 = comp.nucleons_per_nucleus * comp.nucleons_per_nucleus;
    double const sigma_incoherent = model.sigma_n * a2 * n;
    double const sigma_coherent = model.sigma_n * a2 * n * (n - 1);
    double const radius = comp.radius;
    FluxQuadrature quad{dist,
                        sep,
                        m_dm / constants::hbar,
                        opts,
                        EvaluationBudget(opts.max_evaluations)};

    // s = sqrt(1 - cos theta') about the incoming direction; the momentum
    // transfer is sqrt(2) k s and the outgoing azimuth gives a J0 factor.

    // w(s) = 2 s F^2(kr s) integrated over [0, upper]
    auto weight_below = [](double kr, double upper) {
        return 2 * form_factor_sq_moment(kr * upper) / (kr * kr);
    };

    // Small phase: the kernel is smooth in the projection t = n.dx_hat of
    // the incoming direction, so the density is tabulated once per speed and
    // the s integral sums over that rule.
    auto coherent_direct = [&](double k, PolarSlice const& slice) {
        double const kd = k * sep.length;
        // Two points per radian of the largest t phase, 2 k |dx|
        auto const rule = quad.direction_rule(slice, 4 * std::numbers::pi * kd);
        double const kr = std::numbers::sqrt2 * k * radius;
        std::vector<double> along(rule.x.size());
        std::vector<double> across(rule.x.size());
        for (std::size_t i = 0; i < rule.x.size(); ++i)
        {
            double const t = rule.x[i];
            along[i] = kd * t;
            across[i] = kd * std::sqrt(std::max(0.0, 1 - t * t));
        }
        auto s_opts = quad.inner(2 * k * std::max(radius, sep.length));
        s_opts.initial_intervals = std::min(s_opts.initial_intervals, 16);
        auto e = integrate(
            [&](double s) -> Estimate {
                double const ff = form_factor_sphere(kr * s);
                if (ff == 0)
                    return {};
                double const s2 = s * s;
                double const sin_t = s * std::sqrt(std::max(0.0, 2 - s2));
                std::complex<double> acc = 0;
                std::complex<double> acc_gauss = 0;
                for (std::size_t i = 0; i < rule.x.size(); ++i)
                {
                    auto const kern = detail::decoherence_kernel(
                        s2 * along[i], sin_t * across[i], 0.0);
                    acc += rule.w[i] * kern;
                    acc_gauss += rule.w_gauss[i] * kern;
                }
                double const w = 2 * s * ff * ff;
                auto const diff = acc - acc_gauss;
                return {w * acc,
                        w * std::abs(diff.real()),
                        w * std::abs(diff.imag())};
            },
            0.0,
            std::numbers::sqrt2,
            s_opts,
            quad.budget);
        return scaled(e, 0.5 * sigma_coherent);
    };

    // With F^2 <= 9 (1 + x)^2 / x^6: X where \int_X^inf x F^2 dx / kr^2
    // (or \int_X^inf F^2 dx / kr with linear = true) drops below target
    auto tail_cutoff = [](double kr, double target, bool linear) {
        double const c = linear ? 9 * (0.2 + 0.5 + 1.0 / 3) / kr
                                : 9 * (0.25 + 2.0 / 3 + 0.5) / (kr * kr);
        double const x = linear ? std::cbrt(c / target) : std::sqrt(c / target);
        return std::max(1.0, x) / kr;
    };

    // Large phase: for each s the incoming direction is integrated over the
    // sphere in closed form, the escape cap by quadrature. With the J0
    // written as an average of plane waves e^{i B e(psi).n}, e(psi) _|_ dx,
    // each term is a plane wave in n. The sphere term falls off as
    // 1 / (k |dx| s), so the s range is cut where F^2 makes the rest
    // negligible. With remainder = true the weight is 2 s (1 - F^2) instead,
    // over the whole s range; errors stay budgeted against the F^2 weight.
    auto coherent_closed = [&](double k, PolarSlice const& slice, bool remainder) {
        double const b = slice.b();
        double const kd = k * sep.length;
        double const kr = std::numbers::sqrt2 * k * radius;
        double const ct = quad.cos_theta();
        double const st = quad.sin_theta();
        double const m_d = slice.phase_moment(0.0).real();
        double const tol = quad.cap_tolerance(slice);
        double const round = roundoff * slice.sphere_mass();
        double const top = std::numbers::sqrt2;
        double const ff_weight = weight_below(kr, top);
        double const weight = remainder ? 2 - ff_weight : ff_weight;
        auto ff2 = [&](double s) {
            double const ff = form_factor_sphere(kr * s);
            return remainder ? 1 - ff * ff : ff * ff;
        };
        AdaptiveOptions const psi_opts = quad.inner(0);

        // Errors are budgeted against the untruncated flux at this speed
        double const s_tol
            = 0.25 * opts.rel_tol * ff_weight * slice.sphere_mass();
        double const bound = slice.plane_wave_bound() / kd;
        double const s_cut
            = remainder
                  ? top
                  : std::min(top,
                             std::max(b / kd,
                                      tail_cutoff(kr, 0.25 * s_tol / bound, true)));
        double const s_tail
            = s_cut < top
                  ? bound * 2 * 9 * (0.2 + 0.5 + 1.0 / 3)
                        / std::pow(kr * s_cut, 3) / kr
                  : 0.0;
        auto s_opts = quad.inner(2 * kd * s_cut * s_cut);
        s_opts.max_intervals = 4000;
        s_opts.abs_tol = 0.75 * s_tol;

        auto const overlap = integrate(
            [&](double s) -> Estimate {
                double const w = 2 * s * ff2(s);
                if (w == 0)
                    return {};
                double const a = kd * s * s;
                double const bb = kd * s * std::sqrt(std::max(0.0, 2 - s * s));
                double const base = b * b - a * a - bb * bb;
                if (st == 0)
                {
                    return scaled(
                        Estimate{slice.sphere_moment({base, 2 * b * a * ct}),
                                 round,
                                 round},
                        w);
                }
                auto const full = integrate(
                    [&](double psi) {
                        return slice.sphere_moment(
                            {base, 2 * b * (a * ct + bb * st * std::cos(psi))});
                    },
                    0.0,
                    std::numbers::pi,
                    psi_opts,
                    quad.budget);
                return scaled(full, w * std::numbers::inv_pi);
            },
            0.0,
            s_cut,
            s_opts,
            quad.budget);
        Estimate const sphere{weight * m_d - overlap.value,
                              overlap.error_re + s_tail + round,
                              overlap.error_im + s_tail + round};

        // Escape cap, added back. After the s integral the kernel is smooth
        // in the incoming direction (phases k |dx| s^2 with s <~ 1 / kR), so
        // s goes innermost here.
        double const cap_mass = slice.cap_mass();
        double const cap_s_tol
            = 0.5 * tol * ff_weight / std::max(cap_mass, tol);
        double const cap_cut
            = remainder ? top
                        : std::min(top, tail_cutoff(kr, 0.25 * cap_s_tol, false));
        double const cap_tail
            = remainder ? 0.0 : weight - weight_below(kr, cap_cut);
        auto cap_s_opts = quad.inner(2 * kd * cap_cut * cap_cut);
        cap_s_opts.max_intervals = 4000;
        cap_s_opts.abs_tol = 0.75 * cap_s_tol;
        auto const cap = quad.escape_cap(
            slice,
            kd * (remainder ? 2.0 : std::min(2.0, 8 / (kr * kr))),
            tol,
            [&](double t) {
                double const rt = std::sqrt(std::max(0.0, 1 - t * t));
                auto e = integrate(
                    [&](double s) {
                        double const a = kd * s * s;
                        double const bb
                            = kd * s * std::sqrt(std::max(0.0, 2 - s * s));
                        return 2 * s * ff2(s) * detail::bessel_j0(bb * rt)
                               * unit_phase(a * t);
                    },
                    0.0,
                    cap_cut,
                    cap_s_opts,
                    quad.budget);
                e.error_re += cap_tail;
                e.error_im += cap_tail;
                return scaled(e, 1 / ff_weight);
            });
        auto const e = sum(sphere, scaled(cap, ff_weight));
        return scaled(e, 0.5 * sigma_coherent);
    };

    auto g = [&](double v, PolarSlice const& slice) -> Estimate {
        double const k = quad.k_per_v * v;
        if (sigma_coherent == 0 || 2 * k * radius <= coherent_cutoff)
        {
            return scaled(quad.point_kernel(slice, v),
                          sigma_incoherent + sigma_coherent);
        }
        auto const incoherent
            = scaled(quad.point_kernel(slice, v), sigma_incoherent);
        double const kd = k * sep.length;
        if (2 * k * radius < remainder_split)
        {
            if (kd <= closed_polar_phase)
                return sum(incoherent, coherent_direct(k, slice));
            // Nearly unresolved object: F^2 = 1 in closed form, minus a small
            // remainder
            auto const point
                = scaled(quad.point_kernel(slice, v), sigma_coherent);
            auto const rest = coherent_closed(k, slice, true);
            return sum(sum(incoherent, point), scaled(rest, -1));
        }
        if (kd <= coherent_direct_phase)
            return sum(incoherent, coherent_direct(k, slice));
        return sum(incoherent, coherent_closed(k, slice, false));
    };
    return quad.speed_integral(number_density(halo, m_dm), g);
}

RateResult decoherence_rate(HaloModel const& halo,
                            WindState const& wind,
                            ScatteringModel const& model,
                            TargetComposition const& comp,
                            double m_dm,
                            Vec3 dx,
                            RateOptions const& opts)
{
    if (model.mode == ScatterMode::pointlike)
        return rate_pointlike(halo, wind, model, comp, m_dm, dx, opts);
    return rate_extended(halo, wind, model, comp, m_dm, dx, opts);
}

RateResult total_scattering_rate(HaloModel const& halo,
                                 WindState const& wind,
                                 ScatteringModel const& model,
                                 TargetComposition const& comp,
                                 double m_dm,
                                 RateOptions const& opts)
{
    check_inputs(halo, comp, model, m_dm, opts);
    VelocityDistribution const dist(halo, wind);
    FluxQuadrature quad{dist,
                        frame_of({}),
                        m_dm / constants::hbar,
                        opts,
                        EvaluationBudget(opts.max_evaluations)};
    return quad.speed_integral(
        number_density(halo, m_dm),
        [&](double v, PolarSlice const& slice) -> Estimate {
            auto const xs = total_cross_section(model, comp, v, m_dm);
            double const flux = slice.phase_moment(0.0).real();
            return {xs.value * flux, xs.error * flux, 0.0};
        });
}

DecoherenceExponent exponent(RateResult const& rate, double exposure)
{
    if (!(exposure >= 0))
        throw InvalidInput("exposure time must be non-negative");
    DecoherenceExponent result{rate.F.real() * exposure,
                               rate.F.imag() * exposure};
    if (result.re < 0)
    {
        if (-result.re <= rate.error_re * exposure)
        {
            result.re = 0;
        }
        else
        {
            throw NumericalError(fmt::format(
                "negative decoherence rate Re F = {:.6e} 1/s beyond its "
                "error bar {:.3e} 1/s",
                rate.F.real(),
                rate.error_re));
        }
    }
    return result;
}

AnisotropyResult anisotropy_ratio(HaloModel const& halo,
                                  WindState const& wind,
                                  ScatteringModel const& model,
                                  TargetComposition const& comp,
                                  double m_dm,
                                  double separation,
                                  RateOptions const& opts)
{
    if (!(separation > 0))
        throw InvalidInput("anisotropy needs a positive separation");
    AnisotropyResult result;
    result.parallel = decoherence_rate(
        halo, wind, model, comp, m_dm, Vec3{0, 0, separation}, opts);
    result.perpendicular = decoherence_rate(
        halo, wind, model, comp, m_dm, Vec3{separation, 0, 0}, opts);
    double const par = result.parallel.F.real();
    double const perp = result.perpendicular.F.real();
    if (!(perp > 0))
        throw NumericalError("perpendicular decoherence rate vanishes");
    result.ratio = par / perp;
    result.error = std::abs(result.ratio)
                   * std::hypot(result.parallel.error_re / par,
                                result.perpendicular.error_re / perp);
    return result;
}
}  // namespace dmdeco
