//! \file dmdeco/quadrature.hpp
//! Globally adaptive Gauss-Kronrod (7/15) quadrature for complex integrands.
//!
//! Integrands may return a plain \c double, a \c std::complex<double>, or an
//! \c Estimate; the last form lets nested integrals propagate their own error
//! bars into the enclosing rule. Real and imaginary parts carry separate
//! error estimates: the real part is converged relative to itself, the
//! imaginary part relative to |I|. All evaluations are charged to an
//! \c EvaluationBudget; once it is exhausted no further subdivision happens
//! and the caller can inspect \c EvaluationBudget::exhausted().
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <vector>

namespace dmdeco
{
//! Value with absolute error estimates per component.
struct Estimate
{
    std::complex<double> value{};
    double error_re = 0;
    double error_im = 0;

    double error() const { return std::hypot(error_re, error_im); }
};

//---------------------------------------------------------------------------//
class EvaluationBudget
{
  public:
    explicit EvaluationBudget(std::uint64_t limit) : limit_(limit) {}

    //! Record n evaluations; returns false once the limit has been passed.
    bool charge(std::uint64_t n)
    {
        used_ += n;
        return used_ <= limit_;
    }

    bool exhausted() const { return used_ >= limit_; }
    std::uint64_t used() const { return used_; }
    std::uint64_t limit() const { return limit_; }

  private:
    std::uint64_t limit_;
    std::uint64_t used_ = 0;
};

struct AdaptiveOptions
{
    double rel_tol = 1e-4;
    double abs_tol = 0;
    int max_intervals = 200;
    int initial_intervals = 1;
};

namespace detail
{
// QUADPACK qk15 abscissae and weights
inline constexpr std::array<double, 8> gk15_nodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr std::array<double, 8> gk15_weights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr std::array<double, 4> g7_weights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

template<class T>
Estimate as_estimate(T const& v)
{
    if constexpr (std::is_same_v<T, Estimate>)
        return v;
    else
        return Estimate{std::complex<double>(v), 0.0, 0.0};
}

struct Interval
{
    double a;
    double b;
    Estimate result;
};

// QUADPACK error heuristic for one real component of a 15-point rule
inline double
component_error(std::array<double, 15> const& f, double resk, double resg, double half)
{
    double const reskh = 0.5 * resk;
    double resabs = gk15_weights[7] * std::abs(f[7]);
    double resasc = gk15_weights[7] * std::abs(f[7] - reskh);
    for (int j = 0; j < 7; ++j)
    {
        resabs += gk15_weights[j] * (std::abs(f[j]) + std::abs(f[14 - j]));
        resasc += gk15_weights[j]
                  * (std::abs(f[j] - reskh) + std::abs(f[14 - j] - reskh));
    }
    double const ahalf = std::abs(half);
    resabs *= ahalf;
    resasc *= ahalf;
    double err = std::abs((resk - resg) * half);
    if (resasc != 0 && err != 0)
        err = resasc * std::min(1.0, std::pow(200 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50 * eps))
        err = std::max(50 * eps * resabs, err);
    return err;
}

template<class F>
Interval gk15(F& f, double a, double b, EvaluationBudget& budget)
{
    double const center = 0.5 * (a + b);
    double const half = 0.5 * (b - a);

    std::array<Estimate, 15> fv;
    fv[7] = as_estimate(f(center));
    for (int j = 0; j < 7; ++j)
    {
        double const dx = half * gk15_nodes[j];
        fv[j] = as_estimate(f(center - dx));
        fv[14 - j] = as_estimate(f(center + dx));
    }
    budget.charge(15);

    std::complex<double> resk = gk15_weights[7] * fv[7].value;
    std::complex<double> resg = g7_weights[3] * fv[7].value;
    double inner_re = gk15_weights[7] * fv[7].error_re;
    double inner_im = gk15_weights[7] * fv[7].error_im;
    for (int j = 0; j < 7; ++j)
    {
        auto const sum = fv[j].value + fv[14 - j].value;
        resk += gk15_weights[j] * sum;
        inner_re += gk15_weights[j] * (fv[j].error_re + fv[14 - j].error_re);
        inner_im += gk15_weights[j] * (fv[j].error_im + fv[14 - j].error_im);
        if (j % 2 == 1)
            resg += g7_weights[j / 2] * sum;
    }

    std::array<double, 15> re;
    std::array<double, 15> im;
    for (int j = 0; j < 15; ++j)
    {
        re[j] = fv[j].value.real();
        im[j] = fv[j].value.imag();
    }
    double const err_re = component_error(re, resk.real(), resg.real(), half);
    double const err_im = component_error(im, resk.imag(), resg.imag(), half);
    double const ahalf = std::abs(half);

    return {a,
            b,
            Estimate{resk * half,
                     err_re + inner_re * ahalf,
                     err_im + inner_im * ahalf}};
}

struct Targets
{
    double re;
    double im;
};

inline Targets targets_for(Estimate const& total, AdaptiveOptions const& opts)
{
    double const mag = std::abs(total.value);
    // Real part converged relative to itself (it may be tiny next to the
    // imaginary part); floor keeps a vanishing real part from stalling.
    double const re = std::max(
        {opts.abs_tol,
         opts.rel_tol * std::abs(total.value.real()),
         opts.rel_tol * 1e-8 * mag});
    double const im = std::max(opts.abs_tol, opts.rel_tol * mag);
    constexpr double tiny = std::numeric_limits<double>::min();
    return {std::max(re, tiny), std::max(im, tiny)};
}
}  // namespace detail

//! True if e meets the tolerance of opts
inline bool converged(Estimate const& e, AdaptiveOptions const& opts)
{
    auto const t = detail::targets_for(e, opts);
    return e.error_re <= t.re && e.error_im <= t.im;
}

namespace detail
{
// Adaptive partition of [a, b]; see integrate
template<class F>
std::vector<Interval> adaptive_parts(F& f,
                                     double a,
                                     double b,
                                     AdaptiveOptions const& opts,
                                     EvaluationBudget& budget)
{
    std::vector<Interval> parts;
    if (a == b)
        return parts;
    // Once the budget is spent, nested calls fall back to a single rule
    int const n0 = budget.exhausted() ? 1 : std::max(1, opts.initial_intervals);
    parts.reserve(static_cast<std::size_t>(
        std::max(n0, opts.max_intervals) + 1));
    for (int i = 0; i < n0; ++i)
    {
        double const lo = a + (b - a) * i / n0;
        double const hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
        parts.push_back(gk15(f, lo, hi, budget));
    }

    Estimate result;
    for (auto const& p : parts)
    {
        result.value += p.result.value;
        result.error_re += p.result.error_re;
        result.error_im += p.result.error_im;
    }
    while (static_cast<int>(parts.size()) < opts.max_intervals
           && !budget.exhausted() && !converged(result, opts))
    {
        auto const t = targets_for(result, opts);
        auto score = [&t](Interval const& p) {
            return std::max(p.result.error_re / t.re,
                            p.result.error_im / t.im);
        };
        auto worst = std::max_element(
            parts.begin(), parts.end(), [&](auto const& l, auto const& r) {
                return score(l) < score(r);
            });
        double const lo = worst->a;
        double const hi = worst->b;
        double const mid = 0.5 * (lo + hi);
        if (!(lo < mid && mid < hi))
            break;  // interval cannot be split further
        auto left = gk15(f, lo, mid, budget);
        auto right = gk15(f, mid, hi, budget);
        result.value += left.result.value + right.result.value
                        - worst->result.value;
        result.error_re += left.result.error_re + right.result.error_re
                           - worst->result.error_re;
        result.error_im += left.result.error_im + right.result.error_im
                           - worst->result.error_im;
        *worst = left;
        parts.push_back(right);
    }
    return parts;
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Integrate f over [a, b].
 *
 * The interval contributing most to the tolerance violation is bisected
 * until \c converged, the interval cap, or the evaluation budget is reached.
 * The result is fully deterministic for a given integrand.
 */
template<class F>
Estimate integrate(F&& f,
                   double a,
                   double b,
                   AdaptiveOptions const& opts,
                   EvaluationBudget& budget)
{
    Estimate sum;
    for (auto const& p : detail::adaptive_parts(f, a, b, opts, budget))
    {
        sum.value += p.result.value;
        sum.error_re += p.result.error_re;
        sum.error_im += p.result.error_im;
    }
    return sum;
}

//! Quadrature rule w_i f(x_i) reproducing the integral of a weight function
struct WeightedNodes
{
    std::vector<double> x;
    std::vector<double> w;  //!< rule weight times the weight function
    //! Embedded 7-point Gauss weights (0 on Kronrod-only nodes); the
    //! difference of the two sums estimates the error of a product rule
    std::vector<double> w_gauss;
    double error = 0;  //!< error estimate of sum(w)
};

/*!
 * Tabulate a real, non-negative weight function on the 15-point nodes of its
 * converged adaptive partition, so that products with integrands smooth on
 * that partition can be summed without further adaptivity.
 */
template<class F>
void tabulate(F&& f,
              double a,
              double b,
              AdaptiveOptions const& opts,
              EvaluationBudget& budget,
              WeightedNodes& out)
{
    for (auto const& p : detail::adaptive_parts(f, a, b, opts, budget))
    {
        double const center = 0.5 * (p.a + p.b);
        double const half = 0.5 * (p.b - p.a);
        for (int j = 0; j < 15; ++j)
        {
            double const node = j < 7    ? -detail::gk15_nodes[j]
                                : j == 7 ? 0.0
                                         : detail::gk15_nodes[14 - j];
            double const x = center + half * node;
            int const m = j < 8 ? j : 14 - j;
            double const fx = f(x);
            out.x.push_back(x);
            out.w.push_back(half * detail::gk15_weights[m] * fx);
            out.w_gauss.push_back(
                m % 2 == 1 ? half * detail::g7_weights[m / 2] * fx : 0.0);
        }
        budget.charge(15);
        out.error += p.result.error_re;
    }
}
}  // namespace dmdeco
