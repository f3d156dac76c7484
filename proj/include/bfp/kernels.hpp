//---------------------------------------------------------------------------//
//! \file bfp/kernels.hpp
//! Legendre scattering moments for the Henyey-Greenstein and screened
//! Rutherford kernels, and the Boltzmann-Fokker-Planck decomposition.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"

namespace bfp
{
//---------------------------------------------------------------------------//
// KERNEL DESCRIPTIONS
//---------------------------------------------------------------------------//
//! Henyey-Greenstein kernel: sigma_{s,l} = sigma_s g^l.
struct HgkKernel
{
    double sigma_s{1};
    double g{0};
};

/*!
 * Screened Rutherford kernel:
 * sigma_{s,l} = sigma_s * int P_l(mu) C / (1 + 2 eta - mu)^2 dmu.
 *
 * With \c normalize set, the moment vector is rescaled so sigma_{s,0} equals
 * sigma_s exactly.
 */
struct SrkKernel
{
    double sigma_s{1};
    double c{1};
    double eta{1};
    bool normalize{true};
};

using KernelSpec = std::variant<HgkKernel, SrkKernel>;

//! Legendre moments sigma_{s,l}, l = 0..size()-1 [1/cm].
struct KernelMoments
{
    std::vector<double> sigma_s_l;
};

//---------------------------------------------------------------------------//
inline void validate(HgkKernel const& k)
{
    if (!(k.g >= 0 && k.g < 1))
        throw InvalidArgument("HGK anisotropy g must lie in [0, 1)");
    if (!(k.sigma_s >= 0))
        throw InvalidArgument("sigma_s must be nonnegative");
}

inline void validate(SrkKernel const& k)
{
    if (!(k.eta > 0))
        throw InvalidArgument("SRK screening parameter eta must be positive");
    if (!(k.c > 0))
        throw InvalidArgument("SRK constant C must be positive");
    if (!(k.sigma_s >= 0))
        throw InvalidArgument("sigma_s must be nonnegative");
}

inline void validate(KernelSpec const& k)
{
    std::visit([](auto const& v) { validate(v); }, k);
}

//---------------------------------------------------------------------------//
// MOMENT GENERATION
//---------------------------------------------------------------------------//
inline KernelMoments hgk_moments(HgkKernel const& k, int l_max)
{
    validate(k);
    KernelMoments m;
    m.sigma_s_l.resize(l_max + 1);
    double gl = 1;  // 0^0 = 1
    for (int l = 0; l <= l_max; ++l)
    {
        m.sigma_s_l[l] = k.sigma_s * gl;
        gl *= k.g;
    }
    return m;
}

namespace detail
{
//! Fixed Gauss-Legendre rules for panel integration, built once.
inline Quadrature const& panel_rule(int n)
{
    static Quadrature const coarse = legendre_roots(20);
    static Quadrature const fine = legendre_roots(40);
    return n == 20 ? coarse : fine;
}

/*!
 * Integrate P_l(1 + 2 eta - t) / t^2 over t in [2 eta, 2 + 2 eta] for all
 * l <= l_max at once.
 *
 * Panels are graded geometrically away from the t = 2 eta peak (boundaries
 * 2 eta 4^k). Each panel is evaluated with a 20- and a 40-point rule; the
 * difference is the error estimate.
 */
inline std::vector<double>
srk_integrals(double eta, int l_max, double* max_rel_error)
{
    double const t_lo = 2 * eta;
    double const t_hi = 2 + 2 * eta;
    std::vector<double> edges{t_lo};
    while (edges.back() * 4 < t_hi)
        edges.push_back(edges.back() * 4);
    edges.push_back(t_hi);

    std::vector<double> coarse(l_max + 1, 0.0);
    std::vector<double> fine(l_max + 1, 0.0);
    std::vector<double> abs_fine(l_max + 1, 0.0);
    auto accumulate = [&](Quadrature const& rule,
                          double a,
                          double b,
                          std::vector<double>& out,
                          std::vector<double>* abs_out) {
        double const half = (b - a) / 2;
        double const mid = (a + b) / 2;
        for (std::size_t j = 0; j < rule.mu.size(); ++j)
        {
            double const t = mid + half * rule.mu[j];
            // mu = 1 + 2 eta - t, computed from the far end to avoid
            // cancellation near mu = 1
            double const mu = (t_hi - t) - 1;
            double const f = rule.w[j] * half / (t * t);
            double p_prev = 1;
            double p = mu;
            out[0] += f;
            if (abs_out)
                (*abs_out)[0] += std::abs(f);
            for (int l = 1; l <= l_max; ++l)
            {
                out[l] += f * p;
                if (abs_out)
                    (*abs_out)[l] += std::abs(f * p);
                double p_next = ((2 * l + 1) * mu * p - l * p_prev) / (l + 1);
                p_prev = std::exchange(p, p_next);
            }
        }
    };
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
    {
        accumulate(panel_rule(20), edges[k], edges[k + 1], coarse, nullptr);
        accumulate(panel_rule(40), edges[k], edges[k + 1], fine, &abs_fine);
    }
    double err = 0;
    for (int l = 0; l <= l_max; ++l)
    {
        if (!std::isfinite(fine[l]) || !std::isfinite(coarse[l]))
        {
            err = std::numeric_limits<double>::infinity();
            break;
        }
        // differences at the round-off level of the integrand mass are not
        // integration error; high moments can be tiny through cancellation
        double const diff = std::abs(fine[l] - coarse[l]) - 1e-14 * abs_fine[l];
        if (diff > 0)
            err = std::max(err, diff / std::abs(fine[l]));
    }
    *max_rel_error = err;
    return fine;
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Screened Rutherford moments by graded-panel Gauss quadrature.
 *
 * Throws IntegrationFailure if the two-rule error estimate exceeds 1e-8
 * relative, which signals eta too extreme for the panel scheme.
 */
inline KernelMoments srk_moments(SrkKernel const& k, int l_max)
{
    validate(k);
    double err = 0;
    auto integrals = detail::srk_integrals(k.eta, l_max, &err);
    if (!(err <= 1e-8))
    {
        throw IntegrationFailure(
            "screened Rutherford moment integration did not converge", err);
    }
    KernelMoments m;
    m.sigma_s_l.resize(l_max + 1);
    double scale = k.sigma_s * k.c;
    if (k.normalize)
        scale = k.sigma_s / integrals[0];
    for (int l = 0; l <= l_max; ++l)
        m.sigma_s_l[l] = scale * integrals[l];
    if (k.normalize)
        m.sigma_s_l[0] = k.sigma_s;
    return m;
}

inline KernelMoments kernel_moments(KernelSpec const& k, int l_max)
{
    if (auto const* hgk = std::get_if<HgkKernel>(&k))
        return hgk_moments(*hgk, l_max);
    return srk_moments(std::get<SrkKernel>(k), l_max);
}

//---------------------------------------------------------------------------//
// BFP DECOMPOSITION
//---------------------------------------------------------------------------//
/*!
 * Smooth/singular split of a scattering kernel.
 *
 * The kernel is represented as
 *   sigma_{s,l} = sigma_tilde_l + straight_ahead - (sigma_tr / 2) l (l + 1)
 * where the first \c smooth_count moments are kept explicitly, the Fokker-
 * Planck term carries strength sigma_tr, and \c straight_ahead is the
 * forward delta-function remainder sigma_{s,L} + (sigma_tr / 2) L (L + 1).
 */
struct BfpCoefficients
{
    int smooth_count{1};  //!< B, number of smooth moments retained
    int order{2};  //!< L, decomposition order
    std::vector<double> sigma_tilde;  //!< length B
    double sigma_tr{0};
    double straight_ahead{0};

    //! sigma_tilde_l, or zero for moments that were not retained.
    double smooth(int l) const
    {
        return l < static_cast<int>(sigma_tilde.size()) ? sigma_tilde[l] : 0;
    }
};

/*!
 * Evaluate the smooth-moment expression at any l for a given split.
 *
 * Vanishes identically at l = L-1 and l = L.
 */
inline double smooth_moment_formula(KernelMoments const& m, int order, int l)
{
    int const L = order;
    double const sigma_tr = (m.sigma_s_l[L - 1] - m.sigma_s_l[L]) / L;
    return m.sigma_s_l[l] - m.sigma_s_l[L]
           - 0.5 * sigma_tr * (L * (L + 1) - l * (l + 1));
}

/*!
 * Decompose kernel moments into B smooth moments and a Fokker-Planck term
 * of order L.
 *
 * \c order = 0 selects L = B + 1. Otherwise L must satisfy B + 1 <= L.
 */
inline BfpCoefficients
bfp_decompose(KernelMoments const& m, int smooth_count, int order = 0)
{
    if (smooth_count < 1)
        throw InvalidArgument("smooth moment count B must be >= 1");
    int const L = order == 0 ? smooth_count + 1 : order;
    if (L < smooth_count + 1)
    {
        throw InvalidArgument("decomposition order L must be at least B + 1");
    }
    if (static_cast<int>(m.sigma_s_l.size()) < L + 1)
    {
        throw InvalidArgument("decomposition of order "
                              + std::to_string(L) + " needs "
                              + std::to_string(L + 1) + " kernel moments, got "
                              + std::to_string(m.sigma_s_l.size()));
    }
    BfpCoefficients c;
    c.smooth_count = smooth_count;
    c.order = L;
    c.sigma_tr = (m.sigma_s_l[L - 1] - m.sigma_s_l[L]) / L;
    c.straight_ahead = m.sigma_s_l[L] + 0.5 * c.sigma_tr * L * (L + 1);
    c.sigma_tilde.resize(smooth_count);
    for (int l = 0; l < smooth_count; ++l)
        c.sigma_tilde[l] = smooth_moment_formula(m, L, l);
    return c;
}

//---------------------------------------------------------------------------//
}  // namespace bfp
