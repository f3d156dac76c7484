//---------------------------------------------------------------------------//
//! \file bfp/quadrature.hpp
//! Gauss-Legendre angular quadrature and Legendre polynomial utilities.
//---------------------------------------------------------------------------//
#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace bfp
{
//---------------------------------------------------------------------------//
/*!
 * Evaluate the Legendre polynomial P_l at x with the Bonnet recurrence
 * (l+1) P_{l+1} = (2l+1) x P_l - l P_{l-1}.
 */
inline double legendre_eval(int l, double x)
{
    if (l == 0)
        return 1;
    double p_prev = 1;
    double p = x;
    for (int k = 1; k < l; ++k)
    {
        double p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1);
        p_prev = std::exchange(p, p_next);
    }
    return p;
}

//! P_l(x) and its derivative, for |x| < 1.
inline std::pair<double, double> legendre_eval_deriv(int l, double x)
{
    if (l == 0)
        return {1, 0};
    double p_prev = 1;
    double p = x;
    for (int k = 1; k < l; ++k)
    {
        double p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1);
        p_prev = std::exchange(p, p_next);
    }
    // P_l'(x) = l (x P_l - P_{l-1}) / (x^2 - 1)
    return {p, l * (x * p - p_prev) / (x * x - 1)};
}

//---------------------------------------------------------------------------//
/*!
 * Symmetric Gauss-Legendre set on [-1, 1], nodes ascending.
 *
 * The ascending order is relied upon by the Fokker-Planck angular
 * differencing, which walks adjacent directions n and n+1.
 */
struct Quadrature
{
    std::vector<double> mu;
    std::vector<double> w;

    int order() const { return static_cast<int>(mu.size()); }
};

namespace detail
{
//---------------------------------------------------------------------------//
/*!
 * Roots and Gauss weights of P_n for any n >= 1, ascending.
 *
 * Newton iteration from cos(pi (k - 1/4) / (n + 1/2)); the positive half is
 * computed and mirrored so the set is exactly symmetric.
 */
inline Quadrature legendre_roots(int n)
{
    Quadrature q;
    q.mu.assign(n, 0.0);
    q.w.assign(n, 0.0);
    int const half = (n + 1) / 2;
    for (int k = 1; k <= half; ++k)
    {
        double x = std::cos(std::numbers::pi * (k - 0.25) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it)
        {
            auto [p, d] = legendre_eval_deriv(n, x);
            dp = d;
            double dx = p / d;
            x -= dx;
            if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))
                && std::abs(p) <= 1e-15)
            {
                break;
            }
        }
        dp = legendre_eval_deriv(n, x).second;
        double wk = 2 / ((1 - x * x) * dp * dp);
        // k-th root from the top sits at ascending index n - k
        q.mu[n - k] = x;
        q.w[n - k] = wk;
        q.mu[k - 1] = -x;
        q.w[k - 1] = wk;
    }
    if (n % 2 == 1)
    {
        // Middle node is exactly zero; weight from the derivative there.
        double dp = legendre_eval_deriv(n, 0.0).second;
        q.mu[half - 1] = 0;
        q.w[half - 1] = 2 / (dp * dp);
    }
    return q;
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Gauss-Legendre quadrature of even order N >= 2.
 *
 * Odd orders are rejected because they place a node at mu = 0, where the
 * sweep direction is undefined.
 */
inline Quadrature gauss_legendre(int order)
{
    if (order < 2 || order % 2 != 0)
    {
        throw InvalidArgument("quadrature order must be even and >= 2, got "
                              + std::to_string(order));
    }
    return detail::legendre_roots(order);
}

//---------------------------------------------------------------------------//
/*!
 * Discrete Legendre moments phi_l = sum_n w_n P_l(mu_n) psi_n for
 * l = 0..l_max.
 */
inline std::vector<double>
project_moments(std::span<double const> psi, Quadrature const& quad, int l_max)
{
    if (psi.size() != quad.mu.size())
    {
        throw InvalidArgument("angular data length does not match quadrature");
    }
    std::vector<double> phi(l_max + 1, 0.0);
    for (std::size_t n = 0; n < psi.size(); ++n)
    {
        double const wpsi = quad.w[n] * psi[n];
        double const x = quad.mu[n];
        // inline recurrence so each direction is visited once
        double p_prev = 1;
        double p = x;
        phi[0] += wpsi;
        if (l_max >= 1)
            phi[1] += wpsi * x;
        for (int l = 1; l < l_max; ++l)
        {
            double p_next = ((2 * l + 1) * x * p - l * p_prev) / (l + 1);
            p_prev = std::exchange(p, p_next);
            phi[l + 1] += wpsi * p;
        }
    }
    return phi;
}

//---------------------------------------------------------------------------//
}  // namespace bfp
