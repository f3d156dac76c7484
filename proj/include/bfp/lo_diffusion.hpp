//---------------------------------------------------------------------------//
//! \file bfp/lo_diffusion.hpp
//! Drift-diffusion low-order system and its closure from HO moments.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "ho_transport.hpp"
#include "quadrature.hpp"

namespace bfp
{
//---------------------------------------------------------------------------//
/*!
 * D_i = 1 / (3 (sigma_t - sigma_tilde_1 + sigma_tr)).
 *
 * sigma_tilde_1 is zero when fewer than two smooth moments are retained.
 */
inline std::vector<double> diffusion_coefficient(CrossSections const& xs)
{
    std::vector<double> d(xs.sigma_t.size());
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        double const denom = xs.sigma_t[i] - xs.bfp.smooth(1) + xs.bfp.sigma_tr;
        if (!(denom > 0))
        {
            throw InvalidArgument(
                "diffusion denominator sigma_t - sigma_tilde_1 + sigma_tr is "
                "nonpositive in cell "
                + std::to_string(i));
        }
        d[i] = 1 / (3 * denom);
    }
    return d;
}

//! Harmonic mean of adjacent cell values at interior edge e (1..I-1).
inline double edge_diffusion(std::span<double const> d, int e)
{
    double const a = d[e - 1];
    double const b = d[e];
    return 2 * a * b / (a + b);
}

//---------------------------------------------------------------------------//
/*!
 * Consistency (drift) factors at the I+1 edges.
 *
 * D_hat_{i+1/2} = [J_{i+1/2} + D_{i+1/2} (phi_{i+1} - phi_i) / dx]
 *                 / ((phi_i + phi_{i+1}) / 2)
 *
 * Boundary entries are zero; the boundary currents are closed separately.
 */
inline std::vector<double> consistency_factors(std::span<double const> phi0,
                                               std::span<double const> j_edge,
                                               std::span<double const> d,
                                               double dx)
{
    int const cells = static_cast<int>(phi0.size());
    if (static_cast<int>(j_edge.size()) != cells + 1
        || static_cast<int>(d.size()) != cells)
    {
        throw InvalidArgument("consistency factor inputs have mismatched sizes");
    }
    std::vector<double> d_hat(cells + 1, 0.0);
    for (int e = 1; e < cells; ++e)
    {
        double const phi_edge = 0.5 * (phi0[e - 1] + phi0[e]);
        if (phi_edge == 0)
        {
            throw DegenerateFlux("edge scalar flux vanishes at edge "
                                     + std::to_string(e),
                                 e);
        }
        double const fick = edge_diffusion(d, e) * (phi0[e] - phi0[e - 1]) / dx;
        d_hat[e] = (j_edge[e] + fick) / phi_edge;
    }
    return d_hat;
}

//---------------------------------------------------------------------------//
/*!
 * Current-to-flux ratio at each slab face,
 * r = (sum w mu psi_edge) / (sum w psi_edge).
 */
inline std::pair<double, double>
boundary_ratios(AngularFlux const& flux, Quadrature const& quad)
{
    auto ratio = [&](int e) {
        double phi0 = 0;
        double phi1 = 0;
        for (int n = 0; n < flux.directions; ++n)
        {
            phi0 += quad.w[n] * flux.edge_at(e, n);
            phi1 += quad.w[n] * quad.mu[n] * flux.edge_at(e, n);
        }
        if (phi0 == 0)
        {
            throw DegenerateFlux("boundary scalar flux vanishes at edge "
                                     + std::to_string(e),
                                 e);
        }
        return phi1 / phi0;
    };
    return {ratio(0), ratio(flux.cells)};
}

/*!
 * LO boundary current J_face = ratio * edge_to_node * phi_node.
 *
 * \c ratio is the face current-to-flux ratio; \c edge_to_node maps the
 * adjacent node flux to the face flux, both taken from the HO solution.
 */
struct BoundaryClosure
{
    double ratio{0};
    double edge_to_node{1};

    double coefficient() const { return ratio * edge_to_node; }
};

/*!
 * Face closures from an HO solution: the current-to-flux ratio and the
 * face-to-adjacent-node scalar flux ratio.
 */
inline std::pair<BoundaryClosure, BoundaryClosure>
boundary_closures(AngularFlux const& flux,
                  Quadrature const& quad,
                  std::span<double const> phi0_cell)
{
    auto [r_left, r_right] = boundary_ratios(flux, quad);
    auto phi_edge = edge_scalar_flux(flux, quad);
    int const cells = flux.cells;
    if (phi0_cell[0] == 0 || phi0_cell[cells - 1] == 0)
        throw DegenerateFlux("boundary cell scalar flux vanishes", 0);
    return {BoundaryClosure{r_left, phi_edge[0] / phi0_cell[0]},
            BoundaryClosure{r_right, phi_edge[cells] / phi0_cell[cells - 1]}};
}

//---------------------------------------------------------------------------//
// TRIDIAGONAL SYSTEM
//---------------------------------------------------------------------------//
/*!
 * Row i reads sub[i] x[i-1] + diag[i] x[i] + super[i] x[i+1] = rhs[i];
 * sub[0] and super[I-1] are unused.
 */
struct TridiagonalSystem
{
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;
    std::vector<double> rhs;

    std::size_t size() const { return diag.size(); }

    std::vector<double> apply(std::span<double const> x) const
    {
        std::size_t const n = this->size();
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            double v = diag[i] * x[i];
            if (i > 0)
                v += sub[i] * x[i - 1];
            if (i + 1 < n)
                v += super[i] * x[i + 1];
            y[i] = v;
        }
        return y;
    }

    //! Per-row residual A x - rhs.
    std::vector<double> residual(std::span<double const> x) const
    {
        auto y = this->apply(x);
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] -= rhs[i];
        return y;
    }

    //! True when |diag| >= |sub| + |super| in every row.
    bool diagonally_dominant() const
    {
        std::size_t const n = this->size();
        for (std::size_t i = 0; i < n; ++i)
        {
            double off = 0;
            if (i > 0)
                off += std::abs(sub[i]);
            if (i + 1 < n)
                off += std::abs(super[i]);
            if (std::abs(diag[i]) < off)
                return false;
        }
        return true;
    }
};

/*!
 * Assemble the LO balance at each node,
 *   (J_{i+1/2} - J_{i-1/2}) / dx + (sigma_t - sigma_tilde_0) phi_i = Q_i,
 * with J_{i+1/2} = -D_{i+1/2} (phi_{i+1} - phi_i) / dx
 *                  + D_hat_{i+1/2} (phi_i + phi_{i+1}) / 2
 * in the interior and J = closure * phi at the faces.
 */
inline TridiagonalSystem assemble_lo(SpatialGrid const& grid,
                                     CrossSections const& xs,
                                     std::span<double const> d,
                                     std::span<double const> d_hat,
                                     BoundaryClosure const& left,
                                     BoundaryClosure const& right,
                                     std::span<double const> source)
{
    int const cells = grid.cells();
    if (static_cast<int>(d.size()) != cells
        || static_cast<int>(d_hat.size()) != cells + 1
        || static_cast<int>(source.size()) != cells)
    {
        throw InvalidArgument("LO assembly inputs have mismatched sizes");
    }
    double const dx = grid.dx();
    TridiagonalSystem sys;
    sys.sub.assign(cells, 0.0);
    sys.diag.assign(cells, 0.0);
    sys.super.assign(cells, 0.0);
    sys.rhs.assign(source.begin(), source.end());
    for (int i = 0; i < cells; ++i)
        sys.diag[i] = xs.removal(i);

    // interior edges: J_e couples nodes e-1 (left) and e (right)
    for (int e = 1; e < cells; ++e)
    {
        double const de = edge_diffusion(d, e) / dx;
        double const drift = 0.5 * d_hat[e];
        double const j_left = (de + drift) / dx;  // dJ/dphi_{e-1}
        double const j_right = (-de + drift) / dx;  // dJ/dphi_e
        // +J_e / dx in row e-1
        sys.diag[e - 1] += j_left;
        sys.super[e - 1] += j_right;
        // -J_e / dx in row e
        sys.sub[e] -= j_left;
        sys.diag[e] -= j_right;
    }
    sys.diag[0] -= left.coefficient() / dx;
    sys.diag[cells - 1] += right.coefficient() / dx;
    return sys;
}

//---------------------------------------------------------------------------//
/*!
 * Thomas elimination without pivoting.
 *
 * Throws SingularSystem with the offending row if a pivot vanishes, and
 * SolverFailure if the normwise backward error exceeds 1e-12.
 */
inline std::vector<double> solve_lo(TridiagonalSystem const& sys)
{
    std::size_t const n = sys.size();
    if (n == 0)
        return {};
    std::vector<double> c_prime(n, 0.0);
    std::vector<double> x(n, 0.0);

    auto check_pivot = [](double p, std::size_t i) {
        if (p == 0 || !std::isfinite(p))
            throw SingularSystem("zero pivot in tridiagonal solve at row "
                                     + std::to_string(i),
                                 i);
    };

    check_pivot(sys.diag[0], 0);
    c_prime[0] = n > 1 ? sys.super[0] / sys.diag[0] : 0;
    x[0] = sys.rhs[0] / sys.diag[0];
    for (std::size_t i = 1; i < n; ++i)
    {
        double const pivot = sys.diag[i] - sys.sub[i] * c_prime[i - 1];
        check_pivot(pivot, i);
        double const inv = 1 / pivot;
        c_prime[i] = i + 1 < n ? sys.super[i] * inv : 0;
        x[i] = (sys.rhs[i] - sys.sub[i] * x[i - 1]) * inv;
    }
    for (std::size_t i = n - 1; i > 0; --i)
        x[i - 1] -= c_prime[i - 1] * x[i];

    // normwise backward error ||r|| / (||A|| ||x|| + ||b||), infinity norms
    auto r = sys.residual(x);
    double rnorm = 0;
    double anorm = 0;
    double xnorm = 0;
    double bnorm = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double row = std::abs(sys.diag[i]);
        if (i > 0)
            row += std::abs(sys.sub[i]);
        if (i + 1 < n)
            row += std::abs(sys.super[i]);
        anorm = std::max(anorm, row);
        rnorm = std::max(rnorm, std::abs(r[i]));
        xnorm = std::max(xnorm, std::abs(x[i]));
        bnorm = std::max(bnorm, std::abs(sys.rhs[i]));
    }
    double const scale = anorm * xnorm + bnorm;
    double const rel = scale > 0 ? rnorm / scale : rnorm;
    if (!(rel <= 1e-12))
    {
        throw SolverFailure("tridiagonal solve backward error " + to_sci(rel)
                                + " exceeds tolerance",
                            rel);
    }
    return x;
}

//---------------------------------------------------------------------------//
}  // namespace bfp
