//---------------------------------------------------------------------------//
//! \file bfp/ho_transport.hpp
//! High-order BFP-S_N operator: diamond difference in space, Morel's
//! weighted differencing of the Fokker-Planck term in angle, vacuum
//! boundaries.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "errors.hpp"
#include "kernels.hpp"
#include "quadrature.hpp"

namespace bfp
{
//---------------------------------------------------------------------------//
// GEOMETRY AND MATERIAL
//---------------------------------------------------------------------------//
/*!
 * Uniform slab mesh: I cells with nodes at cell centers and I+1 edges.
 */
class SpatialGrid
{
  public:
    SpatialGrid(double length, int cells) : length_(length), cells_(cells)
    {
        if (cells < 1)
            throw InvalidArgument("grid needs at least one cell");
        if (!(length > 0))
            throw InvalidArgument("slab length must be positive");
    }

    double length() const { return length_; }
    int cells() const { return cells_; }
    double dx() const { return length_ / cells_; }
    double node(int i) const { return (i + 0.5) * this->dx(); }
    double edge(int i) const { return i * this->dx(); }

  private:
    double length_;
    int cells_;
};

/*!
 * Per-cell cross sections and the BFP split of the scattering kernel.
 *
 * \c sigma_t is the removal used on the left side of the HO equation. When
 * the split is transport corrected, the straight-ahead remainder of the
 * kernel has been removed from it.
 */
struct CrossSections
{
    std::vector<double> sigma_t;
    std::vector<double> sigma_a;
    BfpCoefficients bfp;

    //! Removal in the zeroth-moment (LO) balance.
    double removal(int i) const { return sigma_t[i] - bfp.smooth(0); }
};

/*!
 * Build uniform cross sections.
 *
 * Without the transport correction sigma_t = sigma_a + sigma_{s,0}; with it
 * the straight-ahead part sigma_{s,L} + (sigma_tr/2) L(L+1) is subtracted,
 * giving sigma_t = sigma_a + sigma_tilde_0.
 */
inline CrossSections uniform_cross_sections(SpatialGrid const& grid,
                                            double sigma_a,
                                            KernelMoments const& moments,
                                            BfpCoefficients const& bfp,
                                            bool transport_corrected)
{
    if (!(sigma_a >= 0))
        throw InvalidArgument("sigma_a must be nonnegative");
    double sigma_t = sigma_a + moments.sigma_s_l.at(0);
    if (transport_corrected)
        sigma_t -= bfp.straight_ahead;
    if (!(sigma_t > 0))
        throw InvalidArgument("total cross section must be positive");
    CrossSections xs;
    xs.sigma_t.assign(grid.cells(), sigma_t);
    xs.sigma_a.assign(grid.cells(), sigma_a);
    xs.bfp = bfp;
    return xs;
}

//---------------------------------------------------------------------------//
// FOKKER-PLANCK ANGULAR DIFFERENCING
//---------------------------------------------------------------------------//
//! Edge coefficients gamma_{n+1/2}, n = 0..N, of Morel's differencing.
struct MorelCoefficients
{
    std::vector<double> gamma;
    double nu{-2};
};

/*!
 * gamma_{1/2} = 0, gamma_{n+1/2} = gamma_{n-1/2} + nu mu_n w_n with nu = -2,
 * the discrete analog of 1 - mu^2.
 */
inline MorelCoefficients morel_coefficients(Quadrature const& quad)
{
    MorelCoefficients mc;
    int const n_dir = quad.order();
    mc.gamma.assign(n_dir + 1, 0.0);
    for (int n = 0; n < n_dir; ++n)
        mc.gamma[n + 1] = mc.gamma[n] + mc.nu * quad.mu[n] * quad.w[n];
    // Symmetric quadrature telescopes to zero; pin it so the last edge
    // carries no round-off flux.
    mc.gamma[n_dir] = 0;
    return mc;
}

namespace detail
{
//! Coupling c_{n+1/2} = gamma_{n+1/2} / (mu_{n+1} - mu_n) for n = 0..N-2.
inline std::vector<double>
fp_edge_couplings(Quadrature const& quad, MorelCoefficients const& mc)
{
    int const n_dir = quad.order();
    std::vector<double> c(n_dir > 1 ? n_dir - 1 : 0);
    for (int n = 0; n + 1 < n_dir; ++n)
        c[n] = mc.gamma[n + 1] / (quad.mu[n + 1] - quad.mu[n]);
    return c;
}
}  // namespace detail

/*!
 * Discrete angular Laplacian d/dmu (1 - mu^2) d/dmu at each direction.
 *
 * out_n = [gamma_{n+1/2} psidot_{n+1/2} - gamma_{n-1/2} psidot_{n-1/2}] / w_n
 *
 * The 1/w_n factor makes sum_n w_n out_n telescope to zero.
 */
inline std::vector<double> apply_fp(std::span<double const> psi,
                                    Quadrature const& quad,
                                    MorelCoefficients const& mc)
{
    int const n_dir = quad.order();
    if (static_cast<int>(psi.size()) != n_dir)
        throw InvalidArgument("angular data length does not match quadrature");
    auto const c = detail::fp_edge_couplings(quad, mc);
    std::vector<double> out(n_dir, 0.0);
    for (int n = 0; n + 1 < n_dir; ++n)
    {
        double const flow = c[n] * (psi[n + 1] - psi[n]);
        out[n] += flow;
        out[n + 1] -= flow;
    }
    for (int n = 0; n < n_dir; ++n)
        out[n] /= quad.w[n];
    return out;
}

//---------------------------------------------------------------------------//
// ANGULAR FLUX
//---------------------------------------------------------------------------//
/*!
 * Cell-average and edge angular fluxes.
 *
 * Storage is row-major by position: cell[i * N + n], edge[i * N + n].
 */
struct AngularFlux
{
    int cells{0};
    int directions{0};
    std::vector<double> cell;
    std::vector<double> edge;

    double cell_at(int i, int n) const { return cell[i * directions + n]; }
    double edge_at(int i, int n) const { return edge[i * directions + n]; }

    std::span<double const> cell_row(int i) const
    {
        return {cell.data() + i * directions,
                static_cast<std::size_t>(directions)};
    }
    std::span<double const> edge_row(int i) const
    {
        return {edge.data() + i * directions,
                static_cast<std::size_t>(directions)};
    }
};

//! Per-cell Legendre moments, indexed [l][i].
using CellMoments = std::vector<std::vector<double>>;

//! Legendre moments of the cell-average flux for l = 0..l_max.
inline CellMoments
cell_moments(AngularFlux const& flux, Quadrature const& quad, int l_max)
{
    CellMoments phi(l_max + 1, std::vector<double>(flux.cells, 0.0));
    for (int i = 0; i < flux.cells; ++i)
    {
        auto m = project_moments(flux.cell_row(i), quad, l_max);
        for (int l = 0; l <= l_max; ++l)
            phi[l][i] = m[l];
    }
    return phi;
}

//! phi_1 at each of the I+1 edges.
inline std::vector<double>
edge_current(AngularFlux const& flux, Quadrature const& quad)
{
    std::vector<double> j(flux.cells + 1, 0.0);
    for (int e = 0; e <= flux.cells; ++e)
    {
        for (int n = 0; n < flux.directions; ++n)
            j[e] += quad.w[n] * quad.mu[n] * flux.edge_at(e, n);
    }
    return j;
}

//! phi_0 at each of the I+1 edges.
inline std::vector<double>
edge_scalar_flux(AngularFlux const& flux, Quadrature const& quad)
{
    std::vector<double> phi(flux.cells + 1, 0.0);
    for (int e = 0; e <= flux.cells; ++e)
    {
        for (int n = 0; n < flux.directions; ++n)
            phi[e] += quad.w[n] * flux.edge_at(e, n);
    }
    return phi;
}

//---------------------------------------------------------------------------//
/*!
 * Smooth scattering emission
 * s_{i,n} = sum_{l<B} (2l+1)/2 P_l(mu_n) sigma_tilde_l phi_{l,i},
 * flattened as [i * N + n]. Moments beyond those supplied are treated as
 * zero.
 */
inline std::vector<double> scattering_source(CellMoments const& phi,
                                             BfpCoefficients const& bfp,
                                             Quadrature const& quad)
{
    if (phi.empty())
        throw InvalidArgument("scattering source needs at least phi_0");
    int const n_dir = quad.order();
    int const cells = static_cast<int>(phi[0].size());
    int const n_mom = std::min<int>(bfp.smooth_count, phi.size());

    // (2l+1)/2 sigma_tilde_l P_l(mu_n), tabulated once
    std::vector<double> coeff(n_mom * n_dir);
    for (int l = 0; l < n_mom; ++l)
    {
        for (int n = 0; n < n_dir; ++n)
        {
            coeff[l * n_dir + n] = 0.5 * (2 * l + 1) * bfp.sigma_tilde[l]
                                   * legendre_eval(l, quad.mu[n]);
        }
    }
    std::vector<double> s(cells * n_dir, 0.0);
    for (int i = 0; i < cells; ++i)
    {
        for (int l = 0; l < n_mom; ++l)
        {
            double const phi_li = phi[l][i];
            for (int n = 0; n < n_dir; ++n)
                s[i * n_dir + n] += coeff[l * n_dir + n] * phi_li;
        }
    }
    return s;
}

//---------------------------------------------------------------------------//
// ASSEMBLED OPERATOR
//---------------------------------------------------------------------------//
/*!
 * Sparse, factorized form of
 *   mu d/dx psi + sigma_t psi - (sigma_tr / 2) FP psi
 * with diamond closure; faces are vacuum unless an inflow is given.
 *
 * Unknowns are the outgoing (downstream) edge flux of every cell and
 * direction, one per (i, n): edge i+1 for mu_n > 0 and edge i for mu_n < 0.
 * Each cell average is the mean of its downstream unknown and the upstream
 * neighbor's unknown, so every row touches at most two cells and three
 * directions. The factorization is computed once and reused across solves.
 */
class HoOperator
{
  public:
    using SparseMatrix = Eigen::SparseMatrix<double>;

    HoOperator(SpatialGrid const& grid,
               CrossSections const& xs,
               Quadrature const& quad,
               MorelCoefficients const& mc)
        : grid_(grid), xs_(xs), quad_(quad), mc_(mc)
    {
        int const cells = grid.cells();
        if (static_cast<int>(xs.sigma_t.size()) != cells)
            throw InvalidArgument("cross sections do not match grid");
        if (static_cast<int>(mc.gamma.size()) != quad.order() + 1)
            throw InvalidArgument("Morel coefficients do not match quadrature");
        this->assemble();
        lu_.analyzePattern(matrix_);
        lu_.factorize(matrix_);
        if (lu_.info() != Eigen::Success)
        {
            throw SingularSystem("HO operator factorization failed: "
                                     + lu_.lastErrorMessage(),
                                 0);
        }
    }

    SparseMatrix const& matrix() const { return matrix_; }
    SpatialGrid const& grid() const { return grid_; }
    CrossSections const& cross_sections() const { return xs_; }
    Quadrature const& quadrature() const { return quad_; }
    MorelCoefficients const& morel() const { return mc_; }

    int unknowns() const { return grid_.cells() * quad_.order(); }

    //! Unknown index for cell i, direction n.
    int index(int i, int n) const { return i * quad_.order() + n; }

    //! Unknown whose value is the upstream edge of (i, n), or -1 at inflow.
    int upstream(int i, int n) const
    {
        int const iu = quad_.mu[n] > 0 ? i - 1 : i + 1;
        return (iu >= 0 && iu < grid_.cells()) ? this->index(iu, n) : -1;
    }

    /*!
     * Solve for the angular flux given emission q_{i,n} (flattened [i*N+n]).
     *
     * \c inflow optionally gives the incoming face flux per direction (the
     * left face for mu > 0, the right face for mu < 0); empty means vacuum.
     * Throws SolverFailure if the relative residual exceeds 1e-10 after one
     * step of iterative refinement.
     */
    AngularFlux solve(std::span<double const> emission,
                      std::span<double const> inflow = {}) const
    {
        if (static_cast<int>(emission.size()) != this->unknowns())
            throw InvalidArgument("emission size does not match operator");
        Eigen::VectorXd b
            = Eigen::Map<Eigen::VectorXd const>(emission.data(), emission.size());
        Eigen::VectorXd psi_in = Eigen::VectorXd::Zero(quad_.order());
        if (!inflow.empty())
        {
            if (static_cast<int>(inflow.size()) != quad_.order())
                throw InvalidArgument("inflow size does not match quadrature");
            psi_in = Eigen::Map<Eigen::VectorXd const>(inflow.data(),
                                                        inflow.size());
            b -= inflow_ * psi_in;
        }
        Eigen::VectorXd x = lu_.solve(b);
        double const bnorm = b.norm();
        double rel = 0;
        if (bnorm > 0)
        {
            Eigen::VectorXd r = b - matrix_ * x;
            rel = r.norm() / bnorm;
            if (rel > 1e-12)
            {
                x += lu_.solve(r);
                rel = (b - matrix_ * x).norm() / bnorm;
            }
        }
        last_residual_ = rel;
        if (!(rel <= 1e-10))
        {
            throw SolverFailure("HO solve residual " + to_sci(rel)
                                    + " exceeds tolerance",
                                rel);
        }
        return this->unpack(x, psi_in);
    }

    //! Relative residual of the most recent solve.
    double last_residual() const { return last_residual_; }

    //! Expand unknown vector (plus face inflow) into edge and cell fluxes.
    AngularFlux unpack(Eigen::VectorXd const& x,
                       Eigen::VectorXd const& psi_in) const
    {
        int const cells = grid_.cells();
        int const n_dir = quad_.order();
        AngularFlux f;
        f.cells = cells;
        f.directions = n_dir;
        f.edge.assign((cells + 1) * n_dir, 0.0);
        f.cell.assign(cells * n_dir, 0.0);
        for (int i = 0; i < cells; ++i)
        {
            for (int n = 0; n < n_dir; ++n)
            {
                int const e = quad_.mu[n] > 0 ? i + 1 : i;
                f.edge[e * n_dir + n] = x[this->index(i, n)];
            }
        }
        for (int n = 0; n < n_dir; ++n)
        {
            int const e = quad_.mu[n] > 0 ? 0 : cells;
            f.edge[e * n_dir + n] = psi_in[n];
        }
        for (int i = 0; i < cells; ++i)
        {
            for (int n = 0; n < n_dir; ++n)
            {
                f.cell[i * n_dir + n] = 0.5
                                        * (f.edge[i * n_dir + n]
                                           + f.edge[(i + 1) * n_dir + n]);
            }
        }
        return f;
    }

    /*!
     * Evaluate the discrete HO equations on a flux, independent of the
     * assembled matrix: returns (operator psi - emission) per (i, n).
     */
    std::vector<double> residual(AngularFlux const& f,
                                 std::span<double const> emission) const
    {
        int const n_dir = quad_.order();
        double const dx = grid_.dx();
        std::vector<double> res(f.cell.size());
        for (int i = 0; i < f.cells; ++i)
        {
            auto fp = apply_fp(f.cell_row(i), quad_, mc_);
            for (int n = 0; n < n_dir; ++n)
            {
                double const stream = quad_.mu[n]
                                      * (f.edge_at(i + 1, n) - f.edge_at(i, n))
                                      / dx;
                res[i * n_dir + n] = stream + xs_.sigma_t[i] * f.cell_at(i, n)
                                     - 0.5 * xs_.bfp.sigma_tr * fp[n]
                                     - emission[i * n_dir + n];
            }
        }
        return res;
    }

  private:
    SpatialGrid grid_;
    CrossSections xs_;
    Quadrature quad_;
    MorelCoefficients mc_;
    SparseMatrix matrix_;
    SparseMatrix inflow_;  // couples face inflow (per direction) into rows
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
    mutable double last_residual_{0};

    void assemble()
    {
        int const cells = grid_.cells();
        int const n_dir = quad_.order();
        double const dx = grid_.dx();
        double const half_tr = 0.5 * xs_.bfp.sigma_tr;
        auto const c = detail::fp_edge_couplings(quad_, mc_);

        // FP matrix entries per direction row: F[n][m] for |n - m| <= 1
        auto fp_entry = [&](int n, int m) -> double {
            double v = 0;
            if (m == n + 1)
                v = c[n];
            else if (m == n - 1)
                v = c[n - 1];
            else if (m == n)
                v = -((n + 1 < n_dir ? c[n] : 0.0) + (n > 0 ? c[n - 1] : 0.0));
            return v / quad_.w[n];
        };

        std::vector<Eigen::Triplet<double>> trip;
        std::vector<Eigen::Triplet<double>> inflow_trip;
        trip.reserve(static_cast<std::size_t>(cells) * n_dir * 8);
        for (int i = 0; i < cells; ++i)
        {
            for (int n = 0; n < n_dir; ++n)
            {
                int const row = this->index(i, n);
                double const amu = std::abs(quad_.mu[n]) / dx;
                // streaming: |mu| (downstream - upstream) / dx
                trip.emplace_back(row, row, amu);
                if (int up = this->upstream(i, n); up >= 0)
                    trip.emplace_back(row, up, -amu);
                else
                    inflow_trip.emplace_back(row, n, -amu);
                // removal - FP acting on cell averages of directions m
                for (int m = std::max(0, n - 1); m <= std::min(n_dir - 1, n + 1);
                     ++m)
                {
                    double coef = -half_tr * fp_entry(n, m);
                    if (m == n)
                        coef += xs_.sigma_t[i];
                    if (coef == 0)
                        continue;
                    trip.emplace_back(row, this->index(i, m), 0.5 * coef);
                    if (int up = this->upstream(i, m); up >= 0)
                        trip.emplace_back(row, up, 0.5 * coef);
                    else
                        inflow_trip.emplace_back(row, m, 0.5 * coef);
                }
            }
        }
        matrix_.resize(this->unknowns(), this->unknowns());
        matrix_.setFromTriplets(trip.begin(), trip.end());
        matrix_.makeCompressed();
        inflow_.resize(this->unknowns(), n_dir);
        inflow_.setFromTriplets(inflow_trip.begin(), inflow_trip.end());
    }
};

//---------------------------------------------------------------------------//
}  // namespace bfp
