//---------------------------------------------------------------------------//
//! \file bfp/solvers.hpp
//! Source iteration, nonlinear diffusion acceleration, and a dense direct
//! reference solve of the same discrete problem.
//---------------------------------------------------------------------------//
#pragma once

#include <chrono>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "ho_transport.hpp"
#include "kernels.hpp"
#include "lo_diffusion.hpp"
#include "quadrature.hpp"

namespace bfp
{
//---------------------------------------------------------------------------//
/*!
 * Complete description of one fixed-source slab solve with vacuum faces.
 *
 * \c decomposition_order is the L of the BFP split; zero selects B + 1.
 * With \c transport_corrected the straight-ahead part of the split is
 * removed from sigma_t so that the scattering operator conserves particles.
 */
struct ProblemSpec
{
    double length_cm{1.0};
    int cells{200};
    int quad_order{16};
    KernelSpec kernel{HgkKernel{1.0, 0.9}};
    int smooth_moments{1};
    int decomposition_order{15};
    bool transport_corrected{true};
    double sigma_a{1e-6};
    double source_q{1.0};
    double tol{1e-6};
    int max_iters{10000};

    int effective_order() const
    {
        return decomposition_order == 0 ? smooth_moments + 1
                                        : decomposition_order;
    }
};

inline void validate(ProblemSpec const& p)
{
    if (!(p.tol > 0))
        throw InvalidArgument("tol must be positive");
    if (p.max_iters < 1)
        throw InvalidArgument("max_iters must be >= 1");
    if (!(p.source_q >= 0))
        throw InvalidArgument("source_q must be nonnegative");
    if (p.smooth_moments < 1)
        throw InvalidArgument("B must be >= 1");
    if (p.decomposition_order != 0
        && p.decomposition_order < p.smooth_moments + 1)
    {
        throw InvalidArgument("decomposition order must be 0 or >= B + 1");
    }
    validate(p.kernel);
}

//---------------------------------------------------------------------------//
//! Everything derived from a ProblemSpec before iterating.
struct Discretization
{
    SpatialGrid grid;
    Quadrature quad;
    KernelMoments moments;
    BfpCoefficients bfp;
    CrossSections xs;
    MorelCoefficients morel;
};

inline Discretization discretize(ProblemSpec const& p)
{
    validate(p);
    SpatialGrid grid(p.length_cm, p.cells);
    auto quad = gauss_legendre(p.quad_order);
    int const order = p.effective_order();
    auto moments = kernel_moments(p.kernel, order);
    auto bfp = bfp_decompose(moments, p.smooth_moments, order);
    auto xs = uniform_cross_sections(
        grid, p.sigma_a, moments, bfp, p.transport_corrected);
    auto mc = morel_coefficients(quad);
    return {grid, std::move(quad), std::move(moments), bfp, xs, mc};
}

//---------------------------------------------------------------------------//
enum class Method
{
    si,
    nda,
    oracle
};

inline char const* to_string(Method m)
{
    switch (m)
    {
        case Method::si:
            return "SI";
        case Method::nda:
            return "NDA";
        case Method::oracle:
            return "ORACLE";
    }
    return "?";
}

struct SolveReport
{
    Method method{Method::si};
    int iterations{0};
    bool converged{false};
    std::vector<double> error_history;
    double wall_seconds{0};
    std::vector<double> phi0;  //!< HO scalar flux per node
    std::vector<double> edge_currents;  //!< HO phi_1 per edge
    std::vector<double> phi0_lo;  //!< NDA only: last LO flux
    AngularFlux flux;  //!< final HO angular flux
};

//---------------------------------------------------------------------------//
//! epsilon = ||a - b||_2 / sqrt(I)
inline double convergence_error(std::span<double const> a,
                                std::span<double const> b)
{
    if (a.size() != b.size())
        throw InvalidArgument("convergence_error inputs differ in length");
    double sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        double const d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(a.size()));
}

namespace detail
{
inline std::vector<double>
emission(CellMoments const& phi, Discretization const& disc, double q)
{
    auto s = scattering_source(phi, disc.bfp, disc.quad);
    for (double& v : s)
        v += 0.5 * q;
    return s;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Unaccelerated source iteration.
 *
 * Each iteration solves the HO system (Fokker-Planck term implicit) with
 * the smooth scattering source from the previous moments. Converged when
 * the successive-iterate error falls to tol. On hitting max_iters the
 * partial result is returned with converged = false.
 */
inline SolveReport source_iteration(ProblemSpec const& p)
{
    auto disc = discretize(p);
    HoOperator op(disc.grid, disc.xs, disc.quad, disc.morel);
    int const l_max = p.smooth_moments - 1;
    int const cells = p.cells;

    SolveReport rep;
    rep.method = Method::si;
    CellMoments phi(l_max + 1, std::vector<double>(cells, 0.0));

    auto const t0 = std::chrono::steady_clock::now();
    for (int k = 1; k <= p.max_iters; ++k)
    {
        rep.flux = op.solve(detail::emission(phi, disc, p.source_q));
        auto next = cell_moments(rep.flux, disc.quad, l_max);
        double const eps = convergence_error(next[0], phi[0]);
        phi = std::move(next);
        rep.error_history.push_back(eps);
        rep.iterations = k;
        if (eps <= p.tol)
        {
            rep.converged = true;
            break;
        }
    }
    rep.wall_seconds = detail::seconds_since(t0);
    rep.phi0 = phi[0];
    rep.edge_currents = edge_current(rep.flux, disc.quad);
    return rep;
}

//---------------------------------------------------------------------------//
/*!
 * Nonlinear diffusion acceleration, Picard form.
 *
 * Iteration k:
 *  1. HO solve with the scattering source built from phi_0^{LO} (l = 0) and
 *     the latest HO moments (l >= 1);
 *  2. eps = ||phi_0^{HO} - phi_0^{LO}|| / sqrt(I); stop if eps <= tol;
 *  3. drift factors and face closures from the fresh HO flux;
 *  4. solve the LO system for the next phi_0^{LO}.
 *
 * phi_0^{LO} starts at zero, so the first HO solve sees no scattering.
 */
inline SolveReport nda_solve(ProblemSpec const& p)
{
    auto disc = discretize(p);
    HoOperator op(disc.grid, disc.xs, disc.quad, disc.morel);
    int const l_max = p.smooth_moments - 1;
    int const cells = p.cells;
    auto const d = diffusion_coefficient(disc.xs);
    std::vector<double> const q_node(cells, p.source_q);

    SolveReport rep;
    rep.method = Method::nda;
    std::vector<double> phi_lo(cells, 0.0);
    CellMoments ho(l_max + 1, std::vector<double>(cells, 0.0));

    auto const t0 = std::chrono::steady_clock::now();
    for (int k = 1; k <= p.max_iters; ++k)
    {
        CellMoments src = ho;
        src[0] = phi_lo;
        rep.flux = op.solve(detail::emission(src, disc, p.source_q));
        ho = cell_moments(rep.flux, disc.quad, l_max);
        double const eps = convergence_error(ho[0], phi_lo);
        rep.error_history.push_back(eps);
        rep.iterations = k;
        if (eps <= p.tol)
        {
            rep.converged = true;
            break;
        }
        auto const j = edge_current(rep.flux, disc.quad);
        auto const d_hat = consistency_factors(ho[0], j, d, disc.grid.dx());
        auto const [left, right] = boundary_closures(rep.flux, disc.quad, ho[0]);
        auto sys = assemble_lo(disc.grid, disc.xs, d, d_hat, left, right, q_node);
        phi_lo = solve_lo(sys);
    }
    rep.wall_seconds = detail::seconds_since(t0);
    rep.phi0 = ho[0];
    rep.phi0_lo = phi_lo;
    rep.edge_currents = edge_current(rep.flux, disc.quad);
    return rep;
}

//---------------------------------------------------------------------------//
/*!
 * Residual of HO moments in the LO equations closed from the same HO flux.
 *
 * Returns the per-node residual of the assembled LO system evaluated at the
 * HO scalar flux. It vanishes at an exact HO/LO fixed point.
 */
inline std::vector<double> lo_consistency_residual(ProblemSpec const& p,
                                                   AngularFlux const& flux)
{
    auto disc = discretize(p);
    auto const d = diffusion_coefficient(disc.xs);
    auto const phi0 = cell_moments(flux, disc.quad, 0)[0];
    auto const j = edge_current(flux, disc.quad);
    auto const d_hat = consistency_factors(phi0, j, d, disc.grid.dx());
    auto const [left, right] = boundary_closures(flux, disc.quad, phi0);
    std::vector<double> const q_node(p.cells, p.source_q);
    auto sys = assemble_lo(disc.grid, disc.xs, d, d_hat, left, right, q_node);
    return sys.residual(phi0);
}

//---------------------------------------------------------------------------//
/*!
 * Direct solve of the full discrete problem with scattering implicit.
 *
 * The unknowns are the I*N cell-average fluxes; edge fluxes are eliminated
 * along each direction's upwind chain, so the matrix is dense in space.
 * Intended as a verification oracle for small problems (I*N <= 5000).
 */
inline std::vector<double> dense_reference_solve(ProblemSpec const& p)
{
    auto disc = discretize(p);
    int const cells = p.cells;
    int const n_dir = p.quad_order;
    int const size = cells * n_dir;
    if (size > 5000)
    {
        throw InvalidArgument("dense reference solve limited to I*N <= 5000");
    }
    double const dx = disc.grid.dx();
    auto const& quad = disc.quad;
    auto const& bfp = disc.bfp;

    // Angular coupling per cell: FP columns and smooth scattering.
    Eigen::MatrixXd fp(n_dir, n_dir);
    for (int m = 0; m < n_dir; ++m)
    {
        std::vector<double> unit(n_dir, 0.0);
        unit[m] = 1;
        auto col = apply_fp(unit, quad, disc.morel);
        for (int n = 0; n < n_dir; ++n)
            fp(n, m) = col[n];
    }
    Eigen::MatrixXd scat = Eigen::MatrixXd::Zero(n_dir, n_dir);
    for (int l = 0; l < bfp.smooth_count; ++l)
    {
        for (int n = 0; n < n_dir; ++n)
        {
            for (int m = 0; m < n_dir; ++m)
            {
                scat(n, m) += 0.5 * (2 * l + 1) * bfp.sigma_tilde[l]
                              * legendre_eval(l, quad.mu[n]) * quad.w[m]
                              * legendre_eval(l, quad.mu[m]);
            }
        }
    }

    auto idx = [n_dir](int i, int n) { return i * n_dir + n; };
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
    Eigen::VectorXd b = Eigen::VectorXd::Constant(size, 0.5 * p.source_q);
    for (int n = 0; n < n_dir; ++n)
    {
        double const amu = std::abs(quad.mu[n]) / dx;
        // upstream-edge value as a combination of cell averages:
        // e_in(i) = 2 sum_{j upstream} (-1)^{dist-1} psibar_j
        for (int step = 0; step < cells; ++step)
        {
            int const i = quad.mu[n] > 0 ? step : cells - 1 - step;
            int const row = idx(i, n);
            a(row, row) += 2 * amu;
            double sign = 1;
            for (int back = 1; back <= step; ++back)
            {
                int const j = quad.mu[n] > 0 ? i - back : i + back;
                a(row, idx(j, n)) -= 2 * amu * 2 * sign;
                sign = -sign;
            }
        }
    }
    for (int i = 0; i < cells; ++i)
    {
        for (int n = 0; n < n_dir; ++n)
        {
            for (int m = 0; m < n_dir; ++m)
            {
                double v = -0.5 * bfp.sigma_tr * fp(n, m) - scat(n, m);
                if (m == n)
                    v += disc.xs.sigma_t[i];
                a(idx(i, n), idx(i, m)) += v;
            }
        }
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    double const rcond = lu.rcond();
    if (!(rcond > 1e-14))
    {
        throw SingularSystem("dense reference matrix is singular (rcond "
                                 + to_sci(rcond) + ")",
                             0);
    }
    Eigen::VectorXd x = lu.solve(b);
    std::vector<double> phi0(cells, 0.0);
    for (int i = 0; i < cells; ++i)
    {
        for (int n = 0; n < n_dir; ++n)
            phi0[i] += quad.w[n] * x[idx(i, n)];
    }
    return phi0;
}

//---------------------------------------------------------------------------//
}  // namespace bfp
