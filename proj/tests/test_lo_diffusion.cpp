//---------------------------------------------------------------------------//
//! \file test_lo_diffusion.cpp
//---------------------------------------------------------------------------//
#include "bfp/lo_diffusion.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace bfp
{
namespace
{
CrossSections hgk_xs(int cells, int b, bool corrected = false)
{
    SpatialGrid g(1.0, cells);
    auto m = hgk_moments({1.0, 0.9}, b + 1);
    return uniform_cross_sections(g, 1e-6, m, bfp_decompose(m, b), corrected);
}

CrossSections plain_xs(int cells, double sigma_t, double removal)
{
    CrossSections xs;
    xs.sigma_t.assign(cells, sigma_t);
    xs.sigma_a.assign(cells, removal);
    xs.bfp.smooth_count = 1;
    xs.bfp.sigma_tilde = {sigma_t - removal};
    return xs;
}

// Gaussian elimination with partial pivoting on the dense form
std::vector<double> dense_solve(TridiagonalSystem const& sys)
{
    int const n = static_cast<int>(sys.size());
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (int i = 0; i < n; ++i)
    {
        a[i][i] = sys.diag[i];
        if (i > 0)
            a[i][i - 1] = sys.sub[i];
        if (i + 1 < n)
            a[i][i + 1] = sys.super[i];
        a[i][n] = sys.rhs[i];
    }
    for (int k = 0; k < n; ++k)
    {
        int p = k;
        for (int r = k + 1; r < n; ++r)
        {
            if (std::abs(a[r][k]) > std::abs(a[p][k]))
                p = r;
        }
        std::swap(a[k], a[p]);
        for (int r = k + 1; r < n; ++r)
        {
            double f = a[r][k] / a[k][k];
            for (int c = k; c <= n; ++c)
                a[r][c] -= f * a[k][c];
        }
    }
    std::vector<double> x(n);
    for (int k = n - 1; k >= 0; --k)
    {
        double s = a[k][n];
        for (int c = k + 1; c < n; ++c)
            s -= a[k][c] * x[c];
        x[k] = s / a[k][k];
    }
    return x;
}

//---------------------------------------------------------------------------//
TEST(DiffusionCoefficient, BareTransport)
{
    auto d = diffusion_coefficient(plain_xs(3, 1.0, 1.0));
    for (double v : d)
        EXPECT_DOUBLE_EQ(1.0 / 3.0, v);
}

TEST(DiffusionCoefficient, HgkOneSmoothMoment)
{
    auto d = diffusion_coefficient(hgk_xs(2, 1));
    EXPECT_NEAR(1 / (3 * 1.045001), d[0], 1e-12);
    EXPECT_NEAR(0.318978, d[1], 1e-6);
}

TEST(DiffusionCoefficient, HgkTwoSmoothMoments)
{
    auto xs = hgk_xs(1, 2);
    EXPECT_NEAR(0.027, xs.bfp.sigma_tr, 1e-15);
    EXPECT_NEAR(0.036, xs.bfp.smooth(1), 1e-15);
    EXPECT_NEAR(0.336360, diffusion_coefficient(xs)[0], 1e-6);
}

TEST(DiffusionCoefficient, RejectsNonpositiveDenominator)
{
    auto xs = plain_xs(2, 1.0, 1.0);
    xs.bfp.smooth_count = 2;
    xs.bfp.sigma_tilde = {0.0, 1.5};
    EXPECT_THROW(diffusion_coefficient(xs), InvalidArgument);
}

TEST(EdgeDiffusion, HarmonicMean)
{
    std::vector<double> d{1.0, 3.0, 3.0};
    EXPECT_DOUBLE_EQ(1.5, edge_diffusion(d, 1));
    EXPECT_DOUBLE_EQ(3.0, edge_diffusion(d, 2));
}

//---------------------------------------------------------------------------//
TEST(ConsistencyFactors, FickianDataGivesZero)
{
    double const dx = 0.1;
    std::vector<double> phi{1.0, 1.4, 2.2, 2.5, 1.9};
    std::vector<double> d{0.3, 0.3, 0.5, 0.2, 0.4};
    std::vector<double> j(6, 0.0);
    for (int e = 1; e < 5; ++e)
        j[e] = -edge_diffusion(d, e) * (phi[e] - phi[e - 1]) / dx;
    j[0] = 7.0;
    j[5] = -3.0;
    auto dh = consistency_factors(phi, j, d, dx);
    ASSERT_EQ(6u, dh.size());
    for (double v : dh)
        EXPECT_NEAR(0.0, v, 1e-14);
}

TEST(ConsistencyFactors, FlatFluxNoCurrent)
{
    std::vector<double> phi(4, 2.0), j(5, 0.0), d(4, 0.3);
    for (double v : consistency_factors(phi, j, d, 0.25))
        EXPECT_EQ(0.0, v);
}

TEST(ConsistencyFactors, PureDrift)
{
    std::vector<double> phi(3, 1.0), d(3, 0.7);
    std::vector<double> j{0.0, 0.1, 0.1, 0.0};
    auto dh = consistency_factors(phi, j, d, 0.5);
    EXPECT_DOUBLE_EQ(0.1, dh[1]);
    EXPECT_DOUBLE_EQ(0.1, dh[2]);
    EXPECT_EQ(0.0, dh[0]);
    EXPECT_EQ(0.0, dh[3]);
}

TEST(ConsistencyFactors, DegenerateEdge)
{
    std::vector<double> phi{1.0, -1.0, 2.0}, d(3, 0.3), j(4, 0.1);
    try
    {
        consistency_factors(phi, j, d, 0.1);
        FAIL() << "expected DegenerateFlux";
    }
    catch (DegenerateFlux const& e)
    {
        EXPECT_EQ(1u, e.edge());
    }
}

TEST(ConsistencyFactors, RejectsSizeMismatch)
{
    std::vector<double> phi(3, 1.0), d(3, 0.3), j(3, 0.0);
    EXPECT_THROW(consistency_factors(phi, j, d, 0.1), InvalidArgument);
}

//---------------------------------------------------------------------------//
AngularFlux boundary_flux(Quadrature const& q,
                          std::vector<double> const& left,
                          std::vector<double> const& right)
{
    AngularFlux f;
    f.cells = 1;
    f.directions = q.order();
    f.cell.assign(q.order(), 1.0);
    f.edge = left;
    f.edge.insert(f.edge.end(), right.begin(), right.end());
    return f;
}

TEST(BoundaryRatios, IsotropicIsZero)
{
    auto q = gauss_legendre(16);
    std::vector<double> iso(16, 0.4);
    auto [l, r] = boundary_ratios(boundary_flux(q, iso, iso), q);
    EXPECT_NEAR(0.0, l, 1e-14);
    EXPECT_NEAR(0.0, r, 1e-14);
}

TEST(BoundaryRatios, OutgoingHalfRange)
{
    auto q = gauss_legendre(16);
    std::vector<double> left(16), right(16);
    for (int n = 0; n < 16; ++n)
    {
        left[n] = q.mu[n] < 0 ? 1.0 : 0.0;
        right[n] = q.mu[n] > 0 ? 1.0 : 0.0;
    }
    auto [l, r] = boundary_ratios(boundary_flux(q, left, right), q);
    EXPECT_NEAR(-0.5, l, 2e-3);
    EXPECT_NEAR(0.5, r, 2e-3);
}

TEST(BoundaryRatios, VanishingFlux)
{
    auto q = gauss_legendre(4);
    std::vector<double> zero(4, 0.0), one(4, 1.0);
    EXPECT_THROW(boundary_ratios(boundary_flux(q, zero, one), q),
                 DegenerateFlux);
}

TEST(BoundaryClosures, FaceToNodeFactor)
{
    auto q = gauss_legendre(4);
    std::vector<double> left(4), right(4);
    for (int n = 0; n < 4; ++n)
    {
        left[n] = q.mu[n] < 0 ? 1.0 : 0.0;
        right[n] = q.mu[n] > 0 ? 2.0 : 0.0;
    }
    auto f = boundary_flux(q, left, right);
    std::vector<double> phi_cell{4.0};
    auto [cl, cr] = boundary_closures(f, q, phi_cell);
    auto [rl, rr] = boundary_ratios(f, q);
    EXPECT_DOUBLE_EQ(rl, cl.ratio);
    EXPECT_DOUBLE_EQ(rr, cr.ratio);
    EXPECT_NEAR(1.0 / 4.0, cl.edge_to_node, 1e-15);
    EXPECT_NEAR(2.0 / 4.0, cr.edge_to_node, 1e-15);
    EXPECT_DOUBLE_EQ(cl.ratio * cl.edge_to_node, cl.coefficient());

    std::vector<double> zero_cell{0.0};
    EXPECT_THROW(boundary_closures(f, q, zero_cell), DegenerateFlux);
}

//---------------------------------------------------------------------------//
TEST(AssembleLo, ClassicStencil)
{
    int const cells = 6;
    SpatialGrid g(1.5, cells);
    double const dx = g.dx();
    auto xs = plain_xs(cells, 1.0, 0.2);
    std::vector<double> d(cells, 0.4), dh(cells + 1, 0.0), q(cells, 1.0);
    auto sys = assemble_lo(g, xs, d, dh, {}, {}, q);
    double const k = 0.4 / (dx * dx);
    for (int i = 0; i < cells; ++i)
    {
        bool const edge = i == 0 || i == cells - 1;
        EXPECT_NEAR(0.2 + (edge ? 1 : 2) * k, sys.diag[i], 1e-13);
        if (i > 0)
        {
            EXPECT_NEAR(-k, sys.sub[i], 1e-13);
        }
        if (i + 1 < cells)
        {
            EXPECT_NEAR(-k, sys.super[i], 1e-13);
        }
        EXPECT_EQ(1.0, sys.rhs[i]);
    }
    EXPECT_TRUE(sys.diagonally_dominant());
}

TEST(AssembleLo, SingleNode)
{
    SpatialGrid g(0.5, 1);
    auto xs = plain_xs(1, 1.0, 0.3);
    std::vector<double> d(1, 0.3), dh(2, 0.0), q{2.0};
    BoundaryClosure left{-0.4, 1.0};
    BoundaryClosure right{0.6, 0.5};
    auto sys = assemble_lo(g, xs, d, dh, left, right, q);
    EXPECT_NEAR((0.3 + 0.4) / 0.5 + 0.3, sys.diag[0], 1e-15);
    EXPECT_EQ(2.0, sys.rhs[0]);
}

TEST(AssembleLo, DriftFollowsEdgeAverage)
{
    // with D = 0, J_e = D_hat (phi_{e-1} + phi_e) / 2
    SpatialGrid g(1.0, 3);
    auto xs = plain_xs(3, 1.0, 1.0);
    std::vector<double> d(3, 1e-300), dh{0.0, 0.2, -0.4, 0.0}, q(3, 0.0);
    auto sys = assemble_lo(g, xs, d, dh, {}, {}, q);
    std::vector<double> phi{1.0, 2.0, 4.0};
    auto y = sys.apply(phi);
    double const dx = g.dx();
    double const j1 = 0.2 * 1.5;
    double const j2 = -0.4 * 3.0;
    EXPECT_NEAR(j1 / dx + 1.0, y[0], 1e-12);
    EXPECT_NEAR((j2 - j1) / dx + 2.0, y[1], 1e-12);
    EXPECT_NEAR(-j2 / dx + 4.0, y[2], 1e-12);
}

TEST(AssembleLo, RejectsSizeMismatch)
{
    SpatialGrid g(1.0, 3);
    auto xs = plain_xs(3, 1.0, 1.0);
    std::vector<double> d(3, 0.3), dh(3, 0.0), q(3, 1.0);
    EXPECT_THROW(assemble_lo(g, xs, d, dh, {}, {}, q), InvalidArgument);
}

//---------------------------------------------------------------------------//
TEST(SolveLo, Identity)
{
    TridiagonalSystem sys{{0, 0, 0}, {1, 1, 1}, {0, 0, 0}, {3, -1, 2}};
    auto x = solve_lo(sys);
    EXPECT_EQ(3.0, x[0]);
    EXPECT_EQ(-1.0, x[1]);
    EXPECT_EQ(2.0, x[2]);
}

TEST(SolveLo, MatchesDenseElimination)
{
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 20; ++trial)
    {
        TridiagonalSystem sys;
        int const n = 50;
        sys.sub.resize(n);
        sys.diag.resize(n);
        sys.super.resize(n);
        sys.rhs.resize(n);
        for (int i = 0; i < n; ++i)
        {
            sys.sub[i] = i > 0 ? u(rng) : 0;
            sys.super[i] = i + 1 < n ? u(rng) : 0;
            sys.diag[i] = std::abs(sys.sub[i]) + std::abs(sys.super[i])
                          + 0.5 + std::abs(u(rng));
            sys.rhs[i] = u(rng);
        }
        ASSERT_TRUE(sys.diagonally_dominant());
        auto x = solve_lo(sys);
        auto ref = dense_solve(sys);
        for (int i = 0; i < n; ++i)
            EXPECT_NEAR(ref[i], x[i], 1e-12);
        for (double r : sys.residual(x))
            EXPECT_NEAR(0.0, r, 1e-12);
    }
}

TEST(SolveLo, PureRemoval)
{
    SpatialGrid g(1.0, 10);
    auto xs = plain_xs(10, 2.0, 2.0);
    std::vector<double> d(10, 1e-300), dh(11, 0.0), q(10, 4.0);
    auto x = solve_lo(assemble_lo(g, xs, d, dh, {}, {}, q));
    for (double v : x)
        EXPECT_NEAR(2.0, v, 1e-14);
}

TEST(SolveLo, ZeroPivot)
{
    TridiagonalSystem sys{{0, 1, 1}, {1, 1, 2}, {1, 1, 0}, {1, 1, 1}};
    try
    {
        solve_lo(sys);
        FAIL() << "expected SingularSystem";
    }
    catch (SingularSystem const& e)
    {
        // 1 - 1 * (1 / 1) vanishes at the second row
        EXPECT_EQ(1u, e.pivot());
    }
    TridiagonalSystem first{{0}, {0}, {0}, {1}};
    EXPECT_THROW(solve_lo(first), SingularSystem);
}

TEST(SolveLo, Empty)
{
    EXPECT_TRUE(solve_lo({}).empty());
}

TEST(SolveLo, ManufacturedDiffusionSecondOrder)
{
    // -D phi'' + s phi = Q on [0, 1] with phi = cos(x - 1/2); the face
    // closures carry the exact current-to-node-flux ratios
    double const dcoef = 1.0 / 3.0;
    double const sigma = 1.0;
    auto exact = [](double x) { return std::cos(x - 0.5); };
    auto max_error = [&](int cells) {
        SpatialGrid g(1.0, cells);
        auto xs = plain_xs(cells, sigma, sigma);
        std::vector<double> d(cells, dcoef), dh(cells + 1, 0.0), q(cells);
        for (int i = 0; i < cells; ++i)
            q[i] = (dcoef + sigma) * exact(g.node(i));
        double const j_face = dcoef * std::sin(0.5);
        BoundaryClosure left{-j_face / exact(g.node(0)), 1.0};
        BoundaryClosure right{j_face / exact(g.node(cells - 1)), 1.0};
        auto phi = solve_lo(assemble_lo(g, xs, d, dh, left, right, q));
        double err = 0;
        for (int i = 0; i < cells; ++i)
            err = std::max(err, std::abs(phi[i] - exact(g.node(i))));
        return err;
    };
    double const e1 = max_error(25);
    double const e2 = max_error(50);
    double const e3 = max_error(100);
    EXPECT_LT(e3, 1e-4);
    EXPECT_NEAR(4.0, e1 / e2, 0.5);
    EXPECT_NEAR(4.0, e2 / e3, 0.5);
}

}  // namespace
}  // namespace bfp
