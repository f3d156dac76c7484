//---------------------------------------------------------------------------//
//! \file test_kernels.cpp
//---------------------------------------------------------------------------//
#include "bfp/kernels.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace bfp
{
namespace
{
// sigma_{s,l} = -2 C sigma_s Q_l'(z) at z = 1 + 2 eta, written in eta so
// z - 1 is not formed in floating point
double dq0(double eta)
{
    // Q_0' = -1 / (z^2 - 1)
    return -1 / (4 * eta * (1 + eta));
}

double srk_analytic_0(double c, double eta)
{
    return -2 * c * dq0(eta);
}

double srk_analytic_1(double c, double eta)
{
    // Q_1 = z Q_0 - 1, so Q_1' = Q_0 + z Q_0'
    double const q0 = 0.5 * std::log((1 + eta) / eta);
    return -2 * c * (q0 + (1 + 2 * eta) * dq0(eta));
}

//---------------------------------------------------------------------------//
TEST(HgkMoments, Isotropic)
{
    auto m = hgk_moments({1.0, 0.0}, 3);
    ASSERT_EQ(4u, m.sigma_s_l.size());
    EXPECT_EQ(1.0, m.sigma_s_l[0]);
    EXPECT_EQ(0.0, m.sigma_s_l[1]);
    EXPECT_EQ(0.0, m.sigma_s_l[2]);
    EXPECT_EQ(0.0, m.sigma_s_l[3]);
}

TEST(HgkMoments, PowersOfG)
{
    auto m = hgk_moments({1.0, 0.9}, 2);
    EXPECT_DOUBLE_EQ(0.9, m.sigma_s_l[1]);
    EXPECT_DOUBLE_EQ(0.81, m.sigma_s_l[2]);
}

TEST(HgkMoments, RatioIsG)
{
    for (double g : {0.1, 0.5, 0.9, 0.99})
    {
        auto m = hgk_moments({2.5, g}, 20);
        for (int l = 0; l < 20; ++l)
            EXPECT_DOUBLE_EQ(g, m.sigma_s_l[l + 1] / m.sigma_s_l[l]);
    }
}

TEST(HgkMoments, RejectsInvalid)
{
    EXPECT_THROW(hgk_moments({1.0, 1.0}, 3), InvalidArgument);
    EXPECT_THROW(hgk_moments({1.0, -0.1}, 3), InvalidArgument);
    EXPECT_THROW(hgk_moments({-1.0, 0.5}, 3), InvalidArgument);
}

//---------------------------------------------------------------------------//
TEST(SrkMoments, UnitParameters)
{
    auto m = srk_moments({1.0, 1.0, 1.0, false}, 0);
    EXPECT_NEAR(0.25, m.sigma_s_l[0], 1e-12);
}

class SrkEta : public ::testing::TestWithParam<double>
{
};

TEST_P(SrkEta, MatchesAnalyticMoments)
{
    double const eta = GetParam();
    double const c = 0.3903;
    auto m = srk_moments({1.0, c, eta, false}, 1);
    double const s0 = srk_analytic_0(c, eta);
    double const s1 = srk_analytic_1(c, eta);
    EXPECT_DOUBLE_EQ(c / (2 * eta * (1 + eta)), s0);
    EXPECT_NEAR(s0, m.sigma_s_l[0], 1e-8 * s0);
    EXPECT_NEAR(s1, m.sigma_s_l[1], 1e-8 * std::abs(s1));
}

TEST_P(SrkEta, NormalizationKeepsRatios)
{
    double const eta = GetParam();
    auto raw = srk_moments({2.0, 0.3903, eta, false}, 15);
    auto norm = srk_moments({2.0, 0.3903, eta, true}, 15);
    EXPECT_EQ(2.0, norm.sigma_s_l[0]);
    for (int l = 1; l <= 15; ++l)
    {
        double const r_raw = raw.sigma_s_l[l] / raw.sigma_s_l[0];
        double const r_norm = norm.sigma_s_l[l] / norm.sigma_s_l[0];
        EXPECT_NEAR(r_raw, r_norm, 1e-14);
    }
}

TEST_P(SrkEta, BoundedByZerothMoment)
{
    auto m = srk_moments({1.0, 0.3903, GetParam(), true}, 15);
    for (double s : m.sigma_s_l)
        EXPECT_LE(std::abs(s), m.sigma_s_l[0] * (1 + 1e-14));
}

INSTANTIATE_TEST_SUITE_P(Screening,
                         SrkEta,
                         ::testing::Values(1.0, 1e-2, 2.836e-5));

TEST(SrkMoments, MonotoneForPeakedKernel)
{
    auto m = srk_moments({1.0, 0.3903, 2.836e-5, true}, 15);
    for (int l = 0; l < 15; ++l)
        EXPECT_GT(m.sigma_s_l[l], m.sigma_s_l[l + 1]);
    EXPECT_GT(m.sigma_s_l[15], 0);
}

TEST(SrkMoments, ExtremeScreeningFails)
{
    // 1 / t^2 overflows at the peak
    EXPECT_THROW(srk_moments({1.0, 1.0, 1e-320, false}, 2), IntegrationFailure);
}

TEST(SrkMoments, RejectsInvalid)
{
    EXPECT_THROW(srk_moments({1.0, 1.0, 0.0, true}, 2), InvalidArgument);
    EXPECT_THROW(srk_moments({1.0, 0.0, 1.0, true}, 2), InvalidArgument);
    EXPECT_THROW(srk_moments({-1.0, 1.0, 1.0, true}, 2), InvalidArgument);
}

TEST(KernelMomentsDispatch, SelectsKernel)
{
    auto h = kernel_moments(HgkKernel{1.0, 0.5}, 2);
    EXPECT_DOUBLE_EQ(0.25, h.sigma_s_l[2]);
    auto s = kernel_moments(SrkKernel{1.0, 1.0, 1.0, false}, 0);
    EXPECT_NEAR(0.25, s.sigma_s_l[0], 1e-12);
}

//---------------------------------------------------------------------------//
TEST(BfpDecompose, HgkOneSmoothMoment)
{
    auto m = hgk_moments({1.0, 0.9}, 2);
    auto c = bfp_decompose(m, 1);
    EXPECT_EQ(1, c.smooth_count);
    EXPECT_EQ(2, c.order);
    ASSERT_EQ(1u, c.sigma_tilde.size());
    EXPECT_NEAR(0.045, c.sigma_tr, 1e-15);
    EXPECT_NEAR(0.055, c.sigma_tilde[0], 1e-15);
    EXPECT_EQ(0.0, c.smooth(1));
}

TEST(BfpDecompose, IsotropicKernel)
{
    auto m = hgk_moments({1.3, 0.0}, 20);
    for (int b : {1, 3, 7})
    {
        auto c = bfp_decompose(m, b);
        EXPECT_EQ(0.0, c.sigma_tr);
        EXPECT_EQ(1.3, c.sigma_tilde[0]);
        for (int l = 1; l < b; ++l)
            EXPECT_EQ(0.0, c.sigma_tilde[l]);
    }
}

TEST(BfpDecompose, AnchorIdentity)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 100; ++trial)
    {
        KernelMoments m;
        m.sigma_s_l.resize(17);
        for (double& s : m.sigma_s_l)
            s = u(rng);
        m.sigma_s_l[0] = 1;
        for (int L = 2; L <= 16; ++L)
        {
            EXPECT_NEAR(0.0, smooth_moment_formula(m, L, L - 1), 1e-12);
            EXPECT_NEAR(0.0, smooth_moment_formula(m, L, L), 1e-12);
        }
    }
}

TEST(BfpDecompose, Reconstruction)
{
    auto m = hgk_moments({1.0, 0.9}, 15);
    for (int b : {1, 5, 9, 13})
    {
        for (int order : {0, 15})
        {
            auto c = bfp_decompose(m, b, order);
            int const L = c.order;
            double const sl = m.sigma_s_l[L];
            for (int l = 0; l < b; ++l)
            {
                double back = c.sigma_tilde[l] + sl
                              + 0.5 * c.sigma_tr * (L * (L + 1) - l * (l + 1));
                EXPECT_NEAR(m.sigma_s_l[l], back, 1e-15);
            }
            EXPECT_GE(c.sigma_tr, 0);
            EXPECT_NEAR(sl + 0.5 * c.sigma_tr * L * (L + 1),
                        c.straight_ahead,
                        1e-15);
        }
    }
}

TEST(BfpDecompose, ExplicitOrder)
{
    auto m = hgk_moments({1.0, 0.9}, 15);
    auto c = bfp_decompose(m, 1, 15);
    EXPECT_EQ(15, c.order);
    double const s14 = std::pow(0.9, 14);
    double const s15 = std::pow(0.9, 15);
    EXPECT_NEAR((s14 - s15) / 15, c.sigma_tr, 1e-15);
}

TEST(BfpDecompose, RejectsMissingMoments)
{
    auto m = hgk_moments({1.0, 0.9}, 3);
    EXPECT_NO_THROW(bfp_decompose(m, 2));
    EXPECT_THROW(bfp_decompose(m, 3), InvalidArgument);
    EXPECT_THROW(bfp_decompose(m, 1, 4), InvalidArgument);
}

TEST(BfpDecompose, RejectsBadCounts)
{
    auto m = hgk_moments({1.0, 0.9}, 15);
    EXPECT_THROW(bfp_decompose(m, 0), InvalidArgument);
    EXPECT_THROW(bfp_decompose(m, 5, 5), InvalidArgument);
}

}  // namespace
}  // namespace bfp
