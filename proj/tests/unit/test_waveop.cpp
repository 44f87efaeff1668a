#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "darcywave/io.hpp"
#include "darcywave/waveop.hpp"

using namespace darcywave;

namespace {

/// Band-limited to |xi| < N/4 so that products stay resolved on the dealiased grid.
SpectralField random_psi(std::mt19937& rng, int n, double amp) {
    std::normal_distribution<double> nd;
    SpectralField psi(n);
    for (int xi = 1; xi < n / 4; ++xi) psi.set_coeff(xi, amp * cplx(nd(rng), nd(rng)) * std::pow(static_cast<double>(xi), -3.0));
    return psi;
}

WaveOperator gravity_op(int n = 32) {
    const auto& p = preset("gravity-cosine");
    return WaveOperator(p.forcing, p.params, n, 16);
}

}  // namespace

TEST(WaveOperator, TrivialForcingVanishesOnFlatState) {
    const WaveOperator op(ForcingSpec{}, PhysicalParams{1.0, 0.7, 1.0}, 32, 12);
    EXPECT_EQ(op.residual(0.8, SpectralField(32)).l2_norm(), 0.0);
    EXPECT_EQ(gravity_op().residual(0.0, SpectralField(32)).l2_norm(), 0.0);
}

TEST(WaveOperator, LinearPartAtZeroAmplitude) {
    const PhysicalParams p{1.3, 0.6, 0.9};
    const WaveOperator op(preset("bulk-forced").forcing, p, 32, 16);
    std::mt19937 rng(7);
    const auto psi = random_psi(rng, 32, 0.01);
    const auto P = op.residual(0.0, psi);
    for (int xi = 1; xi < 16; ++xi) {
        const cplx sym = p.g * symbol::dirichlet_neumann(xi, p.h) - cplx(0.0, p.c * kTwoPi * xi);
        EXPECT_LT(std::abs(P.coeff(xi) - sym * psi.coeff(xi)), 1e-13);
    }
}

TEST(WaveOperator, PackIsAnIsometry) {
    std::mt19937 rng(8);
    const auto f = random_psi(rng, 64, 1.0);
    const auto v = pack(f);
    EXPECT_EQ(v.size(), 62);
    EXPECT_NEAR(v.norm(), f.l2_norm(), 1e-15);
    EXPECT_LT((unpack(v) - f).max_abs_coeff(), 1e-16);
}

TEST(WaveOperator, ResidualSplitsIntoPrincipalAndRemainder) {
    const auto op = gravity_op();
    std::mt19937 rng(9);
    const auto psi = random_psi(rng, 32, 0.02);
    const auto s = op.trace_state(0.4, psi);
    const auto P = op.residual(s, psi);
    const auto AQ = op.apply_A(s.xy, psi) + op.remainder_Q(s, psi);
    EXPECT_LT((P - AQ).l2_norm(), 1e-12 * P.l2_norm());
}

TEST(WaveOperator, InvertRoundTripAndMethodsAgree) {
    const auto op = gravity_op();
    std::mt19937 rng(10);
    const auto psi = random_psi(rng, 32, 0.02);
    const auto rhs = random_psi(rng, 32, 1.0);
    const auto xy = op.xy_fields(0.3, psi);
    const auto a = op.invert_A(xy, rhs, {InvertMethod::iterative});
    const auto b = op.invert_A(xy, rhs, {InvertMethod::dense});
    EXPECT_LT((op.apply_A(xy, a) - rhs).l2_norm(), 1e-10 * rhs.l2_norm());
    EXPECT_LT((a - b).l2_norm(), 1e-9 * b.l2_norm());
}

TEST(WaveOperator, FixedPointMapIsInverseOfPrincipalPart) {
    const auto op = gravity_op();
    std::mt19937 rng(11);
    const auto psi = random_psi(rng, 32, 0.02);
    const auto F = op.fixed_point_F(0.3, psi);
    const auto expect = op.invert_A(0.3, psi, op.residual(0.3, psi).mean_free());
    EXPECT_LT((F - expect).l2_norm(), 1e-9 * (1.0 + expect.l2_norm()));
}

TEST(WaveOperator, LostEllipticityIsSingular) {
    const auto op = gravity_op();
    EllipticityFields xy;
    xy.X.assign(static_cast<std::size_t>(op.m()), 0.0);
    xy.Y = xy.X;
    SpectralField rhs(32);
    rhs.set_coeff(1, 1.0);
    EXPECT_THROW(op.invert_A(xy, rhs), SingularOperatorError);
    EXPECT_THROW(linearized_symbol(3, PhysicalParams{0.0, 0.0, 1.0}), SingularOperatorError);
}

TEST(WaveOperator, TruncationMismatchIsShapeError) {
    EXPECT_THROW(gravity_op().residual(0.1, SpectralField(16)), ShapeError);
    EXPECT_THROW(WaveOperator(ForcingSpec{}, PhysicalParams{}, 6 + 1), InvalidGridError);
}

TEST(WaveOperator, LinearizedSymbolMatchesDefinition) {
    const PhysicalParams p{0.8, 1.4, 0.6};
    for (int xi : {-3, 1, 5}) {
        const double k = kTwoPi * std::abs(xi);
        const cplx expect = 1.0 + p.g * k * (std::tanh(k * p.h) - 1.0) / cplx(p.g * k, -kTwoPi * p.c * xi);
        EXPECT_LT(std::abs(linearized_symbol(xi, p) - expect), 1e-14);
        EXPECT_LT(std::abs(linearized_symbol_deviation(xi, p) - (expect - 1.0)), 1e-14);
    }
}
