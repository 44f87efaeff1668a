#include <cmath>

#include <gtest/gtest.h>

#include "darcywave/elliptic_strip.hpp"

using namespace darcywave;

namespace {

BulkField scalar_field(const StripGrid& sg, double (*f)(double, double)) {
    BulkField out(sg.m_w(), sg.vertical(), 1);
    const auto w = torus_nodes(sg.m_w());
    for (int iz = 0; iz < out.m_z(); ++iz)
        for (int j = 0; j < sg.m_w(); ++j) out(0, iz, j) = f(w[static_cast<std::size_t>(j)], out.grid()[iz]);
    return out;
}

}  // namespace

TEST(EllipticStrip, ConstantSourceHasParabolicSolution) {
    const StripGrid sg{16, 12, 1.5};
    const auto sol = solve_mixed_bvp(scalar_field(sg, [](double, double) { return 1.0; }), SpectralField(sg.n, false));
    // u = (z^2 - h^2) / 2
    EXPECT_NEAR(sol.trace.coeff(0).real(), 1.5, 1e-12);
    for (int iz = 0; iz < sg.m_z; ++iz) {
        const double z = sol.u.grid()[iz];
        EXPECT_NEAR(sol.u(0, iz, 3), 0.5 * (z * z - 2.25), 1e-12);
    }
}

TEST(EllipticStrip, BottomDataDecaysByCosh) {
    const StripGrid sg{16, 32, 0.8};
    SpectralField f2(sg.n, false);
    for (int xi = 1; xi < 4; ++xi) f2.set_coeff(xi, cplx(0.3 / xi, -0.1));
    const auto sol = solve_mixed_bvp(BulkField(sg.m_w(), sg.vertical(), 1), f2);
    for (int xi = 1; xi < 4; ++xi) {
        const double k = 2 * M_PI * xi;
        EXPECT_LT(std::abs(sol.trace.coeff(xi) - f2.coeff(xi) / std::cosh(k * sg.h)), 1e-12);
    }
}

TEST(EllipticStrip, OscillatorySourceMatchesClosedForm) {
    const StripGrid sg{16, 32, 1.0};
    const auto sol = solve_mixed_bvp(scalar_field(sg, [](double w, double) { return std::cos(2 * M_PI * w); }),
                                     SpectralField(sg.n, false));
    const double k = 2 * M_PI;
    // u = (cosh(kz) / cosh(kh) - 1) cos(2 pi w) / k^2
    EXPECT_NEAR(sol.trace.coeff(1).real(), 0.5 * std::tanh(k) / k, 1e-12);
    EXPECT_NEAR(sol.trace.coeff(1).imag(), 0.0, 1e-14);
    for (int iz = 0; iz < sg.m_z; ++iz) {
        const double z = sol.u.grid()[iz];
        EXPECT_NEAR(sol.u(0, iz, 0), (std::cosh(k * z) / std::cosh(k) - 1.0) / (k * k), 1e-12);
    }
}

TEST(EllipticStrip, HarmonicExtensionMatchesDataAndNeumannSymbol) {
    const StripGrid sg{32, 32, 1.2};
    SpectralField f3(sg.n, false);
    f3.set_coeff(0, 0.4);
    for (int xi = 1; xi < 3; ++xi) f3.set_coeff(xi, cplx(std::exp(-xi), 0.2 / xi));
    const auto ext = harmonic_extension(f3, sg.vertical());
    const auto top = f3.to_grid(sg.m_w());
    for (int j = 0; j < sg.m_w(); ++j) EXPECT_NEAR(ext.v(0, sg.m_z - 1, j), top[static_cast<std::size_t>(j)], 1e-13);
    const Eigen::MatrixXd vz = derivative_z(ext.v, 0);
    const auto g = ext.neumann_trace.to_grid(sg.m_w());
    for (int j = 0; j < sg.m_w(); ++j) {
        EXPECT_NEAR(vz(0, j), 0.0, 1e-9);
        EXPECT_NEAR(vz(sg.m_z - 1, j), g[static_cast<std::size_t>(j)], 1e-9);
    }
}

TEST(EllipticStrip, GridMismatchesAreShapeErrors) {
    const StripGrid sg{16, 12, 1.0};
    EXPECT_THROW(solve_mixed_bvp(BulkField(sg.m_w(), sg.vertical(), 1), SpectralField(64, false)), ShapeError);
    EXPECT_THROW(solve_mixed_bvp(BulkField(sg.m_w(), VerticalGrid(NodeFamily::equispaced, 12, 1.0), 1),
                                 SpectralField(16, false)),
                 ShapeError);
}

TEST(EllipticStrip, ZeroForcingGivesZeroRemainder) {
    SpectralField psi(16);
    psi.set_coeff(1, 0.01);
    EXPECT_EQ(bulk_remainder_K(psi, ForcingSpec{}, StripGrid{16, 12, 1.0}).l2_norm(), 0.0);
}
