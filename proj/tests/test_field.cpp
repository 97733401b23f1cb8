#include <gtest/gtest.h>

#include <cmath>

#include "ldg/field.hpp"

using namespace ldg;

namespace {

const MaterialParams kUnit(1, 1, 1);
const QTensor kM(0.3, -0.7, 0.2, 0.5, -0.1);

double center_trace_error(int n) {
  const GridSpec g = GridSpec::cube(n, 0.5, 1.5);
  const double s = kUnit.s_plus();
  const TensorField f = sample_field(g, [&](const Vec3& x) { return hedgehog_value(x, s); });
  const int c = (n + 1) / 2;
  const Node mid{c, c, c};
  const Vec3 x = g.position(mid);
  const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  return std::abs(grad_square_at(f, mid).trace() - 4.0 * s * s / r2);
}

}  // namespace

TEST(Grid, IndexRoundTripAndLayers) {
  const GridSpec g({3, 4, 5}, {0, 0, 0}, {1, 2, 3});
  for (std::size_t idx = 0; idx < g.node_count(); ++idx) EXPECT_EQ(g.index(g.node(idx)), idx);
  EXPECT_EQ(g.node_count(), 5u * 6u * 7u);
  EXPECT_DOUBLE_EQ(g.h(1), 2.0 / 5.0);
  EXPECT_EQ(g.layer({0, 2, 2}), 0);
  EXPECT_EQ(g.layer({2, 2, 3}), 2);
  EXPECT_EQ(g.interior_nodes().size(), 3u * 4u * 5u);
  EXPECT_DOUBLE_EQ(g.trapezoid_weight({0, 0, 1}), 0.25);
  EXPECT_THROW(GridSpec({2, 4, 4}, {0, 0, 0}, {1, 1, 1}), Error);
  EXPECT_THROW(GridSpec({4, 4, 4}, {0, 0, 0}, {1, 0, 1}), Error);
}

TEST(Stencils, LaplacianExactOnQuadratic) {
  const GridSpec g({5, 6, 7}, {-1, -1, -1}, {1, 2, 1});
  const TensorField f = sample_field(g, [](const Vec3& x) { return (x[0] * x[0] + 2 * x[1] * x[1] - x[2]) * kM; });
  for (const Node& n : g.interior_nodes()) EXPECT_LE(frob_norm(laplacian(f, n) - 6.0 * kM), 1e-11);
}

TEST(Stencils, GradientExactOnLinear) {
  const GridSpec g = GridSpec::cube(4, 0, 1);
  const TensorField f = sample_field(g, [](const Vec3& x) { return (2 * x[0] - 3 * x[1] + 0.5 * x[2]) * kM; });
  for (const Node& n : g.interior_nodes()) {
    const auto gr = gradient(f, n);
    EXPECT_LE(frob_norm(gr[0] - 2.0 * kM), 1e-13);
    EXPECT_LE(frob_norm(gr[1] + 3.0 * kM), 1e-13);
    EXPECT_LE(frob_norm(gr[2] - 0.5 * kM), 1e-13);
  }
}

TEST(Stencils, BoundaryNodeRejected) {
  const GridSpec g = GridSpec::cube(4, 0, 1);
  const TensorField f(g);
  try {
    laplacian(f, Node{0, 2, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BoundaryNode);
  }
  EXPECT_THROW(gradient(f, Node{2, 5, 2}), Error);
  EXPECT_THROW(grad_square(f, Node{2, 2, 0}), Error);
}

TEST(Stencils, DiscreteProductRuleIsExact) {
  const GridSpec g = GridSpec::cube(5, 0, 1);
  const TensorField f = sample_field(g, [](const Vec3& x) {
    return QTensor(std::sin(x[0]), x[1] * x[2], std::cos(x[2]), x[0] * x[0], 0.3 * x[1]);
  });
  MatrixField sq(g);
  for (std::size_t i = 0; i < g.node_count(); ++i) sq[i] = mat_mul(f[i].sym(), f[i].sym());
  for (const Node& n : g.interior_nodes()) {
    const Mat3 lhs = laplacian_at(sq, n);
    const Mat3 lap = laplacian_at(f, n).sym().to_mat(), q = f(n).sym().to_mat();
    const Mat3 rhs = q * lap + lap * q + 2.0 * grad_product(f, f, n);
    EXPECT_LE(frob_norm(lhs - rhs), 1e-10);
    EXPECT_LE(frob_norm(grad_square(f, n).to_mat() - grad_product(f, f, n)), 1e-12);
  }
}

TEST(Stencils, HedgehogGradientSquareIsSecondOrder) {
  const double e1 = center_trace_error(7), e2 = center_trace_error(15);
  EXPECT_LT(e1, 0.2);
  EXPECT_NEAR(e1 / e2, 4.0, 0.4);
}

TEST(Energy, ConstantFieldHasZeroDirichletAndShiftedBulkAtMinimum) {
  const GridSpec g = GridSpec::cube(4, -1, 1);
  const TensorField f(g, QTensor::uniaxial(kUnit.s_plus(), {0, 1, 0}));
  const EnergyParts e = energy_ldg(f, kUnit);
  EXPECT_EQ(e.dirichlet, 0.0);
  EXPECT_NEAR(e.bulk, 0.0, 1e-14);
  const TensorField zero(g);
  EXPECT_NEAR(energy_ldg(zero, kUnit).bulk, 7.0 / 16.0 * g.volume(), 1e-12);
}

TEST(Energy, LinearFieldIntegratesExactly) {
  const GridSpec g({4, 5, 6}, {0, -1, 0}, {2, 1, 1});
  const TensorField f = sample_field(g, [](const Vec3& x) { return x[1] * kM; });
  EXPECT_NEAR(energy_harmonic(f), g.volume() * frob_norm(kM) * frob_norm(kM), 1e-12);
  const MaterialParams p(1, 1, 1, 0.3);
  const EnergyParts e = energy_ldg(f, p);
  EXPECT_DOUBLE_EQ(e.total, 0.15 * e.dirichlet + e.bulk);
}

TEST(Norms, ConstantDifference) {
  const GridSpec g = GridSpec::cube(6, 0, 2);
  const TensorField a(g, kM), b(g);
  const FieldNorms n = norms(a, b, 0.5);
  EXPECT_NEAR(n.l2, frob_norm(kM) * std::sqrt(g.volume()), 1e-13);
  EXPECT_EQ(n.h1_semi, 0.0);
  EXPECT_NEAR(n.sup_interior, frob_norm(kM), 1e-15);
  EXPECT_THROW(norms(a, b, 1.0), Error);
  EXPECT_THROW(norms(a, TensorField(GridSpec::cube(5, 0, 2)), 0.5), Error);
}

TEST(Norms, MarginExcludesBoundaryLayer) {
  const GridSpec g = GridSpec::cube(9, 0, 1);
  ScalarField f(g);
  f(Node{1, 5, 5}) = 10.0;
  f(Node{5, 5, 5}) = 1.0;
  const auto mag = [](double v) { return std::abs(v); };
  EXPECT_EQ(interior_sup(f, 0.0, mag), 10.0);
  EXPECT_EQ(interior_sup(f, 0.25, mag), 1.0);
}

TEST(BoundaryData, HedgehogOnManifoldAndCenterCheck) {
  const GridSpec g = GridSpec::cube(6, -1, 1);
  const TensorField f = boundary_hedgehog(g, kUnit);
  EXPECT_LE(max_poly_min_residual(f, kUnit.s_plus(), false), 1e-14);
  try {
    boundary_hedgehog(GridSpec::cube(5, -1, 1), kUnit);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CenterOnLattice);
  }
}

TEST(BoundaryData, NearConstantStaysWithinEps) {
  const GridSpec g = GridSpec::cube(8, -4, 4);
  const double s = kUnit.s_plus();
  const QTensor p = QTensor::uniaxial(s, {1, 0, 0});
  for (auto pattern : {DirectorPattern::Constant, DirectorPattern::TiltSin, DirectorPattern::TwistLinear}) {
    const double eps = 0.2;
    const TensorField f = boundary_near_constant(g, kUnit, eps, pattern);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, frob_norm(f[i] - p));
    EXPECT_LE(worst, eps * s + 1e-14);
    EXPECT_LE(max_poly_min_residual(f, s, true), 1e-13);
    if (pattern == DirectorPattern::Constant) EXPECT_EQ(worst, 0.0);
    else EXPECT_GT(worst, 0.5 * eps * s);
  }
  EXPECT_THROW(boundary_near_constant(g, kUnit, -0.1, DirectorPattern::TiltSin), Error);
}
