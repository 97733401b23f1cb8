#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ldg/manifold.hpp"

using namespace ldg;

namespace {

const MaterialParams kUnit(1, 1, 1);

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return normalized({g(rng), g(rng), g(rng)});
}

SymMatrix random_sym(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  return {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
}

SymMatrix sym2(int i, int j) {  // e_i e_j^T + e_j e_i^T
  Mat3 m;
  m(i, j) += 1.0;
  m(j, i) += 1.0;
  return SymMatrix::sym_part(m);
}

}  // namespace

TEST(LimitManifold, SPlusAtUnitConstants) { EXPECT_DOUBLE_EQ(kUnit.s_plus(), 1.5); }

TEST(LimitManifold, SPlusSatisfiesQuadratic) {
  const MaterialParams p(0.7, 1.3, 2.1);
  const double s = p.s_plus();
  EXPECT_NEAR(2 * p.c2() * s * s - p.b2() * s - 3 * p.a2(), 0.0, 1e-14);
}

TEST(Projection, IdempotentOnManifold) {
  std::mt19937_64 rng(1);
  const LimitManifold m(kUnit);
  for (int t = 0; t < 200; ++t) {
    const ManifoldPoint pt = make_point(m, random_unit(rng));
    const ManifoldPoint again = project_to_manifold(pt.q.sym(), m);
    EXPECT_LE(frob_norm(again.q.sym() - pt.q.sym()), 1e-12);
    const ManifoldPoint twice = project_to_manifold(again.q.sym(), m);
    EXPECT_LE(frob_norm(twice.q.sym() - again.q.sym()), 1e-12);
  }
}

TEST(Projection, CommutingPerturbationKeepsDirector) {
  const LimitManifold m(kUnit);
  const ManifoldPoint pt = make_point(m, {0, 0, 1});
  const SymMatrix q = pt.q.sym() + 0.01 * pt.q.sym() + 0.02 * SymMatrix::identity();
  const ManifoldPoint pr = project_to_manifold(q, m);
  EXPECT_NEAR(std::abs(pr.director[2]), 1.0, 1e-14);
}

TEST(Projection, BeatsDenseSamplingOfTheManifold) {
  std::mt19937_64 rng(2);
  const LimitManifold m(kUnit);
  std::vector<SymMatrix> samples;
  for (int k = 0; k < 10000; ++k) samples.push_back(make_point(m, random_unit(rng)).q.sym());
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 1000; ++t) {
    const SymMatrix base = make_point(m, random_unit(rng)).q.sym();
    const QTensor dir(random_sym(rng));
    const SymMatrix q = base + (0.2 * m.s * u(rng) / frob_norm(dir)) * dir.sym();
    const double d = frob_norm(project_to_manifold(q, m).q.sym() - q);
    double best = 1e300;
    for (const auto& s : samples) best = std::min(best, frob_norm(s - q));
    EXPECT_LE(d, best + 1e-12);
  }
}

TEST(Projection, DegenerateSpectrumThrows) {
  const LimitManifold m(kUnit);
  try {
    project_to_manifold(SymMatrix{}, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateSpectrum);
  }
  // Oblate tensor: top two eigenvalues equal.
  EXPECT_THROW(project_to_manifold(SymMatrix{0.5, 0.5, -1, 0, 0, 0}, m), Error);
}

TEST(Split, BasePointIsNormal) {
  const LimitManifold m(kUnit);
  const ManifoldPoint pt = make_point(m, normalized({1, 2, 3}));
  const auto sp = split_tangent_normal(pt.q.sym(), pt, m);
  EXPECT_LE(frob_norm(sp.tangential), 1e-14);
  EXPECT_LE(frob_norm(sp.normal - pt.q.sym()), 1e-14);
}

TEST(Split, RankOneTangentHasNoNormalPart) {
  const LimitManifold m(kUnit);
  const ManifoldPoint pt = make_point(m, {1, 0, 0});
  const SymMatrix a = sym2(0, 1);
  EXPECT_LE(tangency_residual(a, pt, m), 1e-15);
  const auto sp = split_tangent_normal(a, pt, m);
  EXPECT_LE(frob_norm(sp.normal), 1e-15);
  EXPECT_LE(frob_norm(sp.tangential.sym() - a), 1e-15);
}

TEST(Split, IdentityIsNormal) {
  const LimitManifold m(kUnit);
  const ManifoldPoint pt = make_point(m, normalized({-1, 0.3, 2}));
  const auto sp = split_tangent_normal(SymMatrix::identity(), pt, m);
  EXPECT_LE(frob_norm(sp.tangential), 1e-14);
  EXPECT_LE(frob_norm(sp.normal - SymMatrix::identity()), 1e-14);
}

TEST(Split, InvariantsOnRandomInputs) {
  std::mt19937_64 rng(4);
  const MaterialParams p(0.8, 1.7, 1.1);
  const LimitManifold m(p);
  for (int t = 0; t < 2000; ++t) {
    const ManifoldPoint pt = make_point(m, random_unit(rng));
    const QTensor a(random_sym(rng));
    const auto sp = split_tangent_normal(a.sym(), pt, m);
    EXPECT_LE(frob_norm(sp.tangential.sym() + sp.normal - a.sym()), 1e-12);
    EXPECT_LE(tangency_residual(sp.tangential.sym(), pt, m), 1e-10);
    EXPECT_LE(normality_residual(sp.normal, pt), 1e-10);
    EXPECT_TRUE(is_traceless(sp.normal, 1e-13));  // S0 input keeps a traceless normal part
    EXPECT_LE(frob_norm(normal_part(sp.tangential.sym(), pt, m)), 1e-10);
    EXPECT_NEAR(frob_inner(sp.tangential.sym(), sp.normal), 0.0, 1e-12);
  }
}

TEST(Split, DimensionsOfTangentAndNormalSpaces) {
  const LimitManifold m(kUnit);
  const ManifoldPoint pt = make_point(m, normalized({0.3, -0.4, 0.8}));
  const auto frame = perpendicular_frame(pt.director);
  const SymMatrix t1 = tangent_vector(pt, frame[0]).sym(), t2 = tangent_vector(pt, frame[1]).sym();
  // Normal directions in S0: the base point and the two traceless combinations of frame outer products.
  const SymMatrix n1 = pt.q.sym();
  const SymMatrix n2 = SymMatrix::outer(frame[0]) - SymMatrix::outer(frame[1]);
  Mat3 cross_uw;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) cross_uw(i, j) = frame[0][i] * frame[1][j] + frame[1][i] * frame[0][j];
  const SymMatrix n3b = SymMatrix::sym_part(cross_uw);
  const SymMatrix tangents[2] = {t1, t2};
  const SymMatrix normals[3] = {n1, n2, n3b};
  for (const auto& t : tangents) EXPECT_LE(tangency_residual(t, pt, m), 1e-14);
  for (const auto& n : normals) {
    EXPECT_LE(normality_residual(n, pt), 1e-14);
    EXPECT_TRUE(is_traceless(n, 1e-14));
    for (const auto& t : tangents) EXPECT_NEAR(frob_inner(t, n), 0.0, 1e-14);
  }
  EXPECT_NEAR(frob_inner(t1, t2), 0.0, 1e-14);
  EXPECT_NEAR(frob_inner(n1, n2), 0.0, 1e-14);
  EXPECT_NEAR(frob_inner(n1, n3b), 0.0, 1e-14);
  EXPECT_NEAR(frob_inner(n2, n3b), 0.0, 1e-14);
}

TEST(SecondFundamentalForm, FrameValueAtQ0) {
  const LimitManifold m(kUnit);
  const double s = m.s;
  const ManifoldPoint q0 = make_point(m, {1, 0, 0});
  const SymMatrix v1 = s * sym2(0, 1);
  const SymMatrix v2 = s * sym2(0, 2);
  EXPECT_LE(frob_norm(second_fundamental_form(v1, v1, q0, m).sym() - 2 * s * SymMatrix{-1, 1, 0, 0, 0, 0}), 1e-14);
  EXPECT_LE(frob_norm(second_fundamental_form(v1, v2, q0, m).sym() - s * SymMatrix{0, 0, 0, 0, 0, 1}), 1e-14);
  EXPECT_LE(frob_norm(second_fundamental_form(v2, v2, q0, m).sym() - 2 * s * SymMatrix{-1, 0, 1, 0, 0, 0}), 1e-14);
}

TEST(SecondFundamentalForm, ZeroArgumentAndSymmetry) {
  std::mt19937_64 rng(6);
  const LimitManifold m(kUnit);
  for (int t = 0; t < 200; ++t) {
    const ManifoldPoint pt = make_point(m, random_unit(rng));
    const auto f = perpendicular_frame(pt.director);
    const SymMatrix x = tangent_vector(pt, f[0]).sym(), y = (0.3 * tangent_vector(pt, f[0]) + tangent_vector(pt, f[1])).sym();
    EXPECT_EQ(frob_norm(second_fundamental_form(x, SymMatrix{}, pt, m)), 0.0);
    const QTensor xy = second_fundamental_form(x, y, pt, m), yx = second_fundamental_form(y, x, pt, m);
    EXPECT_LE(frob_norm(xy.sym() - yx.sym()), 1e-12);
    EXPECT_LE(normality_residual(xy.sym(), pt), 1e-12);
  }
}

TEST(SecondFundamentalForm, MatchesCurveThroughProjection) {
  std::mt19937_64 rng(7);
  const LimitManifold m(MaterialParams(1.2, 0.9, 1.4));
  for (int t = 0; t < 200; ++t) {
    const ManifoldPoint pt = make_point(m, random_unit(rng));
    const auto f = perpendicular_frame(pt.director);
    SymMatrix x = (0.6 * tangent_vector(pt, f[0]) - 0.8 * tangent_vector(pt, f[1])).sym();
    x = (1.0 / frob_norm(x)) * x;
    const double h = 1e-3;
    const auto gamma = [&](double tt) { return project_to_manifold(pt.q.sym() + tt * x, m).q.sym(); };
    const SymMatrix dd = (1.0 / (h * h)) * (gamma(h) - 2.0 * gamma(0) + gamma(-h));
    EXPECT_LE(frob_norm(dd - second_fundamental_form(x, x, pt, m).sym()), 1e-4);
  }
}

TEST(SecondFundamentalForm, RejectsNonTangentInput) {
  const LimitManifold m(kUnit);
  const ManifoldPoint pt = make_point(m, {1, 0, 0});
  try {
    second_fundamental_form(pt.q.sym(), sym2(0, 1), pt, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotTangent);
  }
}

TEST(HarmonicRhs, ZeroGradient) {
  const LimitManifold m(kUnit);
  const ManifoldPoint pt = make_point(m, {0, 1, 0});
  for (auto form : {HarmonicForm::ii, HarmonicForm::iii, HarmonicForm::iv})
    EXPECT_EQ(frob_norm(harmonic_rhs(pt, {QTensor(), QTensor(), QTensor()}, m, form)), 0.0);
}

TEST(HarmonicRhs, HedgehogAnalyticGradientsAtUnitX) {
  const LimitManifold m(kUnit);
  const double s = m.s;
  // Q = s(x x^T/|x|^2 - I/3) at x = e1: dQ/dx_a = s(e1 e_a^T + e_a e1^T) for a != 1, zero for a = 1.
  const ManifoldPoint pt = make_point(m, {1, 0, 0});
  const std::array<QTensor, 3> grad{QTensor(), QTensor(s * sym2(0, 1)), QTensor(s * sym2(0, 2))};
  const QTensor f3 = harmonic_rhs(pt, grad, m, HarmonicForm::iii);
  const QTensor f4 = harmonic_rhs(pt, grad, m, HarmonicForm::iv);
  const QTensor f2 = harmonic_rhs(pt, grad, m, HarmonicForm::ii);
  EXPECT_LE(frob_norm(f3 - f4), 1e-14);
  EXPECT_LE(frob_norm(f2 - f4), 1e-14);
  // Analytic Laplacian of the hedgehog at r = 1: -6 s (e1 e1^T - I/3).
  EXPECT_LE(frob_norm(f4.sym() - (-6.0) * pt.q.sym()), 1e-13);
}

TEST(HarmonicRhs, FormsAgreeOnRandomTangentFrames) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  const LimitManifold m(MaterialParams(0.6, 1.9, 0.8));
  for (int t = 0; t < 1000; ++t) {
    const ManifoldPoint pt = make_point(m, random_unit(rng));
    const auto f = perpendicular_frame(pt.director);
    std::array<QTensor, 3> grad;
    for (auto& g : grad) g = u(rng) * tangent_vector(pt, f[0]) + u(rng) * tangent_vector(pt, f[1]);
    const QTensor f2 = harmonic_rhs(pt, grad, m, HarmonicForm::ii);
    const QTensor f3 = harmonic_rhs(pt, grad, m, HarmonicForm::iii);
    const QTensor f4 = harmonic_rhs(pt, grad, m, HarmonicForm::iv);
    const double scale = std::max(1.0, frob_norm(f4));
    EXPECT_LE(frob_norm(f2 - f4), 1e-10 * scale);
    EXPECT_LE(frob_norm(f3 - f4), 1e-10 * scale);
    EXPECT_LE(frob_norm(f2 - f3), 1e-10 * scale);
    EXPECT_LE(normality_residual(f4.sym(), pt), 1e-10 * scale);
  }
}

TEST(HarmonicRhs, RejectsNonTangentGradient) {
  const LimitManifold m(kUnit);
  const ManifoldPoint pt = make_point(m, {1, 0, 0});
  EXPECT_THROW(harmonic_rhs(pt, {pt.q, QTensor(), QTensor()}, m, HarmonicForm::iv), Error);
}

TEST(Identities, ZeroInputs) {
  const LimitManifold m(kUnit);
  const ManifoldPoint pt = make_point(m, {1, 0, 0});
  EXPECT_EQ(check_identities(SymMatrix{}, SymMatrix{}, SymMatrix{}, pt, m).worst(), 0.0);
}

TEST(Identities, RankOneFrameProductIsNormal) {
  const LimitManifold m(kUnit);
  const ManifoldPoint pt = make_point(m, {1, 0, 0});
  const SymMatrix x = sym2(0, 1), y = sym2(0, 2);
  EXPECT_LE(normality_residual(anticommutator(x, y), pt), 1e-15);
  EXPECT_LE(check_identities(x, y, pt.q.sym(), pt, m).worst(), 1e-14);
}

TEST(Identities, ProjectorIdentityOnBasePoint) {
  const LimitManifold m(MaterialParams(1.1, 0.7, 1.6));
  const ManifoldPoint pt = make_point(m, normalized({1, 1, -1}));
  const SymMatrix z = pt.q.sym();
  const SymMatrix p1 = (1.0 / m.s) * z + (1.0 / 3.0) * SymMatrix::identity();
  const double k = mat_mul(z, z).trace() / m.s + z.trace() / 3.0;
  EXPECT_LE(frob_norm(mat_mul(p1, z) - (k * p1).to_mat()), 1e-14);
}

TEST(Identities, CorruptedSPlusIsDetected) {
  std::mt19937_64 rng(10);
  const LimitManifold truth(kUnit);
  const LimitManifold bad(truth.s * 0.99);
  const ManifoldPoint pt = make_point(truth, random_unit(rng));
  const auto f = perpendicular_frame(pt.director);
  const SymMatrix x = tangent_vector(pt, f[0]).sym(), y = tangent_vector(pt, f[1]).sym();
  const SymMatrix z = normal_part(SymMatrix{0.3, -0.2, 0.5, 0.1, 0.7, -0.4}, pt, truth);
  EXPECT_LE(check_identities(x, y, z, pt, truth).worst(), 1e-13);
  const IdentityResiduals r = check_identities(x, x, z, pt, bad);
  EXPECT_GT(std::abs(r.trace_identity), 1e-4);
  EXPECT_GT(r.product_identity, 1e-4);
}

TEST(Identities, CommutatorCharacterisation) {
  const LimitManifold m(kUnit);
  const ManifoldPoint pt = make_point(m, {0, 0, 1});
  EXPECT_LE(harmonic_commutator_residual(pt.q.sym(), pt.q.sym()), 1e-15);
  EXPECT_GT(harmonic_commutator_residual(sym2(0, 2), pt.q.sym()), 0.1);
}
