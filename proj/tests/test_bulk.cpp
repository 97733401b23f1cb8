#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ldg/bulk.hpp"

using namespace ldg;

namespace {

const MaterialParams kUnit(1, 1, 1);

SymMatrix random_traceless(std::mt19937_64& rng, double range) {
  std::uniform_real_distribution<double> u(-range, range);
  return QTensor(u(rng), u(rng), u(rng), u(rng), u(rng)).sym();
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return normalized({g(rng), g(rng), g(rng)});
}

}  // namespace

TEST(BulkDensity, FrozenValues) {
  EXPECT_EQ(f_bulk(SymMatrix{}, kUnit), 0.0);
  EXPECT_DOUBLE_EQ(f_bulk_min(kUnit), -7.0 / 16.0);
  EXPECT_NEAR(f_bulk(QTensor::uniaxial(1.5, {0, 0, 1}).sym(), kUnit), -7.0 / 16.0, 1e-15);
  EXPECT_DOUBLE_EQ(f_bulk_shifted(SymMatrix{}, kUnit), 7.0 / 16.0);
  // Q = diag(1, -1, 0): t2 = 2, t3 = 0, f = -1 + 1 = 0.
  EXPECT_NEAR(f_bulk(SymMatrix{1, -1, 0, 0, 0, 0}, kUnit), 0.0, 1e-15);
}

TEST(BulkDensity, MinimumIsAttainedOnManifold) {
  std::mt19937_64 rng(1);
  const MaterialParams p(0.7, 1.4, 0.9);
  const double fmin = f_bulk_min(p);
  for (int t = 0; t < 2000; ++t) {
    const SymMatrix q = random_traceless(rng, 3.0);
    EXPECT_GE(f_bulk(q, p), fmin - 1e-12);
    EXPECT_NEAR(f_bulk(QTensor::uniaxial(p.s_plus(), random_unit(rng)).sym(), p), fmin, 1e-13);
  }
}

TEST(BulkDensity, IncrementMatchesDifference) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 1000; ++t) {
    const SymMatrix q = random_traceless(rng, 1.0), d = random_traceless(rng, 0.5);
    EXPECT_NEAR(f_bulk_increment(q, d, kUnit), f_bulk(q + d, kUnit) - f_bulk(q, kUnit), 1e-13);
  }
  const SymMatrix q = QTensor::uniaxial(1.5, {1, 0, 0}).sym();
  const SymMatrix tiny = 1e-9 * SymMatrix{0, 0, 0, 1, 0, 0};
  // Second order at a minimiser; plain subtraction would lose everything.
  const double inc = f_bulk_increment(q, tiny, kUnit);
  EXPECT_GE(inc, 0.0);
  EXPECT_LT(inc, 1e-16);
}

TEST(BulkGradient, CentralDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coef(0.5, 2.0);
  const double h = 1e-5;
  for (int t = 0; t < 500; ++t) {
    const MaterialParams p(coef(rng), coef(rng), coef(rng));
    const SymMatrix q = random_traceless(rng, 1.0), e = random_traceless(rng, 1.0);
    const double fd = (f_bulk(q + h * e, p) - f_bulk(q - h * e, p)) / (2 * h);
    EXPECT_NEAR(fd, frob_inner(grad_f_bulk(q, p).sym(), e), 1e-7 * std::max(1.0, frob_norm(e)));
  }
}

TEST(BulkGradient, VanishesAtCriticalPoints) {
  std::mt19937_64 rng(4);
  const MaterialParams p(1.3, 0.6, 1.1);
  EXPECT_EQ(frob_norm(grad_f_bulk(SymMatrix{}, p)), 0.0);
  for (int t = 0; t < 200; ++t) {
    const SymMatrix q = QTensor::uniaxial(p.s_plus(), random_unit(rng)).sym();
    EXPECT_LE(frob_norm(grad_f_bulk(q, p)), 1e-13);
  }
}

TEST(BulkGradient, IsTraceless) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) EXPECT_TRUE(is_traceless(grad_f_bulk(random_traceless(rng, 2.0), kUnit).sym()));
}

TEST(Distance, ClosedFormMatchesProjection) {
  std::mt19937_64 rng(6);
  const LimitManifold m(kUnit);
  for (int t = 0; t < 500; ++t) {
    const SymMatrix q = sample_near_manifold(m, 0.1, rng);
    const double d = frob_norm(project_to_manifold(q, m).q.sym() - q);
    const double dc = distance_to_manifold(q, m);
    EXPECT_NEAR(dc * dc, d * d, 1e-14);  // closed form is accurate in d^2, not d
  }
  EXPECT_NEAR(distance_to_manifold(SymMatrix{}, m), std::sqrt(2.0 / 3.0) * m.s, 1e-15);
}

TEST(DistComp, MinPolySquareMatchesDirectEvaluation) {
  std::mt19937_64 rng(7);
  const BulkCoeffs c = BulkCoeffs::min_poly_square();
  for (int t = 0; t < 500; ++t) {
    const double s = 0.5 + (rng() % 1000) / 500.0;
    const SymMatrix q = random_traceless(rng, 2.0);
    const double g = frob_norm(poly_min(q, s));
    EXPECT_NEAR(c.evaluate(q, s), s * s * g * g, 1e-11 * std::max(1.0, s * s * g * g));
  }
}

TEST(DistComp, ShiftedBulkMatchesDensity) {
  std::mt19937_64 rng(8);
  const MaterialParams p(0.9, 1.2, 1.6);
  const double s = p.s_plus();
  const BulkCoeffs c = BulkCoeffs::shifted_bulk(p);
  for (int t = 0; t < 500; ++t) {
    const SymMatrix q = random_traceless(rng, 2.0);
    EXPECT_NEAR(c.evaluate(q, s), s * s * f_bulk_shifted(q, p), 1e-11);
  }
}

TEST(DistComp, AdmissibleFamiliesAreComparableToDistanceSquared) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coef(0.5, 2.0);
  for (int t = 0; t < 5; ++t) {
    const MaterialParams p(coef(rng), coef(rng), coef(rng));
    for (const BulkCoeffs& c : {BulkCoeffs::min_poly_square(), BulkCoeffs::shifted_bulk(p)}) {
      const DistCompReport r = distcomp_check(c, p, 2000, t, 0.1);
      EXPECT_GT(r.samples_used, 1900);
      EXPECT_GT(r.ratio_min, 0.0);
      EXPECT_LT(r.ratio_max / r.ratio_min, 50.0);
    }
  }
}

TEST(DistComp, ViolatedConstraintsThrow) {
  try {
    distcomp_check(BulkCoeffs{}, kUnit, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConstraintViolated);
  }
  BulkCoeffs c = BulkCoeffs::min_poly_square();
  c.delta += 1e-3;
  EXPECT_THROW(distcomp_check(c, kUnit, 10), Error);
  EXPECT_THROW(distcomp_check(BulkCoeffs::min_poly_square(), kUnit, 0), Error);
}
