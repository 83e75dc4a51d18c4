#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace cim;
using cim::test::planar_line;
using cim::test::vec;

namespace {

PointSet pts(std::initializer_list<Vector> ps) { return PointSet(std::vector<Vector>(ps)); }

/// Reflector sets S1..S4 on a random linear or affine pair.
std::vector<OperatorSet> reflector_sets(const AffineSubspace& u1, const AffineSubspace& u2) {
  const auto r1 = IsometryOp::reflector(u1), r2 = IsometryOp::reflector(u2), id = IsometryOp::identity();
  const Index n = u1.ambient_dim();
  return {OperatorSet({id, r1, r2}, n), OperatorSet({id, r1, r2 * r1}, n), OperatorSet({id, r1, r2, r2 * r1}, n),
          OperatorSet({id, r1, r2, r2 * r1, r1 * r2, IsometryOp::compose({r1, r2, r1})}, n)};
}

}  // namespace

TEST(CircumcenterPoints, Singleton) {
  const auto r = circumcenter_points(pts({vec({3, 4})}));
  ASSERT_TRUE(r.exists());
  EXPECT_EQ(*r.value, vec({3, 4}));
  EXPECT_EQ(r.radius, 0.0);
}

TEST(CircumcenterPoints, RightTriangle) {
  const auto r = circumcenter_points(pts({vec({0, 0}), vec({2, 0}), vec({0, 2})}));
  ASSERT_TRUE(r.exists());
  EXPECT_LE((*r.value - vec({1, 1})).norm(), 1e-14);
  EXPECT_NEAR(r.radius, std::sqrt(2.0), 1e-14);
}

TEST(CircumcenterPoints, CollinearTripleIsEmpty) {
  EXPECT_FALSE(circumcenter_points(pts({vec({0, 0}), vec({1, 0}), vec({2, 0})})).exists());
}

TEST(CircumcenterPoints, PairGivesMidpoint) {
  const auto r = circumcenter_points(pts({vec({0, 0}), vec({2, 0})}));
  ASSERT_TRUE(r.exists());
  EXPECT_LE((*r.value - vec({1, 0})).norm(), 1e-15);
}

TEST(CircumcenterPoints, DuplicatesAreHarmless) {
  const auto r = circumcenter_points(pts({vec({0, 0}), vec({2, 0}), vec({0, 0}), vec({0, 2}), vec({2, 0})}));
  ASSERT_TRUE(r.exists());
  EXPECT_LE((*r.value - vec({1, 1})).norm(), 1e-14);
}

TEST(CircumcenterPoints, RejectsBadInput) {
  EXPECT_THROW(PointSet(std::vector<Vector>{}), InputError);
  EXPECT_THROW(pts({vec({0, 0}), vec({1, 0, 0})}), InputError);
  EXPECT_THROW(circumcenter_points(pts({vec({0})}), 0.0), InputError);
}

TEST(CircumcenterOracle, Examples) {
  const auto r = circumcenter_oracle(pts({vec({0, 0}), vec({2, 0}), vec({0, 2})}));
  ASSERT_TRUE(r.exists());
  EXPECT_LE((*r.value - vec({1, 1})).norm(), 1e-14);

  const auto s = circumcenter_oracle(pts({vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})}));
  ASSERT_TRUE(s.exists());
  EXPECT_LE((*s.value - Vector::Constant(3, 1.0 / 3)).norm(), 1e-14);
  EXPECT_FALSE(circumcenter_oracle(pts({vec({0, 0}), vec({1, 0}), vec({2, 0})})).exists());
}

TEST(CircumcenterPoints, ValueInAffineHull) {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 2 + trial % 6;
    const Index m = 1 + trial % std::min<Index>(d + 1, 5);
    std::vector<Vector> ps;
    for (Index i = 0; i < m; ++i) ps.push_back(rng.normal_vector(d));
    const PointSet k(ps);
    const auto r = circumcenter_points(k);
    ASSERT_TRUE(r.exists());  // affinely independent almost surely
    EXPECT_LE(affine_hull(k).distance(*r.value), 1e-9 * (1 + r.radius));
    for (const auto& p : ps) EXPECT_LE(std::abs((*r.value - p).norm() - r.radius), r.residual + 1e-15);
  }
}

TEST(CircumcenterMap, TwoElementSetGivesMidpoint) {
  Rng rng(42);
  const auto t = IsometryOp::reflector(random_subspace(4, 2, rng));
  const OperatorSet s({IsometryOp::identity(), t}, 4);
  const Vector x = rng.normal_vector(4);
  EXPECT_LE((circumcenter_map(s, x) - 0.5 * (x + t(x))).norm(), 1e-12);
}

TEST(CircumcenterMap, FourPointsOnUnitCircle) {
  const auto sets = reflector_sets(AffineSubspace(planar_line(0)), AffineSubspace(planar_line(std::numbers::pi / 4)));
  const auto image = sets[2].apply_all(vec({0, 1}));
  EXPECT_LE((image[1] - vec({0, -1})).norm(), 1e-15);
  EXPECT_LE((image[2] - vec({1, 0})).norm(), 1e-15);
  EXPECT_LE((image[3] - vec({-1, 0})).norm(), 1e-15);
  EXPECT_LE(circumcenter_map(sets[2], vec({0, 1})).norm(), 1e-15);
}

TEST(CircumcenterMap, FixesCommonFixedPoints) {
  Rng rng(43);
  const Vector z = rng.normal_vector(5);
  for (const auto& s : reflector_sets(test::affine_through(z, 2, rng), test::affine_through(z, 3, rng))) {
    EXPECT_LE((circumcenter_map(s, z) - z).norm(), 1e-12 * (1 + z.norm()));
  }
}

TEST(CircumcenterMap, ReportsPropernessFailureWithResidual) {
  Rng rng(49);
  const auto sets = reflector_sets(AffineSubspace(random_subspace(6, 3, rng)), AffineSubspace(random_subspace(6, 3, rng)));
  const Vector x = rng.normal_vector(6);
  try {
    circumcenter_map(sets[3], x, 1e-300);
    FAIL() << "expected ProperError";
  } catch (const ProperError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(CircumcenterViaFixpoint, MatchesCircumcenterMap) {
  Rng rng(44);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector z = rng.normal_vector(6);
    const auto u1 = test::affine_through(z, 3, rng), u2 = test::affine_through(z, 3, rng);
    const AffineSubspace both[] = {u1, u2};
    const auto w = *intersect_all(both);
    const Vector x = rng.normal_vector(6) * 3;
    for (const auto& s : reflector_sets(u1, u2)) {
      EXPECT_LE((circumcenter_via_fixpoint(s, x, w) - circumcenter_map(s, x)).norm(), 1e-9 * (1 + x.norm()));
    }
  }
}

TEST(CircumcenterViaFixpoint, LinesThroughOriginAndMembers) {
  const auto s = reflector_sets(AffineSubspace(planar_line(0.2)), AffineSubspace(planar_line(1.0)))[0];
  const AffineSubspace origin(LinearSubspace(2));
  const Vector x = vec({0.3, 2.0});
  const PointSet image(s.apply_all(x));
  EXPECT_LE((circumcenter_via_fixpoint(s, x, origin) - affine_hull(image).project(Vector::Zero(2))).norm(), 1e-14);
  EXPECT_LE(circumcenter_via_fixpoint(s, Vector::Zero(2), origin).norm(), 1e-15);
}

TEST(CircumcenterViaFixpoint, RejectsWOutsideFixedSet) {
  const auto s = reflector_sets(AffineSubspace(planar_line(0)), AffineSubspace(planar_line(1.0)))[0];
  EXPECT_THROW(circumcenter_via_fixpoint(s, vec({1, 1}), AffineSubspace(planar_line(0))), InputError);
}

TEST(CircumcenterProperties, FirmQuasinonexpansiveEquality) {
  Rng rng(45);
  for (int trial = 0; trial < 60; ++trial) {
    const Vector z = rng.normal_vector(7);
    const auto u1 = test::affine_through(z, 4, rng), u2 = test::affine_through(z, 3, rng);
    const AffineSubspace both[] = {u1, u2};
    const auto w = *intersect_all(both);
    const Vector x = 5 * rng.normal_vector(7);
    const Vector y = w.anchor() + w.direction().basis() * rng.normal_vector(w.dim());
    for (const auto& s : reflector_sets(u1, u2)) {
      const Vector c = circumcenter_map(s, x);
      const double lhs = (c - y).squaredNorm() + (c - x).squaredNorm();
      EXPECT_LE(test::rel_gap(lhs, (x - y).squaredNorm()), 1e-9);
      // ‖z − CC x‖² + ‖CC x − T x‖² = ‖z − x‖² for every T in S
      for (const auto& tx : s.apply_all(x)) {
        EXPECT_LE(test::rel_gap((y - c).squaredNorm() + (c - tx).squaredNorm(), (y - x).squaredNorm()), 1e-9);
      }
    }
  }
}

TEST(CircumcenterProperties, EquidistantAndInHull) {
  Rng rng(46);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u1 = AffineSubspace(random_subspace(6, 3, rng)), u2 = AffineSubspace(random_subspace(6, 2, rng));
    const Vector x = rng.normal_vector(6);
    for (const auto& s : reflector_sets(u1, u2)) {
      const Vector c = circumcenter_map(s, x);
      const PointSet image(s.apply_all(x));
      const double r = (c - x).norm();
      for (const auto& p : image.points()) EXPECT_LE(std::abs((c - p).norm() - r), 1e-8 * (1 + r));
      EXPECT_LE(affine_hull(image).distance(c), 1e-9 * (1 + x.norm()));
    }
  }
}

TEST(CircumcenterProperties, HomogeneousAndQuasitranslation) {
  Rng rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix common = rng.normal_matrix(6, 1);
    Matrix a(6, 3), b(6, 2);
    a << common, rng.normal_matrix(6, 2);
    b << common, rng.normal_matrix(6, 1);
    const AffineSubspace u1(orthonormal_basis(a, 6)), u2(orthonormal_basis(b, 6));
    const Vector x = rng.normal_vector(6);
    const Vector z = 2.5 * common.col(0);
    const double lambda = rng.uniform(-3, 3);
    for (const auto& s : reflector_sets(u1, u2)) {
      const Vector c = circumcenter_map(s, x);
      EXPECT_LE((circumcenter_map(s, lambda * x) - lambda * c).norm(), 1e-9 * (1 + std::abs(lambda) * x.norm()));
      EXPECT_LE((circumcenter_map(s, x + z) - (c + z)).norm(), 1e-9 * (1 + (x + z).norm()));
    }
  }
}

TEST(CircumcenterProperties, DuplicateOperatorLeavesResultUnchanged) {
  Rng rng(48);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u1 = AffineSubspace(random_subspace(5, 2, rng)), u2 = AffineSubspace(random_subspace(5, 3, rng));
    const Vector x = rng.normal_vector(5);
    for (const auto& s : reflector_sets(u1, u2)) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        auto ops = s.ops();
        ops.push_back(ops[i]);
        EXPECT_LE((circumcenter_map(OperatorSet(ops, 5), x) - circumcenter_map(s, x)).norm(), 1e-10 * (1 + x.norm()));
      }
    }
  }
}
