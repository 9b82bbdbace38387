#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "dmg/lie_group.hpp"
#include "test_support.hpp"

using namespace dmg;
using namespace testing_support;

namespace {

std::vector<GroupPtr> all_groups() {
  return {make_su2(), make_k(), make_so3(), make_so2(), make_rn(3)};
}

double dist(const LieGroup&, const Vec& a, const Vec& b) { return (a - b).norm(); }

}  // namespace

TEST_CASE("K product from the coordinate law") {
  KGroup K;
  Vec a(3), b(3), e(3);
  a << 1, 0, 0;
  b << 0, 1, 1;
  e << 2, 1, 1;
  CHECK((K.mul(a, b) - e).norm() == 0.0);
}

TEST_CASE("K product agrees with both matrix representations") {
  KGroup K;
  Rng rng(11);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 a = K.random(rng), b = K.random(rng);
    const Vec3 ab = K.mul(a, b);
    worst = std::max(worst, (k_to_real3(a) * k_to_real3(b) - k_to_real3(ab)).norm());
    worst = std::max(worst, (k_to_complex(a) * k_to_complex(b) - k_to_complex(ab)).norm());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("SU(2) identity and Hamilton product match the matrix view") {
  SU2Group S;
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Vec q = S.random(rng, 1.0), p = S.random(rng, 1.0);
    CHECK((S.mul(S.identity(), q) - q).norm() <= 1e-15);
    CHECK((su2_to_complex(q) * su2_to_complex(p) - su2_to_complex(S.mul(q, p))).norm() <= 1e-12);
    CHECK((su2_from_complex(su2_to_complex(q)) - q).norm() == 0.0);
  }
}

TEST_CASE("exp at zero is the identity") {
  for (auto& G : all_groups()) CHECK(dist(*G, G->exp(Vec::Zero(G->algebra_dim())), G->identity()) == 0.0);
}

TEST_CASE("SU(2) exp of a full turn is minus the identity") {
  SU2Group S;
  const Vec q = S.exp(Vec3(0, 0, 2 * std::numbers::pi));
  CHECK((q + S.identity()).norm() <= 1e-12);
}

TEST_CASE("SU(2) exp matches the 2x2 matrix exponential") {
  SU2Group S;
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const Vec3 xi = gauss(rng, 3, 1.5);
    const Mat2c oracle = expm_series(Mat2c(su2_algebra_to_complex(xi)));
    CHECK((su2_to_complex(S.exp(xi)) - oracle).norm() <= 1e-12);
    // Rotation about xi by angle |xi|.
    const Mat3 R = rot_of(S.exp(xi));
    CHECK((R - expm_series(Mat3(hat(xi)))).norm() <= 1e-12);
  }
}

TEST_CASE("K exp along the diagonal direction and against matrix exponentials") {
  KGroup K;
  for (double t : {-0.7, 0.3, 1.2}) {
    const Vec b = K.exp(Vec3(0, 0, t));
    CHECK((b - Vec(Vec3(0, 0, std::exp(t) - 1))).norm() <= 1e-10);
  }
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const Vec3 y = gauss(rng, 3);
    CHECK((k_to_real3(K.exp(y)) - expm_series(k_algebra_to_real3(y))).norm() <= 1e-10);
    CHECK((k_to_complex(K.exp(y)) - expm_series(k_algebra_to_complex(y))).norm() <= 1e-10);
    CHECK((K.log(K.exp(y)) - y).norm() <= 1e-12);
  }
}

TEST_CASE("SO(3) exp and log") {
  SO3Group G;
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Vec3 w = gauss(rng, 3, 0.8);
    CHECK((SO3Group::to_matrix(G.exp(w)) - expm_series(Mat3(hat(w)))).norm() <= 1e-12);
    CHECK((G.log(G.exp(w)) - w).norm() <= 1e-10);
  }
}

TEST_CASE("Ad: identity, conjugation oracle, isometry") {
  SU2Group S;
  KGroup K;
  Rng rng(13);
  for (auto& G : all_groups()) {
    const Vec xi = gauss(rng, G->algebra_dim());
    CHECK((G->Ad(G->identity()) * xi - xi).norm() <= 1e-15);
  }
  for (int i = 0; i < 100; ++i) {
    const Vec A = S.random(rng, 1.0);
    const Vec3 xi = gauss(rng, 3);
    const Mat2c U = su2_to_complex(A);
    const Vec3 oracle = su2_algebra_from_complex(U * su2_algebra_to_complex(xi) * U.adjoint());
    const Vec ad = S.Ad(A) * xi;
    CHECK((ad - oracle).norm() <= 1e-10);
    CHECK(std::abs(ad.norm() - xi.norm()) <= 1e-12);

    const Vec3 B = K.random(rng);
    const Mat3 M = k_to_real3(B);
    const Mat3 conj = M * k_algebra_to_real3(xi) * M.inverse();
    CHECK((Vec3(K.Ad(B) * xi) - Vec3(-conj(2, 0), -conj(2, 1), conj(0, 0))).norm() <= 1e-10);
  }
}

TEST_CASE("coad closed forms") {
  SU2Group S;
  KGroup K;
  CHECK((S.coad(Vec3(1, 0, 0), Vec3(0, 1, 0)) - Vec(Vec3(0, 0, 1))).norm() == 0.0);
  CHECK((K.coad(Vec3(0, 0, 1), Vec3(1, 0, 0)) - Vec(Vec3(1, 0, 0))).norm() == 0.0);
}

TEST_CASE("coad is minus-transpose-consistent with the bracket") {
  Rng rng(17);
  for (auto& G : all_groups()) {
    const int n = G->algebra_dim();
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
      const Vec xi = gauss(rng, n), mu = gauss(rng, n), eta = gauss(rng, n);
      worst = std::max(worst, std::abs(G->coad(xi, mu).dot(eta) + mu.dot(G->bracket(xi, eta))));
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("K bracket examples and the matrix commutator") {
  KGroup K;
  CHECK(K.bracket(Vec3(1, 0, 0), Vec3(0, 1, 0)).norm() == 0.0);
  CHECK((K.bracket(Vec3(1, 0, 0), Vec3(0, 0, 1)) - Vec(Vec3(1, 0, 0))).norm() == 0.0);
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const Vec3 a = gauss(rng, 3), b = gauss(rng, 3);
    const Mat3 A = k_algebra_to_real3(a), B = k_algebra_to_real3(b);
    CHECK((k_algebra_to_real3(K.bracket(a, b)) - (A * B - B * A)).norm() <= 1e-12);
    const Mat2c Ac = k_algebra_to_complex(a), Bc = k_algebra_to_complex(b);
    CHECK((k_algebra_to_complex(K.bracket(a, b)) - (Ac * Bc - Bc * Ac)).norm() <= 1e-12);
  }
}

TEST_CASE("su(2) bracket is the cross product of the identified basis") {
  const Mat2c e1 = su2_algebra_to_complex(Vec3(1, 0, 0));
  const Mat2c e2 = su2_algebra_to_complex(Vec3(0, 1, 0));
  const Mat2c e3 = su2_algebra_to_complex(Vec3(0, 0, 1));
  CHECK((e1 * e2 - e2 * e1 - e3).norm() <= 1e-15);
  CHECK((e2 * e3 - e3 * e2 - e1).norm() <= 1e-15);
  CHECK((e3 * e1 - e1 * e3 - e2).norm() <= 1e-15);
}

TEST_CASE("Jacobi identity") {
  Rng rng(19);
  for (auto& G : all_groups()) {
    const int n = G->algebra_dim();
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const Vec a = gauss(rng, n), b = gauss(rng, n), c = gauss(rng, n);
      const Vec j = G->bracket(a, G->bracket(b, c)) + G->bracket(b, G->bracket(c, a)) +
                    G->bracket(c, G->bracket(a, b));
      worst = std::max(worst, j.norm());
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("group axioms on 1000 samples") {
  Rng rng(23);
  const double tol = Tolerances{}.check_tol;
  for (auto& G : all_groups()) {
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const Vec a = G->random(rng), b = G->random(rng), c = G->random(rng);
      worst = std::max(worst, (G->mul(G->mul(a, b), c) - G->mul(a, G->mul(b, c))).norm());
      worst = std::max(worst, (G->mul(G->identity(), a) - a).norm());
      worst = std::max(worst, (G->mul(a, G->identity()) - a).norm());
      worst = std::max(worst, (G->mul(a, G->inv(a)) - G->identity()).norm());
      worst = std::max(worst, (G->mul(G->inv(a), a) - G->identity()).norm());
    }
    INFO(G->name());
    CHECK(worst <= tol);
  }
}

TEST_CASE("SU(2) norm drift over many multiplications") {
  SU2Group S;
  Rng rng(29);
  Vec q = S.identity();
  for (int i = 0; i < 10000; ++i) q = S.mul(q, S.random(rng, 1.0));
  CHECK(std::abs(q.norm() - 1.0) <= 1e-9);
}

TEST_CASE("K closure keeps c above -1") {
  KGroup K;
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const Vec a = K.random(rng, 2.0), b = K.random(rng, 2.0);
    CHECK(K.mul(a, b)[2] > -1.0);
  }
  CHECK_THROWS_AS(K.validate(Vec(Vec3(0, 0, -1))), DomainError);
  CHECK_THROWS_AS(group_mul(element(K, Vec3(0, 0, 0)), GroupElement{&K, Vec(Vec3(0, 0, -2))}),
                  DomainError);
}

TEST_CASE("Ad is a homomorphism") {
  Rng rng(37);
  for (auto& G : all_groups()) {
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
      const Vec a = G->random(rng), b = G->random(rng);
      worst = std::max(worst, (G->Ad(G->mul(a, b)) - G->Ad(a) * G->Ad(b)).norm());
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("generic Ad from lifts agrees with closed forms") {
  Rng rng(41);
  for (auto& G : all_groups()) {
    for (int i = 0; i < 20; ++i) {
      const Vec g = G->random(rng);
      CHECK((G->LieGroup::Ad(g) - G->Ad(g)).norm() <= 1e-10);
      const Vec xi = gauss(rng, G->algebra_dim());
      CHECK((G->fd_lift(Side::Left, g, xi) - G->left_lift(g, xi)).norm() <= 1e-8);
      CHECK((G->fd_lift(Side::Right, g, xi) - G->right_lift(g, xi)).norm() <= 1e-8);
    }
  }
}

TEST_CASE("translate_covector") {
  Rng rng(43);
  auto su2 = make_su2();
  auto so3 = make_so3();
  for (auto* G : {su2.get(), so3.get()}) {
    const Vec mu = gauss(rng, G->algebra_dim());
    // At the identity the pullback of an algebra-dual vector (embedded by the lift) is itself.
    const Mat J = G->lift_matrix(Side::Right, G->identity());
    const Vec mu_at = J * (J.transpose() * J).inverse() * mu;
    CHECK((translate_covector(Side::Right, element(*G, G->identity()), mu_at).coords - mu).norm() <=
          1e-12);
    for (int i = 0; i < 50; ++i) {
      const Vec g = G->random(rng), x = G->random(rng), g2 = G->random(rng);
      const Vec m = gauss(rng, G->coordinate_dim());
      const Vec xi = gauss(rng, G->algebra_dim());
      for (Side s : {Side::Left, Side::Right}) {
        const double lhs = translate_covector(s, element(*G, g), m).coords.dot(xi);
        CHECK(std::abs(lhs - m.dot(G->fd_lift(s, g, xi))) <= 1e-8);
      }
      // Functoriality of the pullback along right translations at a point x.
      const Mat J1 = translation_jacobian(*G, Side::Right, g, x);
      const Mat J2 = translation_jacobian(*G, Side::Right, g2, G->mul(x, g));
      const Mat J12 = translation_jacobian(*G, Side::Right, G->mul(g, g2), x);
      const Vec v = G->left_lift(x, xi);
      CHECK(std::abs((J1.transpose() * (J2.transpose() * m)).dot(v) - (J12.transpose() * m).dot(v)) <=
            1e-8);
    }
  }
}

TEST_CASE("tagged operations reject mismatched groups") {
  SU2Group S;
  SO3Group R;
  const auto a = algebra(S, Vec3(1, 0, 0));
  const auto b = algebra(R, Vec3(1, 0, 0));
  CHECK_THROWS_AS(bracket(a, b), TagError);
  CHECK_THROWS_AS(coad(a, covector(R, Vec3(0, 1, 0))), TagError);
  CHECK((coad(a, covector(S, Vec3(0, 1, 0))).coords - Vec(Vec3(0, 0, 1))).norm() == 0.0);
  CHECK(std::abs(pairing(covector(S, Vec3(1, 2, 3)), algebra(S, Vec3(1, 1, 1))) - 6.0) == 0.0);
}

TEST_CASE("rot_of") {
  SU2Group S;
  CHECK((rot_of(S.identity()) - Mat3::Identity()).norm() == 0.0);
  Rng rng(47);
  for (int i = 0; i < 100; ++i) {
    const Vec A = S.random(rng, 1.0);
    const Mat3 R = rot_of(A);
    CHECK((R.transpose() * R - Mat3::Identity()).norm() <= 1e-12);
    CHECK(std::abs(R.determinant() - 1.0) <= 1e-12);
  }
  Vec bad(4);
  bad << 1.1, 0, 0, 0;
  CHECK_THROWS_AS(rot_of(bad), DomainError);
}

TEST_CASE("k_convert") {
  using std::get;
  const Vec3 b(1, 2, 3);
  Mat3 expect;
  expect << 4, 0, 0, 0, 4, 0, -1, -2, 1;
  CHECK((get<Mat3>(k_convert(KRep::Coords, KRep::Real3, b)) - expect).norm() == 0.0);
  CHECK((get<Mat3>(k_convert(KRep::Coords, KRep::Real3, Vec3(Vec3::Zero()))) - Mat3::Identity()).norm() == 0.0);
  CHECK((get<Mat2c>(k_convert(KRep::Coords, KRep::Complex2, Vec3(Vec3::Zero()))) - Mat2c::Identity()).norm() == 0.0);
  CHECK_THROWS_AS(k_convert(KRep::Coords, KRep::Real3, Vec3(0, 0, -1)), DomainError);
  Rng rng(53);
  KGroup K;
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = K.random(rng, 1.0), y = K.random(rng, 1.0);
    for (KRep r : {KRep::Complex2, KRep::Real3}) {
      const KValue vx = k_convert(KRep::Coords, r, x);
      CHECK((get<Vec3>(k_convert(r, KRep::Coords, vx)) - x).norm() <= 1e-12);
      const Vec3 ya = gauss(rng, 3);
      CHECK((get<Vec3>(k_algebra_convert(r, KRep::Coords, k_algebra_convert(KRep::Coords, r, ya))) - ya).norm() <= 1e-12);
    }
    const Mat2c m = get<Mat2c>(k_convert(KRep::Coords, KRep::Complex2, x)) *
                    get<Mat2c>(k_convert(KRep::Coords, KRep::Complex2, y));
    const Mat3 viaReal = get<Mat3>(k_convert(KRep::Complex2, KRep::Real3, m));
    CHECK((viaReal - k_to_real3(K.mul(x, y))).norm() <= 1e-12 * (1 + viaReal.norm()));
  }
}
