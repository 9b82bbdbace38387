#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmg/matched_group.hpp"
#include "test_support.hpp"

using namespace dmg;
using namespace testing_support;

namespace {

MatchedAlgebraVector random_algebra(const MatchedPairGroup& d, Rng& rng, double sigma = 1.0) {
  return {gauss(rng, d.G->algebra_dim(), sigma), gauss(rng, d.H->algebra_dim(), sigma)};
}

Vec stack(const Vec& a, const Vec& b) {
  Vec r(a.size() + b.size());
  r << a, b;
  return r;
}

Vec stack(const MatchedAlgebraVector& v) { return stack(v.xi, v.eta); }
Vec stack(const MatchedPairElement& x) { return stack(x.g, x.h); }

MatchedAlgebraVector operator+(const MatchedAlgebraVector& a, const MatchedAlgebraVector& b) {
  return {a.xi + b.xi, a.eta + b.eta};
}

double mat_diff(const Mat& a, const Mat& b) { return (a - b).lpNorm<Eigen::Infinity>(); }

}  // namespace

TEST_CASE("actions reproduce the Iwasawa factorization of B A") {
  Rng rng(101);
  const auto su2 = make_su2();
  const auto k = make_k();
  double worst_u = 0, worst_l = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec A = su2->random(rng, 1.0), B = k->random(rng, 1.0);
    const auto [U, L] = iwasawa_split(k_to_complex(B) * su2_to_complex(A));
    worst_u = std::max(worst_u, (su2_to_complex(k_on_su2(B, A)) - su2_to_complex(U)).norm());
    worst_l = std::max(worst_l, (su2_on_k(B, A) - Vec(L)).norm());
  }
  CHECK(worst_u <= 1e-9);
  CHECK(worst_l <= 1e-9);
}

TEST_CASE("actions land in SU(2) and K") {
  Rng rng(5);
  const auto su2 = make_su2();
  const auto k = make_k();
  for (int i = 0; i < 500; ++i) {
    const Vec A = su2->random(rng, 2.0), B = k->random(rng, 1.5);
    CHECK(std::abs(k_on_su2(B, A).norm() - 1.0) <= 1e-12);
    CHECK(1.0 + su2_on_k(B, A)[2] > 0.0);
  }
}

TEST_CASE("orbit point is invariant under the action up to rotation") {
  Rng rng(6);
  const auto su2 = make_su2();
  const auto k = make_k();
  for (int i = 0; i < 200; ++i) {
    const Vec A = su2->random(rng), B = k->random(rng);
    const Vec3 p = k_orbit_point(B);
    const Vec3 q = k_orbit_point(su2_on_k(B, A));
    CHECK((q - rot_of(A).transpose() * p).norm() <= 1e-12);
  }
}

TEST_CASE("literal conjugation formula is not the Iwasawa right factor") {
  Rng rng(7);
  const auto su2 = make_su2();
  const auto k = make_k();
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Vec A = su2->random(rng, 1.0), B = k->random(rng, 1.0);
    worst = std::max(worst, (su2_on_k_printed(B, A) - su2_on_k(B, A)).norm());
  }
  CHECK(worst > 1e-3);
}

TEST_CASE("matched product is the matrix product in SL(2,C)") {
  const auto d = make_sl2c();
  Rng rng(8);
  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    const auto x = mp_random(d, rng), y = mp_random(d, rng);
    worst = std::max(worst, (sl2c_matrix(mp_mul(d, x, y)) - sl2c_matrix(x) * sl2c_matrix(y)).norm());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("matched product group laws") {
  const auto d = make_sl2c();
  Rng rng(9);
  for (int i = 0; i < 300; ++i) {
    const auto x = mp_random(d, rng), y = mp_random(d, rng), z = mp_random(d, rng);
    const auto l = mp_mul(d, mp_mul(d, x, y), z);
    const auto r = mp_mul(d, x, mp_mul(d, y, z));
    CHECK((sl2c_matrix(l) - sl2c_matrix(r)).norm() <= 1e-11);
    const auto e = mp_mul(d, x, mp_inv(d, x));
    CHECK((sl2c_matrix(e) - Mat2c::Identity()).norm() <= 1e-11);
    const auto e2 = mp_mul(d, mp_inv(d, x), x);
    CHECK((sl2c_matrix(e2) - Mat2c::Identity()).norm() <= 1e-11);
  }
  const auto e = mp_identity(d);
  const auto x = mp_random(d, rng);
  CHECK((stack(mp_mul(d, e, x)) - stack(x)).norm() <= 1e-14);
}

TEST_CASE("matched pair axioms hold for SU(2) and K") {
  const auto d = make_sl2c();
  Rng rng(10);
  const auto r = axiom_check_group(d, 1000, rng, 1e-9);
  INFO(r.summary());
  CHECK(r.pass);
  CHECK(r.samples == 1000);
}

TEST_CASE("axiom check detects a corrupted action") {
  auto d = make_sl2c();
  const auto su2 = d.G;
  Vec C(4);
  C << std::cos(0.3), std::sin(0.3), 0, 0;
  d.left_action = [L = d.left_action, su2, C](const Vec& h, const Vec& g) {
    return su2->mul(C, L(h, g));
  };
  Rng rng(11);
  const auto r = axiom_check_group(d, 100, rng, 1e-9);
  CHECK_FALSE(r.pass);
  CHECK(r.max_violation > 1e-3);
}

TEST_CASE("direct product has trivial actions and componentwise product") {
  const auto d = make_direct_product(make_so3(), make_rn(2));
  Rng rng(12);
  const auto r = axiom_check_group(d, 200, rng, 1e-12);
  CHECK(r.pass);
  const auto x = mp_random(d, rng), y = mp_random(d, rng);
  const auto xy = mp_mul(d, x, y);
  CHECK((xy.g - d.G->mul(x.g, y.g)).norm() <= 1e-14);
  CHECK((xy.h - d.H->mul(x.h, y.h)).norm() <= 1e-14);
  const auto a = random_algebra(d, rng), b = random_algebra(d, rng);
  const auto br = mp_bracket(d, a, b);
  CHECK((br.xi - d.G->bracket(a.xi, b.xi)).norm() <= 1e-14);
  CHECK((br.eta - d.H->bracket(a.eta, b.eta)).norm() <= 1e-14);
}

TEST_CASE("closed linearized actions agree with finite differences") {
  const auto d = make_sl2c();
  const auto g = d.generic();
  Rng rng(13);
  double w1 = 0, w2 = 0, w3 = 0, w4 = 0, w5 = 0, w6 = 0;
  for (int i = 0; i < 200; ++i) {
    const auto x = mp_random(d, rng, 0.8);
    w1 = std::max(w1, mat_diff(algebra_left(d, x.h), algebra_left(g, x.h)));
    w2 = std::max(w2, mat_diff(algebra_right(d, x.g), algebra_right(g, x.g)));
    w3 = std::max(w3, mat_diff(lift_eta_on_g(d, x.g), lift_eta_on_g(g, x.g)));
    w4 = std::max(w4, mat_diff(lift_h_on_xi(d, x.h), lift_h_on_xi(g, x.h)));
    const Vec eta = gauss(rng, 3), xi = gauss(rng, 3);
    w5 = std::max(w5, inf_norm(eta_on_xi_left(d, eta, xi) - eta_on_xi_left(g, eta, xi)));
    w6 = std::max(w6, inf_norm(eta_on_xi_right(d, eta, xi) - eta_on_xi_right(g, eta, xi)));
  }
  CHECK(w1 <= 1e-7);
  CHECK(w2 <= 1e-7);
  CHECK(w3 <= 1e-7);
  CHECK(w4 <= 1e-7);
  CHECK(w5 <= 1e-6);
  CHECK(w6 <= 1e-6);
}

TEST_CASE("transposed actions satisfy the duality pairings") {
  const auto d = make_sl2c();
  const auto gen = d.generic();
  Rng rng(14);
  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    const auto x = mp_random(d, rng);
    const Vec xi = gauss(rng, 3), eta = gauss(rng, 3), mu = gauss(rng, 3), nu = gauss(rng, 3);
    const Vec mu_g = gauss(rng, 4), nu_h = gauss(rng, 3);
    // Right-hand sides use the finite-difference descriptor, so the check is not circular.
    worst = std::max(worst, std::abs(star_left(d, x.h, mu).dot(xi) -
                                     mu.dot(algebra_left(gen, x.h) * xi)));
    worst = std::max(worst, std::abs(star_right(d, x.g, nu).dot(eta) -
                                     nu.dot(algebra_right(gen, x.g) * eta)));
    worst = std::max(worst, std::abs(a_star(d, x.h, nu_h).dot(xi) -
                                     nu_h.dot(lift_h_on_xi(gen, x.h) * xi)));
    worst = std::max(worst, std::abs(b_star(d, x.g, mu_g).dot(eta) -
                                     mu_g.dot(lift_eta_on_g(gen, x.g) * eta)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("matched bracket is the sl(2,C) commutator") {
  const auto d = make_sl2c();
  Rng rng(15);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const auto a = random_algebra(d, rng), b = random_algebra(d, rng);
    const Mat2c X = sl2c_algebra(a), Y = sl2c_algebra(b);
    worst = std::max(worst, (sl2c_algebra(mp_bracket(d, a, b)) - (X * Y - Y * X)).norm());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("pure cross brackets split into the two algebra-level actions") {
  const auto d = make_sl2c();
  Rng rng(16);
  for (int i = 0; i < 50; ++i) {
    const Vec xi = gauss(rng, 3), eta = gauss(rng, 3);
    const auto br = mp_bracket(d, {Vec::Zero(3), eta}, {xi, Vec::Zero(3)});
    CHECK((br.xi - eta_on_xi_left(d, eta, xi)).norm() <= 1e-14);
    CHECK((br.eta - eta_on_xi_right(d, eta, xi)).norm() <= 1e-14);
  }
}

TEST_CASE("matched bracket is antisymmetric and satisfies Jacobi") {
  const auto closed = make_sl2c();
  const auto generic = closed.generic();
  for (const auto* d : {&closed, &generic}) {
    const double tol = d == &closed ? 1e-12 : 1e-6;
    Rng rng(17);
    double anti = 0, jac = 0;
    for (int i = 0; i < 200; ++i) {
      const auto a = random_algebra(*d, rng), b = random_algebra(*d, rng), c = random_algebra(*d, rng);
      anti = std::max(anti, inf_norm(stack(mp_bracket(*d, a, b)) + stack(mp_bracket(*d, b, a))));
      const auto j = mp_bracket(*d, a, mp_bracket(*d, b, c)) + mp_bracket(*d, b, mp_bracket(*d, c, a)) +
                     mp_bracket(*d, c, mp_bracket(*d, a, b));
      const double scale = stack(a).norm() * stack(b).norm() * stack(c).norm();
      jac = std::max(jac, inf_norm(stack(j)) / scale);
    }
    CHECK(anti <= tol);
    CHECK(jac <= tol);
  }
}

TEST_CASE("algebra-level actions satisfy the matched Lie algebra conditions") {
  const auto d = make_sl2c();
  const auto& G = *d.G;
  const auto& H = *d.H;
  Rng rng(18);
  double w1 = 0, w2 = 0;
  auto L = [&](const Vec& eta, const Vec& xi) { return eta_on_xi_left(d, eta, xi); };
  auto R = [&](const Vec& eta, const Vec& xi) { return eta_on_xi_right(d, eta, xi); };
  for (int i = 0; i < 200; ++i) {
    const Vec x1 = gauss(rng, 3), x2 = gauss(rng, 3), e1 = gauss(rng, 3), e2 = gauss(rng, 3);
    const Vec c1 = L(e1, G.bracket(x1, x2)) -
                   (G.bracket(L(e1, x1), x2) + G.bracket(x1, L(e1, x2)) + L(R(e1, x1), x2) -
                    L(R(e1, x2), x1));
    const Vec c2 = R(H.bracket(e1, e2), x1) -
                   (H.bracket(e1, R(e2, x1)) + H.bracket(R(e1, x1), e2) + R(e1, L(e2, x1)) -
                    R(e2, L(e1, x1)));
    w1 = std::max(w1, inf_norm(c1));
    w2 = std::max(w2, inf_norm(c2));
  }
  CHECK(w1 <= 1e-7);
  CHECK(w2 <= 1e-7);
}

TEST_CASE("inverse adjoint matches conjugation in SL(2,C)") {
  const auto closed = make_sl2c();
  const auto generic = closed.generic();
  Rng rng(19);
  double wc = 0, wg = 0;
  for (int i = 0; i < 200; ++i) {
    const auto x = mp_random(closed, rng);
    const auto v = random_algebra(closed, rng);
    const Mat2c S = sl2c_matrix(x);
    const Mat2c expected = S.inverse() * sl2c_algebra(v) * S;
    wc = std::max(wc, (sl2c_algebra(mp_Ad_inv(closed, x, v)) - expected).norm());
    wg = std::max(wg, (sl2c_algebra(mp_Ad_inv(generic, x, v)) - expected).norm());
  }
  CHECK(wc <= 1e-8);
  CHECK(wg <= 1e-6);
}

TEST_CASE("invariant fields are derivatives of translated curves") {
  const auto closed = make_sl2c();
  const auto generic = closed.generic();
  for (const auto* d : {&closed, &generic}) {
    Rng rng(20);
    double wl = 0, wr = 0;
    for (int i = 0; i < 200; ++i) {
      const auto x = mp_random(*d, rng);
      const auto v = random_algebra(*d, rng);
      auto c = [&](double t) {
        return MatchedPairElement{d->G->exp(t * v.xi), d->H->exp(t * v.eta)};
      };
      const Vec left = fd_curve([&](double t) { return stack(mp_mul(*d, x, c(t))); });
      const Vec right = fd_curve([&](double t) { return stack(mp_mul(*d, c(t), x)); });
      const auto fl = mp_invariant_field(*d, Side::Left, v, x);
      const auto fr = mp_invariant_field(*d, Side::Right, v, x);
      wl = std::max(wl, inf_norm(left - stack(fl.dg, fl.dh)));
      wr = std::max(wr, inf_norm(right - stack(fr.dg, fr.dh)));
    }
    CHECK(wl <= 1e-7);
    CHECK(wr <= 1e-7);
  }
}

TEST_CASE("reductions replace one action by the trivial one") {
  const auto d = make_sl2c();
  const auto l = d.without_right_action();
  const auto r = d.without_left_action();
  const auto t = d.without_actions();
  Rng rng(21);
  const auto x = mp_random(d, rng);
  CHECK((l.right_action(x.h, x.g) - x.h).norm() == 0.0);
  CHECK((l.left_action(x.h, x.g) - d.left_action(x.h, x.g)).norm() == 0.0);
  CHECK((r.left_action(x.h, x.g) - x.g).norm() == 0.0);
  CHECK(lift_h_on_xi(l, x.h).norm() == 0.0);
  CHECK(lift_eta_on_g(r, x.g).norm() == 0.0);
  CHECK((algebra_left(t, x.h) - Mat::Identity(3, 3)).norm() == 0.0);
  CHECK((algebra_right(t, x.g) - Mat::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("mismatched algebra vectors are rejected") {
  const auto d = make_sl2c();
  CHECK_THROWS_AS(mp_bracket(d, {Vec::Zero(2), Vec::Zero(3)}, {Vec::Zero(3), Vec::Zero(3)}), TagError);
}
