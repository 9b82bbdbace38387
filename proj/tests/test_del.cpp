#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dmg/del.hpp"
#include "dmg/errors.hpp"
#include "test_support.hpp"

using namespace dmg;
using namespace testing_support;

namespace {

Mat random_spd(Rng& rng, int n) {
  Mat A(n, n);
  for (int i = 0; i < n; ++i) A.col(i) = gauss(rng, n, 0.3);
  return Mat::Identity(n, n) + A * A.transpose();
}

std::vector<GroupoidPtr> all_groupoids() {
  const auto a = rotation_action();
  return {std::make_shared<GroupAsGroupoid>(make_su2()),
          std::make_shared<GroupAsGroupoid>(make_so3()),
          std::make_shared<PairGroupoid>(2),
          std::make_shared<ActionGroupoid>(a),
          std::make_shared<TrivialGroupoid>(2, make_so2()),
          make_trivial_decomposition(a),
          matched_group_as_groupoid(make_sl2c())};
}

std::vector<DiscreteLagrangian> builtins(const GroupoidPtr& G, Rng& rng) {
  return {kinetic_lagrangian(G), coupled_lagrangian(G, random_spd(rng, G->base_dim() + G->fiber_dim())),
          potential_lagrangian(G, 0.3)};
}

Trajectory random_trajectory(const Groupoid& G, Rng& rng, int n) {
  std::vector<Vec> arrows{G.random_arrow(rng)};
  for (int k = 1; k < n; ++k) arrows.push_back(G.random_from(rng, G.target(arrows.back())));
  return make_trajectory(G, arrows);
}

Vec v(std::initializer_list<double> xs) {
  Vec r(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) r[i++] = x;
  return r;
}

}  // namespace

TEST_CASE("action sum") {
  auto S = std::make_shared<GroupAsGroupoid>(make_su2());
  Rng rng(1);
  const auto L = kinetic_lagrangian(S, v({1, 2, 3}));
  const auto one = make_trajectory(*S, {S->random_arrow(rng)});
  CHECK(action_sum(*S, L, one) == L.value(one.arrows[0]));
  const auto four = random_trajectory(*S, rng, 4);
  double direct = 0;
  for (const auto& x : four.arrows) direct += L.value(x);
  CHECK(action_sum(*S, L, four) == direct);
  CHECK(action_sum(*S, constant_lagrangian(2.5), four) == 10.0);
}

TEST_CASE("trajectories reject non-composable arrows") {
  PairGroupoid P(1);
  CHECK_THROWS_AS(make_trajectory(P, {v({0, 1}), v({2, 3})}), NotComposable);
  const auto t = make_trajectory(P, {v({0, 1}), v({1, 3})});
  CHECK(t.certificates.size() == 1);
  CHECK(t.certificates[0].gap == 0.0);
}

TEST_CASE("pair groupoid residual is the second difference") {
  PairGroupoid P(2);
  const auto L = pair_lagrangian(2);
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const Vec x = gauss(rng, 2), y = gauss(rng, 2), z = gauss(rng, 2);
    const Vec r = del_residual(P, L, join({x, y}), join({y, z}));
    CHECK(inf_norm(r - ((y - x) - (z - y))) <= 1e-12);
  }
  const Vec x = v({0, 0}), y = v({1, 0});
  CHECK(inf_norm(del_residual(P, L, join({x, y}), join({y, v({2, 0})}))) <= 1e-12);
}

TEST_CASE("constant Lagrangian has zero residual") {
  Rng rng(3);
  for (const auto& G : all_groupoids()) {
    const auto t = random_trajectory(*G, rng, 2);
    CHECK(inf_norm(del_residual(*G, constant_lagrangian(1.0), t.arrows[0], t.arrows[1])) == 0.0);
  }
}

TEST_CASE("group residual equals the translated-differential form") {
  Rng rng(4);
  for (const auto& grp : {make_su2(), make_so3(), make_k()}) {
    auto G = std::make_shared<GroupAsGroupoid>(grp);
    const auto L = coupled_lagrangian(G, random_spd(rng, 3));
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
      const Vec g1 = grp->random(rng), g2 = grp->random(rng);
      const Vec r = del_residual_group(*grp, L, g1, g2);
      worst = std::max(worst, inf_norm(del_residual(*G, L, g1, g2) - r) / (1.0 + inf_norm(r)));
    }
    INFO(grp->name());
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("matched groupoid residual from the six terms") {
  Rng rng(5);
  const auto M = make_trivial_decomposition(rotation_action());
  const auto L = trivial_matched_lagrangian(1.5, 0.4);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const auto t = random_trajectory(*M, rng, 2);
    worst = std::max(worst, inf_norm(del_residual_matched(*M, L, t.arrows[0], t.arrows[1]) -
                                     del_residual(*M, L, t.arrows[0], t.arrows[1])));
  }
  CHECK(worst <= 1e-9);
  const Vec e = M->unit(v({0.2, 0.1}));
  CHECK(inf_norm(del_residual_matched(*M, constant_lagrangian(3.0), e, e)) == 0.0);
}

TEST_CASE("matched residual with trivial actions splits into the factors") {
  const auto d = make_direct_product(make_so3(), make_su2());
  const auto M = matched_group_as_groupoid(d);
  auto G = std::make_shared<GroupAsGroupoid>(d.G);
  auto H = std::make_shared<GroupAsGroupoid>(d.H);
  Rng rng(6);
  const auto L1 = coupled_lagrangian(G, random_spd(rng, 3));
  const auto L2 = coupled_lagrangian(H, random_spd(rng, 3));
  const DiscreteLagrangian L{"sum", [&](const Vec& x) { return L1.value(x.head(9)) + L2.value(x.tail(4)); }, {}};
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const Vec g1 = d.G->random(rng), g2 = d.G->random(rng), h1 = d.H->random(rng), h2 = d.H->random(rng);
    const Vec r = del_residual_matched(*M, L, join({g1, h1}), join({g2, h2}));
    const Vec split = join({del_residual(*G, L1, g1, g2), del_residual(*H, L2, h1, h2)});
    worst = std::max(worst, inf_norm(r - split));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("matched group residual with trivial actions is two momentum recursions") {
  const auto d = make_direct_product(make_so3(), make_so3());
  Rng rng(7);
  auto G = std::make_shared<GroupAsGroupoid>(d.G);
  const auto L1 = coupled_lagrangian(G, random_spd(rng, 3));
  const auto L2 = kinetic_lagrangian(G, v({1, 2, 3}));
  const DiscreteLagrangian L{"sum", [&](const Vec& x) { return L1.value(x.head(9)) + L2.value(x.tail(9)); }, {}};
  for (int i = 0; i < 20; ++i) {
    const Vec g1 = d.G->random(rng), g2 = d.G->random(rng), h1 = d.H->random(rng), h2 = d.H->random(rng);
    const Vec xk = join({g1, h1}), xk1 = join({g2, h2});
    const auto m1 = mp_momenta(d, L, xk), m2 = mp_momenta(d, L, xk1);
    const Vec expected = join({d.G->Ad(g1).transpose() * m1.mu - m2.mu, d.H->Ad(h1).transpose() * m1.nu - m2.nu});
    CHECK(inf_norm(del_residual_matched_group(d, L, xk, xk1) - expected) <= 1e-12);
    CHECK(inf_norm(del_residual_matched_group(d, L, xk, xk1, Reduction::BothTrivial) - expected) <= 1e-12);
  }
}

TEST_CASE("matched group residual at the identity") {
  const auto d = make_sl2c();
  const auto L = sl2c_lagrangian(Vec3(1, 2, 3), Vec3(2, 1, 1), 0.3);
  const Vec e = join({d.G->identity(), d.H->identity()});
  CHECK(inf_norm(del_residual_matched_group(d, L, e, e)) <= 1e-12);
}

TEST_CASE("three assemblies of the SU(2) x K residual agree") {
  const auto d = make_sl2c();
  const auto M = matched_group_as_groupoid(d);
  const auto L = sl2c_lagrangian(Vec3(1, 2, 3), Vec3(2, 1, 1.5), 0.4);
  Rng rng(8);
  double w1 = 0, w2 = 0;
  for (int i = 0; i < 50; ++i) {
    const auto x = mp_random(d, rng), y = mp_random(d, rng);
    const Vec xk = join({x.g, x.h}), xk1 = join({y.g, y.h});
    const Vec r = del_residual_matched_group(d, L, xk, xk1);
    w1 = std::max(w1, inf_norm(r - del_residual_matched_group_fields(d, L, xk, xk1)));
    w2 = std::max(w2, inf_norm(r - del_residual(*M, L, xk, xk1)));
  }
  CHECK(w1 <= 1e-7);
  CHECK(w2 <= 1e-7);
}

TEST_CASE("reduced residuals match the full residual with trivialized actions") {
  const auto d = make_sl2c();
  const auto L = sl2c_lagrangian(Vec3(1, 2, 3), Vec3(2, 1, 1.5), 0.4);
  Rng rng(9);
  double w2 = 0, w3 = 0, w4 = 0;
  for (int i = 0; i < 200; ++i) {
    const auto x = mp_random(d, rng), y = mp_random(d, rng);
    const Vec xk = join({x.g, x.h}), xk1 = join({y.g, y.h});
    w2 = std::max(w2, inf_norm(del_residual_matched_group(d.without_right_action(), L, xk, xk1) -
                               del_residual_matched_group(d, L, xk, xk1, Reduction::RightTrivial)));
    w3 = std::max(w3, inf_norm(del_residual_matched_group(d.without_left_action(), L, xk, xk1) -
                               del_residual_matched_group(d, L, xk, xk1, Reduction::LeftTrivial)));
    w4 = std::max(w4, inf_norm(del_residual_matched_group(d.without_actions(), L, xk, xk1) -
                               del_residual_matched_group(d, L, xk, xk1, Reduction::BothTrivial)));
  }
  CHECK(w2 <= 1e-9);
  CHECK(w3 <= 1e-9);
  CHECK(w4 <= 1e-9);
}

TEST_CASE("matched group residual rejects wrong coordinates") {
  const auto d = make_sl2c();
  const auto L = sl2c_lagrangian(Vec3(1, 1, 1), Vec3(1, 1, 1), 0.0);
  CHECK_THROWS_AS(del_residual_matched_group(d, L, Vec::Zero(6), Vec::Zero(7)), TagError);
}

TEST_CASE("pair groupoid step extrapolates linearly") {
  auto P = std::make_shared<PairGroupoid>(2);
  const Vec next = del_step(*P, pair_lagrangian(2), v({0, 0, 1, 0}));
  CHECK(inf_norm(next - v({1, 0, 2, 0})) <= 1e-10);
}

TEST_CASE("SO(2) with quadratic chart Lagrangian rotates at constant increment") {
  auto S = std::make_shared<GroupAsGroupoid>(make_so2());
  const auto t = solve_trajectory(*S, kinetic_lagrangian(S), v({0.3}), 6);
  for (const auto& x : t.arrows) CHECK(std::abs(x[0] - 0.3) <= 1e-10);
}

TEST_CASE("constant Lagrangian is degenerate") {
  auto S = std::make_shared<GroupAsGroupoid>(make_su2());
  Rng rng(10);
  CHECK_THROWS_AS(del_step(*S, constant_lagrangian(1.0), S->random_arrow(rng)), SingularJacobian);
}

TEST_CASE("SO(3) momentum is transported by the coadjoint action") {
  auto S = std::make_shared<GroupAsGroupoid>(make_so3());
  const Mat3 J = Vec3(1.0, 2.0, 3.5).asDiagonal();
  const auto L = moser_veselov_lagrangian(J);
  const Vec g1 = make_so3()->exp(Vec3(0.3, 0.15, -0.06));
  const auto t = solve_trajectory(*S, L, g1, 20);
  const auto m = momentum_evolution(*S, L, t);
  CHECK(m.records.size() == 20);
  CHECK(m.max_defect <= 1e-8);
  for (double r : t.residual_norms) CHECK(r <= 1e-10);

  const auto single = momentum_evolution(*S, L, make_trajectory(*S, {g1}));
  CHECK(single.max_defect == 0.0);
}

TEST_CASE("Moser-Veselov gradient matches finite differences") {
  const Mat3 J = Vec3(1.0, 2.0, 3.5).asDiagonal();
  const auto L = moser_veselov_lagrangian(J);
  auto S = std::make_shared<GroupAsGroupoid>(make_so3());
  Rng rng(11);
  const Vec g = S->random_arrow(rng);
  const auto plain = DiscreteLagrangian{"", L.value, {}};
  const Vec fd = fd_gradient(L.value, g);
  CHECK(inf_norm(fd - L.gradient(g)) <= 1e-8);
  const Vec v = S->closed_left_field(g, Vec3(0.1, 0.2, 0.3)).value();
  CHECK(std::abs(differential(*S, L, g, v) - differential(*S, plain, g, v)) <= 1e-9);
}

TEST_CASE("action groupoid momentum with forcing") {
  const auto a = rotation_action();
  auto A = std::make_shared<ActionGroupoid>(a);
  Mat Q(3, 3);
  Q << 1.0, 0.2, 0.3, 0.2, 1.5, -0.1, 0.3, -0.1, 2.0;
  const auto L = coupled_lagrangian(A, Q);
  const auto t = solve_trajectory(*A, L, A->make(v({1.0, 0.5}), v({0.2})), 12);
  const auto m = momentum_evolution(*A, L, t);
  CHECK(m.max_defect <= 1e-7);
  // Without the forcing term the recursion does not hold.
  double unforced = 0;
  for (std::size_t k = 0; k + 1 < m.records.size(); ++k)
    unforced = std::max(unforced, (m.records[k + 1].mu - m.records[k].mu).norm());
  CHECK(unforced > 1e-3);
}

TEST_CASE("variational oracle: controls") {
  auto P = std::make_shared<PairGroupoid>(2);
  const auto L = pair_lagrangian(2);
  const auto solved = solve_trajectory(*P, L, v({0, 0, 1, 0.5}), 6);
  CHECK(variational_oracle(*P, L, solved).max_abs <= 1e-7);
  Rng rng(12);
  const auto random = random_trajectory(*P, rng, 6);
  CHECK(variational_oracle(*P, L, random).max_abs > 1e-2);

  auto S = std::make_shared<GroupAsGroupoid>(make_su2());
  const Vec e = S->unit(Vec(0));
  const auto ident = make_trajectory(*S, {e, e, e});
  CHECK(variational_oracle(*S, kinetic_lagrangian(S), ident).max_abs <= 1e-8);
}

TEST_CASE("oracle equals the residual pairing on every descriptor") {
  Rng rng(13);
  for (const auto& G : all_groupoids()) {
    INFO(G->name());
    for (const auto& L : builtins(G, rng)) {
      INFO(L.name);
      double worst = 0;
      for (int i = 0; i < 5; ++i) {
        const auto t = random_trajectory(*G, rng, 3);
        const auto o = variational_oracle(*G, L, t);
        for (std::size_t k = 0; k < 2; ++k)
          worst = std::max(worst, inf_norm(o.per_junction[k] - del_residual(*G, L, t.arrows[k], t.arrows[k + 1])));
      }
      CHECK(worst <= 1e-6);
    }
  }
}

TEST_CASE("solved trajectories pass the oracle on every descriptor") {
  Rng rng(14);
  for (const auto& G : all_groupoids()) {
    INFO(G->name());
    const auto L = coupled_lagrangian(G, random_spd(rng, G->base_dim() + G->fiber_dim()));
    const Vec x1 = G->random_arrow(rng, 0.2);
    const auto t = solve_trajectory(*G, L, x1, 4);
    for (double r : t.residual_norms) CHECK(r <= 1e-10);
    for (double o : t.oracle) CHECK(o <= 1e-6);
  }
}

TEST_CASE("solver reports a guess in the wrong fiber") {
  auto P = std::make_shared<PairGroupoid>(1);
  CHECK_THROWS_AS(del_step(*P, pair_lagrangian(1), v({0, 1}), v({5, 6})), BasePointMismatch);
}
