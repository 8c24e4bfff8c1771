#include "dioscope/marking.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>

using namespace dioscope;
using namespace dioscope::mark;

namespace {

Vec pt(double x) {
  Vec v(1);
  v << x;
  return v;
}

MarkingInstance singleton_abs() {
  // one index, phi(x) = |x| on (-1, 1), rho = 1
  MarkingInstance inst;
  inst.poset = Poset(1);
  inst.phi = {[](const Vec& x) { return x(0); }};
  inst.rho = 1.0;
  inst.C = 1.0;
  inst.alpha = 1.0;
  inst.ball = Ball::interval(-1.0, 1.0);
  inst.k = 1;
  return inst;
}

}  // namespace

TEST_CASE("poset validation and chain length") {
  Poset p(3);
  p.add(0, 1);
  p.add(1, 2);
  p.add(0, 2);
  p.validate();
  CHECK(p.length() == 3);
  CHECK(p.comparable(0, 2));
  CHECK_FALSE(p.comparable(1, 1));

  Poset anti(2);
  anti.add(0, 1);
  anti.add(1, 0);
  CHECK_THROWS_AS(anti.validate(), std::invalid_argument);

  Poset refl(1);
  refl.add(0, 0);
  CHECK_THROWS_AS(refl.validate(), std::invalid_argument);

  Poset trans(3);
  trans.add(0, 1);
  trans.add(1, 2);  // missing 0 < 2
  CHECK_THROWS_AS(trans.validate(), std::invalid_argument);

  Poset empty(4);
  empty.validate();
  CHECK(empty.length() == 1);
  CHECK(Poset(0).length() == 0);
}

TEST_CASE("chain membership of the singleton instance") {
  auto inst = singleton_abs();
  const double eps = 0.2;
  // |x| >= eps: the singleton chain {0} works (band membership, nothing else)
  CHECK(is_marked(inst, pt(0.5), eps).marked);
  CHECK(is_marked(inst, pt(-0.9), eps).marked);
  CHECK(is_marked(inst, pt(0.2), eps).marked);
  // |x| < eps: neither the empty chain (needs |phi| >= rho) nor {0} qualifies
  CHECK_FALSE(is_marked(inst, pt(0.1), eps).marked);
  CHECK_FALSE(is_marked(inst, pt(0.0), eps).marked);
  // at |x| = 1 = rho the empty chain applies, and so does {0}
  auto r = is_marked(inst, pt(1.0), eps);
  CHECK(r.marked);
  CHECK_THROWS_AS(is_marked(inst, pt(0.5), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(is_marked(inst, pt(0.5), 1.5), std::invalid_argument);
}

TEST_CASE("empty index set marks every point") {
  MarkingInstance inst;
  inst.poset = Poset(0);
  inst.rho = 0.5;
  inst.ball = Ball::interval(-1.0, 1.0);
  for (double x : {-0.7, 0.0, 0.3}) CHECK(is_marked(inst, pt(x), 0.1).marked);
}

TEST_CASE("marked set grows as eps shrinks") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> c(-1.0, 1.0), u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    MarkingInstance inst;
    inst.poset = Poset(3);
    inst.poset.add(0, 1);
    if (t % 2) inst.poset.add(1, 2), inst.poset.add(0, 2);
    inst.poset.validate();
    for (int s = 0; s < 3; ++s) {
      double a = c(rng), b0 = c(rng);
      inst.phi.push_back([a, b0](const Vec& x) { return a * x(0) + b0; });
    }
    inst.rho = 0.8;
    inst.ball = Ball::interval(-1.0, 1.0);
    inst.k = 3;
    for (int rep = 0; rep < 20; ++rep) {
      Vec x = pt(u(rng));
      bool coarse = is_marked(inst, x, 0.4).marked;
      bool fine = is_marked(inst, x, 0.1).marked;
      if (coarse) CHECK(fine);  // any chain for larger eps still works
    }
  }
}

TEST_CASE("unmarked-measure bound on the singleton fixture") {
  auto inst = singleton_abs();
  // unmarked set is (-eps, eps): measure 2 eps = 0.2 at eps = 0.1; the bound
  // is k C (3 N_d)^k (eps/rho)^alpha |B| = 3 N_d eps |B| = 0.6 with N_d = 1
  auto rep = thm61_check(inst, 0.1, 1, 20001);
  CHECK(rep.axiom_failure.empty());
  CHECK(rep.measured == Catch::Approx(0.2).margin(2e-3));
  CHECK(rep.bound == Catch::Approx(0.6).margin(1e-12));
  CHECK(rep.pass);
  // eps = rho: everything in the band up to rho, nothing unmarked beyond
  auto sat = thm61_check(inst, 1.0, 1, 5001);
  CHECK(sat.pass);
}

TEST_CASE("axiom failures are reported, not thrown") {
  auto inst = singleton_abs();
  inst.k = 0;  // declared cap below the actual length 1
  auto rep = thm61_check(inst, 0.1, 1, 1001);
  CHECK(rep.axiom_failure == "poset length exceeds declared k");
  CHECK_FALSE(rep.pass);

  auto small = singleton_abs();
  small.phi = {[](const Vec& x) { return 0.5 * x(0); }};  // sup 0.5 < rho = 1
  auto rep2 = thm61_check(small, 0.1, 1, 1001);
  CHECK(rep2.axiom_failure == "sup |phi_s| below rho on the grid");
  CHECK_FALSE(rep2.pass);

  auto bad = singleton_abs();
  bad.poset.add(0, 0);
  CHECK_THROWS_AS(thm61_check(bad, 0.1, 1, 101), std::invalid_argument);
}

TEST_CASE("measure bound holds over random validated instances") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> c(-1.5, 1.5);
  std::uniform_int_distribution<int> nsd(1, 3);
  int run = 0;
  for (int t = 0; t < 60 && run < 25; ++t) {
    int ns = nsd(rng);
    MarkingInstance inst;
    inst.poset = Poset(ns);
    for (int a = 0; a < ns; ++a)
      for (int b0 = a + 1; b0 < ns; ++b0)
        if ((rng() & 3) == 0) inst.poset.add(a, b0);
    // close transitively to keep validate() happy
    for (int a = 0; a < ns; ++a)
      for (int b0 = 0; b0 < ns; ++b0)
        for (int d = 0; d < ns; ++d)
          if (inst.poset.less[a][b0] && inst.poset.less[b0][d]) inst.poset.add(a, d);
    inst.poset.validate();
    inst.k = inst.poset.length();
    for (int s = 0; s < ns; ++s) {
      Poly p = Poly::from_coeffs({c(rng), c(rng), c(rng)});
      inst.phi.push_back([p](const Vec& x) { return p.eval(x); });
    }
    inst.rho = 0.7;
    inst.C = good::poly_constant(1, 2);
    inst.alpha = 0.5;
    inst.ball = Ball::interval(-1.0, 1.0);
    auto rep = thm61_check(inst, 0.05, 1, 3001);
    if (!rep.axiom_failure.empty()) continue;
    ++run;
    CHECK(rep.pass);
  }
  CHECK(run >= 25);
}

TEST_CASE("filtration inclusion finds no counterexamples on small systems") {
  lat::Ambient amb(1, 1);
  lat::DiagonalWeights w(amb);
  w.a0 = 0.25;
  w.astar = 2.0;
  w.a = {2.0};
  w.validate();
  auto f = FunctionTuple::veronese(1);
  auto rep = thm62_inclusion(w, f, 0.05, 0.6, 3, Ball::interval(-1.0, 1.0), 301);
  CHECK(rep.grid_points == 301);
  CHECK(rep.pass);
  CHECK(rep.counterexamples == 0);
  CHECK(rep.marked_points > 0);

  CHECK_THROWS_AS(thm62_inclusion(w, f, 0.0, 0.5, 2, Ball::interval(-1.0, 1.0), 11),
                  std::invalid_argument);
  CHECK_THROWS_AS(thm62_inclusion(w, f, 0.6, 0.5, 2, Ball::interval(-1.0, 1.0), 11),
                  std::invalid_argument);
}
