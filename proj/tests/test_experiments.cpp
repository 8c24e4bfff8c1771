#include "dioscope/experiments.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <set>

using namespace dioscope;
using namespace dioscope::expt;

TEST_CASE("big-gradient sweep reproduces the linear fixture") {
  auto f = FunctionTuple::from_id("poly:0,100");
  auto b = Ball::interval(-1.0, 1.0);
  IVec q(1);
  q << 1;
  auto res = thm13_sweep(f, b, q, {0.1, 0.05, 0.02, 0.01}, 20001);
  REQUIRE(res.measures.size() == 4);
  // {dist(100x, Z) < delta} has density 2 delta, so measure = 2 delta |B|
  CHECK(res.measures[0] == Catch::Approx(0.4).margin(0.01));
  CHECK(res.measures[3] == Catch::Approx(0.04).margin(0.004));
  CHECK(res.slope == Catch::Approx(1.0).margin(0.1));
  CHECK(res.constant == Catch::Approx(2.0).epsilon(0.05));
  // delta past 1/2 saturates the whole ball
  auto sat = thm13_sweep(f, b, q, {0.6}, 2001);
  CHECK(sat.measures[0] == Catch::Approx(b.volume()));
  CHECK_THROWS_AS(thm13_sweep(f, b, q, {1.5}, 101), std::invalid_argument);
  CHECK_THROWS_AS(thm13_sweep(f, b, q, {0.0}, 101), std::invalid_argument);
  IVec bad(2);
  bad << 1, 1;
  CHECK_THROWS_AS(thm13_sweep(f, b, bad, {0.1}, 101), std::invalid_argument);
}

TEST_CASE("existence-set sweep decays and is monotone in delta") {
  auto f = FunctionTuple::veronese(2);
  auto b = Ball::interval(-1.0, 1.0);
  // boxes chosen so eps = (delta K T1 T2 / max T)^{1/(n+1)} and the largest
  // eps stays well below whole-ball saturation, keeping the fitted E honest
  std::vector<std::pair<double, lat::ParamBox>> family;
  for (double eps : {0.5, 0.25, 0.1}) {
    lat::ParamBox pb;
    pb.delta = eps * eps * eps / 4.0;
    pb.K = 1.0;
    pb.T = {4.0, 4.0};
    family.emplace_back(eps, pb);
  }
  auto res = thm14_sweep(f, b, family, 1001);
  REQUIRE(res.measures.size() == 3);
  CHECK(res.counts[0] > 0);
  // shrinking delta with K, T fixed nests the existence sets exactly
  CHECK(res.measures[0] >= res.measures[1]);
  CHECK(res.measures[1] >= res.measures[2]);
  CHECK(res.pass);

  // a box beyond the enumeration budget is rejected
  lat::ParamBox huge;
  huge.delta = 1e-9;
  huge.K = 1.0;
  huge.T = {4000.0, 4000.0};
  CHECK_THROWS_AS(thm14_sweep(f, b, {{0.1, huge}}, 101), std::invalid_argument);

  // degenerate tuples have no decay exponent
  auto degen = FunctionTuple::from_id("poly:0,1;0,2");
  lat::ParamBox pb;
  pb.delta = 0.1;
  pb.K = 1.0;
  pb.T = {2.0, 2.0};
  CHECK_THROWS_AS(thm14_sweep(degen, b, {{0.1, pb}}, 101), std::invalid_argument);
  CHECK_THROWS_AS(thm14_sweep(f, b, {}, 101), std::invalid_argument);
}

TEST_CASE("solution counting at closed-form points") {
  auto f = FunctionTuple::from_id("poly:0,1");
  auto spec = ApproxSpec::standard(RateFunction::power(1.0, 1.0));

  // golden ratio: the |q| <= 100 solutions with dist(q x, Z) < 1/|q| are
  // exactly the Fibonacci numbers, both signs
  Vec x(1);
  x << (std::sqrt(5.0) - 1.0) / 2.0;
  auto sols = count_solutions(f, x, spec, 100);
  std::set<int> signed_sols, pos;
  for (const auto& q : sols) {
    signed_sols.insert(q(0));
    pos.insert(std::abs(q(0)));
  }
  CHECK(pos == std::set<int>{1, 2, 3, 5, 8, 13, 21, 34, 55, 89});
  for (int p : pos) {
    CHECK(signed_sols.count(p) == 1);
    CHECK(signed_sols.count(-p) == 1);
  }
  CHECK(sols.size() == 20);
  CHECK(std::is_sorted(sols.begin(), sols.end(),
                       [](const IVec& a, const IVec& b) { return a(0) < b(0); }));

  // x = 0: every q solves
  Vec zero = Vec::Zero(1);
  CHECK(count_solutions(f, zero, spec, 30).size() == 60);

  // x = 1/2: all even q, plus q = +-1 where the threshold still exceeds 1/2
  Vec half(1);
  half << 0.5;
  auto hs = count_solutions(f, half, spec, 10);
  std::set<int> got;
  for (const auto& q : hs) got.insert(q(0));
  CHECK(got == std::set<int>{-10, -8, -6, -4, -2, -1, 1, 2, 4, 6, 8, 10});

  // monotone in height and antitone in the rate
  auto s50 = count_solutions(f, x, spec, 50);
  for (const auto& q : s50) CHECK(std::abs(q(0)) <= 50);
  CHECK(s50.size() <= sols.size());
  auto strict = ApproxSpec::standard(RateFunction::power(1.0, 2.0));
  auto ss = count_solutions(f, x, strict, 100);
  CHECK(ss.size() <= sols.size());
  CHECK_THROWS_AS(count_solutions(f, x, spec, 0), std::invalid_argument);
}

TEST_CASE("dyadic parameter arithmetic") {
  // n = 2, d = 1, L = 2: sqrt(ndL) = 2
  auto p = dyadic_params({3, 4}, 2, 1, 2.0);
  CHECK(p.box.delta == Catch::Approx(std::pow(2.0, -7.0)));
  CHECK(p.box.K == Catch::Approx(8.0));
  REQUIRE(p.box.T.size() == 2);
  CHECK(p.box.T[0] == 16.0);
  CHECK(p.box.T[1] == 32.0);
  CHECK(p.product_formula == Catch::Approx(1.0));
  CHECK(p.valid);
  CHECK(p.box.product_ratio() == Catch::Approx(p.product_formula));

  // t = (0, 0): the closed form gives 4 > 1, reported invalid without throwing
  auto q = dyadic_params({0, 0}, 2, 1, 2.0);
  CHECK(q.product_formula == Catch::Approx(4.0));
  CHECK_FALSE(q.valid);

  // the closed form tracks the direct product for random exponents
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    int n = 1 + int(rng() % 3);
    std::vector<int> tv(n);
    for (int& ti : tv) ti = int(rng() % 6);
    auto r = dyadic_params(tv, n, 1 + int(rng() % 2), 0.5 + (rng() % 8) * 0.25);
    CHECK(r.box.product_ratio() == Catch::Approx(r.product_formula).epsilon(1e-12));
  }
  CHECK_THROWS_AS(dyadic_params({1}, 2, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dyadic_params({-1, 2}, 2, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dyadic_params({1, 2}, 2, 1, 0.0), std::invalid_argument);
}

TEST_CASE("dyadic-shell sweep decays across levels") {
  auto f = FunctionTuple::veronese(2);
  auto b = Ball::interval(-1.0, 1.0);
  auto res = system83_sweep(f, b, 0.5, 0.1, 2, 1001);
  REQUIRE(res.labels.size() == 9);  // (t_max + 1)^n shells
  CHECK(res.counts[0] > 0);
  for (double m : res.measures) {
    CHECK(m >= 0.0);
    CHECK(m <= b.volume() + 1e-12);
  }
  // per-level decay goes like 2^{-eps * level}, so a loose eps needs far more
  // shells than a grid sweep can afford; a strict eps decays within t_max = 3
  auto strict = system83_sweep(f, b, 1.0, 1.0, 3, 1001);
  CHECK(strict.pass);
  CHECK_THROWS_AS(system83_sweep(f, b, 0.0, 0.1, 1, 101), std::invalid_argument);
  CHECK_THROWS_AS(system83_sweep(f, b, 2.0, 0.1, 1, 101), std::invalid_argument);
  CHECK_THROWS_AS(system83_sweep(f, b, 0.5, 0.0, 1, 101), std::invalid_argument);
  CHECK_THROWS_AS(system83_sweep(f, b, 0.5, 0.1, -1, 101), std::invalid_argument);
}

TEST_CASE("measure and rate sums track each other for the identity map") {
  auto f = FunctionTuple::from_id("poly:0,1");
  auto b = Ball::interval(0.0, 1.0);
  auto spec = ApproxSpec::standard(RateFunction::power(1.0, 2.0));
  // A(q) has measure 2 psi(q) |B| exactly, so the ratio of sums is 2 on any
  // q-range; check stability across two disjoint ranges
  auto [m1, r1] = borel_cantelli_sums(f, b, spec, 2, 40, 40001);
  auto [m2, r2] = borel_cantelli_sums(f, b, spec, 41, 100, 40001);
  CHECK(m1 / r1 == Catch::Approx(2.0).epsilon(0.3));
  CHECK(m2 / r2 == Catch::Approx(2.0).epsilon(0.3));
  CHECK_THROWS_AS(borel_cantelli_sums(f, b, spec, 0, 5, 101), std::invalid_argument);
  CHECK_THROWS_AS(borel_cantelli_sums(f, b, spec, 5, 2, 101), std::invalid_argument);
  auto f2 = FunctionTuple::veronese(2);
  CHECK_THROWS_AS(borel_cantelli_sums(f2, b, spec, 1, 5, 101), std::invalid_argument);
}
