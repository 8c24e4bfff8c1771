#pragma once

// Skew-gradients of plane-valued maps: definition, polar identity check,
// the quantitative lower bound, empirical width/growth constants, the
// inf-sup quantity of a family, and the rho combination formula.

#include "dioscope/core.hpp"
#include "dioscope/goodfn.hpp"

#include <random>

namespace dioscope::skew {

/// A pair of scalar functions with analytic gradients.
struct PlanePair {
  int dim = 1;
  std::function<double(const Vec&)> g1, g2;
  std::function<Vec(const Vec&)> grad1, grad2;

  static PlanePair from_polys(const Poly& p1, const Poly& p2) {
    if (p1.nvars != p2.nvars) throw std::invalid_argument("PlanePair: mixed arity");
    PlanePair pp;
    pp.dim = p1.nvars;
    pp.g1 = [p1](const Vec& x) { return p1.eval(x); };
    pp.g2 = [p2](const Vec& x) { return p2.eval(x); };
    auto grad_of = [](const Poly& p) {
      std::vector<Poly> parts;
      for (int i = 0; i < p.nvars; ++i) parts.push_back(p.derivative(i));
      return [parts](const Vec& x) {
        Vec g(parts.size());
        for (size_t i = 0; i < parts.size(); ++i) g(i) = parts[i].eval(x);
        return g;
      };
    };
    pp.grad1 = grad_of(p1);
    pp.grad2 = grad_of(p2);
    return pp;
  }

  /// Sanity check of the analytic gradients against central differences.
  bool gradients_consistent(const Vec& x, double h = 1e-6, double rel = 1e-6) const {
    auto check = [&](const std::function<double(const Vec&)>& g, const Vec& grad) {
      for (int i = 0; i < dim; ++i) {
        Vec xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        double fd = (g(xp) - g(xm)) / (2.0 * h);
        if (std::abs(fd - grad(i)) > rel * (1.0 + std::abs(grad(i))) + 1e-4 * h) return false;
      }
      return true;
    };
    return check(g1, grad1(x)) && check(g2, grad2(x));
  }
};

/// g1 grad g2 - g2 grad g1.
inline Vec skew_gradient(const PlanePair& g, const Vec& x) {
  return g.g1(x) * g.grad2(x) - g.g2(x) * g.grad1(x);
}

/// Exact polynomial skew-gradient, component by component.
inline std::vector<Poly> skew_gradient_poly(const Poly& p1, const Poly& p2) {
  std::vector<Poly> out;
  for (int i = 0; i < p1.nvars; ++i)
    out.push_back(p1 * p2.derivative(i) - p2 * p1.derivative(i));
  return out;
}

/// Residual of the polar identity: skew-gradient vs rho^2 grad theta, with
/// grad theta taken from central differences of atan2 (independent route).
inline double polar_check(const PlanePair& g, const Vec& x, double h = 1e-6) {
  double v1 = g.g1(x), v2 = g.g2(x);
  double rho2 = v1 * v1 + v2 * v2;
  if (std::sqrt(rho2) <= 1e-8) throw std::domain_error("polar_check: singular point g(x) = 0");
  Vec skew = skew_gradient(g, x);
  Vec gt(g.dim);
  for (int i = 0; i < g.dim; ++i) {
    Vec xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    double tp = std::atan2(g.g2(xp), g.g1(xp));
    double tm = std::atan2(g.g2(xm), g.g1(xm));
    double dt = tp - tm;
    if (dt > M_PI) dt -= 2.0 * M_PI;  // unwrap across the branch cut
    if (dt < -M_PI) dt += 2.0 * M_PI;
    gt(i) = dt / (2.0 * h);
  }
  return (skew - rho2 * gt).norm();
}

/// Lower bound w (a - delta)^2 / (2 r sqrt(w^2 + (a + delta)^2)) for the
/// supremum of the skew-gradient norm.
inline double lemma42_bound(double a, double delta, double w, double r) {
  if (!(a > delta) || delta < 0.0) throw std::invalid_argument("lemma42_bound: need a > delta >= 0");
  if (w < 0.0 || !(r > 0.0)) throw std::invalid_argument("lemma42_bound: w >= 0, r > 0");
  return w * (a - delta) * (a - delta) / (2.0 * r * std::sqrt(w * w + (a + delta) * (a + delta)));
}

/// Measures a, delta, w of a pair on a ball around x0 and checks the bound
/// against the grid supremum of the skew-gradient norm.
struct Lemma42Report {
  double a = 0.0, delta = 0.0, w = 0.0;
  double bound = 0.0, sup = 0.0;
  bool applicable = false, pass = false;
};

inline Lemma42Report lemma42_check(const PlanePair& g, const Ball& b, int grid = 10000) {
  Lemma42Report rep;
  const Vec& x0 = b.center;
  Eigen::Vector2d g0(g.g1(x0), g.g2(x0));
  rep.a = g0.norm();
  int per_dim = (b.dim() == 1) ? grid : static_cast<int>(std::sqrt(double(grid)));
  for (const auto& x : ball_grid(b, per_dim)) {
    Eigen::Vector2d v(g.g1(x), g.g2(x));
    rep.delta = std::max(rep.delta, (v - g0).norm());
    // distance to the line through 0 and g(x0)
    if (rep.a > 0.0) {
      Eigen::Vector2d dir = g0 / rep.a;
      rep.w = std::max(rep.w, std::abs(v(0) * dir(1) - v(1) * dir(0)));
    }
    rep.sup = std::max(rep.sup, skew_gradient(g, x).norm());
  }
  rep.applicable = rep.a > rep.delta;
  if (rep.applicable) {
    rep.bound = lemma42_bound(rep.a, rep.delta, rep.w, b.radius);
    rep.pass = rep.sup >= rep.bound * (1.0 - 0.02);
  }
  return rep;
}

/// Empirical (gamma, M) for degree-l plane-valued polynomial maps obeying
/// the diameter-2 normalization and the 1/8 directional-width floor.
struct GammaMEstimate {
  double gamma_hat = std::numeric_limits<double>::infinity();
  double M_hat = 0.0;
  Poly witness1, witness2;  // attains the gamma minimum
  int accepted = 0;
};

inline GammaMEstimate estimate_gamma_M(int d, int l, int trials, std::uint64_t seed) {
  if (trials < 100) throw std::invalid_argument("estimate_gamma_M: trials >= 100");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  Ball b(Vec::Zero(d), 1.0);
  const int per_dim = (d == 1) ? 512 : 48;
  auto pts = ball_grid(b, per_dim);
  GammaMEstimate est;
  int attempts_left = 100 * trials;
  while (est.accepted < trials && attempts_left-- > 0) {
    auto rand_poly = [&] {
      Poly p(d);
      for (const auto& mi : multi_indices(d, l)) p.terms[mi.exponents] = coeff(rng);
      p.terms[std::vector<int>(d, 0)] = coeff(rng);
      p.prune();
      return p;
    };
    Poly p1 = rand_poly(), p2 = rand_poly();
    // image diameter, then rescale to diameter 2
    std::vector<Eigen::Vector2d> img;
    img.reserve(pts.size());
    for (const auto& x : pts) img.emplace_back(p1.eval(x), p2.eval(x));
    double diam = 0.0;
    Eigen::Vector2d mn = img[0], mx = img[0];
    for (const auto& v : img) {
      mn = mn.cwiseMin(v);
      mx = mx.cwiseMax(v);
    }
    // cheap bound first, exact pairwise on the hull box corners scale
    for (size_t i = 0; i < img.size(); i += 7)
      for (size_t j = i + 1; j < img.size(); j += 7) diam = std::max(diam, (img[i] - img[j]).norm());
    diam = std::max(diam, (mx - mn).norm() / std::sqrt(2.0));
    if (!(diam > 1e-9)) continue;
    double scale = 2.0 / diam;
    Poly q1 = p1.scaled(scale), q2 = p2.scaled(scale);
    // directional half-width floor at 1/8 over a 1-degree sweep
    bool wide = true;
    for (int deg = 0; deg < 360 && wide; ++deg) {
      double th = deg * M_PI / 180.0;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const auto& v : img) {
        double s = scale * (std::cos(th) * v(0) + std::sin(th) * v(1));
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      wide = (hi - lo) / 2.0 >= 0.125;
    }
    if (!wide) continue;
    ++est.accepted;
    PlanePair pp = PlanePair::from_polys(q1, q2);
    double sup_skew = 0.0, sup_val = 0.0, sup_grad = 0.0;
    for (const auto& x : pts) {
      sup_skew = std::max(sup_skew, skew_gradient(pp, x).norm());
      sup_val = std::max(sup_val, Eigen::Vector2d(pp.g1(x), pp.g2(x)).norm());
      sup_grad = std::max({sup_grad, pp.grad1(x).norm(), pp.grad2(x).norm()});
    }
    double gamma = sup_skew / (1.0 + sup_val);
    if (gamma < est.gamma_hat) {
      est.gamma_hat = gamma;
      est.witness1 = q1;
      est.witness2 = q2;
    }
    est.M_hat = std::max(est.M_hat, sup_grad);
  }
  if (est.accepted < trials)
    throw std::runtime_error("estimate_gamma_M: sampling failure, width floor rarely met");
  return est;
}

/// min over the family of the grid sup of the skew-gradient norm.
inline double family_inf_sup(const std::vector<PlanePair>& fam, const Ball& b, int grid) {
  if (fam.empty()) throw std::invalid_argument("family_inf_sup: empty family");
  int per_dim = (b.dim() == 1) ? grid : static_cast<int>(std::sqrt(double(grid)));
  auto pts = ball_grid(b, per_dim);
  double out = std::numeric_limits<double>::infinity();
  for (const auto& g : fam) {
    double sup = 0.0;
    for (const auto& x : pts) sup = std::max(sup, skew_gradient(g, x).norm());
    out = std::min(out, sup);
  }
  return out;
}

/// rho = rho1 rho2 / sqrt(rho1^2 + (rho2 + 2 M^2)^2).
inline double rho_formula(double rho1, double rho2, double M) {
  if (!(rho1 > 0.0) || !(rho2 > 0.0) || M < 0.0)
    throw std::invalid_argument("rho_formula: rho1, rho2 > 0, M >= 0");
  double t = rho2 + 2.0 * M * M;
  return rho1 * rho2 / std::sqrt(rho1 * rho1 + t * t);
}

/// Brute 1-parameter search of min over a^2 + b^2 = 1, a,b >= 0 of
/// max(rho2 b, rho1 a - 2 M^2 b); the formula value never exceeds it.
inline double rho_circle_search(double rho1, double rho2, double M, int steps = 100000) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    double th = 0.5 * M_PI * i / steps;
    double a = std::cos(th), b = std::sin(th);
    best = std::min(best, std::max(rho2 * b, rho1 * a - 2.0 * M * M * b));
  }
  return best;
}

}  // namespace dioscope::skew
