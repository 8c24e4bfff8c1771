#pragma once

// (C,alpha)-good certification on a deterministic sub-ball family, the
// explicit polynomial constants, the oscillation lower bound, the exponent
// bootstrap, and greedy Besicovitch ball selection.

#include "dioscope/core.hpp"

#include <functional>

namespace dioscope::good {

using ScalarField = std::function<double(const Vec&)>;

struct GoodCertificate {
  double C = 1.0;
  double alpha = 1.0;
  Ball ball;
  std::vector<double> eps_grid;
  int resolution = 0;            // total samples per sub-ball
  double margin = 0.02;          // discretization allowance
  double worst_ratio = 0.0;      // max of measure/(eps^alpha |B'|) over family
  bool pass = false;
  std::vector<double> full_ball_fraction;  // sublevel fraction on B per eps
};

/// Deterministic family of sub-balls: centers on a 16^d grid (5^d for d=2),
/// dyadic radii r, r/2, ..., r/64, kept inside B.
inline std::vector<Ball> sub_ball_family(const Ball& b) {
  const int d = b.dim();
  const int centers_per_dim = (d == 1) ? 16 : 5;
  const int radii = (d == 1) ? 7 : 4;  // down to r/64 resp. r/8
  std::vector<Ball> out;
  out.push_back(b);
  for (const auto& c : ball_grid(Ball(b.center, b.radius * (1.0 - 1e-12)), centers_per_dim)) {
    double slack = b.radius - (c - b.center).norm();
    for (int j = 1; j < radii; ++j) {
      double rad = b.radius / static_cast<double>(1 << j);
      if (rad <= slack + 1e-15) out.push_back(Ball(c, std::min(rad, slack)));
    }
  }
  return out;
}

/// Empirical check of |{x in B' : |f(x)| < eps sup_{B'}|f|}| <= C eps^alpha |B'|
/// over the deterministic sub-ball family of B.
inline GoodCertificate certify(const ScalarField& f, const Ball& b, double C, double alpha,
                               const std::vector<double>& eps_grid, int resolution,
                               double margin = 0.02) {
  if (eps_grid.empty()) throw std::invalid_argument("certify: empty eps grid");
  for (double e : eps_grid)
    if (!(e > 0.0) || e > 1.0) throw std::invalid_argument("certify: eps in (0,1]");
  if (resolution < 1000) throw std::invalid_argument("certify: resolution >= 1000 samples");
  GoodCertificate cert;
  cert.C = C;
  cert.alpha = alpha;
  cert.ball = b;
  cert.eps_grid = eps_grid;
  cert.resolution = resolution;
  cert.margin = margin;
  const int per_dim = static_cast<int>(std::ceil(std::pow(double(resolution), 1.0 / b.dim())));
  cert.pass = true;
  bool first = true;
  for (const auto& sub : sub_ball_family(b)) {
    auto pts = ball_grid(sub, per_dim);
    std::vector<double> vals(pts.size());
    double sup = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
      vals[i] = std::abs(f(pts[i]));
      sup = std::max(sup, vals[i]);
    }
    for (double eps : eps_grid) {
      size_t below = 0;
      for (double v : vals) below += (v < eps * sup) ? 1 : 0;
      double frac = pts.empty() ? 0.0 : static_cast<double>(below) / pts.size();
      if (first) cert.full_ball_fraction.push_back(frac);  // sub-ball #0 is B itself
      double ratio = frac / std::pow(eps, alpha);
      cert.worst_ratio = std::max(cert.worst_ratio, ratio);
      if (ratio > C * (1.0 + margin)) cert.pass = false;
    }
    first = false;
  }
  return cert;
}

/// C_{d,l} = 2^{d+1} d l (l+1)^{1/l} / v_d for polynomials of degree <= l.
inline double poly_constant(int d, int l) {
  if (d < 1 || l < 1) throw std::invalid_argument("poly_constant: d, l >= 1");
  return std::pow(2.0, d + 1) * d * l * std::pow(l + 1.0, 1.0 / l) / unit_ball_volume(d);
}

/// C = (2^d/v_d) d k(k+1) (A1/A2 (k+1)(2k^k+1))^{1/k}.
inline double lemma33_constant(int d, int k, double A1, double A2) {
  if (!(A2 > 0.0)) throw std::invalid_argument("lemma33_constant: A2 > 0");
  if (!(A1 >= A2) || k < 1 || d < 1) throw std::invalid_argument("lemma33_constant: bad input");
  double inner = (A1 / A2) * (k + 1.0) * (2.0 * std::pow(double(k), k) + 1.0);
  return (std::pow(2.0, d) / unit_ball_volume(d)) * d * k * (k + 1.0) *
         std::pow(inner, 1.0 / k);
}

/// Oscillation lower bound c/(k^k (k+1)!) (2r)^k when the k-th directional
/// derivative is at least c in modulus.
inline double oscillation_bound(double c, int k, double r) {
  if (!(c > 0.0) || !(r > 0.0) || k < 1) throw std::invalid_argument("oscillation_bound: bad input");
  double fact = 1.0;
  for (int i = 2; i <= k + 1; ++i) fact *= i;
  return c / (std::pow(double(k), k) * fact) * std::pow(2.0 * r, k);
}

/// Companion check: grid oscillation of f on B(x0, r) meets the bound.
inline bool oscillation_check(const ScalarField& f, const Ball& b, double c, int k,
                              int per_dim = 256) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& x : ball_grid(b, per_dim)) {
    double v = f(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return (hi - lo) >= oscillation_bound(c, k, b.radius) * (1.0 - 1e-9);
}

/// Exponent bootstrap: from (3.1) holding for eps >= delta, the largest
/// alpha' with C N_d delta^{alpha - alpha'} <= 1; absent when alpha' <= 0.
inline std::optional<double> amplify(double C, double alpha, double delta, int N_d) {
  if (!(delta > 0.0) || delta >= 1.0) throw std::invalid_argument("amplify: delta in (0,1)");
  if (!(C * N_d >= 1.0)) throw std::invalid_argument("amplify: C N_d >= 1");
  double ap = alpha - std::log(C * N_d) / std::log(1.0 / delta);
  if (ap <= 0.0) return std::nullopt;
  return ap;
}

struct CoverSelection {
  std::vector<Ball> chosen;
  std::vector<size_t> indices;  // into the input point list
  int multiplicity = 0;
  bool covers = false;
};

/// Greedy covering selection: repeatedly pick the largest-radius ball whose
/// center is not yet covered (ties by lexicographic center).  Multiplicity
/// is measured exactly over the input points plus a probe grid.
inline CoverSelection besicovitch_cover(const std::vector<Vec>& points,
                                        const std::function<double(const Vec&)>& radius,
                                        int dim) {
  CoverSelection sel;
  if (points.empty()) {
    sel.covers = true;
    return sel;
  }
  std::vector<double> radii(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    if (static_cast<int>(points[i].size()) != dim)
      throw std::invalid_argument("besicovitch_cover: point dimension");
    radii[i] = radius(points[i]);
    if (!(radii[i] > 0.0)) throw std::invalid_argument("besicovitch_cover: radii positive");
  }
  auto lex_less = [](const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i)
      if (a(i) != b(i)) return a(i) < b(i);
    return false;
  };
  std::vector<bool> covered(points.size(), false);
  for (;;) {
    size_t pick = points.size();
    for (size_t i = 0; i < points.size(); ++i) {
      if (covered[i]) continue;
      if (pick == points.size() || radii[i] > radii[pick] ||
          (radii[i] == radii[pick] && lex_less(points[i], points[pick])))
        pick = i;
    }
    if (pick == points.size()) break;
    sel.indices.push_back(pick);
    sel.chosen.push_back(Ball(points[pick], radii[pick]));
    for (size_t i = 0; i < points.size(); ++i)
      if ((points[i] - points[pick]).norm() < radii[pick]) covered[i] = true;
    covered[pick] = true;  // closed at its own center
  }
  sel.covers = true;
  for (size_t i = 0; i < points.size(); ++i) {
    bool in = false;
    for (const auto& b : sel.chosen) in = in || (points[i] - b.center).norm() <= b.radius;
    sel.covers = sel.covers && in;
  }
  // exact multiplicity at input points, then a probe grid over the hull box
  auto count_at = [&](const Vec& x) {
    int c = 0;
    for (const auto& b : sel.chosen)
      if ((x - b.center).norm() < b.radius) ++c;
    return c;
  };
  for (const auto& p : points) sel.multiplicity = std::max(sel.multiplicity, count_at(p));
  Vec lo = points[0], hi = points[0];
  for (size_t j = 0; j < points.size(); ++j)
    for (int i = 0; i < dim; ++i) {
      lo(i) = std::min(lo(i), points[j](i) - radii[j]);
      hi(i) = std::max(hi(i), points[j](i) + radii[j]);
    }
  const int probe = (dim == 1) ? 2048 : 64;
  std::vector<int> idx(dim, 0);
  for (;;) {
    Vec x(dim);
    for (int i = 0; i < dim; ++i)
      x(i) = lo(i) + (hi(i) - lo(i)) * (idx[i] + 0.5) / probe;
    sel.multiplicity = std::max(sel.multiplicity, count_at(x));
    int i = 0;
    while (i < dim && ++idx[i] == probe) idx[i++] = 0;
    if (i == dim) break;
  }
  return sel;
}

}  // namespace dioscope::good
