#pragma once

// Grid reproductions of the measure bounds: the big-gradient sweep, the
// parameter-box decay sweep, solution counting, dyadic parameter arithmetic,
// and the derivative-constrained dyadic-shell system.

#include "dioscope/core.hpp"
#include "dioscope/lattice.hpp"

#include <cstdint>

namespace dioscope::expt {

struct SweepResult {
  std::vector<double> params;      // delta or eps values, or shell labels' keys
  std::vector<double> measures;    // grid measures, in [0, |B|]
  std::vector<long long> counts;   // raw grid hit counts
  std::vector<std::string> labels; // shell ids where applicable
  double slope = std::numeric_limits<double>::quiet_NaN();
  double constant = std::numeric_limits<double>::quiet_NaN();  // fitted C or E
  std::uint64_t seed = 0;
  bool pass = true;
};

namespace detail {

/// Least-squares slope of log(measure) vs log(param), using points with
/// measure above the quantization floor.
inline double loglog_slope(const std::vector<double>& params, const std::vector<double>& meas,
                           double floor) {
  std::vector<double> xs, ys;
  for (size_t i = 0; i < params.size(); ++i)
    if (meas[i] > floor) {
      xs.push_back(std::log(params[i]));
      ys.push_back(std::log(meas[i]));
    }
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double num = 0, den = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

}  // namespace detail

/// Measure of {x in B : dist(f(x).q, Z) < delta and |grad(f.q)(x)| >= sqrt(n d L |q|)}
/// as delta sweeps, with the slope of the log-log decay.
inline SweepResult thm13_sweep(const FunctionTuple& f, const Ball& b, const IVec& q,
                               const std::vector<double>& deltas, int grid) {
  const int n = f.dim_range();
  const int d = f.dim_domain();
  if (q.size() != n) throw std::invalid_argument("thm13_sweep: q length");
  double L = second_derivative_bound(f, b).value;
  double qn = q.cast<double>().lpNorm<Eigen::Infinity>();
  if (L > 0.0 && qn < 1.0 / (4.0 * n * L * b.radius * b.radius))
    throw std::invalid_argument("thm13_sweep: |q| below the big-gradient threshold");
  for (double dl : deltas)
    if (!(dl > 0.0) || dl >= 1.0) throw std::invalid_argument("thm13_sweep: delta in (0,1)");
  int per_dim = (d == 1) ? grid : static_cast<int>(std::sqrt(double(grid)));
  auto pts = ball_grid(b, per_dim);
  double grad_floor = std::sqrt(double(n) * d * L * qn);
  SweepResult res;
  for (double dl : deltas) {
    long long hits = 0;
    for (const auto& x : pts) {
      double v = f.value(x).dot(q.cast<double>());
      if (nearest_int_dist(v) >= dl) continue;
      Vec g = f.gradient(x) * q.cast<double>();
      if (g.norm() >= grad_floor) ++hits;
    }
    res.params.push_back(dl);
    res.counts.push_back(hits);
    res.measures.push_back(double(hits) / pts.size() * b.volume());
  }
  double cell = b.volume() / pts.size();
  res.slope = detail::loglog_slope(res.params, res.measures, 10.0 * cell);
  res.constant = 0.0;
  for (size_t i = 0; i < deltas.size(); ++i)
    res.constant = std::max(res.constant, res.measures[i] / (deltas[i] * b.volume()));
  return res;
}

/// Measure of the existence set: some nonzero q with |q_i| < T_i has
/// dist(f(x).q, Z) < delta and |grad(f.q)(x)| < K.  The boxes are indexed by
/// their scale parameter eps; E is fitted at the largest eps and the decay
/// exponent 1/(d(2l-1)) is checked for the rest.
inline SweepResult thm14_sweep(const FunctionTuple& f, const Ball& b,
                               const std::vector<std::pair<double, lat::ParamBox>>& family,
                               int grid) {
  if (family.empty()) throw std::invalid_argument("thm14_sweep: empty family");
  const int n = f.dim_range();
  const int d = f.dim_domain();
  auto l = nondegeneracy_order(f, b.center, 4);
  if (!l) throw std::invalid_argument("thm14_sweep: degenerate function tuple");
  double expo = 1.0 / (d * (2.0 * *l - 1.0));
  int per_dim = (d == 1) ? grid : static_cast<int>(std::sqrt(double(grid)));
  auto pts = ball_grid(b, per_dim);
  SweepResult res;
  for (const auto& [eps, box] : family) {
    box.validate();
    if (box.n() != n) throw std::invalid_argument("thm14_sweep: box arity");
    // enumerate the open q-box
    std::vector<IVec> qs;
    double total = 1.0;
    std::vector<long long> lim(n);
    for (int i = 0; i < n; ++i) {
      lim[i] = static_cast<long long>(std::ceil(box.T[i])) - 1;
      if (box.T[i] == std::floor(box.T[i])) lim[i] = static_cast<long long>(box.T[i]) - 1;
      total *= 2.0 * lim[i] + 1.0;
    }
    if (total > 1e7) throw std::invalid_argument("thm14_sweep: q-box too large");
    std::vector<long long> qv(n, 0);
    for (int i = 0; i < n; ++i) qv[i] = -lim[i];
    for (;;) {
      bool zero = true;
      for (long long v : qv) zero = zero && v == 0;
      if (!zero) {
        IVec q(n);
        for (int i = 0; i < n; ++i) q(i) = static_cast<int>(qv[i]);
        qs.push_back(q);
      }
      int i = 0;
      while (i < n && ++qv[i] > lim[i]) qv[i++] = -lim[i];
      if (i == n) break;
    }
    long long hits = 0;
    for (const auto& x : pts) {
      Vec fx = f.value(x);
      Mat gx = f.gradient(x);
      for (const auto& q : qs) {
        Vec qd = q.cast<double>();
        if (nearest_int_dist(fx.dot(qd)) < box.delta && (gx * qd).norm() < box.K) {
          ++hits;
          break;
        }
      }
    }
    res.params.push_back(eps);
    res.counts.push_back(hits);
    res.measures.push_back(double(hits) / pts.size() * b.volume());
  }
  // fit E at the largest eps, then check measured <= E eps^expo elsewhere
  size_t imax = 0;
  for (size_t i = 1; i < res.params.size(); ++i)
    if (res.params[i] > res.params[imax]) imax = i;
  res.constant = res.measures[imax] / std::pow(res.params[imax], expo);
  double cell = b.volume() / pts.size();
  for (size_t i = 0; i < res.params.size(); ++i) {
    if (i == imax) continue;
    if (res.measures[i] > res.constant * std::pow(res.params[i], expo) + cell) res.pass = false;
  }
  res.slope = detail::loglog_slope(res.params, res.measures, 10.0 * cell);
  return res;
}

/// All q with 0 < |q|_inf <= height whose value f(x).q lands within the
/// rate threshold of an integer; sorted lexicographically.
inline std::vector<IVec> count_solutions(const FunctionTuple& f, const Vec& x,
                                         const ApproxSpec& spec, int height) {
  if (height < 1) throw std::invalid_argument("count_solutions: height >= 1");
  const int n = f.dim_range();
  Vec fx = f.value(x);
  std::vector<IVec> out;
  std::vector<int> qv(n, -height);
  for (;;) {
    bool zero = true;
    for (int v : qv) zero = zero && v == 0;
    if (!zero) {
      IVec q(n);
      for (int i = 0; i < n; ++i) q(i) = qv[i];
      if (nearest_int_dist(fx.dot(q.cast<double>())) < threshold(spec, q)) out.push_back(q);
    }
    int i = n - 1;
    while (i >= 0 && ++qv[i] > height) qv[i--] = -height;
    if (i < 0) break;
  }
  return out;  // odometer order is lexicographic already
}

struct DyadicParams {
  lat::ParamBox box;
  double product_formula = 0.0;  // delta K prod T / max T in closed form
  bool valid = false;            // whether the product constraint holds
};

/// delta = 2^{-sum t}, K = sqrt(ndL) 2^{max t/2}, T_i = 2^{t_i+1}; the
/// product ratio collapses to sqrt(ndL) 2^{n-1-max t/2}.
inline DyadicParams dyadic_params(const std::vector<int>& t, int n, int d, double L) {
  if (static_cast<int>(t.size()) != n) throw std::invalid_argument("dyadic_params: t length");
  for (int ti : t)
    if (ti < 0) throw std::invalid_argument("dyadic_params: t_i >= 0");
  if (!(L > 0.0) || n < 1 || d < 1) throw std::invalid_argument("dyadic_params: bad n, d, L");
  int sum = 0, mx = 0;
  for (int ti : t) {
    sum += ti;
    mx = std::max(mx, ti);
  }
  DyadicParams out;
  out.box.delta = std::pow(2.0, -sum);
  out.box.K = std::sqrt(double(n) * d * L) * std::pow(2.0, mx / 2.0);
  for (int ti : t) out.box.T.push_back(std::pow(2.0, ti + 1));
  out.product_formula = std::sqrt(double(n) * d * L) * std::pow(2.0, n - 1.0 - mx / 2.0);
  out.valid = out.product_formula <= 1.0 + 1e-12 && out.box.delta <= 1.0;
  return out;
}

/// Dyadic-shell sweep of the derivative-constrained system: per shell
/// 2^{t_i} <= |q_i| < 2^{t_i+1}, the grid measure of points solving
/// dist(f.q, Z) < P(q)^{-1+gamma/n} and |grad(f.q)| < |q|^{1-gamma-eps}.
inline SweepResult system83_sweep(const FunctionTuple& f, const Ball& b, double gamma, double eps,
                                  int t_max, int grid) {
  const int n = f.dim_range();
  const int d = f.dim_domain();
  if (!(gamma > 0.0) || gamma >= n) throw std::invalid_argument("system83_sweep: 0 < gamma < n");
  if (!(eps > 0.0)) throw std::invalid_argument("system83_sweep: eps > 0");
  if (t_max < 0) throw std::invalid_argument("system83_sweep: t_max >= 0");
  int per_dim = (d == 1) ? grid : static_cast<int>(std::sqrt(double(grid)));
  auto pts = ball_grid(b, per_dim);
  SweepResult res;
  std::vector<int> t(n, 0);
  for (;;) {
    // enumerate the shell
    std::vector<IVec> qs;
    std::vector<int> qv(n);
    std::function<void(int)> rec = [&](int pos) {
      if (pos == n) {
        IVec q(n);
        for (int i = 0; i < n; ++i) q(i) = qv[i];
        qs.push_back(q);
        return;
      }
      int lo = 1 << t[pos], hi = (1 << (t[pos] + 1)) - 1;
      for (int s = -1; s <= 1; s += 2)
        for (int v = lo; v <= hi; ++v) {
          qv[pos] = s * v;
          rec(pos + 1);
        }
    };
    rec(0);
    long long hits = 0;
    for (const auto& x : pts) {
      Vec fx = f.value(x);
      Mat gx = f.gradient(x);
      for (const auto& q : qs) {
        Vec qd = q.cast<double>();
        double pp = static_cast<double>(pi_plus(q));
        double qn = qd.lpNorm<Eigen::Infinity>();
        if (nearest_int_dist(fx.dot(qd)) < std::pow(pp, -1.0 + gamma / n) &&
            (gx * qd).norm() < std::pow(qn, 1.0 - gamma - eps)) {
          ++hits;
          break;
        }
      }
    }
    int tn = 0;
    for (int ti : t) tn = std::max(tn, ti);
    std::string label;
    for (int ti : t) label += (label.empty() ? "" : ",") + std::to_string(ti);
    res.labels.push_back(label);
    res.params.push_back(tn);
    res.counts.push_back(hits);
    res.measures.push_back(double(hits) / pts.size() * b.volume());
    int i = 0;
    while (i < n && ++t[i] > t_max) t[i++] = 0;
    if (i == n) break;
  }
  // summability proxy: partial sums over levels max(t) = j become Cauchy
  std::vector<double> level_sum(t_max + 1, 0.0);
  for (size_t i = 0; i < res.params.size(); ++i)
    level_sum[static_cast<int>(res.params[i])] += res.measures[i];
  if (t_max >= 1) {
    double first = level_sum[0], last = level_sum[t_max];
    res.pass = last <= std::max(0.5 * std::max(first, 1e-12), 0.05 * b.volume());
  }
  res.slope = detail::loglog_slope(res.params, res.measures, 0.0);
  return res;
}

/// Sum over a q-range of the grid measures of A(q) = {x : dist(f.q, Z) < psi}
/// against the rate sum; used for the bounded-ratio bookkeeping.
inline std::pair<double, double> borel_cantelli_sums(const FunctionTuple& f, const Ball& b,
                                                     const ApproxSpec& spec, int q_lo, int q_hi,
                                                     int grid) {
  if (f.dim_range() != 1) throw std::invalid_argument("borel_cantelli_sums: n = 1 only");
  if (q_lo < 1 || q_hi < q_lo) throw std::invalid_argument("borel_cantelli_sums: bad range");
  auto pts = ball_grid(b, grid);
  double meas_sum = 0.0, rate_sum = 0.0;
  for (int q = q_lo; q <= q_hi; ++q) {
    IVec qv(1);
    qv(0) = q;
    double thr = threshold(spec, qv);
    long long hits = 0;
    for (const auto& x : pts)
      if (nearest_int_dist(f.value(x)(0) * q) < thr) ++hits;
    meas_sum += double(hits) / pts.size() * b.volume();
    rate_sum += thr;
  }
  return {meas_sum, rate_sum};
}

}  // namespace dioscope::expt
