#pragma once

// Scalar/vector utilities, balls, approximation-rate functions and smooth
// function tuples with symbolic derivative access.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dioscope {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IVec = Eigen::VectorXi;

/// Euclidean ball in R^d.
struct Ball {
  Vec center;
  double radius = 0.0;

  Ball() = default;
  Ball(Vec c, double r) : center(std::move(c)), radius(r) {
    if (!(radius > 0.0)) throw std::invalid_argument("Ball: radius must be positive");
  }
  static Ball interval(double a, double b) {
    if (!(b > a)) throw std::invalid_argument("Ball: empty interval");
    Vec c(1);
    c(0) = 0.5 * (a + b);
    return Ball(c, 0.5 * (b - a));
  }
  int dim() const { return static_cast<int>(center.size()); }
  Ball dilate(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("Ball::dilate: factor must be positive");
    return Ball(center, c * radius);
  }
  double volume() const;  // Lebesgue measure
  bool contains(const Vec& x) const { return (x - center).norm() <= radius; }
};

/// Volume of the unit ball in R^d.
inline double unit_ball_volume(int d) {
  if (d < 1) throw std::invalid_argument("unit_ball_volume: d >= 1");
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

inline double Ball::volume() const { return unit_ball_volume(dim()) * std::pow(radius, dim()); }

/// Multiindex of partial differentiation.
struct MultiIndex {
  std::vector<int> exponents;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : exponents(std::move(e)) {
    for (int k : exponents)
      if (k < 0) throw std::invalid_argument("MultiIndex: negative exponent");
  }
  int order() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }
  int dim() const { return static_cast<int>(exponents.size()); }
};

/// All multiindices over d variables with 1 <= |beta| <= max_order.
inline std::vector<MultiIndex> multi_indices(int d, int max_order) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(d, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == d) {
      MultiIndex mi{cur};
      if (mi.order() >= 1) out.push_back(mi);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur[pos] = k;
      rec(pos + 1, left - k);
    }
    cur[pos] = 0;
  };
  rec(0, max_order);
  std::sort(out.begin(), out.end(), [](const MultiIndex& a, const MultiIndex& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return a.exponents < b.exponents;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials (exact symbolic differentiation).

struct Poly {
  int nvars = 1;
  std::map<std::vector<int>, double> terms;  // exponent vector -> coefficient

  Poly() = default;
  explicit Poly(int nv) : nvars(nv) {}

  static Poly constant(int nv, double c) {
    Poly p(nv);
    if (c != 0.0) p.terms[std::vector<int>(nv, 0)] = c;
    return p;
  }
  static Poly variable(int nv, int i) {
    Poly p(nv);
    std::vector<int> e(nv, 0);
    e[i] = 1;
    p.terms[e] = 1.0;
    return p;
  }
  static Poly monomial(std::vector<int> e, double c) {
    Poly p(static_cast<int>(e.size()));
    if (c != 0.0) p.terms[std::move(e)] = c;
    return p;
  }
  /// Univariate polynomial from ascending coefficients.
  static Poly from_coeffs(const std::vector<double>& coeffs) {
    Poly p(1);
    for (size_t i = 0; i < coeffs.size(); ++i)
      if (coeffs[i] != 0.0) p.terms[{static_cast<int>(i)}] = coeffs[i];
    return p;
  }

  void prune() {
    for (auto it = terms.begin(); it != terms.end();)
      it = (it->second == 0.0) ? terms.erase(it) : std::next(it);
  }

  double eval(const Vec& x) const {
    double acc = 0.0;
    for (const auto& [e, c] : terms) {
      double m = c;
      for (int i = 0; i < nvars; ++i)
        for (int k = 0; k < e[i]; ++k) m *= x(i);
      acc += m;
    }
    return acc;
  }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
    return d;
  }

  Poly derivative(int var) const {
    Poly out(nvars);
    for (const auto& [e, c] : terms) {
      if (e[var] == 0) continue;
      auto e2 = e;
      e2[var] -= 1;
      out.terms[e2] += c * e[var];
    }
    out.prune();
    return out;
  }

  Poly partial(const MultiIndex& beta) const {
    Poly out = *this;
    for (int i = 0; i < nvars; ++i)
      for (int k = 0; k < beta.exponents[i]; ++k) out = out.derivative(i);
    return out;
  }

  Poly operator+(const Poly& o) const {
    Poly out = *this;
    for (const auto& [e, c] : o.terms) out.terms[e] += c;
    out.prune();
    return out;
  }
  Poly operator-(const Poly& o) const { return *this + o.scaled(-1.0); }
  Poly operator*(const Poly& o) const {
    Poly out(nvars);
    for (const auto& [e1, c1] : terms)
      for (const auto& [e2, c2] : o.terms) {
        std::vector<int> e(nvars);
        for (int i = 0; i < nvars; ++i) e[i] = e1[i] + e2[i];
        out.terms[e] += c1 * c2;
      }
    out.prune();
    return out;
  }
  Poly scaled(double t) const {
    Poly out(nvars);
    if (t == 0.0) return out;
    for (const auto& [e, c] : terms) out.terms[e] = t * c;
    return out;
  }
};

// ---------------------------------------------------------------------------
// Function tuples f = (f_1,...,f_n) : R^d -> R^n.

class FunctionTuple {
 public:
  enum class Family { Veronese, Polynomial, ClosedForm };

  using ValueFn = std::function<Vec(const Vec&)>;
  using PartialFn = std::function<Vec(const Vec&, const MultiIndex&)>;

  static FunctionTuple veronese(int n) {
    if (n < 1) throw std::invalid_argument("veronese: n >= 1");
    std::vector<Poly> comps;
    for (int i = 1; i <= n; ++i) {
      std::vector<int> e = {i};
      comps.push_back(Poly::monomial(e, 1.0));
    }
    FunctionTuple f(std::move(comps));
    f.family_ = Family::Veronese;
    return f;
  }

  explicit FunctionTuple(std::vector<Poly> components)
      : family_(Family::Polynomial), components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("FunctionTuple: empty component list");
    dim_domain_ = components_.front().nvars;
    dim_range_ = static_cast<int>(components_.size());
    for (const auto& p : components_)
      if (p.nvars != dim_domain_) throw std::invalid_argument("FunctionTuple: mixed arity");
  }

  /// Closed-form family; the caller supplies analytic derivatives.
  FunctionTuple(int d, int n, ValueFn value, PartialFn partial, int order)
      : family_(Family::ClosedForm),
        dim_domain_(d),
        dim_range_(n),
        value_(std::move(value)),
        partial_(std::move(partial)),
        order_(order) {}

  /// Presets addressable by string id: "veronese:n" or
  /// "poly:c00,c01,...;c10,c11,..." (univariate, ascending coefficients,
  /// components separated by ';').
  static FunctionTuple from_id(const std::string& id) {
    if (id.rfind("veronese:", 0) == 0) {
      int n = std::stoi(id.substr(9));
      return veronese(n);
    }
    if (id.rfind("poly:", 0) == 0) {
      std::vector<Poly> comps;
      std::stringstream ss(id.substr(5));
      std::string comp;
      while (std::getline(ss, comp, ';')) {
        std::vector<double> coeffs;
        std::stringstream cs(comp);
        std::string tok;
        while (std::getline(cs, tok, ',')) coeffs.push_back(std::stod(tok));
        if (coeffs.empty()) throw std::invalid_argument("from_id: empty poly component");
        comps.push_back(Poly::from_coeffs(coeffs));
      }
      if (comps.empty()) throw std::invalid_argument("from_id: empty poly preset");
      return FunctionTuple(std::move(comps));
    }
    throw std::invalid_argument("from_id: unknown preset '" + id + "'");
  }

  Family family() const { return family_; }
  int dim_domain() const { return dim_domain_; }
  int dim_range() const { return dim_range_; }
  int order() const { return order_; }
  const std::vector<Poly>& components() const { return components_; }

  /// f(x), a row vector of length n.
  Vec value(const Vec& x) const {
    check_point(x);
    if (family_ == Family::ClosedForm) return value_(x);
    Vec out(dim_range_);
    for (int j = 0; j < dim_range_; ++j) out(j) = components_[j].eval(x);
    return out;
  }

  /// d x n matrix with rows given by the partial derivatives of f.
  Mat gradient(const Vec& x) const {
    check_point(x);
    Mat out(dim_domain_, dim_range_);
    for (int i = 0; i < dim_domain_; ++i) {
      std::vector<int> e(dim_domain_, 0);
      e[i] = 1;
      out.row(i) = partial(x, MultiIndex{e}).transpose();
    }
    return out;
  }

  /// The row vector of ∂_β applied componentwise.
  Vec partial(const Vec& x, const MultiIndex& beta) const {
    check_point(x);
    if (beta.dim() != dim_domain_) throw std::invalid_argument("partial: multiindex arity");
    if (family_ == Family::ClosedForm) {
      if (beta.order() > order_)
        throw std::invalid_argument("partial: derivative order beyond declared order");
      if (beta.order() == 0) return value_(x);
      return partial_(x, beta);
    }
    Vec out(dim_range_);
    for (int j = 0; j < dim_range_; ++j) out(j) = components_[j].partial(beta).eval(x);
    return out;
  }

  /// Tuple with permuted components (f_{perm[0]}, ..., f_{perm[n-1]}).
  FunctionTuple permuted(const std::vector<int>& perm) const {
    if (static_cast<int>(perm.size()) != dim_range_)
      throw std::invalid_argument("permuted: bad permutation size");
    if (family_ == Family::ClosedForm) {
      auto v = value_;
      auto p = partial_;
      auto pick = [perm](Vec full) {
        Vec out(perm.size());
        for (size_t j = 0; j < perm.size(); ++j) out(j) = full(perm[j]);
        return out;
      };
      return FunctionTuple(
          dim_domain_, dim_range_, [v, pick](const Vec& x) { return pick(v(x)); },
          [p, pick](const Vec& x, const MultiIndex& b) { return pick(p(x, b)); }, order_);
    }
    std::vector<Poly> comps;
    for (int j : perm) comps.push_back(components_.at(j));
    return FunctionTuple(std::move(comps));
  }

 private:
  void check_point(const Vec& x) const {
    if (static_cast<int>(x.size()) != dim_domain_)
      throw std::invalid_argument("FunctionTuple: point has wrong dimension");
  }

  Family family_ = Family::Polynomial;
  int dim_domain_ = 1;
  int dim_range_ = 1;
  std::vector<Poly> components_;
  ValueFn value_;
  PartialFn partial_;
  int order_ = 64;
};

// ---------------------------------------------------------------------------
// Approximation rates.

/// Parametric family k -> c * k^(-sigma) * log(k+1)^(-tau), or a finite table.
struct RateFunction {
  bool parametric = true;
  double c = 1.0, sigma = 1.0, tau = 0.0;
  std::vector<double> table;  // values at k = 1, 2, ...

  static RateFunction power(double c, double sigma, double tau = 0.0) {
    RateFunction r;
    r.c = c;
    r.sigma = sigma;
    r.tau = tau;
    if (!(c > 0.0)) throw std::invalid_argument("RateFunction: c must be positive");
    return r;
  }
  static RateFunction tabular(std::vector<double> values) {
    RateFunction r;
    r.parametric = false;
    r.table = std::move(values);
    for (double v : r.table)
      if (!(v > 0.0)) throw std::invalid_argument("RateFunction: table values must be positive");
    return r;
  }

  double eval(double k) const {
    if (!(k > 0.0)) throw std::invalid_argument("RateFunction: argument must be positive");
    if (parametric) return c * std::pow(k, -sigma) * std::pow(std::log(k + 1.0), -tau);
    auto idx = static_cast<size_t>(std::floor(k));
    if (idx < 1) idx = 1;
    if (idx > table.size()) idx = table.size();
    return table[idx - 1];
  }
};

struct ApproxSpec {
  enum class Variant { Standard, Multiplicative, Quasinorm };
  Variant variant = Variant::Standard;
  std::vector<double> s;  // quasinorm weights, positive, summing to 1
  RateFunction rate;

  static ApproxSpec standard(RateFunction r) { return {Variant::Standard, {}, std::move(r)}; }
  static ApproxSpec multiplicative(RateFunction r) {
    return {Variant::Multiplicative, {}, std::move(r)};
  }
  static ApproxSpec quasinorm(std::vector<double> weights, RateFunction r) {
    ApproxSpec spec{Variant::Quasinorm, std::move(weights), std::move(r)};
    double sum = 0.0;
    for (double w : spec.s) {
      if (!(w > 0.0)) throw std::invalid_argument("ApproxSpec: quasinorm weights must be positive");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("ApproxSpec: quasinorm weights must sum to 1");
    return spec;
  }
};

// ---------------------------------------------------------------------------
// Operations.

/// Distance from x to the closest integer; lands in [0, 1/2].
inline double nearest_int_dist(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("nearest_int_dist: non-finite input");
  return std::abs(std::remainder(x, 1.0));
}

/// Product of max(|q_i|, 1) over the coordinates.
inline long long pi_plus(const IVec& q) {
  if (q.size() < 1) throw std::invalid_argument("pi_plus: empty vector");
  long long prod = 1;
  for (int i = 0; i < q.size(); ++i) prod *= std::max<long long>(std::abs((long long)q(i)), 1);
  return prod;
}

/// max_i |x_i|^(1/s_i).
inline double quasinorm(const Vec& x, const std::vector<double>& s) {
  if (static_cast<size_t>(x.size()) != s.size())
    throw std::invalid_argument("quasinorm: size mismatch");
  double best = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    if (!(s[i] > 0.0)) throw std::invalid_argument("quasinorm: weights must be positive");
    best = std::max(best, std::pow(std::abs(x(i)), 1.0 / s[i]));
  }
  return best;
}

/// The approximation threshold Psi(q) for the chosen variant.
inline double threshold(const ApproxSpec& spec, const IVec& q) {
  if (q.size() < 1 || q.lpNorm<Eigen::Infinity>() == 0)
    throw std::invalid_argument("threshold: q must be nonzero");
  const int n = static_cast<int>(q.size());
  switch (spec.variant) {
    case ApproxSpec::Variant::Standard: {
      double norm = q.cast<double>().lpNorm<Eigen::Infinity>();
      return spec.rate.eval(std::pow(norm, n));
    }
    case ApproxSpec::Variant::Multiplicative:
      return spec.rate.eval(static_cast<double>(pi_plus(q)));
    case ApproxSpec::Variant::Quasinorm:
      return spec.rate.eval(quasinorm(q.cast<double>(), spec.s));
  }
  throw std::logic_error("threshold: unreachable");
}

enum class SeriesClass { Converges, Diverges };

/// Integral-test classification of the convergence condition for the rate.
inline SeriesClass classify_series(const ApproxSpec& spec, int n) {
  if (!spec.rate.parametric)
    throw std::domain_error("classify_series: tabular rates have no tail law");
  if (n < 1) throw std::invalid_argument("classify_series: n >= 1");
  // Multiplicative picks up the extra (log k)^(n-1) factor.
  double log_weight = (spec.variant == ApproxSpec::Variant::Multiplicative) ? (n - 1.0) : 0.0;
  double sigma = spec.rate.sigma;
  double tau_eff = spec.rate.tau - log_weight;
  if (sigma > 1.0) return SeriesClass::Converges;
  if (sigma == 1.0 && tau_eff > 1.0) return SeriesClass::Converges;
  return SeriesClass::Diverges;
}

/// Smallest l <= l_max such that the partial derivatives of order up to l
/// at x0 span R^n.
inline std::optional<int> nondegeneracy_order(const FunctionTuple& f, const Vec& x0, int l_max) {
  if (l_max < 1) throw std::invalid_argument("nondegeneracy_order: l_max >= 1");
  const int n = f.dim_range();
  std::vector<Vec> rows;
  for (int l = 1; l <= l_max; ++l) {
    for (const auto& beta : multi_indices(f.dim_domain(), l))
      if (beta.order() == l) rows.push_back(f.partial(x0, beta));
    Mat m(rows.size(), n);
    for (size_t i = 0; i < rows.size(); ++i) m.row(i) = rows[i].transpose();
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-9 * sv(0)) ++rank;
    if (rank == n) return l;
  }
  return std::nullopt;
}

/// Deterministic grid over the ball: per-axis lattice on the circumscribed
/// cube, restricted to the ball.
inline std::vector<Vec> ball_grid(const Ball& ball, int per_dim) {
  const int d = ball.dim();
  std::vector<Vec> pts;
  std::vector<int> idx(d, 0);
  for (;;) {
    Vec x(d);
    for (int i = 0; i < d; ++i) {
      double t = (per_dim == 1) ? 0.5 : static_cast<double>(idx[i]) / (per_dim - 1);
      x(i) = ball.center(i) - ball.radius + 2.0 * ball.radius * t;
    }
    if ((x - ball.center).norm() <= ball.radius + 1e-15) pts.push_back(x);
    int i = 0;
    while (i < d && ++idx[i] == per_dim) idx[i++] = 0;
    if (i == d) break;
  }
  return pts;
}

struct SecondDerivBound {
  double value = 0.0;
  double grid_spacing = 0.0;  // discretization margin, reported not applied
};

/// Grid supremum of ||∂_β f||_inf over |β| = 2.
inline SecondDerivBound second_derivative_bound(const FunctionTuple& f, const Ball& ball,
                                                int per_dim = 64) {
  SecondDerivBound out;
  out.grid_spacing = 2.0 * ball.radius / std::max(1, per_dim - 1);
  std::vector<MultiIndex> betas;
  for (const auto& beta : multi_indices(f.dim_domain(), 2))
    if (beta.order() == 2) betas.push_back(beta);
  for (const auto& x : ball_grid(ball, per_dim))
    for (const auto& beta : betas)
      out.value = std::max(out.value, f.partial(x, beta).lpNorm<Eigen::Infinity>());
  return out;
}

}  // namespace dioscope
