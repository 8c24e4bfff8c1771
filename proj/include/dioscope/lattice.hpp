#pragma once

// Lattice-side machinery: the shear U_x attached to a function tuple, the
// diagonal contraction D built from a parameter box (delta, K, T), brute
// shortest vectors of D U_x restricted to the integer sublattice, quotient
// seminorms of discrete subgroups, and the structural expansion of
// pi(D U_x w) in terms of an orthonormal frame of the contracted span.

#include "dioscope/core.hpp"
#include "dioscope/exterior.hpp"

#include <array>
#include <map>

namespace dioscope::lat {

using ext::Ambient;
using ext::MultiVector;
using ext::SubgroupRep;

/// Parameter box (delta, K, T_1..T_n) with delta K T_1..T_n / max T_i <= 1.
struct ParamBox {
  double delta = 0.0;
  double K = 0.0;
  std::vector<double> T;

  int n() const { return static_cast<int>(T.size()); }
  double max_T() const {
    double m = 0.0;
    for (double t : T) m = std::max(m, t);
    return m;
  }
  double product_ratio() const {
    double p = delta * K;
    for (double t : T) p *= t;
    return p / max_T();
  }
  void validate() const {
    if (!(delta > 0.0) || delta > 1.0) throw std::invalid_argument("ParamBox: delta in (0,1]");
    if (!(K > 0.0)) throw std::invalid_argument("ParamBox: K > 0");
    if (T.empty()) throw std::invalid_argument("ParamBox: empty T");
    for (double t : T)
      if (!(t >= 1.0)) throw std::invalid_argument("ParamBox: T_i >= 1");
    if (product_ratio() > 1.0 + 1e-12)
      throw std::invalid_argument("ParamBox: delta K T_1..T_n / max T_i exceeds 1");
  }
  /// Scale parameter: eps = max(delta, (delta K prod T / max T)^(1/(n+1))).
  double epsilon() const {
    validate();
    return std::max(delta, std::pow(product_ratio(), 1.0 / (n() + 1)));
  }
};

/// Diagonal weights (a_0, a_*, a_1..a_n); D carries the reciprocals.
struct DiagonalWeights {
  Ambient amb;
  double a0 = 1.0;
  double astar = 1.0;
  std::vector<double> a;

  explicit DiagonalWeights(Ambient amb_) : amb(amb_), a(amb_.n, 1.0) {}

  void validate() const {
    if (static_cast<int>(a.size()) != amb.n)
      throw std::invalid_argument("DiagonalWeights: wrong a length");
    if (!(a0 > 0.0) || !(astar > 0.0)) throw std::invalid_argument("DiagonalWeights: positive");
    if (a0 > 1.0 + 1e-12) throw std::invalid_argument("DiagonalWeights: a0 <= 1");
    double prev = 1.0;
    for (double ai : a) {
      if (ai + 1e-12 < prev) throw std::invalid_argument("DiagonalWeights: need 1 <= a1 <= ... <= an");
      prev = ai;
    }
    double cap = a0;
    for (int i = 0; i + 1 < amb.n; ++i) cap *= a[i];
    if (astar > 1.0 / cap + 1e-9)
      throw std::invalid_argument("DiagonalWeights: a* exceeds (a0 a1..a_{n-1})^{-1}");
  }

  /// Diagonal of D in ambient coordinate order.
  Vec d_diag() const {
    Vec diag(amb.m());
    diag(0) = 1.0 / a0;
    for (int i = 1; i <= amb.d; ++i) diag(i) = 1.0 / astar;
    for (int j = 0; j < amb.n; ++j) diag(amb.d + 1 + j) = 1.0 / a[j];
    return diag;
  }
};

/// Weights from a parameter box: a0 = delta/eps, a* = K/eps, a_i = T_i/eps.
/// T must be sorted ascending so the ordering constraint holds.
inline DiagonalWeights weights_from_params(Ambient amb, const ParamBox& p) {
  if (p.n() != amb.n) throw std::invalid_argument("weights_from_params: n mismatch");
  for (int i = 0; i + 1 < p.n(); ++i)
    if (p.T[i] > p.T[i + 1]) throw std::invalid_argument("weights_from_params: sort T ascending");
  double eps = p.epsilon();
  DiagonalWeights w(amb);
  w.a0 = p.delta / eps;
  w.astar = p.K / eps;
  for (int i = 0; i < amb.n; ++i) w.a[i] = p.T[i] / eps;
  w.validate();
  return w;
}

/// The unipotent shear U_x with f(x) in the e_0 row and grad f(x) in the
/// starred rows, acting on the n unstarred columns.
inline Mat u_matrix(const FunctionTuple& f, const Vec& x) {
  Ambient amb(f.dim_domain(), f.dim_range());
  const int m = amb.m();
  Mat u = Mat::Identity(m, m);
  Vec fx = f.value(x);
  Mat gx = f.gradient(x);  // d x n
  for (int j = 0; j < amb.n; ++j) {
    u(0, amb.d + 1 + j) = fx(j);
    for (int i = 0; i < amb.d; ++i) u(1 + i, amb.d + 1 + j) = gx(i, j);
  }
  return u;
}

/// Embed a lattice vector (p, q) in Z^{1+n} into the ambient coordinates.
inline IVec embed_lattice(Ambient amb, long long p, const std::vector<long long>& q) {
  if (static_cast<int>(q.size()) != amb.n) throw std::invalid_argument("embed_lattice: bad q");
  IVec v = IVec::Zero(amb.m());
  v(0) = static_cast<int>(p);
  for (int j = 0; j < amb.n; ++j) v(amb.d + 1 + j) = static_cast<int>(q[j]);
  return v;
}

struct ShortestVector {
  IVec v;          // ambient integer coordinates
  double length = 0.0;
};

/// Brute shortest nonzero vector of D U restricted to the integer lattice,
/// over |q_i| <= height with the companion bound on |p| derived from the
/// shear entries.  Ties resolved lexicographically on (q, p).
inline ShortestVector shortest_vector(const DiagonalWeights& w, const Mat& u, int height) {
  if (height < 1) throw std::invalid_argument("shortest_vector: height >= 1");
  w.validate();
  const Ambient amb = w.amb;
  double maxf = 0.0;
  for (int j = 0; j < amb.n; ++j) maxf = std::max(maxf, std::abs(u(0, amb.d + 1 + j)));
  const long long pb = static_cast<long long>(std::ceil(height * (1.0 + maxf * amb.n)));
  Vec diag = w.d_diag();

  ShortestVector best;
  best.length = std::numeric_limits<double>::infinity();
  std::vector<long long> q(amb.n, -height);
  std::vector<long long> best_key;
  for (;;) {
    bool qzero = true;
    for (long long qi : q) qzero = qzero && qi == 0;
    for (long long p = -pb; p <= pb; ++p) {
      if (qzero && p == 0) continue;
      IVec v = embed_lattice(amb, p, q);
      double len = (diag.asDiagonal() * (u * v.cast<double>())).norm();
      std::vector<long long> key = q;
      key.push_back(p);
      if (len < best.length || (len == best.length && key < best_key)) {
        best.length = len;
        best.v = v;
        best_key = key;
      }
    }
    int i = 0;
    while (i < amb.n && ++q[i] > height) q[i++] = -height;
    if (i == amb.n) break;
  }
  return best;
}

/// nu(D U w) for the exact representative of the subgroup.
inline double nu_subgroup(const DiagonalWeights& w, const Mat& u, const SubgroupRep& sub) {
  w.validate();
  if (sub.rank == 0) return 1.0;
  Vec diag = w.d_diag();
  MultiVector acc = MultiVector::scalar(sub.amb, 1.0);
  for (const auto& b : sub.basis) {
    Vec img = diag.asDiagonal() * (u * b.cast<double>());
    acc = acc.wedge(MultiVector::from_vector(sub.amb, img));
  }
  return ext::nu(acc);
}

// ---------------------------------------------------------------------------
// Structural expansion of pi(D U_x w).
//
// With H = D U_x D^{-1} and S = D Gamma_R, the image splits along an
// orthonormal frame v_1..v_{k-1} of S orthogonal to e_0 (plus v_0 when e_0
// does not lie in S).  Writing c_i = fhat . v_i and w_i for the starred
// gradient contribution, pi(H Dw) is a finite sum of frame wedges; the
// function below assembles it term by term without ever applying U.

namespace detail {

/// Wedge of a list of plain vectors as a MultiVector.
inline MultiVector wedge_frame(Ambient amb, const std::vector<Vec>& vs) {
  MultiVector acc = MultiVector::scalar(amb, 1.0);
  for (const auto& v : vs) acc = acc.wedge(MultiVector::from_vector(amb, v));
  return acc;
}

}  // namespace detail

inline MultiVector expansion_oracle(const DiagonalWeights& w, const Mat& u,
                                    const SubgroupRep& sub) {
  w.validate();
  const Ambient amb = w.amb;
  const int m = amb.m();
  const int k = sub.rank;
  if (k < 1) throw std::invalid_argument("expansion_oracle: rank >= 1");

  Vec diag = w.d_diag();
  // fhat = e_0 row of D U D^{-1}: fhat(x) v picks up (a_j/a_0) f_j on the
  // unstarred slots; the gradient block scaled by a_j/a_* lands on e*.
  Vec fhat = Vec::Zero(m);
  fhat(0) = 1.0;
  for (int j = 0; j < amb.n; ++j) fhat(amb.d + 1 + j) = (w.a[j] / w.a0) * u(0, amb.d + 1 + j);
  // star_grad(v): the e*-components of H v for v orthogonal to e_0 and the
  // starred slots, already carrying the a_0/a_* prefactor split off below.
  auto star_grad = [&](const Vec& v) {
    Vec g = Vec::Zero(amb.d);
    for (int i = 0; i < amb.d; ++i)
      for (int j = 0; j < amb.n; ++j)
        g(i) += (w.a[j] / w.a0) * u(1 + i, amb.d + 1 + j) * v(amb.d + 1 + j);
    return g;
  };
  auto star_embed = [&](const Vec& g) {
    Vec v = Vec::Zero(m);
    for (int i = 0; i < amb.d; ++i) v(1 + i) = g(i);
    return v;
  };

  // Orthonormalize the contracted basis D b_i.
  std::vector<Vec> p;
  for (const auto& b : sub.basis) {
    Vec v = diag.asDiagonal() * b.cast<double>();
    for (const auto& q : p) v -= q.dot(v) * q;
    for (const auto& q : p) v -= q.dot(v) * q;  // second pass for stability
    double nrm = v.norm();
    if (nrm < 1e-300) throw std::invalid_argument("expansion_oracle: degenerate basis");
    p.push_back(v / nrm);
  }

  Vec e0 = Vec::Zero(m);
  e0(0) = 1.0;
  Vec resid = e0;
  Vec proj = Vec::Zero(m);
  for (const auto& q : p) proj += q.dot(e0) * q;
  resid -= proj;
  const bool e0_in_span = resid.norm() < 1e-10;

  std::vector<Vec> frame;  // v_1..v_{k-1}
  Vec v0 = Vec::Zero(m);
  bool have_v0 = false;
  if (e0_in_span) {
    // Case 1: frame spans S orthogonal to e_0.
    for (const auto& q : p) {
      Vec v = q - e0.dot(q) * e0;
      for (const auto& f2 : frame) v -= f2.dot(v) * f2;
      for (const auto& f2 : frame) v -= f2.dot(v) * f2;
      double nrm = v.norm();
      if (nrm > 1e-8) frame.push_back(v / nrm);
    }
    if (static_cast<int>(frame.size()) != k - 1)
      throw std::logic_error("expansion_oracle: frame extraction failed");
  } else if (proj.norm() < 1e-10) {
    // e_0 orthogonal to S: any frame works, v_0 absorbs the leftover.
    frame.assign(p.begin(), p.end() - 1);
    v0 = p.back();
    have_v0 = true;
  } else {
    // Case 2: split off the direction of S closest to e_0.
    Vec p0 = proj.normalized();
    for (const auto& q : p) {
      Vec v = q - p0.dot(q) * p0;
      for (const auto& f2 : frame) v -= f2.dot(v) * f2;
      for (const auto& f2 : frame) v -= f2.dot(v) * f2;
      double nrm = v.norm();
      if (nrm > 1e-8) frame.push_back(v / nrm);
    }
    if (static_cast<int>(frame.size()) != k - 1)
      throw std::logic_error("expansion_oracle: frame extraction failed");
    v0 = (p0 - e0.dot(p0) * e0).normalized();
    have_v0 = true;
  }

  // Contracted representative Dw and the scalars a, b of (a e_0 + b v_0) ^ V.
  MultiVector dw(amb);
  for (const auto& [mask, c] : sub.rep.terms) {
    double scale = static_cast<double>(c);
    for (ext::Mask rest = mask; rest != 0; rest &= rest - 1)
      scale *= diag(std::countr_zero(rest));
    dw.terms[mask] = scale;
  }
  std::vector<Vec> ev = frame;
  ev.insert(ev.begin(), e0);
  double a = dw.dot(detail::wedge_frame(amb, ev));
  double b = 0.0;
  if (have_v0) {
    std::vector<Vec> vv = frame;
    vv.insert(vv.begin(), v0);
    b = dw.dot(detail::wedge_frame(amb, vv));
  }

  // With H e_0 = e_0 and H v = v + c(v) e_0 + W(v) for frame vectors, the
  // image of (a e_0 + b v_0) ^ V expands multilinearly; modulo pi, at most
  // one starred factor and one e_0 factor survive.  Substituting the
  // contributions in place keeps every wedge in frame order, so no
  // permutation signs appear.
  const double ratio = w.a0 / w.astar;
  MultiVector out(amb);
  // a e_0 ^ (v_1 + W_1) ^ ... : pure term plus one-W substitutions
  {
    std::vector<Vec> base = frame;
    base.insert(base.begin(), e0);
    out = out + detail::wedge_frame(amb, base).scaled(a);
    for (int i = 0; i < k - 1; ++i) {
      std::vector<Vec> sub2 = base;
      sub2[1 + i] = star_embed(ratio * star_grad(frame[i]));
      out = out + detail::wedge_frame(amb, sub2).scaled(a);
    }
  }
  if (have_v0 && b != 0.0) {
    // b (v_0 + c_0 e_0 + W_0) ^ (v_1 + c_1 e_0 + W_1) ^ ...
    std::vector<Vec> base = frame;
    base.insert(base.begin(), v0);
    std::vector<double> c(k);
    std::vector<Vec> W(k);
    for (int i = 0; i < k; ++i) {
      c[i] = fhat.dot(base[i]);
      W[i] = star_embed(ratio * star_grad(base[i]));
    }
    out = out + detail::wedge_frame(amb, base).scaled(b);
    for (int i = 0; i < k; ++i) {
      std::vector<Vec> sub_e = base;
      sub_e[i] = e0;
      out = out + detail::wedge_frame(amb, sub_e).scaled(b * c[i]);
      std::vector<Vec> sub_w = base;
      sub_w[i] = W[i];
      out = out + detail::wedge_frame(amb, sub_w).scaled(b);
      for (int j = 0; j < k; ++j) {
        if (j == i) continue;
        std::vector<Vec> sub_ew = sub_e;
        sub_ew[j] = W[j];
        out = out + detail::wedge_frame(amb, sub_ew).scaled(b * c[i]);
      }
    }
  }
  out.prune(0.0);
  return ext::project_pi(out);
}

// ---------------------------------------------------------------------------
// Enumeration of primitive subgroups with basis entries bounded by height.

namespace detail {

/// Row-style Hermite normal form as a canonical key for the row lattice.
inline std::vector<std::vector<long long>> hnf_key(std::vector<std::vector<long long>> a) {
  size_t rows = a.size(), cols = a.empty() ? 0 : a[0].size();
  size_t r = 0;
  for (size_t col = 0; col < cols && r < rows; ++col) {
    // reduce column below r to a single nonzero pivot via Euclid
    for (;;) {
      size_t piv = rows;
      for (size_t i = r; i < rows; ++i)
        if (a[i][col] != 0 && (piv == rows || std::abs(a[i][col]) < std::abs(a[piv][col])))
          piv = i;
      if (piv == rows) break;
      std::swap(a[r], a[piv]);
      bool done = true;
      for (size_t i = r + 1; i < rows; ++i)
        if (a[i][col] != 0) {
          long long q = a[i][col] / a[r][col];
          for (size_t j = 0; j < cols; ++j) a[i][j] -= q * a[r][j];
          if (a[i][col] != 0) done = false;
        }
      if (done) break;
    }
    if (a[r][col] == 0) continue;
    if (a[r][col] < 0)
      for (size_t j = 0; j < cols; ++j) a[r][j] = -a[r][j];
    for (size_t i = 0; i < r; ++i) {
      long long q = a[i][col] >= 0 ? a[i][col] / a[r][col]
                                   : -((-a[i][col] + a[r][col] - 1) / a[r][col]);
      for (size_t j = 0; j < cols; ++j) a[i][j] -= q * a[r][j];
    }
    ++r;
  }
  return a;
}

}  // namespace detail

/// All primitive rank-k subgroups of the lattice admitting a basis with
/// entries bounded by height, one representative each (deduplicated by
/// Hermite normal form).  Lattice coordinates are (p, q_1..q_n).
inline std::vector<SubgroupRep> enumerate_primitive(Ambient amb, int rank, int height) {
  if (rank < 0 || rank > amb.n + 1) throw std::invalid_argument("enumerate_primitive: rank");
  if (height < 1) throw std::invalid_argument("enumerate_primitive: height >= 1");
  std::vector<SubgroupRep> out;
  if (rank == 0) {
    out.push_back(SubgroupRep(amb));
    return out;
  }
  const int r = amb.n + 1;
  // primitive vectors up to sign, first nonzero entry positive
  std::vector<std::vector<long long>> prim;
  std::vector<long long> v(r, -height);
  for (;;) {
    long long g = 0;
    int first_nz = -1;
    for (int i = 0; i < r; ++i) {
      g = std::gcd(g, std::abs(v[i]));
      if (first_nz < 0 && v[i] != 0) first_nz = i;
    }
    if (g == 1 && v[first_nz] > 0) prim.push_back(v);
    int i = r - 1;
    while (i >= 0 && ++v[i] > height) v[i--] = -height;
    if (i < 0) break;
  }
  std::map<std::vector<std::vector<long long>>, std::vector<size_t>> seen;
  std::vector<size_t> pick(rank);
  std::function<void(int, size_t)> rec = [&](int pos, size_t from) {
    if (pos == rank) {
      std::vector<std::vector<long long>> m;
      for (size_t idx : pick) m.push_back(prim[idx]);
      auto inv = ext::smith_invariants(m);
      if (static_cast<int>(inv.size()) != rank) return;  // dependent
      for (long long s : inv)
        if (s != 1) return;  // not primitive
      auto key = detail::hnf_key(m);
      if (seen.count(key)) return;
      seen[key] = pick;
      std::vector<IVec> basis;
      for (size_t idx : pick) {
        std::vector<long long> q(prim[idx].begin() + 1, prim[idx].end());
        basis.push_back(embed_lattice(amb, prim[idx][0], q));
      }
      out.push_back(ext::represent(amb, basis));
      return;
    }
    for (size_t i = from; i < prim.size(); ++i) {
      pick[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
  return out;
}

using ext::smith_invariants;

}  // namespace dioscope::lat
