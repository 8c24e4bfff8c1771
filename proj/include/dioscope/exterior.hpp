#pragma once

// Exterior algebra over the ambient space R^m, m = n + d + 1, with basis
// e_0, e*_1..e*_d, e_1..e_n.  Multivectors are sparse maps keyed by a bitmask
// over the basis labels (bit 0 = e_0, bits 1..d = starred, bits d+1..d+n
// unstarred).  Includes the quotient seminorm nu that discards every wedge
// monomial carrying two or more starred labels.

#include "dioscope/core.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <map>
#include <string>

namespace dioscope::ext {

using Mask = std::uint32_t;

/// Ambient dimensions: d gradient slots, n function slots.
struct Ambient {
  int d = 1;
  int n = 1;

  Ambient() = default;
  Ambient(int d_, int n_) : d(d_), n(n_) {
    if (d < 0 || n < 1 || m() > 30) throw std::invalid_argument("Ambient: bad dimensions");
  }
  int m() const { return n + d + 1; }
  Mask star_mask() const { return ((Mask{1} << d) - 1) << 1; }
  bool operator==(const Ambient& o) const = default;

  std::string label(int bit) const {
    if (bit == 0) return "e0";
    if (bit <= d) return "e*" + std::to_string(bit);
    return "e" + std::to_string(bit - d);
  }
};

/// Parity sign of merging two ascending index sets: (-1)^inversions.
inline int wedge_sign(Mask a, Mask b) {
  int inv = 0;
  for (Mask rest = b; rest != 0; rest &= rest - 1) {
    int j = std::countr_zero(rest);
    inv += std::popcount(a >> (j + 1));
  }
  return (inv & 1) ? -1 : 1;
}

struct MultiVector {
  Ambient amb;
  std::map<Mask, double> terms;

  MultiVector() = default;
  explicit MultiVector(Ambient a) : amb(a) {}

  static MultiVector scalar(Ambient a, double c) {
    MultiVector w(a);
    if (c != 0.0) w.terms[0] = c;
    return w;
  }

  /// Degree-1 element from coordinates ordered (e_0, e*_1.., e_1..).
  static MultiVector from_vector(Ambient a, const Vec& v) {
    if (static_cast<int>(v.size()) != a.m())
      throw std::invalid_argument("MultiVector::from_vector: wrong length");
    MultiVector w(a);
    for (int i = 0; i < a.m(); ++i)
      if (v(i) != 0.0) w.terms[Mask{1} << i] = v(i);
    return w;
  }

  void prune(double tol = 0.0) {
    for (auto it = terms.begin(); it != terms.end();)
      it = (std::abs(it->second) <= tol) ? terms.erase(it) : std::next(it);
  }

  MultiVector operator+(const MultiVector& o) const {
    check(o);
    MultiVector out = *this;
    for (const auto& [m, c] : o.terms) out.terms[m] += c;
    out.prune();
    return out;
  }
  MultiVector operator-(const MultiVector& o) const { return *this + o.scaled(-1.0); }
  MultiVector scaled(double t) const {
    MultiVector out(amb);
    if (t == 0.0) return out;
    for (const auto& [m, c] : terms) out.terms[m] = t * c;
    return out;
  }

  MultiVector wedge(const MultiVector& o) const {
    check(o);
    MultiVector out(amb);
    for (const auto& [m1, c1] : terms)
      for (const auto& [m2, c2] : o.terms) {
        if (m1 & m2) continue;
        out.terms[m1 | m2] += wedge_sign(m1, m2) * c1 * c2;
      }
    out.prune();
    return out;
  }

  /// Euclidean inner product on the monomial basis.
  double dot(const MultiVector& o) const {
    check(o);
    double acc = 0.0;
    for (const auto& [m, c] : terms) {
      auto it = o.terms.find(m);
      if (it != o.terms.end()) acc += c * it->second;
    }
    return acc;
  }
  double norm() const { return std::sqrt(dot(*this)); }

  bool homogeneous(int* degree = nullptr) const {
    int deg = -1;
    for (const auto& [m, c] : terms) {
      int k = std::popcount(m);
      if (deg == -1) deg = k;
      if (k != deg) return false;
    }
    if (degree) *degree = (deg == -1) ? 0 : deg;
    return true;
  }

  std::string to_string() const;

 private:
  void check(const MultiVector& o) const {
    if (!(amb == o.amb)) throw std::invalid_argument("MultiVector: mixed ambients");
  }
};

/// Quotient projection pi: kill monomials with >= 2 starred labels.
inline MultiVector project_pi(const MultiVector& w) {
  MultiVector out(w.amb);
  const Mask star = w.amb.star_mask();
  for (const auto& [m, c] : w.terms)
    if (std::popcount(m & star) < 2) out.terms[m] = c;
  return out;
}

/// The seminorm nu(w) = ||pi(w)||.
inline double nu(const MultiVector& w) { return project_pi(w).norm(); }

inline std::string MultiVector::to_string() const {
  if (terms.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms) {
    double a = c;
    if (first) {
      if (a < 0) {
        out += "-";
        a = -a;
      }
    } else {
      out += (a < 0) ? " - " : " + ";
      if (a < 0) a = -a;
    }
    first = false;
    std::ostringstream num;
    num.precision(15);
    num << a;
    std::string monos;
    for (Mask rest = m; rest != 0; rest &= rest - 1) {
      if (!monos.empty()) monos += "^";
      monos += amb.label(std::countr_zero(rest));
    }
    if (monos.empty()) {
      out += num.str();
    } else if (a == 1.0) {
      out += monos;
    } else {
      out += num.str() + "*" + monos;
    }
  }
  return out;
}

/// Parse the textual form produced by to_string, e.g. "3*e0^e1 - 2*e*1^e2".
inline MultiVector parse_multivector(Ambient amb, const std::string& text) {
  MultiVector out(amb);
  size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  if (i < text.size() && text.compare(i, 1, "0") == 0 && i + 1 == text.size()) return out;
  bool first = true;
  while (i < text.size()) {
    skip_ws();
    double sign = 1.0;
    if (text[i] == '+' || text[i] == '-') {
      sign = (text[i] == '-') ? -1.0 : 1.0;
      ++i;
      skip_ws();
    } else if (!first) {
      throw std::invalid_argument("parse_multivector: expected '+' or '-'");
    }
    first = false;
    // optional numeric coefficient
    double coeff = 1.0;
    size_t start = i;
    if (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
      size_t pos = 0;
      coeff = std::stod(text.substr(i), &pos);
      i += pos;
      skip_ws();
      if (i < text.size() && text[i] == '*') {
        ++i;
        skip_ws();
      } else if (i < text.size() && text[i] == 'e') {
        throw std::invalid_argument("parse_multivector: missing '*' before basis label");
      }
    }
    // basis monomial (may be absent for a scalar term)
    Mask m = 0;
    while (i < text.size() && text[i] == 'e') {
      ++i;
      bool star = (i < text.size() && text[i] == '*');
      if (star) ++i;
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j == i) throw std::invalid_argument("parse_multivector: basis label needs an index");
      int idx = std::stoi(text.substr(i, j - i));
      i = j;
      int bit;
      if (star) {
        if (idx < 1 || idx > amb.d) throw std::invalid_argument("parse_multivector: e* index");
        bit = idx;
      } else if (idx == 0) {
        bit = 0;
      } else {
        if (idx < 1 || idx > amb.n) throw std::invalid_argument("parse_multivector: e index");
        bit = amb.d + idx;
      }
      Mask b = Mask{1} << bit;
      if (m & b) throw std::invalid_argument("parse_multivector: repeated basis label");
      sign *= wedge_sign(m, b);  // written order may deviate from canonical
      m |= b;
      skip_ws();
      if (i < text.size() && text[i] == '^') {
        ++i;
        skip_ws();
        if (i >= text.size() || text[i] != 'e')
          throw std::invalid_argument("parse_multivector: dangling '^'");
      } else {
        break;
      }
    }
    if (i == start && m == 0) throw std::invalid_argument("parse_multivector: empty term");
    // normalize label order: masks are canonical, but a written order like
    // e1^e0 contributes the merge sign
    out.terms[m] += sign * coeff;
    skip_ws();
  }
  out.prune();
  return out;
}

// ---------------------------------------------------------------------------
// Integer-exact wedge path used for subgroup representatives.

struct MultiVectorZ {
  Ambient amb;
  std::map<Mask, long long> terms;

  explicit MultiVectorZ(Ambient a) : amb(a) {}

  static MultiVectorZ scalar(Ambient a, long long c) {
    MultiVectorZ w(a);
    if (c != 0) w.terms[0] = c;
    return w;
  }
  static MultiVectorZ from_vector(Ambient a, const IVec& v) {
    if (static_cast<int>(v.size()) != a.m())
      throw std::invalid_argument("MultiVectorZ::from_vector: wrong length");
    MultiVectorZ w(a);
    for (int i = 0; i < a.m(); ++i)
      if (v(i) != 0) w.terms[Mask{1} << i] = v(i);
    return w;
  }

  MultiVectorZ wedge(const MultiVectorZ& o) const {
    if (!(amb == o.amb)) throw std::invalid_argument("MultiVectorZ: mixed ambients");
    MultiVectorZ out(amb);
    for (const auto& [m1, c1] : terms)
      for (const auto& [m2, c2] : o.terms) {
        if (m1 & m2) continue;
        out.terms[m1 | m2] += wedge_sign(m1, m2) * c1 * c2;
      }
    for (auto it = out.terms.begin(); it != out.terms.end();)
      it = (it->second == 0) ? out.terms.erase(it) : std::next(it);
    return out;
  }

  bool zero() const { return terms.empty(); }

  MultiVector to_double() const {
    MultiVector out(amb);
    for (const auto& [m, c] : terms) out.terms[m] = static_cast<double>(c);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Discrete subgroups of the integer lattice inside the ambient space.

/// Rank-k subgroup given by an integer basis (coordinates in the ambient
/// order; starred slots are always zero for lattice elements).  The stored
/// representative is the exact wedge of the basis.
struct SubgroupRep {
  Ambient amb;
  int rank = 0;
  std::vector<IVec> basis;
  MultiVectorZ rep;

  explicit SubgroupRep(Ambient a) : amb(a), rep(MultiVectorZ::scalar(a, 1)) {}
};

inline SubgroupRep represent(Ambient amb, const std::vector<IVec>& basis) {
  SubgroupRep out(amb);
  out.basis = basis;
  out.rank = static_cast<int>(basis.size());
  MultiVectorZ w = MultiVectorZ::scalar(amb, 1);
  for (const auto& v : basis) {
    for (int i = 1; i <= amb.d; ++i)
      if (v(i) != 0) throw std::invalid_argument("represent: lattice vectors have zero e* part");
    w = w.wedge(MultiVectorZ::from_vector(amb, v));
  }
  if (out.rank > 0 && w.zero()) throw std::invalid_argument("represent: dependent basis");
  out.rep = w;
  return out;
}

/// Smith invariant factors (nonzero ones) of an integer matrix.
inline std::vector<long long> smith_invariants(std::vector<std::vector<long long>> a) {
  std::vector<long long> out;
  size_t rows = a.size();
  if (rows == 0) return out;
  size_t cols = a[0].size();
  size_t k = 0;
  for (; k < rows && k < cols; ++k) {
    for (;;) {
      // smallest-magnitude nonzero entry of the submatrix becomes the pivot;
      // remainder reduction shrinks it each round, so this terminates
      size_t pr = rows, pc = cols;
      for (size_t i = k; i < rows; ++i)
        for (size_t j = k; j < cols; ++j)
          if (a[i][j] != 0 &&
              (pr == rows || std::abs(a[i][j]) < std::abs(a[pr][pc]))) {
            pr = i;
            pc = j;
          }
      if (pr == rows) break;
      std::swap(a[k], a[pr]);
      for (size_t i = 0; i < rows; ++i) std::swap(a[i][k], a[i][pc]);
      bool clean = true;
      for (size_t i = k + 1; i < rows; ++i)
        if (a[i][k] != 0) {
          long long q = a[i][k] / a[k][k];
          for (size_t j = k; j < cols; ++j) a[i][j] -= q * a[k][j];
          if (a[i][k] != 0) clean = false;
        }
      for (size_t j = k + 1; j < cols; ++j)
        if (a[k][j] != 0) {
          long long q = a[k][j] / a[k][k];
          for (size_t i = k; i < rows; ++i) a[i][j] -= q * a[i][k];
          if (a[k][j] != 0) clean = false;
        }
      if (clean) break;
    }
    if (a[k][k] == 0) break;
  }
  for (size_t i = 0; i < k; ++i)
    if (a[i][i] != 0) out.push_back(std::abs(a[i][i]));
  // divisibility normalization d_i | d_{i+1}
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i + 1 < out.size(); ++i)
      if (out[i + 1] % out[i] != 0) {
        long long g = std::gcd(out[i], out[i + 1]);
        long long l = out[i] / g * out[i + 1];
        out[i] = g;
        out[i + 1] = l;
        changed = true;
      }
  }
  return out;
}

/// A subgroup is primitive in the lattice iff it equals the intersection of
/// its real span with the lattice, i.e. all Smith invariant factors are 1.
inline bool is_primitive(const SubgroupRep& sub) {
  if (sub.rank == 0) return true;
  std::vector<std::vector<long long>> m(sub.rank);
  for (int i = 0; i < sub.rank; ++i) {
    m[i].assign(sub.amb.m(), 0);
    for (int j = 0; j < sub.amb.m(); ++j) m[i][j] = sub.basis[i](j);
  }
  auto inv = smith_invariants(std::move(m));
  if (static_cast<int>(inv.size()) != sub.rank) return false;  // dependent
  for (long long v : inv)
    if (v != 1) return false;
  return true;
}

}  // namespace dioscope::ext
