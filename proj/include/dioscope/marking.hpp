#pragma once

// Poset-indexed marked points: chain membership, the measure bound on the
// unmarked set, and the filtration inclusion into the lower bound for the
// quotient seminorm of lattice vectors.

#include "dioscope/core.hpp"
#include "dioscope/goodfn.hpp"
#include "dioscope/lattice.hpp"

namespace dioscope::mark {

/// Strict partial order on {0..count-1} given by its closure matrix.
struct Poset {
  int count = 0;
  std::vector<std::vector<bool>> less;  // less[s][t]: s strictly below t

  explicit Poset(int n) : count(n), less(n, std::vector<bool>(n, false)) {}

  void add(int s, int t) { less.at(s).at(t) = true; }

  bool comparable(int s, int t) const { return s != t && (less[s][t] || less[t][s]); }

  void validate() const {
    for (int s = 0; s < count; ++s) {
      if (less[s][s]) throw std::invalid_argument("Poset: relation must be irreflexive");
      for (int t = 0; t < count; ++t) {
        if (less[s][t] && less[t][s]) throw std::invalid_argument("Poset: antisymmetry violated");
        for (int u = 0; u < count; ++u)
          if (less[s][t] && less[t][u] && !less[s][u])
            throw std::invalid_argument("Poset: transitivity violated");
      }
    }
  }

  /// Longest chain size.
  int length() const {
    std::vector<int> depth(count, 1);
    bool changed = true;
    while (changed) {
      changed = false;
      for (int s = 0; s < count; ++s)
        for (int t = 0; t < count; ++t)
          if (less[s][t] && depth[t] < depth[s] + 1) {
            depth[t] = depth[s] + 1;
            changed = true;
          }
    }
    int out = count ? 1 : 0;
    for (int v : depth) out = std::max(out, v);
    return out;
  }
};

struct MarkingInstance {
  Poset poset{0};
  std::vector<std::function<double(const Vec&)>> phi;
  double rho = 1.0;
  double C = 1.0;
  double alpha = 1.0;
  Ball ball;
  int k = 1;  // declared poset length cap
};

struct MarkResult {
  bool marked = false;
  std::vector<int> chain;
};

/// Chain membership: x is marked iff some linearly ordered subset Sigma
/// satisfies eps <= |phi_s(x)| <= rho on Sigma while every s outside Sigma
/// that is comparable with all of Sigma has |phi_s(x)| >= rho.  For the
/// empty chain the comparability clause holds for every s, so all values
/// must already sit at or above rho.
inline MarkResult is_marked(const MarkingInstance& inst, const Vec& x, double eps) {
  if (!(eps > 0.0) || eps > inst.rho) throw std::invalid_argument("is_marked: 0 < eps <= rho");
  const int n = inst.poset.count;
  if (n > 16) throw std::invalid_argument("is_marked: poset too large for exhaustive search");
  std::vector<double> val(n);
  for (int s = 0; s < n; ++s) val[s] = std::abs(inst.phi[s](x));
  // candidates satisfying (M1)
  std::vector<int> band;
  for (int s = 0; s < n; ++s)
    if (val[s] >= eps && val[s] <= inst.rho) band.push_back(s);
  const int bn = static_cast<int>(band.size());
  for (int mask = 0; mask < (1 << bn); ++mask) {
    std::vector<int> sigma;
    for (int i = 0; i < bn; ++i)
      if (mask & (1 << i)) sigma.push_back(band[i]);
    bool chain = true;
    for (size_t i = 0; i < sigma.size() && chain; ++i)
      for (size_t j = i + 1; j < sigma.size() && chain; ++j)
        chain = inst.poset.comparable(sigma[i], sigma[j]);
    if (!chain) continue;
    bool ok = true;
    for (int s = 0; s < n && ok; ++s) {
      bool in_sigma = std::find(sigma.begin(), sigma.end(), s) != sigma.end();
      if (in_sigma) continue;
      bool cmp_all = true;
      for (int t : sigma) cmp_all = cmp_all && inst.poset.comparable(s, t);
      if (cmp_all && val[s] < inst.rho) ok = false;
    }
    if (ok) return {true, sigma};
  }
  return {false, {}};
}

struct Thm61Report {
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string axiom_failure;  // empty when the instance validates
};

/// Grid measure of the unmarked set against k C (3^d N_d)^k (eps/rho)^alpha |B|.
inline Thm61Report thm61_check(const MarkingInstance& inst, double eps, int N_d, int grid,
                               double margin = 0.02) {
  Thm61Report rep;
  inst.poset.validate();
  if (inst.poset.length() > inst.k) {
    rep.axiom_failure = "poset length exceeds declared k";
    return rep;
  }
  const int d = inst.ball.dim();
  int per_dim = (d == 1) ? grid : static_cast<int>(std::sqrt(double(grid)));
  auto pts = ball_grid(inst.ball, per_dim);
  for (int s = 0; s < inst.poset.count; ++s) {
    double sup = 0.0;
    for (const auto& x : pts) sup = std::max(sup, std::abs(inst.phi[s](x)));
    if (sup < inst.rho) {
      rep.axiom_failure = "sup |phi_s| below rho on the grid";
      return rep;
    }
  }
  size_t unmarked = 0;
  for (const auto& x : pts) unmarked += is_marked(inst, x, eps).marked ? 0 : 1;
  rep.measured = pts.empty() ? 0.0 : double(unmarked) / pts.size() * inst.ball.volume();
  rep.bound = inst.k * inst.C * std::pow(std::pow(3.0, d) * N_d, inst.k) *
              std::pow(eps / inst.rho, inst.alpha) * inst.ball.volume();
  rep.pass = rep.measured <= rep.bound * (1.0 + margin) + 1e-12;
  return rep;
}

struct Thm62Report {
  int grid_points = 0;
  int marked_points = 0;
  int counterexamples = 0;  // marked x whose minimal nu over lattice vectors < eps
  bool pass = false;
};

/// Inclusion check: with S the primitive subgroups up to the height bound
/// and phi_Gamma = nu(D U_x Gamma), every marked x must satisfy
/// nu(D U_x v) >= eps for all enumerated nonzero lattice vectors v.
inline Thm62Report thm62_inclusion(const lat::DiagonalWeights& w, const FunctionTuple& f,
                                   double eps, double rho, int height, const Ball& b, int grid) {
  if (!(eps > 0.0) || eps > rho || rho > 1.0)
    throw std::invalid_argument("thm62_inclusion: need 0 < eps <= rho <= 1");
  const lat::Ambient amb = w.amb;
  // the poset: primitive subgroups ordered by inclusion, all ranks
  std::vector<ext::SubgroupRep> subs;
  std::vector<int> rank_of;
  for (int r = 1; r <= amb.n + 1; ++r)
    for (auto& s : lat::enumerate_primitive(amb, r, height)) {
      subs.push_back(std::move(s));
      rank_of.push_back(r);
    }
  const int ns = static_cast<int>(subs.size());
  // containment via Smith invariants of the stacked basis: Gamma in Gamma'
  // iff adding Gamma's basis to Gamma' leaves the rank unchanged
  auto contains = [&](int big, int small) {
    if (rank_of[big] <= rank_of[small]) return false;
    std::vector<std::vector<long long>> m;
    for (const auto& v : subs[big].basis) {
      std::vector<long long> row;
      row.push_back(v(0));
      for (int j = 0; j < amb.n; ++j) row.push_back(v(amb.d + 1 + j));
      m.push_back(row);
    }
    size_t base_rows = m.size();
    for (const auto& v : subs[small].basis) {
      std::vector<long long> row;
      row.push_back(v(0));
      for (int j = 0; j < amb.n; ++j) row.push_back(v(amb.d + 1 + j));
      m.push_back(row);
    }
    auto inv = ext::smith_invariants(std::move(m));
    return inv.size() == base_rows;  // small's basis lies in big's span over Q;
                                     // primitivity upgrades that to containment
  };

  Thm62Report rep;
  int per_dim = (b.dim() == 1) ? grid : static_cast<int>(std::sqrt(double(grid)));
  auto pts = ball_grid(b, per_dim);
  rep.grid_points = static_cast<int>(pts.size());

  // rank-1 subgroup generators double as the nonzero-vector sample for the
  // conclusion; scaling a vector scales nu, so primitive generators suffice
  std::vector<int> rank1_idx;
  for (int i = 0; i < ns; ++i)
    if (rank_of[i] == 1) rank1_idx.push_back(i);

  for (const auto& x : pts) {
    Mat u = lat::u_matrix(f, x);
    std::vector<double> val(ns);
    for (int i = 0; i < ns; ++i) val[i] = lat::nu_subgroup(w, u, subs[i]);
    // chain search restricted to subgroups in the (M1) band; everything with
    // value >= rho can never enter a chain and automatically passes (M2)
    std::vector<int> band;
    for (int i = 0; i < ns; ++i)
      if (val[i] >= eps && val[i] <= rho) band.push_back(i);
    bool marked = false;
    std::vector<int> low;  // values below rho: the only possible (M2) violators
    for (int i = 0; i < ns; ++i)
      if (val[i] < rho) low.push_back(i);
    const int bn = static_cast<int>(band.size());
    if (bn > 20) throw std::invalid_argument("thm62_inclusion: band too large");
    for (int mask = 0; mask < (1 << bn) && !marked; ++mask) {
      std::vector<int> sigma;
      for (int i = 0; i < bn; ++i)
        if (mask & (1 << i)) sigma.push_back(band[i]);
      bool chain = true;
      for (size_t i = 0; i < sigma.size() && chain; ++i)
        for (size_t j = i + 1; j < sigma.size() && chain; ++j) {
          int a = sigma[i], c = sigma[j];
          chain = contains(a, c) || contains(c, a);
        }
      if (!chain) continue;
      bool ok = true;
      for (int s : low) {
        if (std::find(sigma.begin(), sigma.end(), s) != sigma.end()) continue;
        bool cmp_all = true;
        for (int t : sigma) cmp_all = cmp_all && (contains(s, t) || contains(t, s));
        if (cmp_all && val[s] < rho) {
          ok = false;
          break;
        }
      }
      marked = ok;
    }
    if (!marked) continue;
    ++rep.marked_points;
    double min_nu = std::numeric_limits<double>::infinity();
    for (int i : rank1_idx) min_nu = std::min(min_nu, val[i]);
    if (min_nu < eps) ++rep.counterexamples;
  }
  rep.pass = rep.counterexamples == 0;
  return rep;
}

}  // namespace dioscope::mark
