// Batch driver: parses a subcommand plus flags (optionally seeded from a JSON
// config file, flags taking precedence), dispatches to the library, and writes
// a CSV table plus a JSON sidecar embedding the fully resolved configuration.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 I/O error.

#include "dioscope/core.hpp"
#include "dioscope/exterior.hpp"
#include "dioscope/experiments.hpp"
#include "dioscope/goodfn.hpp"
#include "dioscope/lattice.hpp"
#include "dioscope/marking.hpp"
#include "dioscope/skewgrad.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using dioscope::Ball;
using dioscope::FunctionTuple;
using dioscope::Vec;
using json = nlohmann::json;

constexpr const char* kVersion = "1.0.0";

// "%.12g" everywhere: stable, locale-independent ("." decimal), round-trips.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// RFC 4180: quote a field only when it contains a comma, quote, or newline.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct CsvWriter {
  std::string body;
  void row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) body += ',';
      body += csv_field(fields[i]);
    }
    body += "\r\n";
  }
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out.good()) throw IoError("short write to '" + path + "'");
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw CLI::ValidationError("malformed number '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("empty number list");
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_doubles(s)) {
    if (v != std::floor(v)) throw CLI::ValidationError("expected integer, got " + fmt(v));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// two values: interval endpoints; d+1 values: center then radius.
Ball parse_ball(const std::string& s) {
  auto v = parse_doubles(s);
  if (v.size() == 2) return Ball::interval(v[0], v[1]);
  if (v.size() < 2) throw CLI::ValidationError("--ball needs at least two values");
  Vec c(static_cast<int>(v.size()) - 1);
  for (size_t i = 0; i + 1 < v.size(); ++i) c(static_cast<int>(i)) = v[i];
  if (!(v.back() > 0.0)) throw CLI::ValidationError("--ball radius must be positive");
  return Ball(c, v.back());
}

Vec parse_point(const std::string& s) {
  auto v = parse_doubles(s);
  Vec x(static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) x(static_cast<int>(i)) = v[i];
  return x;
}

// "power:c,sigma[,tau]" or "tabular:v1,v2,..."
dioscope::RateFunction parse_rate(const std::string& s) {
  if (s.rfind("power:", 0) == 0) {
    auto v = parse_doubles(s.substr(6));
    if (v.size() < 2 || v.size() > 3) throw CLI::ValidationError("power rate needs c,sigma[,tau]");
    return dioscope::RateFunction::power(v[0], v[1], v.size() == 3 ? v[2] : 0.0);
  }
  if (s.rfind("tabular:", 0) == 0)
    return dioscope::RateFunction::tabular(parse_doubles(s.substr(8)));
  throw CLI::ValidationError("unknown rate '" + s + "'");
}

// A string option that remembers whether it came from the command line or the
// config file; flags win and the sidecar records the merge.
struct Resolver {
  CLI::App* app;
  json config;          // file contents, minus consumed keys
  json resolved;        // final values as dispatched
  json overridden;      // config keys shadowed by explicit flags
  bool have_config = false;

  std::string take(const std::string& key, CLI::Option* opt, const std::string& flag_value,
                   const std::string& fallback, bool required) {
    std::string value = fallback;
    bool have = false;
    if (have_config && config.contains(key)) {
      const json& j = config.at(key);
      if (j.is_string()) {
        value = j.get<std::string>();
      } else if (j.is_array()) {
        value.clear();
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) value += ",";
          value += j[i].is_string() ? j[i].get<std::string>() : j[i].dump();
        }
      } else {
        value = j.dump();
      }
      have = true;
      config.erase(key);
    }
    if (opt->count() > 0) {
      if (have) overridden.push_back(key);
      value = flag_value;
      have = true;
    }
    if (!have && required)
      throw CLI::ValidationError("missing required option '--" + key + "'");
    resolved[key] = value;
    return value;
  }

  void finish() {
    if (!have_config) return;
    for (auto it = config.begin(); it != config.end(); ++it)
      throw CLI::ValidationError("unknown config key '" + it.key() + "'");
  }
};

struct Outputs {
  std::string csv_path;
  std::string command;
  std::uint64_t seed = 0;
  int threads = 1;
  json resolved, overridden;

  void emit(const CsvWriter& csv, const json& results, bool pass) const {
    write_file(csv_path, csv.body);
    json side;
    side["command"] = command;
    side["version"] = kVersion;
    side["seed"] = seed;
    side["threads"] = threads;
    side["config"] = resolved;
    side["overridden_by_flags"] = overridden;
    side["results"] = results;
    side["pass"] = pass;
    side["csv"] = csv_path;
    write_file(csv_path + ".json", side.dump(2) + "\n");
  }
};

int run_certify_good(const std::string& f_id, const Ball& b, double C, double alpha,
                     const std::vector<double>& eps, int resolution, const Outputs& out) {
  auto f = FunctionTuple::from_id(f_id);
  if (f.dim_range() != 1)
    throw CLI::ValidationError("certify-good expects a scalar function (one component)");
  auto fn = [&f](const Vec& x) { return f.value(x)(0); };
  auto cert = dioscope::good::certify(fn, b, C, alpha, eps, resolution);
  CsvWriter csv;
  csv.row({"eps", "full_ball_fraction", "allowance"});
  for (size_t i = 0; i < cert.eps_grid.size(); ++i)
    csv.row({fmt(cert.eps_grid[i]), fmt(cert.full_ball_fraction[i]),
             fmt(C * std::pow(cert.eps_grid[i], alpha))});
  json res;
  res["C"] = C;
  res["alpha"] = alpha;
  res["worst_ratio"] = cert.worst_ratio;
  res["margin"] = cert.margin;
  res["pass"] = cert.pass;
  out.emit(csv, res, cert.pass);
  return cert.pass ? 0 : 1;
}

int run_skewgrad_check(const std::string& f_id, const Ball& b, int grid, const Outputs& out) {
  auto f = FunctionTuple::from_id(f_id);
  if (f.dim_range() != 2)
    throw CLI::ValidationError("skewgrad-check expects a two-component function");
  auto pp = dioscope::skew::PlanePair::from_polys(f.components()[0], f.components()[1]);
  auto rep = dioscope::skew::lemma42_check(pp, b, grid);
  // independent polar residual at the worst regular grid point
  double residual = 0.0;
  int per_dim = (b.dim() == 1) ? grid : static_cast<int>(std::sqrt(double(grid)));
  for (const auto& x : dioscope::ball_grid(b, per_dim)) {
    if (std::hypot(pp.g1(x), pp.g2(x)) < 0.05) continue;
    residual = std::max(residual, dioscope::skew::polar_check(pp, x));
  }
  bool pass = (!rep.applicable || rep.pass) && residual < 1e-4;
  CsvWriter csv;
  csv.row({"quantity", "value"});
  csv.row({"a", fmt(rep.a)});
  csv.row({"delta", fmt(rep.delta)});
  csv.row({"w", fmt(rep.w)});
  csv.row({"bound", fmt(rep.bound)});
  csv.row({"sup_skew_gradient", fmt(rep.sup)});
  csv.row({"polar_residual", fmt(residual)});
  json res;
  res["applicable"] = rep.applicable;
  res["bound_pass"] = rep.pass;
  res["polar_residual"] = residual;
  res["pass"] = pass;
  out.emit(csv, res, pass);
  return pass ? 0 : 1;
}

int run_lattice_shortest(const std::string& f_id, const Vec& x, const dioscope::lat::ParamBox& pb,
                         int height, const Outputs& out) {
  auto f = FunctionTuple::from_id(f_id);
  dioscope::lat::Ambient amb(f.dim_domain(), f.dim_range());
  auto w = dioscope::lat::weights_from_params(amb, pb);
  auto u = dioscope::lat::u_matrix(f, x);
  auto sv = dioscope::lat::shortest_vector(w, u, height);
  CsvWriter csv;
  csv.row({"eps", "shortest_length", "argmin"});
  std::string vtxt;
  for (int i = 0; i < sv.v.size(); ++i) vtxt += (i ? " " : "") + std::to_string(sv.v(i));
  csv.row({fmt(pb.epsilon()), fmt(sv.length), vtxt});
  json res;
  res["epsilon"] = pb.epsilon();
  res["length"] = sv.length;
  res["argmin"] = vtxt;
  out.emit(csv, res, true);
  return 0;
}

int run_marking_check(const std::string& f_id, const dioscope::lat::ParamBox& pb, double eps,
                      double rho, int height, const Ball& b, int grid, const Outputs& out) {
  auto f = FunctionTuple::from_id(f_id);
  dioscope::lat::Ambient amb(f.dim_domain(), f.dim_range());
  auto w = dioscope::lat::weights_from_params(amb, pb);
  auto rep = dioscope::mark::thm62_inclusion(w, f, eps, rho, height, b, grid);
  CsvWriter csv;
  csv.row({"grid_points", "marked_points", "counterexamples", "pass"});
  csv.row({std::to_string(rep.grid_points), std::to_string(rep.marked_points),
           std::to_string(rep.counterexamples), rep.pass ? "1" : "0"});
  json res;
  res["grid_points"] = rep.grid_points;
  res["marked_points"] = rep.marked_points;
  res["counterexamples"] = rep.counterexamples;
  res["pass"] = rep.pass;
  out.emit(csv, res, rep.pass);
  return rep.pass ? 0 : 1;
}

void sweep_csv(CsvWriter& csv, const dioscope::expt::SweepResult& res, const char* param_name) {
  bool labelled = !res.labels.empty();
  csv.row(labelled ? std::vector<std::string>{"shell", param_name, "count", "measure"}
                   : std::vector<std::string>{param_name, "count", "measure"});
  for (size_t i = 0; i < res.params.size(); ++i) {
    std::vector<std::string> row;
    if (labelled) row.push_back(res.labels[i]);
    row.push_back(fmt(res.params[i]));
    row.push_back(std::to_string(res.counts[i]));
    row.push_back(fmt(res.measures[i]));
    csv.row(row);
  }
}

json sweep_json(const dioscope::expt::SweepResult& res) {
  json j;
  j["slope"] = res.slope;
  j["constant"] = res.constant;
  j["pass"] = res.pass;
  return j;
}

int run_thm13(const std::string& f_id, const Ball& b, const std::vector<int>& q,
              const std::vector<double>& deltas, int grid, const Outputs& out) {
  auto f = FunctionTuple::from_id(f_id);
  dioscope::IVec qv(static_cast<int>(q.size()));
  for (size_t i = 0; i < q.size(); ++i) qv(static_cast<int>(i)) = q[i];
  auto res = dioscope::expt::thm13_sweep(f, b, qv, deltas, grid);
  CsvWriter csv;
  sweep_csv(csv, res, "delta");
  out.emit(csv, sweep_json(res), res.pass);
  return res.pass ? 0 : 1;
}

int run_thm14(const std::string& f_id, const Ball& b, const std::vector<double>& deltas, double K,
              const std::vector<double>& T, int grid, const Outputs& out) {
  auto f = FunctionTuple::from_id(f_id);
  std::vector<std::pair<double, dioscope::lat::ParamBox>> family;
  for (double delta : deltas) {
    dioscope::lat::ParamBox pb;
    pb.delta = delta;
    pb.K = K;
    pb.T = T;
    family.emplace_back(delta, pb);
  }
  auto res = dioscope::expt::thm14_sweep(f, b, family, grid);
  CsvWriter csv;
  sweep_csv(csv, res, "eps");
  out.emit(csv, sweep_json(res), res.pass);
  return res.pass ? 0 : 1;
}

int run_count_solutions(const std::string& f_id, const Vec& x, const dioscope::ApproxSpec& spec,
                        int height, const Outputs& out) {
  auto f = FunctionTuple::from_id(f_id);
  auto sols = dioscope::expt::count_solutions(f, x, spec, height);
  CsvWriter csv;
  csv.row({"index", "q", "threshold"});
  for (size_t i = 0; i < sols.size(); ++i) {
    std::string q;
    for (int j = 0; j < sols[i].size(); ++j) q += (j ? " " : "") + std::to_string(sols[i](j));
    csv.row({std::to_string(i), q, fmt(dioscope::threshold(spec, sols[i]))});
  }
  json res;
  res["count"] = sols.size();
  out.emit(csv, res, true);
  return 0;
}

int run_system83(const std::string& f_id, const Ball& b, double gamma, double eps, int t_max,
                 int grid, const Outputs& out) {
  auto f = FunctionTuple::from_id(f_id);
  auto res = dioscope::expt::system83_sweep(f, b, gamma, eps, t_max, grid);
  CsvWriter csv;
  sweep_csv(csv, res, "level");
  out.emit(csv, sweep_json(res), res.pass);
  return res.pass ? 0 : 1;
}

// Deterministic digest of the closed-form fixtures: one row per check.
int run_report(const Outputs& out) {
  CsvWriter csv;
  csv.row({"check", "value", "expected", "pass"});
  bool all = true;
  auto row = [&](const std::string& name, double value, double expected, double tol) {
    bool ok = std::abs(value - expected) <= tol;
    all = all && ok;
    csv.row({name, fmt(value), fmt(expected), ok ? "1" : "0"});
  };
  using namespace dioscope;
  row("poly_constant_d1_l1", good::poly_constant(1, 1), 4.0, 1e-12);
  row("poly_constant_d1_l2", good::poly_constant(1, 2), 4.0 * std::sqrt(3.0), 1e-12);
  row("lemma33_constant_d1", good::lemma33_constant(1, 1, 1.0, 1.0), 12.0, 1e-12);
  row("oscillation_x2", good::oscillation_bound(2.0, 2, 1.0), 1.0 / 3.0, 1e-12);
  row("amplify", good::amplify(1.0, 1.0, 0.01, 2).value_or(-1.0), 0.8495, 1e-3);
  row("lemma42_bound", skew::lemma42_bound(1.0, 0.0, 1.0, 1.0), 1.0 / (2.0 * std::sqrt(2.0)),
      1e-12);
  row("rho_formula", skew::rho_formula(1.0, 1.0, 0.0), 1.0 / std::sqrt(2.0), 1e-12);
  auto b = Ball::interval(-1.0, 1.0);
  auto cert = good::certify([](const Vec& x) { return x(0) * x(0); }, b, 2.0, 0.5, {0.01}, 20000);
  row("x2_full_ball_fraction", cert.full_ball_fraction[0], 0.1, 1e-3);
  json res;
  res["pass"] = all;
  out.emit(csv, res, all);
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale verification toolkit"};
  app.require_subcommand(1);

  // shared options, registered per subcommand
  struct Shared {
    std::string config_path, out_path = "dioscope_out.csv";
    std::uint64_t seed = 0;
    std::string f_id, ball_s = "-1,1", x_s = "0", q_s, deltas_s, eps_s, T_s, rate_s, weights_s,
                variant = "standard";
    double C = 1.0, alpha = 1.0, K = 1.0, delta = 0.1, rho = 1.0, eps = 0.1, gamma = 0.5;
    int resolution = 100000, grid = 1001, height = 10, t_max = 2;
  };

  std::map<std::string, Shared> state;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  auto add = [&](CLI::App* sub, const std::string& name, auto& field, const std::string& help) {
    opts[sub->get_name()][name] = sub->add_option("--" + name, field, help);
  };
  auto common = [&](CLI::App* sub) -> Shared& {
    Shared& s = state[sub->get_name()];
    add(sub, "config", s.config_path, "JSON config file; explicit flags override it");
    add(sub, "out", s.out_path, "CSV output path (sidecar at <out>.json)");
    add(sub, "seed", s.seed, "64-bit seed, echoed in all outputs");
    return s;
  };

  auto* sc_cert = app.add_subcommand("certify-good", "sublevel-set growth certificate");
  {
    Shared& s = common(sc_cert);
    add(sc_cert, "f", s.f_id, "function preset id");
    add(sc_cert, "ball", s.ball_s, "domain ball: a,b or center...,radius");
    add(sc_cert, "C", s.C, "certificate constant");
    add(sc_cert, "alpha", s.alpha, "certificate exponent");
    add(sc_cert, "eps", s.eps_s, "comma-separated eps grid");
    add(sc_cert, "resolution", s.resolution, "samples per sub-ball");
  }
  auto* sc_skew = app.add_subcommand("skewgrad-check", "skew-gradient residuals and lower bound");
  {
    Shared& s = common(sc_skew);
    add(sc_skew, "f", s.f_id, "two-component polynomial preset");
    add(sc_skew, "ball", s.ball_s, "domain ball");
    add(sc_skew, "grid", s.grid, "grid budget");
  }
  auto* sc_short = app.add_subcommand("lattice-shortest", "shortest vector of the sheared lattice");
  {
    Shared& s = common(sc_short);
    add(sc_short, "f", s.f_id, "function preset id");
    add(sc_short, "x", s.x_s, "evaluation point");
    add(sc_short, "delta", s.delta, "box delta");
    add(sc_short, "K", s.K, "box gradient bound");
    add(sc_short, "T", s.T_s, "box sides, ascending");
    add(sc_short, "height", s.height, "enumeration height");
  }
  auto* sc_mark = app.add_subcommand("marking-check", "marked-point inclusion check");
  {
    Shared& s = common(sc_mark);
    add(sc_mark, "f", s.f_id, "function preset id");
    add(sc_mark, "ball", s.ball_s, "domain ball");
    add(sc_mark, "delta", s.delta, "box delta");
    add(sc_mark, "K", s.K, "box gradient bound");
    add(sc_mark, "T", s.T_s, "box sides, ascending");
    add(sc_mark, "eps", s.eps, "lower band edge");
    add(sc_mark, "rho", s.rho, "upper band edge");
    add(sc_mark, "height", s.height, "subgroup height bound");
    add(sc_mark, "grid", s.grid, "grid budget");
  }
  auto* sc13 = app.add_subcommand("thm13", "big-gradient measure sweep");
  {
    Shared& s = common(sc13);
    add(sc13, "f", s.f_id, "function preset id");
    add(sc13, "ball", s.ball_s, "domain ball");
    add(sc13, "q", s.q_s, "integer vector");
    add(sc13, "deltas", s.deltas_s, "comma-separated deltas");
    add(sc13, "grid", s.grid, "grid budget");
  }
  auto* sc14 = app.add_subcommand("thm14", "existence-set decay sweep");
  {
    Shared& s = common(sc14);
    add(sc14, "f", s.f_id, "function preset id");
    add(sc14, "ball", s.ball_s, "domain ball");
    add(sc14, "deltas", s.deltas_s, "delta per family member (eps = delta)");
    add(sc14, "K", s.K, "box gradient bound");
    add(sc14, "T", s.T_s, "box sides");
    add(sc14, "grid", s.grid, "grid budget");
  }
  auto* sc_count = app.add_subcommand("count-solutions", "solutions within the rate threshold");
  {
    Shared& s = common(sc_count);
    add(sc_count, "f", s.f_id, "function preset id");
    add(sc_count, "x", s.x_s, "evaluation point");
    add(sc_count, "rate", s.rate_s, "power:c,sigma[,tau] or tabular:v1,...");
    add(sc_count, "variant", s.variant, "standard | multiplicative | quasinorm");
    add(sc_count, "weights", s.weights_s, "quasinorm weights");
    add(sc_count, "height", s.height, "max |q_i|");
  }
  auto* sc83 = app.add_subcommand("system83", "dyadic-shell derivative-constrained sweep");
  {
    Shared& s = common(sc83);
    add(sc83, "f", s.f_id, "function preset id");
    add(sc83, "ball", s.ball_s, "domain ball");
    add(sc83, "gamma", s.gamma, "decay parameter in (0, n)");
    add(sc83, "eps", s.eps, "extra exponent margin");
    add(sc83, "tmax", s.t_max, "largest shell level");
    add(sc83, "grid", s.grid, "grid budget");
  }
  auto* sc_rep = app.add_subcommand("report", "closed-form fixture digest");
  common(sc_rep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string cmd = sub->get_name();
  Shared& s = state[cmd];
  auto& o = opts[cmd];

  try {
    Resolver rv{sub};
    if (!s.config_path.empty()) {
      std::ifstream in(s.config_path);
      if (!in) throw IoError("cannot read config '" + s.config_path + "'");
      try {
        rv.config = json::parse(in);
      } catch (const json::exception& e) {
        throw CLI::ValidationError(std::string("malformed config JSON: ") + e.what());
      }
      rv.have_config = true;
      rv.config.erase("config");
    }
    auto get = [&](const std::string& key, const std::string& flag_value,
                   const std::string& fallback, bool required = false) {
      return rv.take(key, o.at(key), flag_value, fallback, required);
    };
    std::string out_path = get("out", s.out_path, s.out_path);
    std::uint64_t seed = std::stoull(get("seed", std::to_string(s.seed), "0"));
    const char* threads_env = std::getenv("DIOSCOPE_THREADS");
    int threads = 1;
    if (threads_env) threads = std::max(1, std::atoi(threads_env));

    auto make_out = [&](const Resolver& done) {
      Outputs out;
      out.csv_path = out_path;
      out.command = cmd;
      out.seed = seed;
      out.threads = threads;
      out.resolved = done.resolved;
      out.overridden = done.overridden;
      return out;
    };

    int rc = 2;
    if (cmd == "certify-good") {
      std::string f = get("f", s.f_id, "", true);
      Ball b = parse_ball(get("ball", s.ball_s, "-1,1"));
      double C = std::stod(get("C", fmt(s.C), "1"));
      double alpha = std::stod(get("alpha", fmt(s.alpha), "1"));
      auto eps = parse_doubles(get("eps", s.eps_s, "0.3,0.1,0.03,0.01"));
      int res = std::stoi(get("resolution", std::to_string(s.resolution), "100000"));
      rv.finish();
      rc = run_certify_good(f, b, C, alpha, eps, res, make_out(rv));
    } else if (cmd == "skewgrad-check") {
      std::string f = get("f", s.f_id, "", true);
      Ball b = parse_ball(get("ball", s.ball_s, "-1,1"));
      int grid = std::stoi(get("grid", std::to_string(s.grid), "1001"));
      rv.finish();
      rc = run_skewgrad_check(f, b, grid, make_out(rv));
    } else if (cmd == "lattice-shortest" || cmd == "marking-check") {
      std::string f = get("f", s.f_id, "", true);
      dioscope::lat::ParamBox pb;
      pb.delta = std::stod(get("delta", fmt(s.delta), "0.1"));
      pb.K = std::stod(get("K", fmt(s.K), "1"));
      pb.T = parse_doubles(get("T", s.T_s, "", true));
      int height = std::stoi(get("height", std::to_string(s.height), "10"));
      if (cmd == "lattice-shortest") {
        Vec x = parse_point(get("x", s.x_s, "0"));
        rv.finish();
        rc = run_lattice_shortest(f, x, pb, height, make_out(rv));
      } else {
        Ball b = parse_ball(get("ball", s.ball_s, "-1,1"));
        double eps = std::stod(get("eps", fmt(s.eps), "0.1"));
        double rho = std::stod(get("rho", fmt(s.rho), "1"));
        int grid = std::stoi(get("grid", std::to_string(s.grid), "1001"));
        rv.finish();
        rc = run_marking_check(f, pb, eps, rho, height, b, grid, make_out(rv));
      }
    } else if (cmd == "thm13") {
      std::string f = get("f", s.f_id, "", true);
      Ball b = parse_ball(get("ball", s.ball_s, "-1,1"));
      auto q = parse_ints(get("q", s.q_s, "", true));
      auto deltas = parse_doubles(get("deltas", s.deltas_s, "0.1,0.05,0.02,0.01"));
      int grid = std::stoi(get("grid", std::to_string(s.grid), "100001"));
      rv.finish();
      rc = run_thm13(f, b, q, deltas, grid, make_out(rv));
    } else if (cmd == "thm14") {
      std::string f = get("f", s.f_id, "", true);
      Ball b = parse_ball(get("ball", s.ball_s, "-1,1"));
      auto deltas = parse_doubles(get("deltas", s.deltas_s, "0.25,0.1,0.05"));
      double K = std::stod(get("K", fmt(s.K), "1"));
      auto T = parse_doubles(get("T", s.T_s, "", true));
      int grid = std::stoi(get("grid", std::to_string(s.grid), "1001"));
      rv.finish();
      rc = run_thm14(f, b, deltas, K, T, grid, make_out(rv));
    } else if (cmd == "count-solutions") {
      std::string f = get("f", s.f_id, "", true);
      Vec x = parse_point(get("x", s.x_s, "0"));
      auto rate = parse_rate(get("rate", s.rate_s, "power:1,1"));
      std::string variant = get("variant", s.variant, "standard");
      std::string weights = get("weights", s.weights_s, "");
      int height = std::stoi(get("height", std::to_string(s.height), "10"));
      rv.finish();
      dioscope::ApproxSpec spec = dioscope::ApproxSpec::standard(rate);
      if (variant == "multiplicative")
        spec = dioscope::ApproxSpec::multiplicative(rate);
      else if (variant == "quasinorm")
        spec = dioscope::ApproxSpec::quasinorm(parse_doubles(weights), rate);
      else if (variant != "standard")
        throw CLI::ValidationError("unknown variant '" + variant + "'");
      rc = run_count_solutions(f, x, spec, height, make_out(rv));
    } else if (cmd == "system83") {
      std::string f = get("f", s.f_id, "", true);
      Ball b = parse_ball(get("ball", s.ball_s, "-1,1"));
      double gamma = std::stod(get("gamma", fmt(s.gamma), "0.5"));
      double eps = std::stod(get("eps", fmt(s.eps), "0.1"));
      int t_max = std::stoi(get("tmax", std::to_string(s.t_max), "2"));
      int grid = std::stoi(get("grid", std::to_string(s.grid), "1001"));
      rv.finish();
      rc = run_system83(f, b, gamma, eps, t_max, grid, make_out(rv));
    } else if (cmd == "report") {
      rv.finish();
      rc = run_report(make_out(rv));
    }
    return rc;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
