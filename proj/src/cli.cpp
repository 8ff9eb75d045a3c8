#include "nlsfloer/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <numbers>

namespace nlsfloer {

namespace {

const double kTwoPiSqrt = std::sqrt(2.0 * std::numbers::pi);

json model_defaults() {
  return json{{"k", 4},
              {"kernel", {{"law", "exponential"}, {"rate", 1.0}, {"k_max", 64}, {"half", json::array()}}},
              {"nonlinearity",
               {{"kind", "potential"},
                {"strength", 0.05},
                {"potential_cos", json::array({0.0, 1.0})},
                {"time_modulated", false}}}};
}

json newton_defaults(int steps) {
  return json{{"tol", 1e-10}, {"max_iter", 30}, {"steps", steps}, {"fd_step", 1e-6}, {"max_restarts", 2}};
}

// Non-convergence inside a pipeline; partial artifacts stay on disk.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check_type(const json& def, const json& val, const std::string& path) {
  if (def.is_null()) return;
  auto bad = [&](const char* want) { throw ConfigError(path, std::string("expected ") + want); };
  if (def.is_boolean() && !val.is_boolean()) bad("a boolean");
  if (def.is_number_integer() && !val.is_number_integer()) bad("an integer");
  if (def.is_number_float() && !val.is_number()) bad("a number");
  if (def.is_string() && !val.is_string()) bad("a string");
  if (def.is_array()) {
    if (!val.is_array()) bad("an array");
    // Empty defaults leave element checks to the consumer.
    if (def.empty()) return;
    bool ints = !def.empty() && def[0].is_number_integer();
    for (size_t i = 0; i < val.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      if (ints && !val[i].is_number_integer()) throw ConfigError(p, "expected an integer");
      if (!ints && !val[i].is_number()) throw ConfigError(p, "expected a number");
    }
  }
}

void overlay(json& def, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, val] : user.items()) {
    const std::string p = path.empty() ? key : path + "." + key;
    if (!def.contains(key)) throw ConfigError(p, "unknown field");
    json& d = def[key];
    if (d.is_object()) {
      overlay(d, val, p);
      continue;
    }
    check_type(d, val, p);
    d = val;
  }
}

std::string join(const std::string& path, const char* key) { return path.empty() ? std::string(key) : path + "." + key; }

double num(const json& j, const char* key, const std::string& path, double lo, double hi = INFINITY) {
  double v = j.at(key).get<double>();
  if (!(v >= lo && v <= hi) || !std::isfinite(v))
    throw ConfigError(join(path, key), "out of range [" + fmt_double(lo) + ", " + fmt_double(hi) + "]");
  return v;
}

int integer(const json& j, const char* key, const std::string& path, int lo, int hi = 1 << 30) {
  long long v = j.at(key).get<long long>();
  if (v < lo || v > hi)
    throw ConfigError(join(path, key), "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

std::vector<int> int_list(const json& j, const char* key, const std::string& path) {
  std::vector<int> v = j.at(key).get<std::vector<int>>();
  if (v.empty()) throw ConfigError(join(path, key), "must not be empty");
  return v;
}

NewtonOptions newton_from(const json& j, const std::string& path) {
  NewtonOptions o;
  o.tol = num(j, "tol", path, 0.0);
  o.max_iter = integer(j, "max_iter", path, 1);
  o.steps = integer(j, "steps", path, 1);
  o.fd_step = num(j, "fd_step", path, 1e-14, 1.0);
  o.max_restarts = integer(j, "max_restarts", path, 0);
  return o;
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Writer {
  std::filesystem::path dir;
  std::vector<ManifestEntry> artifacts;

  void put(const std::string& name, const std::string& content) {
    atomic_write((dir / name).string(), content);
    artifacts.push_back({name, sha256_hex(content)});
  }
  void put_json(const std::string& name, const json& j) { put(name, j.dump(2) + "\n"); }
};

SpectralField load_field(const std::string& file, const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw ConfigError(path, "cannot parse " + file + ": " + e.what());
  }
  if (j.contains("path")) {
    auto r = continuation_from_json(j, file);
    if (r.path.empty()) throw ConfigError(path, file + " holds an empty continuation path");
    return r.path.back().point.rep();
  }
  return field_from_json(j, file);
}

int run_simulate(const json& c, Writer& w) {
  ModelSpec model = model_from_config(c["model"]);
  const int n0 = integer(c, "initial_mode", "", -model.bandwidth(), model.bandwidth());
  const double t0 = num(c, "t0", "", -1e6, 1e6), t1 = num(c, "t1", "", -1e6, 1e6);
  const int steps = integer(c, "steps", "", 1);
  const int checkpoints = integer(c, "checkpoints", "", 1, steps);
  SpectralField u = SpectralField::mode(model.bandwidth(), n0);
  if (c["initial_field"].is_string()) u = load_field(c["initial_field"].get<std::string>(), "initial_field");
  u = u.resized(model.bandwidth());

  const auto& nl = model.nonlinearity();
  const bool closed = nl.kind == NonlinearitySpec::Kind::Hartree && !nl.time_modulated;
  std::ostringstream csv;
  csv << "checkpoint,t,l2_norm,l2_drift" << (closed ? ",closed_form_error" : "") << "\n";
  const double n_start = l2_norm(u);
  SpectralField v = u;
  double worst_drift = 0.0, worst_closed = 0.0;
  for (int c_i = 0; c_i <= checkpoints; ++c_i) {
    const double t = t0 + (t1 - t0) * c_i / checkpoints;
    if (c_i > 0) {
      const int lo = steps * (c_i - 1) / checkpoints, hi = steps * c_i / checkpoints;
      v = evolve(model, v, t0 + (t1 - t0) * (c_i - 1) / checkpoints, t, std::max(hi - lo, 1)).state;
    }
    const double drift = std::abs(l2_norm(v) - n_start);
    worst_drift = std::max(worst_drift, drift);
    csv << c_i << ',' << fmt_double(t) << ',' << fmt_double(l2_norm(v)) << ',' << fmt_double(drift);
    if (closed) {
      double err = 0.0;
      const int K = model.bandwidth();
      for (int n = -K; n <= K; ++n) {
        const double p = model.psi()[n + K];
        cplx exact = u[n] * std::polar(1.0, -(double(n) * n + nl.strength * p * p) * (t - t0));
        err = std::max(err, std::abs(v[n] - exact));
      }
      worst_closed = std::max(worst_closed, err);
      csv << ',' << fmt_double(err);
    }
    csv << '\n';
  }
  w.put("simulate.csv", csv.str());
  w.put_json("final_state.json", field_to_json(v));
  json s{{"l2_drift", worst_drift}};
  if (closed) s["closed_form_error"] = worst_closed;
  w.put_json("summary.json", s);
  std::cout << "l2_drift " << fmt_double(worst_drift) << "\n";
  if (closed) std::cout << "closed_form_error " << fmt_double(worst_closed) << "\n";
  return kExitOk;
}

int run_fixed_points(const json& c, Writer& w) {
  ModelSpec model = model_from_config(c["model"]);
  auto modes = int_list(c, "modes", "");
  for (size_t i = 0; i < modes.size(); ++i)
    if (std::abs(modes[i]) > model.bandwidth())
      throw ConfigError("modes[" + std::to_string(i) + "]", "outside the model bandwidth");
  ContinuationOptions opts;
  opts.newton = newton_from(c["newton"], "newton");
  opts.bisection_depth = integer(c, "bisection_depth", "", 0, 30);
  const int eps_steps = integer(c, "eps_steps", "", 1);
  const int verify = integer(c, "verify_factor", "", 1, 64);
  const double threshold = num(c, "distinct_threshold", "", 0.0);
  auto schedule = uniform_schedule(model.nonlinearity().strength, eps_steps);

  std::vector<ProjectivePoint> points;
  std::vector<std::string> labels;
  json summary = json::array();
  bool all_ok = true;
  for (int n : modes) {
    auto r = continue_fixed_point(model, n, schedule, opts);
    w.put_json("continuation_" + std::to_string(n) + ".json", continuation_to_json(r));
    json row{{"n", n}, {"converged", r.converged}, {"diagnostic", r.diagnostic}};
    if (!r.path.empty()) {
      const auto& last = r.path.back();
      w.put_json("fixed_point_" + std::to_string(n) + ".json", field_to_json(last.point.rep()));
      row["eps"] = last.eps;
      row["phase"] = last.phase;
      row["residual"] = last.residual;
      row["residual_verify"] = fixed_point_residual(model, last.point, verify * opts.newton.steps);
      points.push_back(last.point);
      labels.push_back("n" + std::to_string(n));
    }
    all_ok = all_ok && r.converged;
    summary.push_back(row);
    std::cout << "n " << n << " converged " << r.converged << " residual "
              << (r.path.empty() ? std::string("-") : fmt_double(r.path.back().residual)) << "\n";
  }
  json sj{{"fixed_points", summary}};
  if (points.size() >= 2) {
    auto d = distinctness_report(points, threshold);
    w.put("distances.csv", distance_csv(d, labels));
    json flagged = json::array();
    for (auto [a, b] : d.flagged) flagged.push_back({labels[a], labels[b]});
    sj["flagged_pairs"] = flagged;
  }
  w.put_json("summary.json", sj);
  if (!all_ok) throw NumericFailure("continuation did not converge for every mode");
  return kExitOk;
}

int run_floer(const json& c, Writer& w) {
  ModelSpec model = model_from_config(c["model"]);
  const int n = integer(c, "n", "", -model.bandwidth(), model.bandwidth());
  const double T = num(c, "T", "", 0.0);
  const std::string profile = c["profile"].get<std::string>();
  if (profile != "connecting" && profile != "family")
    throw ConfigError("profile", "expected 'connecting' or 'family'");
  const auto& gj = c["grid"];
  CylinderGrid grid;
  grid.S = num(gj, "S", "grid", 0.0);
  grid.Ns = integer(gj, "Ns", "grid", 16);
  grid.Nt = integer(gj, "Nt", "grid", 8);
  grid.k = model.bandwidth();
  const auto& sj = c["solver"];
  FloerOptions fo;
  fo.tol = num(sj, "tol", "solver", 0.0);
  fo.max_iter = integer(sj, "max_iter", "solver", 0);
  fo.mu0 = num(sj, "mu0", "solver", 0.0);
  fo.mu_max = num(sj, "mu_max", "solver", 0.0);
  fo.bc_threshold = num(sj, "bc_threshold", "solver", 0.0);
  fo.fd_step = num(sj, "fd_step", "solver", 1e-14, 1.0);
  const int flow_steps = integer(c, "flow_steps", "", 1);
  const int gamma_max = integer(c, "gamma_max", "", 0);
  CutoffProfile cut = profile == "connecting" ? CutoffProfile::connecting(T) : CutoffProfile::family(T);
  try {
    grid.validate();
  } catch (const FloerError& e) {
    throw ConfigError("grid", e.what());
  }

  SpectralField seed = SpectralField::mode(model.bandwidth(), n);
  FloerBoundary boundary;
  json summary;
  const bool nonlinear_end = profile == "connecting" && cut.amplitude() > 0.0 &&
                             model.nonlinearity().kind != NonlinearitySpec::Kind::Constant;
  if (nonlinear_end) {
    ContinuationOptions co;
    co.newton = newton_from(c["continuation"]["newton"], "continuation.newton");
    const int eps_steps = integer(c["continuation"], "eps_steps", "continuation", 1);
    auto r = continue_fixed_point(model, n, uniform_schedule(model.nonlinearity().strength, eps_steps), co);
    w.put_json("continuation.json", continuation_to_json(r));
    if (!r.converged) throw NumericFailure("continuation to the right boundary did not converge: " + r.diagnostic);
    seed = r.branch_seed.rep();
    const int g = gauge_index(seed);
    boundary.left = free_orbit(seed, grid.Nt, g);
    boundary.right = flow_orbit(model, r.path.back().point.rep(), grid.Nt, g, flow_steps);
    summary["right_fixed_point"] = field_to_json(r.path.back().point.rep());
  } else {
    const int g = gauge_index(seed);
    boundary.left = free_orbit(seed, grid.Nt, g);
    boundary.right = boundary.left;
  }
  auto guess = initial_guess(grid, boundary, cut);
  auto res = solve_floer(model, grid, cut, boundary, guess, fo);
  w.put_json("floer_state.json", floer_state_to_json(res.state));
  w.put("history.csv", history_csv(res.history));
  if (gamma_max > 0) w.put("slices.csv", slices_csv(extract_slices(model, res.state, cut, boundary, gamma_max)));

  HoferOptions ho;
  ho.seed = 1;
  const double hofer = hofer_norm(model, ho).estimate * cut.amplitude();
  summary["converged"] = res.converged;
  summary["iterations"] = res.iterations;
  summary["residual"] = res.residual;
  summary["bc_residual"] = res.bc_residual;
  summary["energy"] = res.energy;
  summary["hofer"] = hofer;
  summary["energy_bound"] = 2.0 * hofer;
  summary["right_end_distance"] = fs_distance(res.state.at(grid.Ns - 1, 0), boundary.right[0]);
  summary["prescribed_left"] = res.prescribed_left;
  summary["prescribed_right"] = res.prescribed_right;
  summary["diagnostic"] = res.diagnostic;
  w.put_json("summary.json", summary);
  std::cout << "converged " << res.converged << " iterations " << res.iterations << " residual "
            << fmt_double(res.residual) << " energy " << fmt_double(res.energy) << "\n";
  if (!res.converged) throw NumericFailure("floer solve did not converge: " + res.diagnostic);
  return kExitOk;
}

int run_divisors(const json& c, Writer& w) {
  const int m_max = integer(c, "m_max", "", 1);
  const int n = integer(c, "n", "", 0);
  if (m_max <= n) throw ConfigError("m_max", "must exceed n");
  auto scan = divisor_scan(m_max, n);
  w.put("scan.csv", scan_csv(scan));
  const auto& cj = c["convergents"];
  const std::string x = cj["x"].get<std::string>();
  HighPrec value;
  if (x == "inverse_two_pi") {
    value = inverse_two_pi();
  } else if (x == "golden_ratio") {
    value = golden_ratio();
  } else {
    try {
      value = HighPrec(x);
    } catch (const std::exception&) {
      throw ConfigError("convergents.x", "expected inverse_two_pi, golden_ratio or a decimal string");
    }
    if (!(value > 0)) throw ConfigError("convergents.x", "must be positive");
  }
  auto cl = convergents(value, integer(cj, "count", "convergents", 1, 200));
  w.put("convergents.csv", convergents_csv(cl));
  json s{{"fitted_c", scan.fitted_c},
         {"worst_exponent", scan.worst_exponent},
         {"records", static_cast<int>(scan.records.size())},
         {"convergents_exact", cl.exact},
         {"convergents_truncated", cl.truncated},
         {"note", "exponent -14 rests on an irrationality measure of pi below 8; only consistency is checked"}};
  w.put_json("summary.json", s);
  std::cout << "fitted_c " << fmt_double(scan.fitted_c) << " worst_exponent " << fmt_double(scan.worst_exponent)
            << "\n";
  return kExitOk;
}

int run_hofer(const json& c, Writer& w, std::uint64_t seed) {
  ModelSpec model = model_from_config(c["model"]);
  HoferOptions o;
  o.t_nodes = integer(c, "t_nodes", "", 1);
  o.starts = integer(c, "starts", "", 1);
  o.max_iter = integer(c, "max_iter", "", 1);
  o.tol = num(c, "tol", "", 0.0);
  o.seed = seed;
  auto r = hofer_norm(model, o);
  w.put("hofer.csv", hofer_csv(r));
  w.put_json("summary.json", json{{"estimate", r.estimate},
                                  {"sufficient_gate", r.sufficient_gate},
                                  {"certified_sup_f", r.certified_sup_f},
                                  {"below_pi_over_2", r.estimate < std::numbers::pi / 2},
                                  {"converged", r.converged}});
  std::cout << fmt_double(r.estimate) << "\n";
  if (!r.converged) throw NumericFailure("Hofer climb did not converge");
  return kExitOk;
}

int run_galerkin(const json& c, Writer& w, std::uint64_t seed) {
  const int ref = integer(c, "reference_k", "", 2);
  ModelSpec model = model_from_config(c["model"]).with_bandwidth(ref);
  auto ks = int_list(c, "k_values", "");
  const double radius = num(c, "radius", "", 0.0);
  const int samples = integer(c, "samples", "", 1);
  const double t = num(c, "t", "", 0.0, 1.0);
  std::vector<GapReport> rows;
  for (size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 0 || ks[i] >= ref)
      throw ConfigError("k_values[" + std::to_string(i) + "]", "must lie in [0, reference_k)");
    rows.push_back(galerkin_gap(model, ks[i], radius, samples, seed, t));
  }
  w.put("gap.csv", gap_csv(rows));
  return kExitOk;
}

int run_diagnose(const json& c, Writer& w) {
  ModelSpec model = model_from_config(c["model"]);
  auto ells = int_list(c, "ells", "");
  const int alpha = integer(c, "alpha", "", 0, 2);
  std::vector<double> deltas = c["deltas"].get<std::vector<double>>();
  const double threshold = num(c, "distinct_threshold", "", 0.0);
  const auto& files = c["fields"];
  std::vector<ProjectivePoint> points;
  std::vector<std::string> labels;
  for (size_t i = 0; i < files.size(); ++i) {
    const std::string p = "fields[" + std::to_string(i) + "]";
    if (!files[i].is_string()) throw ConfigError(p, "expected a file path");
    SpectralField u = load_field(files[i].get<std::string>(), p);
    for (int ell : ells)
      if (ell > u.bandwidth()) throw ConfigError("ells", "exceeds the bandwidth of " + p);
    w.put("decay_field_" + std::to_string(i) + ".csv", decay_csv(normal_profile(u, ells, alpha, deltas)));
    points.emplace_back(u);
    labels.push_back(std::filesystem::path(files[i].get<std::string>()).stem().string());
  }
  if (points.size() >= 2) w.put("distances.csv", distance_csv(distinctness_report(points, threshold), labels));
  if (c["floer_state"].is_string()) {
    json j;
    const std::string file = c["floer_state"].get<std::string>();
    try {
      j = json::parse(read_file(file));
    } catch (const json::parse_error& e) {
      throw ConfigError("floer_state", "cannot parse " + file + ": " + e.what());
    }
    FloerState st = floer_state_from_json(j, file);
    if (st.grid.k != model.bandwidth()) throw ConfigError("model.k", "differs from the stored state bandwidth");
    for (int ell : ells)
      if (ell > st.grid.k) throw ConfigError("ells", "exceeds the state bandwidth");
    const std::string profile = c["profile"].get<std::string>();
    const double T = num(c, "T", "", 0.0);
    CutoffProfile cut = profile == "family" ? CutoffProfile::family(T) : CutoffProfile::connecting(T);
    w.put("decay_state.csv", decay_csv(normal_profile(st, ells, alpha, deltas)));
    auto mon = gradient_monitor(model, st, cut);
    w.put_json("monitor.json", json{{"sup_ds", mon.sup_ds}, {"sup_dt", mon.sup_dt}, {"energy", mon.energy}});
    std::ostringstream os;
    os << "i,j,s,t,density\n";
    for (int i = 0; i < st.grid.Ns; ++i)
      for (int j = 0; j < st.grid.Nt; ++j)
        os << i << ',' << j << ',' << fmt_double(st.grid.s(i)) << ',' << fmt_double(st.grid.t(j)) << ','
           << fmt_double(mon.density[static_cast<size_t>(i) * st.grid.Nt + j]) << '\n';
    w.put("energy_density.csv", os.str());
    std::cout << "sup_ds " << fmt_double(mon.sup_ds) << " sup_dt " << fmt_double(mon.sup_dt) << "\n";
  }
  return kExitOk;
}

}  // namespace

const std::vector<std::string>& pipeline_names() {
  static const std::vector<std::string> names{"simulate", "fixed-points", "floer",   "divisors",
                                              "hofer",    "galerkin",     "diagnose"};
  return names;
}

json default_config(const std::string& p) {
  json c{{"pipeline", p}};
  if (p == "simulate") {
    c["model"] = model_defaults();
    c["initial_mode"] = 1;
    c["initial_field"] = nullptr;
    c["t0"] = 0.0;
    c["t1"] = 1.0;
    c["steps"] = 1000;
    c["checkpoints"] = 10;
  } else if (p == "fixed-points") {
    c["model"] = model_defaults();
    c["modes"] = json::array({0, 1, 2, 3});
    c["eps_steps"] = 10;
    c["newton"] = newton_defaults(2000);
    c["bisection_depth"] = 8;
    c["verify_factor"] = 2;
    c["distinct_threshold"] = 1e-3;
  } else if (p == "floer") {
    c["model"] = model_defaults();
    c["n"] = 1;
    c["T"] = 1.0;
    c["profile"] = "connecting";
    c["grid"] = {{"S", 4.0}, {"Ns", 200}, {"Nt", 32}};
    c["solver"] = {{"tol", 1e-8},  {"max_iter", 30},        {"mu0", 1e-6},
                   {"mu_max", 1e8}, {"bc_threshold", 1e-2}, {"fd_step", 1e-7}};
    c["continuation"] = {{"eps_steps", 10}, {"newton", newton_defaults(1000)}};
    c["flow_steps"] = 1000;
    c["gamma_max"] = 4;
  } else if (p == "divisors") {
    c["m_max"] = 2000;
    c["n"] = 0;
    c["convergents"] = {{"x", "inverse_two_pi"}, {"count", 20}};
  } else if (p == "hofer") {
    c["model"] = model_defaults();
    c["t_nodes"] = 16;
    c["starts"] = 8;
    c["max_iter"] = 2000;
    c["tol"] = 1e-10;
  } else if (p == "galerkin") {
    c["model"] = model_defaults();
    c["reference_k"] = 24;
    c["k_values"] = json::array({2, 3, 4, 5, 6, 7, 8, 9, 10});
    c["radius"] = 1.0;
    c["samples"] = 64;
    c["t"] = 0.0;
  } else if (p == "diagnose") {
    c["model"] = model_defaults();
    c["fields"] = json::array();
    c["floer_state"] = nullptr;
    c["T"] = 1.0;
    c["profile"] = "connecting";
    c["ells"] = json::array({1, 2, 3});
    c["alpha"] = 0;
    c["deltas"] = json::array({1.0, 2.0, 3.0});
    c["distinct_threshold"] = 1e-3;
  } else {
    throw ConfigError("pipeline", "unknown pipeline '" + p + "'");
  }
  return c;
}

json resolve_config(const std::string& pipeline, const json& user) {
  json c = default_config(pipeline);
  if (user.is_object() && user.contains("pipeline")) {
    if (!user["pipeline"].is_string() || user["pipeline"].get<std::string>() != pipeline)
      throw ConfigError("pipeline", "does not match subcommand '" + pipeline + "'");
  }
  overlay(c, user, "");
  return c;
}

ModelSpec model_from_config(const json& m, const std::string& path) {
  const int k = integer(m, "k", path, 0, 512);
  const auto& kj = m["kernel"];
  const std::string kp = path + ".kernel";
  const std::string law = kj["law"].get<std::string>();
  const auto& nj = m["nonlinearity"];
  const std::string np = path + ".nonlinearity";
  try {
    KernelSpec kernel = [&] {
      if (law == "exponential")
        return KernelSpec::exponential(num(kj, "rate", kp, 0.0), integer(kj, "k_max", kp, 0, 4096));
      const auto& hj = kj["half"];
      for (size_t i = 0; i < hj.size(); ++i)
        if (!hj[i].is_number()) throw ConfigError(kp + ".half[" + std::to_string(i) + "]", "expected a number");
      auto half = hj.get<std::vector<double>>();
      if (half.empty()) throw ConfigError(kp + ".half", "required for law '" + law + "'");
      if (law == "band_limited") return KernelSpec::band_limited(half);
      if (law == "custom") return KernelSpec::custom(half);
      throw ConfigError(kp + ".law", "expected exponential, band_limited or custom");
    }();
    const std::string kind = nj["kind"].get<std::string>();
    const double eps = nj["strength"].get<double>();
    NonlinearitySpec nl;
    if (kind == "constant") {
      nl = NonlinearitySpec::constant(eps);
    } else if (kind == "hartree") {
      nl = NonlinearitySpec::hartree(eps);
    } else if (kind == "quadratic") {
      nl = NonlinearitySpec::quadratic(eps);
    } else if (kind == "potential") {
      // V(x) = sum_m a_m cos(m x).
      auto a = nj["potential_cos"].get<std::vector<double>>();
      if (a.empty()) throw ConfigError(np + ".potential_cos", "must not be empty");
      const int kv = static_cast<int>(a.size()) - 1;
      SpectralField v(kv);
      v[0] = kTwoPiSqrt * a[0];
      for (int q = 1; q <= kv; ++q) v[q] = v[-q] = 0.5 * kTwoPiSqrt * a[q];
      nl = NonlinearitySpec::potential(eps, v);
    } else {
      throw ConfigError(np + ".kind", "expected constant, hartree, quadratic or potential");
    }
    if (nj["time_modulated"].get<bool>()) nl = NonlinearitySpec::modulated(nl);
    return ModelSpec(kernel, nl, k);
  } catch (const ModelError& e) {
    throw ConfigError(path, e.what());
  }
}

int run_pipeline(const std::string& pipeline, const json& config, const RunOptions& opts) {
  Writer w;
  w.dir = opts.out_dir;
  RunManifest man;
  man.version = kToolVersion;
  man.timestamp = utc_timestamp();
  man.pipeline = pipeline;
  man.config = config;
  man.seed = opts.seed;
  man.threads = opts.threads;
  int code = kExitOk;
  try {
    if (pipeline == "simulate") code = run_simulate(config, w);
    else if (pipeline == "fixed-points") code = run_fixed_points(config, w);
    else if (pipeline == "floer") code = run_floer(config, w);
    else if (pipeline == "divisors") code = run_divisors(config, w);
    else if (pipeline == "hofer") code = run_hofer(config, w, opts.seed);
    else if (pipeline == "galerkin") code = run_galerkin(config, w, opts.seed);
    else if (pipeline == "diagnose") code = run_diagnose(config, w);
    else throw ConfigError("pipeline", "unknown pipeline '" + pipeline + "'");
    man.status = "ok";
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    man.status = std::string("config error: ") + e.what();
    code = kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    man.status = std::string("config error: ") + e.what();
    code = kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    man.status = std::string("i/o error: ") + e.what();
    code = kExitIo;
  } catch (const std::exception& e) {
    // Library precondition failures and non-convergence both land here.
    std::cerr << "numeric failure: " << e.what() << "\n";
    man.status = std::string("numeric failure: ") + e.what();
    code = kExitNumeric;
  }
  man.exit_code = code;
  man.artifacts = w.artifacts;
  try {
    atomic_write((w.dir / "manifest.json").string(), manifest_to_json(man).dump(2) + "\n");
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return code == kExitOk ? kExitIo : code;
  }
  return code;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Spectral NLS dynamics, fixed-point continuation and Floer cylinders on the circle"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  std::string config_path, out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<std::string> names = pipeline_names();
  names.push_back("run");
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name, name == "run" ? "dispatch on the config's \"pipeline\" field"
                                                       : "run the " + name + " pipeline");
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "random seed")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads (computation is single-threaded)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  std::string pipeline = app.get_subcommands().front()->get_name();

  json user = json::object();
  if (!config_path.empty()) {
    std::string text;
    try {
      text = read_file(config_path);
    } catch (const IoError& e) {
      std::cerr << "i/o error: " << e.what() << "\n";
      return kExitIo;
    }
    try {
      user = json::parse(text);
    } catch (const json::parse_error& e) {
      std::cerr << "config error: <root>: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  if (pipeline == "run") {
    if (!user.is_object() || !user.contains("pipeline") || !user["pipeline"].is_string()) {
      std::cerr << "config error: pipeline: required by the run subcommand\n";
      return kExitConfig;
    }
    pipeline = user["pipeline"].get<std::string>();
  }
  json config;
  try {
    config = resolve_config(pipeline, user);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (user.is_object() && user.empty()) {
    std::cout << config.dump(2) << "\n";
    std::cout << "validation: ok, defaults applied; empty config, nothing computed\n";
    return kExitOk;
  }
  RunOptions opts{out_dir, seed, threads};
  return run_pipeline(pipeline, config, opts);
}

}  // namespace nlsfloer
