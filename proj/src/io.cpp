#include "nlsfloer/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nlsfloer {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw FormatError(path + ": " + what); }

const json& member(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> v;
  for (size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

json coeff_array(const SpectralField& u) {
  json a = json::array();
  for (auto z : u.coeffs()) a.push_back(json::array({z.real(), z.imag()}));
  return a;
}

std::vector<cplx> coeffs_from(const json& a, const std::string& path) {
  if (!a.is_array()) fail(path, "expected an array of [re, im] pairs");
  std::vector<cplx> c;
  for (size_t i = 0; i < a.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!a[i].is_array() || a[i].size() != 2) fail(p, "expected [re, im]");
    c.emplace_back(number(a[i][0], p + "[0]"), number(a[i][1], p + "[1]"));
  }
  return c;
}

NonlinearitySpec::Kind kind_from(const std::string& s, const std::string& path) {
  using K = NonlinearitySpec::Kind;
  if (s == "constant") return K::Constant;
  if (s == "hartree") return K::Hartree;
  if (s == "quadratic") return K::Quadratic;
  if (s == "potential") return K::Potential;
  fail(path, "unknown kind '" + s + "' (constant, hartree, quadratic, potential)");
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) os_ << ',';
      os_ << h;
      first = false;
    }
    os_ << '\n';
  }
  Csv& operator<<(double v) { return cell(fmt_double(v)); }
  Csv& operator<<(long long v) { return cell(std::to_string(v)); }
  Csv& operator<<(int v) { return cell(std::to_string(v)); }
  Csv& operator<<(const std::string& v) { return cell(v); }
  void end() {
    os_ << '\n';
    fresh_ = true;
  }
  std::string str() const { return os_.str(); }

 private:
  Csv& cell(const std::string& s) {
    if (!fresh_) os_ << ',';
    os_ << s;
    fresh_ = false;
    return *this;
  }
  std::ostringstream os_;
  bool fresh_ = true;
};

}  // namespace

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json field_to_json(const SpectralField& u) {
  json j;
  j["k"] = u.bandwidth();
  j["coeffs"] = coeff_array(u);
  return j;
}

SpectralField field_from_json(const json& j, const std::string& path) {
  int k = integer(member(j, "k", path), path + ".k");
  if (k < 0) fail(path + ".k", "must be nonnegative");
  auto c = coeffs_from(member(j, "coeffs", path), path + ".coeffs");
  if (c.size() != static_cast<size_t>(2 * k + 1)) fail(path + ".coeffs", "expected 2k+1 entries");
  for (auto z : c)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(path + ".coeffs", "non-finite coefficient");
  return SpectralField(k, std::move(c));
}

json model_to_json(const ModelSpec& m) {
  json j;
  j["k"] = m.bandwidth();
  json kr;
  const auto& ker = m.kernel();
  switch (ker.law()) {
    case DecayLaw::Exponential:
      kr["law"] = "exponential";
      kr["rate"] = ker.rate();
      kr["k_max"] = ker.k_max();
      break;
    case DecayLaw::BandLimited:
      kr["law"] = "band_limited";
      kr["half"] = ker.half();
      break;
    case DecayLaw::Custom:
      kr["law"] = "custom";
      kr["half"] = ker.half();
      break;
  }
  j["kernel"] = kr;
  const auto& nl = m.nonlinearity();
  json n;
  n["kind"] = kind_name(nl.kind);
  n["strength"] = nl.strength;
  n["time_modulated"] = nl.time_modulated;
  if (nl.kind == NonlinearitySpec::Kind::Potential) n["v_hat"] = field_to_json(nl.v_hat);
  j["nonlinearity"] = n;
  return j;
}

ModelSpec model_from_json(const json& j, const std::string& path) {
  int k = integer(member(j, "k", path), path + ".k");
  const json& kr = member(j, "kernel", path);
  const std::string kp = path + ".kernel";
  const json& law = member(kr, "law", kp);
  if (!law.is_string()) fail(kp + ".law", "expected a string");
  std::string ls = law.get<std::string>();
  auto build_kernel = [&]() {
    if (ls == "exponential")
      return KernelSpec::exponential(number(member(kr, "rate", kp), kp + ".rate"),
                                     integer(member(kr, "k_max", kp), kp + ".k_max"));
    if (ls == "band_limited") return KernelSpec::band_limited(numbers(member(kr, "half", kp), kp + ".half"));
    if (ls == "custom") return KernelSpec::custom(numbers(member(kr, "half", kp), kp + ".half"));
    fail(kp + ".law", "unknown law '" + ls + "' (exponential, band_limited, custom)");
  };
  const json& nj = member(j, "nonlinearity", path);
  const std::string np = path + ".nonlinearity";
  const json& kind = member(nj, "kind", np);
  if (!kind.is_string()) fail(np + ".kind", "expected a string");
  auto kd = kind_from(kind.get<std::string>(), np + ".kind");
  double strength = number(member(nj, "strength", np), np + ".strength");
  NonlinearitySpec nl;
  try {
    switch (kd) {
      case NonlinearitySpec::Kind::Constant: nl = NonlinearitySpec::constant(strength); break;
      case NonlinearitySpec::Kind::Hartree: nl = NonlinearitySpec::hartree(strength); break;
      case NonlinearitySpec::Kind::Quadratic: nl = NonlinearitySpec::quadratic(strength); break;
      case NonlinearitySpec::Kind::Potential:
        nl = NonlinearitySpec::potential(strength, field_from_json(member(nj, "v_hat", np), np + ".v_hat"));
        break;
    }
    if (nj.contains("time_modulated")) {
      if (!nj["time_modulated"].is_boolean()) fail(np + ".time_modulated", "expected a boolean");
      if (nj["time_modulated"].get<bool>()) nl = NonlinearitySpec::modulated(nl);
    }
    return ModelSpec(build_kernel(), nl, k);
  } catch (const ModelError& e) {
    fail(path, e.what());
  }
}

json continuation_to_json(const ContinuationResult& r) {
  json j;
  j["n"] = r.n;
  j["converged"] = r.converged;
  j["diagnostic"] = r.diagnostic;
  j["branch_seed"] = field_to_json(r.branch_seed.rep());
  json path = json::array();
  for (const auto& s : r.path) {
    json e;
    e["eps"] = s.eps;
    e["phase"] = s.phase;
    e["residual"] = s.residual;
    e["point"] = field_to_json(s.point.rep());
    path.push_back(e);
  }
  j["path"] = path;
  return j;
}

ContinuationResult continuation_from_json(const json& j, const std::string& path) {
  ContinuationResult r;
  r.n = integer(member(j, "n", path), path + ".n");
  const json& c = member(j, "converged", path);
  if (!c.is_boolean()) fail(path + ".converged", "expected a boolean");
  r.converged = c.get<bool>();
  if (j.contains("diagnostic") && j["diagnostic"].is_string()) r.diagnostic = j["diagnostic"].get<std::string>();
  r.branch_seed = ProjectivePoint(field_from_json(member(j, "branch_seed", path), path + ".branch_seed"));
  const json& p = member(j, "path", path);
  if (!p.is_array()) fail(path + ".path", "expected an array");
  for (size_t i = 0; i < p.size(); ++i) {
    const std::string ep = path + ".path[" + std::to_string(i) + "]";
    ContinuationStep s;
    s.eps = number(member(p[i], "eps", ep), ep + ".eps");
    s.phase = number(member(p[i], "phase", ep), ep + ".phase");
    s.residual = number(member(p[i], "residual", ep), ep + ".residual");
    s.point = ProjectivePoint(field_from_json(member(p[i], "point", ep), ep + ".point"));
    r.path.push_back(s);
  }
  return r;
}

json floer_state_to_json(const FloerState& s) {
  json j;
  j["grid"] = {{"S", s.grid.S}, {"Ns", s.grid.Ns}, {"Nt", s.grid.Nt}, {"k", s.grid.k}};
  j["gauge"] = s.gauge;
  json nodes = json::array();
  for (const auto& u : s.nodes) nodes.push_back(coeff_array(u));
  j["nodes"] = nodes;
  return j;
}

FloerState floer_state_from_json(const json& j, const std::string& path) {
  FloerState s;
  const json& g = member(j, "grid", path);
  const std::string gp = path + ".grid";
  s.grid.S = number(member(g, "S", gp), gp + ".S");
  s.grid.Ns = integer(member(g, "Ns", gp), gp + ".Ns");
  s.grid.Nt = integer(member(g, "Nt", gp), gp + ".Nt");
  s.grid.k = integer(member(g, "k", gp), gp + ".k");
  s.gauge = integer(member(j, "gauge", path), path + ".gauge");
  const json& nodes = member(j, "nodes", path);
  if (!nodes.is_array()) fail(path + ".nodes", "expected an array");
  for (size_t i = 0; i < nodes.size(); ++i) {
    auto c = coeffs_from(nodes[i], path + ".nodes[" + std::to_string(i) + "]");
    if (c.size() != static_cast<size_t>(2 * s.grid.k + 1))
      fail(path + ".nodes[" + std::to_string(i) + "]", "expected 2k+1 coefficients");
    s.nodes.emplace_back(s.grid.k, std::move(c));
  }
  try {
    s.grid.validate();
    s.validate();
  } catch (const FloerError& e) {
    fail(path, e.what());
  }
  return s;
}

std::string scan_csv(const ScanReport& r) {
  Csv c{"m", "q", "p_star", "value", "is_record", "log10_m", "log10_value"};
  for (const auto& row : r.rows) {
    const auto& d = row.rec;
    c << static_cast<long long>(d.m) << static_cast<long long>(d.m * d.m - d.n * d.n)
      << static_cast<long long>(d.p_star) << d.value << (row.is_record ? 1 : 0) << std::log10(double(d.m))
      << std::log10(d.value);
    c.end();
  }
  return c.str();
}

std::string convergents_csv(const ConvergentList& cl) {
  Csv c{"index", "p", "q", "error"};
  for (size_t i = 0; i < cl.items.size(); ++i) {
    c << static_cast<int>(i) << static_cast<long long>(cl.items[i].p) << static_cast<long long>(cl.items[i].q)
      << cl.items[i].error;
    c.end();
  }
  return c.str();
}

std::string decay_csv(const DecayProfile& p) {
  std::ostringstream head;
  head << "ell,alpha,norm";
  for (double d : p.deltas) head << ",norm_times_ell_delta_" << fmt_double(d);
  head << '\n';
  std::ostringstream os;
  os << head.str();
  for (size_t i = 0; i < p.norms.size(); ++i) {
    os << p.ell_values[i] << ',' << p.alpha << ',' << fmt_double(p.norms[i]);
    for (double w : p.weighted[i]) os << ',' << fmt_double(w);
    os << '\n';
  }
  return os.str();
}

std::string distance_csv(const DistinctnessReport& r, const std::vector<std::string>& labels) {
  std::ostringstream os;
  os << "label";
  for (const auto& l : labels) os << ',' << l;
  os << '\n';
  for (size_t a = 0; a < r.distance.size(); ++a) {
    os << (a < labels.size() ? labels[a] : std::to_string(a));
    for (double d : r.distance[a]) os << ',' << fmt_double(d);
    os << '\n';
  }
  return os.str();
}

std::string history_csv(const std::vector<FloerHistoryRow>& h) {
  Csv c{"iteration", "residual_norm", "energy", "damping"};
  for (const auto& r : h) {
    c << r.iteration << r.residual_norm << r.energy << r.damping;
    c.end();
  }
  return c.str();
}

std::string gap_csv(const std::vector<GapReport>& rows) {
  Csv c{"k", "radius", "t", "f_gap", "grad_gap", "density_gap", "analytic_bound", "lipschitz", "samples"};
  for (const auto& r : rows) {
    c << r.k << r.radius << r.t << r.f_gap << r.grad_gap << r.density_gap << r.analytic_bound << r.lipschitz
      << r.samples;
    c.end();
  }
  return c.str();
}

std::string hofer_csv(const HoferReport& r) {
  Csv c{"t", "max_f", "min_f", "oscillation"};
  for (size_t i = 0; i < r.t.size(); ++i) {
    c << r.t[i] << r.max_f[i] << r.min_f[i] << (r.max_f[i] - r.min_f[i]);
    c.end();
  }
  return c.str();
}

std::string slices_csv(const std::vector<SliceRow>& rows) {
  Csv c{"gamma", "side", "found", "s", "criterion", "threshold", "distance"};
  for (const auto& r : rows) {
    c << r.gamma << r.side << (r.found ? 1 : 0) << r.s << r.criterion << r.threshold << r.distance;
    c.end();
  }
  return c.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + target.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& content) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(content.data(), content.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

json manifest_to_json(const RunManifest& m) {
  json j;
  j["version"] = m.version;
  j["timestamp"] = m.timestamp;
  j["pipeline"] = m.pipeline;
  j["seed"] = m.seed;
  j["threads"] = m.threads;
  j["status"] = m.status;
  j["exit_code"] = m.exit_code;
  j["config"] = m.config;
  json a = json::array();
  for (const auto& e : m.artifacts) a.push_back({{"path", e.path}, {"sha256", e.sha256}});
  j["artifacts"] = a;
  return j;
}

}  // namespace nlsfloer
