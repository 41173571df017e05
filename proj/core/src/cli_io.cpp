#include "ltunnel/cli_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "ltunnel/laplace_checks.hpp"
#include "ltunnel/oracle_tdse.hpp"
#include "ltunnel/quadrature.hpp"
#include "ltunnel/specfun.hpp"

namespace ltunnel::io {

using nlohmann::json;

namespace {

using std::numbers::pi;

// ---------------------------------------------------------------- parsing

json parse_strict(std::string_view text) {
  struct Level {
    std::set<std::string> keys;
    std::string name;
  };
  std::vector<Level> stack;
  std::string pending;  // key of the value being parsed
  auto path = [&](const std::string& leaf) {
    std::string p;
    for (std::size_t i = 1; i < stack.size(); ++i) {
      if (stack[i].name.empty()) continue;
      p += stack[i].name + ".";
    }
    return p + leaf;
  };
  json::parser_callback_t cb = [&](int, json::parse_event_t ev, json& parsed) {
    switch (ev) {
      case json::parse_event_t::object_start:
        stack.push_back({{}, pending});
        pending.clear();
        break;
      case json::parse_event_t::array_start:
        stack.push_back({{}, pending});
        pending.clear();
        break;
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        if (!stack.empty()) stack.pop_back();
        break;
      case json::parse_event_t::key: {
        const std::string k = parsed.get<std::string>();
        if (!stack.empty() && !stack.back().keys.insert(k).second) throw ConfigError(path(k), "duplicate key");
        pending = k;
        break;
      }
      case json::parse_event_t::value:
        pending.clear();
        break;
    }
    return true;
  };
  try {
    return json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
}

void apply_override(json& doc, const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(item, "override must look like key.path=value");
  const std::string key = item.substr(0, eq);
  const std::string raw = item.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;  // bare string
  }
  json* node = &doc;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    json& next = (*node)[parts[i]];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError(key, "cannot descend into a non-object");
    node = &next;
  }
  (*node)[parts.back()] = value;
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

std::vector<double> num_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(num(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError(path.empty() ? k : path + "." + k, "unknown key");
  }
}

// ---------------------------------------------------------------- output helpers

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

json config_json(const RunConfig& cfg) { return json::parse(echo_config(cfg)); }

json envelope(const RunConfig& cfg) {
  json j;
  j["version"] = kVersion;
  j["config"] = config_json(cfg);
  return j;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = (n == 1) ? a : a + (b - a) * i / (n - 1);
  return v;
}

double sqrt_a(const RunConfig& c) { return std::sqrt(c.scales.a()); }

// Wavefunction in physical units carries a^{-1/4}.
double psi_unit(const RunConfig& c) { return std::pow(c.scales.a(), -0.25); }

double trapezoid_centroid(const std::vector<double>& x, const std::vector<double>& w) {
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = x[i + 1] - x[i];
    m0 += 0.5 * h * (w[i] + w[i + 1]);
    m1 += 0.5 * h * (x[i] * w[i] + x[i + 1] * w[i + 1]);
  }
  return m1 / m0;
}

}  // namespace

// ---------------------------------------------------------------- modes

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::analytic: return "analytic";
    case Mode::oracle: return "oracle";
    case Mode::compare: return "compare";
    case Mode::figure1: return "figure1";
    case Mode::validate: return "validate";
    case Mode::packet_info: return "packet-info";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::analytic, Mode::oracle, Mode::compare, Mode::figure1, Mode::validate, Mode::packet_info})
    if (to_string(m) == s) return m;
  throw ConfigError("mode", "unknown mode '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- RunConfig

double RunConfig::X0() const { return to_dimensionless(x0, QuantityKind::position, scales); }
double RunConfig::P0() const { return to_dimensionless(p0, QuantityKind::momentum, scales); }

double RunConfig::V_dimless() const {
  if (V) return to_dimensionless(*V, QuantityKind::energy, scales);
  return P0() * P0() / (2.0 * *k0);
}

double RunConfig::D_dimless() const {
  if (D) return *D;
  return to_dimensionless(*d, QuantityKind::length, scales);
}

double RunConfig::k0_value() const {
  if (k0) return *k0;
  return P0() * P0() / (2.0 * V_dimless());
}

double RunConfig::default_time() const { return -X0() / P0() + 2.0 / P0(); }

std::vector<double> RunConfig::times_dimless() const {
  if (times.empty()) return {default_time()};
  std::vector<double> out;
  for (double t : times) out.push_back(to_dimensionless(t, QuantityKind::time, scales));
  return out;
}

PacketSpec RunConfig::packet() const { return PacketSpec(X0(), P0(), L); }

Barrier RunConfig::barrier() const { return Barrier(V_dimless(), D_dimless()); }

Scenario RunConfig::scenario() const { return make_scenario(packet(), barrier(), K); }

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  json doc = parse_strict(text.empty() ? std::string_view("{}") : text);
  if (!doc.is_object()) throw ConfigError("", "top level must be an object");
  for (const auto& o : overrides) apply_override(doc, o);
  only_keys(doc, "", {"mode", "scales", "packet", "barrier", "window", "times", "grid", "oracle", "workers", "output"});

  RunConfig c;
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw ConfigError("mode", "expected a string");
    c.mode = parse_mode(doc["mode"].get<std::string>());
  }
  if (doc.contains("scales")) {
    const json& s = doc["scales"];
    only_keys(s, "scales", {"hbar", "mass", "a"});
    const double hbar = s.contains("hbar") ? num(s["hbar"], "scales.hbar") : 1.0;
    const double mass = s.contains("mass") ? num(s["mass"], "scales.mass") : 1.0;
    const double a = s.contains("a") ? num(s["a"], "scales.a") : 1.0;
    try {
      c.scales = PhysicalScales(hbar, mass, a);
    } catch (const InputError& e) {
      throw ConfigError("scales", e.what());
    }
  }
  if (doc.contains("packet")) {
    const json& p = doc["packet"];
    only_keys(p, "packet", {"x0", "p0", "L"});
    if (p.contains("x0")) c.x0 = num(p["x0"], "packet.x0");
    if (p.contains("p0")) c.p0 = num(p["p0"], "packet.p0");
    if (p.contains("L")) c.L = num(p["L"], "packet.L");
  } else {
    // figure defaults scale with the units
    c.x0 = -20.0 * sqrt_a(c);
    c.p0 = 10.0 * c.scales.hbar() / sqrt_a(c);
  }
  if (!(c.p0 > 0.0)) throw ConfigError("packet.p0", "must be positive");
  if (!(c.L > 2.0)) throw ConfigError("packet.L", "must exceed 2");
  if (c.X0() + c.L > 0.0)
    throw ConfigError("packet", "support violation: x0 + L sqrt(a) = " + std::to_string(c.x0 + c.L * sqrt_a(c)) +
                                    " > 0, the packet must start entirely left of the barrier");

  if (doc.contains("barrier")) {
    const json& b = doc["barrier"];
    only_keys(b, "barrier", {"V", "k0", "d", "D"});
    if (b.contains("V") && b.contains("k0")) throw ConfigError("barrier", "give only one of V and k0");
    if (b.contains("d") && b.contains("D")) throw ConfigError("barrier", "give only one of d and D");
    if (!b.contains("V") && !b.contains("k0")) c.k0 = 0.5;
    if (!b.contains("d") && !b.contains("D")) c.D = 1.0;
    if (b.contains("V")) c.V = num(b["V"], "barrier.V");
    if (b.contains("k0")) c.k0 = num(b["k0"], "barrier.k0");
    if (b.contains("d")) c.d = num(b["d"], "barrier.d");
    if (b.contains("D")) c.D = num(b["D"], "barrier.D");
  } else {
    c.k0 = 0.5;
    c.D = 1.0;
  }
  if (c.V && *c.V < 0.0) throw ConfigError("barrier.V", "must be >= 0");
  if (c.k0 && !(*c.k0 > 0.0)) throw ConfigError("barrier.k0", "must be positive");
  if (!(c.D_dimless() > 0.0)) throw ConfigError(c.D ? "barrier.D" : "barrier.d", "must be positive");
  if (c.V && *c.V == 0.0) {
    if (c.mode != Mode::compare && c.mode != Mode::oracle)
      throw ConfigError("barrier.V", "V = 0 (free control) is only meaningful for oracle/compare");
  } else if (!(c.k0_value() < 1.0)) {
    throw ConfigError(c.k0 ? "barrier.k0" : "barrier.V",
                      "k0 = " + std::to_string(c.k0_value()) +
                          " violates the tunneling-regime assumption: packet momenta must stay below sqrt(2 m V)");
  }

  if (doc.contains("window")) {
    only_keys(doc["window"], "window", {"K"});
    if (doc["window"].contains("K")) c.K = num(doc["window"]["K"], "window.K");
  }
  if (!(c.K >= 1.0)) throw ConfigError("window.K", "K = p_max/p0 must be >= 1");
  if (!c.free_control() && !(c.K * c.K * c.k0_value() < 1.0))
    throw ConfigError("window.K", "window reaches above the barrier: need K^2 k0 < 1 (p_max < sqrt(2 m V))");

  if (doc.contains("times")) {
    c.times = num_list(doc["times"], "times");
    for (double t : c.times)
      if (!(t > 0.0)) throw ConfigError("times", "evaluation times must be positive");
  }
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    only_keys(g, "grid", {"min", "max", "n"});
    if (!g.contains("min") || !g.contains("max") || !g.contains("n"))
      throw ConfigError("grid", "needs min, max and n");
    c.grid = {num(g["min"], "grid.min"), num(g["max"], "grid.max"), integer(g["n"], "grid.n")};
    if (!(c.grid.max > c.grid.min) || c.grid.n < 2) throw ConfigError("grid", "need max > min and n >= 2");
  }
  if (doc.contains("oracle")) {
    const json& o = doc["oracle"];
    only_keys(o, "oracle", {"dx", "dt", "x_min", "x_max", "times"});
    if (o.contains("dx")) c.oracle.dx = num(o["dx"], "oracle.dx");
    if (o.contains("dt")) c.oracle.dt = num(o["dt"], "oracle.dt");
    if (o.contains("x_min")) c.oracle.x_min = num(o["x_min"], "oracle.x_min");
    if (o.contains("x_max")) c.oracle.x_max = num(o["x_max"], "oracle.x_max");
    if (o.contains("times")) c.oracle.times = num_list(o["times"], "oracle.times");
    if (!(c.oracle.dx > 0.0) || !(c.oracle.dt > 0.0)) throw ConfigError("oracle", "dx and dt must be positive");
    if (!(c.oracle.x_max > c.oracle.x_min)) throw ConfigError("oracle", "x_max must exceed x_min");
  }
  if (doc.contains("workers")) {
    c.workers = integer(doc["workers"], "workers");
    if (c.workers < 1 || c.workers > 256) throw ConfigError("workers", "must be in [1, 256]");
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ConfigError("output", "expected a string");
    c.output = doc["output"].get<std::string>();
  }
  return c;
}

std::string echo_config(const RunConfig& c) {
  json j;
  j["mode"] = std::string(to_string(c.mode));
  j["scales"] = {{"hbar", c.scales.hbar()}, {"mass", c.scales.mass()}, {"a", c.scales.a()}};
  j["packet"] = {{"x0", c.x0}, {"p0", c.p0}, {"L", c.L}};
  json b = json::object();
  if (c.V) b["V"] = *c.V;
  if (c.k0) b["k0"] = *c.k0;
  if (c.d) b["d"] = *c.d;
  if (c.D) b["D"] = *c.D;
  j["barrier"] = b;
  j["window"] = {{"K", c.K}};
  j["times"] = c.times;
  if (c.grid.n > 0) j["grid"] = {{"min", c.grid.min}, {"max", c.grid.max}, {"n", c.grid.n}};
  j["oracle"] = {{"dx", c.oracle.dx},
                 {"dt", c.oracle.dt},
                 {"x_min", c.oracle.x_min},
                 {"x_max", c.oracle.x_max},
                 {"times", c.oracle.times}};
  j["workers"] = c.workers;
  j["output"] = c.output;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- records

FrameRecord make_record(double x, double t, cplx psi, Region region, std::string source) {
  return {x, t, psi.real(), psi.imag(), psi.real() * psi.real() + psi.imag() * psi.imag(), region, std::move(source)};
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string csv_header() { return "x,t,re_psi,im_psi,abs2,region,source\n"; }

std::string format_csv(const std::vector<FrameRecord>& rows, const RunConfig& cfg) {
  std::string out;
  out.reserve(rows.size() * 130 + 512);
  out += "# ";
  out += kVersion;
  out += " config=";
  out += config_json(cfg).dump();
  out += "\n";
  out += csv_header();
  for (const auto& r : rows) {
    out += format_number(r.x) + "," + format_number(r.t) + "," + format_number(r.re) + "," + format_number(r.im) +
           "," + format_number(r.abs2) + "," + std::string(to_string(r.region)) + "," + r.source + "\n";
  }
  return out;
}

void parallel_for(int workers, std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(workers), n));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < w; ++k) {
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = k; i < n; i += w) body(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// ---------------------------------------------------------------- pipelines

PipelineResult run_analytic(const RunConfig& cfg) {
  const Scenario sc = cfg.scenario();
  const double d = sc.barrier.width();
  const double sa = sqrt_a(cfg);
  GridSpec g = cfg.grid;
  if (g.n == 0) g = {-30.0 * sa, 30.0 * sa, 601};
  const auto xs = linspace(g.min / sa, g.max / sa, g.n);
  const auto ts = cfg.times_dimless();
  std::vector<FrameRecord> rows(xs.size() * ts.size());
  std::vector<char> early(rows.size(), 0), inconsistent(rows.size(), 0);
  parallel_for(cfg.workers, rows.size(), [&](std::size_t idx) {
    const double t = ts[idx / xs.size()];
    const double x = xs[idx % xs.size()];
    const Region r = region_of(x, d);
    WaveValue w;
    switch (r) {
      case Region::left: w = reflected_wavefunction(x, t, sc); break;
      case Region::barrier: w = barrier_wavefunction(x, t, sc); break;
      case Region::right: w = transmitted_wavefunction(x, t, sc, kClosedForm); break;
    }
    early[idx] = w.early_time_warning;
    inconsistent[idx] = w.consistency_warning;
    rows[idx] = make_record(x * sa, from_dimensionless(t, QuantityKind::time, cfg.scales), w.value * psi_unit(cfg), r,
                            "analytic_sum");
  });
  PipelineResult res;
  const std::string csv = cfg.output + "_analytic.csv";
  write_file(csv, format_csv(rows, cfg));
  res.files.push_back(csv);
  json j = envelope(cfg);
  const double dg = d * sc.gamma0();
  j["derived"] = {{"P0", cfg.P0()}, {"X0", cfg.X0()}, {"D", d}, {"V", sc.barrier.height()}, {"k0", sc.k0()},
                  {"gamma", sc.gamma0()}};
  j["results"] = {{"transmitted_factor_abs2", std::norm(transmitted_factor(sc.k0(), dg))},
                  {"reflected_factor_abs2", std::norm(reflected_factor(sc.k0(), dg))},
                  {"early_time_warning", std::any_of(early.begin(), early.end(), [](char c) { return c != 0; })},
                  {"files", res.files}};
  res.summary_json = j.dump(2) + "\n";
  write_file(cfg.output + "_summary.json", res.summary_json);
  res.files.push_back(cfg.output + "_summary.json");
  return res;
}

namespace {

std::vector<double> default_oracle_times(const RunConfig& cfg) {
  const double tR = -cfg.X0() / cfg.P0();
  return {tR + 8.0 / cfg.P0(), tR + 10.0 / cfg.P0(), tR + 12.0 / cfg.P0()};
}

OracleConfig oracle_setup(const RunConfig& cfg, double refine) {
  const double sa = sqrt_a(cfg);
  std::vector<double> times;
  if (cfg.oracle.times.empty()) {
    times = default_oracle_times(cfg);
  } else {
    for (double t : cfg.oracle.times) times.push_back(to_dimensionless(t, QuantityKind::time, cfg.scales));
  }
  std::optional<Barrier> b;
  if (!cfg.free_control()) b = cfg.barrier();
  return oracle_config_for(cfg.packet(), b, cfg.oracle.dx / sa / refine, to_dimensionless(cfg.oracle.dt, QuantityKind::time, cfg.scales) / refine,
                           times, cfg.oracle.x_min / sa, cfg.oracle.x_max / sa);
}

OracleConfig checked_setup(const RunConfig& cfg, double refine) {
  try {
    auto oc = oracle_setup(cfg, refine);
    validate(oc);
    return oc;
  } catch (const InputError& e) {
    throw ConfigError("oracle", e.what());
  }
}

}  // namespace

PipelineResult run_oracle(const RunConfig& cfg) {
  const auto oc = checked_setup(cfg, 1.0);
  const auto frames = evolve(oc);
  const double sa = sqrt_a(cfg);
  std::vector<FrameRecord> rows;
  json obs = json::array();
  for (const auto& f : frames) {
    const double t = from_dimensionless(f.time(), QuantityKind::time, cfg.scales);
    for (std::size_t i = 0; i < f.size(); ++i)
      rows.push_back(make_record(f.grid()[i] * sa, t, f.values()[i] * psi_unit(cfg), f.regions()[i], "oracle"));
    const auto o = observables(f);
    obs.push_back({{"t", t},
                   {"norm", o.norm},
                   {"centroid", o.centroid * sa},
                   {"P_left", o.P_left},
                   {"P_barrier", o.P_barrier},
                   {"P_right", o.P_right},
                   {"peak_position", o.peak_position * sa},
                   {"right_centroid", o.right_centroid * sa}});
  }
  PipelineResult res;
  const std::string csv = cfg.output + "_oracle.csv";
  write_file(csv, format_csv(rows, cfg));
  res.files.push_back(csv);
  json j = envelope(cfg);
  j["derived"] = {{"dx", oc.dx()}, {"dt", oc.dt}, {"n_points", oc.n_points}};
  j["results"] = {{"frames", obs}, {"files", res.files}};
  res.summary_json = j.dump(2) + "\n";
  write_file(cfg.output + "_summary.json", res.summary_json);
  res.files.push_back(cfg.output + "_summary.json");
  return res;
}

CompareReport compare_scenario(const RunConfig& cfg) {
  CompareReport r{};
  const auto base = evolve(checked_setup(cfg, 1.0));
  const auto fine = evolve(checked_setup(cfg, 2.0));
  const double P0 = cfg.P0();
  const auto a0 = arrival_analysis(base, cfg.X0(), P0);
  const auto a1 = arrival_analysis(fine, cfg.X0(), P0);
  r.P_right_oracle = a0.P_right;
  r.lag = a0.centroid_lag;
  r.lag_refined = a1.centroid_lag;
  r.inferred_delay = a0.inferred_delay;
  r.grid_delta_P_right = std::abs(a1.P_right - a0.P_right) / a0.P_right;
  if (cfg.free_control()) {
    r.transmitted_factor_sq = 1.0;
    r.hartmann_time = 0.0;
    r.delay_ratio = 0.0;
    r.leakage_fraction = 0.0;
    r.grid_delta_lag = std::abs(a1.centroid_lag - a0.centroid_lag);
  } else {
    const Scenario sc = cfg.scenario();
    r.transmitted_factor_sq = std::norm(transmitted_factor(sc.k0(), sc.barrier.width() * sc.gamma0()));
    r.hartmann_time = hartmann_time(P0, sc.barrier);
    r.delay_ratio = r.inferred_delay / r.hartmann_time;
    const double ptop = std::sqrt(2.0 * sc.barrier.height());
    const auto dom = momentum_domain(sc.packet, 14.0);
    double over = 0.0;
    if (dom.hi > ptop) {
      over = quad::integrate(std::function<double(double)>(
                                 [&](double p) { return std::norm(momentum_reference(p, sc.packet)); }),
                             ptop, dom.hi)
                 .value;
    }
    r.leakage_fraction = over / r.P_right_oracle;
    r.grid_delta_lag = std::abs(a1.centroid_lag - a0.centroid_lag) / std::abs(a0.centroid_lag);
  }
  r.transmission_ratio = r.P_right_oracle / r.transmitted_factor_sq;
  r.below_noise_floor = r.transmitted_factor_sq < 1e-14;
  return r;
}

PipelineResult run_compare(const RunConfig& cfg, bool force) {
  const double DP0 = cfg.D_dimless() * cfg.P0();
  const bool safe = cfg.free_control() || (DP0 >= 3.0 && DP0 <= 5.0);
  if (!safe && !force)
    throw ConfigError("barrier", "D P0 = " + std::to_string(DP0) +
                                     " is outside the oracle-safe range [3, 5]; pass --force to run anyway");
  json j = envelope(cfg);
  json warnings = json::array();
  if (!safe) warnings.push_back("scenario outside the oracle-safe range D P0 in [3, 5]");
  if (!cfg.free_control()) {
    const double tf2 = std::norm(transmitted_factor(cfg.k0_value(), cfg.D_dimless() * cfg.barrier().gamma(cfg.P0())));
    if (tf2 < 1e-14) {
      warnings.push_back("expected transmission " + format_number(tf2) +
                         " is below the double-precision noise floor; oracle numbers are not meaningful");
      j["warnings"] = warnings;
      j["results"] = {{"transmitted_factor_abs2", tf2}, {"skipped_oracle", true}};
      PipelineResult res;
      res.summary_json = j.dump(2) + "\n";
      write_file(cfg.output + "_compare.json", res.summary_json);
      res.files.push_back(cfg.output + "_compare.json");
      return res;
    }
  }
  const auto r = compare_scenario(cfg);
  json gates;
  if (cfg.free_control()) {
    gates["transmission_is_one"] = std::abs(r.P_right_oracle - 1.0) < 1e-6;
    gates["lag_zero_within_dx"] = std::abs(r.lag) <= cfg.oracle.dx / sqrt_a(cfg);
  } else {
    gates["P_right_within_15pct"] = std::abs(r.transmission_ratio - 1.0) <= 0.15;
    gates["delay_within_30pct"] = std::abs(r.delay_ratio - 1.0) <= 0.30;
    gates["lag_grid_delta_below_10pct"] = r.grid_delta_lag < 0.10;
    gates["P_right_grid_delta_below_1pct"] = r.grid_delta_P_right < 0.01;
    gates["leakage_below_5pct"] = r.leakage_fraction < 0.05;
  }
  bool all = true;
  for (const auto& [k, v] : gates.items()) all = all && v.get<bool>();
  const double tu = from_dimensionless(1.0, QuantityKind::time, cfg.scales);
  j["results"] = {{"P_right_oracle", r.P_right_oracle},
                  {"transmitted_factor_abs2", r.transmitted_factor_sq},
                  {"transmission_ratio", r.transmission_ratio},
                  {"inferred_delay", r.inferred_delay * tu},
                  {"hartmann_time", r.hartmann_time * tu},
                  {"delay_ratio", r.delay_ratio},
                  {"centroid_lag", r.lag * sqrt_a(cfg)},
                  {"centroid_lag_refined", r.lag_refined * sqrt_a(cfg)},
                  {"leakage_fraction", r.leakage_fraction},
                  {"grid_delta_P_right", r.grid_delta_P_right},
                  {"grid_delta_lag", r.grid_delta_lag},
                  {"gates", gates},
                  {"all_gates_pass", all}};
  j["warnings"] = warnings;
  PipelineResult res;
  res.exit_code = all ? 0 : 3;
  res.summary_json = j.dump(2) + "\n";
  write_file(cfg.output + "_compare.json", res.summary_json);
  res.files.push_back(cfg.output + "_compare.json");
  return res;
}

PipelineResult run_figure1(const RunConfig& cfg) {
  const Scenario sc = cfg.scenario();
  const double sa = sqrt_a(cfg);
  const double D = sc.barrier.width();
  const double t = cfg.times_dimless().front();
  const double ref = cfg.X0() + cfg.P0() * t + D;  // free reference centroid shifted by d
  GridSpec g = cfg.grid;
  if (g.n == 0) g = {(ref - 14.0) * sa, (ref + 14.0) * sa, 1401};
  const auto xs = linspace(g.min / sa, g.max / sa, g.n);
  const double scale = std::pow(pi, 0.25);  // |psi|^2 (pi a)^{1/2} in dimensionless units
  PipelineResult res;
  json terms = json::array();
  const double tphys = from_dimensionless(t, QuantityKind::time, cfg.scales);
  for (int l = 0; l <= 2; ++l) {
    std::vector<cplx> vals(xs.size());
    parallel_for(cfg.workers, xs.size(),
                 [&](std::size_t i) { vals[i] = transmitted_term(l, xs[i], t, sc, true).value; });
    std::vector<FrameRecord> rows;
    std::vector<double> dens(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      rows.push_back(make_record(xs[i] * sa, tphys, vals[i] * scale, region_of(xs[i], D),
                                 "analytic_term_" + std::to_string(l)));
      dens[i] = std::norm(vals[i]);
    }
    const std::string csv = cfg.output + "_term" + std::to_string(l) + ".csv";
    write_file(csv, format_csv(rows, cfg));
    res.files.push_back(csv);
    const double centroid = trapezoid_centroid(xs, dens);
    const auto s = delay_times(l, cfg.P0(), sc.barrier);
    const auto cc = consistency_condition(D, l, cfg.P0(), sc.k0(), sc.window, cfg.L);
    json term = {{"l", l},
                 {"centroid", centroid * sa},
                 {"reference_position", ref * sa},
                 {"lag", (ref - centroid) * sa},
                 {"expected_lag", s.shift * sa},
                 {"delay", s.delay * from_dimensionless(1.0, QuantityKind::time, cfg.scales)},
                 {"attenuation", s.attenuation},
                 {"consistency_lhs", cc.lhs},
                 {"consistency_rhs", cc.rhs},
                 {"consistency_margin", cc.margin()},
                 {"consistency_satisfied", cc.satisfied}};
    if (l > 0) term["attenuation_ratio"] = s.attenuation / delay_times(l - 1, cfg.P0(), sc.barrier).attenuation;
    terms.push_back(term);
  }
  json j = envelope(cfg);
  j["derived"] = {{"P0", cfg.P0()}, {"X0", cfg.X0()}, {"D", D}, {"V", sc.barrier.height()}, {"k0", sc.k0()},
                  {"t", tphys}, {"density_scale", "abs2 = |psi|^2 (pi a)^(1/2)"}};
  j["results"] = {{"terms", terms}, {"files", res.files}};
  res.summary_json = j.dump(2) + "\n";
  write_file(cfg.output + "_summary.json", res.summary_json);
  res.files.push_back(cfg.output + "_summary.json");
  return res;
}

PipelineResult run_packet_info(const RunConfig& cfg) {
  const Scenario sc = cfg.scenario();
  const auto v = variances(cfg.L);
  const auto e = epsilon_norm(cfg.L);
  const double prest = tail_probability(sc.window, sc.packet);
  const auto shift = reference_shift_bound(sc.packet);
  json cons = json::array();
  for (int l = 0; l <= 3; ++l) {
    const auto cc = consistency_condition(sc.barrier.width(), l, cfg.P0(), sc.k0(), sc.window, cfg.L);
    const auto s = delay_times(l, cfg.P0(), sc.barrier);
    cons.push_back({{"l", l},
                    {"lhs", cc.lhs},
                    {"rhs", cc.rhs},
                    {"satisfied", cc.satisfied},
                    {"shift", s.shift},
                    {"delay", s.delay},
                    {"attenuation", s.attenuation}});
  }
  json j = envelope(cfg);
  j["results"] = {{"N", normalization(cfg.L) * sqrt_a(cfg)},
                  {"dx2", v.dx2 * cfg.scales.a()},
                  {"dp2", v.dp2 * cfg.scales.hbar() * cfg.scales.hbar() / cfg.scales.a()},
                  {"eps", e.eps},
                  {"log_eps", e.log_eps},
                  {"eps_bound_log", log_epsilon_bound(cfg.L)},
                  {"P_rest", prest},
                  {"neg_log_eps_plus_P_rest", -std::log(e.eps + prest)},
                  {"window_factor", window_factor(cfg.K, sc.k0())},
                  {"delta_x_ref_log_abs", shift.log_abs},
                  {"delta_x_ref_log_bound", shift.log_bound},
                  {"terms", cons}};
  PipelineResult res;
  res.summary_json = j.dump(2) + "\n";
  write_file(cfg.output + "_packet.json", res.summary_json);
  res.files.push_back(cfg.output + "_packet.json");
  return res;
}

// ---------------------------------------------------------------- validation table

std::vector<ValidationRow> validate_suite() {
  std::vector<ValidationRow> rows;
  auto add = [&](std::string name, double value, double expected, double tol) {
    rows.push_back({std::move(name), value, expected, tol, std::abs(value - expected) <= tol});
  };
  const double P0 = 10.0, k0 = 0.5, L = 20.0, K = 1.4;
  const Barrier b = barrier_from_k0(k0, P0, 1.0);

  add("conservation k0=1/2 exponent=2", conservation_check(0.5, 2.0), 1.0, 1e-12);
  {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> uk(0.05, 0.95), ud(0.1, 5.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double kk = uk(rng), dd = ud(rng);
      const double g = P0 * std::sqrt((1.0 - kk) / kk);
      worst = std::max(worst, std::abs(conservation_check(kk, dd * g) - 1.0));
    }
    add("conservation 100 random samples (max deviation)", worst, 0.0, 1e-12);
  }
  add("|R| = 1 at k = 0.3", std::abs(reflection_value(0.3)), 1.0, 1e-13);
  {
    const double p = 7.0;
    const Barrier bb(100.0, 1.0);
    add("R(p) = rho(-i p^2/2) at p = 7", std::abs(reflection_factor(p, bb).value - rho(cplx(0.0, -0.5 * p * p), bb)),
        0.0, 1e-10);
  }
  const auto var = variances(L);
  add("variance dx^2 at L = 20 (two decimals)", var.dx2, 0.49, 0.01);
  add("variance dp^2 at L = 20 (two decimals)", var.dp2, 0.51, 0.01);
  add("variance limit dx^2 -> 1/2 (L = 200)", variances(200.0).dx2, 0.5, 1e-3);
  add("variance limit dp^2 -> 1/2 (L = 200)", variances(200.0).dp2, 0.5, 1e-3);
  add("window factor 1/sqrt(1 - K^2 k0)", window_factor(K, k0), 7.0710678118654755, 0.01);
  const auto win = MomentumWindow::from_ratio(P0, K);
  const auto cc = consistency_condition(1.0, 0, P0, k0, win, L);
  add("-ln(eps + P_rest) ~ 18", cc.rhs, 18.0, 1.0);
  add("eps(L=3) <= bound (bound - eps >= 0)", epsilon_bound(3.0) - epsilon_norm(3.0).eps >= 0.0 ? 0.0 : 1.0, 0.0, 0.0);
  {
    const PacketSpec pk(-20.0, P0, L);
    auto dens = [&](double p) { return std::norm(momentum_reference(p, pk)); };
    const auto dom = momentum_domain(pk, 30.0);
    const double q = quad::integrate(std::function<double(double)>(dens), dom.lo, win.p_min()).value +
                     quad::integrate(std::function<double(double)>(dens), win.p_max(), dom.hi).value;
    const double c = tail_probability(win, pk);
    add("P_rest closed form vs quadrature (relative)", std::abs(q - c) / c, 0.0, 1e-10);
  }
  add("Hartmann time T0 (P0=10, k0=1/2)", hartmann_time(P0, b), 0.02, 1e-15);
  {
    const auto s = delay_times(1, P0, b);
    add("shift = delay * p0 (l=1)", s.shift - s.delay * P0, 0.0, 1e-15);
  }
  {
    const double dx = std::sqrt(var.dx2), dp = std::sqrt(var.dp2);
    const auto r = distinguishability_ratio(P0, dx, dp, b);
    add("distinguishability 4/(p0 dx) vs 8 dp/p0", r.exact, r.approx, 0.02 * r.exact);
  }
  {
    const auto sh = reference_shift_bound(PacketSpec(-20.0, P0, L));
    add("delta x_ref negligible vs delta x_0 = 0.2", sh.negligible_vs(0.2) ? 1.0 : 0.0, 1.0, 0.0);
  }
  {
    const Barrier bb = barrier_from_k0(0.3, P0, 1.0);
    const double h = 1e-5;
    const double fd = (std::arg(reflection_value(bb.k(P0 + h))) - std::arg(reflection_value(bb.k(P0 - h)))) / (2 * h);
    const double slope = phase_linearization(P0, bb).slope;
    add("phase slope 2/gamma vs finite difference of Arg R (k0 = 0.3)", fd / slope, 1.0, 1e-6);
  }
  {
    const auto m = bessel_moment_integral(0, 0.25);
    add("Bessel moment l=0 eps=1/4 (relative)", std::abs(m.quadrature - m.closed) / m.closed, 0.0, 1e-6);
  }
  {
    const double V = 100.0;
    const cplx f = forward_laplace_rho_power(1, V, V);
    add("forward Laplace of L^-1(rho) at s = V", std::abs(f - rho(cplx(V, 0.0), V)), 0.0, 1e-6);
  }
  add("delta_l bound slope at eps = 1/4",
      std::log(delta_l_bound(2, 2.0, 100.0) / delta_l_bound(2, 1.0, 100.0)) / std::log(2.0), -0.25, 1e-12);
  return rows;
}

std::string format_validation(const std::vector<ValidationRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += (r.pass ? "PASS  " : "FAIL  ") + r.name + "  value=" + format_number(r.value) +
           " expected=" + format_number(r.expected) + " tol=" + format_number(r.tolerance) + "\n";
  }
  return out;
}

PipelineResult run_validate(const RunConfig& cfg) {
  const auto rows = validate_suite();
  json table = json::array();
  bool all = true;
  for (const auto& r : rows) {
    table.push_back({{"name", r.name}, {"value", r.value}, {"expected", r.expected}, {"tolerance", r.tolerance}, {"pass", r.pass}});
    all = all && r.pass;
  }
  json j = envelope(cfg);
  j["results"] = {{"checks", table}, {"all_pass", all}};
  PipelineResult res;
  res.exit_code = all ? 0 : 3;
  res.summary_json = j.dump(2) + "\n";
  write_file(cfg.output + "_validate.json", res.summary_json);
  res.files.push_back(cfg.output + "_validate.json");
  return res;
}

PipelineResult run(const RunConfig& cfg, bool force) {
  // fail on an unwritable output location before any long computation
  const auto dir = std::filesystem::path(cfg.output).parent_path();
  std::error_code ec;
  if (!dir.empty()) std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  switch (cfg.mode) {
    case Mode::analytic: return run_analytic(cfg);
    case Mode::oracle: return run_oracle(cfg);
    case Mode::compare: return run_compare(cfg, force);
    case Mode::figure1: return run_figure1(cfg);
    case Mode::validate: return run_validate(cfg);
    case Mode::packet_info: return run_packet_info(cfg);
  }
  throw ConfigError("mode", "unhandled mode");
}

}  // namespace ltunnel::io
