#include "wgqed/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#define TOML_ENABLE_FORMATTERS 0
#include <toml.hpp>

#include "wgqed/bosonic.hpp"
#include "wgqed/markovian.hpp"
#include "wgqed/qubit_hl.hpp"
#include "wgqed/result_io.hpp"

namespace wgqed {

using nlohmann::json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::HL: return "HL";
    case Method::BosonicNumeric: return "BosonicNumeric";
    case Method::BosonicAnalytic: return "BosonicAnalytic";
    case Method::WW1: return "WW1";
    case Method::WW2: return "WW2";
    case Method::Markovian: return "Markovian";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  for (Method m : {Method::HL, Method::BosonicNumeric, Method::BosonicAnalytic, Method::WW1, Method::WW2,
                   Method::Markovian})
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown method '" + std::string(s) +
                              "' (HL, BosonicNumeric, BosonicAnalytic, WW1, WW2, Markovian)");
}

EmitterKind method_emitter_kind(Method m) {
  return m == Method::BosonicNumeric || m == Method::BosonicAnalytic ? EmitterKind::Bosonic : EmitterKind::TwoLevel;
}

double parse_real_expr(std::string_view in) {
  std::string s;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (std::isspace(static_cast<unsigned char>(in[i]))) continue;
    if (in.substr(i, 2) == "π") {
      s += "pi";
      ++i;
      continue;
    }
    s += in[i];
  }
  auto fail = [&]() -> double { throw std::invalid_argument("cannot parse '" + std::string(in) + "' as a real"); };
  if (s.empty()) return fail();

  const auto pi_at = s.find("pi");
  if (pi_at == std::string::npos) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      return fail();
    }
    if (used != s.size()) return fail();
    return v;
  }
  std::string pre = s.substr(0, pi_at), post = s.substr(pi_at + 2);
  if (!pre.empty() && pre.back() == '*') pre.pop_back();
  double factor = 1.0;
  if (pre == "-") factor = -1.0;
  else if (pre == "+" || pre.empty()) factor = 1.0;
  else {
    std::size_t used = 0;
    try {
      factor = std::stod(pre, &used);
    } catch (const std::exception&) {
      return fail();
    }
    if (used != pre.size()) return fail();
  }
  double denom = 1.0;
  if (!post.empty()) {
    if (post[0] != '/' || post.size() < 2) return fail();
    std::size_t used = 0;
    try {
      denom = std::stod(post.substr(1), &used);
    } catch (const std::exception&) {
      return fail();
    }
    if (used != post.size() - 1 || denom == 0.0) return fail();
  }
  return factor * M_PI / denom;
}

bool WWSettings::operator==(const WWSettings& o) const {
  return params.K == o.params.K && params.bandwidth == o.params.bandwidth && params.delta == o.params.delta &&
         params.vg == o.params.vg && fit_window == o.fit_window && krylov_tol == o.krylov_tol &&
         rescale_hl == o.rescale_hl;
}

std::string Scenario::state() const {
  const auto sym = parse_site_symbols(initial_state);
  if (sym.size() == 1 && config.n_emitters > 1) {
    const std::size_t pos = initial_state.find_first_not_of(" \t");
    const std::string one = initial_state.substr(pos, initial_state.find_last_not_of(" \t") - pos + 1);
    std::string out;
    for (int i = 0; i < config.n_emitters; ++i) out += one;
    return out;
  }
  return initial_state;
}

// ---------------------------------------------------------------------------
// Documents

namespace {

json toml_to_json(const toml::node& node) {
  if (auto t = node.as_table()) {
    json j = json::object();
    for (auto&& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
    return j;
  }
  if (auto a = node.as_array()) {
    json j = json::array();
    for (auto&& v : *a) j.push_back(toml_to_json(v));
    return j;
  }
  if (auto v = node.as_string()) return v->get();
  if (auto v = node.as_integer()) return v->get();
  if (auto v = node.as_floating_point()) return v->get();
  if (auto v = node.as_boolean()) return v->get();
  throw std::invalid_argument("unsupported TOML value (dates are not accepted)");
}

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ScenarioError(path_.empty() ? "<root>" : path_, "expected a table");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }
  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) throw ScenarioError(field(key), "required field missing");
    return obj_.at(key);
  }

  double real(const std::string& key) { return as_real(at(key), field(key)); }
  double real(const std::string& key, double dflt) { return has(key) ? real(key) : dflt; }

  int integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) throw ScenarioError(field(key), "expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& key, int dflt) { return has(key) ? integer(key) : dflt; }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw ScenarioError(field(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& dflt) { return has(key) ? string(key) : dflt; }

  bool boolean(const std::string& key, bool dflt) {
    if (!has(key)) return dflt;
    const json& v = at(key);
    if (!v.is_boolean()) throw ScenarioError(field(key), "expected true or false");
    return v.get<bool>();
  }

  /// Scalar broadcast to n entries, or an array of exactly n.
  std::vector<double> per_emitter(const std::string& key, int n, double dflt) {
    if (!has(key)) return std::vector<double>(n, dflt);
    const json& v = at(key);
    if (!v.is_array()) return std::vector<double>(n, as_real(v, field(key)));
    if (static_cast<int>(v.size()) != n)
      throw ScenarioError(field(key), "expected " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_real(v[i], field(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::vector<std::string> strings(const std::string& key) {
    if (!has(key)) return {};
    const json& v = at(key);
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array()) throw ScenarioError(field(key), "expected a string or an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) throw ScenarioError(field(key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  Reader sub(const std::string& key) {
    if (!has(key)) return Reader(empty_, field(key));
    return Reader(at(key), field(key));
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!seen_.count(it.key())) throw ScenarioError(field(it.key()), "unknown field");
  }

  template <class F>
  auto wrap(const std::string& key, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScenarioError(field(key), e.what());
    }
  }

 private:
  static double as_real(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      try {
        return parse_real_expr(v.get<std::string>());
      } catch (const std::exception& e) {
        throw ScenarioError(path, e.what());
      }
    }
    throw ScenarioError(path, "expected a number or a pi expression");
  }

  inline static const json empty_ = json::object();
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

int count_excitations(const std::string& symbols, bool& fock) {
  int n = 0;
  fock = true;
  for (char c : parse_site_symbols(symbols)) {
    if (c == '1') ++n;
    else if (c != '0') fock = false;
  }
  return n;
}

}  // namespace

nlohmann::json load_document(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read scenario " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  const std::string text = buf.str();
  const auto ext = path.extension().string();
  if (ext == ".json") {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(path.string() + ": " + e.what());
    }
  }
  try {
    return toml_to_json(toml::parse(text, path.string()));
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << path.string() << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
        << e.description();
    throw std::runtime_error(msg.str());
  }
}

Scenario scenario_from_json(const nlohmann::json& doc, const std::string& default_name) {
  Reader r(doc, "");
  Scenario s;
  s.name = r.string("name", default_name);
  if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos)
    throw ScenarioError("name", "must be a non-empty file-name fragment");

  const auto methods = r.strings("method");
  if (methods.empty()) throw ScenarioError("method", "at least one method required");
  for (std::size_t i = 0; i < methods.size(); ++i)
    s.methods.push_back(r.wrap("method", [&] { return parse_method(methods[i]); }));

  Reader a = r.sub("array");
  ArrayConfig& c = s.config;
  c.n_emitters = a.integer("n_emitters");
  if (c.n_emitters < 1) throw ScenarioError(a.field("n_emitters"), "must be >= 1");
  c.topology = a.wrap("topology", [&] { return parse_topology(a.string("topology", "chain")); });
  c.phi0 = a.real("phi0");
  c.gamma_tau12 = a.real("gamma_tau12");
  c.gamma = a.per_emitter("gamma", c.n_emitters, 1.0);
  c.lamb_shift = a.per_emitter("lamb_shift", c.n_emitters, 0.0);
  s.link = a.wrap("link_convention", [&] { return parse_link_convention(a.string("link_convention", "wave")); });

  const EmitterKind inferred = method_emitter_kind(s.methods.front());
  for (Method m : s.methods)
    if (method_emitter_kind(m) != inferred)
      throw ScenarioError("method", "methods mix bosonic and two-level solvers");
  c.emitter_kind = inferred;
  if (a.has("emitter_kind")) {
    const auto k = a.wrap("emitter_kind", [&] { return parse_emitter_kind(a.string("emitter_kind")); });
    if (k != inferred)
      throw ScenarioError(a.field("emitter_kind"), "'" + std::string(to_string(k)) + "' conflicts with method " +
                                                       std::string(to_string(s.methods.front())));
  }
  a.wrap("", [&] {
    c.validate();
    return 0;
  });
  a.reject_unknown();

  s.initial_state = r.string("initial_state");
  const std::string state = r.wrap("initial_state", [&] {
    const std::string st = s.state();
    if (static_cast<int>(parse_site_symbols(st).size()) != c.n_emitters)
      throw std::invalid_argument("state has " + std::to_string(parse_site_symbols(st).size()) +
                                  " site symbols for " + std::to_string(c.n_emitters) + " emitters");
    return st;
  });

  s.t_end = r.real("t_end");
  if (!(s.t_end > 0.0)) throw ScenarioError("t_end", "must be > 0");
  s.dt = r.real("dt", 0.0);
  if (s.dt < 0.0) throw ScenarioError("dt", "must be > 0");
  s.output_interval = r.real("output_interval", 0.0);
  if (s.output_interval < 0.0) throw ScenarioError("output_interval", "must be > 0");
  s.interpolation = r.wrap("interpolation", [&] { return parse_interpolation(r.string("interpolation", "cubic")); });
  s.outputs = r.strings("outputs");
  for (const auto& o : s.outputs)
    if (std::find(kOutputNames.begin(), kOutputNames.end(), o) == kOutputNames.end())
      throw ScenarioError("outputs", "unknown output '" + o + "'");
  s.save_trajectory = r.boolean("save_trajectory", false);

  Reader w = r.sub("ww");
  s.ww.params.K = w.integer("modes", s.ww.params.K);
  s.ww.params.bandwidth = w.real("bandwidth", s.ww.params.bandwidth);
  s.ww.params.delta = w.real("delta", s.ww.params.delta);
  s.ww.fit_window = w.real("fit_window", s.ww.fit_window);
  s.ww.krylov_tol = w.real("krylov_tol", s.ww.krylov_tol);
  s.ww.rescale_hl = w.boolean("rescale_hl", false);
  if (s.ww.params.K < 1) throw ScenarioError(w.field("modes"), "must be >= 1");
  if (!(s.ww.params.bandwidth > 0.0)) throw ScenarioError(w.field("bandwidth"), "must be > 0");
  if (!(s.ww.fit_window > 0.0)) throw ScenarioError(w.field("fit_window"), "must be > 0");
  w.reject_unknown();
  r.reject_unknown();

  // Method / state compatibility.
  bool fock = false;
  const int exc = count_excitations(state, fock);
  for (Method m : s.methods) {
    const std::string tag = "method " + std::string(to_string(m));
    if (m == Method::WW1 || m == Method::WW2) {
      if (!fock) throw ScenarioError("initial_state", tag + " needs a Fock state of 0 and 1 symbols");
      const int cap = m == Method::WW1 ? 1 : 2;
      if (exc < 1 || exc > cap)
        throw ScenarioError("initial_state", tag + " supports 1.." + std::to_string(cap) + " excitations, state has " +
                                                 std::to_string(exc));
    }
    if (m == Method::BosonicAnalytic) {
      if (c.topology != Topology::InfiniteChain || !c.uniform_gamma() || !c.zero_lamb_shift() || !(c.gamma_tau12 > 0))
        throw ScenarioError("method", tag + " needs a chain with uniform gamma, no Lamb shift and gamma_tau12 > 0");
    }
    if ((m == Method::HL || m == Method::BosonicNumeric) && c.topology == Topology::TwoNodeLink &&
        !(c.gamma_tau12 > 0))
      throw ScenarioError("array.gamma_tau12", "a link needs gamma_tau12 > 0");
  }
  return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  json methods = json::array();
  for (Method m : s.methods) methods.push_back(std::string(to_string(m)));
  const auto& c = s.config;
  json array = {{"n_emitters", c.n_emitters},
                {"topology", std::string(to_string(c.topology))},
                {"emitter_kind", std::string(to_string(c.emitter_kind))},
                {"phi0", c.phi0},
                {"gamma_tau12", c.gamma_tau12},
                {"gamma", c.gamma},
                {"lamb_shift", c.lamb_shift},
                {"link_convention", std::string(to_string(s.link))}};
  json ww = {{"modes", s.ww.params.K},
             {"bandwidth", s.ww.params.bandwidth},
             {"delta", s.ww.params.delta},
             {"fit_window", s.ww.fit_window},
             {"krylov_tol", s.ww.krylov_tol},
             {"rescale_hl", s.ww.rescale_hl}};
  json j = {{"name", s.name},
            {"method", methods},
            {"initial_state", s.initial_state},
            {"t_end", s.t_end},
            {"interpolation", std::string(to_string(s.interpolation))},
            {"save_trajectory", s.save_trajectory},
            {"array", array},
            {"ww", ww}};
  if (s.dt > 0.0) j["dt"] = s.dt;
  if (s.output_interval > 0.0) j["output_interval"] = s.output_interval;
  if (!s.outputs.empty()) j["outputs"] = s.outputs;
  return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
  const json doc = load_document(path);
  return scenario_from_json(doc, path.stem().string());
}

// ---------------------------------------------------------------------------
// Time grid

std::vector<double> TimeGrid::times() const {
  std::vector<double> t(samples());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i * stride) * dt;
  return t;
}

TimeGrid resolve_grid(const Scenario& s) {
  const double tau = s.config.tau12();
  TimeGrid g;
  g.dt = s.dt > 0.0 ? s.dt : (tau > 0.0 ? tau / 200.0 : 1e-3);
  g.steps = step_count(s.t_end, g.dt);
  if (s.output_interval > 0.0) {
    const double ratio = s.output_interval / g.dt;
    const double k = std::round(ratio);
    if (k < 1.0 || std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio))
      throw ScenarioError("output_interval", "must be a positive multiple of dt = " + format_double(g.dt));
    g.stride = static_cast<std::size_t>(k);
  } else {
    const double cap = 0.02 * (1.0 + 1e-12);
    const double per_tau = tau > 0.0 ? tau / g.dt : 0.0;
    const bool aligned = tau > 0.0 && std::abs(per_tau - std::round(per_tau)) < 1e-9 * per_tau;
    if (aligned) {
      const auto m = static_cast<std::size_t>(std::round(per_tau));
      for (std::size_t d = 1; d <= m; ++d)
        if (m % d == 0 && static_cast<double>(d) * g.dt <= cap) g.stride = d;
    } else {
      g.stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(cap / g.dt)));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Solvers

namespace {

ArrayConfig method_config(const Scenario& s, Method m) {
  ArrayConfig c = s.config;
  c.emitter_kind = method_emitter_kind(m);
  return c;
}

bool has_port(const ArrayConfig& c) { return c.topology == Topology::InfiniteChain; }

WWModel calibration_model(const WWModel& m, double gamma) {
  // A chain emitter sits mid-waveguide; a link emitter sits on an end.
  const double x = m.modes.shape == ModeFunction::Sine ? m.modes.L / 2 : 0.0;
  return single_emitter_model(m.modes, x, gamma);
}

}  // namespace

GammaFit calibrate_ww(const Scenario& s) {
  const ArrayConfig c = method_config(s, Method::WW1);
  const WWModel model = build_ww_model(c, s.ww.params);
  const WWModel one = calibration_model(model, c.gamma.front());
  const double h = 0.01;
  const auto steps = static_cast<std::size_t>(std::ceil(s.ww.fit_window / h - 1e-9));
  int sector = 0;
  const Vec psi = ww_initial_state(one, "1", sector);
  KrylovOptions kopt;
  kopt.tol = s.ww.krylov_tol;
  const auto traj = evolve_ww(build_ww_hamiltonian(one, 1), one, 1, psi, h, steps, kopt);
  return calibrate_gamma(traj.t, traj.populations.col(0), s.ww.fit_window, one.recurrence_time());
}

MethodRun run_method(const Scenario& s, Method m, const GammaFit* fit) {
  MethodRun run;
  run.method = m;
  ArrayConfig cfg = method_config(s, m);
  const TimeGrid grid = resolve_grid(s);
  const std::string state = s.state();
  const int n = cfg.n_emitters;
  const std::vector<double> times = grid.times();

  switch (m) {
    case Method::HL: {
      if (fit && s.ww.rescale_hl) {
        const double tau = cfg.tau12();
        for (auto& g : cfg.gamma) g *= fit->gamma;
        cfg.gamma_tau12 = tau * cfg.gamma.front();
        run.diagnostics["gamma_used"] = cfg.gamma.front();
      }
      QubitHLOptions opt;
      opt.interpolation = s.interpolation;
      opt.link = s.link;
      opt.stride = grid.stride;
      auto hl = solve_qubit_hl(cfg, build_product_state(state, n), s.t_end, grid.dt, opt);
      run.steps = hl.steps;
      run.result = result_from_projection(hl.projected, cfg, has_port(cfg));
      run.trajectory = std::move(hl.projected);
      break;
    }
    case Method::BosonicNumeric:
    case Method::BosonicAnalytic: {
      PropagatorTrajectory traj;
      if (m == Method::BosonicNumeric) {
        SolverOptions opt;
        opt.interpolation = s.interpolation;
        opt.stride = grid.stride;
        opt.link = s.link;
        traj = solve_propagator_numeric(cfg, s.t_end, grid.dt, opt);
        run.steps = grid.steps;
      } else {
        const auto sol = solve_propagator_analytic(cfg, times.back());
        traj = sample_analytic(sol, times);
        run.diagnostics["windows"] = sol.windows();
      }
      auto proj = project_bosonic(traj, product_state_moments(state, n), s.interpolation);
      run.result = result_from_projection(proj, cfg, has_port(cfg));
      run.trajectory = std::move(proj);
      break;
    }
    case Method::WW1:
    case Method::WW2: {
      const WWModel model = build_ww_model(cfg, s.ww.params);
      int sector = 0;
      const Vec psi = ww_initial_state(model, state, sector);
      const CsrMatrix h = build_ww_hamiltonian(model, sector);
      KrylovOptions kopt;
      kopt.tol = s.ww.krylov_tol;
      const auto traj = evolve_ww(h, model, sector, psi, grid.interval(), times.size() - 1, kopt);
      run.steps = traj.stats.substeps;
      run.result = assemble_result(times, traj.populations, nullptr, cfg.tau12());
      run.diagnostics["sector"] = sector;
      run.diagnostics["dimension"] = h.rows;
      run.diagnostics["nnz"] = h.nnz();
      run.diagnostics["max_norm_drift"] = traj.max_norm_drift;
      run.diagnostics["matvecs"] = traj.stats.matvecs;
      run.diagnostics["recurrence_time"] = model.recurrence_time();
      if (fit) {
        run.diagnostics["gamma_fit"] = fit->gamma;
        run.diagnostics["fit_residual"] = fit->residual;
      }
      break;
    }
    case Method::Markovian: {
      const Vec psi = build_product_state(state, n);
      MarkovOptions opt;
      opt.stride = grid.stride;
      const auto traj = solve_master_equation(cfg, psi * psi.adjoint(), s.t_end, grid.dt, opt);
      run.steps = grid.steps;
      run.result = result_from_density(traj, cfg, has_port(cfg));
      run.diagnostics["min_eigenvalue"] = traj.min_eigenvalue;
      run.diagnostics["max_trace_error"] = traj.max_trace_error;
      if (traj.t.size() >= 5) run.diagnostics["heisenberg_residual"] = heisenberg_coherences(traj, cfg).max_residual;
      break;
    }
  }
  run.diagnostics["max_imag_residue"] = run.result.max_imag_residue;
  return run;
}

nlohmann::json sidecar_json(const Scenario& s, const MethodRun& run) {
  const TimeGrid g = resolve_grid(s);
  const auto rates = max_rates_over_time(run.result);
  return {{"format_version", 1},
          {"scenario", scenario_to_json(s)},
          {"method", std::string(to_string(run.method))},
          {"grid", {{"dt", g.dt}, {"stride", g.stride}, {"interval", g.interval()}, {"samples", g.samples()}}},
          {"steps", run.steps},
          {"burst", to_json(run.result.burst)},
          {"max_rates", {{"R_star", rates.r_star}, {"R_ld_star", rates.r_ld_star}}},
          {"diagnostics", run.diagnostics}};
}

std::filesystem::path output_root() {
  const char* env = std::getenv("WGQED_OUT");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("out");
}

namespace {

bool needs_fit(const Scenario& s) {
  for (Method m : s.methods)
    if (m == Method::WW1 || m == Method::WW2) return true;
  return false;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

}  // namespace

std::vector<std::filesystem::path> run_scenario(const Scenario& s, const std::filesystem::path& out_dir,
                                                std::ostream& log) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  std::optional<GammaFit> fit;
  if (needs_fit(s)) {
    fit = calibrate_ww(s);
    log << s.name << ": WW single-emitter gamma_fit = " << fit->gamma << ", residual = " << fit->residual << '\n';
  }
  for (Method m : s.methods) {
    const auto t0 = std::chrono::steady_clock::now();
    const MethodRun run = run_method(s, m, fit ? &*fit : nullptr);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string stem = s.name + "_" + std::string(to_string(m));
    const auto csv = out_dir / (stem + ".csv");
    write_result_csv(csv, run.result, s.outputs);
    const auto side = out_dir / (stem + ".json");
    write_text(side, sidecar_json(s, run).dump(2) + "\n");
    written.push_back(csv);
    written.push_back(side);
    if (s.save_trajectory && run.trajectory) {
      const auto trj = out_dir / (stem + ".trj");
      write_trajectory(trj, *run.trajectory);
      written.push_back(trj);
    }
    log << stem << ": " << run.steps << " steps, " << run.result.t.size() << " samples, " << secs << " s\n";
  }
  return written;
}

// ---------------------------------------------------------------------------
// Sweeps

SweepAxis parse_vary(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= arg.size())
    throw std::invalid_argument("--vary expects key=v1,v2,... (got '" + arg + "')");
  SweepAxis axis;
  axis.key = arg.substr(0, eq);
  std::stringstream ss(arg.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw std::invalid_argument("--vary " + axis.key + ": empty value");
    json v = json::parse(item, nullptr, false);
    if (v.is_discarded() || v.is_object() || v.is_array()) v = item;
    axis.values.push_back(v);
  }
  return axis;
}

namespace {

void set_path(json& doc, const std::string& key, const json& value) {
  json* node = &doc;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i])) (*node)[parts[i]] = json::object();
    node = &(*node)[parts[i]];
    if (!node->is_object()) throw ScenarioError(key, "path runs through a non-table value");
  }
  (*node)[parts.back()] = value;
}

std::string cell(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

std::vector<nlohmann::json> expand_sweep(const nlohmann::json& tmpl, const std::vector<SweepAxis>& axes) {
  std::vector<json> out{tmpl};
  for (const auto& axis : axes) {
    std::vector<json> next;
    for (const auto& doc : out)
      for (const auto& v : axis.values) {
        json d = doc;
        set_path(d, axis.key, v);
        next.push_back(std::move(d));
      }
    out = std::move(next);
  }
  return out;
}

std::vector<std::filesystem::path> run_sweep(const nlohmann::json& tmpl, const std::vector<SweepAxis>& axes,
                                             const std::filesystem::path& out_dir, unsigned jobs, std::ostream& log,
                                             const std::string& default_name) {
  const auto docs = expand_sweep(tmpl, axes);
  std::vector<Scenario> scenarios;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    try {
      scenarios.push_back(scenario_from_json(docs[i], default_name));
    } catch (const std::exception& e) {
      throw std::invalid_argument("sweep point " + std::to_string(i) + ": " + e.what());
    }
  }
  // Tags per point, in axis order.
  std::vector<std::vector<std::string>> tags(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::size_t rem = i, stride = docs.size();
    for (const auto& axis : axes) {
      stride /= axis.values.size();
      tags[i].push_back(cell(axis.values[rem / stride]));
      rem %= stride;
    }
  }

  struct Point {
    std::vector<MethodRun> runs;
    std::string error;
  };
  std::vector<Point> points(scenarios.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(scenarios.size())));
  auto work = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        const Scenario& s = scenarios[i];
        std::optional<GammaFit> fit;
        if (needs_fit(s)) fit = calibrate_ww(s);
        const auto t0 = std::chrono::steady_clock::now();
        for (Method m : s.methods) points[i].runs.push_back(run_method(s, m, fit ? &*fit : nullptr));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::lock_guard<std::mutex> lock(log_mutex);
        log << "sweep point " << i + 1 << "/" << scenarios.size() << " done in " << secs << " s\n";
      } catch (const std::exception& e) {
        points[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!points[i].error.empty()) throw std::runtime_error("sweep point " + std::to_string(i) + ": " + points[i].error);

  std::filesystem::create_directories(out_dir);
  const std::string name = scenarios.front().name;
  std::ostringstream head;
  for (const auto& axis : axes) head << axis.key << ',';
  head << "method";

  const auto long_path = out_dir / (name + "_sweep.csv");
  const auto sum_path = out_dir / (name + "_summary.csv");
  std::ofstream lo(long_path, std::ios::binary), su(sum_path, std::ios::binary);
  if (!lo || !su) throw std::runtime_error("cannot write sweep tables under " + out_dir.string());
  lo << head.str() << ",t,n_total,I_out,R,R_ld\n";
  su << head.str() << ",N,I_dicke,I_max,t_max,has_burst,R_star,R_ld_star,steps\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::string prefix;
    for (const auto& t : tags[i]) prefix += t + ",";
    for (const auto& run : points[i].runs) {
      const auto& r = run.result;
      const std::string p = prefix + std::string(to_string(run.method));
      for (std::size_t k = 0; k < r.t.size(); ++k)
        lo << p << ',' << format_double(r.t[k]) << ',' << format_double(r.total_population[k]) << ','
           << format_double(r.output_current[k]) << ',' << format_double(r.rate[k]) << ','
           << format_double(r.rate_ld[k]) << '\n';
      const auto mr = max_rates_over_time(r);
      const auto& b = r.burst;
      su << p << ',' << r.n << ',' << format_double(b.i_dicke) << ',' << format_double(b.i_max) << ','
         << format_double(b.t_max) << ',' << (b.valid ? (b.has_burst ? "1" : "0") : "nan") << ','
         << format_double(mr.r_star) << ',' << format_double(mr.r_ld_star) << ',' << run.steps << '\n';
    }
  }
  return {long_path, sum_path};
}

}  // namespace wgqed
