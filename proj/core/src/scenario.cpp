#include "finbath/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <limits>
#include <memory>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "finbath/errors.hpp"
#include "finbath/thermo.hpp"
#include "finbath/tlsmap.hpp"
#include "finbath/version.hpp"

namespace finbath::scenario {

using json = nlohmann::json;

const char* to_string(ModelKind m) {
  return m == ModelKind::CentralSpin ? "central-spin" : "rtn";
}

const char* to_string(OutputKind o) {
  switch (o) {
    case OutputKind::State: return "state";
    case OutputKind::Rates: return "rates";
    case OutputKind::Choi: return "choi";
    case OutputKind::Kraus: return "kraus";
    case OutputKind::Thermo: return "thermo";
    case OutputKind::MasterEqCheck: return "master-eq-check";
    case OutputKind::MonteCarlo: return "mc";
    case OutputKind::CanonicalHamiltonian: return "canonical-hamiltonian";
  }
  return "unknown";
}

Mat2 ScenarioConfig::rho0() const {
  return thermo::mixed_initial_state(initial_state.mixing_p, initial_state.a0, initial_state.a1);
}

std::vector<double> ScenarioConfig::time_grid() const {
  std::vector<double> t(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) t[k] = t_max * k / (n_points - 1);
  return t;
}

std::string ScenarioConfig::config_hash() const {
  return "fnv1a64:" + csv::hex64(csv::fnv1a64(canonical_json));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& path) {
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) throw ConfigError(join(path, item.key()), "unknown key");
  }
}

const json& require_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path, "expected an object");
  return v;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

std::int64_t integer(const json& v, const std::string& path) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) return std::int64_t(x);
  }
  throw ConfigError(path, "expected an integer");
}

std::uint64_t unsigned_integer(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const std::int64_t x = integer(v, path);
  if (x < 0) throw ConfigError(path, "must be non-negative");
  return std::uint64_t(x);
}

template <class Fn>
void optional_field(const json& obj, const char* key, const std::string& path, Fn&& fn) {
  if (auto it = obj.find(key); it != obj.end()) fn(*it, join(path, key));
}

int bath_size(const json& v, const std::string& path) {
  const std::int64_t n = integer(v, path);
  if (n < 1 || n > std::numeric_limits<int>::max()) throw ConfigError(path, "must be >= 1");
  return int(n);
}

void parse_cs_params(const json& obj, centralspin::CentralSpinParams& p) {
  const std::string path = "params";
  reject_unknown(obj, {"omega0", "omega", "n_bath", "epsilon", "beta"}, path);
  optional_field(obj, "omega0", path, [&](const json& v, auto q) { p.omega0 = number(v, q); });
  optional_field(obj, "omega", path, [&](const json& v, auto q) { p.omega = number(v, q); });
  optional_field(obj, "n_bath", path, [&](const json& v, auto q) { p.n_bath = bath_size(v, q); });
  optional_field(obj, "epsilon", path, [&](const json& v, auto q) { p.epsilon = number(v, q); });
  optional_field(obj, "beta", path, [&](const json& v, auto q) { p.beta = number(v, q); });
}

void parse_rtn_params(const json& obj, rtn::RtnParams& p) {
  const std::string path = "params";
  reject_unknown(obj, {"omega0", "epsilon", "n_bath", "gamma"}, path);
  optional_field(obj, "omega0", path, [&](const json& v, auto q) { p.omega0 = number(v, q); });
  optional_field(obj, "epsilon", path, [&](const json& v, auto q) {
    p.epsilon = number(v, q);
    if (p.epsilon < 0.0) throw ConfigError(q, "must be >= 0");
  });
  optional_field(obj, "n_bath", path, [&](const json& v, auto q) { p.n_bath = bath_size(v, q); });
  optional_field(obj, "gamma", path, [&](const json& v, auto q) {
    p.gamma = number(v, q);
    if (!(p.gamma > 0.0)) throw ConfigError(q, "must be > 0");
  });
}

Complex amplitude(const json& v, const std::string& path) {
  if (v.is_number()) return {number(v, path), 0.0};
  if (!v.is_array() || v.size() != 2) throw ConfigError(path, "expected [re, im]");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

void parse_initial_state(const json& obj, InitialState& s) {
  const std::string path = "initial_state";
  require_object(obj, path);
  reject_unknown(obj, {"amplitudes", "mixing_p"}, path);
  optional_field(obj, "amplitudes", path, [&](const json& v, const std::string& q) {
    if (!v.is_array() || v.size() != 2) throw ConfigError(q, "expected two amplitudes");
    s.a0 = amplitude(v[0], q + "[0]");
    s.a1 = amplitude(v[1], q + "[1]");
    if (std::norm(s.a0) + std::norm(s.a1) == 0.0) throw ConfigError(q, "amplitudes are both zero");
  });
  optional_field(obj, "mixing_p", path, [&](const json& v, const std::string& q) {
    s.mixing_p = number(v, q);
    if (s.mixing_p < 0.0 || s.mixing_p > 1.0) throw ConfigError(q, "must lie in [0, 1]");
  });
}

OutputKind output_kind(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  const std::string s = v.get<std::string>();
  for (OutputKind k : {OutputKind::State, OutputKind::Rates, OutputKind::Choi, OutputKind::Kraus,
                       OutputKind::Thermo, OutputKind::MasterEqCheck, OutputKind::MonteCarlo,
                       OutputKind::CanonicalHamiltonian}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError(path, "unknown output '" + s + "'");
}

json amplitude_json(Complex z) { return json::array({z.real(), z.imag()}); }

}  // namespace

ScenarioConfig parse_config(std::string_view json_text, const Overrides& overrides) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  require_object(doc, "<root>");
  reject_unknown(doc,
                 {"name", "model", "params", "initial_state", "t_max", "n_points", "outputs",
                  "seed", "mc_trajectories"},
                 "");
  if (overrides.seed) doc["seed"] = *overrides.seed;
  if (overrides.mc_trajectories) doc["mc_trajectories"] = *overrides.mc_trajectories;

  ScenarioConfig c;
  optional_field(doc, "name", "", [&](const json& v, const std::string& q) {
    static const std::regex safe("[A-Za-z0-9_.-]+");
    if (!v.is_string() || !std::regex_match(v.get<std::string>(), safe)) {
      throw ConfigError(q, "expected a file-name-safe string");
    }
    c.name = v.get<std::string>();
  });

  auto model = doc.find("model");
  if (model == doc.end()) throw ConfigError("model", "required");
  if (*model == "central-spin") {
    c.model = ModelKind::CentralSpin;
  } else if (*model == "rtn") {
    c.model = ModelKind::Rtn;
  } else {
    throw ConfigError("model", "expected \"central-spin\" or \"rtn\"");
  }

  if (auto it = doc.find("params"); it != doc.end()) {
    require_object(*it, "params");
    if (c.model == ModelKind::CentralSpin) {
      parse_cs_params(*it, c.cs);
    } else {
      parse_rtn_params(*it, c.rtn);
    }
  }
  optional_field(doc, "initial_state", "",
                 [&](const json& v, const std::string&) { parse_initial_state(v, c.initial_state); });
  optional_field(doc, "t_max", "", [&](const json& v, const std::string& q) {
    c.t_max = number(v, q);
    if (!(c.t_max > 0.0)) throw ConfigError(q, "must be > 0");
  });
  optional_field(doc, "n_points", "", [&](const json& v, const std::string& q) {
    const std::int64_t n = integer(v, q);
    if (n < 2 || n > 10'000'000) throw ConfigError(q, "must lie in [2, 1e7]");
    c.n_points = int(n);
  });
  optional_field(doc, "outputs", "", [&](const json& v, const std::string& q) {
    if (!v.is_array() || v.empty()) throw ConfigError(q, "expected a non-empty array");
    c.outputs.clear();
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::string item = q + "[" + std::to_string(k) + "]";
      const OutputKind kind = output_kind(v[k], item);
      if (std::find(c.outputs.begin(), c.outputs.end(), kind) != c.outputs.end()) {
        throw ConfigError(item, "duplicate output");
      }
      if (kind == OutputKind::MonteCarlo && c.model != ModelKind::Rtn) {
        throw ConfigError(item, "'mc' requires model \"rtn\"");
      }
      if (kind == OutputKind::CanonicalHamiltonian && c.model != ModelKind::CentralSpin) {
        throw ConfigError(item, "'canonical-hamiltonian' requires model \"central-spin\"");
      }
      c.outputs.push_back(kind);
    }
  });
  optional_field(doc, "seed", "",
                 [&](const json& v, const std::string& q) { c.seed = unsigned_integer(v, q); });
  optional_field(doc, "mc_trajectories", "", [&](const json& v, const std::string& q) {
    const std::uint64_t n = unsigned_integer(v, q);
    if (n < 1) throw ConfigError(q, "must be >= 1");
    c.mc_trajectories = std::size_t(n);
  });

  json params;
  if (c.model == ModelKind::CentralSpin) {
    params = {{"omega0", c.cs.omega0}, {"omega", c.cs.omega}, {"n_bath", c.cs.n_bath},
              {"epsilon", c.cs.epsilon}, {"beta", c.cs.beta}};
  } else {
    params = {{"omega0", c.rtn.omega0}, {"epsilon", c.rtn.epsilon}, {"n_bath", c.rtn.n_bath},
              {"gamma", c.rtn.gamma}};
  }
  json outputs = json::array();
  for (OutputKind k : c.outputs) outputs.push_back(to_string(k));
  const json canonical = {
      {"name", c.name},
      {"model", to_string(c.model)},
      {"params", params},
      {"initial_state",
       {{"amplitudes", {amplitude_json(c.initial_state.a0), amplitude_json(c.initial_state.a1)}},
        {"mixing_p", c.initial_state.mixing_p}}},
      {"t_max", c.t_max},
      {"n_points", c.n_points},
      {"outputs", outputs},
      {"seed", c.seed},
      {"mc_trajectories", c.mc_trajectories}};
  c.canonical_json = canonical.dump();
  return c;
}

ScenarioConfig load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

// ---------------------------------------------------------------------------
// Running

namespace {

Artifact start(const ScenarioConfig& c, OutputKind kind, std::vector<std::string> columns) {
  Artifact a;
  a.filename = c.name + "_" + to_string(kind) + ".csv";
  auto& t = a.table;
  t.add_meta("tool", std::string("finbath ") + kVersion);
  t.add_meta("config_hash", c.config_hash());
  t.add_meta("model", to_string(c.model));
  t.add_meta("output", to_string(kind));
  if (c.model == ModelKind::CentralSpin) {
    t.add_meta("param.omega0", csv::format_double(c.cs.omega0));
    t.add_meta("param.omega", csv::format_double(c.cs.omega));
    t.add_meta("param.n_bath", std::to_string(c.cs.n_bath));
    t.add_meta("param.epsilon", csv::format_double(c.cs.epsilon));
    t.add_meta("param.beta", csv::format_double(c.cs.beta));
  } else {
    t.add_meta("param.omega0", csv::format_double(c.rtn.omega0));
    t.add_meta("param.epsilon", csv::format_double(c.rtn.epsilon));
    t.add_meta("param.n_bath", std::to_string(c.rtn.n_bath));
    t.add_meta("param.gamma", csv::format_double(c.rtn.gamma));
    t.add_meta("regime", rtn::to_string(rtn::regime(c.rtn)));
  }
  const auto& s = c.initial_state;
  t.add_meta("initial_state", "amplitudes=(" + csv::format_double(s.a0.real()) + "," +
                                  csv::format_double(s.a0.imag()) + "),(" +
                                  csv::format_double(s.a1.real()) + "," +
                                  csv::format_double(s.a1.imag()) +
                                  ") mixing_p=" + csv::format_double(s.mixing_p));
  t.add_meta("t_max", csv::format_double(c.t_max));
  t.add_meta("n_points", std::to_string(c.n_points));
  t.columns = std::move(columns);
  return a;
}

std::string list(const std::vector<double>& xs) {
  if (xs.empty()) return "none";
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? " " : "") + csv::format_double(xs[k]);
  return out;
}

// Roots of f bracketed by sign changes between consecutive grid points.
std::vector<double> sign_change_roots(const std::function<double(double)>& f,
                                      const std::vector<double>& grid) {
  std::vector<double> roots;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    double a = grid[k - 1], b = grid[k];
    double fa = f(a);
    const double fb = f(b);
    if (fa == 0.0 || (fa < 0.0) == (fb < 0.0)) continue;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
      const double m = 0.5 * (a + b);
      const double fm = f(m);
      if ((fa < 0.0) == (fm < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

void finish(Artifact& a) {
  a.table.add_meta("excluded_t", list(a.excluded_t));
  if (a.stopped_at) a.table.add_meta("stopped_at", csv::format_double(*a.stopped_at));
}

// Evaluates `row(t)` on the grid; singular points become exclusions.
template <class RowFn>
void fill(Artifact& a, const std::vector<double>& grid, RowFn&& row) {
  for (double t : grid) {
    try {
      a.table.add_row(row(t));
    } catch (const SingularityError&) {
      a.excluded_t.push_back(t);
    }
  }
}

std::vector<double> state_row(double t, const Mat2& rho) {
  return {t, rho(0, 0).real(), rho(0, 1).real(), rho(0, 1).imag(), rho(1, 1).real()};
}

const std::vector<std::string> kStateColumns{"t", "rho00", "rho01_re", "rho01_im", "rho11"};
const std::vector<std::string> kThermoColumns{"t", "J", "J_passive", "P", "W"};

double kraus_completeness(const std::vector<Mat2>& ks) {
  Mat2 sum = Mat2::Zero();
  for (const auto& k : ks) sum += k.adjoint() * k;
  return matkit::max_abs(sum - Mat2::Identity());
}

Mat2 kraus_apply(const std::vector<Mat2>& ks, const Mat2& rho) {
  Mat2 out = Mat2::Zero();
  for (const auto& k : ks) out += k * rho * k.adjoint();
  return out;
}

std::vector<double> sorted_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

Artifact run_cs(const ScenarioConfig& c, OutputKind kind) {
  auto model = std::make_shared<const centralspin::CentralSpinModel>(c.cs);
  const Mat2 rho0 = c.rho0();
  const auto grid = c.time_grid();
  switch (kind) {
    case OutputKind::State: {
      Artifact a = start(c, kind, kStateColumns);
      fill(a, grid, [&](double t) { return state_row(t, centralspin::exact_state(*model, rho0, t)); });
      finish(a);
      return a;
    }
    case OutputKind::Rates: return emit_rates(c);
    case OutputKind::Choi: {
      Artifact a = start(c, kind,
                         {"t", "gamma_gain", "gamma_loss", "gamma_3", "gamma_4", "pipeline_max_diff"});
      const auto source = centralspin::map_source(model);
      fill(a, grid, [&](double t) {
        const auto spec = centralspin::choi_spectrum_cs(centralspin::rates(*model, t));
        const auto generic = tlsmap::pseudo_kraus(
            tlsmap::choi_of_generator(tlsmap::generator_from_map(source, t)));
        std::vector<double> closed, pipeline;
        for (const auto& term : spec.terms) closed.push_back(term.rate);
        for (const auto& term : generic.terms) pipeline.push_back(term.rate);
        const auto a1 = sorted_desc(closed), a2 = sorted_desc(pipeline);
        double diff = 0.0;
        for (std::size_t k = 0; k < a1.size(); ++k) diff = std::max(diff, std::abs(a1[k] - a2[k]));
        return std::vector<double>{t, closed[0], closed[1], closed[2], closed[3], diff};
      });
      finish(a);
      return a;
    }
    case OutputKind::Kraus: {
      Artifact a = start(c, kind, {"t", "weight_1", "weight_2", "weight_3", "weight_4",
                                   "completeness_error", "reconstruction_error"});
      fill(a, grid, [&](double t) {
        const auto pr = model->propagators(t);
        const auto arr = centralspin::kraus_ops_cs(pr);
        const std::vector<Mat2> ks(arr.begin(), arr.end());
        std::vector<double> row{t};
        for (const auto& k : ks) row.push_back((k.adjoint() * k).trace().real());
        row.push_back(kraus_completeness(ks));
        row.push_back(matkit::max_abs(kraus_apply(ks, rho0) - centralspin::exact_state(pr, rho0)));
        return row;
      });
      finish(a);
      return a;
    }
    case OutputKind::Thermo: {
      Artifact a = start(c, kind, kThermoColumns);
      fill(a, grid, [&](double t) {
        const auto s = thermo::sample_cs(*model, rho0, t);
        return std::vector<double>{t, s.heat_current, s.passive_current, s.power, s.ergotropy};
      });
      finish(a);
      return a;
    }
    case OutputKind::MasterEqCheck: {
      Artifact a = start(c, kind, {"t", "max_abs_diff"});
      tlsmap::PropagationOptions opt;
      opt.singularity_indicator = [&](double t) {
        const auto pr = model->propagators(t);
        return pr.alpha - pr.eta;
      };
      const auto tr = tlsmap::propagate_until_singular(
          [&](double t) {
            return centralspin::canonical_decomposition_cs(centralspin::rates(*model, t));
          },
          rho0, grid, opt);
      for (std::size_t k = 0; k < tr.states.size(); ++k) {
        const Mat2 exact = centralspin::exact_state(*model, rho0, grid[k]);
        a.table.add_row({grid[k], matkit::max_abs(tr.states[k] - exact)});
      }
      a.stopped_at = tr.singular_at;
      finish(a);
      return a;
    }
    case OutputKind::CanonicalHamiltonian: {
      Artifact a = start(c, kind,
                         {"t", "h00_exact", "h11_exact", "h00_perturbative", "h11_perturbative"});
      fill(a, grid, [&](double t) {
        const auto pr = model->propagators(t);
        if (std::abs(pr.delta) <= 1e-12) {
          throw SingularCoherence("delta = 0 at t = " + std::to_string(t), t);
        }
        const double h00 = -0.5 * (pr.ddelta / pr.delta).imag();
        const Mat2 hp = centralspin::perturbative_h_can(c.cs, t);
        return std::vector<double>{t, h00, -h00, hp(0, 0).real(), hp(1, 1).real()};
      });
      finish(a);
      return a;
    }
    case OutputKind::MonteCarlo: break;
  }
  throw ConfigError("outputs", std::string("output '") + to_string(kind) +
                                   "' is not available for model central-spin");
}

Artifact run_rtn(const ScenarioConfig& c, OutputKind kind, const RunOptions& options) {
  const rtn::RtnParams& p = c.rtn;
  const Mat2 rho0 = c.rho0();
  const auto grid = c.time_grid();
  switch (kind) {
    case OutputKind::State: {
      Artifact a = start(c, kind, kStateColumns);
      fill(a, grid, [&](double t) { return state_row(t, rtn::rtn_state(p, rho0, t)); });
      finish(a);
      return a;
    }
    case OutputKind::Rates: {
      Artifact a = start(c, kind, {"t", "lambda", "dlambda", "dephasing_rate"});
      fill(a, grid, [&](double t) {
        const auto f = rtn::lambda_rtn(p, t);
        const auto d = rtn::canonical_decomposition_rtn(p, t);
        return std::vector<double>{t, f.value, f.derivative, d.jumps.front().rate};
      });
      a.table.add_meta("lambda_zeros", list(rtn::lambda_zeros(p, grid)));
      finish(a);
      return a;
    }
    case OutputKind::Choi: {
      Artifact a = start(c, kind, {"t", "gamma_1", "gamma_2", "gamma_3", "gamma_4", "h_can_z"});
      const auto source = rtn::rtn_map_source(p);
      fill(a, grid, [&](double t) {
        const auto spec = tlsmap::pseudo_kraus(
            tlsmap::choi_of_generator(tlsmap::generator_from_map(source, t)));
        const auto dec = tlsmap::canonical_form(spec);
        std::vector<double> row{t};
        for (const auto& term : spec.terms) row.push_back(term.rate);
        row.push_back(dec.hamiltonian(0, 0).real());
        return row;
      });
      finish(a);
      return a;
    }
    case OutputKind::Kraus: {
      Artifact a = start(c, kind,
                         {"t", "weight_1", "weight_2", "completeness_error", "reconstruction_error"});
      fill(a, grid, [&](double t) {
        const auto arr = rtn::rtn_kraus(p, t);
        const std::vector<Mat2> ks(arr.begin(), arr.end());
        std::vector<double> row{t};
        for (const auto& k : ks) row.push_back((k.adjoint() * k).trace().real());
        row.push_back(kraus_completeness(ks));
        row.push_back(matkit::max_abs(kraus_apply(ks, rho0) - rtn::rtn_state(p, rho0, t)));
        return row;
      });
      finish(a);
      return a;
    }
    case OutputKind::Thermo: {
      Artifact a = start(c, kind, kThermoColumns);
      fill(a, grid, [&](double t) {
        const auto s = thermo::sample_rtn(p, rho0, t);
        return std::vector<double>{t, s.heat_current, s.passive_current, s.power, s.ergotropy};
      });
      finish(a);
      return a;
    }
    case OutputKind::MasterEqCheck: {
      Artifact a = start(c, kind, {"t", "max_abs_diff"});
      tlsmap::PropagationOptions opt;
      opt.singularity_indicator = [&](double t) { return rtn::lambda_rtn(p, t).value; };
      const auto tr = tlsmap::propagate_until_singular(
          [&](double t) { return rtn::canonical_decomposition_rtn(p, t); }, rho0, grid, opt);
      for (std::size_t k = 0; k < tr.states.size(); ++k) {
        a.table.add_row(
            {grid[k], matkit::max_abs(tr.states[k] - rtn::rtn_state(p, rho0, grid[k]))});
      }
      a.stopped_at = tr.singular_at;
      finish(a);
      return a;
    }
    case OutputKind::MonteCarlo: {
      Artifact a = start(c, kind, {"t", "lambda_mc", "std_error", "lambda_exact", "imag_mean",
                                   "mean_switches", "switches_std_error"});
      a.table.add_meta("seed", std::to_string(c.seed));
      a.table.add_meta("mc_trajectories", std::to_string(c.mc_trajectories));
      const auto mc = rtn::monte_carlo_lambda(p, grid, {c.seed, c.mc_trajectories, options.threads});
      for (std::size_t k = 0; k < grid.size(); ++k) {
        a.table.add_row({grid[k], mc.lambda[k], mc.std_error[k], rtn::lambda_rtn(p, grid[k]).value,
                         mc.imag_mean[k], mc.mean_switches[k], mc.switches_std_error[k]});
      }
      finish(a);
      return a;
    }
    case OutputKind::CanonicalHamiltonian: break;
  }
  throw ConfigError("outputs", std::string("output '") + to_string(kind) +
                                   "' is not available for model rtn");
}

}  // namespace

Artifact run_output(const ScenarioConfig& config, OutputKind kind, const RunOptions& options) {
  return config.model == ModelKind::CentralSpin ? run_cs(config, kind)
                                                : run_rtn(config, kind, options);
}

std::vector<Artifact> run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  std::vector<Artifact> out;
  for (OutputKind kind : config.outputs) out.push_back(run_output(config, kind, options));
  return out;
}

Artifact emit_rates(const ScenarioConfig& c) {
  if (c.model != ModelKind::CentralSpin) {
    throw ConfigError("model", "rates table requires model \"central-spin\"");
  }
  const centralspin::CentralSpinModel model(c.cs);
  Artifact a = start(c, OutputKind::Rates,
                     {"t", "zeta", "Gamma", "Theta_re", "Theta_im", "nu_plus", "nu_minus", "nu_z"});
  const auto grid = c.time_grid();
  a.table.add_meta("alpha_eta_crossings", list(sign_change_roots(
                                              [&](double t) {
                                                const auto pr = model.propagators(t);
                                                return pr.alpha - pr.eta;
                                              },
                                              grid)));
  fill(a, grid, [&](double t) {
    const auto r = centralspin::rates(model, t);
    return std::vector<double>{t, r.zeta, r.gamma, r.theta.real(), r.theta.imag(),
                               r.nu_plus, r.nu_minus, r.nu_z};
  });
  finish(a);
  return a;
}

}  // namespace finbath::scenario
