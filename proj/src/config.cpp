// Copyright 2026 The metagate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "metagate/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

namespace metagate {

namespace {

using json = nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join_errors(const std::vector<std::string>& errors) {
  std::string out = "invalid config:";
  for (const auto& e : errors) out += "\n  " + e;
  return out;
}

// Collects errors instead of stopping at the first one.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) return;
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
      if (!ok.contains(k)) fail(join(path, k), "unknown key");
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  // Missing optional sections read as an empty object.
  const json& section(const json& obj, const std::string& key, const std::string& path) {
    static const json empty = json::object();
    if (!obj.is_object() || !obj.contains(key)) return empty;
    const json& v = obj.at(key);
    if (!v.is_object()) {
      fail(join(path, key), "must be an object");
      return empty;
    }
    return v;
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& path,
                               std::optional<double> fallback) {
    if (!obj.is_object() || !obj.contains(key)) {
      if (!fallback) fail(join(path, key), "required number is missing");
      return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(join(path, key), "must be a number");
      return fallback;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      fail(join(path, key), "must be finite");
      return fallback;
    }
    return d;
  }

  double number_or(const json& obj, const std::string& key, const std::string& path, double fb) {
    return number(obj, key, path, fb).value_or(fb);
  }

  double required(const json& obj, const std::string& key, const std::string& path) {
    return number(obj, key, path, std::nullopt).value_or(0.0);
  }

  std::size_t count(const json& obj, const std::string& key, const std::string& path,
                    std::size_t fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      fail(join(path, key), "must be a non-negative integer");
      return fallback;
    }
    return v.get<std::size_t>();
  }

  bool flag(const json& obj, const std::string& key, const std::string& path, bool fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
      fail(join(path, key), "must be true or false");
      return fallback;
    }
    return v.get<bool>();
  }

  std::string text(const json& obj, const std::string& key, const std::string& path,
                   const std::string& fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      fail(join(path, key), "must be a string");
      return fallback;
    }
    return v.get<std::string>();
  }

  Vec3 vec3(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) return Vec3::Zero();
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 3 ||
        !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
      fail(join(path, key), "must be an array of three numbers");
      return Vec3::Zero();
    }
    return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }
};

void parse_qubits(Reader& rd, const json& root, RunConfig& cfg) {
  if (!root.contains("qubits") || !root.at("qubits").is_array()) {
    rd.fail("qubits", "required array is missing");
    return;
  }
  const json& arr = root.at("qubits");
  std::set<int> seen;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string path = "qubits[" + std::to_string(k) + "]";
    const json& q = arr[k];
    if (!q.is_object()) {
      rd.fail(path, "must be an object");
      continue;
    }
    rd.allow_keys(q, path,
                  {"index", "freq_hz", "position_m", "bare_coupling_hz", "drive_amplitude_hz",
                   "drive_detuning_hz", "t1_s"});
    QubitSpec s;
    s.index = static_cast<int>(rd.count(q, "index", path, k));
    if (!seen.insert(s.index).second) rd.fail(path + ".index", "duplicate qubit index");
    s.frequency = kTwoPi * rd.required(q, "freq_hz", path);
    s.position = rd.vec3(q, "position_m", path);
    s.bare_coupling = kTwoPi * rd.required(q, "bare_coupling_hz", path);
    if (s.bare_coupling < 0.0) rd.fail(path + ".bare_coupling_hz", "must be >= 0");
    s.drive_amplitude = kTwoPi * rd.number_or(q, "drive_amplitude_hz", path, 0.0);
    s.drive_detuning = kTwoPi * rd.number_or(q, "drive_detuning_hz", path, 0.0);
    if (s.drive_detuning == 0.0 && s.drive_amplitude != 0.0) {
      rd.fail(path + ".drive_detuning_hz", "must be nonzero when drive_amplitude_hz is nonzero");
    }
    if (q.contains("t1_s") && !q.at("t1_s").is_null()) {
      s.t1 = rd.number_or(q, "t1_s", path, kInf);
      if (!(s.t1 > 0.0)) rd.fail(path + ".t1_s", "must be > 0");
    }
    cfg.qubits.push_back(s);
  }
  if (cfg.qubits.size() < 2) rd.fail("qubits", "at least two qubits are required");
}

TransmissionModel parse_transmission(Reader& rd, const json& t, const std::string& path) {
  rd.allow_keys(t, path, {"model", "t0_re", "t0_im", "length_m", "waist_m", "samples"});
  const std::string model = rd.text(t, "model", path, "uniform");
  const cplx t0(rd.number_or(t, "t0_re", path, 1.0), rd.number_or(t, "t0_im", path, 0.0));
  if (std::abs(t0) > 1.0 + 1e-15) rd.fail(path + ".t0_re", "|T0| must not exceed 1");
  if (model == "uniform") return UniformTransmission{t0};
  if (model == "exponential") {
    const double len = rd.required(t, "length_m", path);
    if (!(len > 0.0)) rd.fail(path + ".length_m", "must be > 0");
    return ExponentialTransmission{t0, len};
  }
  if (model == "gaussian") {
    const double w = rd.required(t, "waist_m", path);
    if (!(w > 0.0)) rd.fail(path + ".waist_m", "must be > 0");
    return GaussianTransmission{t0, w};
  }
  if (model == "tabulated") {
    TabulatedTransmission tab;
    if (!t.contains("samples") || !t.at("samples").is_array()) {
      rd.fail(path + ".samples", "required array of [k_dot_r, re, im] is missing");
      return tab;
    }
    const json& s = t.at("samples");
    for (std::size_t k = 0; k < s.size(); ++k) {
      const std::string sp = path + ".samples[" + std::to_string(k) + "]";
      if (!s[k].is_array() || s[k].size() != 3 ||
          !std::all_of(s[k].begin(), s[k].end(), [](const json& e) { return e.is_number(); })) {
        rd.fail(sp, "must be [k_dot_r, re, im]");
        continue;
      }
      const cplx v(s[k][1].get<double>(), s[k][2].get<double>());
      if (std::abs(v) > 1.0 + 1e-15) rd.fail(sp, "|T| must not exceed 1");
      if (!tab.samples.empty() && !(s[k][0].get<double>() > tab.samples.back().first)) {
        rd.fail(sp, "abscissae must be strictly increasing");
      }
      tab.samples.emplace_back(s[k][0].get<double>(), v);
    }
    if (tab.samples.size() < 2) rd.fail(path + ".samples", "need at least two samples");
    return tab;
  }
  rd.fail(path + ".model", "unknown model '" + model +
                               "' (expected uniform, exponential, gaussian or tabulated)");
  return UniformTransmission{t0};
}

void parse_metasurface(Reader& rd, const json& root, RunConfig& cfg) {
  const std::string path = "metasurface";
  if (!root.contains(path)) {
    rd.fail(path, "required section is missing");
    return;
  }
  const json& ms = rd.section(root, path, "");
  rd.allow_keys(ms, path, {"drive_reference_hz", "isolation_db", "modes", "transmission", "envelope"});
  auto& out = cfg.metasurface;
  out.drive_reference = kTwoPi * rd.required(ms, "drive_reference_hz", path);
  out.isolation_db = rd.number_or(ms, "isolation_db", path, 23.0);
  if (out.isolation_db < 0.0) rd.fail(path + ".isolation_db", "must be >= 0");

  if (!ms.contains("modes") || !ms.at("modes").is_array() || ms.at("modes").empty()) {
    rd.fail(path + ".modes", "required non-empty array is missing");
  } else {
    std::set<int> seen;
    const json& arr = ms.at("modes");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string mp = path + ".modes[" + std::to_string(k) + "]";
      const json& m = arr[k];
      if (!m.is_object()) {
        rd.fail(mp, "must be an object");
        continue;
      }
      rd.allow_keys(m, mp,
                    {"index", "freq_hz", "wavevector_rad_per_m", "loss_rate_per_s", "truncation",
                     "spectator"});
      ModeSpec s;
      s.index = static_cast<int>(rd.count(m, "index", mp, k));
      if (!seen.insert(s.index).second) rd.fail(mp + ".index", "duplicate mode index");
      s.frequency = kTwoPi * rd.required(m, "freq_hz", mp);
      if (s.frequency == out.drive_reference) {
        rd.fail(mp + ".freq_hz", "mode detuning from drive_reference_hz must be nonzero");
      }
      s.wavevector = rd.vec3(m, "wavevector_rad_per_m", mp);
      s.loss_rate = rd.number_or(m, "loss_rate_per_s", mp, 0.0);
      if (s.loss_rate < 0.0) rd.fail(mp + ".loss_rate_per_s", "must be >= 0");
      s.truncation = rd.count(m, "truncation", mp, 6);
      if (s.truncation < 2) rd.fail(mp + ".truncation", "must be >= 2");
      s.spectator = rd.flag(m, "spectator", mp, false);
      out.modes.push_back(s);
    }
  }
  out.transmission = parse_transmission(rd, rd.section(ms, "transmission", path), path + ".transmission");

  const std::string ep = path + ".envelope";
  const json& e = rd.section(ms, "envelope", path);
  rd.allow_keys(e, ep, {"shape", "amplitude", "duration_s", "k_m_rad_per_m"});
  const std::string shape = rd.text(e, "shape", ep, "square");
  if (shape == "square") {
    out.envelope.shape = EnvelopeShape::Square;
  } else if (shape == "raised_cosine") {
    out.envelope.shape = EnvelopeShape::RaisedCosine;
  } else {
    rd.fail(ep + ".shape", "unknown shape '" + shape + "' (expected square or raised_cosine)");
  }
  out.envelope.amplitude = rd.number_or(e, "amplitude", ep, 1.0);
  if (!(out.envelope.amplitude >= 0.0 && out.envelope.amplitude <= 1.0)) {
    rd.fail(ep + ".amplitude", "must lie in [0, 1]");
  }
  out.envelope.duration = rd.number_or(e, "duration_s", ep, 1e-6);
  if (!(out.envelope.duration > 0.0)) rd.fail(ep + ".duration_s", "must be > 0");
  out.envelope.k_m = rd.number_or(e, "k_m_rad_per_m", ep, 0.0);
}

void parse_rest(Reader& rd, const json& root, RunConfig& cfg) {
  {
    const std::string p = "evolution";
    const json& e = rd.section(root, p, "");
    rd.allow_keys(e, p,
                  {"dt_initial_s", "tolerance", "max_step_halvings", "truncation_check",
                   "dimension_cap"});
    auto& s = cfg.evolution;
    s.dt_initial = rd.number_or(e, "dt_initial_s", p, s.dt_initial);
    if (!(s.dt_initial > 0.0)) rd.fail(p + ".dt_initial_s", "must be > 0");
    s.tolerance = rd.number_or(e, "tolerance", p, s.tolerance);
    if (!(s.tolerance > 0.0)) rd.fail(p + ".tolerance", "must be > 0");
    s.max_step_halvings = static_cast<int>(rd.count(e, "max_step_halvings", p, 12));
    s.truncation_check = rd.flag(e, "truncation_check", p, true);
    cfg.dimension_cap = rd.count(e, "dimension_cap", p, kDefaultDimensionCap);
    if (cfg.dimension_cap == 0) rd.fail(p + ".dimension_cap", "must be > 0");
  }
  {
    const std::string p = "conventions";
    const json& c = rd.section(root, p, "");
    rd.allow_keys(c, p, {"coupling", "normalization_freq_hz", "phase_condition"});
    const std::string coupling = rd.text(c, "coupling", p, "dispersive_normalized");
    if (coupling == "dispersive_normalized") {
      cfg.coupling.variant = CouplingConvention::Variant::DispersiveNormalized;
    } else if (coupling == "literal") {
      cfg.coupling.variant = CouplingConvention::Variant::Literal;
    } else {
      rd.fail(p + ".coupling", "unknown convention '" + coupling +
                                   "' (expected dispersive_normalized or literal)");
    }
    cfg.coupling.normalization_frequency = kTwoPi * rd.number_or(c, "normalization_freq_hz", p, 0.0);
    if (cfg.coupling.normalization_frequency < 0.0) {
      rd.fail(p + ".normalization_freq_hz", "must be >= 0");
    }
    const std::string phase = rd.text(c, "phase_condition", p, "cross_term");
    if (phase == "cross_term") {
      cfg.phase_mode = PhaseConditionMode::CrossTerm;
    } else if (phase == "as_written") {
      cfg.phase_mode = PhaseConditionMode::AsWritten;
    } else {
      rd.fail(p + ".phase_condition", "unknown mode '" + phase + "' (expected cross_term or as_written)");
    }
  }
  {
    const std::string p = "gate";
    const json& g = rd.section(root, p, "");
    rd.allow_keys(g, p, {"pair", "snap_closed_loop", "dissipation", "include_dispersive"});
    if (g.contains("pair")) {
      const json& pr = g.at("pair");
      if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_unsigned() ||
          !pr[1].is_number_unsigned()) {
        rd.fail(p + ".pair", "must be two non-negative qubit positions");
      } else {
        cfg.pair = {pr[0].get<std::size_t>(), pr[1].get<std::size_t>()};
      }
    }
    if (cfg.pair.first == cfg.pair.second || cfg.pair.first >= cfg.qubits.size() ||
        cfg.pair.second >= cfg.qubits.size()) {
      rd.fail(p + ".pair", "must name two distinct qubits of the qubits array");
    }
    cfg.snap_closed_loop = rd.flag(g, "snap_closed_loop", p, false);
    cfg.dissipation = rd.flag(g, "dissipation", p, true);
    cfg.include_dispersive = rd.flag(g, "include_dispersive", p, true);
  }
  {
    const std::string p = "exchange";
    const json& x = rd.section(root, p, "");
    rd.allow_keys(x, p, {"t_max_s", "points"});
    cfg.exchange.t_max = rd.number_or(x, "t_max_s", p, cfg.exchange.t_max);
    if (!(cfg.exchange.t_max > 0.0)) rd.fail(p + ".t_max_s", "must be > 0");
    cfg.exchange.points = rd.count(x, "points", p, cfg.exchange.points);
    if (cfg.exchange.points < 2) rd.fail(p + ".points", "must be >= 2");
  }
  {
    const std::string p = "sweep";
    const json& s = rd.section(root, p, "");
    rd.allow_keys(s, p, {"d_min_m", "d_max_m", "points", "threads"});
    cfg.sweep.d_min = rd.number_or(s, "d_min_m", p, cfg.sweep.d_min);
    cfg.sweep.d_max = rd.number_or(s, "d_max_m", p, cfg.sweep.d_max);
    if (!(cfg.sweep.d_min >= 0.0)) rd.fail(p + ".d_min_m", "must be >= 0");
    if (!(cfg.sweep.d_max > cfg.sweep.d_min)) rd.fail(p + ".d_max_m", "must exceed d_min_m");
    cfg.sweep.points = rd.count(s, "points", p, cfg.sweep.points);
    if (cfg.sweep.points < 2) rd.fail(p + ".points", "must be >= 2");
    cfg.sweep.threads = rd.count(s, "threads", p, 0);
  }
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

bool close(double a, double b, double tol) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

bool close(const Vec3& a, const Vec3& b, double tol) {
  return close(a.x(), b.x(), tol) && close(a.y(), b.y(), tol) && close(a.z(), b.z(), tol);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

SystemLayout RunConfig::layout() const { return SystemLayout(qubits, metasurface, dimension_cap); }

GateOptions RunConfig::gate_options() const {
  GateOptions o;
  o.convention = coupling;
  o.phase_mode = phase_mode;
  o.snap_closed_loop = snap_closed_loop;
  o.dissipation = dissipation;
  o.include_dispersive = include_dispersive;
  return o;
}

ExperimentSetup RunConfig::setup() const { return {layout(), pair, evolution, gate_options()}; }

RunConfig parse_config_text(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("<document>: malformed JSON: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigError({"<document>: top level must be an object"});

  Reader rd;
  rd.allow_keys(root, "",
                {"qubits", "metasurface", "evolution", "conventions", "gate", "exchange", "sweep"});
  RunConfig cfg;
  parse_qubits(rd, root, cfg);
  parse_metasurface(rd, root, cfg);
  parse_rest(rd, root, cfg);
  if (!rd.errors.empty()) throw ConfigError(rd.errors);

  std::size_t dim = std::size_t{1} << cfg.qubits.size();
  for (const auto& m : cfg.metasurface.modes) dim *= m.truncation;
  if (dim > cfg.dimension_cap) {
    throw ConfigError({"evolution.dimension_cap: Hilbert dimension " + std::to_string(dim) +
                       " exceeds the cap " + std::to_string(cfg.dimension_cap)});
  }
  try {
    (void)cfg.layout();
  } catch (const std::exception& e) {
    throw ConfigError({std::string("<layout>: ") + e.what()});
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError({path.string() + ": cannot open config file"});
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  json root;
  json qubits = json::array();
  for (const auto& q : cfg.qubits) {
    json j{{"index", q.index},
           {"freq_hz", q.frequency / kTwoPi},
           {"position_m", vec_json(q.position)},
           {"bare_coupling_hz", q.bare_coupling / kTwoPi},
           {"drive_amplitude_hz", q.drive_amplitude / kTwoPi},
           {"drive_detuning_hz", q.drive_detuning / kTwoPi}};
    j["t1_s"] = std::isfinite(q.t1) ? json(q.t1) : json(nullptr);
    qubits.push_back(j);
  }
  root["qubits"] = qubits;

  const auto& ms = cfg.metasurface;
  json modes = json::array();
  for (const auto& m : ms.modes) {
    modes.push_back({{"index", m.index},
                     {"freq_hz", m.frequency / kTwoPi},
                     {"wavevector_rad_per_m", vec_json(m.wavevector)},
                     {"loss_rate_per_s", m.loss_rate},
                     {"truncation", m.truncation},
                     {"spectator", m.spectator}});
  }
  json t = std::visit(
      [](const auto& model) -> json {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, TabulatedTransmission>) {
          json s = json::array();
          for (const auto& [x, v] : model.samples) s.push_back({x, v.real(), v.imag()});
          return {{"model", "tabulated"}, {"samples", s}};
        } else {
          json j{{"t0_re", model.t0.real()}, {"t0_im", model.t0.imag()}};
          if constexpr (std::is_same_v<T, UniformTransmission>) j["model"] = "uniform";
          if constexpr (std::is_same_v<T, ExponentialTransmission>) {
            j["model"] = "exponential";
            j["length_m"] = model.length;
          }
          if constexpr (std::is_same_v<T, GaussianTransmission>) {
            j["model"] = "gaussian";
            j["waist_m"] = model.waist;
          }
          return j;
        }
      },
      ms.transmission);
  root["metasurface"] = {
      {"drive_reference_hz", ms.drive_reference / kTwoPi},
      {"isolation_db", ms.isolation_db},
      {"modes", modes},
      {"transmission", t},
      {"envelope",
       {{"shape", ms.envelope.shape == EnvelopeShape::Square ? "square" : "raised_cosine"},
        {"amplitude", ms.envelope.amplitude},
        {"duration_s", ms.envelope.duration},
        {"k_m_rad_per_m", ms.envelope.k_m}}}};
  root["evolution"] = {{"dt_initial_s", cfg.evolution.dt_initial},
                       {"tolerance", cfg.evolution.tolerance},
                       {"max_step_halvings", cfg.evolution.max_step_halvings},
                       {"truncation_check", cfg.evolution.truncation_check},
                       {"dimension_cap", cfg.dimension_cap}};
  root["conventions"] = {{"coupling", std::string(to_string(cfg.coupling.variant))},
                         {"normalization_freq_hz", cfg.coupling.normalization_frequency / kTwoPi},
                         {"phase_condition", std::string(to_string(cfg.phase_mode))}};
  root["gate"] = {{"pair", {cfg.pair.first, cfg.pair.second}},
                  {"snap_closed_loop", cfg.snap_closed_loop},
                  {"dissipation", cfg.dissipation},
                  {"include_dispersive", cfg.include_dispersive}};
  root["exchange"] = {{"t_max_s", cfg.exchange.t_max}, {"points", cfg.exchange.points}};
  root["sweep"] = {{"d_min_m", cfg.sweep.d_min},
                   {"d_max_m", cfg.sweep.d_max},
                   {"points", cfg.sweep.points},
                   {"threads", cfg.sweep.threads}};
  return root.dump(2) + "\n";
}

bool equivalent(const RunConfig& a, const RunConfig& b, double tol) {
  if (a.qubits.size() != b.qubits.size()) return false;
  for (std::size_t k = 0; k < a.qubits.size(); ++k) {
    const auto& x = a.qubits[k];
    const auto& y = b.qubits[k];
    if (!(x.index == y.index && close(x.frequency, y.frequency, tol) &&
          close(x.position, y.position, tol) && close(x.bare_coupling, y.bare_coupling, tol) &&
          close(x.drive_amplitude, y.drive_amplitude, tol) &&
          close(x.drive_detuning, y.drive_detuning, tol) && close(x.t1, y.t1, tol))) {
      return false;
    }
  }
  const auto& ma = a.metasurface;
  const auto& mb = b.metasurface;
  if (ma.modes.size() != mb.modes.size()) return false;
  for (std::size_t k = 0; k < ma.modes.size(); ++k) {
    const auto& x = ma.modes[k];
    const auto& y = mb.modes[k];
    if (!(x.index == y.index && close(x.frequency, y.frequency, tol) &&
          close(x.wavevector, y.wavevector, tol) && close(x.loss_rate, y.loss_rate, tol) &&
          x.truncation == y.truncation && x.spectator == y.spectator &&
          x.coupling_scale == y.coupling_scale)) {
      return false;
    }
  }
  const auto ea = ma.envelope;
  const auto eb = mb.envelope;
  const bool nonfreq_equal =
      ma.transmission == mb.transmission && ea == eb && ma.isolation_db == mb.isolation_db &&
      a.evolution == b.evolution && a.dimension_cap == b.dimension_cap &&
      a.coupling.variant == b.coupling.variant && a.phase_mode == b.phase_mode &&
      a.pair == b.pair && a.snap_closed_loop == b.snap_closed_loop &&
      a.dissipation == b.dissipation && a.include_dispersive == b.include_dispersive &&
      a.exchange == b.exchange && a.sweep == b.sweep;
  return nonfreq_equal && close(ma.drive_reference, mb.drive_reference, tol) &&
         close(a.coupling.normalization_frequency, b.coupling.normalization_frequency, tol);
}

}  // namespace metagate
