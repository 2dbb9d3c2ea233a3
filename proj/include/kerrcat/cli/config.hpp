#pragma once
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "kerrcat/circuit/types.hpp"
#include "kerrcat/common.hpp"
#include "kerrcat/units.hpp"

// Run configuration: the file format speaks laboratory units (plain Hz for
// every frequency-like quantity, millikelvin for temperatures, turns for the
// flux bias); everything is converted to internal angular units on ingestion.

namespace kerrcat::cli {

using json = nlohmann::json;

struct BathChannelConfig {
  std::string name;
  std::string op;  // "snail_charge" or "buffer_charge"
  bool flat = false;
  double J0 = 0, T0 = 0;                // flat spectral density (angular, K)
  std::map<int, double> J_harm, T_harm; // per drive harmonic m*omega_d/2
};

struct BathConfig {
  double quasideg_threshold = khz(100.0);
  std::vector<BathChannelConfig> channels;
};

struct SweepGridConfig {
  double eps_min = 0, eps_max = 0, delta_eps = 0;  // angular
};

struct DriveConfig {
  int n_samples = 128;
  int oversample = 2;
  double tune_tol = khz(1.0);
  int tune_max_iter = 50;
};

struct OutputConfig {
  std::vector<std::string> observables;  // spectrum photons events gap tau tz tau_dyn
  int level_cut = 12;     // branches the dissipators act on
  int quasi_cols = 8;     // quasienergy columns exported per row
  int time_points = 48;   // trajectory samples for tz / tau_dyn
  double time_span_gaps = 5.0;  // trajectory horizon in units of 1/gap
  int phase_grid = 81;          // husimi grid per axis for tau_dyn
  double phase_margin = 3.0;    // grid halfwidth margin beyond the wells
};

struct ComputeConfig {
  int workers = 1;
  std::string checkpoint;
  bool resume = false;
};

struct RunConfig {
  circuit::CircuitSpec circuit;
  circuit::HilbertConfig hilbert;
  BathConfig bath;
  SweepGridConfig sweep;
  DriveConfig drive;
  OutputConfig outputs;
  ComputeConfig compute;
  std::string hash;  // canonical-form digest, set by parse_run_config
};

inline bool wants(const OutputConfig& o, const std::string& name) {
  for (const auto& s : o.observables)
    if (s == name) return true;
  return false;
}

inline bool wants_dissipative(const OutputConfig& o) {
  return wants(o, "gap") || wants(o, "tau") || wants(o, "tz") ||
         wants(o, "tau_dyn");
}

namespace detail {

// Field-by-field extraction that accumulates "path: problem" diagnostics
// instead of throwing on first contact.
struct Reader {
  std::vector<std::string>* errs;

  void fail(const std::string& path, const std::string& what) const {
    errs->push_back(path + ": " + what);
  }

  double num(const json& j, const std::string& path, const char* key,
             double fallback, bool required = false) const {
    if (!j.contains(key)) {
      if (required) fail(path + "." + key, "missing required field");
      return fallback;
    }
    if (!j[key].is_number()) {
      fail(path + "." + key, "expected a number");
      return fallback;
    }
    return j[key].get<double>();
  }

  int integer(const json& j, const std::string& path, const char* key,
              int fallback) const {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) {
      fail(path + "." + key, "expected an integer");
      return fallback;
    }
    return j[key].get<int>();
  }

  std::string str(const json& j, const std::string& path, const char* key,
                  const std::string& fallback, bool required = false) const {
    if (!j.contains(key)) {
      if (required) fail(path + "." + key, "missing required field");
      return fallback;
    }
    if (!j[key].is_string()) {
      fail(path + "." + key, "expected a string");
      return fallback;
    }
    return j[key].get<std::string>();
  }

  bool boolean(const json& j, const std::string& path, const char* key,
               bool fallback) const {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) {
      fail(path + "." + key, "expected a boolean");
      return fallback;
    }
    return j[key].get<bool>();
  }
};

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace detail

// Parse a configuration document.  Problems are reported as "path: what"
// strings; the returned config is only meaningful when errors is empty.
inline RunConfig parse_run_config(const json& doc,
                                  std::vector<std::string>& errors) {
  RunConfig cfg;
  detail::Reader rd{&errors};

  if (!doc.is_object()) {
    errors.push_back("config: expected a JSON object");
    return cfg;
  }

  // ------------------------------------------------------------- circuit --
  const json circ = doc.value("circuit", json::object());
  if (!doc.contains("circuit"))
    errors.push_back("circuit: missing required section");
  const std::string model = rd.str(circ, "circuit", "model", "single-mode");
  if (model == "single-mode")
    cfg.circuit.scenario = circuit::Scenario::single_mode;
  else if (model == "buffer")
    cfg.circuit.scenario = circuit::Scenario::buffer;
  else if (model == "array")
    cfg.circuit.scenario = circuit::Scenario::array_mode;
  else if (model == "inductance")
    cfg.circuit.scenario = circuit::Scenario::inductance;
  else
    rd.fail("circuit.model",
            "unknown model '" + model +
                "' (single-mode, buffer, array, inductance)");
  cfg.circuit.E_J = from_hz(rd.num(circ, "circuit", "E_J_hz", 0, true));
  cfg.circuit.E_C = from_hz(rd.num(circ, "circuit", "E_C_hz", 0, true));
  cfg.circuit.alpha = rd.num(circ, "circuit", "alpha", 0, true);
  cfg.circuit.phi_ext =
      two_pi * rd.num(circ, "circuit", "phi_ext_turns", 0, true);
  cfg.circuit.omega_b = from_hz(rd.num(circ, "circuit", "omega_b_hz", 0));
  cfg.circuit.g_b = from_hz(rd.num(circ, "circuit", "g_b_hz", 0));
  cfg.circuit.beta_ratio = rd.num(circ, "circuit", "beta_ratio", 0);
  cfg.circuit.g_a = from_hz(rd.num(circ, "circuit", "g_a_hz", 0));
  cfg.circuit.E_L = from_hz(rd.num(circ, "circuit", "E_L_hz", 0));
  cfg.circuit.omega_l = from_hz(rd.num(circ, "circuit", "omega_l_hz", 0));
  if (cfg.circuit.E_J <= 0) rd.fail("circuit.E_J_hz", "must be > 0");
  if (cfg.circuit.E_C <= 0) rd.fail("circuit.E_C_hz", "must be > 0");
  if (cfg.circuit.scenario == circuit::Scenario::buffer &&
      cfg.circuit.omega_b <= 0)
    rd.fail("circuit.omega_b_hz", "buffer model needs a positive frequency");
  if (cfg.circuit.scenario == circuit::Scenario::array_mode &&
      cfg.circuit.beta_ratio <= 0)
    rd.fail("circuit.beta_ratio", "array model needs a positive ratio");
  if (cfg.circuit.scenario == circuit::Scenario::inductance &&
      (cfg.circuit.E_L <= 0 || cfg.circuit.omega_l <= 0))
    rd.fail("circuit.E_L_hz/omega_l_hz",
            "inductance model needs positive loop parameters");

  // ------------------------------------------------------------- hilbert --
  const json hil = doc.value("hilbert", json::object());
  const std::string basis = rd.str(hil, "hilbert", "basis", "fock");
  if (basis == "fock")
    cfg.hilbert.basis = circuit::Basis::fock;
  else if (basis == "charge")
    cfg.hilbert.basis = circuit::Basis::charge;
  else
    rd.fail("hilbert.basis", "unknown basis '" + basis + "' (fock, charge)");
  cfg.hilbert.n_fock = rd.integer(hil, "hilbert", "n_fock", 120);
  cfg.hilbert.n_charge_max = rd.integer(hil, "hilbert", "n_charge_max", 400);
  cfg.hilbert.n_keep = rd.integer(hil, "hilbert", "n_keep", 48);
  cfg.hilbert.n_secondary = rd.integer(hil, "hilbert", "n_secondary", 1);
  cfg.hilbert.keep_secondary = rd.integer(hil, "hilbert", "keep_secondary", 1);
  cfg.hilbert.n_keep_total = rd.integer(hil, "hilbert", "n_keep_total", 0);
  if (cfg.hilbert.n_keep < 2) rd.fail("hilbert.n_keep", "must be >= 2");
  if (cfg.hilbert.n_fock < cfg.hilbert.n_keep)
    rd.fail("hilbert.n_fock", "must be >= n_keep");

  // ---------------------------------------------------------------- bath --
  const json bath = doc.value("bath", json::object());
  cfg.bath.quasideg_threshold =
      from_hz(rd.num(bath, "bath", "quasideg_threshold_hz", 100e3));
  if (cfg.bath.quasideg_threshold <= 0)
    rd.fail("bath.quasideg_threshold_hz", "must be > 0");
  const json chans = bath.value("channels", json::array());
  for (size_t c = 0; c < chans.size(); ++c) {
    const std::string path = "bath.channels[" + std::to_string(c) + "]";
    const json& jc = chans[c];
    if (!jc.is_object()) {
      errors.push_back(path + ": expected an object");
      continue;
    }
    BathChannelConfig ch;
    ch.name = rd.str(jc, path, "name", "channel" + std::to_string(c));
    ch.op = rd.str(jc, path, "op", "snail_charge");
    if (ch.op != "snail_charge" && ch.op != "buffer_charge")
      rd.fail(path + ".op", "unknown operator '" + ch.op +
                                "' (snail_charge, buffer_charge)");
    if (jc.contains("flat")) {
      ch.flat = true;
      const json& jf = jc["flat"];
      ch.J0 = from_hz(rd.num(jf, path + ".flat", "J_hz", 0, true));
      ch.T0 = 1e-3 * rd.num(jf, path + ".flat", "T_mK", 0, true);
      if (ch.J0 < 0) rd.fail(path + ".flat.J_hz", "must be >= 0");
      if (ch.T0 < 0) rd.fail(path + ".flat.T_mK", "must be >= 0");
    } else if (jc.contains("harmonics")) {
      const json& jh = jc["harmonics"];
      if (!jh.is_object() || jh.empty())
        rd.fail(path + ".harmonics", "expected a non-empty object");
      else
        for (auto it = jh.begin(); it != jh.end(); ++it) {
          const std::string hp = path + ".harmonics[" + it.key() + "]";
          int m = -1;
          try {
            m = std::stoi(it.key());
          } catch (...) {
          }
          if (m < 0) {
            errors.push_back(hp + ": key must be a harmonic index >= 0");
            continue;
          }
          const double J = rd.num(it.value(), hp, "J_hz", 0, true);
          const double T = rd.num(it.value(), hp, "T_mK", 0, true);
          if (J < 0) rd.fail(hp + ".J_hz", "must be >= 0");
          if (T < 0) rd.fail(hp + ".T_mK", "must be >= 0");
          ch.J_harm[m] = from_hz(J);
          ch.T_harm[m] = 1e-3 * T;
        }
    } else {
      rd.fail(path, "needs either a 'flat' or a 'harmonics' block");
    }
    cfg.bath.channels.push_back(std::move(ch));
  }

  // --------------------------------------------------------------- sweep --
  const json sw = doc.value("sweep", json::object());
  if (!doc.contains("sweep"))
    errors.push_back("sweep: missing required section");
  cfg.sweep.eps_min = from_hz(rd.num(sw, "sweep", "eps_min_hz", 0, true));
  cfg.sweep.eps_max = from_hz(rd.num(sw, "sweep", "eps_max_hz", 0, true));
  cfg.sweep.delta_eps = from_hz(rd.num(sw, "sweep", "delta_eps_hz", 25e6));
  if (cfg.sweep.eps_min < 0) rd.fail("sweep.eps_min_hz", "must be >= 0");
  if (cfg.sweep.eps_max < cfg.sweep.eps_min)
    rd.fail("sweep.eps_max_hz", "must be >= eps_min_hz");
  if (cfg.sweep.delta_eps <= 0) rd.fail("sweep.delta_eps_hz", "must be > 0");

  // --------------------------------------------------------------- drive --
  const json dr = doc.value("drive", json::object());
  cfg.drive.n_samples = rd.integer(dr, "drive", "n_samples", 128);
  cfg.drive.oversample = rd.integer(dr, "drive", "oversample", 2);
  cfg.drive.tune_tol = from_hz(rd.num(dr, "drive", "tune_tol_hz", 1e3));
  cfg.drive.tune_max_iter = rd.integer(dr, "drive", "tune_max_iter", 50);
  if (cfg.drive.n_samples < 16) rd.fail("drive.n_samples", "must be >= 16");
  if (cfg.drive.tune_tol <= 0) rd.fail("drive.tune_tol_hz", "must be > 0");

  // ------------------------------------------------------------- outputs --
  const json out = doc.value("outputs", json::object());
  if (out.contains("observables")) {
    if (!out["observables"].is_array())
      rd.fail("outputs.observables", "expected an array of names");
    else
      for (const auto& v : out["observables"]) {
        if (!v.is_string()) {
          rd.fail("outputs.observables", "entries must be strings");
          continue;
        }
        const std::string s = v.get<std::string>();
        if (s != "spectrum" && s != "photons" && s != "events" && s != "gap" &&
            s != "tau" && s != "tz" && s != "tau_dyn")
          rd.fail("outputs.observables",
                  "unknown observable '" + s +
                      "' (spectrum, photons, events, gap, tau, tz, tau_dyn)");
        else
          cfg.outputs.observables.push_back(s);
      }
  } else {
    cfg.outputs.observables = {"spectrum", "photons", "events"};
  }
  cfg.outputs.level_cut = rd.integer(out, "outputs", "level_cut", 12);
  cfg.outputs.quasi_cols = rd.integer(out, "outputs", "quasi_cols", 8);
  cfg.outputs.time_points = rd.integer(out, "outputs", "time_points", 48);
  cfg.outputs.time_span_gaps = rd.num(out, "outputs", "time_span_gaps", 5.0);
  cfg.outputs.phase_grid = rd.integer(out, "outputs", "phase_grid", 81);
  cfg.outputs.phase_margin = rd.num(out, "outputs", "phase_margin", 3.0);
  if (cfg.outputs.level_cut < 2) rd.fail("outputs.level_cut", "must be >= 2");
  if (cfg.outputs.level_cut > cfg.hilbert.n_keep &&
      cfg.hilbert.n_keep_total == 0 && cfg.hilbert.keep_secondary == 1)
    rd.fail("outputs.level_cut", "exceeds the retained level count");
  if (cfg.outputs.quasi_cols < 1) rd.fail("outputs.quasi_cols", "must be >= 1");
  if (cfg.outputs.time_points < 8 && (wants(cfg.outputs, "tz") ||
                                      wants(cfg.outputs, "tau_dyn")))
    rd.fail("outputs.time_points", "trajectory fits need >= 8 samples");
  if (wants_dissipative(cfg.outputs) && cfg.bath.channels.empty())
    rd.fail("bath.channels",
            "dissipative observables requested but no channel given");

  // ------------------------------------------------------------- compute --
  const json cmp = doc.value("compute", json::object());
  cfg.compute.workers = rd.integer(cmp, "compute", "workers", 1);
  cfg.compute.checkpoint = rd.str(cmp, "compute", "checkpoint", "");
  cfg.compute.resume = rd.boolean(cmp, "compute", "resume", false);
  if (cfg.compute.workers < 1) rd.fail("compute.workers", "must be >= 1");
  if (cfg.compute.resume && cfg.compute.checkpoint.empty())
    rd.fail("compute.resume", "resume requires a checkpoint path");

  // canonical digest: nlohmann objects iterate in sorted key order, so the
  // dump of the original document is already a stable canonical form
  cfg.hash = detail::fnv1a_hex(doc.dump());
  return cfg;
}

inline RunConfig parse_run_config_text(const std::string& text,
                                       std::vector<std::string>& errors) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    errors.push_back("config: not valid JSON");
    return RunConfig{};
  }
  return parse_run_config(doc, errors);
}

}  // namespace kerrcat::cli
