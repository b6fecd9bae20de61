#include "mfns/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mfns/errors.hpp"

namespace mfns {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail("'" + where + "' must be a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      fail("unknown field '" + item.key() + "' in '" + where + "'");
    }
  }
}

const json& require(const json& obj, const std::string& where, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail("missing field '" + key + "' in '" + where + "'");
  return *it;
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
  const json& v = require(obj, where, key);
  if (!v.is_number()) fail("field '" + key + "' in '" + where + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail("field '" + key + "' in '" + where + "' must be finite");
  return x;
}

double get_number_or(const json& obj, const std::string& where, const std::string& key,
                     double fallback) {
  if (!obj.contains(key)) return fallback;
  return get_number(obj, where, key);
}

long get_integer(const json& obj, const std::string& where, const std::string& key) {
  const json& v = require(obj, where, key);
  if (!v.is_number_integer()) {
    fail("field '" + key + "' in '" + where + "' must be an integer");
  }
  return v.get<long>();
}

long get_integer_or(const json& obj, const std::string& where, const std::string& key,
                    long fallback) {
  if (!obj.contains(key)) return fallback;
  return get_integer(obj, where, key);
}

std::string get_string(const json& obj, const std::string& where, const std::string& key) {
  const json& v = require(obj, where, key);
  if (!v.is_string()) fail("field '" + key + "' in '" + where + "' must be a string");
  return v.get<std::string>();
}

Profile parse_profile(const json& obj, const std::string& where) {
  if (!obj.is_object()) fail("'" + where + "' must be a profile object");
  const std::string type = get_string(obj, where, "type");
  if (type == "constant") {
    check_keys(obj, where, {"type", "value"});
    return Profile::constant(get_number(obj, where, "value"));
  }
  if (type == "sine" || type == "cosine") {
    check_keys(obj, where, {"type", "mean", "amplitude", "mode", "phase"});
    const double mean = get_number(obj, where, "mean");
    const double amplitude = get_number(obj, where, "amplitude");
    const int mode = static_cast<int>(get_integer_or(obj, where, "mode", 1));
    const double phase = get_number_or(obj, where, "phase", 0.0);
    return type == "sine" ? Profile::sine(mean, amplitude, mode, phase)
                          : Profile::cosine(mean, amplitude, mode, phase);
  }
  if (type == "step") {
    check_keys(obj, where, {"type", "left", "right", "split"});
    const double split = get_number_or(obj, where, "split", 0.5);
    if (!(split > 0.0) || !(split < 1.0)) {
      fail("field 'split' in '" + where + "' must lie in (0, 1)");
    }
    return Profile::step(get_number(obj, where, "left"), get_number(obj, where, "right"),
                         split);
  }
  fail("field 'type' in '" + where + "' must be constant|sine|cosine|step, got '" + type + "'");
}

std::vector<Profile> parse_profile_array(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.empty()) {
    fail("'" + where + "' must be a non-empty array of profiles");
  }
  std::vector<Profile> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(parse_profile(arr[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

LawsSelection parse_laws(const json& obj) {
  check_keys(obj, "laws", {"pressure", "viscosity", "mu0", "mode"});
  LawsSelection sel;

  const json& p = require(obj, "laws", "pressure");
  sel.pressure_type = get_string(p, "laws.pressure", "type");
  if (sel.pressure_type != "powerlaw_pressure") {
    fail("laws.pressure.type must be 'powerlaw_pressure', got '" + sel.pressure_type + "'");
  }
  check_keys(p, "laws.pressure", {"type", "a", "gamma"});
  sel.a = get_number(p, "laws.pressure", "a");
  sel.gamma = get_number(p, "laws.pressure", "gamma");

  const json& v = require(obj, "laws", "viscosity");
  sel.viscosity_type = get_string(v, "laws.viscosity", "type");
  if (sel.viscosity_type == "powerlaw_viscosity") {
    check_keys(v, "laws.viscosity", {"type", "c", "d"});
    sel.c = get_number(v, "laws.viscosity", "c");
    sel.d = get_number(v, "laws.viscosity", "d");
  } else if (sel.viscosity_type == "linear_viscosity") {
    check_keys(v, "laws.viscosity", {"type", "c"});
    sel.c = get_number(v, "laws.viscosity", "c");
    sel.d = 0.0;
  } else {
    fail("laws.viscosity.type must be powerlaw_viscosity|linear_viscosity, got '" +
         sel.viscosity_type + "'");
  }

  sel.mu0 = get_number_or(obj, "laws", "mu0", -1.0);
  const std::string mode = obj.contains("mode") ? get_string(obj, "laws", "mode") : "strict";
  if (mode == "strict") {
    sel.mode = LawMode::strict;
  } else if (mode == "relaxed") {
    sel.mode = LawMode::relaxed;
  } else {
    fail("laws.mode must be strict|relaxed, got '" + mode + "'");
  }
  if (sel.viscosity_type == "linear_viscosity" && sel.mode == LawMode::strict) {
    fail("laws.viscosity 'linear_viscosity' is admissible in relaxed mode only");
  }
  return sel;
}

}  // namespace

ConstitutiveLaws LawsSelection::build() const {
  if (viscosity_type == "linear_viscosity") {
    return make_laws(PowerlawPressure{a, gamma}, LinearViscosity{c});
  }
  return make_laws(PowerlawPressure{a, gamma}, PowerlawViscosity{c, d}, mode, mu0);
}

RunConfig parse_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    fail(std::string("config is not valid JSON: ") + err.what());
  }
  check_keys(root, "config",
             {"laws", "grid", "T", "cfl", "dt_max", "output_every", "output_dir", "seed",
              "threads", "initial", "homog", "equiv"});

  RunConfig cfg;
  cfg.laws = parse_laws(require(root, "config", "laws"));

  const json& grid = require(root, "config", "grid");
  check_keys(grid, "grid", {"L", "N"});
  cfg.grid.L = get_number(grid, "grid", "L");
  cfg.grid.N = static_cast<int>(get_integer(grid, "grid", "N"));
  if (!(cfg.grid.L > 0.0)) fail("field 'L' in 'grid' must be positive");
  if (cfg.grid.N < 4) fail("field 'N' in 'grid' must be >= 4");

  cfg.T = get_number_or(root, "config", "T", 0.0);
  if (!(cfg.T >= 0.0)) fail("field 'T' must be >= 0");
  cfg.cfl = get_number_or(root, "config", "cfl", 0.5);
  if (!(cfg.cfl > 0.0) || cfg.cfl > 1.0) fail("field 'cfl' must lie in (0, 1]");
  cfg.dt_max = get_number_or(root, "config", "dt_max", 1.0);
  if (!(cfg.dt_max > 0.0)) fail("field 'dt_max' must be positive");
  cfg.output_every = static_cast<int>(get_integer_or(root, "config", "output_every", 1));
  if (cfg.output_every < 1) fail("field 'output_every' must be >= 1");
  if (root.contains("output_dir")) {
    cfg.output_dir = get_string(root, "config", "output_dir");
  }
  const long seed = get_integer_or(root, "config", "seed", 1);
  if (seed < 0) fail("field 'seed' must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  cfg.threads = static_cast<int>(get_integer_or(root, "config", "threads", 1));
  if (cfg.threads < 1) fail("field 'threads' must be >= 1");

  if (root.contains("initial")) {
    const json& init = root["initial"];
    if (!init.is_object()) fail("'initial' must be an object");
    if (init.contains("alpha")) {
      check_keys(init, "initial", {"alpha", "rho", "u"});
      MFInitial mf;
      mf.alpha = parse_profile_array(require(init, "initial", "alpha"), "initial.alpha");
      mf.rho = parse_profile_array(require(init, "initial", "rho"), "initial.rho");
      if (mf.alpha.size() != mf.rho.size()) {
        fail("'initial.alpha' and 'initial.rho' must have the same number of phases");
      }
      mf.u = parse_profile(require(init, "initial", "u"), "initial.u");
      cfg.mf_initial = std::move(mf);
    } else {
      check_keys(init, "initial", {"rho", "u"});
      NSInitial ns;
      ns.rho = parse_profile(require(init, "initial", "rho"), "initial.rho");
      ns.u = parse_profile(require(init, "initial", "u"), "initial.u");
      cfg.ns_initial = std::move(ns);
    }
  }

  if (root.contains("homog")) {
    const json& h = root["homog"];
    check_keys(h, "homog",
               {"alpha0", "rho0", "u0", "n_list", "cells_per_mode", "checkpoints", "C0",
                "assert"});
    HomogSection sec;
    sec.spec.alpha0 = parse_profile_array(require(h, "homog", "alpha0"), "homog.alpha0");
    sec.spec.rho0 = parse_profile_array(require(h, "homog", "rho0"), "homog.rho0");
    if (sec.spec.alpha0.size() != sec.spec.rho0.size()) {
      fail("'homog.alpha0' and 'homog.rho0' must have the same number of atoms");
    }
    sec.spec.u0 = parse_profile(require(h, "homog", "u0"), "homog.u0");
    sec.spec.C0 = get_number_or(h, "homog", "C0", 10.0);
    const json& nl = require(h, "homog", "n_list");
    if (!nl.is_array() || nl.empty()) fail("'homog.n_list' must be a non-empty array");
    for (const auto& v : nl) {
      if (!v.is_number_integer() || v.get<long>() < 1) {
        fail("'homog.n_list' entries must be positive integers");
      }
      sec.n_list.push_back(static_cast<int>(v.get<long>()));
    }
    sec.cells_per_mode = static_cast<int>(get_integer_or(h, "homog", "cells_per_mode", 32));
    if (sec.cells_per_mode < 8) fail("field 'cells_per_mode' in 'homog' must be >= 8");
    sec.checkpoints = static_cast<int>(get_integer_or(h, "homog", "checkpoints", 8));
    if (sec.checkpoints < 1) fail("field 'checkpoints' in 'homog' must be >= 1");
    if (h.contains("assert")) {
      if (!h["assert"].is_boolean()) fail("field 'assert' in 'homog' must be a boolean");
      sec.assert_mode = h["assert"].get<bool>();
    }
    cfg.homog = std::move(sec);
  }

  if (root.contains("equiv")) {
    const json& e = root["equiv"];
    check_keys(e, "equiv", {"samples", "serre_check"});
    EquivSection sec;
    sec.samples = get_integer_or(e, "equiv", "samples", 100000);
    if (sec.samples < 1) fail("field 'samples' in 'equiv' must be >= 1");
    if (e.contains("serre_check")) {
      if (!e["serre_check"].is_boolean()) {
        fail("field 'serre_check' in 'equiv' must be a boolean");
      }
      sec.serre_check = e["serre_check"].get<bool>();
    }
    cfg.equiv = std::move(sec);
  }

  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

namespace {

json profile_to_json(const Profile& p) {
  json out;
  switch (p.kind) {
    case Profile::Kind::constant:
      out["type"] = "constant";
      out["value"] = p.value;
      break;
    case Profile::Kind::sine:
    case Profile::Kind::cosine:
      out["type"] = p.kind == Profile::Kind::sine ? "sine" : "cosine";
      out["mean"] = p.mean;
      out["amplitude"] = p.amplitude;
      out["mode"] = p.mode;
      out["phase"] = p.phase;
      break;
    case Profile::Kind::step:
      out["type"] = "step";
      out["left"] = p.left;
      out["right"] = p.right;
      out["split"] = p.split;
      break;
  }
  return out;
}

}  // namespace

std::string config_to_json(const RunConfig& cfg) {
  json root;
  json laws;
  laws["pressure"] = {{"type", cfg.laws.pressure_type}, {"a", cfg.laws.a},
                      {"gamma", cfg.laws.gamma}};
  if (cfg.laws.viscosity_type == "linear_viscosity") {
    laws["viscosity"] = {{"type", cfg.laws.viscosity_type}, {"c", cfg.laws.c}};
  } else {
    laws["viscosity"] = {{"type", cfg.laws.viscosity_type}, {"c", cfg.laws.c},
                         {"d", cfg.laws.d}};
  }
  laws["mu0"] = cfg.laws.mu0;
  laws["mode"] = cfg.laws.mode == LawMode::strict ? "strict" : "relaxed";
  root["laws"] = laws;
  root["grid"] = {{"L", cfg.grid.L}, {"N", cfg.grid.N}};
  root["T"] = cfg.T;
  root["cfl"] = cfg.cfl;
  root["dt_max"] = cfg.dt_max;
  root["output_every"] = cfg.output_every;
  root["output_dir"] = cfg.output_dir;
  root["seed"] = cfg.seed;
  root["threads"] = cfg.threads;

  if (cfg.ns_initial) {
    root["initial"] = {{"rho", profile_to_json(cfg.ns_initial->rho)},
                       {"u", profile_to_json(cfg.ns_initial->u)}};
  }
  if (cfg.mf_initial) {
    json alpha = json::array(), rho = json::array();
    for (const auto& p : cfg.mf_initial->alpha) alpha.push_back(profile_to_json(p));
    for (const auto& p : cfg.mf_initial->rho) rho.push_back(profile_to_json(p));
    root["initial"] = {{"alpha", alpha}, {"rho", rho},
                       {"u", profile_to_json(cfg.mf_initial->u)}};
  }
  if (cfg.homog) {
    json alpha0 = json::array(), rho0 = json::array(), nl = json::array();
    for (const auto& p : cfg.homog->spec.alpha0) alpha0.push_back(profile_to_json(p));
    for (const auto& p : cfg.homog->spec.rho0) rho0.push_back(profile_to_json(p));
    for (int n : cfg.homog->n_list) nl.push_back(n);
    root["homog"] = {{"alpha0", alpha0},
                     {"rho0", rho0},
                     {"u0", profile_to_json(cfg.homog->spec.u0)},
                     {"C0", cfg.homog->spec.C0},
                     {"n_list", nl},
                     {"cells_per_mode", cfg.homog->cells_per_mode},
                     {"checkpoints", cfg.homog->checkpoints},
                     {"assert", cfg.homog->assert_mode}};
  }
  if (cfg.equiv) {
    root["equiv"] = {{"samples", cfg.equiv->samples},
                     {"serre_check", cfg.equiv->serre_check}};
  }
  return root.dump(2);
}

}  // namespace mfns
