#include "ves/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ves {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& ctx) {
  if (!obj.is_object()) throw std::runtime_error("config: " + ctx + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw std::runtime_error("config: unknown key '" + key + "' in " + ctx);
}

template <typename T>
void maybe(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

BinSpec parse_bin(const json& j, std::size_t index) {
  const std::string ctx = "ensemble.bins[" + std::to_string(index) + "]";
  require_keys(j, {"label", "kind", "c1_kw", "c2_kw", "c3_kwh", "c4", "delta_s", "T_h", "eps1",
                   "eps2", "eps3", "eps4", "pole_per_h", "gain", "count"},
               ctx);
  BinSpec bin;
  bin.label = j.value("label", "bin" + std::to_string(index));
  bin.qos.c1 = j.at("c1_kw").get<double>();
  bin.qos.c2 = j.at("c2_kw").get<double>();
  bin.qos.c3 = j.at("c3_kwh").get<double>();
  bin.qos.c4 = j.at("c4").get<double>();
  bin.qos.delta = j.at("delta_s").get<double>() / 3600.0;
  bin.qos.horizon_T = j.at("T_h").get<double>();
  bin.qos.eps = {j.at("eps1").get<double>(), j.at("eps2").get<double>(),
                 j.at("eps3").get<double>(), j.at("eps4").get<double>()};
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "thermal")
    bin.dyn.kind = LoadKind::thermal;
  else if (kind == "battery")
    bin.dyn.kind = LoadKind::battery;
  else
    throw std::runtime_error("config: " + ctx + ".kind must be 'thermal' or 'battery'");
  bin.dyn.pole = j.at("pole_per_h").get<double>();
  bin.dyn.gain = j.at("gain").get<double>();
  bin.count = j.at("count").get<int>();
  bin.validate();
  return bin;
}

}  // namespace

RunConfig default_config() {
  RunConfig cfg;
  BinSpec large;
  large.label = "large_building";
  large.qos.c1 = 40.0;
  large.qos.c2 = 8.0;
  large.qos.c3 = 5.0;
  large.qos.c4 = 1.11;
  large.qos.delta = 10.0 / 3600.0;
  large.qos.horizon_T = 24.0;
  large.qos.eps = {0.05, 0.05, 0.05, 0.05};
  large.dyn = {LoadKind::thermal, 177.6, 0.0450};
  large.count = 15000;
  cfg.ensemble.bins.push_back(large);
  return cfg;
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
  }

  require_keys(j, {"seed", "out_dir", "data", "welch", "arma", "passband", "grid", "ensemble",
                   "solver", "montecarlo", "sweep"},
               "top level");

  RunConfig cfg = default_config();
  maybe(j, "seed", cfg.seed);
  maybe(j, "out_dir", cfg.out_dir);

  if (j.contains("data")) {
    const json& d = j.at("data");
    require_keys(d, {"csv", "fill", "synthetic"}, "data");
    if (d.contains("csv")) cfg.csv_path = d.at("csv").get<std::string>();
    if (d.contains("fill")) {
      const std::string fill = d.at("fill").get<std::string>();
      if (fill == "linear")
        cfg.fill_linear = true;
      else if (fill != "none")
        throw std::runtime_error("config: data.fill must be 'none' or 'linear'");
    }
    if (d.contains("synthetic")) {
      const json& s = d.at("synthetic");
      require_keys(s, {"n_samples", "dt_h", "ar", "ma", "sigma2", "scale_kw"}, "data.synthetic");
      maybe(s, "n_samples", cfg.synthetic.n_samples);
      maybe(s, "dt_h", cfg.synthetic.dt_h);
      maybe(s, "ar", cfg.synthetic.ar);
      maybe(s, "ma", cfg.synthetic.ma);
      maybe(s, "sigma2", cfg.synthetic.sigma2);
      maybe(s, "scale_kw", cfg.synthetic.scale_kw);
    }
  }

  if (j.contains("welch")) {
    const json& w = j.at("welch");
    require_keys(w, {"segment_length", "overlap"}, "welch");
    maybe(w, "segment_length", cfg.welch.segment_length);
    maybe(w, "overlap", cfg.welch.overlap);
  }

  if (j.contains("arma")) {
    const json& a = j.at("arma");
    require_keys(a, {"p", "q", "starts"}, "arma");
    maybe(a, "p", cfg.arma.p);
    maybe(a, "q", cfg.arma.q);
    maybe(a, "starts", cfg.arma.starts);
  }

  if (j.contains("passband")) {
    const json& b = j.at("passband");
    require_keys(b, {"lo_rad_per_h", "hi_rad_per_h", "order"}, "passband");
    maybe(b, "lo_rad_per_h", cfg.passband.lo);
    maybe(b, "hi_rad_per_h", cfg.passband.hi);
    maybe(b, "order", cfg.passband.order);
    cfg.passband.validate();
  }

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    require_keys(g, {"points", "omega_max", "split"}, "grid");
    maybe(g, "points", cfg.grid.points);
    maybe(g, "omega_max", cfg.grid.omega_max);
    maybe(g, "split", cfg.grid.split);
  }

  if (j.contains("ensemble")) {
    const json& e = j.at("ensemble");
    require_keys(e, {"bins"}, "ensemble");
    if (!e.contains("bins") || !e.at("bins").is_array() || e.at("bins").empty())
      throw std::runtime_error("config: ensemble.bins must be a non-empty array");
    cfg.ensemble.bins.clear();
    for (std::size_t i = 0; i < e.at("bins").size(); ++i)
      cfg.ensemble.bins.push_back(parse_bin(e.at("bins")[i], i));
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    require_keys(s, {"tol", "max_iter", "log_every"}, "solver");
    maybe(s, "tol", cfg.solver.tol);
    maybe(s, "max_iter", cfg.solver.max_iter);
    maybe(s, "log_every", cfg.solver.log_every);
  }

  if (j.contains("montecarlo")) {
    const json& m = j.at("montecarlo");
    require_keys(m, {"paths", "n_samples", "dt_h"}, "montecarlo");
    maybe(m, "paths", cfg.montecarlo.paths);
    maybe(m, "n_samples", cfg.montecarlo.n_samples);
    maybe(m, "dt_h", cfg.montecarlo.dt_h);
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    require_keys(s, {"counts"}, "sweep");
    maybe(s, "counts", cfg.sweep_counts);
  }

  cfg.ensemble.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace ves
