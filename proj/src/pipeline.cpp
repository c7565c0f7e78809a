#include "ves/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "ves/capacity.hpp"
#include "ves/csv_io.hpp"
#include "ves/ensemble.hpp"

namespace ves {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

std::size_t auto_segment_length(std::size_t n) {
  // about 8 Hann segments at 50% overlap
  std::size_t len = 16;
  while (len * 2 <= static_cast<std::size_t>(static_cast<double>(n) / 4.5)) len *= 2;
  return std::min(len, n);
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_out_dir(const RunConfig& cfg) { fs::create_directories(cfg.out_dir); }

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

void write_json(const RunConfig& cfg, const std::string& name, const json& doc) {
  const std::string path = out_path(cfg, name);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

json kkt_to_json(const KktResiduals& r) {
  return {{"stationarity", r.stationarity}, {"primal", r.primal}, {"dual", r.dual}};
}

json feasibility_to_json(const FeasibilityReport& rep) {
  json rows = json::array();
  for (const auto& m : rep.rows)
    rows.push_back({{"qos", qos_tag_name(m.tag)},
                    {"bin", m.bin_index},
                    {"value", m.value},
                    {"budget", m.budget},
                    {"margin", m.margin}});
  return {{"rows", rows}, {"feasible", rep.feasible}, {"nonnegative", rep.nonnegative}};
}

json solve_to_json(const ProjectionResult& res) {
  return {{"objective", res.objective},
          {"iterations", res.iterations},
          {"converged", res.converged},
          {"kkt", kkt_to_json(res.kkt)},
          {"duals", res.duals},
          {"feasibility", feasibility_to_json(res.feasibility)}};
}

json capacity_to_json(const CapacityReport& cap) {
  return {{"pow_kw", cap.pow_kw},           {"eng_kwh", cap.eng_kwh},
          {"zeta_p_percent", cap.zeta_p},   {"zeta_e_percent", cap.zeta_e},
          {"unused_pow_kw", cap.unused_pow_kw}, {"unused_eng_kwh", cap.unused_eng_kwh},
          {"eps_pow", cap.eps_pow},         {"eps_eng", cap.eps_eng}};
}

json violation_to_json(const ViolationReport& rep) {
  static const char* names[4] = {"power", "ramp", "energy", "storage"};
  json per = json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& v = rep.per_qos[i];
    per.push_back({{"qos", names[i]},
                   {"threshold", v.threshold},
                   {"eps", v.eps},
                   {"p_hat", v.p_hat},
                   {"trials", v.trials},
                   {"n_samples", v.n_samples}});
  }
  return {{"per_qos", per}, {"pass", rep.pass}};
}

// per-load equivalent of one bin's summed spectrum under the scale the solve used
SpectralDensity per_load_spectrum(const SpectralDensity& bin_sum, int scale) {
  SpectralDensity s = bin_sum;
  for (double& v : s.values) v /= static_cast<double>(scale);
  return s;
}

}  // namespace

EstimateStage run_estimate(const RunConfig& cfg) {
  EstimateStage st;
  if (cfg.csv_path) {
    st.series = read_demand_csv(*cfg.csv_path, cfg.fill_linear);
  } else {
    ArmaSpectrum gen;
    gen.ar = cfg.synthetic.ar;
    gen.ma = cfg.synthetic.ma;
    gen.sigma2 = cfg.synthetic.sigma2;
    gen.dt = cfg.synthetic.dt_h;
    gen.validate();
    st.series = simulate_arma(gen, cfg.synthetic.n_samples, cfg.seed, 0);
    for (double& v : st.series.samples) v *= cfg.synthetic.scale_kw;
    st.series.label = "synthetic";
  }

  double mean = 0.0;
  for (double v : st.series.samples) mean += v;
  mean /= static_cast<double>(st.series.samples.size());
  double var = 0.0;
  for (double v : st.series.samples) var += (v - mean) * (v - mean);
  if (!(var > 0.0)) throw std::runtime_error("degenerate series: zero variance");

  const std::size_t seg = cfg.welch.segment_length > 0 ? cfg.welch.segment_length
                                                       : auto_segment_length(st.series.samples.size());
  st.phi_nd = estimate_psd(st.series, seg, cfg.welch.overlap);
  st.fit = fit_arma_spectrum(st.phi_nd, cfg.arma.p, cfg.arma.q, cfg.arma.starts, cfg.seed);
  st.snd = evaluate_arma_psd(st.fit.model, cfg.make_grid());
  return st;
}

ProjectStage run_project(const RunConfig& cfg) {
  ProjectStage st;
  st.est = run_estimate(cfg);
  st.sba = bandpass_target(st.est.snd, cfg.passband);

  st.main = project(st.sba, cfg.ensemble, cfg.solver);
  if (cfg.ensemble.n_bin() > 1) st.bounds = solve_bounds(st.sba, cfg.ensemble, cfg.solver);

  const BinSpec& b0 = cfg.ensemble.bins[0];
  const double eps_pow = b0.qos.eps[0];
  const double eps_eng = b0.qos.eps[2];
  st.capacity.eps_pow = eps_pow;
  st.capacity.eps_eng = eps_eng;
  st.capacity.pow_kw = power_capacity(st.main.aggregate, eps_pow);
  st.capacity.eng_kwh = energy_capacity(st.main.aggregate, eps_eng, b0.qos.horizon_T);
  const auto [zp, ze] =
      capacity_indices(st.main.aggregate, st.sba, eps_pow, eps_eng, b0.qos.horizon_T);
  st.capacity.zeta_p = zp;
  st.capacity.zeta_e = ze;
  const int scale0 = cfg.ensemble.n_bin() * b0.count;
  const auto [up, ue] = unused_capacity(per_load_spectrum(st.main.per_bin[0], scale0), b0.qos);
  st.capacity.unused_pow_kw = up;
  st.capacity.unused_eng_kwh = ue;
  return st;
}

json config_to_json(const RunConfig& cfg) {
  json data = {{"fill", cfg.fill_linear ? "linear" : "none"},
               {"synthetic",
                {{"n_samples", cfg.synthetic.n_samples},
                 {"dt_h", cfg.synthetic.dt_h},
                 {"ar", cfg.synthetic.ar},
                 {"ma", cfg.synthetic.ma},
                 {"sigma2", cfg.synthetic.sigma2},
                 {"scale_kw", cfg.synthetic.scale_kw}}}};
  if (cfg.csv_path) data["csv"] = *cfg.csv_path;

  json bins = json::array();
  for (const auto& b : cfg.ensemble.bins)
    bins.push_back({{"label", b.label},
                    {"kind", b.dyn.kind == LoadKind::thermal ? "thermal" : "battery"},
                    {"c1_kw", b.qos.c1},
                    {"c2_kw", b.qos.c2},
                    {"c3_kwh", b.qos.c3},
                    {"c4", b.qos.c4},
                    {"delta_s", b.qos.delta * 3600.0},
                    {"T_h", b.qos.horizon_T},
                    {"eps1", b.qos.eps[0]},
                    {"eps2", b.qos.eps[1]},
                    {"eps3", b.qos.eps[2]},
                    {"eps4", b.qos.eps[3]},
                    {"pole_per_h", b.dyn.pole},
                    {"gain", b.dyn.gain},
                    {"count", b.count}});

  return {{"seed", cfg.seed},
          {"out_dir", cfg.out_dir},
          {"data", data},
          {"welch", {{"segment_length", cfg.welch.segment_length}, {"overlap", cfg.welch.overlap}}},
          {"arma", {{"p", cfg.arma.p}, {"q", cfg.arma.q}, {"starts", cfg.arma.starts}}},
          {"passband",
           {{"lo_rad_per_h", cfg.passband.lo},
            {"hi_rad_per_h", cfg.passband.hi},
            {"order", cfg.passband.order}}},
          {"grid",
           {{"points", cfg.grid.points},
            {"omega_max", cfg.grid.omega_max},
            {"split", cfg.grid.split}}},
          {"ensemble", {{"bins", bins}}},
          {"solver",
           {{"tol", cfg.solver.tol},
            {"max_iter", cfg.solver.max_iter},
            {"log_every", cfg.solver.log_every}}},
          {"montecarlo",
           {{"paths", cfg.montecarlo.paths},
            {"n_samples", cfg.montecarlo.n_samples},
            {"dt_h", cfg.montecarlo.dt_h}}},
          {"sweep", {{"counts", cfg.sweep_counts}}}};
}

json spectrum_to_json(const SpectralDensity& s) {
  return {{"omega_rad_per_h", s.grid.omegas}, {"value", s.values}};
}

namespace {

json estimate_fragment(const EstimateStage& st) {
  return {{"series",
           {{"label", st.series.label},
            {"n_samples", st.series.samples.size()},
            {"dt_h", st.series.dt},
            {"variance_kw2", [&] {
               double mean = 0.0;
               for (double v : st.series.samples) mean += v;
               mean /= static_cast<double>(st.series.samples.size());
               double var = 0.0;
               for (double v : st.series.samples) var += (v - mean) * (v - mean);
               return var / static_cast<double>(st.series.samples.size());
             }()}}},
          {"phi_nd", spectrum_to_json(st.phi_nd)},
          {"arma",
           {{"ar", st.fit.model.ar},
            {"ma", st.fit.model.ma},
            {"sigma2", st.fit.model.sigma2},
            {"dt_h", st.fit.model.dt},
            {"log_rmse", st.fit.log_rmse},
            {"starts", st.fit.starts}}},
          {"snd", spectrum_to_json(st.snd)}};
}

void write_estimate_artifacts(const RunConfig& cfg, const EstimateStage& st, const json& frag) {
  write_curve_csv(out_path(cfg, "phi_nd.csv"), st.phi_nd.grid, st.phi_nd.values);
  write_curve_csv(out_path(cfg, "snd.csv"), st.snd.grid, st.snd.values);
  write_json(cfg, "snd.json", frag);
}

json project_fragment(const RunConfig& cfg, const ProjectStage& st) {
  json per_bin = json::array();
  for (std::size_t l = 0; l < st.main.per_bin.size(); ++l)
    per_bin.push_back({{"label", cfg.ensemble.bins[l].label},
                       {"count", cfg.ensemble.bins[l].count},
                       {"spectrum", spectrum_to_json(st.main.per_bin[l])}});
  json frag = {{"sba", spectrum_to_json(st.sba)},
               {"aggregate", spectrum_to_json(st.main.aggregate)},
               {"per_bin", per_bin},
               {"solve", solve_to_json(st.main)},
               {"capacity", capacity_to_json(st.capacity)}};
  if (st.bounds) {
    frag["bounds"] = {{"lower", solve_to_json(st.bounds->lower)},
                      {"upper", solve_to_json(st.bounds->upper)},
                      {"lower_aggregate", spectrum_to_json(st.bounds->lower.aggregate)},
                      {"upper_aggregate", spectrum_to_json(st.bounds->upper.aggregate)}};
  }
  return frag;
}

void write_project_artifacts(const RunConfig& cfg, const ProjectStage& st) {
  write_curve_csv(out_path(cfg, "sba.csv"), st.sba.grid, st.sba.values);
  write_curve_csv(out_path(cfg, "aggregate.csv"), st.main.aggregate.grid, st.main.aggregate.values);
  for (std::size_t l = 0; l < st.main.per_bin.size(); ++l)
    write_curve_csv(out_path(cfg, "bin_" + cfg.ensemble.bins[l].label + ".csv"),
                    st.main.per_bin[l].grid, st.main.per_bin[l].values);
}

bool project_converged(const ProjectStage& st) {
  bool ok = st.main.converged;
  if (st.bounds) ok = ok && st.bounds->lower.converged && st.bounds->upper.converged;
  return ok;
}

json doc_header(const RunConfig& cfg) {
  return {{"version", kVersion},
          {"seed", cfg.seed},
          {"generated_at", iso_now()},
          {"config", config_to_json(cfg)}};
}

json verify_fragment(const RunConfig& cfg, const ProjectStage& st) {
  json out = json::array();
  for (std::size_t l = 0; l < st.main.per_bin.size(); ++l) {
    const BinSpec& bin = cfg.ensemble.bins[l];
    const int scale = cfg.ensemble.n_bin() * bin.count;
    const SpectralDensity per_load = per_load_spectrum(st.main.per_bin[l], scale);
    const ViolationReport rep = verify_chebyshev(
        per_load, bin.qos, bin.dyn, cfg.montecarlo.paths, cfg.montecarlo.n_samples,
        cfg.montecarlo.dt_h, cfg.seed + static_cast<std::uint64_t>(l));
    json entry = violation_to_json(rep);
    entry["label"] = bin.label;
    out.push_back(entry);
  }
  return out;
}

json sweep_fragment(const RunConfig& cfg, const EstimateStage& est, bool* all_converged) {
  if (cfg.ensemble.n_bin() != 1)
    throw std::runtime_error("sweep: needs exactly one ensemble bin");
  if (cfg.sweep_counts.empty())
    throw std::runtime_error("sweep: sweep.counts must be a non-empty array");

  const SpectralDensity sba = bandpass_target(est.snd, cfg.passband);
  const BinSpec& b0 = cfg.ensemble.bins[0];

  json rows = json::array();
  std::ofstream csv(out_path(cfg, "sweep.csv"));
  if (!csv) throw std::runtime_error("cannot write sweep.csv");
  csv << "n,zeta_p_percent,zeta_e_percent,pow_kw,eng_kwh,converged\n";
  csv.precision(17);

  *all_converged = true;
  ProjectionResult warm;
  bool have_warm = false;
  for (int n : cfg.sweep_counts) {
    if (n < 1) throw std::runtime_error("sweep: counts must be >= 1");
    EnsembleSpec ens = cfg.ensemble;
    ens.bins[0].count = n;
    const ProjectionResult res =
        project(sba, ens, cfg.solver, -1, have_warm ? &warm : nullptr);
    *all_converged = *all_converged && res.converged;
    const double pw = power_capacity(res.aggregate, b0.qos.eps[0]);
    const double en = energy_capacity(res.aggregate, b0.qos.eps[2], b0.qos.horizon_T);
    const auto [zp, ze] =
        capacity_indices(res.aggregate, sba, b0.qos.eps[0], b0.qos.eps[2], b0.qos.horizon_T);
    rows.push_back({{"n", n},
                    {"zeta_p_percent", zp},
                    {"zeta_e_percent", ze},
                    {"pow_kw", pw},
                    {"eng_kwh", en},
                    {"converged", res.converged}});
    csv << n << ',' << zp << ',' << ze << ',' << pw << ',' << en << ','
        << (res.converged ? 1 : 0) << '\n';
    warm = res;
    have_warm = true;
  }
  return rows;
}

}  // namespace

json cmd_estimate(const RunConfig& cfg) {
  ensure_out_dir(cfg);
  const EstimateStage st = run_estimate(cfg);
  json doc = doc_header(cfg);
  doc["estimate"] = estimate_fragment(st);
  write_estimate_artifacts(cfg, st, doc);
  return doc;
}

json cmd_project(const RunConfig& cfg, int* exit_code) {
  ensure_out_dir(cfg);
  const ProjectStage st = run_project(cfg);
  json doc = doc_header(cfg);
  doc["estimate"] = estimate_fragment(st.est);
  doc["project"] = project_fragment(cfg, st);
  write_estimate_artifacts(cfg, st.est, doc["estimate"]);
  write_project_artifacts(cfg, st);
  write_json(cfg, "result.json", doc);
  if (exit_code) *exit_code = project_converged(st) ? 0 : 2;
  return doc;
}

json cmd_verify(const RunConfig& cfg, int* exit_code) {
  ensure_out_dir(cfg);
  const ProjectStage st = run_project(cfg);
  json doc = doc_header(cfg);
  doc["estimate"] = estimate_fragment(st.est);
  doc["project"] = project_fragment(cfg, st);
  doc["verify"] = verify_fragment(cfg, st);
  write_json(cfg, "result.json", doc);
  if (exit_code) *exit_code = project_converged(st) ? 0 : 2;
  return doc;
}

json cmd_sweep(const RunConfig& cfg, int* exit_code) {
  ensure_out_dir(cfg);
  const EstimateStage est = run_estimate(cfg);
  bool converged = true;
  json doc = doc_header(cfg);
  doc["estimate"] = estimate_fragment(est);
  doc["sweep"] = sweep_fragment(cfg, est, &converged);
  write_json(cfg, "result.json", doc);
  if (exit_code) *exit_code = converged ? 0 : 2;
  return doc;
}

json cmd_all(const RunConfig& cfg, int* exit_code) {
  ensure_out_dir(cfg);
  const ProjectStage st = run_project(cfg);
  json doc = doc_header(cfg);
  doc["estimate"] = estimate_fragment(st.est);
  doc["project"] = project_fragment(cfg, st);
  doc["verify"] = verify_fragment(cfg, st);
  bool sweep_ok = true;
  if (!cfg.sweep_counts.empty() && cfg.ensemble.n_bin() == 1)
    doc["sweep"] = sweep_fragment(cfg, st.est, &sweep_ok);
  write_estimate_artifacts(cfg, st.est, doc["estimate"]);
  write_project_artifacts(cfg, st);
  write_json(cfg, "result.json", doc);
  if (exit_code) *exit_code = (project_converged(st) && sweep_ok) ? 0 : 2;
  return doc;
}

}  // namespace ves
