#include <algorithm>
#include <cmath>
#include <limits>

#include "spinchain/chords.hpp"
#include "spinchain/convex.hpp"
#include "spinchain/drift.hpp"
#include "spinchain/equilibrium.hpp"
#include "spinchain/glauber.hpp"
#include "spinchain/io.hpp"
#include "spinchain/wasserstein.hpp"

namespace spinchain {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Files = std::vector<fs::path>;

struct Out {
  const ExperimentConfig& cfg;
  const fs::path& dir;
  std::string sub;
  Files files;

  fs::path csv_path(const std::string& name) { return dir / name; }

  void done_csv(const fs::path& p, const json& extra = json::object()) {
    write_sidecar(p, cfg, sub, extra);
    files.push_back(p);
  }
  void json_doc(const std::string& name, const json& doc) {
    const fs::path p = dir / name;
    write_json(p, doc, cfg, sub);
    files.push_back(p);
  }
};

std::vector<std::string> indexed_header(const std::string& first, const std::string& stem, std::size_t n) {
  std::vector<std::string> h{first};
  for (std::size_t i = 0; i < n; ++i) h.push_back(stem + std::to_string(i));
  return h;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

json segment_json(const LimitSegment& s) {
  return json{{"p_lo", s.p_lo}, {"p_hi", s.p_hi}, {"q", s.q}, {"z", s.z}};
}

void run_equilibrium(Out& o) {
  const auto& cfg = o.cfg;
  const double b = cfg.params.b, beta = cfg.params.beta;
  const std::vector<double> ps = cfg.p_grid.build();
  const std::vector<double> qs = cfg.q_grid.build();

  const ThermoCurve inf = lambda_inf_curve(b, beta, ps);
  {
    CsvWriter w(o.csv_path("lambda_inf.csv"), {"p", "q", "z", "kind"});
    for (std::size_t i = 0; i < inf.size(); ++i) {
      const auto& s = inf.samples[i];
      w.row(std::vector<std::string>{format_double(s.p), format_double(s.q), format_double(s.z),
                                     std::string(to_string(inf.kinds[i]))});
    }
    o.done_csv(w.path(), {{"contact_residual", contact_residual(inf)}});
  }

  const ThermoCurve limit = limit_curve(b, beta, qs.front(), qs.back());
  {
    CsvWriter w(o.csv_path("limit_curve.csv"), {"p", "q", "z"});
    for (const auto& s : limit.samples) w.row({s.p, s.q, s.z});
    o.done_csv(w.path());
  }

  std::vector<double> f_lim(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) f_lim[i] = f_limit(b, beta, qs[i]);

  std::vector<double> sup_err, haus;
  for (int N : cfg.N_ladder) {
    const ThermoCurve fin = finite_legendrian(cfg.params.with_size(N), qs, cfg.mode);
    CsvWriter w(o.csv_path("finite_N" + std::to_string(N) + ".csv"), {"p", "q", "z", "f_limit"});
    double err = 0.0;
    for (std::size_t i = 0; i < fin.size(); ++i) {
      const auto& s = fin.samples[i];
      w.row({s.p, s.q, s.z, f_lim[i]});
      err = std::max(err, std::abs(s.z - f_lim[i]));
    }
    o.done_csv(w.path(), {{"N", N}});
    sup_err.push_back(err);
    haus.push_back(hausdorff_distance(fin, limit));
  }
  {
    CsvWriter w(o.csv_path("hausdorff_ladder.csv"), {"N", "sup_f_error", "hausdorff"});
    for (std::size_t k = 0; k < cfg.N_ladder.size(); ++k)
      w.row({static_cast<double>(cfg.N_ladder[k]), sup_err[k], haus[k]});
    o.done_csv(w.path());
  }
  o.json_doc("equilibrium_report.json",
             json{{"b", b},
                  {"beta", beta},
                  {"limit_segment", segment_json(limit_segment(b, beta))},
                  {"limit_segment_as_stated", segment_json(limit_segment_as_stated())},
                  {"sup_f_error_decreasing", strictly_decreasing(sup_err)},
                  {"hausdorff_decreasing", strictly_decreasing(haus)},
                  {"spontaneous_magnetization", spontaneous_magnetization(b, beta)}});
}

void run_fp(Out& o) {
  const auto& cfg = o.cfg;
  const ModelParams& params = cfg.params;
  const WassersteinStructure s = build_structure(params);
  const Density rho0 = gibbs(params.with_field(cfg.fp_initial_field), cfg.mode);
  FpControls ctl;
  ctl.kappa = cfg.kappa;
  ctl.grad_tol = cfg.grad_tol;
  ctl.psi_tol = cfg.psi_tol;
  ctl.record_interval = cfg.record_interval;
  ctl.mode = cfg.mode;
  const FpTrajectory traj = fp_evolve(s, params, rho0, cfg.t_end, ctl);
  {
    CsvWriter w(o.csv_path("fp_density.csv"), indexed_header("t", "rho_", s.size()));
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
      std::vector<double> row{traj.t[k]};
      const auto v = traj.rho[k].values();
      row.insert(row.end(), v.begin(), v.end());
      w.row(row);
    }
    o.done_csv(w.path());
  }
  {
    CsvWriter w(o.csv_path("fp_thermo.csv"), {"t", "p", "q", "z", "psi"});
    for (const auto& ts : thermo_trajectory(params, traj, cfg.mode))
      w.row({ts.t, ts.point.p, ts.point.q, ts.point.z, ts.psi});
    o.done_csv(w.path());
  }
  const Density target = gibbs(params, cfg.mode);
  o.json_doc("fp_report.json", json{{"accepted", traj.accepted},
                                    {"rejected", traj.rejected},
                                    {"floor_hits", traj.floor_hits},
                                    {"psi_monotone", traj.psi_monotone},
                                    {"worst_psi_drop", traj.worst_psi_drop},
                                    {"max_mass_drift", traj.max_mass_drift},
                                    {"final_grad_norm", traj.final_grad_norm},
                                    {"converged", traj.converged},
                                    {"stop_reason", traj.stop_reason},
                                    {"final_time", traj.t.back()},
                                    {"l1_to_gibbs", l1_distance(traj.rho.back(), target)}});
}

void run_glauber(Out& o) {
  const auto& cfg = o.cfg;
  const ModelParams& params = cfg.params;
  const LumpedGenerator gen = build_generator(params);
  const StateSpace space(params.N);
  std::vector<double> init(space.size(), 0.0);
  const long k0 = std::lround((1.0 + cfg.glauber_initial_m) * params.N / 2.0);
  init[static_cast<std::size_t>(std::clamp<long>(k0, 0, params.N))] = 1.0;
  GlauberControls ctl;
  ctl.kappa = cfg.kappa;
  ctl.residual_tol = cfg.residual_tol;
  ctl.record_interval = cfg.record_interval;
  const GlauberTrajectory traj = glauber_evolve(gen, ProbabilityVector(init), cfg.t_end, ctl);
  {
    CsvWriter w(o.csv_path("glauber_pi.csv"), indexed_header("t", "pi_", space.size()));
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
      std::vector<double> row{traj.t[k]};
      row.insert(row.end(), traj.pi[k].begin(), traj.pi[k].end());
      w.row(row);
    }
    o.done_csv(w.path());
  }
  const std::vector<double> stat = stationary_vector(gen);
  const std::vector<double> lumped = lumped_gibbs_masses(params);
  double l1 = 0.0;
  {
    CsvWriter w(o.csv_path("glauber_stationary.csv"), {"m", "stationary", "lumped_gibbs", "final"});
    for (std::size_t i = 0; i < space.size(); ++i) {
      w.row({space.point(i), stat[i], lumped[i], traj.pi.back()[i]});
      l1 += std::abs(traj.pi.back()[i] - stat[i]);
    }
    o.done_csv(w.path());
  }
  {
    CsvWriter w(o.csv_path("lump_check.csv"), {"N", "flip", "max_discrepancy", "within_level_spread"});
    for (int N = 2; N <= cfg.lump_N_max; ++N) {
      for (FlipEnergy flip : {FlipEnergy::from_hamiltonian, FlipEnergy::two_over_n}) {
        const LumpReport rep = full_chain_lump_check(params.with_size(N), flip);
        w.row(std::vector<std::string>{std::to_string(N),
                                       flip == FlipEnergy::two_over_n ? "two_over_n" : "from_hamiltonian",
                                       format_double(rep.max_discrepancy), format_double(rep.within_level_spread)});
      }
    }
    o.done_csv(w.path());
  }
  o.json_doc("glauber_report.json", json{{"accepted", traj.accepted},
                                         {"rejected", traj.rejected},
                                         {"max_mass_drift", traj.max_mass_drift},
                                         {"min_component", traj.min_component},
                                         {"final_residual", traj.final_residual},
                                         {"stop_reason", traj.stop_reason},
                                         {"final_time", traj.t.back()},
                                         {"l1_to_stationary", l1},
                                         {"split_residual", gen.split_residual()},
                                         {"max_column_sum_error", gen.max_column_sum_error()},
                                         {"max_admissible_c", max_admissible_c(params)}});
}

void run_drift(Out& o) {
  const auto& cfg = o.cfg;
  const ModelParams& params = cfg.params;
  bool mu_positive = true;
  double worst_as_stated = 0.0, worst_exact = 0.0;
  {
    CsvWriter w(o.csv_path("drift_table.csv"),
                {"m", "drift_fp", "drift_glauber", "mu", "factor_as_stated", "factor_exact"});
    for (double m : cfg.p_grid.build()) {
      const double dfp = drift_fp(params, m), dg = drift_glauber(params, m), mu = mu_ratio(params, m);
      const double fs = drift_factor_as_stated(params, m), fe = drift_factor_exact(params, m);
      w.row({m, dfp, dg, mu, fs, fe});
      if (!(mu > 0.0)) mu_positive = false;
      worst_as_stated = std::max(worst_as_stated, std::abs(dg - fs * dfp));
      worst_exact = std::max(worst_exact, std::abs(dg - fe * dfp));
    }
    o.done_csv(w.path());
  }
  const RateFit fp = drift_rate_fit(params, cfg.drift_ladder, DriftKind::fokker_planck, cfg.drift_window);
  const RateFit gl = drift_rate_fit(params, cfg.drift_ladder, DriftKind::glauber, cfg.drift_window);
  {
    CsvWriter w(o.csv_path("drift_rates.csv"), {"N", "error_fp", "error_glauber"});
    for (std::size_t k = 0; k < fp.N_values.size(); ++k)
      w.row({static_cast<double>(fp.N_values[k]), fp.errors[k], gl.errors[k]});
    o.done_csv(w.path());
  }
  o.json_doc("drift_report.json", json{{"mu_positive", mu_positive},
                                       {"slope_fp", fp.slope},
                                       {"slope_glauber", gl.slope},
                                       {"identity_residual_as_stated", worst_as_stated},
                                       {"identity_residual_exact", worst_exact}});
}

void run_basin(Out& o) {
  const auto& cfg = o.cfg;
  const double b = cfg.params.b, beta1 = cfg.params.beta;
  const std::vector<double> ps = cfg.p_grid.build();
  const EnvelopePair env = envelopes(b, beta1, ps);
  {
    CsvWriter w(o.csv_path("envelopes.csv"), {"p", "F", "G_minus", "G_plus"});
    for (std::size_t i = 0; i < env.F.size(); ++i) w.row({env.F.x[i], env.F.g[i], env.lower.g[i], env.upper.g[i]});
    o.done_csv(w.path());
  }
  {
    CsvWriter w(o.csv_path("alpha.csv"), {"N", "p0", "alpha_minus", "alpha_plus", "G_minus", "G_plus"});
    for (int N : cfg.N_ladder) {
      const ModelParams params = cfg.params.with_size(N).with_field(0.0);
      for (double p0 : cfg.basin_p0)
        w.row({static_cast<double>(N), p0, alpha_lower(params, p0), alpha_upper(params, p0), env.lower_at(p0),
               env.upper_at(p0)});
    }
    o.done_csv(w.path());
  }
  json reports = json::array();
  for (double beta0 : cfg.basin_beta0) {
    const BasinComparison r = compare_basins(b, beta0, beta1, ps);
    reports.push_back(json{{"beta0", beta0},
                           {"beta1", beta1},
                           {"samples", r.samples},
                           {"inclusion", r.inclusion},
                           {"disjoint", r.disjoint},
                           {"inclusion_margin", r.inclusion_margin},
                           {"disjoint_margin", r.disjoint_margin}});
  }
  const MonotonicityFacts f = monotonicity_facts(b, std::min(beta1, 1.0 / b + 1e-3), beta1 + 0.5, ps);
  o.json_doc("basin_report.json", json{{"b", b},
                                       {"beta1", beta1},
                                       {"basin_comparison", reports},
                                       {"p_plus_increasing", f.p_plus_increasing},
                                       {"p_minus_decreasing", f.p_minus_decreasing},
                                       {"F_increasing_in_beta", f.F_increasing_in_beta},
                                       {"endpoint_value_error", f.endpoint_value_error}});
}

void run_chord(Out& o) {
  const auto& cfg = o.cfg;
  QuenchSpec spec;
  spec.b = cfg.params.b;
  spec.beta0 = cfg.quench_beta0;
  spec.beta1 = cfg.quench_beta1;
  spec.a = cfg.quench_a;
  spec.literal_b_absent = cfg.quench_literal_b_absent;
  const ChordResult r = reeb_chord(spec);
  json doc{{"p", r.p},   {"q_star", r.q_star}, {"z0", r.z0},         {"z1", r.z1},
           {"length", r.length}, {"stable", r.stable}, {"x1", r.x1}, {"T0", r.T0},
           {"T1", r.T1}, {"swapped", r.swapped}};
  QuenchSpec ordered = spec;
  if (r.swapped) std::swap(ordered.beta0, ordered.beta1);
  doc["residual_initial"] = chord_residual_initial(ordered, r);
  doc["residual_terminal"] = chord_residual_terminal(ordered, r);
  if (r.p < 1.0) {
    const ChordFixedPointReport fp = chord_fixed_point_check(ordered, r);
    doc["fixed_point"] = json{{"drift_fp", fp.drift_fp},
                              {"drift_glauber", fp.drift_glauber},
                              {"flow_deviation", fp.flow_deviation},
                              {"drift_vanishes", fp.drift_vanishes},
                              {"flow_stationary", fp.flow_stationary},
                              {"instant", fp.instant}};
  }
  o.json_doc("chord.json", doc);
}

void run_toy(Out& o) {
  const auto& cfg = o.cfg;
  const ToyH h = quartic_toy();
  const double q = cfg.toy_q, p0 = cfg.toy_p0;
  const double z0 = q * p0 - h.h(p0);
  const ScalarProductReport sp = toy_scalar_product_check(h);
  const double P = toy_inverse_derivative(h, q), hstar = toy_conjugate(h, q);
  json flows = json::array();
  CsvWriter w(o.csv_path("toy_flows.csv"), {"flow", "t", "p", "q", "z"});
  for (ToyFlow flow : {ToyFlow::gradient, ToyFlow::contact}) {
    const ToyTrajectory traj = toy_flow(h, flow, p0, q, z0, cfg.toy_t_end, cfg.toy_dt);
    for (const auto& s : traj.samples)
      w.row(std::vector<std::string>{to_string(flow), format_double(s.t), format_double(s.p), format_double(s.q),
                                     format_double(s.z)});
    const HaslachReport hr = haslach_admissibility(h, traj);
    const auto& last = traj.samples.back();
    flows.push_back(json{{"flow", to_string(flow)},
                         {"final_p", last.p},
                         {"final_z", last.z},
                         {"distance_to_target", std::max(std::abs(last.p - P), std::abs(last.z - hstar))},
                         {"haslach_admissible", hr.admissible},
                         {"min_lambda", hr.min_lambda},
                         {"checked", hr.checked}});
  }
  o.done_csv(w.path());
  o.json_doc("toy_report.json", json{{"scalar_product_c", sp.c},
                                     {"scalar_product_positive", sp.positive},
                                     {"scalar_product_samples", sp.samples},
                                     {"target_p", P},
                                     {"target_z", hstar},
                                     {"flows", flows}});
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"equilibrium", "fp", "glauber", "drift", "basin", "chord", "toy", "all"};
  return names;
}

std::vector<fs::path> run_subcommand(const std::string& name, const ExperimentConfig& cfg, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  Out o{cfg, out_dir, name, {}};
  if (name == "equilibrium") run_equilibrium(o);
  else if (name == "fp") run_fp(o);
  else if (name == "glauber") run_glauber(o);
  else if (name == "drift") run_drift(o);
  else if (name == "basin") run_basin(o);
  else if (name == "chord") run_chord(o);
  else if (name == "toy") run_toy(o);
  else throw ConfigError("unknown subcommand '" + name + "'");
  return o.files;
}

}  // namespace spinchain
