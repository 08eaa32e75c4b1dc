#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "dynspec_cli/job.hpp"

#include "dynspec/empirical.hpp"
#include "dynspec/errors.hpp"
#include "dynspec/legendre.hpp"
#include "dynspec/lpshift.hpp"
#include "dynspec/markov.hpp"
#include "dynspec/spectral.hpp"
#include "dynspec/systems.hpp"
#include "dynspec/tentropy.hpp"

namespace dynspec::cli {

namespace {

Json num(double x) {
  if (x == -std::numeric_limits<double>::infinity()) return Json("-inf");
  return Json(x);
}

Json num(const ExtReal& x) { return x.is_neg_inf() ? Json("-inf") : Json(x.value()); }

Json vec_json(const Vec& v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(num(x));
  return arr;
}

Json mat_json(const Mat& m) {
  Json arr = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    arr.push_back(std::move(row));
  }
  return arr;
}

Json system_json(const SystemDescriptor& d) {
  Json s = Json::object();
  switch (d.kind) {
    case SystemKind::finite_map:
      s["kind"] = "finite_map";
      s["map"] = d.map;
      s["psi"] = vec_json(d.psi);
      break;
    case SystemKind::markov_shift:
      s["kind"] = "markov_shift";
      s["adjacency"] = mat_json(d.adjacency);
      if (d.rho) s["rho"] = mat_json(*d.rho);
      break;
    case SystemKind::measure_system:
      s["kind"] = "measure_system";
      s["m"] = vec_json(d.m);
      s["beta"] = d.beta;
      s["psi"] = vec_json(d.psi);
      s["p"] = d.p;
      break;
  }
  return s;
}

FiniteMapSystem require_finite_map(const JobConfig& cfg) {
  if (cfg.system.kind != SystemKind::finite_map)
    throw DomainError(cfg.command + ": requires a finite_map system");
  return FiniteMapSystem(static_cast<int>(cfg.system.map.size()), cfg.system.map);
}

TransferMatrix transfer_of(const JobConfig& cfg) {
  if (cfg.system.kind == SystemKind::finite_map)
    return build_pf_operator(require_finite_map(cfg), cfg.system.psi);
  if (cfg.system.kind == SystemKind::measure_system)
    return transfer_from_measure(FiniteMeasureSystem(cfg.system.m, cfg.system.beta));
  throw DomainError(cfg.command + ": requires a finite_map or measure_system system");
}

MarkovShiftSystem require_markov(const JobConfig& cfg, bool need_rho) {
  if (cfg.system.kind != SystemKind::markov_shift)
    throw DomainError(cfg.command + ": requires a markov_shift system");
  if (need_rho && !cfg.system.rho) throw DomainError(cfg.command + ": system.rho is required");
  return MarkovShiftSystem(cfg.system.adjacency.rows(), cfg.system.adjacency, cfg.system.rho,
                           /*stochastic_on_fibers=*/need_rho);
}

Mat log_of_edges(const Mat& edges) {
  Mat out(edges.rows(), edges.cols());
  for (int i = 0; i < edges.rows(); ++i)
    for (int j = 0; j < edges.cols(); ++j)
      out(i, j) = edges(i, j) == 0.0 ? -std::numeric_limits<double>::infinity()
                                     : std::log(std::abs(edges(i, j)));
  return out;
}

Measure require_mu(const JobConfig& cfg) {
  if (!cfg.mu) throw DomainError(cfg.command + ": mu is required");
  return Measure(*cfg.mu);
}

Mat require_edges(const std::optional<Mat>& edges, const std::string& what) {
  if (!edges) throw DomainError(what + " is required");
  return *edges;
}

}  // namespace

RunOutcome run_job(const JobConfig& cfg) {
  Json report = Json::object();
  report["schema_version"] = 1;
  report["command"] = cfg.command;
  Json inputs = Json::object();
  inputs["system"] = system_json(cfg.system);
  if (cfg.phi) inputs["phi"] = vec_json(*cfg.phi);
  if (cfg.mu) inputs["mu"] = vec_json(*cfg.mu);
  if (cfg.psi_edges) inputs["psi_edges"] = mat_json(*cfg.psi_edges);
  if (cfg.a_edges) inputs["a_edges"] = mat_json(*cfg.a_edges);
  if (cfg.p) inputs["p"] = *cfg.p;
  if (cfg.n_max) inputs["n_max"] = *cfg.n_max;
  if (cfg.radius) inputs["radius"] = *cfg.radius;
  if (cfg.tol) inputs["tol"] = *cfg.tol;
  if (cfg.seed) inputs["seed"] = *cfg.seed;
  report["inputs"] = std::move(inputs);

  Json results = Json::object();
  Json diagnostics = Json::object();
  int exit_code = 0;
  const int n_max = cfg.n_max.value_or(cfg.command == "lp-radius" ? 16 : 32);
  const double tol = cfg.tol.value_or(1e-2);

  try {
    if (cfg.command == "eval-lambda") {
      const TransferMatrix a = transfer_of(cfg);
      const Potential phi(cfg.phi.value_or(Vec(a.n_states(), 0.0)));
      const SpectralResult r = spectral_potential(a, phi);
      results["lambda"] = num(r.lambda);
      results["dominant_eigenvalue"] = r.dominant_eigenvalue;
      diagnostics["simple"] = r.simple;
      if (r.simple) results["equilibrium"] = vec_json(equilibrium_measure(a, phi).weights());
    } else if (cfg.command == "t-entropy") {
      const TransferMatrix a = transfer_of(cfg);
      const TauResult t = t_entropy(a, require_mu(cfg), n_max);
      results["value"] = num(t.value);
      Json per_n = Json::array();
      for (const ExtReal& x : t.per_n) per_n.push_back(num(x));
      diagnostics["per_n"] = std::move(per_n);
      diagnostics["converged"] = t.converged;
      diagnostics["inner_kkt_residual"] = t.inner_kkt_residual;
      if (!t.converged) exit_code = 3;
    } else if (cfg.command == "dual-entropy") {
      const TransferMatrix a = transfer_of(cfg);
      const DualEntropyResult r = dual_entropy(a, require_mu(cfg));
      results["value"] = num(r.value);
      results["argmin_phi"] = vec_json(r.argmin_phi.values);
      diagnostics["converged"] = r.converged;
      diagnostics["iterations"] = r.iterations;
      if (!r.converged) exit_code = 3;
    } else if (cfg.command == "variational-check") {
      const TransferMatrix a = transfer_of(cfg);
      if (!cfg.phi) throw DomainError("variational-check: phi is required");
      const Potential phi(*cfg.phi);
      const SpectralResult sr = spectral_potential(a, phi);
      // The VP objective is affine on the invariant polytope, so the max
      // over the hull is attained at a cycle measure.
      ExtReal vp = ExtReal::neg_inf();
      for (const InvariantMeasure& nu : ergodic_measures(a.system())) {
        const TauResult t = t_entropy(a, nu, n_max);
        if (t.value.is_neg_inf()) continue;
        vp = max(vp, ExtReal(nu.integrate(phi.values) + t.value.value()));
      }
      results["lambda"] = num(sr.lambda);
      results["vp_value"] = num(vp);
      double gap = 0.0;
      if (sr.lambda.is_neg_inf() != vp.is_neg_inf())
        gap = sr.lambda.is_neg_inf() ? -std::numeric_limits<double>::infinity()
                                     : std::numeric_limits<double>::infinity();
      else if (!sr.lambda.is_neg_inf())
        gap = sr.lambda.value() - vp.value();
      results["gap"] = num(gap);
      if (sr.simple && !sr.lambda.is_neg_inf()) {
        const Measure eq = equilibrium_measure(a, phi);
        const TauResult t = t_entropy(a, eq, n_max);
        const double young = t.value.is_neg_inf()
                                 ? std::numeric_limits<double>::infinity()
                                 : sr.lambda.value() - eq.integrate(phi.values) - t.value.value();
        results["young_residual"] = num(young);
      }
      const double check_tol = cfg.tol.value_or(1e-4);
      diagnostics["within_tol"] = std::abs(gap) <= check_tol;
      if (std::abs(gap) > check_tol) exit_code = 3;
    } else if (cfg.command == "pressure") {
      const MarkovShiftSystem shift = require_markov(cfg, false);
      const Mat psi = require_edges(cfg.psi_edges, "psi_edges");
      results["pressure"] = num(pressure(shift, log_of_edges(psi)));
    } else if (cfg.command == "ruelle-walters") {
      const MarkovShiftSystem shift = require_markov(cfg, false);
      const Mat psi = require_edges(cfg.psi_edges, "psi_edges");
      MarkovOptOptions opts;
      opts.seed = *cfg.seed;
      const VariationalCheckResult r = ruelle_walters_check(shift, log_of_edges(psi), opts);
      results["pressure"] = r.pressure_value;
      results["vp_value"] = r.vp_value;
      results["gap"] = r.gap;
      results["maximizer_pi"] = vec_json(r.maximizer.pi());
      results["maximizer_P"] = mat_json(r.maximizer.transition());
      diagnostics["within_tol"] = r.gap <= tol && r.gap >= -1e-4;
      if (!(r.gap <= tol && r.gap >= -1e-4)) exit_code = 3;
    } else if (cfg.command == "latushkin-stepin") {
      const MarkovShiftSystem shift = require_markov(cfg, true);
      const Mat a_edges = require_edges(cfg.a_edges, "a_edges");
      const double p = cfg.p.value_or(1.0);
      MarkovOptOptions opts;
      opts.seed = *cfg.seed;
      const LatushkinStepinResult r =
          latushkin_stepin_radius(shift, log_of_edges(a_edges), *cfg.system.rho, p, opts);
      results["lhs"] = r.lhs;
      results["rhs"] = r.rhs;
      results["gap"] = r.gap;
      diagnostics["within_tol"] = r.gap <= tol && r.gap >= -1e-4;
      if (!(r.gap <= tol && r.gap >= -1e-4)) exit_code = 3;
    } else if (cfg.command == "lp-radius") {
      if (cfg.system.kind != SystemKind::measure_system)
        throw DomainError("lp-radius: requires a measure_system system");
      const WeightedShift ws(FiniteMeasureSystem(cfg.system.m, cfg.system.beta), cfg.system.psi,
                             cfg.p.value_or(cfg.system.p));
      const LpRadiusResult r = lp_spectral_radius(ws, std::max(n_max, 4));
      results["log_radius"] = num(r.log_radius);
      results["vp_value"] = num(r.vp_value);
      results["gap"] = std::isnan(r.gap) ? Json(nullptr) : num(r.gap);
      Json rates = Json::array();
      for (double x : r.norm_rates) rates.push_back(num(x));
      diagnostics["norm_rates"] = std::move(rates);
    } else if (cfg.command == "entropy-statistic") {
      const FiniteMapSystem sys = require_finite_map(cfg);
      const TransferMatrix a = build_pf_operator(sys, cfg.system.psi);
      if (!cfg.radius) throw DomainError("entropy-statistic: radius is required");
      const InvariantMeasure mu(require_mu(cfg).weights(), sys);
      std::vector<int> n_range;
      for (int n = 1; n <= n_max; ++n) n_range.push_back(n);
      const GrowthReport r = entropy_statistic_check(a, mu, *cfg.radius, n_range);
      Json rates = Json::array();
      for (const auto& [n, rate] : r.rates) rates.push_back(Json::array({Json(n), num(rate)}));
      results["rates"] = std::move(rates);
      results["fitted_rate"] = num(r.fitted_rate);
      results["bound_t"] = num(r.bound_t);
      diagnostics["bound_satisfied"] =
          !(std::isfinite(r.fitted_rate) && r.fitted_rate > r.bound_t + 0.05);
    } else {
      throw DomainError("unknown command '" + cfg.command + "'");
    }
  } catch (const ConvergenceError& e) {
    diagnostics["error"] = e.what();
    exit_code = 3;
  }

  report["results"] = std::move(results);
  report["diagnostics"] = std::move(diagnostics);
  report["exit_code"] = exit_code;
  return RunOutcome{exit_code, std::move(report)};
}

std::string report_to_json(const Json& report) { return report.dump(2) + "\n"; }

namespace {

std::string csv_scalar(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "null";
  std::ostringstream os;
  os << v;
  return os.str();
}

void flatten_csv(const Json& v, const std::string& path, std::string& out) {
  if (v.is_object()) {
    for (const auto& [key, val] : v.items())
      flatten_csv(val, path.empty() ? key : path + "." + key, out);
  } else if (v.is_array()) {
    int i = 0;
    for (const auto& val : v) flatten_csv(val, path + "[" + std::to_string(i++) + "]", out);
  } else {
    out += path + "," + csv_scalar(v) + "\n";
  }
}

}  // namespace

std::string report_to_csv(const Json& report) {
  std::string out = "key,value\n";
  flatten_csv(report, "", out);
  return out;
}

}  // namespace dynspec::cli
