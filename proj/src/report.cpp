#include "sginf/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "sginf/matrix_io.hpp"

namespace sginf::report {

namespace {

using nlohmann::json;

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

template <typename T>
json optional_value(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json header(const std::string& kind) { return {{"report", kind}, {"schema_version", kSchemaVersion}}; }

}  // namespace

json group_to_json(const GroupDescriptor& g) {
  json j = {{"kind", to_string(g.kind)}, {"peripheral_arguments", g.peripheral_arguments}};
  j["order"] = g.kind == GroupKind::TorusClosure ? json(nullptr) : json(g.order);
  j["rank"] = g.kind == GroupKind::TorusClosure ? json(g.rank) : json(nullptr);
  return j;
}

json convergence_to_json(const std::string& kind, const SemigroupSpec& sg, const ConvergenceReport& rep) {
  const auto& dec = rep.decomposition;
  json j = header(kind);
  j["mode"] = sg.is_discrete() ? "discrete" : "continuous";
  j["monoid"] = sg.monoid().name();
  j["norm_p"] = sg.norm_p() == NormP::Inf ? json("inf") : json(sg.norm_p() == NormP::One ? 1 : 2);
  j["dim"] = sg.dim();
  j["converges"] = rep.converges();
  j["verdict"] = to_string(rep.verdict);
  j["limit_rank"] = optional_value(rep.limit_rank);
  j["power_bounded"] = dec.bounded;
  j["exists_compact"] = dec.exists_compact;
  j["borderline"] = dec.borderline;
  j["diagnostic"] = dec.diagnostic;
  j["divisibility_gate"] = rep.divisibility_gate;
  j["stable_spectral_radius"] = number(dec.stable_spectral_radius);

  json peripheral = json::array();
  for (std::size_t i = 0; i < dec.peripheral.eigenvalues.size(); ++i) {
    const Complex z = dec.peripheral.eigenvalues[i];
    json item = {{"re", z.real()}, {"im", z.imag()}};
    item["pole_order"] = i < dec.peripheral_pole_orders.size() ? dec.peripheral_pole_orders[i] : 1;
    item["multiplicity"] = i < dec.peripheral_multiplicities.size() ? dec.peripheral_multiplicities[i] : 1;
    if (!sg.is_discrete() && i < dec.generator_peripheral.size()) {
      item["generator_re"] = dec.generator_peripheral[i].real();
      item["generator_im"] = dec.generator_peripheral[i].imag();
    }
    peripheral.push_back(std::move(item));
  }
  j["peripheral"] = std::move(peripheral);
  j["group"] = group_to_json(dec.group);
  j["p_inf"] = dec.exists_compact ? matrix_to_json(dec.p_inf) : json(nullptr);
  j["limit"] = rep.limit ? matrix_to_json(*rep.limit) : json(nullptr);

  json reasons = json::array();
  for (const auto& r : rep.reasons) reasons.push_back({{"tag", r.tag}, {"verdict", r.verdict}, {"anchor", r.anchor}});
  j["reasons"] = std::move(reasons);
  return j;
}

json pole_probe_to_json(const ComplexMatrix& t, Complex lambda, const PoleProbeResult& res) {
  json j = header("abel-probe");
  j["dim"] = t.rows();
  j["lambda"] = {{"re", lambda.real()}, {"im", lambda.imag()}};
  j["classification"] = to_string(res.classification);
  j["projection"] = res.projection ? matrix_to_json(*res.projection) : json(nullptr);
  json schedule = json::array();
  for (std::size_t k = 0; k < res.schedule.size(); ++k) {
    schedule.push_back({{"re", res.schedule[k].real()},
                        {"im", res.schedule[k].imag()},
                        {"norm", number(k < res.norms.size() ? res.norms[k] : NAN)}});
  }
  j["schedule"] = std::move(schedule);
  j["final_norm"] = number(res.final_norm);
  j["cauchy_defect"] = number(res.cauchy_defect);
  j["idempotency_defect"] = number(res.idempotency_defect);
  return j;
}

json scenario_to_json(const pde::Scenario& sc, const pde::ScenarioResult& res) {
  json j = header("pde-demo");
  j["scenario"] = {{"d", sc.d},       {"L", sc.half_width},          {"h", sc.spacing},
                   {"beta", sc.beta}, {"v", sc.v},                   {"w", sc.w},
                   {"lambda0", sc.lambda0}, {"tau", sc.tau},         {"scheme", pde::to_string(sc.scheme)},
                   {"t_max", sc.t_max}, {"probe", sc.probe}};
  j["unknowns"] = res.unknowns;
  j["dissipativity"] = {{"ok", res.dissipativity.ok}, {"worst", number(res.dissipativity.worst)}};
  j["lyapunov"] = {{"ok", res.lyapunov.ok}, {"min_residual", number(res.lyapunov.min_residual)}};
  j["equilibrium_step_defect"] = number(res.equilibrium_defect);
  j["warnings"] = res.warnings;
  const auto& c = res.convergence;
  j["t_star"] = c.t_star ? json(*c.t_star) : json(nullptr);
  j["limit_rank"] = optional_value(c.limit_rank);
  j["idempotency_defect"] = c.idempotency_defect ? number(*c.idempotency_defect) : json(nullptr);
  j["max_op_norm"] = number(c.max_op_norm);
  j["probes"] = c.rows.size();
  return j;
}

std::string convergence_csv(const pde::ConvergenceSummary& summary) {
  std::ostringstream os;
  os << "t,diff_norm,op_norm,rank\n";
  os << std::setprecision(17);
  for (const auto& r : summary.rows) os << r.t << ',' << r.diff_norm << ',' << r.op_norm << ',' << r.rank << '\n';
  return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace sginf::report
