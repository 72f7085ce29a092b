#pragma once

// JSON and CSV serialization of analysis results. Every document carries a
// "report" discriminator and "schema_version"; schemas/report.schema.json
// describes the format.

#include <string>

#include <json.hpp>

#include "sginf/infinity.hpp"
#include "sginf/parabolic.hpp"
#include "sginf/semigroup.hpp"

namespace sginf::report {

inline constexpr int kSchemaVersion = 1;

nlohmann::json group_to_json(const GroupDescriptor& g);

/// `kind` is "analyze-matrix" or "analyze-generator".
nlohmann::json convergence_to_json(const std::string& kind, const SemigroupSpec& sg,
                                   const ConvergenceReport& rep);

nlohmann::json pole_probe_to_json(const ComplexMatrix& t, Complex lambda, const PoleProbeResult& res);

nlohmann::json scenario_to_json(const pde::Scenario& sc, const pde::ScenarioResult& res);

/// Header "t,diff_norm,op_norm,rank", one row per probe time.
std::string convergence_csv(const pde::ConvergenceSummary& summary);

/// Serialized form written by the CLI: two-space indent plus newline.
std::string dump(const nlohmann::json& j);

}  // namespace sginf::report
