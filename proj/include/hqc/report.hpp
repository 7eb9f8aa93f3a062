#pragma once

// Text, JSON and CSV renderings of the verification reports. Field order is
// fixed and every JSON document carries a schema_version. Qubit and stage
// indices are 1-based in all rendered output.

#include <array>
#include <charconv>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "hqc/circuit.hpp"
#include "hqc/compiler.hpp"
#include "hqc/sim.hpp"
#include "json.hpp"

namespace hqc {

inline constexpr int kReportSchemaVersion = 1;

enum class ReportFormat { Text, Json, Csv };

inline ReportFormat parse_report_format(const std::string& name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  throw DomainError("unknown report format '" + name + "' (expected text, json or csv)");
}

namespace detail {

using rjson = nlohmann::ordered_json;

/// Shortest decimal that reads back to the same double.
inline std::string num(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

inline std::string complex_text(Complex z) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

inline rjson matrix_json(const ComplexMatrix& m) {
  rjson rows = rjson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rjson row = rjson::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string matrix_text(const ComplexMatrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out += "  ";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::string cell = complex_text(m(r, c));
      cell.resize(std::max<std::size_t>(cell.size(), 22), ' ');
      out += cell;
    }
    out += "\n";
  }
  return out;
}

inline std::string dump(const rjson& j) { return j.dump(2) + "\n"; }

inline rjson envelope(const std::string& kind) { return rjson{{"schema_version", kReportSchemaVersion}, {"report", kind}}; }

inline std::string stage_label(std::size_t zero_based) { return std::to_string(zero_based + 1); }

}  // namespace detail

inline std::string emit_holonomy(const HolonomyReport& r, ReportFormat fmt) {
  switch (fmt) {
    case ReportFormat::Json: {
      auto j = detail::envelope("holonomy");
      j["gamma"] = detail::matrix_json(r.gamma);
      j["target"] = detail::matrix_json(r.target);
      j["leakage"] = r.leakage;
      j["infidelity"] = r.infidelity;
      j["dynamical_phase"] = r.dynamical_phase;
      j["total_time"] = r.total_time;
      j["steps"] = r.steps;
      return detail::dump(j);
    }
    case ReportFormat::Csv: {
      std::string out = "row,col,gamma_re,gamma_im,target_re,target_im\n";
      for (Eigen::Index a = 0; a < r.gamma.rows(); ++a)
        for (Eigen::Index b = 0; b < r.gamma.cols(); ++b)
          out += std::to_string(a + 1) + "," + std::to_string(b + 1) + "," + detail::num(r.gamma(a, b).real()) + "," +
                 detail::num(r.gamma(a, b).imag()) + "," + detail::num(r.target(a, b).real()) + "," +
                 detail::num(r.target(a, b).imag()) + "\n";
      return out;
    }
    case ReportFormat::Text:
      break;
  }
  std::string out = "gamma (code-space overlaps after stripping the dynamical phase):\n" + detail::matrix_text(r.gamma);
  out += "target (Clifford oracle):\n" + detail::matrix_text(r.target);
  out += "infidelity       " + detail::num(r.infidelity) + "\n";
  out += "leakage          " + detail::num(r.leakage) + "\n";
  out += "dynamical_phase  " + detail::num(r.dynamical_phase) + "\n";
  out += "total_time       " + detail::num(r.total_time) + "\n";
  out += "steps            " + std::to_string(r.steps) + "\n";
  return out;
}

inline std::string emit_gaps(const std::vector<GapEntry>& gaps, ReportFormat fmt) {
  switch (fmt) {
    case ReportFormat::Json: {
      auto j = detail::envelope("gaps");
      j["stages"] = detail::rjson::array();
      for (const auto& g : gaps)
        j["stages"].push_back({{"stage", g.stage + 1},
                               {"anticommuting", g.anticommuting},
                               {"broken", g.broken},
                               {"ground_energy", g.ground_energy},
                               {"ground_gap", g.ground_gap},
                               {"coupled_gap", g.coupled_gap}});
      return detail::dump(j);
    }
    case ReportFormat::Csv: {
      std::string out = "stage,ground_gap,coupled_gap,anticommuting,broken\n";
      for (const auto& g : gaps)
        out += detail::stage_label(g.stage) + "," + detail::num(g.ground_gap) + "," + detail::num(g.coupled_gap) + "," +
               std::to_string(g.anticommuting) + "," + (g.broken ? "1" : "0") + "\n";
      return out;
    }
    case ReportFormat::Text:
      break;
  }
  std::ostringstream os;
  os << std::left << std::setw(7) << "stage" << "| " << std::setw(11) << "ground_gap" << "| " << std::setw(12)
     << "coupled_gap" << "| break\n";
  for (const auto& g : gaps)
    os << std::left << std::setw(7) << detail::stage_label(g.stage) << "| " << std::setw(11) << detail::num(g.ground_gap)
       << "| " << std::setw(12) << detail::num(g.coupled_gap) << "| " << (g.broken ? "yes" : "no") << "\n";
  return os.str();
}

inline std::string emit_sweep(const std::vector<SweepPoint>& sweep, ReportFormat fmt) {
  switch (fmt) {
    case ReportFormat::Json: {
      auto j = detail::envelope("sweep");
      j["points"] = detail::rjson::array();
      for (const auto& p : sweep)
        j["points"].push_back({{"T", p.stage_duration},
                               {"total_time", p.total_time},
                               {"infidelity", p.infidelity},
                               {"leakage", p.leakage}});
      return detail::dump(j);
    }
    case ReportFormat::Text:
    case ReportFormat::Csv:
      break;
  }
  // T is the per-stage duration.
  std::string out = "T,infidelity,leakage\n";
  for (const auto& p : sweep)
    out += detail::num(p.stage_duration) + "," + detail::num(p.infidelity) + "," + detail::num(p.leakage) + "\n";
  return out;
}

inline std::string ft_verdict(const FtResult& r) {
  if (r.passed) return "pass";
  return r.logical_residue ? "logical-failure" : "fail";
}

inline std::string emit_ft(const std::vector<FtResult>& results, ReportFormat fmt) {
  switch (fmt) {
    case ReportFormat::Json: {
      auto j = detail::envelope("fttest");
      j["trials"] = detail::rjson::array();
      for (const auto& r : results)
        j["trials"].push_back({{"event", r.event.error.to_string(false)},
                               {"time", r.event.time},
                               {"boundary", r.boundary ? detail::rjson(*r.boundary) : detail::rjson(nullptr)},
                               {"syndrome", syndrome_string(r.syndrome)},
                               {"correction", r.correction.to_string(false)},
                               {"branch_probability", r.branch_probability},
                               {"infidelity", r.infidelity},
                               {"oracle_mismatch", r.oracle_mismatch},
                               {"logical_residue", r.logical_residue},
                               {"verdict", ft_verdict(r)}});
      return detail::dump(j);
    }
    case ReportFormat::Text:
    case ReportFormat::Csv:
      break;
  }
  std::string out = "event,time,boundary,syndrome,correction,infidelity,oracle_mismatch,verdict\n";
  for (const auto& r : results)
    out += r.event.error.to_string(false) + "," + detail::num(r.event.time) + "," +
           (r.boundary ? std::to_string(*r.boundary) : std::string()) + "," + syndrome_string(r.syndrome) + "," +
           r.correction.to_string(false) + "," + detail::num(r.infidelity) + "," + detail::num(r.oracle_mismatch) + "," +
           ft_verdict(r) + "\n";
  return out;
}

inline std::string emit_audit(const AuditReport& r, ReportFormat fmt) {
  if (fmt == ReportFormat::Json) {
    auto j = detail::envelope("audit");
    j["passed"] = r.passed();
    j["gate_validity_ok"] = r.gate_validity_ok();
    j["containment_ok"] = r.containment_ok();
    j["checked_propagations"] = r.checked_propagations;
    j["gate_issues"] = detail::rjson::array();
    for (const auto& g : r.gate_issues)
      j["gate_issues"].push_back({{"stage", g.stage},
                                  {"gate", g.gate.to_string()},
                                  {"logical_operator", g.logical_operator},
                                  {"message", g.message}});
    j["containment_failures"] = detail::rjson::array();
    for (const auto& f : r.containment_failures)
      j["containment_failures"].push_back({{"error", f.error.to_string(false)},
                                           {"after_gates", f.injection_point},
                                           {"propagated", f.propagated.to_string()},
                                           {"syndrome", syndrome_string(f.syndrome)},
                                           {"correction", f.correction.to_string(false)}});
    return detail::dump(j);
  }
  if (fmt == ReportFormat::Csv) {
    std::string out = "kind,stage,detail\n";
    for (const auto& g : r.gate_issues) out += "gate," + std::to_string(g.stage) + ",\"" + g.message + "\"\n";
    for (const auto& f : r.containment_failures)
      out += "containment," + std::to_string(f.injection_point) + "," + f.error.to_string(false) + "\n";
    return out;
  }
  std::string out;
  out += std::string("check (a) gate validity: ") + (r.gate_validity_ok() ? "ok" : "FAILED") + "\n";
  for (const auto& g : r.gate_issues) out += "  " + g.message + "\n";
  out += std::string("check (b) error containment: ") + (r.containment_ok() ? "ok" : "FAILED") + " (" +
         std::to_string(r.checked_propagations) + " propagations)\n";
  for (const auto& f : r.containment_failures)
    out += "  " + f.error.to_string(false) + " after " + std::to_string(f.injection_point) + " gates -> " +
           f.propagated.to_string() + ", syndrome " + syndrome_string(f.syndrome) + ", correction " +
           f.correction.to_string(false) + " leaves a logical error\n";
  out += std::string("verdict: ") + (r.passed() ? "fault-tolerant" : "not fault-tolerant") + "\n";
  return out;
}

/// Weight report; with a second report, the comparison "before → after".
inline std::string emit_weights(const WeightReport& naive, const WeightReport* rewritten, ReportFormat fmt) {
  if (fmt == ReportFormat::Json) {
    auto j = detail::envelope("weights");
    j["max_weight"] = naive.overall;
    j["per_stage"] = naive.per_stage;
    if (rewritten) {
      j["rewritten_max_weight"] = rewritten->overall;
      j["rewritten_per_stage"] = rewritten->per_stage;
    }
    return detail::dump(j);
  }
  if (fmt == ReportFormat::Csv) {
    std::string out = rewritten ? "stage,max_weight,rewritten_max_weight\n" : "stage,max_weight\n";
    for (std::size_t l = 0; l < naive.per_stage.size(); ++l) {
      out += std::to_string(l + 1) + "," + std::to_string(naive.per_stage[l]);
      if (rewritten && l < rewritten->per_stage.size()) out += "," + std::to_string(rewritten->per_stage[l]);
      out += "\n";
    }
    return out;
  }
  if (rewritten) return "max term weight: " + std::to_string(naive.overall) + " → " + std::to_string(rewritten->overall) + "\n";
  return "max term weight: " + std::to_string(naive.overall) + "\n";
}

inline std::string emit_validation(const ScheduleReport& r, ReportFormat fmt) {
  if (fmt == ReportFormat::Json) {
    auto j = detail::envelope("validate");
    j["ok"] = r.ok();
    j["cyclic"] = r.cyclic;
    j["endpoint_same_group"] = r.endpoint_same_group;
    j["violations"] = r.violations;
    return detail::dump(j);
  }
  if (fmt == ReportFormat::Csv) {
    std::string out = "violation\n";
    for (const auto& v : r.violations) out += "\"" + v + "\"\n";
    return out;
  }
  std::string out;
  for (const auto& v : r.violations) out += "violation: " + v + "\n";
  out += std::string("cyclic: ") + (r.cyclic ? "yes" : "no") + "\n";
  out += std::string("endpoint generates the initial group: ") + (r.endpoint_same_group ? "yes" : "no") + "\n";
  out += std::string("verdict: ") + (r.ok() ? "valid" : "invalid") + "\n";
  return out;
}

}  // namespace hqc
