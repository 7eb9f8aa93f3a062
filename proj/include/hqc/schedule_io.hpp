#pragma once

// JSON serialisation of compiled schedules. Export followed by import and a
// second export reproduces the first document byte for byte.

#include <algorithm>
#include <fstream>
#include <string>

#include "hqc/compiler.hpp"
#include "json.hpp"

namespace hqc {

inline constexpr int kScheduleSchemaVersion = 1;

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson terms_to_json(const PauliSum& h) {
  ojson out = ojson::array();
  for (const auto& t : h) out.push_back({{"coeff", t.coeff}, {"pauli", t.pauli.to_string(false)}});
  return out;
}

inline ojson paulis_to_json(const std::vector<PauliOp>& ps) {
  ojson out = ojson::array();
  for (const auto& p : ps) out.push_back(p.to_string());
  return out;
}

inline PauliOp pauli_from_json(const ojson& j, std::size_t n) {
  const PauliOp p = PauliOp::parse(j.get<std::string>());
  if (p.num_qubits() != n) throw SizeMismatch(n, p.num_qubits());
  return p;
}

inline PauliSum terms_from_json(const ojson& j, std::size_t n) {
  std::vector<WeightedTerm> terms;
  for (const auto& t : j.at("terms")) terms.push_back({t.at("coeff").get<double>(), pauli_from_json(t.at("pauli"), n)});
  return PauliSum(n, std::move(terms));
}

inline PauliSum sum_from_json(const ojson& j, std::size_t n) { return terms_from_json(ojson{{"terms", j}}, n); }

inline Gate gate_from_json(const ojson& j, std::size_t n) {
  const Circuit c = parse_circuit(j.get<std::string>(), n);
  if (c.gates.size() != 1) throw DomainError("schedule gate '" + j.get<std::string>() + "' is not primitive");
  return c.gates.front();
}

inline std::vector<std::size_t> indices_from_json(const ojson& j) {
  std::vector<std::size_t> out;
  for (const auto& v : j) out.push_back(v.get<std::size_t>());
  return out;
}

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace detail

inline nlohmann::ordered_json schedule_to_json(const Schedule& s) {
  using detail::ojson;
  ojson code{{"n", s.code.n},
             {"k", s.code.k},
             {"distance", s.code.distance ? ojson(*s.code.distance) : ojson(nullptr)},
             {"generators", detail::paulis_to_json(s.code.generators)},
             {"logical_x", detail::paulis_to_json(s.code.logical_x)},
             {"logical_z", detail::paulis_to_json(s.code.logical_z)}};
  ojson gates = ojson::array();
  for (const auto& g : s.circuit.gates) gates.push_back(g.to_string());

  ojson stages = ojson::array();
  for (std::size_t l = 0; l < s.stages.size(); ++l) {
    const Stage& st = s.stages[l];
    ojson terms = ojson::array();
    for (const auto& t : st.terms) {
      ojson term{{"coeff", t.coeff}, {"pauli", t.pauli.to_string(false)}};
      if (t.rotates()) {
        term["partner_coeff"] = t.partner_coeff;
        term["partner"] = t.partner->to_string(false);
      }
      terms.push_back(std::move(term));
    }
    stages.push_back({{"index", l + 1},
                      {"gate", st.gate.to_string()},
                      {"start_time", st.start_time},
                      {"duration", st.ramp.duration},
                      {"ramp", ramp_family_name(st.ramp.family)},
                      {"anticommuting", st.anticommuting},
                      {"commuting", st.commuting},
                      {"break", st.break_info ? ojson{{"term", st.break_info->index}, {"c_b", st.break_info->c_b}}
                                              : ojson(nullptr)},
                      {"incoming", detail::terms_to_json(st.incoming)},
                      {"terms", std::move(terms)},
                      {"outgoing", detail::terms_to_json(st.outgoing)}});
  }
  ojson rewrites = ojson::array();
  for (const auto& r : s.rewrites)
    rewrites.push_back({{"boundary", r.boundary},
                        {"before", detail::terms_to_json(r.before)},
                        {"after", detail::terms_to_json(r.after)}});

  return ojson{{"schema_version", kScheduleSchemaVersion},
               {"code", std::move(code)},
               {"circuit", std::move(gates)},
               {"audit_skipped", s.audit_skipped},
               {"initial", detail::terms_to_json(s.initial)},
               {"stages", std::move(stages)},
               {"rewrites", std::move(rewrites)},
               {"final_terms", detail::terms_to_json(s.final_terms)}};
}

inline std::string export_schedule(const Schedule& s) { return schedule_to_json(s).dump(2) + "\n"; }

/// Rebuilds a schedule from its JSON form. Structural problems raise
/// ParseError; the result is not validated, call validate_schedule for that.
inline Schedule schedule_from_json(const nlohmann::ordered_json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kScheduleSchemaVersion)
      throw ParseError(0, "unsupported schedule schema_version " + std::to_string(version));
    Schedule s;
    const auto& code = j.at("code");
    s.code.n = code.at("n").get<std::size_t>();
    s.code.k = code.at("k").get<std::size_t>();
    if (!code.at("distance").is_null()) s.code.distance = code.at("distance").get<std::size_t>();
    const std::size_t n = s.code.n;
    for (const auto& p : code.at("generators")) s.code.generators.push_back(detail::pauli_from_json(p, n));
    for (const auto& p : code.at("logical_x")) s.code.logical_x.push_back(detail::pauli_from_json(p, n));
    for (const auto& p : code.at("logical_z")) s.code.logical_z.push_back(detail::pauli_from_json(p, n));
    s.circuit.n = n;
    for (const auto& g : j.at("circuit")) s.circuit.gates.push_back(detail::gate_from_json(g, n));
    s.audit_skipped = j.at("audit_skipped").get<bool>();
    s.initial = detail::sum_from_json(j.at("initial"), n);
    for (const auto& js : j.at("stages")) {
      Stage st;
      st.gate = detail::gate_from_json(js.at("gate"), n);
      st.start_time = js.at("start_time").get<double>();
      st.ramp.duration = js.at("duration").get<double>();
      st.ramp.family = parse_ramp_family(js.at("ramp").get<std::string>());
      st.anticommuting = detail::indices_from_json(js.at("anticommuting"));
      st.commuting = detail::indices_from_json(js.at("commuting"));
      if (!js.at("break").is_null())
        st.break_info = BreakInfo{js.at("break").at("term").get<std::size_t>(), js.at("break").at("c_b").get<double>()};
      st.incoming = detail::sum_from_json(js.at("incoming"), n);
      for (const auto& t : js.at("terms")) {
        InterpolatedTerm term{t.at("coeff").get<double>(), detail::pauli_from_json(t.at("pauli"), n), 0.0, std::nullopt};
        if (t.contains("partner")) {
          term.partner_coeff = t.at("partner_coeff").get<double>();
          term.partner = detail::pauli_from_json(t.at("partner"), n);
        }
        st.terms.push_back(std::move(term));
      }
      st.outgoing = detail::sum_from_json(js.at("outgoing"), n);
      s.stages.push_back(std::move(st));
    }
    for (const auto& r : j.at("rewrites"))
      s.rewrites.push_back({r.at("boundary").get<std::size_t>(), detail::sum_from_json(r.at("before"), n),
                            detail::sum_from_json(r.at("after"), n)});
    s.final_terms = detail::sum_from_json(j.at("final_terms"), n);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("schedule JSON: ") + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(0, std::string("schedule JSON: ") + e.what());
  }
}

inline Schedule import_schedule(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), std::string("invalid JSON: ") + e.what());
  }
  return schedule_from_json(j);
}

inline Schedule load_schedule(const std::string& path) { return import_schedule(detail::read_file(path)); }

inline void save_schedule(const Schedule& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(0, "cannot open '" + path + "' for writing");
  out << export_schedule(s);
  if (!out) throw ParseError(0, "failed writing '" + path + "'");
}

}  // namespace hqc
