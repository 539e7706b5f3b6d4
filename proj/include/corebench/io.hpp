#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corebench/benchmarks.hpp"
#include "corebench/environment.hpp"
#include "corebench/errors.hpp"
#include "corebench/experiments.hpp"
#include "corebench/mechanisms.hpp"
#include "corebench/profile.hpp"
#include "corebench/verification.hpp"

// JSON and CSV encodings. Doubles are written in shortest round-trip form,
// so every emitted file re-parses to the same values. Non-finite ratios are
// written as null and read back as +inf.

namespace corebench::io {

using json = nlohmann::json;

namespace detail {

inline const json& field(const json& j, const char* name) {
  if (!j.is_object()) throw InvalidInput("document: expected a JSON object");
  auto it = j.find(name);
  if (it == j.end()) throw InvalidInput(std::string(name) + ": missing field");
  return *it;
}

inline std::vector<double> number_list(const json& j, const char* name) {
  if (!j.is_array()) throw InvalidInput(std::string(name) + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw InvalidInput(std::string(name) + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
inline double null_as_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

inline json payments_object(const std::map<std::size_t, double>& m) {
  json o = json::object();
  for (const auto& [agent, pay] : m) o[std::to_string(agent)] = pay;
  return o;
}

inline std::map<std::size_t, double> payments_from(const json& j) {
  if (!j.is_object()) throw InvalidInput("payments: expected an object");
  std::map<std::size_t, double> m;
  for (const auto& [key, val] : j.items()) {
    std::size_t pos = 0;
    std::size_t agent = 0;
    try {
      agent = std::stoul(key, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != key.size() || key.empty() || !val.is_number())
      throw InvalidInput("payments: bad entry '" + key + "'");
    m[agent] = val.get<double>();
  }
  return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parsing

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("document: ") + e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("input: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("output: cannot write '" + path + "'");
  out << content;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Profiles and environments

inline json to_json(const TextImageProfile& p) {
  return {{"k", p.slots()},
          {"text", std::vector<double>(p.text_values().begin(), p.text_values().end())},
          {"image", std::vector<double>(p.image_values().begin(), p.image_values().end())}};
}

inline TextImageProfile profile_from_json(const json& j) {
  const json& k = detail::field(j, "k");
  if (!k.is_number_integer() || k.get<long long>() < 1)
    throw InvalidInput("k: expected a positive integer");
  std::vector<double> text = j.contains("text") ? detail::number_list(j["text"], "text")
                                                : std::vector<double>{};
  std::vector<double> image = j.contains("image") ? detail::number_list(j["image"], "image")
                                                  : std::vector<double>{};
  return TextImageProfile::create(k.get<std::size_t>(), std::move(text), std::move(image));
}

inline json to_json(const GenericEnvironment& env) {
  json sets = json::array();
  for (Coalition c : env.feasible()) sets.push_back(members(c));
  return {{"values", env.values()}, {"feasible", sets}};
}

inline GenericEnvironment environment_from_json(const json& j) {
  std::vector<double> values = detail::number_list(detail::field(j, "values"), "values");
  const json& f = detail::field(j, "feasible");
  if (!f.is_array()) throw InvalidInput("feasible: expected an array of index arrays");
  std::vector<std::vector<std::size_t>> sets;
  for (std::size_t s = 0; s < f.size(); ++s) {
    const std::string where = "feasible[" + std::to_string(s) + "]";
    if (!f[s].is_array()) throw InvalidInput(where + ": expected an array of indices");
    std::vector<std::size_t> set;
    for (const auto& idx : f[s]) {
      if (!idx.is_number_integer() || idx.get<long long>() < 0)
        throw InvalidInput(where + ": expected non-negative integers");
      set.push_back(idx.get<std::size_t>());
    }
    sets.push_back(std::move(set));
  }
  const bool closed = j.contains("downwardClosed") && j["downwardClosed"].get<bool>();
  return GenericEnvironment::from_lists(std::move(values), sets, closed);
}

// ---------------------------------------------------------------------------
// Outcomes

inline const char* outcome_kind(const TextImageProfile& p, const DeterministicOutcome& o) {
  if (o.winners.empty()) return "none";
  return p.kind_of(o.winners.front()) == AdKind::Text ? "text" : "image";
}

inline json to_json(const TextImageProfile& p, const DeterministicOutcome& o) {
  return {{"kind", outcome_kind(p, o)},
          {"winners", o.winners},
          {"payments", detail::payments_object(o.payments)},
          {"revenue", o.revenue()}};
}

inline DeterministicOutcome deterministic_outcome_from_json(const json& j) {
  DeterministicOutcome o;
  o.winners = detail::field(j, "winners").get<std::vector<std::size_t>>();
  o.payments = detail::payments_from(detail::field(j, "payments"));
  return o;
}

/// "payments" holds expected payments; "winProb" is the probability the
/// allocation happens and "expectedPayment" the expected revenue.
inline json to_json(const RandomizedOutcome& o) {
  json probs = json::object();
  for (const auto& [agent, x] : o.win_probability) probs[std::to_string(agent)] = x;
  json j = {{"kind", to_string(o.kind)},
            {"winners", o.winners()},
            {"payments", detail::payments_object(o.expected_payment)},
            {"winProb", o.probability},
            {"expectedPayment", o.expected_revenue()},
            {"agentWinProb", probs}};
  if (o.kind == AllocationKind::TextSet) j["textSetSize"] = o.text_set_size;
  return j;
}

inline RandomizedOutcome randomized_outcome_from_json(const json& j) {
  RandomizedOutcome o;
  const std::string kind = detail::field(j, "kind").get<std::string>();
  if (kind == "text")
    o.kind = AllocationKind::TextSet;
  else if (kind == "image")
    o.kind = AllocationKind::ImageLottery;
  else if (kind == "none")
    o.kind = AllocationKind::Unallocated;
  else
    throw InvalidInput("kind: unknown allocation kind '" + kind + "'");
  o.probability = detail::field(j, "winProb").get<double>();
  o.expected_payment = detail::payments_from(detail::field(j, "payments"));
  o.win_probability = detail::payments_from(detail::field(j, "agentWinProb"));
  if (j.contains("textSetSize")) o.text_set_size = j["textSetSize"].get<std::size_t>();
  return o;
}

inline json to_json(const LotteryRealization& r) {
  return {{"seed", r.seed},
          {"index", r.index},
          {"winners", r.winners}, {"payments", detail::payments_object(r.payments)}};
}

inline LotteryRealization realization_from_json(const json& j) {
  LotteryRealization r;
  r.seed = detail::field(j, "seed").get<std::uint64_t>();
  r.index = detail::field(j, "index").get<std::uint64_t>();
  r.winners = detail::field(j, "winners").get<std::vector<std::size_t>>();
  r.payments = detail::payments_from(detail::field(j, "payments"));
  return r;
}

// ---------------------------------------------------------------------------
// Benchmarks

inline json to_json(const BenchmarkReport& r) {
  return {{"coreRev", r.core_rev}, {"vcgRev", r.vcg_rev}, {"mvRev", r.mv_rev}, {"notes", r.notes}};
}

inline BenchmarkReport benchmark_report_from_json(const json& j) {
  BenchmarkReport r;
  r.core_rev = detail::field(j, "coreRev").get<double>();
  r.vcg_rev = detail::field(j, "vcgRev").get<double>();
  r.mv_rev = detail::field(j, "mvRev").get<double>();
  if (j.contains("notes")) r.notes = j["notes"].get<std::map<std::string, std::string>>();
  return r;
}

// ---------------------------------------------------------------------------
// Verification

inline json to_json(const ICViolation& v) {
  return {{"agent", v.agent},
          {"trueValue", v.true_value},
          {"deviation", v.deviation},
          {"utilityGain", v.utility_gain}};
}

inline ICViolation ic_violation_from_json(const json& j) {
  return {detail::field(j, "agent").get<std::size_t>(), detail::field(j, "trueValue").get<double>(),
          detail::field(j, "deviation").get<double>(), detail::field(j, "utilityGain").get<double>()};
}

inline json to_json(const RatioRecord& r) {
  return {{"profile", r.profile_id},
          {"k", r.k},
          {"coreRev", r.core_rev},
          {"mechanismRevenue", r.mechanism_revenue},
          {"ratio", detail::finite_or_null(r.ratio)}};
}

inline RatioRecord ratio_record_from_json(const json& j) {
  return {detail::field(j, "profile").get<std::size_t>(), detail::field(j, "k").get<std::size_t>(),
          detail::field(j, "coreRev").get<double>(),
          detail::field(j, "mechanismRevenue").get<double>(),
          detail::null_as_inf(detail::field(j, "ratio"))};
}

inline json to_json(const VerificationReport& r) {
  json ic = json::array();
  for (const auto& [trial, v] : r.ic_violations) {
    json e = to_json(v);
    e["trial"] = trial;
    ic.push_back(e);
  }
  json mono = json::array();
  for (const auto& f : r.monotonicity_failures) mono.push_back({{"trial", f.trial}, {"agent", f.agent}});
  json cv = json::array();
  for (const auto& c : r.critical_value_mismatches)
    cv.push_back({{"trial", c.trial},
                  {"agent", c.agent},
                  {"closedForm", c.closed_form},
                  {"bisection", c.bisection}});
  return {{"mechanism", r.mechanism},
          {"trials", r.trials},
          {"seed", r.seed},
          {"clean", r.clean()},
          {"icViolations", ic},
          {"monotonicityFailures", mono},
          {"anonymityFailures", r.anonymity_failures},
          {"criticalValueMismatches", cv},
          {"criticalValuesChecked", r.critical_values_checked}};
}

// ---------------------------------------------------------------------------
// Sweeps

inline json to_json(const SweepResult& s) {
  return {{"k", s.k},
          {"samples", s.samples},
          {"meanCoreRev", s.mean_core_rev},
          {"seCoreRev", s.se_core_rev},
          {"meanRevenue", s.mean_revenue},
          {"seRevenue", s.se_revenue},
          {"worstRatio", detail::finite_or_null(s.worst_ratio)},
          {"meanRatio", detail::finite_or_null(s.mean_ratio)}};
}

inline SweepResult sweep_result_from_json(const json& j) {
  SweepResult s;
  s.k = detail::field(j, "k").get<std::size_t>();
  s.samples = detail::field(j, "samples").get<std::size_t>();
  s.mean_core_rev = detail::field(j, "meanCoreRev").get<double>();
  s.se_core_rev = detail::field(j, "seCoreRev").get<double>();
  s.mean_revenue = detail::field(j, "meanRevenue").get<double>();
  s.se_revenue = detail::field(j, "seRevenue").get<double>();
  s.worst_ratio = detail::null_as_inf(detail::field(j, "worstRatio"));
  s.mean_ratio = detail::null_as_inf(detail::field(j, "meanRatio"));
  return s;
}

inline constexpr const char* kSweepCsvHeader =
    "k,samples,mean_corerev,se_corerev,mean_revenue,se_revenue,worst_ratio";

inline std::string fmt17(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string to_csv(const std::vector<SweepResult>& rows) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "," + std::to_string(r.samples) + "," + fmt17(r.mean_core_rev) +
           "," + fmt17(r.se_core_rev) + "," + fmt17(r.mean_revenue) + "," + fmt17(r.se_revenue) +
           "," + fmt17(r.worst_ratio) + "\n";
  }
  return out;
}

/// Parses CSV written by to_csv (mean_ratio is not part of the CSV and comes back as 1).
inline std::vector<SweepResult> sweep_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader)
    throw InvalidInput("csv: unexpected header");
  std::vector<SweepResult> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw InvalidInput("csv: expected 7 columns");
    SweepResult r;
    r.k = std::stoul(cells[0]);
    r.samples = std::stoul(cells[1]);
    r.mean_core_rev = std::stod(cells[2]);
    r.se_core_rev = std::stod(cells[3]);
    r.mean_revenue = std::stod(cells[4]);
    r.se_revenue = std::stod(cells[5]);
    r.worst_ratio = std::stod(cells[6]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace corebench::io
