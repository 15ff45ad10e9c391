// Copyright 2026 The asap Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "asap/core.hpp"
#include "asap/diagnosis.hpp"
#include "asap/knowledge.hpp"
#include "asap/kpi.hpp"
#include "asap/proposal.hpp"
#include "asap/roofline.hpp"

namespace asap {

namespace detail {

template <typename T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& value) {
  if (value) {
    j[key] = *value;
  } else {
    j[key] = nullptr;
  }
}

template <typename T>
std::optional<T> get_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Core types.
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const Topology& topo) {
  j = topology_to_string(topo);
}

inline void from_json(const nlohmann::json& j, Topology& topo) {
  topo = parse_topology(j.get<std::string>());
}

inline void to_json(nlohmann::json& j, const ShardingMesh& mesh) {
  j = nlohmann::json{{"replica", mesh.replica},
                     {"data", mesh.data},
                     {"model", mesh.model},
                     {"seq", mesh.seq}};
}

inline void from_json(const nlohmann::json& j, ShardingMesh& mesh) {
  mesh.replica = j.value("replica", std::int64_t{1});
  mesh.data = j.value("data", std::int64_t{1});
  mesh.model = j.value("model", std::int64_t{1});
  mesh.seq = j.value("seq", std::int64_t{1});
}

inline void to_json(nlohmann::json& j, const ExperimentRecord& exp) {
  j = nlohmann::json{{"experiment_id", exp.experiment_id},
                     {"device_type", exp.device_type},
                     {"topology", exp.topology},
                     {"baseline_mesh", exp.baseline_mesh}};
  detail::put_optional(j, "model_name", exp.model_name);
  detail::put_optional(j, "model_version", exp.model_version);
  detail::put_optional(j, "batch_size", exp.batch_size);
  detail::put_optional(j, "sequence_length", exp.sequence_length);
}

inline void from_json(const nlohmann::json& j, ExperimentRecord& exp) {
  j.at("experiment_id").get_to(exp.experiment_id);
  j.at("device_type").get_to(exp.device_type);
  j.at("topology").get_to(exp.topology);
  exp.baseline_mesh = j.value("baseline_mesh", ShardingMesh{});
  exp.model_name = detail::get_optional<std::string>(j, "model_name");
  exp.model_version = detail::get_optional<std::string>(j, "model_version");
  exp.batch_size = detail::get_optional<std::int64_t>(j, "batch_size");
  exp.sequence_length = detail::get_optional<std::int64_t>(j, "sequence_length");
}

inline void to_json(nlohmann::json& j, const KpiMetrics& kpi) {
  j = nlohmann::json{{"step_time_ms", kpi.step_time_ms},
                     {"tc_busy_time_ms", kpi.tc_busy_time_ms},
                     {"mean_all_reduce_us", kpi.mean_all_reduce_us}};
}

inline void from_json(const nlohmann::json& j, KpiMetrics& kpi) {
  j.at("step_time_ms").get_to(kpi.step_time_ms);
  j.at("tc_busy_time_ms").get_to(kpi.tc_busy_time_ms);
  j.at("mean_all_reduce_us").get_to(kpi.mean_all_reduce_us);
}

inline void to_json(nlohmann::json& j, const OpProfile& op) {
  j = nlohmann::json{{"op_name", op.op_name},
                     {"category", to_string(op.category)},
                     {"total_time_ps", op.total_time_ps},
                     {"occurrences", op.occurrences}};
  if (op.flops) j["flops"] = *op.flops;
  if (op.hbm_bytes) j["hbm_bytes"] = *op.hbm_bytes;
  if (op.vmem_read_bytes) j["vmem_read_bytes"] = *op.vmem_read_bytes;
  if (op.vmem_write_bytes) j["vmem_write_bytes"] = *op.vmem_write_bytes;
}

inline void from_json(const nlohmann::json& j, OpProfile& op) {
  j.at("op_name").get_to(op.op_name);
  op.category = parse_op_category(j.at("category").get<std::string>());
  j.at("total_time_ps").get_to(op.total_time_ps);
  j.at("occurrences").get_to(op.occurrences);
  op.flops = detail::get_optional<double>(j, "flops");
  op.hbm_bytes = detail::get_optional<double>(j, "hbm_bytes");
  op.vmem_read_bytes = detail::get_optional<double>(j, "vmem_read_bytes");
  op.vmem_write_bytes = detail::get_optional<double>(j, "vmem_write_bytes");
}

inline void to_json(nlohmann::json& j, const ProfileBundle& bundle) {
  j = nlohmann::json{{"experiment", bundle.experiment},
                     {"kpi", bundle.kpi},
                     {"ops", bundle.ops},
                     {"profile_total_time_ps", bundle.profile_total_time_ps}};
}

inline void from_json(const nlohmann::json& j, ProfileBundle& bundle) {
  j.at("experiment").get_to(bundle.experiment);
  j.at("kpi").get_to(bundle.kpi);
  j.at("ops").get_to(bundle.ops);
  j.at("profile_total_time_ps").get_to(bundle.profile_total_time_ps);
}

// ---------------------------------------------------------------------------
// File helpers. Unreadable files are IoFailure; unparsable content is
// SchemaError; violated domain invariants keep their own types.
// ---------------------------------------------------------------------------

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open file: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

inline ProfileBundle parse_profile_bundle(const nlohmann::json& j) {
  ProfileBundle bundle;
  try {
    bundle = j.get<ProfileBundle>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed profile bundle: ") + e.what());
  }
  validate_bundle(bundle);
  return bundle;
}

inline ProfileBundle load_profile_bundle(const std::filesystem::path& path) {
  return parse_profile_bundle(load_json_file(path));
}

// ---------------------------------------------------------------------------
// Device registry: a JSON object keyed by device family. A family key
// matches a device type when equal to it or when the device type continues
// it with a "-" (e.g. "tpu-v5p" matches "tpu-v5p-512"); the longest match
// wins.
// ---------------------------------------------------------------------------

using DeviceRegistry = std::map<std::string, DeviceSpec>;

inline DeviceRegistry parse_device_registry(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("device registry must be a JSON object");
  DeviceRegistry registry;
  for (const auto& [family, value] : j.items()) {
    DeviceSpec spec;
    spec.device_family = family;
    try {
      value.at("peak_flops_per_chip").get_to(spec.peak_flops_per_chip);
      value.at("peak_hbm_bw").get_to(spec.peak_hbm_bw);
      value.at("peak_vmem_bw").get_to(spec.peak_vmem_bw);
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError("malformed device spec for '" + family + "': " + e.what());
    }
    validate_device_spec(spec);
    registry[family] = spec;
  }
  return registry;
}

inline DeviceRegistry load_device_registry(const std::filesystem::path& path) {
  return parse_device_registry(load_json_file(path));
}

inline const DeviceSpec& resolve_device(const DeviceRegistry& registry,
                                        const std::string& device_type) {
  const DeviceSpec* best = nullptr;
  for (const auto& [family, spec] : registry) {
    const bool matches =
        device_type == family ||
        (device_type.size() > family.size() + 1 &&
         device_type.compare(0, family.size(), family) == 0 &&
         device_type[family.size()] == '-');
    if (matches && (!best || family.size() > best->device_family.size()))
      best = &spec;
  }
  if (!best)
    throw UnknownDevice("device type '" + device_type +
                        "' matches no registry family");
  return *best;
}

// ---------------------------------------------------------------------------
// Optimization history.
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const OptimizationRecord& record) {
  j = nlohmann::json{{"record_id", record.record_id},
                     {"device_family", record.device_family},
                     {"topology", record.topology},
                     {"bottleneck_class", to_string(record.bottleneck_class)},
                     {"before_mesh", record.before_mesh},
                     {"after_mesh", record.after_mesh},
                     {"impact_summary", record.impact_summary}};
  detail::put_optional(j, "profile_link", record.profile_link);
}

inline void from_json(const nlohmann::json& j, OptimizationRecord& record) {
  j.at("record_id").get_to(record.record_id);
  j.at("device_family").get_to(record.device_family);
  j.at("topology").get_to(record.topology);
  record.bottleneck_class =
      parse_bottleneck_class(j.at("bottleneck_class").get<std::string>());
  j.at("before_mesh").get_to(record.before_mesh);
  j.at("after_mesh").get_to(record.after_mesh);
  j.at("impact_summary").get_to(record.impact_summary);
  record.profile_link = detail::get_optional<std::string>(j, "profile_link");
}

inline std::vector<OptimizationRecord> load_history(
    const std::filesystem::path& path) {
  const nlohmann::json j = load_json_file(path);
  if (!j.is_array()) throw SchemaError("history must be a JSON array");
  std::vector<OptimizationRecord> records;
  try {
    records = j.get<std::vector<OptimizationRecord>>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed history record: ") + e.what());
  }
  for (const OptimizationRecord& record : records) validate_record(record);
  return records;
}

// ---------------------------------------------------------------------------
// Analysis results.
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const KpiReport& report) {
  j = nlohmann::json{{"step_time_ms", report.step_time_ms},
                     {"duty_cycle_percent", report.duty_cycle_percent},
                     {"communication_percent", report.communication_percent},
                     {"initial_hypothesis", to_string(report.initial_hypothesis)}};
}

inline void from_json(const nlohmann::json& j, KpiReport& report) {
  j.at("step_time_ms").get_to(report.step_time_ms);
  j.at("duty_cycle_percent").get_to(report.duty_cycle_percent);
  j.at("communication_percent").get_to(report.communication_percent);
  report.initial_hypothesis =
      parse_hypothesis(j.at("initial_hypothesis").get<std::string>());
}

inline void to_json(nlohmann::json& j, const RooflineEntry& entry) {
  j = nlohmann::json{{"op", entry.op},
                     {"pct_of_total_time", entry.pct_of_total_time},
                     {"avg_time_ps", entry.avg_time_ps},
                     {"compute_efficiency", entry.compute_efficiency},
                     {"hbm_bw_utilization", entry.hbm_bw_utilization},
                     {"vmem_read_utilization", entry.vmem_read_utilization},
                     {"vmem_write_utilization", entry.vmem_write_utilization},
                     {"max_mem_bw_utilization", entry.max_mem_bw_utilization},
                     {"roofline_efficiency", entry.roofline_efficiency},
                     {"bottleneck", to_string(entry.bottleneck)}};
}

inline void from_json(const nlohmann::json& j, RooflineEntry& entry) {
  j.at("op").get_to(entry.op);
  j.at("pct_of_total_time").get_to(entry.pct_of_total_time);
  j.at("avg_time_ps").get_to(entry.avg_time_ps);
  j.at("compute_efficiency").get_to(entry.compute_efficiency);
  j.at("hbm_bw_utilization").get_to(entry.hbm_bw_utilization);
  j.at("vmem_read_utilization").get_to(entry.vmem_read_utilization);
  j.at("vmem_write_utilization").get_to(entry.vmem_write_utilization);
  j.at("max_mem_bw_utilization").get_to(entry.max_mem_bw_utilization);
  j.at("roofline_efficiency").get_to(entry.roofline_efficiency);
  entry.bottleneck = parse_bottleneck_label(j.at("bottleneck").get<std::string>());
}

inline void to_json(nlohmann::json& j, const CorrelationNote& note) {
  j = nlohmann::json{{"claim_kind", to_string(note.claim_kind)},
                     {"metric", note.metric},
                     {"text", note.text}};
}

inline void from_json(const nlohmann::json& j, CorrelationNote& note) {
  note.claim_kind = parse_claim_kind(j.at("claim_kind").get<std::string>());
  j.at("metric").get_to(note.metric);
  j.at("text").get_to(note.text);
}

inline void to_json(nlohmann::json& j, const InefficiencySummary& summary) {
  j = nlohmann::json{{"bottleneck_class", to_string(summary.bottleneck_class)},
                     {"text", summary.text}};
}

inline void from_json(const nlohmann::json& j, InefficiencySummary& summary) {
  summary.bottleneck_class =
      parse_bottleneck_class(j.at("bottleneck_class").get<std::string>());
  j.at("text").get_to(summary.text);
}

inline void to_json(nlohmann::json& j, const AnalysisReport& report) {
  j = nlohmann::json{{"experiment", report.experiment},
                     {"kpi", report.kpi},
                     {"kpi_report", report.kpi_report},
                     {"top_ops", report.top_ops},
                     {"correlation_notes", report.correlation_notes},
                     {"inefficiency", report.inefficiency},
                     {"hypothesis_confirmed", report.hypothesis_confirmed}};
}

inline void from_json(const nlohmann::json& j, AnalysisReport& report) {
  j.at("experiment").get_to(report.experiment);
  j.at("kpi").get_to(report.kpi);
  j.at("kpi_report").get_to(report.kpi_report);
  j.at("top_ops").get_to(report.top_ops);
  j.at("correlation_notes").get_to(report.correlation_notes);
  j.at("inefficiency").get_to(report.inefficiency);
  j.at("hypothesis_confirmed").get_to(report.hypothesis_confirmed);
}

// ---------------------------------------------------------------------------
// Proposals, recommendation, rebuttal.
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const Citation& citation) {
  j = nlohmann::json{{"kind", to_string(citation.kind)}, {"id", citation.id}};
}

inline void from_json(const nlohmann::json& j, Citation& citation) {
  citation.kind = parse_citation_kind(j.at("kind").get<std::string>());
  j.at("id").get_to(citation.id);
}

inline void to_json(nlohmann::json& j, const ReasoningPoint& point) {
  j = nlohmann::json{{"tactic", point.tactic},
                     {"target", to_string(point.target)},
                     {"text", point.text}};
}

inline void from_json(const nlohmann::json& j, ReasoningPoint& point) {
  j.at("tactic").get_to(point.tactic);
  point.target = parse_bottleneck_class(j.at("target").get<std::string>());
  j.at("text").get_to(point.text);
}

inline void to_json(nlohmann::json& j, const Proposal& proposal) {
  nlohmann::json impact = nlohmann::json::object();
  for (const auto& [metric, direction] : proposal.expected_impact) {
    impact[metric] = to_string(direction);
  }
  j = nlohmann::json{{"mesh", proposal.mesh},
                     {"rank", proposal.rank},
                     {"reasoning", proposal.reasoning},
                     {"expected_impact", impact},
                     {"trade_offs", proposal.trade_offs},
                     {"citations", proposal.citations}};
}

inline void from_json(const nlohmann::json& j, Proposal& proposal) {
  j.at("mesh").get_to(proposal.mesh);
  j.at("rank").get_to(proposal.rank);
  j.at("reasoning").get_to(proposal.reasoning);
  proposal.expected_impact.clear();
  for (const auto& [metric, direction] : j.at("expected_impact").items()) {
    proposal.expected_impact[metric] = parse_direction(direction.get<std::string>());
  }
  j.at("trade_offs").get_to(proposal.trade_offs);
  j.at("citations").get_to(proposal.citations);
}

inline void to_json(nlohmann::json& j, const JustificationPoint& point) {
  j = nlohmann::json{{"kind", point.kind}, {"text", point.text}};
}

inline void from_json(const nlohmann::json& j, JustificationPoint& point) {
  j.at("kind").get_to(point.kind);
  j.at("text").get_to(point.text);
}

inline void to_json(nlohmann::json& j, const Recommendation& rec) {
  j = nlohmann::json{{"chosen", rec.chosen},
                     {"confidence_percent", rec.confidence_percent},
                     {"justification", rec.justification}};
}

inline void from_json(const nlohmann::json& j, Recommendation& rec) {
  j.at("chosen").get_to(rec.chosen);
  j.at("confidence_percent").get_to(rec.confidence_percent);
  j.at("justification").get_to(rec.justification);
}

inline void to_json(nlohmann::json& j, const Rebuttal& rebuttal) {
  j = nlohmann::json{{"challenge", to_string(rebuttal.challenge)},
                     {"reaffirmed_mesh", rebuttal.reaffirmed_mesh},
                     {"confidence_percent", rebuttal.confidence_percent},
                     {"evidence", rebuttal.evidence},
                     {"caveats", rebuttal.caveats},
                     {"alternatives", rebuttal.alternatives},
                     {"staged_plan", rebuttal.staged_plan}};
}

inline void from_json(const nlohmann::json& j, Rebuttal& rebuttal) {
  rebuttal.challenge = parse_challenge_kind(j.at("challenge").get<std::string>());
  j.at("reaffirmed_mesh").get_to(rebuttal.reaffirmed_mesh);
  j.at("confidence_percent").get_to(rebuttal.confidence_percent);
  j.at("evidence").get_to(rebuttal.evidence);
  j.at("caveats").get_to(rebuttal.caveats);
  j.at("alternatives").get_to(rebuttal.alternatives);
  j.at("staged_plan").get_to(rebuttal.staged_plan);
}

}  // namespace asap
