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

#include <string>
#include <vector>

#include "asap/core.hpp"
#include "asap/kpi.hpp"
#include "asap/roofline.hpp"

namespace asap {

// ---------------------------------------------------------------------------
// Workload-level bottleneck classification: reconciles the step-level KPI
// hypothesis with the per-op roofline evidence.
// ---------------------------------------------------------------------------

enum class BottleneckClass {
  kComputeBound,
  kHbmBound,
  kCommunicationBound,
  kInputBound,
  kIndeterminate,
};

inline std::string to_string(BottleneckClass c) {
  switch (c) {
    case BottleneckClass::kComputeBound: return "compute-bound";
    case BottleneckClass::kHbmBound: return "hbm-bound";
    case BottleneckClass::kCommunicationBound: return "communication-bound";
    case BottleneckClass::kInputBound: return "input-bound";
    case BottleneckClass::kIndeterminate: return "indeterminate";
  }
  return "indeterminate";
}

inline BottleneckClass parse_bottleneck_class(const std::string& text) {
  if (text == "compute-bound") return BottleneckClass::kComputeBound;
  if (text == "hbm-bound") return BottleneckClass::kHbmBound;
  if (text == "communication-bound") return BottleneckClass::kCommunicationBound;
  if (text == "input-bound") return BottleneckClass::kInputBound;
  if (text == "indeterminate") return BottleneckClass::kIndeterminate;
  throw SchemaError("unknown bottleneck class '" + text + "'");
}

// Classification walks a fixed rule ladder; the first rule that fires wins:
//   1. Low duty cycle means the accelerator is starved: input-bound.
//   2. When most top ops are collectives, the step is dominated by
//      inter-chip transfers: communication-bound.
//   3. When memory-bound ops plus collectives outnumber compute-bound ops
//      and the baseline mesh does no model sharding, the full model copy
//      per chip is the pressure source: hbm-bound.
//   4/5. Otherwise the majority label between compute-bound and
//      memory-bound non-collective ops decides.
// Ops whose roofline label is Unknown carry no evidence and are skipped;
// if nothing carries evidence the diagnosis is indeterminate.
inline BottleneckClass classify_bottleneck(const KpiReport& kpi,
                                           const std::vector<RooflineEntry>& top_ops,
                                           const ShardingMesh& baseline_mesh) {
  if (top_ops.empty()) throw EmptyTopOps("no ops to classify");

  if (kpi.duty_cycle_percent < kDutyCycleHealthyPercent)
    return BottleneckClass::kInputBound;

  std::size_t collective = 0, compute = 0, mem_noncoll = 0;
  for (const RooflineEntry& entry : top_ops) {
    if (is_collective(entry.op.category)) {
      ++collective;
      continue;
    }
    switch (entry.bottleneck) {
      case BottleneckLabel::kCompute: ++compute; break;
      case BottleneckLabel::kHbm:
      case BottleneckLabel::kVmemRead:
      case BottleneckLabel::kVmemWrite: ++mem_noncoll; break;
      case BottleneckLabel::kUnknown: break;
    }
  }

  if (2 * collective > top_ops.size())
    return BottleneckClass::kCommunicationBound;
  if (mem_noncoll + collective > compute && baseline_mesh.model == 1)
    return BottleneckClass::kHbmBound;
  if (collective + compute + mem_noncoll == 0)
    return BottleneckClass::kIndeterminate;
  if (compute >= mem_noncoll) return BottleneckClass::kComputeBound;
  return BottleneckClass::kHbmBound;
}

// ---------------------------------------------------------------------------
// Cross-checks linking KPI-level numbers to op-level evidence.
// ---------------------------------------------------------------------------

enum class ClaimKind {
  kDutyCycleConsistency,
  kCommunicationShare,
  kMeshImpact,
};

inline std::string to_string(ClaimKind k) {
  switch (k) {
    case ClaimKind::kDutyCycleConsistency: return "duty-cycle-consistency";
    case ClaimKind::kCommunicationShare: return "communication-share";
    case ClaimKind::kMeshImpact: return "mesh-impact";
  }
  return "mesh-impact";
}

inline ClaimKind parse_claim_kind(const std::string& text) {
  if (text == "duty-cycle-consistency") return ClaimKind::kDutyCycleConsistency;
  if (text == "communication-share") return ClaimKind::kCommunicationShare;
  if (text == "mesh-impact") return ClaimKind::kMeshImpact;
  throw SchemaError("unknown claim kind '" + text + "'");
}

struct CorrelationNote {
  ClaimKind claim_kind = ClaimKind::kMeshImpact;
  double metric = 0;
  std::string text;

  friend bool operator==(const CorrelationNote&, const CorrelationNote&) = default;
};

struct InefficiencySummary {
  BottleneckClass bottleneck_class = BottleneckClass::kIndeterminate;
  std::string text;

  friend bool operator==(const InefficiencySummary&, const InefficiencySummary&) = default;
};

struct AnalysisReport {
  ExperimentRecord experiment;
  KpiMetrics kpi;
  KpiReport kpi_report;
  std::vector<RooflineEntry> top_ops;
  std::vector<CorrelationNote> correlation_notes;
  InefficiencySummary inefficiency;
  bool hypothesis_confirmed = false;

  friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

// Share of the profile window spent on communication work: every analyzed
// op that either is a collective or participates in one (async completion
// fusions carry "collective" in their name).
inline double communication_time_share(const std::vector<RooflineEntry>& entries) {
  double share = 0;
  for (const RooflineEntry& e : entries) {
    if (is_collective(e.op.category) ||
        e.op.op_name.find("collective") != std::string::npos) {
      share += e.pct_of_total_time;
    }
  }
  return share;
}

inline BottleneckClass hypothesis_to_class(HypothesisKind h) {
  switch (h) {
    case HypothesisKind::kComputeSuspected: return BottleneckClass::kComputeBound;
    case HypothesisKind::kCommunicationSuspected:
      return BottleneckClass::kCommunicationBound;
    case HypothesisKind::kInputSuspected: return BottleneckClass::kInputBound;
  }
  return BottleneckClass::kIndeterminate;
}

inline AnalysisReport build_analysis_report(const ProfileBundle& bundle,
                                            const DeviceSpec& device,
                                            std::size_t top_k = 5) {
  AnalysisReport report;
  report.experiment = bundle.experiment;
  report.kpi = bundle.kpi;
  report.kpi_report = kpi_health_check(bundle.kpi);
  report.top_ops = analyze_bundle(bundle, device, top_k);
  if (report.top_ops.empty()) throw EmptyTopOps("bundle carries no ops");

  const BottleneckClass klass = classify_bottleneck(
      report.kpi_report, report.top_ops, bundle.experiment.baseline_mesh);

  CorrelationNote duty_note;
  duty_note.claim_kind = ClaimKind::kDutyCycleConsistency;
  duty_note.metric = report.kpi_report.duty_cycle_percent;
  duty_note.text =
      "Duty cycle of " +
      format_duty_cycle(report.kpi_report.duty_cycle_percent, bundle.kpi) +
      "% " +
      (report.kpi_report.duty_cycle_percent < kDutyCycleHealthyPercent
           ? "shows the accelerator idles between steps, pointing at the "
             "input pipeline rather than on-chip work."
           : "shows the accelerator stays busy, so the cost sits inside the "
             "profiled ops themselves.");
  report.correlation_notes.push_back(duty_note);

  CorrelationNote comm_note;
  comm_note.claim_kind = ClaimKind::kCommunicationShare;
  comm_note.metric = communication_time_share(report.top_ops);
  comm_note.text = "Collective and collective-linked ops account for " +
                   format_percent(comm_note.metric) +
                   "% of profiled time, against a step-level communication "
                   "overhead of " +
                   format_percent(report.kpi_report.communication_percent) + "%.";
  report.correlation_notes.push_back(comm_note);

  CorrelationNote mesh_note;
  mesh_note.claim_kind = ClaimKind::kMeshImpact;
  mesh_note.metric = static_cast<double>(bundle.experiment.baseline_mesh.model);
  mesh_note.text =
      "Baseline mesh " + mesh_to_string(bundle.experiment.baseline_mesh) +
      " on " + topology_to_string(bundle.experiment.topology) +
      (bundle.experiment.baseline_mesh.model == 1
           ? " keeps a full model copy per chip, so HBM holds the entire "
             "parameter and optimizer state."
           : " already shards the model, so per-chip memory pressure is "
             "shared across " +
                 std::to_string(bundle.experiment.baseline_mesh.model) +
                 " chips.");
  report.correlation_notes.push_back(mesh_note);

  report.inefficiency.bottleneck_class = klass;
  switch (klass) {
    case BottleneckClass::kComputeBound:
      report.inefficiency.text =
          "The step is compute-bound: the dominant ops run closest to the "
          "FLOP/s roof, so gains come from spreading arithmetic across more "
          "chips rather than from memory or transfer tuning.";
      break;
    case BottleneckClass::kHbmBound:
      report.inefficiency.text =
          "The step is HBM-bound: dominant ops are limited by HBM bandwidth, "
          "and the mesh leaves too much state resident per chip.";
      break;
    case BottleneckClass::kCommunicationBound:
      report.inefficiency.text =
          "The step is communication-bound: collectives dominate the "
          "profile, so inter-chip transfer volume is the lever to pull.";
      break;
    case BottleneckClass::kInputBound:
      report.inefficiency.text =
          "The step is input-bound: the accelerator waits on data, so "
          "host-side feeding must speed up before mesh changes matter.";
      break;
    case BottleneckClass::kIndeterminate:
      report.inefficiency.text =
          "The profile carries no usable per-op counters, so no bottleneck "
          "class can be assigned.";
      break;
  }

  report.hypothesis_confirmed =
      hypothesis_to_class(report.kpi_report.initial_hypothesis) == klass;
  return report;
}

}  // namespace asap
