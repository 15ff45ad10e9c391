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
#include <type_traits>
#include <variant>
#include <vector>

#include "asap/diagnosis.hpp"
#include "asap/kpi.hpp"
#include "asap/proposal.hpp"

namespace asap {

// ---------------------------------------------------------------------------
// Narration boundary. All numbers and decisions are computed upstream; a
// reasoner only turns the structured result into text. The builtin reasoner
// is a pure template engine, so identical context yields identical text.
// ---------------------------------------------------------------------------

struct ProposalContext {
  std::string experiment_id;
  std::vector<Proposal> proposals;
};

using RenderContext =
    std::variant<AnalysisReport, ProposalContext, Recommendation, Rebuttal>;

struct RenderResult {
  std::string text;
  std::vector<std::string> warnings;  // e.g. remote fallback notices
};

class Reasoner {
 public:
  virtual ~Reasoner() = default;
  virtual RenderResult render(const RenderContext& context) = 0;
};

namespace detail {

inline std::string render_report_text(const AnalysisReport& report) {
  const ExperimentRecord& exp = report.experiment;
  std::string out;
  out += "=== Analysis Report: " + exp.experiment_id + " ===\n";
  out += "Device: " + exp.device_type + " (topology " +
         topology_to_string(exp.topology) + ", " +
         std::to_string(exp.topology.chip_count) + " chips)\n";
  out += "Baseline mesh: " + mesh_to_string(exp.baseline_mesh) + "\n";
  out += "Model: " + exp.model_name.value_or("-") + ", version " +
         exp.model_version.value_or("-") + ", batch size " +
         (exp.batch_size ? std::to_string(*exp.batch_size) : "-") +
         ", sequence length " +
         (exp.sequence_length ? std::to_string(*exp.sequence_length) : "-") +
         "\n\n";

  out += "A. High-Level KPI Health Check\n";
  out += "  Step time: " + format_with_commas(report.kpi_report.step_time_ms) +
         " ms\n";
  out += "  Duty cycle: " +
         format_duty_cycle(report.kpi_report.duty_cycle_percent, report.kpi) +
         "% (tensor-core busy " + format_with_commas(report.kpi.tc_busy_time_ms) +
         " ms)\n";
  out += "  Communication overhead: " +
         format_percent(report.kpi_report.communication_percent) +
         "% (mean all-reduce " +
         format_with_commas(report.kpi.mean_all_reduce_us) + " us)\n";
  out += "  Initial hypothesis: " +
         to_string(report.kpi_report.initial_hypothesis) + "\n\n";

  out += "B. Detailed HLO/Roofline Bottleneck Identification\n";
  out += "  Top " + std::to_string(report.top_ops.size()) +
         " ops by total self time:\n";
  int row = 0;
  for (const RooflineEntry& e : report.top_ops) {
    out += "  " + std::to_string(++row) + ". " + e.op.op_name + " [" +
           to_string(e.op.category) + "]\n";
    out += "     time share " + format_percent(e.pct_of_total_time) +
           "%, occurrences " + std::to_string(e.op.occurrences) + ", avg " +
           format_with_commas(e.avg_time_ps) + " ps\n";
    out += "     compute eff " + format_percent(e.compute_efficiency) +
           "%, HBM BW " + format_percent(e.hbm_bw_utilization) +
           "%, VMEM read " + format_percent(e.vmem_read_utilization) +
           "%, VMEM write " + format_percent(e.vmem_write_utilization) + "%\n";
    out += "     roofline efficiency " + format_percent(e.roofline_efficiency) +
           "%, bottleneck: " + to_string(e.bottleneck) + "\n";
  }
  out += "\nC. Correlating KPI and HLO/Roofline\n";
  for (const CorrelationNote& note : report.correlation_notes) {
    out += "  - [" + to_string(note.claim_kind) + "] " + note.text + "\n";
  }
  out += "\nD. Structured Analysis of Inefficiency\n";
  out += "  Bottleneck class: " + to_string(report.inefficiency.bottleneck_class) +
         "\n";
  out += "  " + report.inefficiency.text + "\n";
  out += std::string("  Initial hypothesis ") +
         (report.hypothesis_confirmed ? "confirmed" : "not fully supported") +
         " by the op-level evidence.\n";
  return out;
}

inline std::string render_proposals_text(const ProposalContext& context) {
  std::string out;
  out += "=== Sharding Proposals: " + context.experiment_id + " ===\n";
  for (const Proposal& p : context.proposals) {
    out += "\nProposal " + std::to_string(p.rank) + "\n";
    out += "  New ICI Mesh: " + mesh_to_string(p.mesh) + "\n";
    out += "  Reasoning:\n";
    for (const ReasoningPoint& point : p.reasoning) {
      out += "    - [" + point.tactic + " -> " + to_string(point.target) + "] " +
             point.text + "\n";
    }
    out += "  Expected Impact:\n";
    for (const auto& [metric, direction] : p.expected_impact) {
      out += "    - " + metric + ": " + to_string(direction) + "\n";
    }
    out += "  Trade-offs:\n";
    for (const std::string& item : p.trade_offs) {
      out += "    - " + item + "\n";
    }
    out += "  Citations:\n";
    if (p.citations.empty()) out += "    - none\n";
    for (const Citation& c : p.citations) {
      out += "    - [" + to_string(c.kind) + "] " + c.id + "\n";
    }
  }
  return out;
}

inline std::string render_recommendation_text(const Recommendation& rec) {
  std::string out;
  out += "=== Recommendation ===\n";
  out += "Start with Proposal " + std::to_string(rec.chosen.rank) + ": " +
         mesh_to_string(rec.chosen.mesh) + "\n";
  out += "Confidence: " + format_percent(rec.confidence_percent) + "%\n";
  out += "Justification:\n";
  for (const JustificationPoint& point : rec.justification) {
    out += "  - [" + point.kind + "] " + point.text + "\n";
  }
  return out;
}

inline std::string render_rebuttal_text(const Rebuttal& rebuttal) {
  std::string out;
  out += "=== Challenge Response (" + to_string(rebuttal.challenge) + ") ===\n";
  out += "The recommendation stands: " + mesh_to_string(rebuttal.reaffirmed_mesh) +
         " at " + format_percent(rebuttal.confidence_percent) + "% confidence.\n";
  out += "Evidence:\n";
  for (const std::string& line : rebuttal.evidence) {
    out += "  - " + line + "\n";
  }
  out += "Caveats:\n";
  for (const std::string& line : rebuttal.caveats) {
    out += "  - " + line + "\n";
  }
  if (!rebuttal.alternatives.empty()) {
    out += "Alternatives considered:\n";
    for (const std::string& line : rebuttal.alternatives) {
      out += "  - " + line + "\n";
    }
  }
  if (!rebuttal.staged_plan.empty()) {
    out += "Staged experiment plan:\n";
    for (const std::string& line : rebuttal.staged_plan) {
      out += "  - " + line + "\n";
    }
  }
  return out;
}

}  // namespace detail

class BuiltinReasoner : public Reasoner {
 public:
  RenderResult render(const RenderContext& context) override {
    RenderResult result;
    result.text = std::visit(
        [](const auto& value) -> std::string {
          using T = std::decay_t<decltype(value)>;
          if constexpr (std::is_same_v<T, AnalysisReport>) {
            return detail::render_report_text(value);
          } else if constexpr (std::is_same_v<T, ProposalContext>) {
            return detail::render_proposals_text(value);
          } else if constexpr (std::is_same_v<T, Recommendation>) {
            return detail::render_recommendation_text(value);
          } else {
            return detail::render_rebuttal_text(value);
          }
        },
        context);
    return result;
  }
};

}  // namespace asap
