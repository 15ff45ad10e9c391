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

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asap/core.hpp"
#include "asap/diagnosis.hpp"
#include "asap/knowledge.hpp"

namespace asap {

// ---------------------------------------------------------------------------
// Ranked sharding proposals: candidate meshes, reasoning, expected impact,
// trade-offs, citations, plus the recommendation and challenge rebuttals.
// ---------------------------------------------------------------------------

enum class Direction {
  kDecrease,
  kIncrease,
  kSlightIncrease,
  kRemainHigh,
  kReduction,
  kUnknown,
};

inline std::string to_string(Direction d) {
  switch (d) {
    case Direction::kDecrease: return "decrease";
    case Direction::kIncrease: return "increase";
    case Direction::kSlightIncrease: return "slight-increase";
    case Direction::kRemainHigh: return "remain-high";
    case Direction::kReduction: return "reduction";
    case Direction::kUnknown: return "unknown";
  }
  return "unknown";
}

inline Direction parse_direction(const std::string& text) {
  if (text == "decrease") return Direction::kDecrease;
  if (text == "increase") return Direction::kIncrease;
  if (text == "slight-increase") return Direction::kSlightIncrease;
  if (text == "remain-high") return Direction::kRemainHigh;
  if (text == "reduction") return Direction::kReduction;
  if (text == "unknown") return Direction::kUnknown;
  throw SchemaError("unknown impact direction '" + text + "'");
}

enum class CitationKind { kHistorical, kKnowledge };

inline std::string to_string(CitationKind k) {
  return k == CitationKind::kHistorical ? "historical" : "knowledge";
}

inline CitationKind parse_citation_kind(const std::string& text) {
  if (text == "historical") return CitationKind::kHistorical;
  if (text == "knowledge") return CitationKind::kKnowledge;
  throw SchemaError("unknown citation kind '" + text + "'");
}

struct Citation {
  CitationKind kind = CitationKind::kKnowledge;
  std::string id;

  friend bool operator==(const Citation&, const Citation&) = default;
};

struct ReasoningPoint {
  std::string tactic;
  BottleneckClass target = BottleneckClass::kIndeterminate;
  std::string text;

  friend bool operator==(const ReasoningPoint&, const ReasoningPoint&) = default;
};

struct Proposal {
  ShardingMesh mesh;
  int rank = 1;
  std::vector<ReasoningPoint> reasoning;
  std::map<std::string, Direction> expected_impact;
  std::vector<std::string> trade_offs;
  std::vector<Citation> citations;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

struct JustificationPoint {
  std::string kind;  // "directness", "risk", or "secondary-benefits"
  std::string text;

  friend bool operator==(const JustificationPoint&, const JustificationPoint&) = default;
};

struct Recommendation {
  Proposal chosen;
  double confidence_percent = 85;
  std::vector<JustificationPoint> justification;

  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

enum class ChallengeKind { kAreYouSure, kOthersLookBetter, kStillConfident };

inline std::string to_string(ChallengeKind k) {
  switch (k) {
    case ChallengeKind::kAreYouSure: return "are-you-sure";
    case ChallengeKind::kOthersLookBetter: return "others-look-better";
    case ChallengeKind::kStillConfident: return "still-confident";
  }
  return "are-you-sure";
}

inline ChallengeKind parse_challenge_kind(const std::string& text) {
  if (text == "are-you-sure") return ChallengeKind::kAreYouSure;
  if (text == "others-look-better") return ChallengeKind::kOthersLookBetter;
  if (text == "still-confident") return ChallengeKind::kStillConfident;
  throw SchemaError("unknown challenge kind '" + text + "'");
}

struct Rebuttal {
  ChallengeKind challenge = ChallengeKind::kAreYouSure;
  ShardingMesh reaffirmed_mesh;
  double confidence_percent = 85;
  std::vector<std::string> evidence;
  std::vector<std::string> caveats;
  std::vector<std::string> alternatives;  // OthersLookBetter only
  std::vector<std::string> staged_plan;   // OthersLookBetter only

  friend bool operator==(const Rebuttal&, const Rebuttal&) = default;
};

// ---------------------------------------------------------------------------
// Candidate space: every ordered (replica, data, model, seq) divisor
// factorization of the chip count.
// ---------------------------------------------------------------------------

struct MeshEnumeration {
  std::vector<ShardingMesh> meshes;
  bool truncated = false;
};

inline MeshEnumeration enumerate_meshes(std::int64_t chip_count,
                                        std::size_t max_results = 10000) {
  if (chip_count < 1) throw InvariantError("chip_count must be >= 1");
  MeshEnumeration out;
  for (std::int64_t r = 1; r <= chip_count; ++r) {
    if (chip_count % r) continue;
    const std::int64_t after_r = chip_count / r;
    for (std::int64_t d = 1; d <= after_r; ++d) {
      if (after_r % d) continue;
      const std::int64_t after_d = after_r / d;
      for (std::int64_t m = 1; m <= after_d; ++m) {
        if (after_d % m) continue;
        if (out.meshes.size() == max_results) {
          out.truncated = true;
          return out;
        }
        out.meshes.push_back(ShardingMesh{r, d, m, after_d / m});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Playbook: per-class mesh rewrites in priority order. A transform that
// breaks divisibility, leaves the mesh unchanged, or no longer covers the
// topology is skipped.
// ---------------------------------------------------------------------------

struct PlaybookCandidate {
  ShardingMesh mesh;
  int transform_index = 0;  // position in the class's transform table

  friend bool operator==(const PlaybookCandidate&, const PlaybookCandidate&) = default;
};

inline std::vector<PlaybookCandidate> playbook_transforms(
    BottleneckClass klass, const ShardingMesh& baseline, const Topology& topology) {
  validate_mesh(baseline, topology);
  if (klass == BottleneckClass::kInputBound ||
      klass == BottleneckClass::kIndeterminate) {
    throw NoPlaybook("no mesh playbook for class '" + to_string(klass) + "'");
  }

  std::vector<PlaybookCandidate> candidates;
  auto offer = [&](std::optional<ShardingMesh> mesh, int transform_index) {
    if (!mesh || *mesh == baseline || !mesh_fits(*mesh, topology)) return;
    for (const PlaybookCandidate& seen : candidates) {
      if (seen.mesh == *mesh) return;
    }
    candidates.push_back({*mesh, transform_index});
  };
  // Shifts `amount` ways of parallelism from axis `from` onto axis `to`.
  auto shift = [&](std::int64_t ShardingMesh::*from, std::int64_t ShardingMesh::*to,
                   std::int64_t amount) -> std::optional<ShardingMesh> {
    if (amount < 2 || baseline.*from % amount) return std::nullopt;
    ShardingMesh next = baseline;
    next.*from /= amount;
    next.*to *= amount;
    return next;
  };

  switch (klass) {
    case BottleneckClass::kComputeBound:
      offer(shift(&ShardingMesh::seq, &ShardingMesh::data, 2), 0);
      offer(shift(&ShardingMesh::seq, &ShardingMesh::model, 2), 1);
      offer(shift(&ShardingMesh::model, &ShardingMesh::data, 2), 2);
      break;
    case BottleneckClass::kHbmBound: {
      // Deepest model sharding a topology axis can provide without touching
      // the replica/data split.
      const std::int64_t budget =
          topology.chip_count / (baseline.replica * baseline.data);
      std::int64_t m = 1;
      for (int axis : topology.dims) {
        if (axis <= budget) m = std::max<std::int64_t>(m, axis);
      }
      offer(shift(&ShardingMesh::seq, &ShardingMesh::model, m), 0);
      offer(shift(&ShardingMesh::data, &ShardingMesh::model, m), 1);
      offer(shift(&ShardingMesh::seq, &ShardingMesh::model, m / 2), 2);
      break;
    }
    case BottleneckClass::kCommunicationBound:
      offer(shift(&ShardingMesh::model, &ShardingMesh::data, 2), 0);
      offer(shift(&ShardingMesh::data, &ShardingMesh::model, 2), 1);
      offer(shift(&ShardingMesh::model, &ShardingMesh::data, baseline.model), 2);
      break;
    default:
      break;
  }
  return candidates;
}

// ---------------------------------------------------------------------------
// Tactic names, impact directions, and trade-offs per class and transform.
// ---------------------------------------------------------------------------

namespace detail {

inline const char* tactic_name(BottleneckClass klass, int transform_index) {
  static constexpr const char* kCompute[] = {
      "increase-data-parallelism", "increase-model-parallelism",
      "prioritize-data-parallelism"};
  static constexpr const char* kHbm[] = {
      "introduce-model-parallelism", "model-parallelism-over-data",
      "balanced-hybrid-parallelism"};
  static constexpr const char* kComm[] = {
      "reduce-model-parallelism", "aggressive-model-parallelism",
      "eliminate-model-parallelism"};
  switch (klass) {
    case BottleneckClass::kComputeBound: return kCompute[transform_index];
    case BottleneckClass::kHbmBound: return kHbm[transform_index];
    case BottleneckClass::kCommunicationBound: return kComm[transform_index];
    default: return "repeat-proven-configuration";
  }
}

inline std::map<std::string, Direction> impact_table(BottleneckClass klass,
                                                     int transform_index) {
  using D = Direction;
  auto row = [](D step, D duty, D comm, D hbm) {
    return std::map<std::string, Direction>{{"step_time", step},
                                            {"duty_cycle", duty},
                                            {"communication_overhead", comm},
                                            {"hbm_memory", hbm}};
  };
  switch (klass) {
    case BottleneckClass::kComputeBound:
      if (transform_index == 2)
        return row(D::kDecrease, D::kRemainHigh, D::kSlightIncrease, D::kIncrease);
      return row(D::kDecrease, D::kRemainHigh, D::kSlightIncrease, D::kDecrease);
    case BottleneckClass::kHbmBound:
      return row(D::kReduction, D::kDecrease, D::kSlightIncrease, D::kReduction);
    case BottleneckClass::kCommunicationBound:
      if (transform_index == 1)
        return row(D::kUnknown, D::kRemainHigh, D::kDecrease, D::kDecrease);
      return row(D::kDecrease, D::kRemainHigh, D::kDecrease, D::kIncrease);
    default:
      return row(D::kUnknown, D::kUnknown, D::kUnknown, D::kUnknown);
  }
}

inline std::vector<std::string> trade_offs(BottleneckClass klass,
                                           int transform_index) {
  switch (klass) {
    case BottleneckClass::kComputeBound:
      if (transform_index == 0)
        return {"Per-chip batch share grows, raising activation memory in the "
                "forward pass.",
                "The gradient all-reduce spans more data-parallel peers."};
      if (transform_index == 1)
        return {"Deeper model sharding adds synchronization collectives at "
                "layer boundaries.",
                "Longer per-chip sequence slices raise activation memory."};
      return {"Halving model parallelism doubles per-chip parameter and "
              "optimizer state.",
              "The gradient all-reduce spans more data-parallel peers."};
    case BottleneckClass::kHbmBound:
      if (transform_index == 0)
        return {"Model-parallel collectives appear at every layer boundary, "
                "raising communication overhead.",
                "Sequence parallelism shrinks, so per-chip activation slices "
                "lengthen."};
      if (transform_index == 1)
        return {"Lower data parallelism cuts samples processed per step.",
                "Model-parallel collectives appear at every layer boundary."};
      return {"Delivers only part of the memory relief full model sharding "
              "would give.",
              "Still adds some layer-boundary synchronization."};
    case BottleneckClass::kCommunicationBound:
      if (transform_index == 0)
        return {"Per-chip parameter and optimizer state grows as model "
                "sharding shrinks.",
                "The gradient all-reduce spans more data-parallel peers."};
      if (transform_index == 1)
        return {"Deeper model sharding only pays off when collectives are "
                "latency- rather than volume-bound.",
                "Fewer data-parallel peers process the batch each step."};
      return {"Each chip must hold the entire model and optimizer state.",
              "Largest gradient all-reduce group of the three options."};
    default:
      return {"Assumes the current workload matches the recorded one closely "
              "enough for the outcome to transfer."};
  }
}

inline std::string evidence_text(BottleneckClass klass) {
  switch (klass) {
    case BottleneckClass::kComputeBound:
      return "The dominant ops run nearest the FLOP/s roof, so spreading "
             "arithmetic across more chips attacks the binding resource.";
    case BottleneckClass::kHbmBound:
      return "The dominant ops are limited by HBM bandwidth, so shrinking "
             "per-chip resident state attacks the binding resource.";
    case BottleneckClass::kCommunicationBound:
      return "Collectives dominate the profiled time, so cutting inter-chip "
             "transfer volume attacks the binding resource.";
    default:
      return "A comparable recorded workload improved with this change.";
  }
}

// Text listing exactly the axes the transform moves, e.g.
// "data 8 -> 16, seq 8 -> 4".
inline std::string describe_mesh_change(const ShardingMesh& before,
                                        const ShardingMesh& after) {
  std::string out;
  auto add = [&](const char* axis, std::int64_t b, std::int64_t a) {
    if (b == a) return;
    if (!out.empty()) out += ", ";
    out += std::string(axis) + " " + std::to_string(b) + " -> " + std::to_string(a);
  };
  add("replica", before.replica, after.replica);
  add("data", before.data, after.data);
  add("model", before.model, after.model);
  add("seq", before.seq, after.seq);
  return out.empty() ? "no change" : out;
}

// Tags cite a tactic when every tag token also appears in the tactic name
// or in the diagnosed class name.
inline bool tags_mention_tactic(const std::vector<std::string>& tags,
                                const std::string& tactic,
                                BottleneckClass klass) {
  const std::vector<std::string> scope_tokens = [&] {
    std::vector<std::string> tokens = tokenize(tactic);
    for (const std::string& t : tokenize(to_string(klass))) tokens.push_back(t);
    return tokens;
  }();
  for (const std::string& tag : tags) {
    const std::vector<std::string> tag_tokens = tokenize(tag);
    if (tag_tokens.empty()) continue;
    bool all_in_scope = true;
    for (const std::string& token : tag_tokens) {
      if (std::find(scope_tokens.begin(), scope_tokens.end(), token) ==
          scope_tokens.end()) {
        all_in_scope = false;
        break;
      }
    }
    if (all_in_scope) return true;
  }
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Proposal generation.
// ---------------------------------------------------------------------------

inline Proposal make_playbook_proposal(const AnalysisReport& report,
                                       const PlaybookCandidate& candidate,
                                       int rank,
                                       const std::vector<RetrievalHit>& kb_hits) {
  const BottleneckClass klass = report.inefficiency.bottleneck_class;
  const ShardingMesh& baseline = report.experiment.baseline_mesh;
  Proposal proposal;
  proposal.mesh = candidate.mesh;
  proposal.rank = rank;
  const std::string tactic = detail::tactic_name(klass, candidate.transform_index);
  proposal.reasoning.push_back(
      {tactic, klass,
       "Reshapes the mesh from " + mesh_to_string(baseline) + " to " +
           mesh_to_string(candidate.mesh) + " (" +
           detail::describe_mesh_change(baseline, candidate.mesh) +
           ") while keeping all " +
           std::to_string(report.experiment.topology.chip_count) +
           " chips covered."});
  proposal.reasoning.push_back({tactic, klass, detail::evidence_text(klass)});
  proposal.expected_impact = detail::impact_table(klass, candidate.transform_index);
  proposal.trade_offs = detail::trade_offs(klass, candidate.transform_index);
  std::size_t cited = 0;
  for (const RetrievalHit& hit : kb_hits) {
    if (cited == 2) break;
    if (detail::tags_mention_tactic(hit.doc.tags, tactic, klass)) {
      proposal.citations.push_back({CitationKind::kKnowledge, hit.doc.doc_id});
      ++cited;
    }
  }
  return proposal;
}

inline Proposal make_precedent_proposal(const AnalysisReport& report,
                                        const OptimizationRecord& record,
                                        const std::vector<RetrievalHit>& kb_hits) {
  const BottleneckClass klass = report.inefficiency.bottleneck_class;
  Proposal proposal;
  proposal.mesh = record.after_mesh;
  proposal.rank = 1;
  proposal.reasoning.push_back(
      {"repeat-proven-configuration", klass,
       "A recorded optimization on " + record.device_family + " (" +
           topology_to_string(record.topology) +
           ") moved this exact baseline to " + mesh_to_string(record.after_mesh) +
           ": " + record.impact_summary});
  proposal.reasoning.push_back(
      {"repeat-proven-configuration", klass,
       "Reshapes the mesh from " + mesh_to_string(report.experiment.baseline_mesh) +
           " to " + mesh_to_string(record.after_mesh) + " (" +
           detail::describe_mesh_change(report.experiment.baseline_mesh,
                                        record.after_mesh) +
           ")."});
  proposal.expected_impact = detail::impact_table(klass, 0);
  proposal.trade_offs = detail::trade_offs(BottleneckClass::kIndeterminate, 0);
  proposal.citations.push_back({CitationKind::kHistorical, record.record_id});
  std::size_t cited = 0;
  for (const RetrievalHit& hit : kb_hits) {
    if (cited == 1) break;  // the historical citation already leads
    if (detail::tags_mention_tactic(hit.doc.tags,
                                    detail::tactic_name(klass, 0), klass)) {
      proposal.citations.push_back({CitationKind::kKnowledge, hit.doc.doc_id});
      ++cited;
    }
  }
  return proposal;
}

inline std::vector<Proposal> generate_proposals(
    const AnalysisReport& report, const std::vector<PrecedentMatch>& precedents,
    const std::vector<RetrievalHit>& kb_hits) {
  const BottleneckClass klass = report.inefficiency.bottleneck_class;
  if (klass == BottleneckClass::kIndeterminate)
    throw IndeterminateDiagnosis(
        "cannot propose meshes for an indeterminate diagnosis");

  const ShardingMesh& baseline = report.experiment.baseline_mesh;
  std::vector<Proposal> proposals;

  // A precedent that starts from this exact baseline with the same diagnosis
  // outranks the playbook.
  const OptimizationRecord* precedent = nullptr;
  if (!precedents.empty() &&
      precedents.front().record.before_mesh == baseline &&
      precedents.front().record.bottleneck_class == klass &&
      precedents.front().record.after_mesh != baseline &&
      mesh_fits(precedents.front().record.after_mesh,
                report.experiment.topology)) {
    precedent = &precedents.front().record;
    proposals.push_back(make_precedent_proposal(report, *precedent, kb_hits));
  }

  for (const PlaybookCandidate& candidate :
       playbook_transforms(klass, baseline, report.experiment.topology)) {
    if (proposals.size() == 3) break;
    bool duplicate = false;
    for (const Proposal& existing : proposals) {
      if (existing.mesh == candidate.mesh) duplicate = true;
    }
    if (duplicate) continue;
    proposals.push_back(make_playbook_proposal(
        report, candidate, static_cast<int>(proposals.size()) + 1, kb_hits));
  }

  if (proposals.size() != 3)
    throw InsufficientCandidates(
        "only " + std::to_string(proposals.size()) +
        " distinct valid meshes exist for baseline " + mesh_to_string(baseline) +
        " on " + topology_to_string(report.experiment.topology));
  return proposals;
}

// ---------------------------------------------------------------------------
// Recommendation and rebuttals.
// ---------------------------------------------------------------------------

inline Recommendation recommend(const std::vector<Proposal>& proposals) {
  if (proposals.empty())
    throw InsufficientCandidates("cannot recommend from an empty proposal set");
  const Proposal* chosen = &proposals.front();
  for (const Proposal& p : proposals) {
    if (p.rank < chosen->rank) chosen = &p;
  }

  Recommendation rec;
  rec.chosen = *chosen;
  bool has_historical = false;
  for (const Citation& c : chosen->citations) {
    if (c.kind == CitationKind::kHistorical) has_historical = true;
  }
  rec.confidence_percent = std::min(85.0 + (has_historical ? 5.0 : 0.0), 90.0);

  const std::string tactic =
      chosen->reasoning.empty() ? "mesh-reshape" : chosen->reasoning.front().tactic;
  const BottleneckClass target = chosen->reasoning.empty()
                                     ? BottleneckClass::kIndeterminate
                                     : chosen->reasoning.front().target;
  rec.justification.push_back(
      {"directness", "The tactic '" + tactic + "' acts directly on the " +
                         to_string(target) + " diagnosis."});
  rec.justification.push_back(
      {"risk",
       "Rank 1 is the lowest-risk option: it moves only the binding axes and "
       "stays closest to the known-good baseline."});
  std::string favorable;
  for (const auto& [metric, direction] : chosen->expected_impact) {
    const bool good = (direction == Direction::kDecrease && metric != "duty_cycle") ||
                      direction == Direction::kReduction ||
                      direction == Direction::kRemainHigh;
    if (!good) continue;
    if (!favorable.empty()) favorable += "; ";
    favorable += metric + " " + to_string(direction);
  }
  rec.justification.push_back(
      {"secondary-benefits", favorable.empty()
                                 ? "No side benefits expected beyond the primary fix."
                                 : "Expected side effects: " + favorable + "."});
  return rec;
}

inline Rebuttal rebut(ChallengeKind challenge,
                      const std::optional<Recommendation>& recommendation,
                      const std::vector<Proposal>& proposals,
                      const AnalysisReport& report) {
  if (!recommendation)
    throw NoActiveRecommendation("no recommendation to defend yet");

  const BottleneckClass klass = report.inefficiency.bottleneck_class;
  Rebuttal rebuttal;
  rebuttal.challenge = challenge;
  rebuttal.reaffirmed_mesh = recommendation->chosen.mesh;
  rebuttal.confidence_percent = recommendation->confidence_percent;

  std::size_t collectives = 0, compute = 0, memory = 0;
  for (const RooflineEntry& e : report.top_ops) {
    if (is_collective(e.op.category)) ++collectives;
    else if (e.bottleneck == BottleneckLabel::kCompute) ++compute;
    else if (e.bottleneck != BottleneckLabel::kUnknown) ++memory;
  }
  const std::string total = std::to_string(report.top_ops.size());
  switch (klass) {
    case BottleneckClass::kCommunicationBound:
      rebuttal.evidence.push_back("The diagnosis stands: " +
                                  std::to_string(collectives) + " of the " + total +
                                  " top ops are collectives.");
      break;
    case BottleneckClass::kHbmBound:
      rebuttal.evidence.push_back(
          "The diagnosis stands: " + std::to_string(memory + collectives) +
          " of the " + total + " top ops are held back by memory bandwidth.");
      break;
    case BottleneckClass::kComputeBound:
      rebuttal.evidence.push_back("The diagnosis stands: " +
                                  std::to_string(compute) + " of the " + total +
                                  " top ops run against the compute roof.");
      break;
    default:
      rebuttal.evidence.push_back(
          "Duty cycle sits at " +
          format_duty_cycle(report.kpi_report.duty_cycle_percent, report.kpi) +
          "%, which drives the current diagnosis.");
      break;
  }
  const std::string tactic = recommendation->chosen.reasoning.empty()
                                 ? "mesh-reshape"
                                 : recommendation->chosen.reasoning.front().tactic;
  rebuttal.evidence.push_back("The tactic '" + tactic +
                              "' is the direct counter to a " + to_string(klass) +
                              " workload, so Proposal 1 remains the pick.");
  if (challenge == ChallengeKind::kStillConfident) {
    rebuttal.evidence.push_back(
        "No new profile data has arrived, so the evidence and the choice are "
        "unchanged.");
  }

  rebuttal.caveats = {
      "Projected memory headroom is an estimate; verify per-chip HBM occupancy "
      "on a short profile before a full run.",
      "Layer shapes specific to this model can shift collective costs; "
      "re-profile after the first mesh change."};

  if (challenge == ChallengeKind::kOthersLookBetter) {
    for (const Proposal& p : proposals) {
      if (p.mesh == recommendation->chosen.mesh) continue;
      const std::string merit =
          p.reasoning.empty() ? "offers a different axis split"
                              : "tactic '" + p.reasoning.front().tactic + "'";
      const std::string risk =
          p.trade_offs.empty() ? "unquantified trade-offs" : p.trade_offs.front();
      rebuttal.alternatives.push_back(
          "Proposal " + std::to_string(p.rank) + " " + mesh_to_string(p.mesh) +
          ": merit - " + merit + "; risk - " + risk);
    }
    rebuttal.staged_plan = {
        "Step 1: profile the recommended mesh " +
            mesh_to_string(recommendation->chosen.mesh) + " over a short window.",
        "Step 2: if the binding metric does not improve, repeat the window on "
        "the next-ranked mesh.",
        "Step 3: keep the best-performing mesh and record the outcome so the "
        "next diagnosis can reuse it."};
  }
  return rebuttal;
}

}  // namespace asap
