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

#include <cctype>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace asap {

// ---------------------------------------------------------------------------
// Errors. All domain failures derive from Error; data-shape failures from
// SchemaError, violated domain invariants from InvariantError.
// ---------------------------------------------------------------------------
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : Error {
  using Error::Error;
};

struct InvariantError : Error {
  using Error::Error;
};

struct MalformedTopology : InvariantError {
  using InvariantError::InvariantError;
};

struct MeshChipMismatch : InvariantError {
  std::int64_t product;
  std::int64_t chip_count;
  MeshChipMismatch(std::int64_t product, std::int64_t chip_count)
      : InvariantError("mesh product " + std::to_string(product) +
                       " does not cover chip count " +
                       std::to_string(chip_count)),
        product(product),
        chip_count(chip_count) {}
};

struct UnknownDevice : Error {
  using Error::Error;
};

struct NonPositiveStepTime : InvariantError {
  using InvariantError::InvariantError;
};

struct BusyExceedsStep : InvariantError {
  using InvariantError::InvariantError;
};

struct ZeroOccurrences : InvariantError {
  using InvariantError::InvariantError;
};

struct NonPositiveProfileWindow : InvariantError {
  using InvariantError::InvariantError;
};

struct NonPositiveDim : InvariantError {
  using InvariantError::InvariantError;
};

struct EmptyTopOps : Error {
  using Error::Error;
};

struct DuplicateDocId : Error {
  using Error::Error;
};

struct NoPlaybook : Error {
  using Error::Error;
};

struct IndeterminateDiagnosis : Error {
  using Error::Error;
};

struct InsufficientCandidates : Error {
  using Error::Error;
};

struct IllegalTransition : Error {
  using Error::Error;
};

struct NoActiveRecommendation : Error {
  using Error::Error;
};

struct CorruptWorklog : Error {
  using Error::Error;
};

struct IoFailure : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Physical chip arrangement, e.g. "8x8x8" -> 512 chips.
// ---------------------------------------------------------------------------
struct Topology {
  std::vector<int> dims;    // chips per axis, 1..3 axes
  std::int64_t chip_count;  // product of dims

  friend bool operator==(const Topology&, const Topology&) = default;
};

// Parses an "AxBxC" axis list. Throws MalformedTopology on empty input,
// non-numeric axes, zero axes, or more than three axes.
inline Topology parse_topology(const std::string& text) {
  if (text.empty()) throw MalformedTopology("empty topology string");
  if (text.back() == 'x')
    throw MalformedTopology("trailing axis separator in '" + text + "'");
  std::vector<int> dims;
  std::string axis;
  std::stringstream in(text);
  while (std::getline(in, axis, 'x')) {
    if (axis.empty() || axis.find_first_not_of("0123456789") != std::string::npos)
      throw MalformedTopology("bad topology axis '" + axis + "' in '" + text + "'");
    long value = 0;
    try {
      value = std::stol(axis);
    } catch (const std::exception&) {
      throw MalformedTopology("bad topology axis '" + axis + "' in '" + text + "'");
    }
    if (value < 1) throw MalformedTopology("zero axis in '" + text + "'");
    dims.push_back(static_cast<int>(value));
  }
  if (dims.empty()) throw MalformedTopology("no axes in '" + text + "'");
  if (dims.size() > 3)
    throw MalformedTopology("more than 3 axes in '" + text + "'");
  std::int64_t chips = 1;
  for (int d : dims) chips *= d;
  return Topology{std::move(dims), chips};
}

inline std::string topology_to_string(const Topology& topo) {
  std::string out;
  for (std::size_t i = 0; i < topo.dims.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(topo.dims[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sharding mesh: parallelism degree per axis. Dimensions absent in input
// text default to 1.
// ---------------------------------------------------------------------------
struct ShardingMesh {
  std::int64_t replica = 1;
  std::int64_t data = 1;
  std::int64_t model = 1;
  std::int64_t seq = 1;

  std::int64_t product() const { return replica * data * model * seq; }

  friend bool operator==(const ShardingMesh&, const ShardingMesh&) = default;
};

inline std::string mesh_to_string(const ShardingMesh& m) {
  return "{replica: " + std::to_string(m.replica) +
         ", data: " + std::to_string(m.data) +
         ", model: " + std::to_string(m.model) +
         ", seq: " + std::to_string(m.seq) + "}";
}

inline bool mesh_fits(const ShardingMesh& mesh, const Topology& topo) {
  return mesh.replica >= 1 && mesh.data >= 1 && mesh.model >= 1 &&
         mesh.seq >= 1 && mesh.product() == topo.chip_count;
}

// Throws MeshChipMismatch when the mesh does not cover the topology exactly.
inline void validate_mesh(const ShardingMesh& mesh, const Topology& topo) {
  if (!mesh_fits(mesh, topo))
    throw MeshChipMismatch(mesh.product(), topo.chip_count);
}

// ---------------------------------------------------------------------------
// Experiment metadata. Optional fields stay empty when the source record
// does not carry them; they are never defaulted.
// ---------------------------------------------------------------------------
struct ExperimentRecord {
  std::string experiment_id;
  std::string device_type;  // e.g. "tpu-v5p-512"
  Topology topology;
  std::optional<std::string> model_name;
  std::optional<std::string> model_version;
  std::optional<std::int64_t> batch_size;
  std::optional<std::int64_t> sequence_length;
  ShardingMesh baseline_mesh;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

// Step-level health metrics. Units are part of the field names; conversions
// happen explicitly at use sites.
struct KpiMetrics {
  double step_time_ms = 0;
  double tc_busy_time_ms = 0;
  double mean_all_reduce_us = 0;

  friend bool operator==(const KpiMetrics&, const KpiMetrics&) = default;
};

// Busy time may exceed step time by at most 0.5% measurement jitter.
inline constexpr double kBusyJitterFactor = 1.005;

inline void validate_kpi(const KpiMetrics& kpi) {
  if (kpi.step_time_ms <= 0)
    throw NonPositiveStepTime("step_time_ms must be > 0");
  if (kpi.tc_busy_time_ms < 0)
    throw InvariantError("tc_busy_time_ms must be >= 0");
  if (kpi.mean_all_reduce_us < 0)
    throw InvariantError("mean_all_reduce_us must be >= 0");
  if (kpi.tc_busy_time_ms > kpi.step_time_ms * kBusyJitterFactor)
    throw BusyExceedsStep("tc_busy_time_ms exceeds step_time_ms beyond jitter");
}

// ---------------------------------------------------------------------------
// Per-operation profile row.
// ---------------------------------------------------------------------------
enum class OpCategory {
  kAllReduce,
  kAllReduceScatterFusion,
  kCollectivePermute,
  kAllGather,
  kAllToAll,
  kCustomCall,
  kCustomFusion,
  kConvolutionFusion,
  kOther,
};

inline bool is_collective(OpCategory c) {
  switch (c) {
    case OpCategory::kAllReduce:
    case OpCategory::kAllReduceScatterFusion:
    case OpCategory::kCollectivePermute:
    case OpCategory::kAllGather:
    case OpCategory::kAllToAll:
      return true;
    default:
      return false;
  }
}

inline std::string to_string(OpCategory c) {
  switch (c) {
    case OpCategory::kAllReduce: return "all-reduce";
    case OpCategory::kAllReduceScatterFusion: return "all-reduce-scatter-fusion";
    case OpCategory::kCollectivePermute: return "collective-permute";
    case OpCategory::kAllGather: return "all-gather";
    case OpCategory::kAllToAll: return "all-to-all";
    case OpCategory::kCustomCall: return "custom-call";
    case OpCategory::kCustomFusion: return "custom-fusion";
    case OpCategory::kConvolutionFusion: return "convolution-fusion";
    case OpCategory::kOther: return "other";
  }
  return "other";
}

// Accepts any casing and separator style ("All-reduce scatter fusion",
// "custom_fusion", ...). Throws SchemaError on unrecognized names.
inline OpCategory parse_op_category(const std::string& text) {
  std::string norm;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      norm += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else if (!norm.empty() && norm.back() != '-') {
      norm += '-';
    }
  }
  while (!norm.empty() && norm.back() == '-') norm.pop_back();
  if (norm == "all-reduce") return OpCategory::kAllReduce;
  if (norm == "all-reduce-scatter-fusion") return OpCategory::kAllReduceScatterFusion;
  if (norm == "collective-permute") return OpCategory::kCollectivePermute;
  if (norm == "all-gather") return OpCategory::kAllGather;
  if (norm == "all-to-all") return OpCategory::kAllToAll;
  if (norm == "custom-call") return OpCategory::kCustomCall;
  if (norm == "custom-fusion") return OpCategory::kCustomFusion;
  if (norm == "convolution-fusion") return OpCategory::kConvolutionFusion;
  if (norm == "other") return OpCategory::kOther;
  throw SchemaError("unknown op category '" + text + "'");
}

struct OpProfile {
  std::string op_name;
  OpCategory category = OpCategory::kOther;
  double total_time_ps = 0;
  std::int64_t occurrences = 1;
  std::optional<double> flops;             // total floating-point ops
  std::optional<double> hbm_bytes;         // bytes moved through HBM
  std::optional<double> vmem_read_bytes;   // bytes read from vector memory
  std::optional<double> vmem_write_bytes;  // bytes written to vector memory

  friend bool operator==(const OpProfile&, const OpProfile&) = default;
};

inline void validate_op(const OpProfile& op) {
  if (op.occurrences < 1)
    throw ZeroOccurrences("occurrences must be >= 1 for op '" + op.op_name + "'");
  if (op.total_time_ps < 0)
    throw InvariantError("total_time_ps must be >= 0 for op '" + op.op_name + "'");
  for (const auto& counter :
       {op.flops, op.hbm_bytes, op.vmem_read_bytes, op.vmem_write_bytes}) {
    if (counter && *counter < 0)
      throw InvariantError("negative counter for op '" + op.op_name + "'");
  }
}

// ---------------------------------------------------------------------------
// One experiment's full profiling input.
// ---------------------------------------------------------------------------
struct ProfileBundle {
  ExperimentRecord experiment;
  KpiMetrics kpi;
  std::vector<OpProfile> ops;
  // Total profiled wall duration: the denominator for per-op "% of Total
  // Time". The profiling window usually spans many training steps.
  double profile_total_time_ps = 0;

  friend bool operator==(const ProfileBundle&, const ProfileBundle&) = default;
};

inline void validate_bundle(const ProfileBundle& bundle) {
  validate_mesh(bundle.experiment.baseline_mesh, bundle.experiment.topology);
  if (bundle.experiment.batch_size && *bundle.experiment.batch_size < 1)
    throw InvariantError("batch_size must be positive");
  if (bundle.experiment.sequence_length && *bundle.experiment.sequence_length < 1)
    throw InvariantError("sequence_length must be positive");
  validate_kpi(bundle.kpi);
  if (bundle.profile_total_time_ps <= 0)
    throw NonPositiveProfileWindow("profile_total_time_ps must be > 0");
  for (const OpProfile& op : bundle.ops) {
    validate_op(op);
    if (op.total_time_ps > bundle.profile_total_time_ps)
      throw InvariantError("op '" + op.op_name +
                           "' exceeds the profile window duration");
  }
}

// ---------------------------------------------------------------------------
// Hardware peaks used by the roofline math. Values come from a user-supplied
// registry file keyed by device family.
// ---------------------------------------------------------------------------
struct DeviceSpec {
  std::string device_family;
  double peak_flops_per_chip = 0;  // FLOP/s
  double peak_hbm_bw = 0;          // bytes/s
  double peak_vmem_bw = 0;         // bytes/s

  friend bool operator==(const DeviceSpec&, const DeviceSpec&) = default;
};

inline void validate_device_spec(const DeviceSpec& spec) {
  if (spec.peak_flops_per_chip <= 0 || spec.peak_hbm_bw <= 0 ||
      spec.peak_vmem_bw <= 0)
    throw SchemaError("device peaks must be strictly positive for family '" +
                      spec.device_family + "'");
}

}  // namespace asap
