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
#include <string>
#include <vector>

#include "asap/core.hpp"

namespace asap {

// ---------------------------------------------------------------------------
// Per-op roofline analysis: how close each op runs to the device's compute
// and bandwidth peaks, and which resource binds it.
// ---------------------------------------------------------------------------

enum class BottleneckLabel {
  kCompute,
  kHbm,
  kVmemRead,
  kVmemWrite,
  kUnknown,
};

inline std::string to_string(BottleneckLabel label) {
  switch (label) {
    case BottleneckLabel::kCompute: return "Compute";
    case BottleneckLabel::kHbm: return "HBM";
    case BottleneckLabel::kVmemRead: return "VMEM Read";
    case BottleneckLabel::kVmemWrite: return "VMEM Write";
    case BottleneckLabel::kUnknown: return "Unknown";
  }
  return "Unknown";
}

inline BottleneckLabel parse_bottleneck_label(const std::string& text) {
  if (text == "Compute") return BottleneckLabel::kCompute;
  if (text == "HBM") return BottleneckLabel::kHbm;
  if (text == "VMEM Read") return BottleneckLabel::kVmemRead;
  if (text == "VMEM Write") return BottleneckLabel::kVmemWrite;
  if (text == "Unknown") return BottleneckLabel::kUnknown;
  throw SchemaError("unknown bottleneck label '" + text + "'");
}

struct RooflineEntry {
  OpProfile op;
  double pct_of_total_time = 0;      // share of the profile window
  double avg_time_ps = 0;            // total_time_ps / occurrences
  double compute_efficiency = 0;     // % of peak FLOP/s
  double hbm_bw_utilization = 0;     // % of peak HBM bandwidth
  double vmem_read_utilization = 0;  // % of peak VMEM read bandwidth
  double vmem_write_utilization = 0; // % of peak VMEM write bandwidth
  double max_mem_bw_utilization = 0; // max of the three bandwidth numbers
  double roofline_efficiency = 0;    // max(compute, max memory)
  BottleneckLabel bottleneck = BottleneckLabel::kUnknown;

  friend bool operator==(const RooflineEntry&, const RooflineEntry&) = default;
};

inline double avg_time_ps(const OpProfile& op) {
  if (op.occurrences < 1)
    throw ZeroOccurrences("occurrences must be >= 1 for op '" + op.op_name + "'");
  return op.total_time_ps / static_cast<double>(op.occurrences);
}

// Analyzes one op against device peaks. Counters that are absent or zero
// contribute nothing; an op with no live counter is labeled Unknown.
inline RooflineEntry analyze_op(const OpProfile& op, const DeviceSpec& device,
                                double profile_total_time_ps) {
  validate_op(op);
  validate_device_spec(device);
  if (profile_total_time_ps <= 0)
    throw NonPositiveProfileWindow("profile window must be > 0");

  RooflineEntry entry;
  entry.op = op;
  entry.pct_of_total_time = 100.0 * op.total_time_ps / profile_total_time_ps;
  entry.avg_time_ps = avg_time_ps(op);

  const double total_s = op.total_time_ps * 1e-12;
  auto utilization = [&](const std::optional<double>& counter, double peak) {
    if (!counter || *counter <= 0 || total_s <= 0) return 0.0;
    return 100.0 * (*counter / total_s) / peak;
  };
  entry.compute_efficiency = utilization(op.flops, device.peak_flops_per_chip);
  entry.hbm_bw_utilization = utilization(op.hbm_bytes, device.peak_hbm_bw);
  entry.vmem_read_utilization =
      utilization(op.vmem_read_bytes, device.peak_vmem_bw);
  entry.vmem_write_utilization =
      utilization(op.vmem_write_bytes, device.peak_vmem_bw);
  entry.max_mem_bw_utilization =
      std::max({entry.hbm_bw_utilization, entry.vmem_read_utilization,
                entry.vmem_write_utilization});
  entry.roofline_efficiency =
      std::max(entry.compute_efficiency, entry.max_mem_bw_utilization);

  const bool has_compute = op.flops && *op.flops > 0;
  const bool has_memory = (op.hbm_bytes && *op.hbm_bytes > 0) ||
                          (op.vmem_read_bytes && *op.vmem_read_bytes > 0) ||
                          (op.vmem_write_bytes && *op.vmem_write_bytes > 0);
  if (!has_compute && !has_memory) {
    entry.bottleneck = BottleneckLabel::kUnknown;
    return entry;
  }
  // Ties break toward memory over compute, and HBM over VMEM read over
  // VMEM write, so the scarcer resource wins the label.
  if (entry.compute_efficiency > entry.max_mem_bw_utilization) {
    entry.bottleneck = BottleneckLabel::kCompute;
  } else if (entry.hbm_bw_utilization >= entry.vmem_read_utilization &&
             entry.hbm_bw_utilization >= entry.vmem_write_utilization) {
    entry.bottleneck = BottleneckLabel::kHbm;
  } else if (entry.vmem_read_utilization >= entry.vmem_write_utilization) {
    entry.bottleneck = BottleneckLabel::kVmemRead;
  } else {
    entry.bottleneck = BottleneckLabel::kVmemWrite;
  }
  return entry;
}

// Top ops by total self time, descending; ties resolve by op name so the
// ordering is stable across runs and platforms.
inline std::vector<OpProfile> rank_top_ops(std::vector<OpProfile> ops,
                                           std::size_t k = 5) {
  std::sort(ops.begin(), ops.end(),
            [](const OpProfile& a, const OpProfile& b) {
              if (a.total_time_ps != b.total_time_ps)
                return a.total_time_ps > b.total_time_ps;
              return a.op_name < b.op_name;
            });
  if (ops.size() > k) ops.resize(k);
  return ops;
}

inline std::vector<RooflineEntry> analyze_bundle(const ProfileBundle& bundle,
                                                 const DeviceSpec& device,
                                                 std::size_t k = 5) {
  validate_bundle(bundle);
  std::vector<RooflineEntry> entries;
  for (const OpProfile& op : rank_top_ops(bundle.ops, k)) {
    entries.push_back(analyze_op(op, device, bundle.profile_total_time_ps));
  }
  return entries;
}

// Sanity warnings over a finished analysis; never throws. A combined time
// share above 100% means the window is shorter than the ops it contains.
inline std::vector<std::string> lint_roofline(
    const std::vector<RooflineEntry>& entries) {
  std::vector<std::string> warnings;
  double pct_sum = 0;
  for (const RooflineEntry& e : entries) pct_sum += e.pct_of_total_time;
  if (pct_sum > 100.0 + 1e-6) {
    warnings.push_back("op time shares sum to " + std::to_string(pct_sum) +
                       "% of the profile window");
  }
  for (const RooflineEntry& e : entries) {
    if (e.roofline_efficiency > 100.0 + 1e-6) {
      warnings.push_back("op '" + e.op.op_name +
                         "' reports utilization above device peak");
    }
  }
  return warnings;
}

}  // namespace asap
