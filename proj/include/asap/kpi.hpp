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

#include <cmath>
#include <cstdio>
#include <string>

#include "asap/core.hpp"

namespace asap {

// ---------------------------------------------------------------------------
// Step-level KPI health check. Percentages are plain ratios times 100; all
// rounding is a display concern handled by the formatters below.
// ---------------------------------------------------------------------------

enum class HypothesisKind {
  kComputeSuspected,
  kCommunicationSuspected,
  kInputSuspected,
};

inline std::string to_string(HypothesisKind h) {
  switch (h) {
    case HypothesisKind::kComputeSuspected: return "compute-suspected";
    case HypothesisKind::kCommunicationSuspected: return "communication-suspected";
    case HypothesisKind::kInputSuspected: return "input-suspected";
  }
  return "compute-suspected";
}

inline HypothesisKind parse_hypothesis(const std::string& text) {
  if (text == "compute-suspected") return HypothesisKind::kComputeSuspected;
  if (text == "communication-suspected") return HypothesisKind::kCommunicationSuspected;
  if (text == "input-suspected") return HypothesisKind::kInputSuspected;
  throw SchemaError("unknown hypothesis '" + text + "'");
}

struct KpiReport {
  double step_time_ms = 0;
  double duty_cycle_percent = 0;         // unrounded
  double communication_percent = 0;      // unrounded
  HypothesisKind initial_hypothesis = HypothesisKind::kComputeSuspected;

  friend bool operator==(const KpiReport&, const KpiReport&) = default;
};

// Fraction of the step the tensor cores were busy, as a percentage.
inline double duty_cycle(const KpiMetrics& kpi) {
  validate_kpi(kpi);
  return 100.0 * kpi.tc_busy_time_ms / kpi.step_time_ms;
}

// Share of the step spent in the mean all-reduce, as a percentage.
inline double communication_overhead(const KpiMetrics& kpi) {
  validate_kpi(kpi);
  return 100.0 * (kpi.mean_all_reduce_us / 1000.0) / kpi.step_time_ms;
}

inline constexpr double kDutyCycleHealthyPercent = 90.0;
inline constexpr double kCommunicationHeavyPercent = 15.0;

inline KpiReport kpi_health_check(const KpiMetrics& kpi) {
  KpiReport report;
  report.step_time_ms = kpi.step_time_ms;
  report.duty_cycle_percent = duty_cycle(kpi);
  report.communication_percent = communication_overhead(kpi);
  if (report.duty_cycle_percent < kDutyCycleHealthyPercent) {
    report.initial_hypothesis = HypothesisKind::kInputSuspected;
  } else if (report.communication_percent > kCommunicationHeavyPercent) {
    report.initial_hypothesis = HypothesisKind::kCommunicationSuspected;
  } else {
    report.initial_hypothesis = HypothesisKind::kComputeSuspected;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Display formatting. Values are rounded half-up to two decimals; a duty
// cycle below 100% never displays as "100.00" (it clamps to 99.99) so a
// busy-but-not-saturated step is distinguishable from a saturated one.
// ---------------------------------------------------------------------------

inline double round2(double value) {
  return std::floor(value * 100.0 + 0.5) / 100.0;
}

inline std::string format_fixed2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", round2(value));
  return buf;
}

// Percentages smaller than the two-decimal display floor switch to short
// scientific form so tiny-but-nonzero utilizations remain visible.
inline std::string format_percent(double value) {
  if (value == 0.0) return "0.00";
  if (value < 0.005) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", value);
    return buf;
  }
  return format_fixed2(value);
}

inline std::string format_duty_cycle(double duty_percent, const KpiMetrics& kpi) {
  double rounded = round2(duty_percent);
  if (rounded >= 100.0 && kpi.tc_busy_time_ms < kpi.step_time_ms) {
    return "99.99";
  }
  return format_fixed2(duty_percent);
}

// Groups the integer part with commas: 12345.678 -> "12,345.68".
inline std::string format_with_commas(double value, int decimals = 2) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string digits(buf);
  std::size_t dot = digits.find('.');
  std::size_t int_end = dot == std::string::npos ? digits.size() : dot;
  std::size_t first = digits.front() == '-' ? 1 : 0;
  std::string out = digits.substr(0, first);
  std::size_t int_len = int_end - first;
  for (std::size_t i = 0; i < int_len; ++i) {
    if (i && (int_len - i) % 3 == 0) out += ',';
    out += digits[first + i];
  }
  out += digits.substr(int_end);
  return out;
}

}  // namespace asap
