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
//
// End-to-end acceptance suite. Each test covers one release criterion and
// prints a single PASS/FAIL line so the whole gate is readable at a glance.

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "asap/diagnosis.hpp"
#include "asap/json_io.hpp"
#include "asap/knowledge.hpp"
#include "asap/proposal.hpp"
#include "asap/session.hpp"
#include "test_util.hpp"

namespace asap {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report_criterion(int number, const std::string& summary) {
  std::cout << "[CRITERION " << number << "] "
            << (::testing::Test::HasFailure() ? "FAIL" : "PASS") << ": "
            << summary << std::endl;
}

AnalysisReport fixture_report(int n) {
  const ProfileBundle bundle = testutil::load_experiment(n);
  return build_analysis_report(bundle, testutil::device_for(bundle));
}

TEST(Acceptance, Criterion1_KpiGoldenValues) {
  const auto start = Clock::now();

  const KpiReport exp3 = fixture_report(3).kpi_report;
  const KpiMetrics exp3_kpi = testutil::load_experiment(3).kpi;
  EXPECT_EQ(format_duty_cycle(exp3.duty_cycle_percent, exp3_kpi), "99.99");
  EXPECT_NEAR(round2(exp3.communication_percent), 5.35, 0.005);
  EXPECT_EQ(format_percent(exp3.communication_percent), "5.35");

  const KpiReport exp1 = fixture_report(1).kpi_report;
  EXPECT_NEAR(round2(exp1.communication_percent), 2.57, 0.005);

  const KpiReport exp2 = fixture_report(2).kpi_report;
  const KpiMetrics exp2_kpi = testutil::load_experiment(2).kpi;
  EXPECT_EQ(format_duty_cycle(exp2.duty_cycle_percent, exp2_kpi), "99.95");
  EXPECT_NEAR(round2(exp2.duty_cycle_percent), 99.95, 0.005);
  EXPECT_NEAR(round2(exp2.communication_percent), 7.52, 0.005);

  EXPECT_LT(seconds_since(start), 1.0);
  report_criterion(1, "KPI duty/communication percentages match the recorded "
                      "runs to two decimals");
}

TEST(Acceptance, Criterion2_RooflineGoldenSuite) {
  const auto start = Clock::now();

  const std::vector<std::vector<BottleneckLabel>> expected_labels = {
      {BottleneckLabel::kUnknown, BottleneckLabel::kHbm, BottleneckLabel::kUnknown,
       BottleneckLabel::kCompute, BottleneckLabel::kCompute},
      {BottleneckLabel::kHbm, BottleneckLabel::kHbm, BottleneckLabel::kHbm,
       BottleneckLabel::kCompute, BottleneckLabel::kCompute},
      {BottleneckLabel::kHbm, BottleneckLabel::kHbm, BottleneckLabel::kVmemWrite,
       BottleneckLabel::kVmemRead, BottleneckLabel::kHbm},
  };
  for (int n = 1; n <= 3; ++n) {
    const AnalysisReport report = fixture_report(n);
    ASSERT_EQ(report.top_ops.size(), 5u);
    for (std::size_t i = 0; i < report.top_ops.size(); ++i) {
      const RooflineEntry& entry = report.top_ops[i];
      EXPECT_EQ(entry.bottleneck, expected_labels[n - 1][i])
          << "experiment " << n << " op " << i;
      EXPECT_DOUBLE_EQ(
          entry.roofline_efficiency,
          std::max(entry.compute_efficiency, entry.max_mem_bw_utilization));
      if (entry.bottleneck == BottleneckLabel::kUnknown) {
        EXPECT_EQ(entry.compute_efficiency, 0.0);
        EXPECT_EQ(entry.max_mem_bw_utilization, 0.0);
      }
    }
  }

  const AnalysisReport exp2 = fixture_report(2);
  EXPECT_NEAR(exp2.top_ops[0].avg_time_ps, 17852015732.89, 0.01);
  EXPECT_NEAR(exp2.top_ops[2].compute_efficiency, 18.16, 0.005);
  EXPECT_NEAR(exp2.top_ops[2].hbm_bw_utilization, 81.76, 0.005);
  EXPECT_EQ(exp2.top_ops[2].bottleneck, BottleneckLabel::kHbm);
  EXPECT_NEAR(exp2.top_ops[4].compute_efficiency, 72.43, 0.005);
  EXPECT_NEAR(exp2.top_ops[4].max_mem_bw_utilization, 3.47, 0.005);
  EXPECT_EQ(exp2.top_ops[4].bottleneck, BottleneckLabel::kCompute);

  EXPECT_LT(seconds_since(start), 1.0);
  report_criterion(2, "roofline rows reproduce the recorded efficiency and "
                      "bottleneck pairings, including Unknown rows");
}

TEST(Acceptance, Criterion3_DiagnosisGoldenSuite) {
  const AnalysisReport exp1 = fixture_report(1);
  const AnalysisReport exp2 = fixture_report(2);
  const AnalysisReport exp3 = fixture_report(3);
  EXPECT_EQ(exp1.inefficiency.bottleneck_class, BottleneckClass::kComputeBound);
  EXPECT_EQ(exp2.inefficiency.bottleneck_class, BottleneckClass::kHbmBound);
  EXPECT_EQ(exp3.inefficiency.bottleneck_class,
            BottleneckClass::kCommunicationBound);
  EXPECT_FALSE(exp3.hypothesis_confirmed);
  report_criterion(3, "the three bundled experiments classify compute/hbm/"
                      "communication bound and the third hypothesis is refuted");
}

TEST(Acceptance, Criterion4_ProposalGoldenSuite) {
  struct Case {
    int experiment;
    bool with_history;
    ShardingMesh rank1;
  };
  const std::vector<Case> cases = {
      {1, true, ShardingMesh{1, 16, 8, 4}},
      {2, false, ShardingMesh{1, 4, 4, 1}},
      {3, false, ShardingMesh{1, 8, 2, 16}},
  };
  for (const Case& c : cases) {
    const AnalysisReport report = fixture_report(c.experiment);
    std::vector<PrecedentMatch> precedents;
    if (c.with_history) {
      const DeviceSpec device = resolve_device(testutil::load_registry(),
                                               report.experiment.device_type);
      precedents = find_similar_optimizations(
          load_history(testutil::data_dir() + "/history.json"),
          {device.device_family, report.inefficiency.bottleneck_class,
           report.experiment.baseline_mesh},
          3);
    }
    const std::vector<Proposal> proposals =
        generate_proposals(report, precedents, {});
    ASSERT_EQ(proposals.size(), 3u) << "experiment " << c.experiment;
    EXPECT_EQ(proposals[0].mesh, c.rank1) << "experiment " << c.experiment;
    std::set<std::string> distinct;
    for (const Proposal& p : proposals) {
      distinct.insert(mesh_to_string(p.mesh));
      EXPECT_TRUE(mesh_fits(p.mesh, report.experiment.topology));
      EXPECT_NE(p.mesh, report.experiment.baseline_mesh);
    }
    EXPECT_EQ(distinct.size(), 3u);
  }
  report_criterion(4, "rank-1 proposals equal the expert meshes and every run "
                      "emits exactly three distinct valid candidates");
}

TEST(Acceptance, Criterion5_PrecedentRetrieval) {
  const std::vector<OptimizationRecord> history =
      load_history(testutil::data_dir() + "/history.json");

  const std::vector<PrecedentMatch> hit = find_similar_optimizations(
      history,
      {"tpu-v5p", BottleneckClass::kComputeBound, ShardingMesh{1, 8, 8, 8}}, 3);
  ASSERT_EQ(hit.size(), 1u);
  EXPECT_EQ(hit[0].record.record_id, "opt-v5p-0417");
  EXPECT_GE(hit[0].score, kPrecedentScoreFloor);

  EXPECT_TRUE(find_similar_optimizations(
                  history, {"tpu-v6e", BottleneckClass::kHbmBound,
                            ShardingMesh{1, 4, 1, 4}},
                  3)
                  .empty());
  EXPECT_TRUE(find_similar_optimizations(
                  history, {"tpu-v5e", BottleneckClass::kCommunicationBound,
                            ShardingMesh{1, 4, 4, 16}},
                  3)
                  .empty());
  report_criterion(5, "the recorded precedent is retrieved for its own scenario "
                      "and filtered out for the two novel scenarios");
}

TEST(Acceptance, Criterion6_MeshEnumerationOracleEquivalence) {
  auto brute_force = [](std::int64_t n) {
    std::set<std::string> out;
    for (std::int64_t r = 1; r <= n; ++r)
      for (std::int64_t d = 1; r * d <= n; ++d)
        for (std::int64_t m = 1; r * d * m <= n; ++m)
          for (std::int64_t s = 1; r * d * m * s <= n; ++s)
            if (r * d * m * s == n)
              out.insert(mesh_to_string(ShardingMesh{r, d, m, s}));
    return out;
  };

  std::vector<std::int64_t> chip_counts;
  for (std::int64_t n = 1; n <= 64; ++n) chip_counts.push_back(n);
  chip_counts.push_back(256);
  chip_counts.push_back(512);

  for (std::int64_t n : chip_counts) {
    const MeshEnumeration enumerated = enumerate_meshes(n);
    const std::set<std::string> oracle = brute_force(n);
    std::set<std::string> got;
    for (const ShardingMesh& mesh : enumerated.meshes)
      got.insert(mesh_to_string(mesh));
    EXPECT_EQ(enumerated.meshes.size(), oracle.size()) << "chip_count " << n;
    EXPECT_EQ(got, oracle) << "chip_count " << n;
    EXPECT_FALSE(enumerated.truncated) << "chip_count " << n;
  }
  report_criterion(6, "mesh enumeration matches the brute-force oracle for "
                      "chip counts 1..64, 256, and 512");
}

// --- Criterion 7 helpers ------------------------------------------------------

struct RunResult {
  int exit_code = -1;
  std::string output;
};

std::filesystem::path temp_file(const std::string& stem) {
  static std::atomic<int> counter{0};
  return std::filesystem::temp_directory_path() /
         ("asap_accept_" + stem + "_" + std::to_string(::getpid()) + "_" +
          std::to_string(counter++));
}

RunResult run_scripted_chat(const std::filesystem::path& worklog,
                            const std::string& script) {
  const std::filesystem::path out_path = temp_file("out");
  const std::filesystem::path in_path = temp_file("in");
  std::ofstream(in_path) << script;
  const std::string command =
      std::string(ASAP_CLI_PATH) + " chat --bundle " + testutil::data_dir() +
      "/exp2_hbm_v6e.json --devices " + testutil::data_dir() +
      "/devices.json --kb " + testutil::data_dir() + "/kb --worklog " +
      worklog.string() + " > " + out_path.string() + " 2>&1 < " +
      in_path.string();
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::ostringstream collected;
  collected << in.rdbuf();
  result.output = collected.str();
  std::filesystem::remove(out_path);
  std::filesystem::remove(in_path);
  return result;
}

nlohmann::json transcript_without_timestamps(const std::filesystem::path& path) {
  nlohmann::json entries = nlohmann::json::array();
  for (WorklogEntry entry : read_worklog(path)) {
    entry.timestamp = "";
    entries.push_back(entry);
  }
  return entries;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

TEST(Acceptance, Criterion7_DeterminismAndReplay) {
  const std::string script =
      "analyze\n"
      "propose\n"
      "which one do you recommend?\n"
      "are you sure?\n"
      "still confident?\n"
      "quit\n";
  const std::filesystem::path first_log = temp_file("wl1");
  const std::filesystem::path second_log = temp_file("wl2");

  const RunResult first = run_scripted_chat(first_log, script);
  const RunResult second = run_scripted_chat(second_log, script);
  ASSERT_EQ(first.exit_code, 0) << first.output;
  ASSERT_EQ(second.exit_code, 0) << second.output;

  // Byte-identical responses (the closing line echoes the worklog path, an
  // input that necessarily differs); byte-identical worklogs once timestamps go.
  auto normalized = [](std::string text, const std::filesystem::path& log) {
    const std::size_t pos = text.find(log.string());
    if (pos != std::string::npos) text.replace(pos, log.string().size(), "<worklog>");
    return text;
  };
  EXPECT_EQ(normalized(first.output, first_log),
            normalized(second.output, second_log));
  EXPECT_EQ(transcript_without_timestamps(first_log).dump(),
            transcript_without_timestamps(second_log).dump());

  const SessionState replayed = replay_worklog(first_log);
  EXPECT_EQ(replayed.phase, Phase::kRecommended);
  ASSERT_TRUE(replayed.report.has_value());
  EXPECT_EQ(replayed.report->inefficiency.bottleneck_class,
            BottleneckClass::kHbmBound);
  ASSERT_TRUE(replayed.proposals.has_value());
  EXPECT_EQ(replayed.proposals->size(), 3u);
  ASSERT_TRUE(replayed.recommendation.has_value());
  EXPECT_EQ(replayed.recommendation->chosen.mesh, (ShardingMesh{1, 4, 4, 1}));
  EXPECT_DOUBLE_EQ(replayed.recommendation->confidence_percent, 85.0);

  // The chosen mesh is restated unchanged by the recommendation and by both
  // challenge responses.
  EXPECT_GE(count_occurrences(first.output,
                              "{replica: 1, data: 4, model: 4, seq: 1}"),
            3u);
  EXPECT_EQ(count_occurrences(first.output, "The recommendation stands: "
                                            "{replica: 1, data: 4, model: 4, "
                                            "seq: 1} at 85.00% confidence."),
            2u);

  std::filesystem::remove(first_log);
  std::filesystem::remove(second_log);
  report_criterion(7, "scripted chat runs are byte-identical, replay rebuilds "
                      "the final state, and challenges never move the choice");
}

TEST(Acceptance, Criterion8_PropertySuites) {
  const auto start = Clock::now();
  std::mt19937 rng(20260814);

  // 1,000 randomized baselines/topologies: proposals are exactly three,
  // distinct, valid, and different from the baseline - or a documented error.
  const std::vector<std::int64_t> axis_choices = {1, 2, 3, 4, 8, 16};
  const std::vector<BottleneckClass> classes = {
      BottleneckClass::kComputeBound, BottleneckClass::kHbmBound,
      BottleneckClass::kCommunicationBound, BottleneckClass::kInputBound,
      BottleneckClass::kIndeterminate};
  std::size_t successes = 0, documented_errors = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int axis_count = 1 + static_cast<int>(rng() % 3);
    std::string topology_text;
    for (int a = 0; a < axis_count; ++a) {
      if (a) topology_text += 'x';
      topology_text +=
          std::to_string(axis_choices[rng() % axis_choices.size()]);
    }
    const Topology topology = parse_topology(topology_text);
    const MeshEnumeration all = enumerate_meshes(topology.chip_count);
    const ShardingMesh baseline = all.meshes[rng() % all.meshes.size()];

    AnalysisReport report;
    report.experiment.experiment_id = "randomized";
    report.experiment.device_type = "tpu-v5p";
    report.experiment.topology = topology;
    report.experiment.baseline_mesh = baseline;
    report.inefficiency.bottleneck_class = classes[rng() % classes.size()];

    try {
      const std::vector<Proposal> proposals = generate_proposals(report, {}, {});
      ASSERT_EQ(proposals.size(), 3u);
      std::set<std::string> distinct;
      for (const Proposal& p : proposals) {
        distinct.insert(mesh_to_string(p.mesh));
        ASSERT_TRUE(mesh_fits(p.mesh, topology)) << topology_text;
        ASSERT_NE(p.mesh, baseline) << topology_text;
      }
      ASSERT_EQ(distinct.size(), 3u) << topology_text;
      ++successes;
    } catch (const IndeterminateDiagnosis&) {
      ++documented_errors;
    } catch (const NoPlaybook&) {
      ++documented_errors;
    } catch (const InsufficientCandidates&) {
      ++documented_errors;
    }
  }
  EXPECT_EQ(successes + documented_errors, 1000u);
  EXPECT_GT(successes, 0u);
  EXPECT_GT(documented_errors, 0u);

  // Scaling both the op counters' device peaks uniformly never changes the
  // arg-max bottleneck label.
  const DeviceSpec base_device{"scaled", 1.0e12, 1.0e11, 1.0e11};
  const std::vector<double> factors = {0.25, 0.5, 2.0, 4.0, 16.0};
  std::uniform_real_distribution<double> counter_dist(0.0, 5.0e11);
  for (int trial = 0; trial < 300; ++trial) {
    OpProfile op;
    op.op_name = "op";
    op.category = OpCategory::kCustomCall;
    op.total_time_ps = 1.0e12;  // one second
    op.occurrences = 1;
    if (rng() % 2) op.flops = counter_dist(rng);
    if (rng() % 2) op.hbm_bytes = counter_dist(rng);
    if (rng() % 2) op.vmem_read_bytes = counter_dist(rng);
    if (rng() % 2) op.vmem_write_bytes = counter_dist(rng);

    const BottleneckLabel base_label =
        analyze_op(op, base_device, 1.0e12).bottleneck;
    for (double factor : factors) {
      DeviceSpec scaled = base_device;
      scaled.peak_flops_per_chip *= factor;
      scaled.peak_hbm_bw *= factor;
      scaled.peak_vmem_bw *= factor;
      EXPECT_EQ(analyze_op(op, scaled, 1.0e12).bottleneck, base_label);
    }
  }

  // Every bundled knowledge document retrieves itself at rank 1.
  const RetrievalIndex index =
      index_corpus(load_knowledge_corpus(testutil::data_dir() + "/kb"));
  EXPECT_EQ(index.documents.size(), 9u);
  for (const KnowledgeDoc& doc : index.documents) {
    const std::vector<RetrievalHit> hits = query_knowledge(index, doc.body, 1);
    ASSERT_FALSE(hits.empty()) << doc.doc_id;
    EXPECT_EQ(hits[0].doc.doc_id, doc.doc_id);
  }

  EXPECT_LT(seconds_since(start), 30.0);
  report_criterion(8, "randomized proposal, scaling-invariance, and "
                      "self-retrieval properties hold");
}

}  // namespace
}  // namespace asap
