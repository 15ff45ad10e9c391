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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "asap/knowledge.hpp"
#include "asap/json_io.hpp"
#include "test_util.hpp"

namespace asap {
namespace {

TEST(Tokenize, LowercasesSplitsAndDropsShortFragments) {
  EXPECT_EQ(tokenize("HBM model-parallelism!"),
            (std::vector<std::string>{"hbm", "model", "parallelism"}));
  EXPECT_EQ(tokenize("a b c dd"), (std::vector<std::string>{"dd"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("! - ?").empty());
  EXPECT_EQ(tokenize("all-reduce, ALL-REDUCE"),
            (std::vector<std::string>{"all", "reduce", "all", "reduce"}));
}

std::vector<KnowledgeDoc> three_doc_corpus() {
  return {
      {"a", "Memory pressure", "hbm pressure grows with unsharded model state",
       {"hbm"}},
      {"b", "Throughput", "batch splitting raises arithmetic throughput", {}},
      {"c", "Duty", "duty cycle measures busy accelerator time", {}},
  };
}

TEST(IndexCorpus, CountsDocumentFrequencies) {
  const RetrievalIndex index = index_corpus(three_doc_corpus());
  ASSERT_EQ(index.documents.size(), 3u);
  EXPECT_EQ(index.doc_frequency.at("hbm"), 1);
  EXPECT_EQ(index.doc_frequency.at("model"), 1);
  EXPECT_EQ(index.doc_frequency.at("duty"), 1);
  EXPECT_EQ(index.term_frequency[0].at("pressure"), 1);
}

TEST(IndexCorpus, RebuildIsIdempotent) {
  const RetrievalIndex first = index_corpus(three_doc_corpus());
  const RetrievalIndex second = index_corpus(three_doc_corpus());
  EXPECT_EQ(first.doc_frequency, second.doc_frequency);
  EXPECT_EQ(first.term_frequency, second.term_frequency);
  EXPECT_EQ(first.documents, second.documents);
}

TEST(IndexCorpus, RejectsDuplicateDocIds) {
  std::vector<KnowledgeDoc> docs = three_doc_corpus();
  docs.push_back({"a", "Duplicate", "text body here", {}});
  EXPECT_THROW(index_corpus(docs), DuplicateDocId);
}

TEST(IndexCorpus, EmptyCorpusYieldsEmptyResults) {
  const RetrievalIndex index = index_corpus({});
  EXPECT_TRUE(index.documents.empty());
  EXPECT_TRUE(query_knowledge(index, "anything at all", 3).empty());
}

TEST(QueryKnowledge, HandOracleOnThreeDocCorpus) {
  const RetrievalIndex index = index_corpus(three_doc_corpus());
  const std::vector<RetrievalHit> hits =
      query_knowledge(index, "HBM model parallelism", 3);
  // Only doc "a" contains query terms: "hbm" (df 1) and "model" (df 1),
  // each contributing ln((3+1)/(1+1)) once.
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].doc.doc_id, "a");
  EXPECT_NEAR(hits[0].score, 2.0 * std::log(2.0), 1e-12);
}

TEST(QueryKnowledge, AbsentTermsYieldEmptyResult) {
  const RetrievalIndex index = index_corpus(three_doc_corpus());
  EXPECT_TRUE(query_knowledge(index, "quantum entanglement", 3).empty());
}

TEST(QueryKnowledge, TiesResolveByDocId) {
  const RetrievalIndex index = index_corpus({{"z", "t", "identical body text", {}},
                                             {"y", "t", "identical body text", {}},
                                             {"x", "t", "unrelated filler words", {}}});
  const std::vector<RetrievalHit> hits =
      query_knowledge(index, "identical body", 2);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].doc.doc_id, "y");
  EXPECT_EQ(hits[1].doc.doc_id, "z");
  EXPECT_DOUBLE_EQ(hits[0].score, hits[1].score);
}

TEST(QueryKnowledge, RankingIsDeterministicAcrossRuns) {
  const RetrievalIndex index = index_corpus(three_doc_corpus());
  const auto first = query_knowledge(index, "model state throughput", 3);
  const auto second = query_knowledge(index, "model state throughput", 3);
  EXPECT_EQ(first, second);
}

TEST(Corpus, LoadsBundledDirectory) {
  const std::vector<KnowledgeDoc> docs =
      load_knowledge_corpus(testutil::data_dir() + "/kb");
  EXPECT_EQ(docs.size(), 9u);
  for (const KnowledgeDoc& doc : docs) {
    EXPECT_FALSE(doc.doc_id.empty());
    EXPECT_FALSE(doc.title.empty());
    EXPECT_FALSE(doc.body.empty());
    EXPECT_FALSE(doc.tags.empty()) << doc.doc_id;
  }
  // Filename order fixes doc order.
  EXPECT_EQ(docs.front().doc_id, "collective-overhead");
  EXPECT_THROW(load_knowledge_corpus(testutil::data_dir() + "/absent"), IoFailure);
}

TEST(Corpus, EveryBundledDocSelfRetrieves) {
  const RetrievalIndex index =
      index_corpus(load_knowledge_corpus(testutil::data_dir() + "/kb"));
  for (const KnowledgeDoc& doc : index.documents) {
    const std::vector<RetrievalHit> hits = query_knowledge(index, doc.body, 1);
    ASSERT_FALSE(hits.empty()) << doc.doc_id;
    EXPECT_EQ(hits[0].doc.doc_id, doc.doc_id);
  }
}

OptimizationRecord seeded_record() {
  OptimizationRecord record;
  record.record_id = "opt-v5p-0417";
  record.device_family = "tpu-v5p";
  record.topology = parse_topology("8x8x8");
  record.bottleneck_class = BottleneckClass::kComputeBound;
  record.before_mesh = ShardingMesh{1, 8, 8, 8};
  record.after_mesh = ShardingMesh{1, 16, 8, 4};
  record.impact_summary = "step time dropped";
  return record;
}

TEST(OptimizationRecords, ValidateMeshesAndChange) {
  EXPECT_NO_THROW(validate_record(seeded_record()));
  OptimizationRecord unchanged = seeded_record();
  unchanged.after_mesh = unchanged.before_mesh;
  EXPECT_THROW(validate_record(unchanged), InvariantError);
  OptimizationRecord misfit = seeded_record();
  misfit.after_mesh = ShardingMesh{1, 16, 8, 8};
  EXPECT_THROW(validate_record(misfit), MeshChipMismatch);
}

TEST(FindSimilar, IdenticalScenarioScoresFive) {
  const OptimizationRecord record = seeded_record();
  const ScenarioKey scenario{"tpu-v5p", BottleneckClass::kComputeBound,
                             record.before_mesh};
  const std::vector<PrecedentMatch> matches =
      find_similar_optimizations({record}, scenario, 3);
  ASSERT_EQ(matches.size(), 1u);
  EXPECT_DOUBLE_EQ(matches[0].score, 5.0);
}

TEST(FindSimilar, ScoreIsMaximalOnlyOnExactMatch) {
  const OptimizationRecord record = seeded_record();
  ScenarioKey offset{"tpu-v5p", BottleneckClass::kComputeBound,
                     ShardingMesh{1, 16, 8, 4}};
  const std::vector<PrecedentMatch> matches =
      find_similar_optimizations({record}, offset, 3);
  ASSERT_EQ(matches.size(), 1u);
  EXPECT_LT(matches[0].score, 5.0);
  EXPECT_GT(matches[0].score, 4.0);
}

TEST(FindSimilar, BundledHistoryHitsFirstExperimentOnly) {
  const std::vector<OptimizationRecord> history =
      load_history(testutil::data_dir() + "/history.json");
  ASSERT_EQ(history.size(), 1u);

  const ScenarioKey exp1{"tpu-v5p", BottleneckClass::kComputeBound,
                         ShardingMesh{1, 8, 8, 8}};
  const std::vector<PrecedentMatch> hit =
      find_similar_optimizations(history, exp1, 3);
  ASSERT_EQ(hit.size(), 1u);
  EXPECT_EQ(hit[0].record.record_id, "opt-v5p-0417");
  EXPECT_GT(hit[0].score, 4.0);
  EXPECT_EQ(hit[0].record.after_mesh, (ShardingMesh{1, 16, 8, 4}));

  const ScenarioKey exp2{"tpu-v6e", BottleneckClass::kHbmBound,
                         ShardingMesh{1, 4, 1, 4}};
  EXPECT_TRUE(find_similar_optimizations(history, exp2, 3).empty());

  const ScenarioKey exp3{"tpu-v5e", BottleneckClass::kCommunicationBound,
                         ShardingMesh{1, 4, 4, 16}};
  EXPECT_TRUE(find_similar_optimizations(history, exp3, 3).empty());
}

TEST(FindSimilar, RejectsNonPositiveDims) {
  const OptimizationRecord record = seeded_record();
  const ScenarioKey bad{"tpu-v5p", BottleneckClass::kComputeBound,
                        ShardingMesh{0, 8, 8, 8}};
  EXPECT_THROW(find_similar_optimizations({record}, bad, 3), NonPositiveDim);
}

TEST(FindSimilar, OrdersByScoreThenRecordId) {
  OptimizationRecord same_family = seeded_record();
  same_family.record_id = "b-rec";
  same_family.bottleneck_class = BottleneckClass::kHbmBound;
  OptimizationRecord twin = same_family;
  twin.record_id = "a-rec";
  OptimizationRecord exact = seeded_record();
  exact.record_id = "c-rec";

  const ScenarioKey scenario{"tpu-v5p", BottleneckClass::kComputeBound,
                             ShardingMesh{1, 8, 8, 8}};
  const std::vector<PrecedentMatch> matches =
      find_similar_optimizations({same_family, twin, exact}, scenario, 3);
  ASSERT_EQ(matches.size(), 3u);
  EXPECT_EQ(matches[0].record.record_id, "c-rec");  // 5.0
  EXPECT_EQ(matches[1].record.record_id, "a-rec");  // family only, tie
  EXPECT_EQ(matches[2].record.record_id, "b-rec");
  EXPECT_DOUBLE_EQ(matches[1].score, matches[2].score);

  EXPECT_EQ(find_similar_optimizations({same_family, twin, exact}, scenario, 1)
                .size(),
            1u);
}

}  // namespace
}  // namespace asap
