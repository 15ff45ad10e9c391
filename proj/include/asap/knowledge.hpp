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
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "asap/core.hpp"
#include "asap/diagnosis.hpp"

namespace asap {

// ---------------------------------------------------------------------------
// Curated tuning notes, retrieved lexically (tf-idf) to back up proposals.
// ---------------------------------------------------------------------------

struct KnowledgeDoc {
  std::string doc_id;
  std::string title;
  std::string body;
  std::vector<std::string> tags;

  friend bool operator==(const KnowledgeDoc&, const KnowledgeDoc&) = default;
};

// Lowercases, splits on every non-alphanumeric byte, drops one-letter
// fragments.
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    if (std::isalnum(static_cast<unsigned char>(ch))) {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else if (!current.empty()) {
      if (current.size() >= 2) tokens.push_back(current);
      current.clear();
    }
  }
  if (current.size() >= 2) tokens.push_back(current);
  return tokens;
}

struct RetrievalIndex {
  std::vector<KnowledgeDoc> documents;
  std::map<std::string, int> doc_frequency;           // term -> #docs containing it
  std::vector<std::map<std::string, int>> term_frequency;  // per-doc term counts
};

// Builds the index over document bodies. Duplicate doc ids are configuration
// mistakes and rejected outright.
inline RetrievalIndex index_corpus(std::vector<KnowledgeDoc> docs) {
  RetrievalIndex index;
  for (const KnowledgeDoc& doc : docs) {
    for (const KnowledgeDoc& seen : index.documents) {
      if (seen.doc_id == doc.doc_id)
        throw DuplicateDocId("duplicate knowledge doc id '" + doc.doc_id + "'");
    }
    std::map<std::string, int> counts;
    for (const std::string& token : tokenize(doc.body)) ++counts[token];
    for (const auto& [term, _] : counts) ++index.doc_frequency[term];
    index.term_frequency.push_back(std::move(counts));
    index.documents.push_back(doc);
  }
  return index;
}

struct RetrievalHit {
  KnowledgeDoc doc;
  double score = 0;

  friend bool operator==(const RetrievalHit&, const RetrievalHit&) = default;
};

// Scores each document as the sum over query-token occurrences of
// tf * ln((N + 1) / (df + 1)); only positive scores are returned, ordered
// by score then doc id.
inline std::vector<RetrievalHit> query_knowledge(const RetrievalIndex& index,
                                                 const std::string& query,
                                                 std::size_t k = 3) {
  const double n_docs = static_cast<double>(index.documents.size());
  std::vector<RetrievalHit> hits;
  const std::vector<std::string> query_tokens = tokenize(query);
  for (std::size_t d = 0; d < index.documents.size(); ++d) {
    double score = 0;
    for (const std::string& token : query_tokens) {
      auto tf_it = index.term_frequency[d].find(token);
      if (tf_it == index.term_frequency[d].end()) continue;
      auto df_it = index.doc_frequency.find(token);
      const double df = df_it == index.doc_frequency.end()
                            ? 0.0
                            : static_cast<double>(df_it->second);
      score += tf_it->second * std::log((n_docs + 1.0) / (df + 1.0));
    }
    if (score > 0) hits.push_back({index.documents[d], score});
  }
  std::sort(hits.begin(), hits.end(),
            [](const RetrievalHit& a, const RetrievalHit& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.doc.doc_id < b.doc.doc_id;
            });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

// Loads `<dir>/*.txt` in filename order: first line is the title, the rest
// is the body, and a sibling `<stem>.tags` file lists one tag per line.
inline std::vector<KnowledgeDoc> load_knowledge_corpus(
    const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoFailure("knowledge corpus directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<KnowledgeDoc> docs;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw IoFailure("cannot read knowledge doc: " + file.string());
    KnowledgeDoc doc;
    doc.doc_id = file.stem().string();
    std::getline(in, doc.title);
    std::string line;
    while (std::getline(in, line)) {
      if (!doc.body.empty()) doc.body += '\n';
      doc.body += line;
    }
    std::filesystem::path tags_file = file;
    tags_file.replace_extension(".tags");
    if (std::filesystem::exists(tags_file)) {
      std::ifstream tags_in(tags_file);
      std::string tag;
      while (std::getline(tags_in, tag)) {
        if (!tag.empty()) doc.tags.push_back(tag);
      }
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

// ---------------------------------------------------------------------------
// Past optimization outcomes, matched to the current scenario by device
// family, bottleneck class, and mesh geometry.
// ---------------------------------------------------------------------------

struct OptimizationRecord {
  std::string record_id;
  std::string device_family;
  Topology topology;
  BottleneckClass bottleneck_class = BottleneckClass::kIndeterminate;
  ShardingMesh before_mesh;
  ShardingMesh after_mesh;
  std::string impact_summary;
  std::optional<std::string> profile_link;

  friend bool operator==(const OptimizationRecord&, const OptimizationRecord&) = default;
};

inline void validate_record(const OptimizationRecord& record) {
  if (record.before_mesh == record.after_mesh)
    throw InvariantError("record '" + record.record_id +
                         "' changes nothing: before equals after");
  validate_mesh(record.before_mesh, record.topology);
  validate_mesh(record.after_mesh, record.topology);
}

struct ScenarioKey {
  std::string device_family;
  BottleneckClass bottleneck_class = BottleneckClass::kIndeterminate;
  ShardingMesh mesh;
};

struct PrecedentMatch {
  OptimizationRecord record;
  double score = 0;

  friend bool operator==(const PrecedentMatch&, const PrecedentMatch&) = default;
};

// Mesh distance in log2 space: summed axis-wise magnitude difference, so
// doubling one axis costs 1 regardless of its absolute size.
inline double mesh_log_distance(const ShardingMesh& a, const ShardingMesh& b) {
  for (std::int64_t dim : {a.replica, a.data, a.model, a.seq, b.replica,
                           b.data, b.model, b.seq}) {
    if (dim < 1) throw NonPositiveDim("mesh dimensions must be >= 1");
  }
  auto term = [](std::int64_t x, std::int64_t y) {
    return std::abs(std::log2(static_cast<double>(x)) -
                    std::log2(static_cast<double>(y)));
  };
  return term(a.replica, b.replica) + term(a.data, b.data) +
         term(a.model, b.model) + term(a.seq, b.seq);
}

inline constexpr double kPrecedentScoreFloor = 2.0;

// Scores 2 points for a device-family match, 2 for a bottleneck-class
// match, plus a mesh-proximity bonus in (0, 1]. Matches below the floor
// are noise and dropped.
inline std::vector<PrecedentMatch> find_similar_optimizations(
    const std::vector<OptimizationRecord>& records, const ScenarioKey& scenario,
    std::size_t k = 3) {
  std::vector<PrecedentMatch> matches;
  for (const OptimizationRecord& record : records) {
    double score = 0;
    if (record.device_family == scenario.device_family) score += 2.0;
    if (record.bottleneck_class == scenario.bottleneck_class) score += 2.0;
    score += 1.0 / (1.0 + mesh_log_distance(record.before_mesh, scenario.mesh));
    if (score < kPrecedentScoreFloor) continue;
    matches.push_back({record, score});
  }
  std::sort(matches.begin(), matches.end(),
            [](const PrecedentMatch& a, const PrecedentMatch& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.record.record_id < b.record.record_id;
            });
  if (matches.size() > k) matches.resize(k);
  return matches;
}

}  // namespace asap
