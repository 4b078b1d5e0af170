// Copyright 2026 The vsm-probe Authors.
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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vsm/experiment_config.hpp"
#include "vsm/llm_gateway.hpp"
#include "vsm/types.hpp"

namespace vsm {

// Score substituted for unrecognizable answers and for the health questions.
inline constexpr int kNeutralOption = 3;

enum class Fallback { None, Unrecognizable, HealthQuestion };

std::string_view fallback_name(Fallback fallback);
Fallback parse_fallback(std::string_view name);

struct ParsedAnswer {
  int question_id = 0;
  std::optional<int> option_id;  // nullopt: unrecognized
  std::string rationale;
  Fallback fallback = Fallback::None;

  bool recognized() const { return option_id.has_value(); }
  // The raw score used downstream: the parsed option, or 3 under any fallback.
  int effective_score() const;
};

// Extracts the first JSON object embedded in `raw_text` (surrounding prose and
// code fences are ignored). The option is read from the first present key
// among "option", "option_id", "choice", "answer" (case-insensitive); it must
// be an integer or a string of digits in 1..5. The rationale is read from
// "reason", "rationale" or "explanation". Anything else is unrecognized.
// Questions 15 and 18 parse normally but always carry the health fallback.
ParsedAnswer parse_response(std::string_view raw_text, int question_id);

using ScoreRow = std::array<int, kQuestionCount>;

struct ResponseVector {
  Identity identity;
  std::array<double, kQuestionCount> scores{};
  int seed_count = 0;
};

// Entrywise mean of post-fallback per-seed rows. Throws EmptyInput.
ResponseVector aggregate_identity(const Identity& identity,
                                  std::span<const ScoreRow> per_seed_scores);

// One persisted (identity, question, seed) observation.
struct RawRecord {
  Identity identity;
  int question_id = 0;
  std::uint64_t seed = 0;
  std::array<int, kOptionCount> presentation{1, 2, 3, 4, 5};
  std::string prompt_sha256;
  std::string cache_key;
  std::string raw_text;
  ParsedAnswer parsed;
  bool transport_error = false;
};

nlohmann::json record_to_json(const RawRecord& record);
RawRecord record_from_json(const nlohmann::json& doc);

struct ExperimentSet {
  ExperimentConfig config;
  std::vector<ResponseVector> vectors;  // identity-grid order
  double recognizability_rate = 0.0;
  std::size_t record_count = 0;
  // SHA-256 of the canonical records file; links reports to their data.
  std::string records_sha256;
  nlohmann::json manifest;

  std::string label() const { return set_label(config); }
};

// Builds a set from a complete collection of records. Throws IntegrityError
// on missing or duplicate triples.
ExperimentSet assemble_experiment_set(const ExperimentConfig& config,
                                      std::vector<RawRecord> records);

struct RunOptions {
  std::filesystem::path out_dir;
  std::filesystem::path data_dir;  // empty: default_data_dir()
  // Record transport failures as unrecognized instead of halting.
  bool tolerate_transport = false;
  // 0: use the backend's max_in_flight.
  int max_workers = 0;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

// Files written under RunOptions::out_dir.
inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kRecordsFile = "records.jsonl";
inline constexpr std::string_view kVectorsFile = "vectors.csv";

// Administers the questionnaire for every (identity, question, seed) triple,
// persisting each raw record as it arrives, then aggregates. Triples already
// present in out_dir are skipped, so an interrupted run resumes where it
// stopped. On completion the records file is rewritten in canonical order
// (grid order, then question, then seed position).
//
// Throws TransportError/AuthError (state stays resumable) and IntegrityError
// when existing records disagree with the configuration.
ExperimentSet run_experiment(const ExperimentConfig& config, ChatBackend& backend,
                             const RunOptions& options);

// Reloads a completed set from its directory.
ExperimentSet load_experiment_set(const std::filesystem::path& dir);

std::vector<RawRecord> load_records(const std::filesystem::path& records_path);

}  // namespace vsm
