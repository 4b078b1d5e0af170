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

#include "vsm/collection.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <fstream>

#include "test_support.hpp"
#include "vsm/errors.hpp"

namespace vsm {
namespace {

TEST(ParseResponse, DirectJson) {
  const auto a = parse_response(R"({"option": 4, "reason": "because"})", 3);
  EXPECT_EQ(a.option_id, 4);
  EXPECT_EQ(a.rationale, "because");
  EXPECT_EQ(a.fallback, Fallback::None);
  EXPECT_EQ(a.effective_score(), 4);
}

TEST(ParseResponse, ProseIsUnrecognizedAndNeutral) {
  const auto a = parse_response("I cannot answer that.", 3);
  EXPECT_FALSE(a.recognized());
  EXPECT_EQ(a.fallback, Fallback::Unrecognizable);
  EXPECT_EQ(a.effective_score(), 3);
}

TEST(ParseResponse, HealthQuestionsForcedNeutral) {
  for (int q : {15, 18}) {
    const auto a = parse_response(R"({"option": 5, "reason": "x"})", q);
    EXPECT_EQ(a.option_id, 5);
    EXPECT_EQ(a.fallback, Fallback::HealthQuestion);
    EXPECT_EQ(a.effective_score(), 3);
    EXPECT_EQ(parse_response("garbage", q).fallback, Fallback::HealthQuestion);
  }
}

TEST(ParseResponse, ToleratesFencesAndSurroundingProse) {
  EXPECT_EQ(parse_response("Sure! ```json\n{\"option\": 1, \"reason\": \"a}b\"}\n``` hope it helps", 2)
                .option_id,
            1);
  EXPECT_EQ(parse_response("Thinking {not json} then {\"answer\": 2}", 2).option_id, 2);
  EXPECT_EQ(parse_response("{\"reason\": \"escaped \\\" } brace\", \"option\": 5}", 2).option_id, 5);
}

TEST(ParseResponse, KeyAliasesAndValueForms) {
  EXPECT_EQ(parse_response(R"({"Option_ID": 2})", 1).option_id, 2);
  EXPECT_EQ(parse_response(R"({"CHOICE": " 3 "})", 1).option_id, 3);
  EXPECT_EQ(parse_response(R"({"answer": "5", "Rationale": "r"})", 1).rationale, "r");
  EXPECT_EQ(parse_response(R"({"option": 4, "explanation": "e"})", 1).rationale, "e");
}

TEST(ParseResponse, RejectsOutOfRangeAndNonInteger) {
  for (const char* text : {R"({"option": 0})", R"({"option": 6})", R"({"option": 2.5})",
                           R"({"option": "two"})", R"({"option": null})", R"({"opt": 2})",
                           "", "{", R"({"option": "12"})"}) {
    EXPECT_FALSE(parse_response(text, 1).recognized()) << text;
  }
}

TEST(ParseResponse, FirstObjectDecides) {
  // The first complete object has no option; later objects are not consulted.
  EXPECT_FALSE(parse_response(R"({"note": 1} {"option": 2})", 1).recognized());
}

TEST(AggregateIdentity, MeanOfIdenticalRowsIsTheRow) {
  ScoreRow row;
  for (int q = 0; q < kQuestionCount; ++q) row[static_cast<std::size_t>(q)] = 1 + q % 5;
  const std::vector<ScoreRow> rows(10, row);
  const auto v = aggregate_identity({}, rows);
  EXPECT_EQ(v.seed_count, 10);
  for (int q = 0; q < kQuestionCount; ++q) {
    EXPECT_EQ(v.scores[static_cast<std::size_t>(q)], row[static_cast<std::size_t>(q)]);
  }
}

TEST(AggregateIdentity, MidpointAndHandMean) {
  ScoreRow ones;
  ones.fill(1);
  ScoreRow fives;
  fives.fill(5);
  const std::vector<ScoreRow> two{ones, fives};
  for (double s : aggregate_identity({}, two).scores) EXPECT_EQ(s, 3.0);

  std::vector<ScoreRow> ten(10, ScoreRow{});
  const int q1[10] = {2, 2, 3, 3, 3, 3, 3, 3, 3, 3};
  for (std::size_t s = 0; s < 10; ++s) {
    ten[s].fill(3);
    ten[s][0] = q1[s];
  }
  // (2+2+3*8)/10 = 28/10
  EXPECT_DOUBLE_EQ(aggregate_identity({}, ten).scores[0], 2.8);
}

TEST(AggregateIdentity, EmptyInput) {
  EXPECT_THROW(aggregate_identity({}, std::span<const ScoreRow>{}), EmptyInput);
}

ExperimentConfig small_config(int seeds = 2) {
  ExperimentConfig c;
  c.model_name = "scripted";
  c.seeds = default_seeds(seeds);
  return c;
}

TEST(RunExperiment, FixedOptionThreeIsNeutralEverywhere) {
  testing::TempDir dir("run-fixed");
  auto backend = scripted_responder(policy::FixedOption{3});
  const auto set = run_experiment(small_config(), *backend, {.out_dir = dir.path()});
  EXPECT_EQ(set.record_count, 2u * 24 * 54);
  ASSERT_EQ(set.vectors.size(), 54u);
  EXPECT_EQ(set.recognizability_rate, 1.0);
  for (const auto& v : set.vectors) {
    for (double s : v.scores) EXPECT_EQ(s, 3.0);
    EXPECT_EQ(v.seed_count, 2);
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "vectors.csv"));
  const auto reloaded = load_experiment_set(dir.path());
  EXPECT_EQ(reloaded.records_sha256, set.records_sha256);
}

TEST(RunExperiment, HealthEntriesAreExactlyThree) {
  testing::TempDir dir("run-health");
  auto backend = scripted_responder(policy::FixedOption{5});
  const auto set = run_experiment(small_config(), *backend, {.out_dir = dir.path()});
  for (const auto& v : set.vectors) {
    EXPECT_EQ(v.scores[14], 3.0);
    EXPECT_EQ(v.scores[17], 3.0);
    EXPECT_EQ(v.scores[0], 5.0);
  }
}

TEST(RunExperiment, RecognizabilityExcludesHealthQuestions) {
  // Malformed on every response: the rate is 0 and does not count q15/q18.
  testing::TempDir dir("run-malformed");
  auto backend = scripted_responder(policy::Malformed{1.0, 0});
  const auto set = run_experiment(small_config(1), *backend, {.out_dir = dir.path()});
  EXPECT_EQ(set.recognizability_rate, 0.0);
  for (const auto& v : set.vectors) {
    for (double s : v.scores) EXPECT_EQ(s, 3.0);
  }
}

// Fails with TransportError after `budget` successful calls.
class FlakyBackend final : public ChatBackend {
 public:
  FlakyBackend(std::shared_ptr<ChatBackend> inner, int budget)
      : inner_(std::move(inner)), budget_(budget) {}
  ChatResponse complete(const ChatRequest& r) override {
    if (budget_.fetch_sub(1) <= 0) throw TransportError("simulated outage");
    return inner_->complete(r);
  }
  BackendKind kind() const override { return BackendKind::Http; }
  int max_in_flight() const override { return 4; }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::atomic<int> budget_;
};

TEST(RunExperiment, ResumesAfterTransportFailure) {
  testing::TempDir dir("run-resume");
  testing::TempDir fresh("run-resume-ref");
  const auto config = small_config();
  auto inner = scripted_responder(policy::UniformRandom{5});

  FlakyBackend flaky(inner, 700);
  EXPECT_THROW(run_experiment(config, flaky, {.out_dir = dir.path()}), TransportError);
  EXPECT_THROW(load_experiment_set(dir.path()), IncompleteSet);
  const auto partial = load_records(dir / "records.jsonl");
  EXPECT_GE(partial.size(), 700u - 4u);
  EXPECT_LE(partial.size(), 700u);

  std::atomic<int> calls{0};
  struct Counting final : ChatBackend {
    ChatBackend* inner;
    std::atomic<int>* calls;
    ChatResponse complete(const ChatRequest& r) override {
      ++*calls;
      return inner->complete(r);
    }
    BackendKind kind() const override { return BackendKind::Scripted; }
  } counting;
  counting.inner = inner.get();
  counting.calls = &calls;
  const auto resumed = run_experiment(config, counting, {.out_dir = dir.path()});
  EXPECT_EQ(static_cast<std::size_t>(calls.load()) + partial.size(), resumed.record_count);

  const auto straight = run_experiment(config, *inner, {.out_dir = fresh.path()});
  EXPECT_EQ(read_file(dir / "records.jsonl"), read_file(fresh / "records.jsonl"));
  EXPECT_EQ(read_file(dir / "vectors.csv"), read_file(fresh / "vectors.csv"));
}

TEST(RunExperiment, TornFinalLineIsDiscardedOnResume) {
  testing::TempDir dir("run-torn");
  const auto config = small_config(1);
  auto inner = scripted_responder(policy::UniformRandom{2});
  FlakyBackend flaky(inner, 50);
  EXPECT_THROW(run_experiment(config, flaky, {.out_dir = dir.path(), .max_workers = 1}),
               TransportError);
  {
    std::ofstream out(dir / "records.jsonl", std::ios::app);
    out << R"({"nation": "USA", "gend)";
  }
  const auto set = run_experiment(config, *inner, {.out_dir = dir.path()});
  EXPECT_EQ(set.record_count, 24u * 54);
}

TEST(RunExperiment, ToleratedTransportFailuresBecomeNeutral) {
  testing::TempDir dir("run-tolerate");
  FlakyBackend flaky(scripted_responder(policy::FixedOption{1}), 0);
  const auto set = run_experiment(small_config(1), flaky,
                                  {.out_dir = dir.path(), .tolerate_transport = true});
  EXPECT_EQ(set.recognizability_rate, 0.0);
  const auto records = load_records(dir / "records.jsonl");
  EXPECT_TRUE(records.front().transport_error);
  for (const auto& v : set.vectors) {
    for (double s : v.scores) EXPECT_EQ(s, 3.0);
  }
}

TEST(RunExperiment, RefusesToMixConfigurations) {
  testing::TempDir dir("run-mismatch");
  auto backend = scripted_responder(policy::FixedOption{2});
  run_experiment(small_config(1), *backend, {.out_dir = dir.path()});
  auto other = small_config(1);
  other.shuffle = true;
  EXPECT_THROW(run_experiment(other, *backend, {.out_dir = dir.path()}), IntegrityError);
}

TEST(RunExperiment, DetectsTamperedRecords) {
  testing::TempDir dir("run-tamper");
  auto backend = scripted_responder(policy::FixedOption{2});
  run_experiment(small_config(1), *backend, {.out_dir = dir.path()});

  auto text = read_file(dir / "records.jsonl");
  const auto first_line = text.substr(0, text.find('\n') + 1);
  write_file_atomic(dir / "records.jsonl", text + first_line);
  EXPECT_THROW(run_experiment(small_config(1), *backend, {.out_dir = dir.path()}), IntegrityError);

  auto doc = nlohmann::json::parse(first_line);
  doc["prompt_sha256"] = std::string(64, '0');
  write_file_atomic(dir / "records.jsonl", doc.dump() + "\n" + text.substr(first_line.size()));
  EXPECT_THROW(run_experiment(small_config(1), *backend, {.out_dir = dir.path()}), IntegrityError);
}

TEST(RunExperiment, ConcurrentWorkersMatchSequentialRun) {
  testing::TempDir seq("run-seq");
  testing::TempDir par("run-par");
  auto backend = scripted_responder(policy::UniformRandom{77});
  auto config = small_config(2);
  config.shuffle = true;
  run_experiment(config, *backend, {.out_dir = seq.path(), .max_workers = 1});
  run_experiment(config, *backend, {.out_dir = par.path(), .max_workers = 8});
  EXPECT_EQ(read_file(seq / "records.jsonl"), read_file(par / "records.jsonl"));
}

TEST(RunExperiment, ShuffledRecordsCarryPerSeedPresentation) {
  testing::TempDir dir("run-shuffle");
  auto backend = scripted_responder(policy::FixedOption{4});
  auto config = small_config(3);
  config.shuffle = true;
  run_experiment(config, *backend, {.out_dir = dir.path()});
  for (const auto& r : load_records(dir / "records.jsonl")) {
    EXPECT_EQ(r.presentation, present_options(r.question_id, true, r.seed).order);
  }
}

TEST(AssembleExperimentSet, RejectsIncompleteRecords) {
  testing::TempDir dir("assemble");
  auto backend = scripted_responder(policy::FixedOption{2});
  run_experiment(small_config(1), *backend, {.out_dir = dir.path()});
  auto records = load_records(dir / "records.jsonl");
  records.pop_back();
  EXPECT_THROW(assemble_experiment_set(small_config(1), records), IntegrityError);
}

TEST(Records, JsonRoundTrip) {
  RawRecord r;
  r.identity = {Nation::SouthAfrica, Gender::Female, 45};
  r.question_id = 18;
  r.seed = 123456789012345ULL;
  r.presentation = {3, 1, 5, 2, 4};
  r.prompt_sha256 = std::string(64, 'a');
  r.cache_key = std::string(64, 'b');
  r.raw_text = "{\"option\": 5}\n\t\"quoted\" ü";
  r.parsed = parse_response(r.raw_text, 18);
  const auto back = record_from_json(record_to_json(r));
  EXPECT_EQ(record_to_json(back), record_to_json(r));
  EXPECT_EQ(back.parsed.effective_score(), 3);
}

}  // namespace
}  // namespace vsm
