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

// vsm-probe command-line front end.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vsm/collection.hpp"
#include "vsm/errors.hpp"
#include "vsm/reference_data.hpp"
#include "vsm/reporting.hpp"
#include "vsm/util.hpp"

namespace fs = std::filesystem;
using namespace vsm;

namespace {

struct RunArgs {
  std::string model;
  std::string lang = "en";
  std::string response_lang;
  bool shuffle = false;
  int seeds = 10;
  std::string endpoint;
  std::string out;
  std::string cache;
  std::string api_key_env = "OPENAI_API_KEY";
  double timeout_s = 120;
  int concurrency = 4;
  bool tolerate_transport = false;
  std::string backend = "http";
  std::string policy;
  double temperature = 1.0;
  double top_p = 1.0;
  int max_tokens = 512;
  std::string data_dir;
  bool quiet = false;
};

struct ScoreArgs {
  std::string set;
  std::string format = "json";
  std::string out;
};

struct CompareArgs {
  std::vector<std::string> sets;
  std::string metric = "ss_h";
  std::string format = "csv";
  std::string out;
};

struct ReportArgs {
  std::vector<std::string> sets;
  std::string mmlu;
  std::string out;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(out, text);
  }
}

std::vector<ExperimentSet> load_sets(const std::vector<std::string>& dirs) {
  std::vector<ExperimentSet> sets;
  for (const auto& d : dirs) sets.push_back(load_experiment_set(d));
  return sets;
}

int do_run(const RunArgs& a) {
  ExperimentConfig config;
  config.model_name = a.model;
  config.prompt_locale = parse_locale(a.lang);
  if (!a.response_lang.empty()) config.response_language = parse_locale(a.response_lang);
  config.shuffle = a.shuffle;
  config.seeds = default_seeds(a.seeds);
  config.sampling = {a.temperature, a.top_p, a.max_tokens};
  config.endpoint.base_url = a.endpoint;
  config.endpoint.timeout = std::chrono::milliseconds(static_cast<long>(a.timeout_s * 1000));
  config.endpoint.max_in_flight = a.concurrency;
  validate_config(config);

  const fs::path out(a.out);
  auto cache = std::make_shared<ReplayCache>(a.cache.empty() ? out / "cache" : fs::path(a.cache));

  std::shared_ptr<ChatBackend> upstream;
  if (a.backend == "http") {
    if (a.endpoint.empty()) throw ConfigError("--endpoint is required for the http backend");
    if (const char* key = std::getenv(a.api_key_env.c_str())) config.endpoint.api_key = key;
    upstream = std::make_shared<HttpBackend>(config.endpoint);
  } else if (a.backend == "scripted") {
    if (a.policy.empty()) throw ConfigError("--policy is required for the scripted backend");
    upstream = scripted_responder(parse_responder_policy(a.policy));
  } else if (a.backend != "replay") {
    throw ConfigError("unknown backend '" + a.backend + "' (expected http, replay, scripted)");
  }
  ReplayBackend backend(cache, upstream);

  RunOptions options;
  options.out_dir = out;
  if (!a.data_dir.empty()) options.data_dir = a.data_dir;
  options.tolerate_transport = a.tolerate_transport;
  options.max_workers = a.backend == "http" ? a.concurrency : 0;
  if (!a.quiet) {
    options.progress = [](std::size_t done, std::size_t total) {
      if (done == total || done % 500 == 0) {
        std::cerr << "\r" << done << "/" << total << std::flush;
        if (done == total) std::cerr << "\n";
      }
    };
  }
  const auto set = run_experiment(config, backend, options);
  std::cout << set.label() << ": " << set.record_count << " records, recognizability "
            << format_fixed(set.recognizability_rate, 4) << "\n";
  return 0;
}

int do_score(const ScoreArgs& a) {
  const auto set = load_experiment_set(a.set);
  const auto report = intra_set_report(set, load_human_reference());
  const auto format = parse_export_format(a.format);
  if (a.out.empty()) {
    std::cout << (format == ExportFormat::Csv ? to_csv(report) : to_json(report) + "\n");
  } else {
    export_file(report, format, a.out);
  }
  return 0;
}

int do_compare(const CompareArgs& a) {
  const auto sets = load_sets(a.sets);
  const auto m = comparison_matrix(sets, parse_metric(a.metric), load_human_reference());
  const auto format = parse_export_format(a.format);
  if (a.out.empty()) {
    std::cout << (format == ExportFormat::Csv ? to_csv(m) : to_json(m) + "\n");
  } else {
    export_file(m, format, a.out);
  }
  return 0;
}

int do_report(const ReportArgs& a) {
  const auto sets = load_sets(a.sets);
  const auto human = load_human_reference();
  const fs::path out(a.out);
  fs::create_directories(out);

  emit(national_scores_csv(human.nationals), (out / "human_nationals.csv").string());
  for (const auto& s : sets) {
    const auto r = intra_set_report(s, human);
    const auto stem = out / s.label();
    export_file(r, ExportFormat::Json, stem.string() + ".report.json");
    export_file(r, ExportFormat::Csv, stem.string() + ".report.csv");
    emit(identity_scores_csv(s), stem.string() + ".identities.csv");
  }
  if (sets.size() >= 2) {
    for (auto metric : {MatrixMetric::Dbi, MatrixMetric::Ss, MatrixMetric::SsH,
                        MatrixMetric::PearsonRho}) {
      const auto m = comparison_matrix(sets, metric, human);
      const auto stem = (out / ("matrix_" + std::string(metric_name(metric)))).string();
      export_file(m, ExportFormat::Csv, stem + ".csv");
      export_file(m, ExportFormat::Json, stem + ".json");
    }
  }
  if (!a.mmlu.empty()) {
    const auto table = load_mmlu(a.mmlu);
    std::vector<std::string> models;
    for (const auto& s : sets) {
      if (std::find(models.begin(), models.end(), s.config.model_name) == models.end()) {
        models.push_back(s.config.model_name);
      }
    }
    const auto m = mmlu_delta_matrix(table, models);
    export_file(m, ExportFormat::Csv, out / "matrix_mmlu_delta.csv");
    export_file(m, ExportFormat::Json, out / "matrix_mmlu_delta.json");
  }
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Administer the VSM 2013 questionnaire to chat models and score the results"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Collect one experiment set");
  run_cmd->add_option("--model", run.model, "Model name sent to the endpoint")->required();
  run_cmd->add_option("--lang", run.lang, "Prompt language")->check(CLI::IsMember({"en", "zh"}));
  run_cmd->add_option("--response-lang", run.response_lang, "Requested reply language")
      ->check(CLI::IsMember({"en", "zh"}));
  run_cmd->add_flag("--shuffle", run.shuffle, "Shuffle option order per question and seed");
  run_cmd->add_option("--seeds", run.seeds, "Repetitions per prompt")->check(CLI::PositiveNumber);
  run_cmd->add_option("--endpoint", run.endpoint, "OpenAI-compatible base URL");
  run_cmd->add_option("--out", run.out, "Experiment directory")->required();
  run_cmd->add_option("--cache", run.cache, "Replay cache directory (default OUT/cache)");
  run_cmd->add_option("--api-key-env", run.api_key_env, "Environment variable with the API key");
  run_cmd->add_option("--timeout", run.timeout_s, "Per-request timeout in seconds")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--concurrency", run.concurrency, "Requests in flight")
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--tolerate-transport", run.tolerate_transport,
                    "Record exhausted transport failures as unrecognized answers");
  run_cmd->add_option("--backend", run.backend, "http, replay or scripted")
      ->check(CLI::IsMember({"http", "replay", "scripted"}));
  run_cmd->add_option("--policy", run.policy,
                      "Scripted policy: fixed:K, random:SEED, malformed:RATE[:SEED], profile:PATH");
  run_cmd->add_option("--temperature", run.temperature);
  run_cmd->add_option("--top-p", run.top_p);
  run_cmd->add_option("--max-tokens", run.max_tokens);
  run_cmd->add_option("--data-dir", run.data_dir, "Questionnaire and template assets");
  run_cmd->add_flag("--quiet", run.quiet, "No progress output");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Intra-set report for one experiment set");
  score_cmd->add_option("--set", score.set, "Experiment directory")->required();
  score_cmd->add_option("--format", score.format)->check(CLI::IsMember({"csv", "json"}));
  score_cmd->add_option("--out", score.out, "Output file (default stdout)");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Pairwise metric matrix across sets");
  compare_cmd->add_option("--sets", compare.sets, "Experiment directories")
      ->required()
      ->expected(2, -1);
  compare_cmd->add_option("--metric", compare.metric)
      ->check(CLI::IsMember({"ss_h", "ss", "dbi", "pearson", "pearson_rho"}));
  compare_cmd->add_option("--format", compare.format)->check(CLI::IsMember({"csv", "json"}));
  compare_cmd->add_option("--out", compare.out, "Output file (default stdout)");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Write every report and matrix to a directory");
  report_cmd->add_option("--sets", report.sets, "Experiment directories")
      ->required()
      ->expected(1, -1);
  report_cmd->add_option("--mmlu", report.mmlu, "model,score CSV");
  report_cmd->add_option("--out", report.out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return do_run(run);
    if (*score_cmd) return do_score(score);
    if (*compare_cmd) return do_compare(compare);
    if (*report_cmd) return do_report(report);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
