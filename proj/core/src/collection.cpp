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

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "vsm/errors.hpp"
#include "vsm/protocol.hpp"
#include "vsm/questionnaire.hpp"
#include "vsm/util.hpp"

namespace vsm {

using nlohmann::json;

std::string_view fallback_name(Fallback fallback) {
  switch (fallback) {
    case Fallback::None:
      return "none";
    case Fallback::Unrecognizable:
      return "unrecognizable";
    case Fallback::HealthQuestion:
      return "health_question";
  }
  return "none";
}

Fallback parse_fallback(std::string_view name) {
  if (name == "none") return Fallback::None;
  if (name == "unrecognizable") return Fallback::Unrecognizable;
  if (name == "health_question") return Fallback::HealthQuestion;
  throw SchemaError("unknown fallback '" + std::string(name) + "'");
}

int ParsedAnswer::effective_score() const {
  if (fallback != Fallback::None || !option_id) return kNeutralOption;
  return *option_id;
}

// ---------------------------------------------------------------------------
// Response parsing

namespace {

// Index of the brace closing the object opened at `open`, honouring JSON
// string literals and escapes.
std::optional<std::size_t> matching_brace(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::nullopt;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

const json* find_key(const json& object, std::initializer_list<std::string_view> aliases) {
  for (std::string_view alias : aliases) {
    for (auto it = object.begin(); it != object.end(); ++it) {
      if (lower(it.key()) == alias) return &it.value();
    }
  }
  return nullptr;
}

std::optional<int> option_value(const json& value) {
  if (value.is_number_integer()) {
    const auto v = value.get<std::int64_t>();
    if (v >= 1 && v <= kOptionCount) return static_cast<int>(v);
    return std::nullopt;
  }
  if (value.is_string()) {
    std::string s = value.get<std::string>();
    const auto first = s.find_first_not_of(" \t\r\n");
    const auto last = s.find_last_not_of(" \t\r\n");
    if (first == std::string::npos) return std::nullopt;
    s = s.substr(first, last - first + 1);
    if (s.size() != 1 || s[0] < '1' || s[0] > '0' + kOptionCount) return std::nullopt;
    return s[0] - '0';
  }
  return std::nullopt;
}

}  // namespace

ParsedAnswer parse_response(std::string_view raw_text, int question_id) {
  ParsedAnswer out;
  out.question_id = question_id;

  for (std::size_t open = raw_text.find('{'); open != std::string_view::npos;
       open = raw_text.find('{', open + 1)) {
    const auto close = matching_brace(raw_text, open);
    if (!close) continue;
    const json doc = json::parse(raw_text.substr(open, *close - open + 1), nullptr,
                                 /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) continue;

    if (const json* option = find_key(doc, {"option", "option_id", "choice", "answer"})) {
      out.option_id = option_value(*option);
    }
    if (const json* reason = find_key(doc, {"reason", "rationale", "explanation"});
        reason && reason->is_string()) {
      out.rationale = reason->get<std::string>();
    }
    break;
  }

  if (is_health_question(question_id)) {
    out.fallback = Fallback::HealthQuestion;
  } else if (!out.option_id) {
    out.fallback = Fallback::Unrecognizable;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

ResponseVector aggregate_identity(const Identity& identity,
                                  std::span<const ScoreRow> per_seed_scores) {
  if (per_seed_scores.empty()) throw EmptyInput("no per-seed score rows to aggregate");
  ResponseVector out;
  out.identity = identity;
  out.seed_count = static_cast<int>(per_seed_scores.size());
  for (std::size_t q = 0; q < kQuestionCount; ++q) {
    long long sum = 0;
    for (const ScoreRow& row : per_seed_scores) {
      if (row[q] < 1 || row[q] > kOptionCount) {
        throw DomainError("score " + std::to_string(row[q]) + " outside 1..5");
      }
      sum += row[q];
    }
    out.scores[q] = static_cast<double>(sum) / static_cast<double>(per_seed_scores.size());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Records

json record_to_json(const RawRecord& record) {
  json parsed = {
      {"option_id", record.parsed.option_id ? json(*record.parsed.option_id) : json(nullptr)},
      {"rationale", record.parsed.rationale},
      {"fallback", fallback_name(record.parsed.fallback)},
      {"effective_score", record.parsed.effective_score()},
  };
  return {
      {"nation", nation_id(record.identity.nation)},
      {"gender", gender_id(record.identity.gender)},
      {"age", record.identity.age},
      {"question_id", record.question_id},
      {"seed", record.seed},
      {"presentation", record.presentation},
      {"prompt_sha256", record.prompt_sha256},
      {"cache_key", record.cache_key},
      {"raw_text", record.raw_text},
      {"parsed", parsed},
      {"transport_error", record.transport_error},
  };
}

RawRecord record_from_json(const json& doc) {
  try {
    RawRecord r;
    r.identity.nation = parse_nation(doc.at("nation").get<std::string>());
    r.identity.gender = parse_gender(doc.at("gender").get<std::string>());
    r.identity.age = doc.at("age").get<int>();
    r.question_id = doc.at("question_id").get<int>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.presentation = doc.at("presentation").get<std::array<int, kOptionCount>>();
    r.prompt_sha256 = doc.at("prompt_sha256").get<std::string>();
    r.cache_key = doc.at("cache_key").get<std::string>();
    r.raw_text = doc.at("raw_text").get<std::string>();
    r.transport_error = doc.at("transport_error").get<bool>();
    const auto& p = doc.at("parsed");
    r.parsed.question_id = r.question_id;
    if (!p.at("option_id").is_null()) r.parsed.option_id = p["option_id"].get<int>();
    r.parsed.rationale = p.at("rationale").get<std::string>();
    r.parsed.fallback = parse_fallback(p.at("fallback").get<std::string>());
    if (r.question_id < 1 || r.question_id > kQuestionCount) {
      throw SchemaError("question_id out of range");
    }
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad record: ") + e.what());
  }
}

namespace {

std::string dump_line(const json& doc) {
  return doc.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

using TripleKey = std::tuple<std::size_t, int, std::size_t>;  // grid, question, seed slot

struct TripleIndex {
  explicit TripleIndex(const ExperimentConfig& config) : grid(identity_grid()) {
    for (std::size_t i = 0; i < grid.size(); ++i) identity_slot[grid[i]] = i;
    for (std::size_t i = 0; i < config.seeds.size(); ++i) seed_slot[config.seeds[i]] = i;
  }

  TripleKey key(const RawRecord& r) const {
    auto id = identity_slot.find(r.identity);
    auto seed = seed_slot.find(r.seed);
    if (id == identity_slot.end() || seed == seed_slot.end() || r.question_id < 1 ||
        r.question_id > kQuestionCount) {
      throw IntegrityError("record " + identity_label(r.identity) + " q" +
                           std::to_string(r.question_id) + " seed " +
                           std::to_string(r.seed) + " is not part of this experiment");
    }
    return {id->second, r.question_id, seed->second};
  }

  std::vector<Identity> grid;
  std::map<Identity, std::size_t> identity_slot;
  std::map<std::uint64_t, std::size_t> seed_slot;
};

std::string canonical_records_text(std::vector<RawRecord>& records, const TripleIndex& index) {
  std::sort(records.begin(), records.end(), [&](const RawRecord& a, const RawRecord& b) {
    return index.key(a) < index.key(b);
  });
  std::string text;
  for (const auto& r : records) text += dump_line(record_to_json(r));
  return text;
}

void write_vectors_csv(const std::filesystem::path& path, const ExperimentSet& set) {
  std::ostringstream out;
  out << "nation,gender,age";
  for (int q = 1; q <= kQuestionCount; ++q) out << ",q" << q;
  out << ",seed_count\n";
  for (const auto& v : set.vectors) {
    out << nation_id(v.identity.nation) << ',' << gender_id(v.identity.gender) << ','
        << v.identity.age;
    for (double s : v.scores) out << ',' << format_fixed(s, 6);
    out << ',' << v.seed_count << '\n';
  }
  write_file_atomic(path, out.str());
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

// Reads a records file. A final line without a newline is a torn append
// from an interrupted run and is dropped; any other bad line is an error.
std::vector<RawRecord> read_records(const std::filesystem::path& path, bool* torn_tail) {
  std::vector<RawRecord> records;
  if (torn_tail) *torn_tail = false;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return records;
  const std::string text = read_file(path);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) {
      if (torn_tail) {
        *torn_tail = true;
        break;
      }
      throw IntegrityError(path.string() + ": truncated final line");
    }
    const std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    const json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) {
      throw IntegrityError(path.string() + ":" + std::to_string(line_no) + ": not JSON");
    }
    try {
      records.push_back(record_from_json(doc));
    } catch (const SchemaError& e) {
      throw IntegrityError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace

std::vector<RawRecord> load_records(const std::filesystem::path& records_path) {
  std::error_code ec;
  if (!std::filesystem::exists(records_path, ec)) {
    throw MissingFile("no records file at " + records_path.string());
  }
  return read_records(records_path, nullptr);
}

ExperimentSet assemble_experiment_set(const ExperimentConfig& config,
                                      std::vector<RawRecord> records) {
  const TripleIndex index(config);
  const std::size_t seed_count = config.seeds.size();
  const std::size_t expected = seed_count * kQuestionCount * index.grid.size();

  // scores[grid][seed slot][question]
  std::vector<std::vector<ScoreRow>> rows(index.grid.size(),
                                          std::vector<ScoreRow>(seed_count, ScoreRow{}));
  std::vector<char> seen(expected, 0);
  std::size_t recognized = 0;
  std::size_t scored = 0;
  for (const auto& r : records) {
    const auto [g, q, s] = index.key(r);
    const std::size_t flat = (g * kQuestionCount + static_cast<std::size_t>(q - 1)) * seed_count + s;
    if (seen[flat]) {
      throw IntegrityError("duplicate record for " + identity_label(r.identity) + " q" +
                           std::to_string(q) + " seed " + std::to_string(r.seed));
    }
    seen[flat] = 1;
    rows[g][s][static_cast<std::size_t>(q - 1)] = r.parsed.effective_score();
    if (!is_health_question(q)) {
      ++scored;
      if (r.parsed.recognized()) ++recognized;
    }
  }
  if (records.size() != expected) {
    throw IntegrityError("experiment incomplete: " + std::to_string(records.size()) +
                         " of " + std::to_string(expected) + " records present");
  }

  ExperimentSet set;
  set.config = config;
  set.record_count = records.size();
  set.recognizability_rate =
      scored == 0 ? 1.0 : static_cast<double>(recognized) / static_cast<double>(scored);
  set.vectors.reserve(index.grid.size());
  for (std::size_t g = 0; g < index.grid.size(); ++g) {
    set.vectors.push_back(aggregate_identity(index.grid[g], rows[g]));
  }
  set.records_sha256 = sha256_hex(canonical_records_text(records, index));
  return set;
}

ExperimentSet run_experiment(const ExperimentConfig& config, ChatBackend& backend,
                             const RunOptions& options) {
  validate_config(config);
  if (options.out_dir.empty()) throw ConfigError("run needs an output directory");
  const auto data_dir = options.data_dir.empty() ? default_data_dir() : options.data_dir;
  const Questionnaire questionnaire = load_questionnaire(config.prompt_locale, data_dir);
  PromptTemplates templates;
  templates.add(load_prompt_template(config.prompt_locale, data_dir));
  if (config.reply_locale() != config.prompt_locale) {
    templates.add(load_prompt_template(config.reply_locale(), data_dir));
  }
  const std::string template_sha =
      templates.combined_sha256({config.prompt_locale, config.reply_locale()});
  const std::string questionnaire_sha =
      questionnaire.asset_sha256.at(config.prompt_locale);

  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) throw IoError("cannot create " + options.out_dir.string() + ": " + ec.message());
  const auto manifest_path = options.out_dir / kManifestFile;
  const auto records_path = options.out_dir / kRecordsFile;

  json manifest;
  if (std::filesystem::exists(manifest_path, ec)) {
    const json previous = json::parse(read_file(manifest_path), nullptr, false);
    if (previous.is_discarded() || !previous.contains("config")) {
      throw IntegrityError(manifest_path.string() + ": unreadable manifest");
    }
    ExperimentConfig stored;
    try {
      stored = config_from_json(previous["config"]);
    } catch (const SchemaError& e) {
      throw IntegrityError(manifest_path.string() + ": " + e.what());
    }
    if (config_identity(stored) != config_identity(config)) {
      throw IntegrityError("existing manifest in " + options.out_dir.string() +
                           " was written for a different configuration");
    }
    if (previous.value("questionnaire_sha256", "") != questionnaire_sha ||
        previous.value("template_sha256", "") != template_sha) {
      throw IntegrityError("questionnaire or prompt template changed since the records in " +
                           options.out_dir.string() + " were collected");
    }
    manifest = previous;
  } else {
    manifest = {
        {"schema", "vsm-probe/manifest/v1"},
        {"label", set_label(config)},
        {"created_at", utc_now()},
    };
  }
  manifest["config"] = config_to_json(config);
  manifest["questionnaire_sha256"] = questionnaire_sha;
  manifest["template_sha256"] = template_sha;
  manifest["backend"] = backend_name(backend.kind());
  manifest["status"] = "running";
  const TripleIndex index(config);
  const std::size_t total = config.seeds.size() * kQuestionCount * index.grid.size();
  manifest["expected_records"] = total;
  write_file_atomic(manifest_path, manifest.dump(2) + "\n");

  struct Task {
    Identity identity;
    int question_id;
    std::uint64_t seed;
  };
  auto make_request = [&](const Task& t) {
    const Question& q = questionnaire.question(t.question_id);
    const auto presentation = present_options(q, config.shuffle, t.seed);
    ChatRequest request;
    request.model_name = config.model_name;
    request.prompt = build_prompt(templates, q, presentation, t.identity,
                                  config.prompt_locale, config.reply_locale(), t.seed);
    request.seed = t.seed;
    request.sampling = config.sampling;
    return request;
  };

  bool torn = false;
  std::vector<RawRecord> records = read_records(records_path, &torn);
  std::vector<char> done(total, 0);
  for (const auto& r : records) {
    const auto [g, q, s] = index.key(r);
    const std::size_t flat =
        (g * kQuestionCount + static_cast<std::size_t>(q - 1)) * config.seeds.size() + s;
    if (done[flat]) {
      throw IntegrityError("duplicate persisted record for " + identity_label(r.identity) +
                           " q" + std::to_string(q) + " seed " + std::to_string(r.seed));
    }
    done[flat] = 1;
    const auto request = make_request({r.identity, r.question_id, r.seed});
    if (sha256_hex(request.prompt.text) != r.prompt_sha256) {
      throw IntegrityError("persisted record for " + identity_label(r.identity) + " q" +
                           std::to_string(r.question_id) +
                           " does not match the prompt this configuration produces");
    }
  }
  if (torn) {
    std::string text;
    for (const auto& r : records) text += dump_line(record_to_json(r));
    write_file_atomic(records_path, text);
  }

  std::vector<Task> tasks;
  for (std::size_t g = 0; g < index.grid.size(); ++g) {
    for (int q = 1; q <= kQuestionCount; ++q) {
      for (std::size_t s = 0; s < config.seeds.size(); ++s) {
        const std::size_t flat =
            (g * kQuestionCount + static_cast<std::size_t>(q - 1)) * config.seeds.size() + s;
        if (!done[flat]) tasks.push_back({index.grid[g], q, config.seeds[s]});
      }
    }
  }

  if (!tasks.empty()) {
    std::ofstream sink(records_path, std::ios::binary | std::ios::app);
    if (!sink) throw IoError("cannot append to " + records_path.string());
    std::mutex sink_mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> halt{false};
    std::exception_ptr failure;
    std::size_t completed = records.size();

    auto worker = [&] {
      while (!halt.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        const Task& t = tasks[i];
        try {
          const ChatRequest request = make_request(t);
          RawRecord record;
          record.identity = t.identity;
          record.question_id = t.question_id;
          record.seed = t.seed;
          record.presentation = request.prompt.presentation.order;
          record.prompt_sha256 = sha256_hex(request.prompt.text);
          record.cache_key = cache_key(request);
          try {
            record.raw_text = backend.complete(request).raw_text;
            record.parsed = parse_response(record.raw_text, t.question_id);
          } catch (const TransportError&) {
            if (!options.tolerate_transport) throw;
            record.transport_error = true;
            record.parsed = parse_response("", t.question_id);
          }
          std::lock_guard lock(sink_mutex);
          sink << dump_line(record_to_json(record));
          sink.flush();
          if (!sink) throw IoError("write to " + records_path.string() + " failed");
          records.push_back(std::move(record));
          ++completed;
          if (options.progress) options.progress(completed, total);
        } catch (...) {
          std::lock_guard lock(sink_mutex);
          if (!failure) failure = std::current_exception();
          halt = true;
          return;
        }
      }
    };

    int workers = options.max_workers > 0 ? options.max_workers : backend.max_in_flight();
    workers = std::clamp(workers, 1, static_cast<int>(std::min<std::size_t>(tasks.size(), 256)));
    {
      std::vector<std::jthread> pool;
      for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
      worker();
    }
    if (failure) std::rethrow_exception(failure);
  }

  ExperimentSet set = assemble_experiment_set(config, records);
  write_file_atomic(records_path, canonical_records_text(records, index));
  write_vectors_csv(options.out_dir / kVectorsFile, set);

  manifest["status"] = "complete";
  manifest["records"] = set.record_count;
  manifest["records_sha256"] = set.records_sha256;
  manifest["recognizability_rate"] = set.recognizability_rate;
  if (!manifest.contains("completed_at")) manifest["completed_at"] = utc_now();
  write_file_atomic(manifest_path, manifest.dump(2) + "\n");
  set.manifest = manifest;
  return set;
}

ExperimentSet load_experiment_set(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestFile;
  const json manifest = json::parse(read_file(manifest_path), nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("config")) {
    throw SchemaError(manifest_path.string() + ": unreadable manifest");
  }
  if (manifest.value("status", "") != "complete") {
    throw IncompleteSet(dir.string() + " holds an unfinished run; resume it first");
  }
  const ExperimentConfig config = config_from_json(manifest["config"]);
  ExperimentSet set = assemble_experiment_set(config, load_records(dir / kRecordsFile));
  if (manifest.contains("records_sha256") &&
      manifest["records_sha256"].get<std::string>() != set.records_sha256) {
    throw IntegrityError(dir.string() + ": records do not match the manifest digest");
  }
  set.manifest = manifest;
  return set;
}

}  // namespace vsm
