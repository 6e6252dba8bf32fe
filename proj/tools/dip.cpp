// Command-line entry point: matches, benchmarks, CSA experiments, analysis,
// judge pipeline, DATC conformance and map validation.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration/usage error,
// 3 DATC conformance gate failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "diplomacy/csa.hpp"
#include "diplomacy/datc.hpp"
#include "diplomacy/judges.hpp"
#include "diplomacy/match_runner.hpp"
#include "diplomacy/metrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace diplomacy;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitConformance = 3;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good())
    throw DipError(ErrorCode::ConfigError, "cannot read " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw DipError(ErrorCode::ConfigError, path + " is not valid JSON");
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good())
    throw DipError(ErrorCode::ConfigError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out.good())
    throw DipError(ErrorCode::ConfigError, "cannot write " + path);
  out << content;
}

Power require_power(const std::string& name) {
  auto p = power_from_string(name);
  if (!p) throw DipError(ErrorCode::ConfigError, "unknown power " + name);
  return *p;
}

PressMode parse_press(const std::string& s) {
  if (s == "FULL" || s == "full") return PressMode::FULL;
  if (s == "NONE" || s == "none") return PressMode::NONE;
  throw DipError(ErrorCode::ConfigError, "press must be FULL or NONE");
}

PromptVariant parse_variant(const std::string& s) {
  if (s == "BASELINE" || s == "baseline") return PromptVariant::BASELINE;
  if (s == "V1" || s == "v1") return PromptVariant::V1;
  if (s == "V2" || s == "v2") return PromptVariant::V2;
  if (s == "V3" || s == "v3") return PromptVariant::V3;
  throw DipError(ErrorCode::ConfigError, "variant must be BASELINE/V1/V2/V3");
}

PromptConfig prompt_config_from_json(const json& j) {
  PromptConfig pc;
  if (j.contains("variant")) pc.variant = parse_variant(j["variant"]);
  pc.possible_moves_summary = j.value("possible_moves_summary", false);
  pc.support_explanation_12shot = j.value("support_explanation_12shot", false);
  pc.omit_order_history = j.value("omit_order_history", false);
  pc.order_history_window = j.value("order_history_window", 3);
  if (j.contains("press")) pc.press = parse_press(j["press"]);
  pc.max_year = j.value("max_year", 1925);
  return pc;
}

MatchConfig match_config_from_json(const json& j) {
  MatchConfig c;
  if (j.contains("assignment"))
    for (const auto& [key, binding] : j["assignment"].items())
      c.assignment[require_power(key)] = binding.get<std::string>();
  c.negotiation_rounds = j.value("negotiation_rounds", 3);
  c.max_year = j.value("max_year", 1925);
  if (j.contains("press")) c.press = parse_press(j["press"]);
  c.seed = j.value("seed", 1);
  c.message_limit = j.value("message_limit", 6);
  c.output_path = j.value("output_path", "");
  if (j.contains("prompt_config"))
    c.prompt_config = prompt_config_from_json(j["prompt_config"]);
  return c;
}

ModelEndpoint endpoint_from_json(const json& j) {
  ModelEndpoint ep;
  ep.base_url = j.value("base_url", "");
  ep.path = j.value("path", "/v1/chat/completions");
  ep.model_id = j.value("model_id", "");
  ep.temperature = j.value("temperature", 1.0);
  ep.max_output_tokens = j.value("max_output_tokens", 2048);
  ep.credential_env = j.value("credential_env", "");
  ep.timeout_seconds = j.value("timeout_seconds", 30.0);
  ep.max_retries = j.value("max_retries", 3);
  ep.backoff_base_seconds = j.value("backoff_base_seconds", 2.0);
  ep.max_concurrency = j.value("max_concurrency", 0);
  if (ep.base_url.empty())
    throw DipError(ErrorCode::ConfigError, "endpoint lacks base_url");
  return ep;
}

// Bindings "hold"/"random" resolve to the offline bots; anything else must
// name an entry in the config's "endpoints" section. `parallel` caps each
// endpoint's in-flight requests (0 = unlimited).
ClientFactory factory_from_config(const json& endpoints, int parallel) {
  return [endpoints, parallel](const std::string& binding, Power power,
                               std::uint64_t seed)
             -> std::shared_ptr<ModelClient> {
    if (binding == "hold" || binding == "random")
      return scripted_factory()(binding, power, seed);
    if (!endpoints.contains(binding))
      throw DipError(ErrorCode::ConfigError,
                     "binding '" + binding + "' has no endpoint config");
    ModelEndpoint ep = endpoint_from_json(endpoints[binding]);
    if (parallel > 0) ep.max_concurrency = parallel;
    return std::make_shared<HttpModelClient>(ep);
  };
}

std::string default_corpus_path() {
  return std::string(DIPLOMACY_DATA_DIR) + "/datc_cases.txt";
}

// ---------------------------------------------------------------------------
// analyze

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct LoadedLog {
  std::string path;
  MatchRecord record;
  std::string model;  // the tracked power's binding
};

int cmd_analyze(const std::vector<std::string>& log_paths, Power tracked,
                const std::string& judgments_path, const std::string& out_dir) {
  if (log_paths.empty())
    throw DipError(ErrorCode::ConfigError, "analyze needs at least one log");
  std::vector<LoadedLog> logs;
  std::string schema;
  for (const auto& path : log_paths) {
    LoadedLog log;
    log.path = path;
    log.record = match_record_from_jsonl(read_file(path));
    std::string version = log.record.config.value("schema_version", "1");
    if (schema.empty()) schema = version;
    if (version != schema)
      throw DipError(ErrorCode::ConfigError,
                     "mixed log schema versions: '" + schema + "' vs '" +
                         version + "' in " + path);
    log.model = "unknown";
    if (log.record.config.contains("assignment")) {
      const json& a = log.record.config["assignment"];
      if (a.contains(power_id(tracked)))
        log.model = a[power_id(tracked)].get<std::string>();
    }
    logs.push_back(std::move(log));
  }
  fs::create_directories(out_dir);

  // scores.csv: one row per log plus a mean/CI line.
  std::ostringstream scores;
  scores << "log,power,score\n";
  std::vector<double> values;
  for (const auto& log : logs) {
    double s = record_game_score(log.record, tracked);
    values.push_back(s);
    scores << csv_escape(log.path) << "," << power_id(tracked) << "," << s
           << "\n";
  }
  double mean = 0;
  for (double v : values) mean += v;
  mean /= values.size();
  scores << "mean,,"  << mean << "\n";
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / (values.size() - 1));
    scores << "ci95_half_width,,"
           << 1.959963985 * sd / std::sqrt(static_cast<double>(values.size()))
           << "\n";
  }
  write_file(out_dir + "/scores.csv", scores.str());

  // invalid_rates.csv + per-phase series.
  std::ostringstream rates, series;
  rates << "log,power,invalid_order_rate\n";
  series << "log,phase,unit_count,invalid,submissions\n";
  for (const auto& log : logs) {
    InvalidOrderStats stats = invalid_order_rate(log.record, tracked);
    rates << csv_escape(log.path) << "," << power_id(tracked) << ",";
    if (stats.rate) rates << *stats.rate;
    rates << "\n";
    for (const auto& p : stats.series)
      series << csv_escape(log.path) << "," << p.phase << "," << p.unit_count
             << "," << p.invalid << "," << p.submissions << "\n";
  }
  write_file(out_dir + "/invalid_rates.csv", rates.str());
  write_file(out_dir + "/invalid_series.csv", series.str());

  // order_distribution.csv
  std::ostringstream dist;
  dist << "log,power,action,count,share\n";
  for (const auto& log : logs) {
    OrderStats stats = order_distribution(log.record, tracked);
    auto shares = stats.action_shares();
    for (const auto& [action, count] : stats.action_counts)
      dist << csv_escape(log.path) << "," << power_id(tracked) << "," << action
           << "," << count << "," << shares[action] << "\n";
  }
  write_file(out_dir + "/order_distribution.csv", dist.str());

  // sentiment.csv: logs grouped by the tracked power's model binding.
  std::map<std::string, std::vector<MatchRecord>> by_model;
  for (const auto& log : logs) by_model[log.model].push_back(log.record);
  std::ostringstream sentiment;
  sentiment << "model,relative_incoming_sentiment\n";
  for (const auto& [model, value] : relative_incoming_sentiment(by_model)) {
    sentiment << csv_escape(model) << ",";
    if (value) sentiment << *value;
    sentiment << "\n";
  }
  write_file(out_dir + "/sentiment.csv", sentiment.str());

  // aggression.csv via the bundled lexicon baseline.
  std::ostringstream aggression;
  aggression << "log,phase,mean_aggression\n";
  for (const auto& log : logs)
    for (const auto& [phase, score] :
         aggression_series(log.record, tracked, lexicon_aggression))
      aggression << csv_escape(log.path) << "," << phase << "," << score
                 << "\n";
  write_file(out_dir + "/aggression.csv", aggression.str());

  // Optional betrayal statistics from a judgments JSONL file.
  std::optional<BetrayalStats> betrayal;
  if (!judgments_path.empty()) {
    std::vector<PromiseRecord> promises;
    std::vector<FulfillmentRecord> fulfillments;
    std::istringstream in(read_file(judgments_path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json rec = json::parse(line);
      if (!rec.contains("fulfillment")) continue;
      PromiseRecord p;
      from_json(rec, p);
      FulfillmentRecord f;
      from_json(rec["fulfillment"], f);
      f.promise_index = static_cast<int>(promises.size());
      promises.push_back(std::move(p));
      fulfillments.push_back(std::move(f));
    }
    betrayal = betrayal_rates(fulfillments, promises);
  }

  std::ostringstream summary;
  summary << "Matches analyzed: " << logs.size() << "\n";
  summary << "Tracked power: " << power_id(tracked) << "\n";
  summary << "Mean game score: " << mean << "\n";
  for (const auto& log : logs)
    summary << "  " << log.path << ": score "
            << record_game_score(log.record, tracked) << ", model "
            << log.model << "\n";
  if (betrayal) {
    summary << "Judged promises: " << betrayal->promise_count << "\n";
    if (betrayal->overall_broken)
      summary << "Overall betrayal rate: " << *betrayal->overall_broken << "\n";
    for (const auto& [type, rate] : betrayal->broken_by_type)
      summary << "  " << promise_type_name(type) << ": broken " << rate
              << " (share " << betrayal->type_distribution.at(type) << ")\n";
  }
  write_file(out_dir + "/summary.txt", summary.str());
  std::cerr << "analysis written to " << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// datc

int cmd_datc(const std::string& corpus, const std::string& out_path) {
  DatcSummary summary = run_datc_file(standard_world_map(), corpus);
  std::ostringstream report;
  report << "DATC conformance: " << summary.passed << "/" << summary.total
         << "\n";
  bool gate_ok = true;
  for (const auto& [section, counts] : summary.by_section) {
    report << "  " << section << ": " << counts.first << "/" << counts.second
           << "\n";
    bool convoy_section = section == "6.F" || section == "6.G";
    double rate = counts.second
                      ? static_cast<double>(counts.first) / counts.second
                      : 1.0;
    if (convoy_section ? rate < 0.95 : counts.first != counts.second)
      gate_ok = false;
  }
  for (const auto& c : summary.cases)
    if (!c.passed) {
      report << "FAIL " << c.id << " " << c.title << "\n";
      for (const auto& o : c.orders)
        if (!o.ok)
          report << "    " << o.order_text << ": expected " << o.expected
                 << ", got " << o.actual << "\n";
      for (const auto& note : c.notes) report << "    " << note << "\n";
    }
  std::cerr << report.str();
  if (!out_path.empty()) write_file(out_path, report.str());
  return gate_ok ? 0 : kExitConformance;
}

// ---------------------------------------------------------------------------
// judge

int cmd_judge(const std::string& log_path, Power tracked, const json& config,
              bool reliability, const std::string& game_id,
              const std::string& out_path) {
  if (!config.contains("judge"))
    throw DipError(ErrorCode::ConfigError,
                   "judge command needs a 'judge' endpoint in the config");
  std::string jsonl = read_file(log_path);
  std::string id = game_id.empty() ? fs::path(log_path).stem().string()
                                   : game_id;
  if (reliability) {
    // The paper's validation recipe: re-judge a sample of up to 50 messages
    // at three temperatures and report pairwise agreement.
    std::vector<Message> sample;
    std::istringstream in(jsonl);
    std::string line;
    while (std::getline(in, line) && sample.size() < 50) {
      if (line.empty()) continue;
      json rec = json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.contains("messages")) continue;
      for (const auto& mj : rec["messages"]) {
        if (sample.size() >= 50) break;
        Message m;
        from_json(mj, m);
        if (m.sender == tracked) sample.push_back(std::move(m));
      }
    }
    if (sample.empty())
      throw DipError(ErrorCode::ConfigError,
                     "no messages from " + std::string(power_id(tracked)));
    const double temps[] = {0.1, 0.3, 0.6};
    std::vector<std::vector<PromiseRecord>> passes;
    for (double t : temps) {
      ModelEndpoint ep = endpoint_from_json(config["judge"]);
      ep.temperature = t;
      HttpModelClient judge(ep);
      passes.push_back(detect_promises(judge, sample, id));
    }
    json out = json::array();
    for (std::size_t i = 0; i < passes.size(); ++i)
      for (std::size_t k = i + 1; k < passes.size(); ++k) {
        ReliabilityResult r = judge_agreement(passes[i], passes[k]);
        json pair = {{"temperature_a", temps[i]},
                     {"temperature_b", temps[k]},
                     {"kappa", r.kappa.kappa},
                     {"raw_agreement", r.kappa.raw_agreement}};
        if (r.confidence_r) pair["confidence_r"] = *r.confidence_r;
        out.push_back(pair);
      }
    write_file(out_path, out.dump(2) + "\n");
    std::cerr << "reliability report written to " << out_path << "\n";
    return 0;
  }

  auto factory = [&config]() -> std::shared_ptr<ModelClient> {
    return std::make_shared<HttpModelClient>(
        endpoint_from_json(config["judge"]));
  };
  std::vector<std::string> warnings;
  auto judgments = judge_match(jsonl, tracked, factory, id, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  write_file(out_path, judgments_to_jsonl(judgments));
  std::cerr << judgments.size() << " phases judged, output in " << out_path
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diplomacy simulation and evaluation harness"};
  app.require_subcommand(1);

  std::string config_path, out_path, log_path, snapshot_path, phase_id;
  std::string corpus = default_corpus_path();
  std::string press, variant, method = "REASON", power_name = "FRANCE";
  std::string binding = "random", judgments_path, game_id, map_path;
  std::uint64_t seed = 0;
  bool seed_set = false, reliability = false;
  int max_year = 0, rounds = -1, parallel = 0, depth = 20, n_runs = 0;
  std::vector<std::string> log_paths;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Seed override")
        ->each([&](const std::string&) { seed_set = true; });
  };

  CLI::App* run = app.add_subcommand("run", "Run one match");
  run->add_option("--config", config_path, "Match config JSON")->required();
  run->add_option("--out", out_path, "Output JSONL path");
  add_seed(run);
  run->add_option("--max-year", max_year, "Final year override");
  run->add_option("--rounds", rounds, "Negotiation rounds override");
  run->add_option("--press", press, "FULL or NONE");
  run->add_option("--variant", variant, "Prompt variant override");
  run->add_option("--parallel", parallel, "Per-endpoint concurrency cap");

  CLI::App* bench = app.add_subcommand("benchmark", "Seeded benchmark series");
  bench->add_option("--config", config_path, "Benchmark config JSON")
      ->required();
  bench->add_option("--out", out_path, "Output directory")->required();
  bench->add_option("-n", n_runs, "Number of seeded matches override");
  bench->add_option("--parallel", parallel, "Per-endpoint concurrency cap");

  CLI::App* capture = app.add_subcommand("csa-capture", "Snapshot a phase");
  capture->add_option("--log", log_path, "Recorded match JSONL")->required();
  capture->add_option("--phase", phase_id, "Phase id, e.g. S1902M")->required();
  capture->add_option("--out", out_path, "Snapshot JSON path")->required();
  capture->add_option("--config", config_path, "Prompt config JSON");

  CLI::App* replay = app.add_subcommand("csa-replay", "Replay a snapshot");
  replay->add_option("--snapshot", snapshot_path, "Snapshot JSON")->required();
  replay->add_option("--out", out_path, "Trials JSONL path")->required();
  replay->add_option("--depth", depth, "Independent trials");
  replay->add_option("--rounds", rounds, "Negotiation rounds");
  add_seed(replay);
  replay->add_option("--config", config_path, "Intervention config JSON");
  replay->add_option("--variant", variant, "Prompt variant override");

  CLI::App* persuade =
      app.add_subcommand("csa-persuade", "Persuasion experiment");
  persuade->add_option("--snapshot", snapshot_path, "Snapshot JSON")
      ->required();
  persuade->add_option("--out", out_path, "Stats JSON path")->required();
  persuade->add_option("--method", method, "Persuasion method");
  persuade->add_option("--power", power_name, "Persuader power");
  persuade->add_option("--binding", binding, "Persuader model binding");
  persuade->add_option("--depth", depth, "Trials");
  persuade->add_option("--rounds", rounds, "Negotiation rounds");
  add_seed(persuade);

  CLI::App* analyze = app.add_subcommand("analyze", "Metrics over logs");
  analyze->add_option("logs", log_paths, "Match JSONL files")->required();
  analyze->add_option("--out", out_path, "Output directory")->required();
  analyze->add_option("--power", power_name, "Tracked power");
  analyze->add_option("--judgments", judgments_path, "Judgments JSONL");

  CLI::App* datc = app.add_subcommand("datc", "DATC conformance run");
  datc->add_option("--corpus", corpus, "Corpus path");
  datc->add_option("--out", out_path, "Report path");

  CLI::App* mapv = app.add_subcommand("map-validate", "Validate a map file");
  mapv->add_option("map", map_path, "Map file")->required();

  CLI::App* judge = app.add_subcommand("judge", "Promise-tracking pipeline");
  judge->add_option("--log", log_path, "Recorded match JSONL")->required();
  judge->add_option("--config", config_path, "Judge endpoint config JSON")
      ->required();
  judge->add_option("--out", out_path, "Judgments output path")->required();
  judge->add_option("--power", power_name, "Tracked power");
  judge->add_option("--game-id", game_id, "Game id for persistence keys");
  judge->add_flag("--reliability", reliability,
                  "Three-temperature agreement protocol");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) {
      json cj = load_json_file(config_path);
      MatchConfig config = match_config_from_json(cj);
      if (seed_set) config.seed = seed;
      if (max_year > 0) config.max_year = max_year;
      if (rounds >= 0) config.negotiation_rounds = rounds;
      if (!press.empty()) config.press = parse_press(press);
      if (!variant.empty())
        config.prompt_config.variant = parse_variant(variant);
      if (!out_path.empty()) config.output_path = out_path;
      if (!config.output_path.empty()) {
        fs::path p(config.output_path);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
      }
      ClientFactory factory =
          factory_from_config(cj.value("endpoints", json::object()), parallel);
      MatchRecord record = run_match(config, factory);
      if (config.output_path.empty()) std::cout << record.to_jsonl();
      std::cerr << "final phase: " << record.summary.value("final_phase", "")
                << ", winner: "
                << (record.summary["winner"].is_null()
                        ? std::string("none")
                        : record.summary["winner"].get<std::string>())
                << "\n";
      return 0;
    }
    if (bench->parsed()) {
      json cj = load_json_file(config_path);
      MatchConfig base = match_config_from_json(cj.value("match", json::object()));
      int n = n_runs > 0 ? n_runs : cj.value("n", 20);
      Power evaluated = require_power(cj.value("power", "FRANCE"));
      ClientFactory factory =
          factory_from_config(cj.value("endpoints", json::object()), parallel);
      BenchmarkResult result = run_benchmark(
          cj.value("model_binding", "random"), n, evaluated,
          cj.value("opponent_binding", "hold"), base, factory);
      fs::create_directories(out_path);
      std::ostringstream csv;
      csv << "seed,score\n";
      for (std::size_t i = 0; i < result.scores.size(); ++i) {
        csv << (i + 1) << "," << result.scores[i] << "\n";
        write_file(out_path + "/match_" + std::to_string(i + 1) + ".jsonl",
                   result.records[i].to_jsonl());
      }
      csv << "mean," << result.mean << "\n";
      if (result.ci_half_width)
        csv << "ci95_half_width," << *result.ci_half_width << "\n";
      write_file(out_path + "/scores.csv", csv.str());
      json summary = {{"n", n}, {"mean", result.mean}};
      if (result.ci_half_width)
        summary["ci95_half_width"] = *result.ci_half_width;
      write_file(out_path + "/summary.json", summary.dump(2) + "\n");
      std::cerr << "benchmark mean score " << result.mean << " over " << n
                << " seeds\n";
      return 0;
    }
    if (capture->parsed()) {
      PromptConfig pc;
      if (!config_path.empty())
        pc = prompt_config_from_json(load_json_file(config_path));
      Snapshot snap = capture_snapshot(standard_world_map(),
                                       read_file(log_path), phase_id, pc,
                                       log_path);
      json j;
      to_json(j, snap);
      write_file(out_path, j.dump(2) + "\n");
      std::cerr << "snapshot of " << phase_id << " written to " << out_path
                << "\n";
      return 0;
    }
    if (replay->parsed()) {
      Snapshot snap;
      from_json(load_json_file(snapshot_path), snap);
      if (!variant.empty())
        snap.prompt_config.variant = parse_variant(variant);
      Intervention iv;
      if (!config_path.empty()) {
        json cj = load_json_file(config_path);
        for (const auto& o : cj.value("relationship_overrides", json::array()))
          iv.relationship_overrides.emplace_back(
              require_power(o.at(0)), require_power(o.at(1)),
              *relationship_from_string(o.at(2).get<std::string>()));
        if (cj.contains("prompt_injections"))
          for (const auto& [key, text] : cj["prompt_injections"].items())
            iv.prompt_injections[require_power(key)] = text.get<std::string>();
        if (cj.contains("model_substitutions"))
          for (const auto& [key, b] : cj["model_substitutions"].items())
            iv.model_substitutions[require_power(key)] = b.get<std::string>();
        if (cj.contains("prompt_config"))
          snap.prompt_config = prompt_config_from_json(cj["prompt_config"]);
      }
      auto trials =
          replay_phase(snap, iv, depth, rounds >= 0 ? rounds : 3,
                       seed_set ? seed : 1);
      std::string out;
      for (const auto& t : trials) out += trial_to_json(t).dump() + "\n";
      write_file(out_path, out);
      std::cerr << trials.size() << " trials written to " << out_path << "\n";
      return 0;
    }
    if (persuade->parsed()) {
      Snapshot snap;
      from_json(load_json_file(snapshot_path), snap);
      auto m = persuasion_method_from_string(method);
      if (!m)
        throw DipError(ErrorCode::UnknownMethod,
                       "unknown persuasion method " + method);
      PersuasionStats stats = run_persuasion_experiment(
          snap, *m, require_power(power_name), binding, depth,
          rounds >= 0 ? rounds : 3, seed_set ? seed : 1);
      json j = {{"method", persuasion_method_name(stats.method)},
                {"depth", stats.depth},
                {"success_rate", stats.success_rate},
                {"mean_magnitude", stats.mean_magnitude},
                {"trial_success_rate", stats.trial_success_rate}};
      json trials = json::array();
      for (const auto& t : stats.trials) trials.push_back(trial_to_json(t));
      j["trials"] = trials;
      write_file(out_path, j.dump(2) + "\n");
      std::cerr << persuasion_method_name(stats.method) << ": success rate "
                << stats.success_rate << ", mean magnitude "
                << stats.mean_magnitude << "\n";
      return 0;
    }
    if (analyze->parsed())
      return cmd_analyze(log_paths, require_power(power_name), judgments_path,
                         out_path);
    if (datc->parsed()) return cmd_datc(corpus, out_path);
    if (mapv->parsed()) {
      MapGraph::load_file(map_path);
      std::cerr << map_path << ": ok\n";
      return 0;
    }
    if (judge->parsed())
      return cmd_judge(log_path, require_power(power_name),
                       load_json_file(config_path), reliability, game_id,
                       out_path);
    throw DipError(ErrorCode::ConfigError, "no command");
  } catch (const DipError& e) {
    std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what()
              << "\n";
    return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
