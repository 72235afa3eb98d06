#include "mavens/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mavens/digest.hpp"
#include "mavens/errors.hpp"
#include "mavens/evaluation.hpp"
#include "mavens/testkit.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace mavens {
namespace {

void atomic_write(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out << content;
  }
  fs::rename(tmp, path);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

BackendSpec backend_from_json(const json& j) {
  BackendSpec spec;
  std::string kind = j.value("kind", "mock");
  if (kind == "mock") {
    spec.kind = BackendKind::Mock;
  } else if (kind == "remote") {
    spec.kind = BackendKind::Remote;
  } else {
    throw InvalidInput("config: unknown backend kind " + kind);
  }
  if (j.contains("endpoint") && !j["endpoint"].is_null()) {
    spec.endpoint = j["endpoint"].get<std::string>();
  }
  spec.model_name = j.value("model_name", spec.model_name);
  if (j.contains("cache_dir") && !j["cache_dir"].is_null()) {
    spec.cache_dir = j["cache_dir"].get<std::string>();
  }
  spec.parallelism = j.value("parallelism", spec.parallelism);
  spec.max_attempts = j.value("max_attempts", spec.max_attempts);
  spec.backoff_initial_ms = j.value("backoff_initial_ms", spec.backoff_initial_ms);
  if (j.contains("fixture_path") && !j["fixture_path"].is_null()) {
    spec.fixture_path = j["fixture_path"].get<std::string>();
  }
  return spec;
}

json backend_to_json(const BackendSpec& spec) {
  return {{"kind", spec.kind == BackendKind::Mock ? "mock" : "remote"},
          {"endpoint", spec.endpoint ? json(*spec.endpoint) : json()},
          {"model_name", spec.model_name},
          {"cache_dir", spec.cache_dir ? json(*spec.cache_dir) : json()},
          {"parallelism", spec.parallelism},
          {"max_attempts", spec.max_attempts},
          {"backoff_initial_ms", spec.backoff_initial_ms},
          {"fixture_path", spec.fixture_path ? json(*spec.fixture_path) : json()}};
}

std::string format_key(QuestionFormat fmt) { return format_name(fmt); }

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  RunConfig cfg;
  json j = json::parse(text);
  static const std::set<std::string> known = {
      "backend",      "judge_backend", "embedder",     "aqg",
      "roster",       "kb_path",       "language",     "chunk_size",
      "seed",         "deny_list",     "sentiment",    "lexicon_path",
      "negator_path", "output_dir",    "eval_sample_seed"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw InvalidInput("config: unknown key " + key);
  }
  if (j.contains("backend")) cfg.backend = backend_from_json(j["backend"]);
  cfg.judge_backend =
      j.contains("judge_backend") ? backend_from_json(j["judge_backend"]) : cfg.backend;
  if (j.contains("embedder")) {
    const json& e = j["embedder"];
    std::string kind = e.value("kind", "deterministic-local");
    if (kind == "deterministic-local") {
      cfg.embedder.kind = EmbedderKind::DeterministicLocal;
    } else if (kind == "remote-service") {
      cfg.embedder.kind = EmbedderKind::RemoteService;
    } else {
      throw InvalidInput("config: unknown embedder kind " + kind);
    }
    cfg.embedder.dims = e.value("dims", cfg.embedder.dims);
    if (e.contains("endpoint") && !e["endpoint"].is_null()) {
      cfg.embedder.endpoint = e["endpoint"].get<std::string>();
    }
    cfg.embedder.model_name = e.value("model_name", cfg.embedder.model_name);
  }
  if (j.contains("aqg")) {
    cfg.aqg.k = j["aqg"].value("k", cfg.aqg.k);
    cfg.aqg.theta_cap = j["aqg"].value("theta_cap", cfg.aqg.theta_cap);
  }
  if (j.contains("roster")) {
    if (j["roster"].contains("domains")) {
      cfg.roster.domains = j["roster"]["domains"].get<std::vector<std::string>>();
    }
    cfg.roster.entities_per_domain =
        j["roster"].value("entities_per_domain", cfg.roster.entities_per_domain);
  }
  cfg.kb_path = j.value("kb_path", cfg.kb_path);
  cfg.language = j.value("language", cfg.language);
  cfg.chunk_size = j.value("chunk_size", cfg.chunk_size);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("deny_list")) {
    cfg.deny_list = j["deny_list"].get<std::vector<std::string>>();
  }
  if (j.contains("sentiment")) {
    const json& s = j["sentiment"];
    cfg.sentiment.min_count = s.value("min_count", cfg.sentiment.min_count);
    cfg.sentiment.pmi_threshold = s.value("pmi_threshold", cfg.sentiment.pmi_threshold);
    cfg.sentiment.window = s.value("window", cfg.sentiment.window);
    cfg.sentiment.neutral_band = s.value("neutral_band", cfg.sentiment.neutral_band);
  }
  cfg.lexicon_path = j.value("lexicon_path", cfg.lexicon_path);
  cfg.negator_path = j.value("negator_path", cfg.negator_path);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.eval_sample_seed = j.value("eval_sample_seed", cfg.eval_sample_seed);
  cfg.analysis.seed = cfg.seed;

  if (const char* url = std::getenv("MAVENS_BACKEND_URL"); url && *url) {
    cfg.backend.endpoint = url;
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string RunConfig::digest() const {
  json j = {
      {"backend", backend_to_json(backend)},
      {"judge_backend", backend_to_json(judge_backend)},
      {"embedder",
       {{"kind", embedder.kind == EmbedderKind::DeterministicLocal
                     ? "deterministic-local"
                     : "remote-service"},
        {"dims", embedder.dims},
        {"endpoint", embedder.endpoint ? json(*embedder.endpoint) : json()},
        {"model_name", embedder.model_name}}},
      {"aqg", {{"k", aqg.k}, {"theta_cap", aqg.theta_cap}}},
      {"roster",
       {{"domains", roster.domains},
        {"entities_per_domain", roster.entities_per_domain}}},
      {"kb_path", kb_path},
      {"language", language},
      {"chunk_size", chunk_size},
      {"seed", seed},
      {"deny_list", deny_list},
      {"sentiment",
       {{"min_count", sentiment.min_count},
        {"pmi_threshold", sentiment.pmi_threshold},
        {"window", sentiment.window},
        {"neutral_band", sentiment.neutral_band}}},
      {"lexicon_path", lexicon_path},
      {"negator_path", negator_path},
      {"output_dir", output_dir},
      {"eval_sample_seed", eval_sample_seed},
  };
  return sha256_hex(j.dump());
}

LlmGateway make_gateway(const BackendSpec& spec) {
  LlmGateway gateway(spec);
  if (spec.kind == BackendKind::Mock && !spec.fixture_path) {
    gateway.set_fixtures(testkit::default_mock_fixtures());
  }
  return gateway;
}

IngestSummary cmd_ingest(const std::string& corpus_dir, const RunConfig& config) {
  if (!fs::is_directory(corpus_dir)) {
    throw InvalidInput("corpus directory not found: " + corpus_dir);
  }
  IngestSummary summary;
  bool any = false;
  for (const std::string& domain : config.roster.domains) {
    fs::path domain_dir = fs::path(corpus_dir) / domain;
    if (!fs::is_directory(domain_dir)) {
      throw InvalidInput("missing corpus domain directory: " + domain_dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(domain_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) {
      any = true;
      std::string entity_id = file.stem().string();
      try {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        EntityAgent entity =
            build_entity(entity_id, domain, config.language, buf.str(),
                         config.chunk_size, config.embedder, config.deny_list);
        save_entity(entity, config.kb_path);
        ++summary.entities_per_domain[domain];
        summary.chunk_counts[entity_id] = entity.chunks.size();
      } catch (const std::exception& e) {
        summary.failures.push_back(entity_id + ": " + e.what());
      }
    }
  }
  if (!any) throw InvalidInput("corpus directory has no entity files: " + corpus_dir);
  return summary;
}

PredictResult cmd_predict(const std::string& topic, const RunConfig& config,
                          const std::string& run_id) {
  PredictResult result;
  std::string id = run_id;
  if (id.empty()) {
    auto now = std::chrono::system_clock::now().time_since_epoch();
    id = "run-" + std::to_string(
                      std::chrono::duration_cast<std::chrono::milliseconds>(now).count());
  }
  fs::path run_dir = fs::path(config.output_dir) / id;
  fs::create_directories(run_dir);
  result.run_dir = run_dir.string();

  LlmGateway backend = make_gateway(config.backend);
  json stage_times = json::object();
  std::vector<std::string> failures;

  // questions
  auto t0 = std::chrono::steady_clock::now();
  result.questions = run_aqg(topic, backend, AqgTemplates::defaults(), config.aqg,
                             config.embedder);
  stage_times["aqg"] = seconds_since(t0);
  {
    json pools = json::object();
    for (const auto& [fmt, pool] : result.questions.pools) {
      json texts = json::array();
      for (const Question& q : pool) texts.push_back(q.text);
      pools[format_key(fmt)] = texts;
    }
    json curated = json::array();
    for (const Question& q : result.questions.curated) {
      curated.push_back({{"text", q.text}, {"format", format_key(q.format)}});
    }
    json doc = {{"topic", result.questions.topic},
                {"background", result.questions.background},
                {"curated", curated},
                {"pools", pools}};
    atomic_write(run_dir / "questions.json", doc.dump(2) + "\n");
  }

  // responses
  t0 = std::chrono::steady_clock::now();
  std::vector<GeneralizedRole> roles = load_roster(config.kb_path, config.roster);
  MoaConfig moa_cfg;
  moa_cfg.retrieval_k = config.aqg.k;
  moa_cfg.question_language = "en";
  MoaTemplates moa_templates = MoaTemplates::defaults();
  for (const GeneralizedRole& role : roles) {
    for (const Question& q : result.questions.curated) {
      try {
        RoleResponse resp =
            run_role(role, q, moa_cfg, backend, moa_templates, config.embedder);
        for (const std::string& failed : resp.failed_entities) {
          failures.push_back("entity failed: " + failed + " on \"" + q.text + "\"");
        }
        result.responses.push_back(std::move(resp));
      } catch (const std::exception& e) {
        failures.push_back("role " + role.role_id + " failed on \"" + q.text +
                           "\": " + e.what());
      }
    }
  }
  stage_times["moa"] = seconds_since(t0);
  if (result.responses.empty()) {
    throw StageFailure("moa", "no role produced a response");
  }
  {
    json doc = json::array();
    for (const RoleResponse& r : result.responses) {
      doc.push_back({{"role_id", r.role_id},
                     {"domain", r.domain},
                     {"question",
                      {{"text", r.question.text},
                       {"format", format_key(r.question.format)}}},
                     {"packaged_text", r.packaged_text}});
    }
    atomic_write(run_dir / "responses.json", doc.dump(2) + "\n");
  }

  // opinions + clusters
  t0 = std::chrono::steady_clock::now();
  result.opinions = segment_and_filter(result.responses, config.analysis);
  for (OpinionSentence& s : result.opinions) {
    s.text = extract_opinion(s.text, config.analysis);
  }
  {
    json doc = json::array();
    for (const OpinionSentence& s : result.opinions) {
      doc.push_back({{"text", s.text},
                     {"source_role_id", s.source_role_id},
                     {"source_domain", s.source_domain}});
    }
    atomic_write(run_dir / "opinions.json", doc.dump(2) + "\n");
  }
  if (result.opinions.size() >= 2) {
    std::vector<std::string> texts;
    for (const OpinionSentence& s : result.opinions) texts.push_back(s.text);
    TfIdfMatrix matrix = tfidf(texts, config.analysis);
    result.clusters = cluster_opinions(matrix, config.analysis);
    auto coords = mds_project(matrix.rows);

    json clusters = json::array();
    for (size_t c = 0; c < result.clusters.k; ++c) {
      json members = json::array();
      for (size_t i = 0; i < result.clusters.assignments.size(); ++i) {
        if (result.clusters.assignments[i] == c) members.push_back(i);
      }
      json terms = json::array();
      for (const auto& [term, weight] : result.clusters.top_terms[c]) {
        terms.push_back({term, weight});
      }
      clusters.push_back({{"id", c},
                          {"size", members.size()},
                          {"top_terms", terms},
                          {"member_indices", members}});
    }
    json curve = json::object();
    for (const auto& [k, w] : result.clusters.inertia_curve) {
      curve[std::to_string(k)] = w;
    }
    json coord_list = json::array();
    for (const auto& c : coords) coord_list.push_back({c[0], c[1]});
    json doc = {{"k", result.clusters.k},
                {"inertia_curve", curve},
                {"clusters", clusters},
                {"coords", coord_list}};
    atomic_write(run_dir / "clusters.json", doc.dump(2) + "\n");
  } else {
    failures.push_back("clustering skipped: fewer than 2 opinion sentences");
  }
  stage_times["analysis"] = seconds_since(t0);

  // sentiment
  t0 = std::chrono::steady_clock::now();
  {
    SentimentLexicon seed =
        SentimentLexicon::load(config.lexicon_path, config.negator_path);
    std::vector<std::string> corpus;
    for (const RoleResponse& r : result.responses) corpus.push_back(r.packaged_text);
    SentimentLexicon lexicon = build_lexicon(corpus, seed, config.sentiment);
    std::vector<ScoredText> scored;
    for (const RoleResponse& r : result.responses) {
      scored.push_back(
          {r.role_id, r.domain, score_text(r.packaged_text, lexicon, config.sentiment)});
    }
    result.sentiment = aggregate(scored, config.roster.domains);

    json per_text = json::array();
    for (const ScoredText& s : result.sentiment.per_text) {
      per_text.push_back(
          {{"role_id", s.role_id}, {"domain", s.domain}, {"score", s.score}});
    }
    json doc = {{"per_domain", result.sentiment.per_domain},
                {"overall", result.sentiment.overall},
                {"per_text", per_text}};
    atomic_write(run_dir / "sentiment.json", doc.dump(2) + "\n");
  }
  stage_times["sentiment"] = seconds_since(t0);

  // manifest
  for (const char* name : {"questions.json", "responses.json", "opinions.json",
                           "clusters.json", "sentiment.json"}) {
    fs::path p = run_dir / name;
    if (fs::exists(p)) {
      result.artifact_digests[name] = sha256_file_hex(p.string());
    }
  }
  json manifest = {
      {"config_digest", config.digest()},
      {"topic", topic},
      {"stage_times", stage_times},
      {"counts",
       {{"questions", result.questions.curated.size()},
        {"responses", result.responses.size()},
        {"opinion_sentences", result.opinions.size()},
        {"clusters", result.clusters.k},
        {"k", result.clusters.k}}},
      {"failures", failures},
      {"artifact_digests", result.artifact_digests}};
  atomic_write(run_dir / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

void cmd_eval(const std::string& run_dir, const RunConfig& config) {
  fs::path dir(run_dir);
  std::ifstream qin(dir / "questions.json");
  std::ifstream rin(dir / "responses.json");
  if (!qin || !rin) {
    throw InvalidInput("run artifacts missing under " + run_dir);
  }
  json qdoc = json::parse(qin);
  json rdoc = json::parse(rin);

  QuestionSet set;
  set.topic = qdoc.at("topic").get<std::string>();
  set.background = qdoc.at("background").get<std::string>();
  for (const auto& q : qdoc.at("curated")) {
    Question question;
    question.text = q.at("text").get<std::string>();
    question.format = classify_format(question.text);
    set.curated.push_back(question);
  }

  std::vector<ProbeResponse> probes;
  for (const auto& r : rdoc) {
    probes.push_back({r.at("role_id").get<std::string>(),
                      r.at("domain").get<std::string>(),
                      r.at("question").at("text").get<std::string>(),
                      r.at("packaged_text").get<std::string>()});
  }

  LlmGateway judge_backend = make_gateway(config.judge_backend);
  ScoreTable aqg_table = evaluate_aqg({set}, {}, judge_backend);
  ScoreTable agent_table = evaluate_agents(probes, judge_backend);

  auto table_to_json = [](const ScoreTable& table) {
    json rows = json::object();
    for (const auto& [group, dims] : table.rows) {
      json row = json::object();
      for (const auto& [dim, stats] : dims) {
        json cell = {{"mean", stats.mean}, {"n", stats.n}};
        if (stats.variance) cell["variance"] = *stats.variance;
        row[dim] = cell;
      }
      rows[group] = row;
    }
    return rows;
  };
  json doc = {{"aqg", table_to_json(aqg_table)},
              {"agents", table_to_json(agent_table)}};
  atomic_write(dir / "evaluation.json", doc.dump(2) + "\n");
  atomic_write(dir / "evaluation_aqg.csv", format_table_csv(aqg_table));
  atomic_write(dir / "evaluation_agents.csv", format_table_csv(agent_table));
}

std::string cmd_ask(const std::string& role_id, const std::string& question,
                    const RunConfig& config) {
  std::vector<GeneralizedRole> roles = load_roster(config.kb_path, config.roster);
  const GeneralizedRole* role = nullptr;
  for (const GeneralizedRole& r : roles) {
    if (r.role_id == role_id) role = &r;
  }
  if (!role) throw InvalidInput("unknown role id: " + role_id);

  Question q;
  q.text = question;
  q.format = classify_format(question);

  LlmGateway backend = make_gateway(config.backend);
  MoaConfig moa_cfg;
  moa_cfg.retrieval_k = config.aqg.k;
  RoleResponse resp = run_role(*role, q, moa_cfg, backend,
                               MoaTemplates::defaults(), config.embedder);
  return resp.packaged_text;
}

}  // namespace mavens
