#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mavens/errors.hpp"
#include "mavens/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStageFailure = 1;
constexpr int kExitUsage = 2;

mavens::RunConfig load_config(const std::string& path) {
  if (path.empty()) return mavens::RunConfig{};
  return mavens::RunConfig::load(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mavens: multi-domain opinion-leader agent pipeline"};
  app.require_subcommand(1);

  std::string config_path, corpus_dir, topic, run_id, run_dir, role_id, question;

  auto* ingest = app.add_subcommand("ingest", "Build the knowledge base from a corpus");
  ingest->add_option("--corpus", corpus_dir, "corpus/<domain>/<entity>.txt root")
      ->required();
  ingest->add_option("--config", config_path, "JSON config file");

  auto* predict = app.add_subcommand("predict", "Run the full topic pipeline");
  predict->add_option("--topic", topic, "topic string")->required();
  predict->add_option("--config", config_path, "JSON config file");
  predict->add_option("--run-id", run_id, "run directory name (default: timestamp)");

  auto* eval = app.add_subcommand("eval", "Judge-based evaluation of a run");
  eval->add_option("--run", run_dir, "run directory")->required();
  eval->add_option("--config", config_path, "JSON config file");

  auto* ask = app.add_subcommand("ask", "Run one role on one question");
  ask->add_option("--role", role_id, "role id, e.g. role-economics")->required();
  ask->add_option("--question", question, "question text")->required();
  ask->add_option("--config", config_path, "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    mavens::RunConfig config = load_config(config_path);

    if (*ingest) {
      mavens::IngestSummary summary = mavens::cmd_ingest(corpus_dir, config);
      int total = 0;
      for (const auto& [domain, count] : summary.entities_per_domain) {
        std::cout << domain << ": " << count << " entities\n";
        total += count;
      }
      size_t chunks = 0;
      for (const auto& [_, c] : summary.chunk_counts) chunks += c;
      std::cout << "ingested " << total << " entities, " << chunks
                << " chunks into " << config.kb_path << "\n";
      for (const auto& f : summary.failures) std::cerr << "failed: " << f << "\n";
      return kExitOk;
    }
    if (*predict) {
      mavens::PredictResult result = mavens::cmd_predict(topic, config, run_id);
      std::cout << "run: " << result.run_dir << "\n";
      std::cout << "questions: " << result.questions.curated.size()
                << ", responses: " << result.responses.size()
                << ", opinion sentences: " << result.opinions.size()
                << ", clusters: " << result.clusters.k << "\n\n";
      std::cout << "per-domain sentiment\n";
      for (const auto& [domain, mean] : result.sentiment.per_domain) {
        std::printf("  %-15s %+.4f\n", domain.c_str(), mean);
      }
      std::printf("  %-15s %+.4f\n", "overall", result.sentiment.overall);
      return kExitOk;
    }
    if (*eval) {
      mavens::cmd_eval(run_dir, config);
      std::cout << "evaluation written under " << run_dir << "\n";
      return kExitOk;
    }
    if (*ask) {
      std::cout << mavens::cmd_ask(role_id, question, config) << "\n";
      return kExitOk;
    }
  } catch (const mavens::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStageFailure;
  }
  return kExitUsage;
}
