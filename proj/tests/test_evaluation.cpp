#include <doctest.h>

#include "mavens/errors.hpp"
#include "mavens/evaluation.hpp"
#include "mavens/testkit.hpp"

using namespace mavens;

namespace {

LlmGateway mock_gateway(std::map<std::string, std::string> fixtures) {
  BackendSpec spec;
  spec.kind = BackendKind::Mock;
  LlmGateway gw(spec);
  gw.set_fixtures(std::move(fixtures));
  return gw;
}

}  // namespace

TEST_CASE("parse_score picks the first in-range integer") {
  CHECK(parse_score("I would give this a similarity score of 9.", JudgeDim::SIM) == 9);
  CHECK(parse_score("Score: 10", JudgeDim::RBT) == 10);
  CHECK(parse_score("0", JudgeDim::RAW) == 0);
  // 0 is out of range on a 1..10 dimension, so the 7 wins
  CHECK(parse_score("0 then 7", JudgeDim::RQQ) == 7);
  // decimals are skipped, the next integer wins
  CHECK(parse_score("roughly 8.5, call it 8", JudgeDim::CUS) == 8);
  // out-of-range magnitudes are skipped
  CHECK(parse_score("out of 100, I'd say 6", JudgeDim::SPE) == 6);
  CHECK(parse_score("excellent work", JudgeDim::SIM) == std::nullopt);
  CHECK(parse_score("", JudgeDim::SIM) == std::nullopt);
  CHECK(parse_score("11 or 12", JudgeDim::RBT) == std::nullopt);
}

TEST_CASE("judge scales and names") {
  CHECK(judge_scale(JudgeDim::RBT) == std::pair<int, int>{1, 10});
  CHECK(judge_scale(JudgeDim::RAW) == std::pair<int, int>{0, 10});
  CHECK(judge_dim_name(JudgeDim::RQQ) == "RQQ");
  CHECK(judge_dim_name(JudgeDim::SIM) == "SIM");
  for (JudgeDim dim : {JudgeDim::RBT, JudgeDim::RQQ, JudgeDim::RBQ, JudgeDim::RAW,
                       JudgeDim::CUS, JudgeDim::SPE, JudgeDim::SIM}) {
    PromptTemplate t = judge_prompt(dim);
    CHECK(t.user.rfind("Rate:", 0) == 0);  // shared mock-dispatch prefix
  }
}

TEST_CASE("judge retries once with a constrained instruction, then fails") {
  // the longer key only matches the retry prompt (which appends to the user)
  LlmGateway gw = mock_gateway(
      {{"Rate: question format.\nQuestion: What next?", "excellent"},
       {"Rate: question format.\nQuestion: What next?\nReply with a single integer.",
        "4"}});
  JudgeScore s = judge(JudgeDim::RQQ, {{"question", "What next?"}}, "q1", gw);
  CHECK(s.score == 4);
  CHECK(gw.stats().backend_calls == 2);

  // both attempts unparseable -> stage failure
  LlmGateway bad = mock_gateway({{"Rate:", "no numbers anywhere"}});
  CHECK_THROWS_AS(judge(JudgeDim::RQQ, {{"question", "What next?"}}, "q1", bad),
                  StageFailure);
}

TEST_CASE("aggregate_scores hand values against the reference oracle") {
  std::vector<ScoreRecord> records = {{"All", JudgeDim::RQQ, {8, 9, 10}}};
  ScoreTable t = aggregate_scores(records);
  const CellStats& cell = t.rows.at("All").at("RQQ");
  CHECK(cell.mean == doctest::Approx(9.0).epsilon(1e-12));
  REQUIRE(cell.variance.has_value());
  CHECK(*cell.variance == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(*cell.variance ==
        doctest::Approx(testkit::reference_population_variance({8, 9, 10}))
            .epsilon(1e-12));
  CHECK(cell.n == 1);

  // single-rater items report no variance at all
  ScoreTable single = aggregate_scores({{"All", JudgeDim::RBT, {7}},
                                        {"All", JudgeDim::RBT, {9}}});
  const CellStats& sc = single.rows.at("All").at("RBT");
  CHECK(sc.mean == doctest::Approx(8.0));
  CHECK(sc.n == 2);
  CHECK(!sc.variance.has_value());

  // mixed single/multi-rater cells withhold the variance too
  ScoreTable mixed = aggregate_scores({{"g", JudgeDim::SIM, {4, 6}},
                                       {"g", JudgeDim::SIM, {5}}});
  CHECK(!mixed.rows.at("g").at("SIM").variance.has_value());
  CHECK_THROWS_AS(aggregate_scores({}), InvalidInput);
}

TEST_CASE("evaluate_aqg groups by category and appends a weighted average") {
  LlmGateway gw = mock_gateway({{"Rate:", "a score of 7."}});
  QuestionSet a;
  a.topic = "flu season";
  a.background = "bg a";
  a.curated = {{"What changed?", QuestionFormat::What, "flu season"},
               {"Why now?", QuestionFormat::Why, "flu season"}};
  QuestionSet b;
  b.topic = "rate hike";
  b.background = "bg b";
  b.curated = {{"Who decides?", QuestionFormat::Who, "rate hike"}};

  ScoreTable t = evaluate_aqg({a, b}, {{"flu season", "Health"},
                                       {"rate hike", "Economics"}}, gw);
  CHECK(t.dim_order == std::vector<std::string>{"RBT", "RQQ", "RBQ"});
  CHECK(t.group_order.back() == "Avg.");
  CHECK(t.rows.at("Health").at("RBT").mean == doctest::Approx(7.0));
  CHECK(t.rows.at("Health").at("RQQ").n == 2);
  CHECK(t.rows.at("Economics").at("RQQ").n == 1);
  CHECK(t.rows.at("Avg.").at("RQQ").n == 3);
  CHECK(t.rows.at("Avg.").at("RBT").mean == doctest::Approx(7.0));

  // an uncategorized topic lands in the default group
  ScoreTable d = evaluate_aqg({a}, {}, gw);
  CHECK(d.rows.count("All") == 1);
}

TEST_CASE("evaluate_agents rolls agent means into domain rows") {
  LlmGateway gw = mock_gateway({{"Rate:", "a score of 7."}});
  std::vector<ProbeResponse> probes = {
      {"econ-01", "economics", "What about trade?", "trade view"},
      {"econ-01", "economics", "Why tariffs?", "tariff view"},
      {"mil-02", "military", "What about drones?", "drone view"},
  };
  ScoreTable t = evaluate_agents(probes, gw);
  CHECK(t.dim_order ==
        std::vector<std::string>{"RAW", "CUS", "SPE", "Avg."});
  CHECK(t.group_order ==
        std::vector<std::string>{"economics", "military", "Avg."});
  for (const std::string& g : {std::string("economics"), std::string("military"),
                               std::string("Avg.")}) {
    for (const std::string& dim : t.dim_order) {
      CHECK(t.rows.at(g).at(dim).mean == doctest::Approx(7.0));
    }
  }
  CHECK(t.rows.at("economics").at("RAW").n == 1);  // one agent in the domain
}

TEST_CASE("a consistently unparseable judge excludes the row, not the table") {
  // RBT replies are garbage; RQQ/RBQ replies parse fine
  LlmGateway gw = mock_gateway({{"Rate:", "a score of 6."},
                                {"Rate: topic and background.", "n/a"}});
  QuestionSet a;
  a.topic = "storm response";
  a.background = "bg";
  a.curated = {{"What failed?", QuestionFormat::What, "storm response"}};
  ScoreTable t = evaluate_aqg({a}, {}, gw);
  CHECK(t.rows.at("All").count("RBT") == 0);
  CHECK(t.rows.at("All").at("RQQ").n == 1);
  CHECK(t.rows.at("All").at("RBQ").mean == doctest::Approx(6.0));
}

TEST_CASE("sample_agents is a seeded stratified pick") {
  std::map<std::string, std::vector<std::string>> by_domain = {
      {"economics", {"e1", "e2", "e3", "e4"}},
      {"military", {"m1", "m2", "m3"}},
  };
  auto a = sample_agents(by_domain, 2, 5);
  auto b = sample_agents(by_domain, 2, 5);
  CHECK(a == b);
  CHECK(a.size() == 4);
  auto c = sample_agents(by_domain, 2, 6);
  CHECK(c.size() == 4);
  // over-asking returns everything in the domain
  CHECK(sample_agents(by_domain, 10, 1).size() == 7);
}

TEST_CASE("CSV formatting is stable at three decimals") {
  ScoreTable t = aggregate_scores({{"All", JudgeDim::RQQ, {8, 9, 10}},
                                   {"All", JudgeDim::RBT, {7}}});
  t.dim_order = {"RBT", "RQQ"};
  std::string csv = format_table_csv(t);
  CHECK(csv ==
        "group,RBT,RQQ\n"
        "All,7.000,9.000 (0.667)\n");
}
