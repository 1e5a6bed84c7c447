#include <doctest.h>

#include <fstream>

#include "../common/fixtures.hpp"
#include "pacexp/engine.hpp"

using namespace pacexp;
using nlohmann::json;

namespace {

Formula named(const std::string& text) { return parseFormula(text, 16, FeatureNames(fixtures::zooFeatures())); }

bool sameOnFinsBreathes(const Formula& a, const Formula& b) {
    std::vector<std::size_t> sub{fixtures::kFins, fixtures::kBreathes};
    return equivalentOnGrid(a, b, booleanGrid(16, sub, 0.0));
}

}  // namespace

TEST_CASE("fish explanations under each query") {
    struct Row {
        const char* query;
        const char* expected;
        std::size_t size;
    };
    const Row rows[] = {{"true", "(and fins (not breathes))", 2},
                        {"(not fins)", "false", 1},
                        {"(not breathes)", "fins", 1},
                        {"breathes", "false", 1},
                        {"milk", "(and fins (not breathes))", 2}};
    for (const auto& row : rows) {
        CAPTURE(row.query);
        for (std::uint64_t seed : {1u, 7u, 42u}) {
            RunResult r = explain(fixtures::zooConfig(row.query, seed));
            REQUIRE(r.outcome == Outcome::Explanation);
            CHECK(r.certified);
            REQUIRE(r.formula);
            CHECK(sameOnFinsBreathes(*r.formula, named(row.expected)));
            CHECK(r.stats.explanationSize == row.size);
            CHECK(r.stats.estimatedAccuracy.value_or(0) == doctest::Approx(1.0));
            CHECK(r.rounds.size() == r.stats.iterations);
            CHECK(r.conjectures.size() == r.rounds.size());
        }
    }
}

TEST_CASE("run invariants") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RunResult r = explain(fixtures::zooConfig("true", seed));
        std::size_t inputs = 0;
        for (std::size_t i = 0; i < r.rounds.size(); ++i) {
            const auto& round = r.rounds[i];
            CHECK(round.iteration == i + 1);
            CHECK(round.suiteSize == testSuiteSize(0.05, 0.05, i + 1));
            inputs += round.tested;
            // Each conjecture is refuted only by counterexamples it mislabels.
            for (const auto& c : round.counterexamples) CHECK(evaluate(round.conjecture, c.x) != c.label);
            bool last = i + 1 == r.rounds.size();
            CHECK(round.counterexamples.empty() == last);
            // Later conjectures respect every earlier counterexample.
            for (std::size_t k = i + 1; k < r.rounds.size(); ++k)
                for (const auto& c : round.counterexamples) CHECK(evaluate(r.rounds[k].conjecture, c.x) == c.label);
        }
        CHECK(inputs == r.stats.totalTestInputs);
        for (std::size_t i = 1; i < r.conjectures.size(); ++i)
            CHECK(compare(r.conjectures[i - 1], r.conjectures[i]) < 0);
    }
}

TEST_CASE("unrealizable grammar ends in no explanation") {
    RunConfig cfg = fixtures::zooConfig("true", 3);
    std::vector<std::size_t> feats{fixtures::kFins, fixtures::kBreathes};
    cfg.grammar = Grammar::booleans(feats, 1, 1);
    RunResult r = explain(cfg);
    CHECK(r.outcome == Outcome::NoExplanation);
    CHECK_FALSE(r.formula);
    CHECK_FALSE(r.certified);
    // true, false and four literals: at most one round per candidate.
    CHECK(r.stats.iterations <= 6);
    CHECK(r.stats.lastConjectureSize >= 1);
    json rep = makeReport(cfg, r);
    CHECK(rep["outcome"] == "no-explanation");
    CHECK(rep["explanation"].is_null());
    CHECK(rep["lastConjecture"].is_string());
}

TEST_CASE("iteration budget keeps the last conjecture") {
    RunConfig cfg = fixtures::zooConfig("true", 5);
    cfg.maxIterations = 1;
    RunResult r = explain(cfg);
    REQUIRE(r.outcome == Outcome::BudgetIterations);
    CHECK_FALSE(r.certified);
    REQUIRE(r.formula);
    CHECK(r.stats.iterations == 1);
    CHECK(*r.formula == r.conjectures.back());
}

TEST_CASE("timeout budget") {
    RunConfig cfg = fixtures::zooConfig("true", 5);
    cfg.timeoutSeconds = 1e-9;
    RunResult r = explain(cfg);
    CHECK(r.outcome == Outcome::BudgetTimeout);
    CHECK_FALSE(r.certified);
}

TEST_CASE("config validation") {
    RunConfig cfg = fixtures::zooConfig("true", 0);
    auto bad = [&](auto mutate) {
        RunConfig c = cfg;
        mutate(c);
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    };
    bad([](RunConfig& c) { c.epsilon = 0; });
    bad([](RunConfig& c) { c.delta = 1.5; });
    bad([](RunConfig& c) { c.timeoutSeconds = -1; });
    bad([](RunConfig& c) { c.counterexampleBatch = 0; });
    bad([](RunConfig& c) { c.targetClass = 2; });
    bad([](RunConfig& c) { c.distribution = Distribution::booleanCube(3); });
    bad([](RunConfig& c) { c.model = nullptr; });
    bad([](RunConfig& c) { c.query = Query::cosineBall({1, 0}); });
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("default distribution follows the grammar") {
    Grammar g;
    g.features.push_back({0, "", true, {}, {}});
    g.features.push_back({1, "", false, {0.5}, {CmpOp::Lt}});
    Distribution d = defaultDistribution(3, g);
    Rng rng(2);
    bool sawFraction = false;
    for (int i = 0; i < 200; ++i) {
        auto x = d.sample(rng);
        CHECK((x[0] == 0.0 || x[0] == 1.0));
        sawFraction = sawFraction || (x[1] != 0.0 && x[1] != 1.0);
        CHECK((x[2] >= 0.0 && x[2] < 1.0));
    }
    CHECK(sawFraction);
}

TEST_CASE("same seed, same report") {
    RunConfig cfg = fixtures::zooConfig("milk", 11);
    json a = withoutTiming(makeReport(cfg, explain(cfg)));
    json b = withoutTiming(makeReport(cfg, explain(cfg)));
    CHECK(a == b);
    CHECK_FALSE(a.contains("timing"));
}

TEST_CASE("config json round trip and replay") {
    RunConfig cfg = fixtures::zooConfig("(not breathes)", 9);
    cfg.counterexampleBatch = 2;
    RunResult r = explain(cfg);
    json report = makeReport(cfg, r);
    RunConfig back = configFromJson(report["config"]);
    CHECK(configToJson(back) == configToJson(cfg));

    RunResult again = replay(report);
    CHECK(withoutTiming(makeReport(back, again)) == withoutTiming(report));

    RunResult other = replay(report, 10);
    CHECK(other.outcome == Outcome::Explanation);

    json tampered = report;
    tampered["version"] = "0.0.0-other";
    CHECK_THROWS_AS(replay(tampered), ReplayError);
    tampered = report;
    tampered["rng"] = "pcg64";
    CHECK_THROWS_AS(replay(tampered), ReplayError);
    tampered = report;
    tampered.erase("config");
    CHECK_THROWS_AS(replay(tampered), ReplayError);
}

TEST_CASE("config from files") {
    json j;
    j["model"] = "zoo_tree.json";
    j["grammar"] = "zoo.g.json";
    j["targetClass"] = "fish";
    j["query"] = "(not breathes)";
    j["seed"] = 4;
    RunConfig cfg = configFromJson(j, PACEXP_DATA_DIR);
    CHECK(cfg.targetClass == 1);
    RunResult r = explain(cfg);
    REQUIRE(r.formula);
    CHECK(render(*r.formula, cfg.featureNames) == "fins");
    j["targetClass"] = "bird";
    CHECK_THROWS_AS(configFromJson(j, PACEXP_DATA_DIR), std::invalid_argument);
    j["targetClass"] = "fish";
    j["model"] = "missing.json";
    CHECK_THROWS_AS(configFromJson(j, PACEXP_DATA_DIR), std::invalid_argument);
}

TEST_CASE("calibration warning for a nearly empty query") {
    RunConfig cfg = fixtures::zooConfig("(and fins breathes milk hair eggs aquatic tail)", 1);
    RunResult r = explain(cfg);
    CHECK_FALSE(r.warnings.empty());
    RunConfig ok = fixtures::zooConfig("true", 1);
    CHECK(explain(ok).warnings.empty());
}

TEST_CASE("parallel verifier gives the same run") {
    RunConfig cfg = fixtures::zooConfig("true", 21);
    RunConfig par = cfg;
    par.threads = 4;
    json a = withoutTiming(makeReport(cfg, explain(cfg)));
    json b = withoutTiming(makeReport(par, explain(par)));
    a.erase("config");
    b.erase("config");
    CHECK(a == b);
}
