#include <doctest.h>

#include <chrono>
#include <random>
#include <set>

#include "../common/fixtures.hpp"
#include "pacexp/synthesizer.hpp"

using namespace pacexp;
using nlohmann::json;

namespace {

Grammar boolGrammar(std::size_t n, std::size_t clauses, std::size_t lits, bool constants = true) {
    std::vector<std::size_t> fs(n);
    for (std::size_t j = 0; j < n; ++j) fs[j] = j;
    return Grammar::booleans(fs, clauses, lits, constants);
}

std::vector<Formula> drain(const Grammar& g, std::size_t limit = 1000000) {
    FormulaEnumerator e(g);
    std::vector<Formula> out;
    while (auto f = e.next()) {
        out.push_back(*f);
        if (out.size() >= limit) break;
    }
    return out;
}

Sample sampleOf(std::initializer_list<std::pair<std::vector<double>, bool>> pts) {
    Sample s;
    for (const auto& [x, l] : pts) s.insert(x, l);
    return s;
}

}  // namespace

TEST_CASE("sample bookkeeping") {
    Sample s;
    CHECK(s.insert({1, 0}, true));
    CHECK_FALSE(s.insert({1, 0}, true));
    CHECK_THROWS_AS(s.insert({1, 0}, false), ContradictorySample);
    CHECK(s.insert({0, 0}, false));
    CHECK(s.size() == 2);
    CHECK(s.positives() == 1);
    CHECK(s.contains(std::vector<double>{0, 0}, false));
    CHECK(s.isFunctionConsistent());
    s.append({0, 0}, true);
    CHECK_FALSE(s.isFunctionConsistent());
    CHECK_THROWS_AS(synthesize(s, boolGrammar(2, 1, 1)), ContradictorySample);
}

TEST_CASE("consistency") {
    Formula f = parseFormula("(and x0 (not x1))", 2);
    CHECK(isConsistent(f, Sample{}));
    CHECK(isConsistent(f, sampleOf({{{1, 0}, true}, {{1, 1}, false}, {{0, 0}, false}})));
    CHECK_FALSE(isConsistent(parseFormula("x0", 2), sampleOf({{{1, 1}, false}})));
    CHECK_FALSE(isConsistent(parseFormula("x0", 2), sampleOf({{{0, 1}, true}})));
}

TEST_CASE("enumeration starts false, true, x0, (not x0)") {
    auto fs = drain(boolGrammar(1, 1, 1));
    REQUIRE(fs.size() == 4);
    CHECK(render(fs[0]) == "false");
    CHECK(render(fs[1]) == "true");
    CHECK(render(fs[2]) == "x0");
    CHECK(render(fs[3]) == "(not x0)");
}

TEST_CASE("enumeration counts match an exhaustive subset count") {
    // Frozen from a brute-force count over literal subsets and clause subsets.
    CHECK(drain(boolGrammar(2, 1, 2)).size() == 12);
    CHECK(drain(boolGrammar(2, 2, 2)).size() == 57);
    CHECK(drain(boolGrammar(2, 2, 2, false)).size() == 55);
    CHECK(drain(boolGrammar(3, 2, 2)).size() == 233);
    Grammar real;
    real.features.push_back({0, "x0", false, {0.25, 0.75}, {CmpOp::Lt, CmpOp::Gt}});
    real.maxClauses = 2;
    real.maxLiteralsPerClause = 2;
    CHECK(drain(real).size() == 57);
}

TEST_CASE("enumeration is strictly increasing and duplicate free") {
    Grammar g = boolGrammar(4, 3, 3);
    auto fs = drain(g, 10000);
    REQUIRE(fs.size() == 10000);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        CHECK(seen.insert(render(fs[i])).second);
        if (i > 0) REQUIRE(compare(fs[i - 1], fs[i]) == std::strong_ordering::less);
    }
}

TEST_CASE("enumerated formulas are canonical DNFs within the bounds") {
    Grammar g = boolGrammar(3, 2, 3);
    for (const auto& f : drain(g)) {
        CHECK(render(parseFormula(render(f), 3)) == render(f));
        CHECK(disjunctCount(f) <= 2);
        for (const auto& c : (f.kind() == Formula::Kind::Or ? f.children() : std::span<const Formula>(&f, 1)))
            CHECK((c.kind() == Formula::Kind::And ? c.children().size() : 1) <= 3);
    }
}

TEST_CASE("synthesize examples") {
    Grammar g = boolGrammar(2, 2, 2);
    SynthesisResult empty = synthesize(Sample{}, g);
    REQUIRE(empty.found());
    CHECK(render(*empty.formula) == "false");

    // fins = x0, breathes = x1
    Sample zoo = sampleOf({{{1, 0}, true}, {{1, 1}, false}, {{0, 0}, false}});
    SynthesisResult r = synthesize(zoo, g);
    REQUIRE(r.found());
    auto grid = booleanGrid(2, std::vector<std::size_t>{0, 1});
    CHECK(equivalentOnGrid(*r.formula, parseFormula("(and x0 (not x1))", 2), grid));
    CHECK(isConsistent(*r.formula, zoo));

    Grammar onlyX0 = Grammar::booleans(std::vector<std::size_t>{0}, 2, 2);
    Sample split = sampleOf({{{0, 0}, true}, {{0, 1}, false}});
    CHECK(synthesize(split, onlyX0).status == SynthesisResult::Status::NoneExists);
}

TEST_CASE("synthesize without constants") {
    Grammar g = boolGrammar(2, 1, 1, false);
    SynthesisResult r = synthesize(Sample{}, g);
    REQUIRE(r.found());
    CHECK(render(*r.formula) == "x0");
    r = synthesize(sampleOf({{{1, 1}, false}}), g);
    REQUIRE(r.found());
    CHECK(render(*r.formula) == "(not x0)");
    r = synthesize(sampleOf({{{1, 1}, false}, {{0, 0}, false}}), g);
    CHECK(r.status == SynthesisResult::Status::NoneExists);
}

TEST_CASE("real-valued thresholds") {
    Grammar g;
    g.features.push_back({0, "a", false, {0.25, 0.5, 0.75}, {CmpOp::Lt, CmpOp::Gt}});
    g.features.push_back({1, "b", false, {0.5}, {CmpOp::Lt, CmpOp::Gt}});
    g.maxClauses = 2;
    g.maxLiteralsPerClause = 2;
    Sample s = sampleOf({{{0.6, 0.1}, true}, {{0.4, 0.1}, false}, {{0.9, 0.9}, false}});
    SynthesisResult r = synthesize(s, g);
    REQUIRE(r.found());
    CHECK(render(r.formula.value()) == "(and (< x0 0.75) (> x0 0.5))");
    // Two points in the same cell of the threshold grid cannot be separated.
    Sample cell = sampleOf({{{0.6, 0.1}, true}, {{0.7, 0.2}, false}});
    CHECK(synthesize(cell, g).status == SynthesisResult::Status::NoneExists);
}

TEST_CASE("monotone hardness") {
    Grammar g = boolGrammar(2, 1, 2);
    // xor needs two clauses
    Sample s = sampleOf({{{0, 1}, true}, {{1, 0}, true}, {{0, 0}, false}, {{1, 1}, false}});
    REQUIRE(synthesize(s, g).status == SynthesisResult::Status::NoneExists);
    Sample bigger = s;
    bigger.insert({0.5, 0.5}, true);
    CHECK(synthesize(bigger, g).status == SynthesisResult::Status::NoneExists);
}

TEST_CASE("synthesize is deterministic and Occam-minimal on random instances") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 2 + gen() % 2;
        Grammar g = boolGrammar(n, 1 + gen() % 2, 1 + gen() % 2, gen() % 2);
        Sample s;
        for (int k = 0; k < 4; ++k) {
            std::vector<double> x(n);
            for (auto& v : x) v = static_cast<double>(gen() % 2);
            if (!s.contains(x, true) && !s.contains(x, false)) s.insert(x, gen() % 2);
        }
        SynthesisResult a = synthesize(s, g);
        SynthesisResult b = synthesize(s, g);
        REQUIRE(a.status == b.status);
        std::optional<Formula> brute;
        for (const auto& f : drain(g))
            if (isConsistent(f, s)) {
                brute = f;
                break;
            }
        REQUIRE(a.found() == brute.has_value());
        if (brute) {
            CHECK(render(*a.formula) == render(*b.formula));
            CHECK(render(*a.formula) == render(*brute));
        }
    }
}

TEST_CASE("deadline cancels the search") {
    Grammar g = boolGrammar(12, 4, 4);
    Sample s;
    std::mt19937_64 gen(1);
    for (int k = 0; k < 40; ++k) {
        std::vector<double> x(12);
        for (auto& v : x) v = static_cast<double>(gen() % 2);
        if (!s.contains(x, true) && !s.contains(x, false)) s.insert(x, gen() % 2);
    }
    SynthesisLimits lim;
    lim.deadline = std::chrono::steady_clock::now();
    CHECK(synthesize(s, g, lim).status == SynthesisResult::Status::Cancelled);
}

TEST_CASE("cover strategy is consistent and at least as large as the Occam answer") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 40; ++trial) {
        Grammar g = boolGrammar(4, 16, 4);
        Sample s;
        for (int k = 0; k < 8; ++k) {
            std::vector<double> x(4);
            for (auto& v : x) v = static_cast<double>(gen() % 2);
            if (!s.contains(x, true) && !s.contains(x, false)) s.insert(x, gen() % 2);
        }
        SynthesisResult occam = synthesize(s, g);
        g.strategy = SearchStrategy::Cover;
        SynthesisResult cover = synthesize(s, g);
        // Distinct boolean points never conflict, so both must succeed.
        REQUIRE(occam.found());
        REQUIRE(cover.found());
        CHECK(isConsistent(*cover.formula, s));
        CHECK(compare(*occam.formula, *cover.formula) != std::strong_ordering::greater);
    }
}

TEST_CASE("grammar json") {
    FeatureNames names({"age", "fins"});
    json j = json::parse(R"({"features":[{"name":"age","kind":"real","constants":[0.75,0.25],"ops":["<",">"]},
                                          {"name":"fins","kind":"bool"}],
                             "maxClauses":3,"maxLiteralsPerClause":4,"constants":false})");
    Grammar g = Grammar::fromJson(j, 2, names);
    REQUIRE(g.features.size() == 2);
    CHECK(g.features[0].index == 0);
    CHECK(g.features[0].constants == std::vector<double>{0.25, 0.75});
    CHECK(g.features[1].boolean);
    CHECK(g.maxClauses == 3);
    CHECK_FALSE(g.includeConstants);
    CHECK(g.literals().size() == 6);
    Grammar back = Grammar::fromJson(g.toJson(names), 2, names);
    CHECK(back.toJson(names) == g.toJson(names));

    json defaults = json::parse(R"({"features":[{"name":"x1"}]})");
    Grammar d = Grammar::fromJson(defaults, 2);
    CHECK(d.features[0].index == 1);
    CHECK(d.features[0].constants == std::vector<double>{0.25, 0.5, 0.75});
    CHECK(d.features[0].ops == std::vector<CmpOp>{CmpOp::Lt, CmpOp::Gt});
    CHECK(d.maxClauses == 2);
    CHECK(d.maxLiteralsPerClause == 4);

    CHECK_THROWS(Grammar::fromJson(json::parse(R"({"features":[{"name":"gills","kind":"bool"}]})"), 2, names));
    CHECK_THROWS(Grammar::fromJson(json::parse(R"({"features":[{"name":"age","ops":["="]}]})"), 2, names));
    CHECK_THROWS(Grammar::fromJson(json::parse(R"({"features":[{"index":5,"kind":"bool"}]})"), 2, names));
    CHECK_THROWS(Grammar::fromJson(json::parse(R"({"features":[],"maxClauses":0})"), 2, names));
}

TEST_CASE("sygus export") {
    FeatureNames names({"fins", "breathes"});
    Grammar g = boolGrammar(2, 2, 2);
    std::string empty = exportSygusIf(Sample{}, g, 2, names);
    CHECK(empty.find("(set-logic LRA)") != std::string::npos);
    CHECK(empty.find("(synth-fun f ((fins Real) (breathes Real)) Bool") != std::string::npos);
    CHECK(empty.find("(constraint") == std::string::npos);
    CHECK(empty.find("(check-synth)") != std::string::npos);

    std::string one = exportSygusIf(sampleOf({{{1, 0}, true}}), g, 2);
    CHECK(one.find("(constraint (= (f 1 0) true))") != std::string::npos);
    std::size_t count = 0;
    for (std::size_t p = one.find("(constraint"); p != std::string::npos; p = one.find("(constraint", p + 1)) ++count;
    CHECK(count == 1);

    Grammar real;
    real.features.push_back({0, "x0", false, {0.5}, {CmpOp::Lt}});
    std::string r = exportSygusIf(sampleOf({{{-0.25}, false}}), real, 1);
    CHECK(r.find("(< x0 0.5)") != std::string::npos);
    CHECK(r.find("(constraint (= (f (- 0.25)) false))") != std::string::npos);

    // balanced parentheses
    int depth = 0;
    for (char c : one) {
        depth += c == '(';
        depth -= c == ')';
        CHECK(depth >= 0);
    }
    CHECK(depth == 0);
}
