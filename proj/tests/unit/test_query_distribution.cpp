#include <doctest.h>

#include <cmath>
#include <set>

#include "../common/fixtures.hpp"
#include "pacexp/distribution.hpp"
#include "pacexp/query.hpp"

using namespace pacexp;
using nlohmann::json;

TEST_CASE("cosine distance") {
    std::vector<double> a{1, 0}, b{0, 1}, c{2, 0}, d{1, 1};
    CHECK(cosineDistance(a, a) == doctest::Approx(0.0));
    CHECK(cosineDistance(a, b) == doctest::Approx(1.0));
    CHECK(cosineDistance(a, c) == doctest::Approx(0.0));
    CHECK(cosineDistance(a, d) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)));
    std::vector<double> z{0, 0};
    CHECK(std::isnan(cosineDistance(a, z)));
}

TEST_CASE("cosine distance is scale invariant") {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x(4), y(4);
        for (auto& v : x) v = rng.uniform(-1, 1);
        for (auto& v : y) v = rng.uniform(-1, 1);
        double s = rng.uniform(0.1, 10);
        std::vector<double> xs = x;
        for (auto& v : xs) v *= s;
        CHECK(cosineDistance(xs, y) == doctest::Approx(cosineDistance(x, y)).epsilon(1e-12));
        CHECK(cosineDistance(x, x) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("cosine ball membership") {
    Query q = Query::cosineBall({1, 0});
    CHECK(q.asCosineBall().maxDistance == 0.5);
    CHECK(q.contains(std::vector<double>{1, 0}));
    CHECK_FALSE(q.contains(std::vector<double>{0, 1}));
    CHECK(q.contains(std::vector<double>{1, 0.5}));
    CHECK_FALSE(q.contains(std::vector<double>{0, 0}));
    CHECK_THROWS_AS(Query::cosineBall({0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(Query::cosineBall({1, 0}, 2.5), std::invalid_argument);
}

TEST_CASE("formula query membership") {
    Query t = Query::everything();
    Rng rng(2);
    for (int i = 0; i < 50; ++i) CHECK(t.contains(std::vector<double>{rng.uniform(-5, 5), rng.uniform(-5, 5)}));
    Formula f = parseFormula("(or x0 (< x1 0.5))", 2);
    Query q = Query::formula(f);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> x{static_cast<double>(rng.below(2)), rng.uniform01()};
        CHECK(q.contains(x) == evaluate(f, x));
    }
}

TEST_CASE("query parsing and json") {
    FeatureNames names({"fins", "breathes"});
    Query q = parseQuery("(not fins)", 2, names);
    CHECK(q.isFormula());
    CHECK(q.toJson() == "(not x0)");
    Query b = parseQuery(R"({"cosine":{"center":[0.5,1],"maxDist":0.25}})", 2);
    REQUIRE_FALSE(b.isFormula());
    CHECK(b.asCosineBall().maxDistance == 0.25);
    Query back = queryFromJson(b.toJson(), 2);
    CHECK(back.asCosineBall().center == std::vector<double>{0.5, 1});
    CHECK_THROWS(parseQuery(R"({"cosine":{"center":[1,2,3]}})", 2));
    CHECK_THROWS(parseQuery(R"({"cube":{}})", 2));
}

TEST_CASE("rng stream is fixed") {
    Rng a(123, 4), b(123, 4), c(123, 5);
    std::uint64_t first = a.nextU64();
    CHECK(first == b.nextU64());
    CHECK(first != c.nextU64());
    Rng r(0);
    for (int i = 0; i < 1000; ++i) {
        double u = r.uniform01();
        CHECK((u >= 0.0 && u < 1.0));
        CHECK(r.below(7) < 7);
    }
    CHECK(Rng::kAlgorithm == "mt19937_64+seed_seq/v1");
}

TEST_CASE("rng matches the reference mt19937_64 seeding") {
    std::seed_seq seq{123u, 0u, 4u, 0u};
    std::mt19937_64 ref(seq);
    Rng r(123, 4);
    for (int i = 0; i < 10; ++i) CHECK(r.nextU64() == ref());
}

TEST_CASE("uniform box mean") {
    Distribution d = Distribution::uniformBox({0, 0}, {1, 1});
    Rng rng(77);
    double s0 = 0, s1 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        auto x = d.sample(rng);
        REQUIRE(x.size() == 2);
        s0 += x[0];
        s1 += x[1];
    }
    CHECK(s0 / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::abs(s0 / n - 0.5) < 0.01);
    CHECK(std::abs(s1 / n - 0.5) < 0.01);
    CHECK_THROWS_AS(Distribution::uniformBox({1}, {0}), std::invalid_argument);
}

TEST_CASE("empirical resampling") {
    std::vector<std::vector<double>> rows{{0.1, 1}, {0.7, 0}, {0.3, 1}};
    Distribution d = Distribution::empirical(rows, {false, true}, 0.0);
    Rng rng(5);
    std::set<std::vector<double>> seen;
    for (int i = 0; i < 300; ++i) {
        auto x = d.sample(rng);
        CHECK(std::find(rows.begin(), rows.end(), x) != rows.end());
        seen.insert(x);
    }
    CHECK(seen.size() == 3);

    Distribution noisy = Distribution::empirical(rows, {false, true}, 0.3);
    for (int i = 0; i < 1000; ++i) {
        auto x = noisy.sample(rng);
        CHECK((x[0] >= 0.0 && x[0] <= 1.0));
        CHECK((x[1] == 0.0 || x[1] == 1.0));
    }
    CHECK_THROWS_AS(Distribution::empirical({}, {}, 0.0), std::invalid_argument);
}

TEST_CASE("product with a boolean feature") {
    Distribution d = distributionFromJson(json::parse(R"({"product":[{"categorical":{"0":0.5,"1":0.5}},{"uniform":[2,3]},"bool"]})"));
    CHECK(d.arity() == 3);
    Rng rng(8);
    int ones = 0;
    for (int i = 0; i < 2000; ++i) {
        auto x = d.sample(rng);
        CHECK((x[0] == 0.0 || x[0] == 1.0));
        CHECK((x[1] >= 2.0 && x[1] < 3.0));
        CHECK((x[2] == 0.0 || x[2] == 1.0));
        ones += x[0] == 1.0;
    }
    CHECK(std::abs(ones / 2000.0 - 0.5) < 0.05);
    CHECK_THROWS(distributionFromJson(json::parse(R"({"product":[{"categorical":{"0":0.5,"1":0.4}}]})")));
}

TEST_CASE("distribution json round trip keeps the stream") {
    std::vector<Distribution> ds{Distribution::unitBox(3), Distribution::booleanCube(2),
                                 Distribution::empirical({{0.2, 1}, {0.4, 0}}, {false, true}, 0.1)};
    for (const auto& d : ds) {
        Distribution back = distributionFromJson(d.toJson());
        CHECK(back.toJson() == d.toJson());
        Rng a(3), b(3);
        for (int i = 0; i < 100; ++i) REQUIRE(d.sample(a) == back.sample(b));
    }
}

TEST_CASE("empirical distribution from a dataset path") {
    json j = json::parse(R"({"empirical":{"dataset":"zoo.csv","sigma":0.05}})");
    Distribution d = distributionFromJson(j, PACEXP_DATA_DIR);
    CHECK(d.arity() == 16);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        auto x = d.sample(rng);
        for (std::size_t k = 0; k < 16; ++k)
            if (k != 12) CHECK((x[k] == 0.0 || x[k] == 1.0));  // legs is the only real column
    }
}
