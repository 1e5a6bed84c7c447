#include "pacexp/engine.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#ifndef PACEXP_VERSION
#define PACEXP_VERSION "0.0.0"
#endif

namespace pacexp {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kAccuracyStream = 0xACC0'0000'0000'0001ull;
constexpr std::uint64_t kCalibrationStream = 0xCA11'0000'0000'0001ull;
constexpr std::size_t kCalibrationDraws = 1000;

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

}  // namespace

std::string_view version() { return PACEXP_VERSION; }

std::string_view outcomeName(Outcome o) {
    switch (o) {
        case Outcome::Explanation: return "explanation";
        case Outcome::NoExplanation: return "no-explanation";
        case Outcome::BudgetTimeout: return "budget-timeout";
        case Outcome::BudgetIterations: return "budget-iterations";
    }
    return "?";
}

Distribution defaultDistribution(std::size_t arity, const Grammar& g) {
    std::vector<bool> boolean(arity, false);
    for (const auto& f : g.features)
        if (f.boolean && f.index < arity) boolean[f.index] = true;
    std::vector<Distribution::FeatureSpec> specs;
    for (std::size_t j = 0; j < arity; ++j) {
        if (boolean[j]) specs.emplace_back(Distribution::Categorical{{0.0, 1.0}, {0.5, 0.5}});
        else specs.emplace_back(Distribution::Interval{0.0, 1.0});
    }
    return Distribution::product(std::move(specs));
}

void RunConfig::validate() const {
    if (!model) throw std::invalid_argument("run config has no model");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (!(timeoutSeconds > 0.0)) throw std::invalid_argument("timeout must be positive");
    if (counterexampleBatch < 1) throw std::invalid_argument("counterexample batch must be >= 1");
    if (targetClass >= model->classes().size()) throw std::invalid_argument("target class out of range");
    std::size_t n = model->arity();
    grammar.validate(n);
    if (query.isFormula()) {
        if (auto m = maxFeature(query.asFormula()); m && *m >= n)
            throw std::invalid_argument("query mentions feature " + std::to_string(*m) + " but model arity is " +
                                        std::to_string(n));
    } else if (query.asCosineBall().center.size() != n) {
        throw std::invalid_argument("cosine center length does not match model arity");
    }
    if (effectiveDistribution().arity() != n)
        throw std::invalid_argument("distribution arity " + std::to_string(effectiveDistribution().arity()) +
                                    " does not match model arity " + std::to_string(n));
}

const Distribution& RunConfig::effectiveDistribution() const {
    if (distribution) return *distribution;
    if (!resolved_) resolved_ = defaultDistribution(model->arity(), grammar);
    return *resolved_;
}

RunResult explain(const RunConfig& cfg) {
    cfg.validate();
    const Model& model = *cfg.model;
    const Distribution& dist = cfg.effectiveDistribution();
    RunResult result;

    {
        Rng cal(cfg.seed, kCalibrationStream);
        std::size_t inside = 0;
        std::vector<double> x;
        for (std::size_t i = 0; i < kCalibrationDraws; ++i) {
            dist.sampleInto(cal, x);
            inside += cfg.query.contains(x);
        }
        if (inside * 100 < kCalibrationDraws)
            result.warnings.push_back("only " + std::to_string(inside) + " of " + std::to_string(kCalibrationDraws) +
                                      " calibration draws lie in the query");
    }

    const auto start = Clock::now();
    const auto soft = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.timeoutSeconds));
    SynthesisLimits limits;
    limits.deadline = start + 2 * (soft - start);

    Sample sample;
    auto finish = [&](Outcome o) {
        result.outcome = o;
        result.certified = o == Outcome::Explanation;
        if (o == Outcome::NoExplanation) result.formula.reset();
        else if (!result.conjectures.empty()) result.formula = result.conjectures.back();
        result.stats.counterexampleCount = sample.size();
        result.stats.wallSeconds = seconds(Clock::now() - start);
        if (!result.conjectures.empty()) {
            const Formula& last = result.conjectures.back();
            Rng acc(cfg.seed, kAccuracyStream);
            result.stats.lastConjectureSize = formulaSize(last);
            result.stats.lastConjectureAccuracy =
                estimateAccuracy(last, model, cfg.query, cfg.targetClass, dist, cfg.accuracySamples, acc);
        }
        if (result.formula) {
            result.stats.explanationSize = result.stats.lastConjectureSize;
            result.stats.estimatedAccuracy = result.stats.lastConjectureAccuracy;
        }
        return result;
    };

    while (true) {
        if (Clock::now() >= soft) return finish(Outcome::BudgetTimeout);

        auto t0 = Clock::now();
        SynthesisResult syn = synthesize(sample, cfg.grammar, limits);
        result.stats.learnerSeconds += seconds(Clock::now() - t0);
        if (syn.status == SynthesisResult::Status::Cancelled) return finish(Outcome::BudgetTimeout);
        if (syn.status == SynthesisResult::Status::NoneExists) return finish(Outcome::NoExplanation);
        result.conjectures.push_back(*syn.formula);

        if (cfg.maxIterations != 0 && result.rounds.size() >= cfg.maxIterations)
            return finish(Outcome::BudgetIterations);
        if (Clock::now() >= soft) return finish(Outcome::BudgetTimeout);

        VerifyParams vp;
        vp.epsilon = cfg.epsilon;
        vp.delta = cfg.delta;
        vp.iteration = result.rounds.size() + 1;
        vp.batchLimit = cfg.counterexampleBatch;
        vp.threads = cfg.threads;
        Rng rng(cfg.seed, vp.iteration);
        auto t1 = Clock::now();
        VerifierOutcome v = verify(*syn.formula, model, cfg.query, cfg.targetClass, dist, vp, rng);
        result.stats.verifierSeconds += seconds(Clock::now() - t1);

        result.stats.iterations = vp.iteration;
        result.stats.totalTestInputs += v.testedCount;
        result.rounds.push_back({vp.iteration, *syn.formula, v.suiteSize, v.testedCount, v.counterexamples});
        if (v.passed) return finish(Outcome::Explanation);
        for (const auto& c : v.counterexamples) sample.insert(c.x, c.label);
    }
}

// ---------------------------------------------------------------------------
// Serialization

json configToJson(const RunConfig& cfg) {
    json j;
    j["model"] = cfg.model->toJson();
    if (!cfg.featureNames.empty()) j["featureNames"] = cfg.featureNames.names();
    j["query"] = cfg.query.toJson();
    j["targetClass"] = cfg.model->classes().at(cfg.targetClass);
    j["epsilon"] = cfg.epsilon;
    j["delta"] = cfg.delta;
    j["grammar"] = cfg.grammar.toJson(cfg.featureNames);
    j["distribution"] = cfg.effectiveDistribution().toJson();
    j["seed"] = cfg.seed;
    j["timeout"] = cfg.timeoutSeconds;
    j["maxIterations"] = cfg.maxIterations;
    j["counterexampleBatch"] = cfg.counterexampleBatch;
    j["threads"] = cfg.threads;
    j["accuracySamples"] = cfg.accuracySamples;
    return j;
}

namespace {

json loadJsonOrInline(const json& v, const std::filesystem::path& baseDir, const char* what) {
    if (!v.is_string()) return v;
    std::filesystem::path p = v.get<std::string>();
    if (p.is_relative() && !baseDir.empty()) p = baseDir / p;
    std::ifstream in(p);
    if (!in) throw std::invalid_argument(std::string("cannot open ") + what + " file " + p.string());
    return json::parse(in);
}

}  // namespace

RunConfig configFromJson(const json& j, const std::filesystem::path& baseDir) {
    RunConfig cfg;
    try {
        cfg.model = modelFromJson(loadJsonOrInline(j.at("model"), baseDir, "model"));
        if (j.contains("featureNames")) cfg.featureNames = FeatureNames(j.at("featureNames").get<std::vector<std::string>>());
        else cfg.featureNames = cfg.model->featureNames();
        std::size_t n = cfg.model->arity();
        cfg.query = j.contains("query") ? queryFromJson(j.at("query"), n, cfg.featureNames) : Query::everything();
        const json& target = j.at("targetClass");
        if (target.is_string()) {
            auto idx = cfg.model->classIndex(target.get<std::string>());
            if (!idx) throw std::invalid_argument("unknown target class '" + target.get<std::string>() + "'");
            cfg.targetClass = *idx;
        } else {
            cfg.targetClass = target.get<std::size_t>();
        }
        cfg.epsilon = j.value("epsilon", cfg.epsilon);
        cfg.delta = j.value("delta", cfg.delta);
        cfg.grammar = Grammar::fromJson(loadJsonOrInline(j.at("grammar"), baseDir, "grammar"), n, cfg.featureNames);
        if (j.contains("distribution") && !j.at("distribution").is_null())
            cfg.distribution = distributionFromJson(loadJsonOrInline(j.at("distribution"), baseDir, "distribution"), baseDir);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.timeoutSeconds = j.value("timeout", cfg.timeoutSeconds);
        cfg.maxIterations = j.value("maxIterations", cfg.maxIterations);
        cfg.counterexampleBatch = j.value("counterexampleBatch", cfg.counterexampleBatch);
        cfg.threads = j.value("threads", cfg.threads);
        cfg.accuracySamples = j.value("accuracySamples", cfg.accuracySamples);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("run config schema violation: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json makeReport(const RunConfig& cfg, const RunResult& r) {
    const FeatureNames& names = cfg.featureNames;
    json report;
    report["artifact"] = "pacexp";
    report["version"] = version();
    report["rng"] = Rng::kAlgorithm;
    report["outcome"] = outcomeName(r.outcome);
    report["certified"] = r.certified;
    if (r.formula) {
        report["explanation"] = render(*r.formula);
        report["explanationNamed"] = render(*r.formula, names);
    } else {
        report["explanation"] = nullptr;
        report["explanationNamed"] = nullptr;
    }
    report["lastConjecture"] = r.conjectures.empty() ? json(nullptr) : json(render(r.conjectures.back(), names));
    json stats;
    stats["size"] = r.stats.explanationSize;
    stats["accuracy"] = r.stats.estimatedAccuracy ? json(*r.stats.estimatedAccuracy) : json(nullptr);
    if (r.stats.datasetAccuracy) stats["datasetAccuracy"] = *r.stats.datasetAccuracy;
    stats["lastConjectureSize"] = r.stats.lastConjectureSize;
    stats["lastConjectureAccuracy"] =
        r.stats.lastConjectureAccuracy ? json(*r.stats.lastConjectureAccuracy) : json(nullptr);
    stats["iterations"] = r.stats.iterations;
    stats["testInputs"] = r.stats.totalTestInputs;
    stats["counterexamples"] = r.stats.counterexampleCount;
    report["stats"] = std::move(stats);

    json timing;
    timing["wallSeconds"] = r.stats.wallSeconds;
    timing["learnerSeconds"] = r.stats.learnerSeconds;
    timing["verifierSeconds"] = r.stats.verifierSeconds;
    double wall = r.stats.wallSeconds > 0 ? r.stats.wallSeconds : 1.0;
    timing["learnerShare"] = r.stats.learnerSeconds / wall;
    timing["verifierShare"] = r.stats.verifierSeconds / wall;
    timing["timestamp"] = static_cast<std::int64_t>(std::time(nullptr));
    report["timing"] = std::move(timing);

    json trace = json::array();
    for (const auto& round : r.rounds) {
        json cex = json::array();
        for (const auto& c : round.counterexamples) cex.push_back({{"x", c.x}, {"label", c.label ? 1 : 0}});
        trace.push_back({{"iteration", round.iteration},
                         {"conjecture", render(round.conjecture)},
                         {"suiteSize", round.suiteSize},
                         {"tested", round.tested},
                         {"counterexamples", std::move(cex)}});
    }
    report["trace"] = std::move(trace);
    json conj = json::array();
    for (const auto& f : r.conjectures) conj.push_back(render(f));
    report["conjectures"] = std::move(conj);
    report["warnings"] = r.warnings;
    report["seed"] = cfg.seed;
    report["distribution"] = cfg.effectiveDistribution().describe();
    report["config"] = configToJson(cfg);
    return report;
}

json withoutTiming(json report) {
    report.erase("timing");
    return report;
}

RunResult replay(const json& report, std::optional<std::uint64_t> seedOverride) {
    if (report.value("artifact", std::string()) != "pacexp") throw ReplayError("not a pacexp run report");
    if (report.value("version", std::string()) != version())
        throw ReplayError("report version " + report.value("version", std::string("?")) + " != " +
                          std::string(version()));
    if (report.value("rng", std::string()) != Rng::kAlgorithm) throw ReplayError("report RNG algorithm differs");
    if (!report.contains("config")) throw ReplayError("report has no config block");
    RunConfig cfg;
    try {
        cfg = configFromJson(report.at("config"));
    } catch (const std::exception& e) {
        throw ReplayError(std::string("cannot rebuild config: ") + e.what());
    }
    if (seedOverride) cfg.seed = *seedOverride;
    return explain(cfg);
}

}  // namespace pacexp
