// pacexp command-line front end.
//
// Exit codes: 0 explanation (or success for bench/export/replay match),
// 1 usage or I/O error, 2 no explanation, 3 budget exhausted, 4 replay
// mismatch.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pacexp/engine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pacexp;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitMismatch = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exitCodeFor(Outcome o) {
    switch (o) {
        case Outcome::Explanation: return 0;
        case Outcome::NoExplanation: return 2;
        case Outcome::BudgetTimeout:
        case Outcome::BudgetIterations: return 3;
    }
    return kExitUsage;
}

std::string readFile(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw UsageError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json readJsonFile(const fs::path& p) {
    try {
        return json::parse(readFile(p));
    } catch (const json::parse_error& e) {
        throw UsageError(p.string() + ": " + e.what());
    }
}

double envDouble(const char* name, double fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    char* end = nullptr;
    double d = std::strtod(v, &end);
    if (end == v || *end != '\0') throw UsageError(std::string("bad value for ") + name + ": " + v);
    return d;
}

/// Inline text, unless the value names an existing file.
std::string textOrFile(const std::string& value) {
    std::error_code ec;
    if (!value.empty() && value.front() != '(' && value.front() != '{' && fs::is_regular_file(value, ec))
        return readFile(value);
    return value;
}

struct JobOptions {
    std::string model;
    std::string query = "true";
    std::string targetClass;
    double epsilon = 0.05;
    double delta = 0.05;
    double timeout = 300.0;
    std::uint64_t seed = 0;
    std::string grammar;
    std::string distribution;
    std::string dataset;
    std::string manifest;
    std::size_t maxIterations = 0;
    std::size_t batch = 1;
    std::size_t threads = 1;
    std::string out;
    std::string format = "json";
};

void addJobOptions(CLI::App* sub, JobOptions& o, bool needClass) {
    sub->add_option("--model", o.model, "model JSON file")->required();
    sub->add_option("--query", o.query, "query s-expression, cosine JSON, or a file holding either")
        ->capture_default_str();
    auto* cls = sub->add_option("--class", o.targetClass, "target class (name or index)");
    if (needClass) cls->required();
    sub->add_option("--epsilon", o.epsilon, "error bound (env PACEXP_EPSILON)")->capture_default_str();
    sub->add_option("--delta", o.delta, "confidence bound (env PACEXP_DELTA)")->capture_default_str();
    sub->add_option("--timeout", o.timeout, "wall-clock budget in seconds (env PACEXP_TIMEOUT)")
        ->capture_default_str();
    sub->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    sub->add_option("--grammar", o.grammar, "grammar JSON file")->required();
    sub->add_option("--distribution", o.distribution, "distribution JSON (file or inline)");
    sub->add_option("--dataset", o.dataset, "CSV dataset: feature names and dataset accuracy");
    sub->add_option("--manifest", o.manifest, "dataset manifest JSON (reuse stored normalization)");
    sub->add_option("--max-iterations", o.maxIterations, "cap on verifier rounds (0 = none)")->capture_default_str();
    sub->add_option("--batch", o.batch, "counterexamples per failed round")->capture_default_str()->check(
        CLI::PositiveNumber);
    sub->add_option("--threads", o.threads, "verifier worker threads")->capture_default_str();
    sub->add_option("--out", o.out, "report path (default stdout)");
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "table"}))
        ->capture_default_str();
}

struct Job {
    RunConfig cfg;
    std::optional<Dataset> dataset;
};

Job buildJob(const JobOptions& o) {
    Job job;
    RunConfig& cfg = job.cfg;
    try {
        cfg.model = loadModel(o.model);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    std::size_t n = cfg.model->arity();

    std::optional<DatasetManifest> manifest;
    if (!o.manifest.empty()) manifest = DatasetManifest::fromJson(readJsonFile(o.manifest));
    if (!o.dataset.empty()) {
        try {
            job.dataset = loadDataset(o.dataset, manifest ? &*manifest : nullptr);
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
        if (job.dataset->arity() != n)
            throw UsageError("dataset has " + std::to_string(job.dataset->arity()) + " features, model arity is " +
                             std::to_string(n));
        manifest = job.dataset->manifest;
    }
    if (manifest) cfg.featureNames = manifest->featureNames();
    else cfg.featureNames = cfg.model->featureNames();

    cfg.query = parseQuery(textOrFile(o.query), n, cfg.featureNames);

    if (o.targetClass.empty()) {
        cfg.targetClass = cfg.model->classes().size() > 1 ? 1 : 0;
    } else if (auto idx = cfg.model->classIndex(o.targetClass)) {
        cfg.targetClass = *idx;
    } else if (std::all_of(o.targetClass.begin(), o.targetClass.end(), ::isdigit)) {
        cfg.targetClass = std::stoul(o.targetClass);
    } else {
        throw UsageError("unknown class '" + o.targetClass + "'");
    }

    cfg.grammar = Grammar::fromJson(readJsonFile(o.grammar), n, cfg.featureNames);
    if (!o.distribution.empty()) {
        std::string text = textOrFile(o.distribution);
        fs::path base = text == o.distribution ? fs::path{} : fs::path(o.distribution).parent_path();
        cfg.distribution = distributionFromJson(json::parse(text), base);
    } else if (manifest) {
        std::vector<Distribution::FeatureSpec> specs;
        for (const auto& f : manifest->features) {
            if (f.kind == FeatureKind::Boolean) specs.emplace_back(Distribution::Categorical{{0.0, 1.0}, {0.5, 0.5}});
            else specs.emplace_back(Distribution::Interval{0.0, 1.0});
        }
        cfg.distribution = Distribution::product(std::move(specs));
    }

    cfg.epsilon = o.epsilon;
    cfg.delta = o.delta;
    cfg.timeoutSeconds = o.timeout;
    cfg.seed = o.seed;
    cfg.maxIterations = o.maxIterations;
    cfg.counterexampleBatch = o.batch;
    cfg.threads = o.threads;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return job;
}

RunResult runJob(const Job& job) {
    RunResult r = explain(job.cfg);
    if (job.dataset && r.formula)
        r.stats.datasetAccuracy = accuracyOn(*r.formula, *job.cfg.model, *job.dataset, job.cfg.query, job.cfg.targetClass);
    return r;
}

std::string cell(const json& v) {
    if (v.is_null()) return "-";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void printRow(std::ostream& os, std::string_view key, const json& v) {
    os << std::left << std::setw(18) << key << cell(v) << '\n';
}

void printReportTable(std::ostream& os, const json& r) {
    printRow(os, "outcome", r["outcome"]);
    printRow(os, "certified", r["certified"]);
    printRow(os, "explanation", r["explanationNamed"]);
    const json& s = r["stats"];
    printRow(os, "size", s["size"]);
    printRow(os, "accuracy", s["accuracy"]);
    if (s.contains("datasetAccuracy")) printRow(os, "dataset-accuracy", s["datasetAccuracy"]);
    if (!r["certified"].get<bool>()) {
        printRow(os, "last-conjecture", r["lastConjecture"]);
        printRow(os, "last-size", s["lastConjectureSize"]);
        printRow(os, "last-accuracy", s["lastConjectureAccuracy"]);
    }
    printRow(os, "iterations", s["iterations"]);
    printRow(os, "test-inputs", s["testInputs"]);
    printRow(os, "counterexamples", s["counterexamples"]);
    const json& t = r["timing"];
    printRow(os, "time-s", t["wallSeconds"]);
    printRow(os, "learner-share", t["learnerShare"]);
    printRow(os, "verifier-share", t["verifierShare"]);
    for (const auto& w : r["warnings"]) printRow(os, "warning", w);
}

void printBenchTable(std::ostream& os, const json& b) {
    const json& a = b["aggregate"];
    printRow(os, "runs", a["runs"]);
    for (auto it = a["outcomes"].begin(); it != a["outcomes"].end(); ++it) printRow(os, it.key(), it.value());
    printRow(os, "mean-size", a["meanSize"]);
    printRow(os, "mean-accuracy", a["meanAccuracy"]);
    if (a.contains("meanDatasetAccuracy")) printRow(os, "mean-dataset-acc", a["meanDatasetAccuracy"]);
    printRow(os, "mean-test-inputs", a["meanTestInputs"]);
    printRow(os, "mean-iterations", a["meanIterations"]);
    const json& t = b["timing"];
    printRow(os, "mean-time-s", t["meanWallSeconds"]);
    printRow(os, "learner-share", t["learnerShare"]);
    printRow(os, "verifier-share", t["verifierShare"]);
}

void emit(const std::string& outPath, const std::string& format, const json& doc,
          void (*table)(std::ostream&, const json&)) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!outPath.empty()) {
        file.open(outPath, std::ios::binary);
        if (!file) throw UsageError("cannot write " + outPath);
        os = &file;
    }
    if (format == "table") table(*os, doc);
    else *os << doc.dump(2) << '\n';
}

int cmdExplain(const JobOptions& o) {
    Job job = buildJob(o);
    RunResult r = runJob(job);
    json report = makeReport(job.cfg, r);
    emit(o.out, o.format, report, printReportTable);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    return exitCodeFor(r.outcome);
}

int cmdBench(const JobOptions& o, std::size_t runs, std::size_t jobs) {
    if (runs == 0) throw UsageError("--runs must be at least 1");
    Job base = buildJob(o);
    std::vector<json> reports(runs);
    std::vector<RunResult> results(runs);
    auto work = [&](std::size_t k) {
        Job job = base;
        job.cfg.seed = o.seed + k;
        results[k] = runJob(job);
        reports[k] = makeReport(job.cfg, results[k]);
    };
    jobs = std::max<std::size_t>(1, std::min(jobs, runs));
    if (jobs == 1) {
        for (std::size_t k = 0; k < runs; ++k) work(k);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < jobs; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t k = w; k < runs; k += jobs) work(k);
            });
    }

    json outcomes = json::object();
    for (Outcome oc : {Outcome::Explanation, Outcome::NoExplanation, Outcome::BudgetTimeout, Outcome::BudgetIterations})
        outcomes[std::string(outcomeName(oc))] = 0;
    double sizeSum = 0, accSum = 0, dsSum = 0, inputs = 0, iters = 0;
    std::size_t withFormula = 0, withAcc = 0, withDs = 0;
    double wall = 0, learner = 0, verifier = 0;
    for (const auto& r : results) {
        outcomes[std::string(outcomeName(r.outcome))] = outcomes[std::string(outcomeName(r.outcome))].get<int>() + 1;
        if (r.formula) {
            ++withFormula;
            sizeSum += static_cast<double>(r.stats.explanationSize);
        }
        if (r.stats.estimatedAccuracy) {
            ++withAcc;
            accSum += *r.stats.estimatedAccuracy;
        }
        if (r.stats.datasetAccuracy) {
            ++withDs;
            dsSum += *r.stats.datasetAccuracy;
        }
        inputs += static_cast<double>(r.stats.totalTestInputs);
        iters += static_cast<double>(r.stats.iterations);
        wall += r.stats.wallSeconds;
        learner += r.stats.learnerSeconds;
        verifier += r.stats.verifierSeconds;
    }
    auto mean = [](double sum, std::size_t n) { return n ? json(sum / static_cast<double>(n)) : json(nullptr); };
    json aggregate{{"runs", runs},
                   {"outcomes", outcomes},
                   {"meanSize", mean(sizeSum, withFormula)},
                   {"meanAccuracy", mean(accSum, withAcc)},
                   {"meanTestInputs", mean(inputs, runs)},
                   {"meanIterations", mean(iters, runs)}};
    if (withDs) aggregate["meanDatasetAccuracy"] = mean(dsSum, withDs);
    json timing{{"meanWallSeconds", wall / static_cast<double>(runs)},
                {"learnerShare", wall > 0 ? learner / wall : 0.0},
                {"verifierShare", wall > 0 ? verifier / wall : 0.0}};
    json doc{{"artifact", "pacexp"},
             {"version", version()},
             {"firstSeed", o.seed},
             {"aggregate", aggregate},
             {"timing", timing},
             {"runs", reports}};
    emit(o.out, o.format, doc, printBenchTable);
    return 0;
}

int cmdReplay(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out,
              const std::string& format) {
    json recorded = readJsonFile(path);
    RunResult r;
    RunConfig cfg;
    try {
        cfg = configFromJson(recorded.at("config"));
        r = replay(recorded, seed);
    } catch (const ReplayError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMismatch;
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed report: ") + e.what());
    }
    if (seed) cfg.seed = *seed;
    json fresh = makeReport(cfg, r);
    if (fresh["stats"].is_object() && recorded.contains("stats") && recorded["stats"].contains("datasetAccuracy"))
        fresh["stats"]["datasetAccuracy"] = recorded["stats"]["datasetAccuracy"];
    emit(out, format, fresh, printReportTable);
    if (seed) return exitCodeFor(r.outcome);
    if (withoutTiming(fresh) != withoutTiming(recorded)) {
        std::cerr << "replay differs from the recorded run\n";
        return kExitMismatch;
    }
    std::cerr << "replay matches the recorded run\n";
    return 0;
}

Sample loadSample(const std::string& path) {
    Sample s;
    if (path.empty()) return s;
    json j = readJsonFile(path);
    auto add = [&](const json& e) { s.insert(e.at("x").get<std::vector<double>>(), e.at("label").get<int>() != 0); };
    if (j.is_array()) {
        for (const auto& e : j) add(e);
    } else if (j.contains("trace")) {
        for (const auto& round : j.at("trace"))
            for (const auto& c : round.at("counterexamples")) add(c);
    } else {
        for (const auto& e : j.at("samples")) add(e);
    }
    return s;
}

int cmdExportSygus(const std::string& modelPath, const std::string& grammarPath, const std::string& samplePath,
                   const std::string& out) {
    std::shared_ptr<const Model> model;
    try {
        model = loadModel(modelPath);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    const FeatureNames& names = model->featureNames();
    Grammar g = Grammar::fromJson(readJsonFile(grammarPath), model->arity(), names);
    Sample s = loadSample(samplePath);
    std::string text = exportSygusIf(s, g, model->arity(), names);
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw UsageError("cannot write " + out);
        f << text;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PAC explanations of black-box classifiers"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    JobOptions explainOpts, benchOpts;
    try {
        for (JobOptions* o : {&explainOpts, &benchOpts}) {
            o->epsilon = envDouble("PACEXP_EPSILON", o->epsilon);
            o->delta = envDouble("PACEXP_DELTA", o->delta);
            o->timeout = envDouble("PACEXP_TIMEOUT", o->timeout);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    auto* explainCmd = app.add_subcommand("explain", "synthesize and certify one explanation");
    addJobOptions(explainCmd, explainOpts, true);

    auto* benchCmd = app.add_subcommand("bench", "repeat explain over consecutive seeds and aggregate");
    addJobOptions(benchCmd, benchOpts, true);
    std::size_t runs = 20, jobs = 1;
    benchCmd->add_option("--runs", runs, "number of runs")->capture_default_str();
    benchCmd->add_option("--jobs", jobs, "runs executed concurrently")->capture_default_str();

    auto* replayCmd = app.add_subcommand("replay", "re-run the configuration recorded in a report");
    std::string replayPath, replayOut, replayFormat = "json";
    std::optional<std::uint64_t> replaySeed;
    replayCmd->add_option("report", replayPath, "report JSON written by explain")->required();
    replayCmd->add_option("--seed", replaySeed, "run with a different seed instead of checking identity");
    replayCmd->add_option("--out", replayOut, "report path (default stdout)");
    replayCmd->add_option("--format", replayFormat)->check(CLI::IsMember({"json", "table"}));

    auto* exportCmd = app.add_subcommand("export-sygus", "write a SyGuS-IF problem for a sample and grammar");
    std::string exModel, exGrammar, exSample, exOut;
    exportCmd->add_option("--model", exModel, "model JSON (arity and feature names)")->required();
    exportCmd->add_option("--grammar", exGrammar, "grammar JSON")->required();
    exportCmd->add_option("--sample", exSample, "labeled points: array, {\"samples\":[..]} or a run report");
    exportCmd->add_option("--out", exOut, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*explainCmd) return cmdExplain(explainOpts);
        if (*benchCmd) return cmdBench(benchOpts, runs, jobs);
        if (*replayCmd) return cmdReplay(replayPath, replaySeed, replayOut, replayFormat);
        if (*exportCmd) return cmdExportSygus(exModel, exGrammar, exSample, exOut);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
