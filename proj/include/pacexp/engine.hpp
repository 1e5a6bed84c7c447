#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pacexp/distribution.hpp"
#include "pacexp/formula.hpp"
#include "pacexp/model.hpp"
#include "pacexp/query.hpp"
#include "pacexp/synthesizer.hpp"
#include "pacexp/verifier.hpp"

namespace pacexp {

std::string_view version();

struct RunConfig {
    std::shared_ptr<const Model> model;
    Query query = Query::everything();
    std::size_t targetClass = 0;
    double epsilon = 0.05;
    double delta = 0.05;
    Grammar grammar;
    /// Defaults to `defaultDistribution(model arity, grammar)`.
    std::optional<Distribution> distribution;
    std::uint64_t seed = 0;
    double timeoutSeconds = 300.0;
    std::size_t maxIterations = 0;  // verifier rounds; 0 = no cap
    std::size_t counterexampleBatch = 1;
    std::size_t threads = 1;
    std::size_t accuracySamples = 10000;
    FeatureNames featureNames;

    /// Throws std::invalid_argument on out-of-range parameters or arity
    /// mismatches between model, query, grammar and distribution.
    void validate() const;
    const Distribution& effectiveDistribution() const;

private:
    mutable std::optional<Distribution> resolved_;
};

/// Fair coins for boolean grammar features, U[0,1] for everything else.
Distribution defaultDistribution(std::size_t arity, const Grammar& g);

enum class Outcome { Explanation, NoExplanation, BudgetTimeout, BudgetIterations };

std::string_view outcomeName(Outcome o);

struct RoundTrace {
    std::size_t iteration = 0;
    Formula conjecture = Formula::constFalse();
    std::size_t suiteSize = 0;
    std::size_t tested = 0;
    std::vector<Counterexample> counterexamples;
};

struct RunStats {
    std::size_t iterations = 0;        // verifier rounds
    std::size_t totalTestInputs = 0;
    std::size_t counterexampleCount = 0;  // final sample size
    double learnerSeconds = 0.0;
    double verifierSeconds = 0.0;
    double wallSeconds = 0.0;
    std::size_t explanationSize = 0;          // of RunResult::formula, 0 when absent
    std::optional<double> estimatedAccuracy;  // query-restricted, Monte Carlo
    // Same measurements for the last conjecture, whatever the outcome. For
    // NoExplanation this is the last formula tried before the class ran dry.
    std::size_t lastConjectureSize = 0;
    std::optional<double> lastConjectureAccuracy;
    std::optional<double> datasetAccuracy;    // filled in by callers holding a dataset
};

struct RunResult {
    Outcome outcome = Outcome::NoExplanation;
    /// The certified explanation, or on Budget the last conjecture.
    std::optional<Formula> formula;
    /// True only for Outcome::Explanation.
    bool certified = false;
    RunStats stats;
    std::vector<Formula> conjectures;
    std::vector<RoundTrace> rounds;
    std::vector<std::string> warnings;
};

/// The conjecture/verify loop.
RunResult explain(const RunConfig& cfg);

class ReplayError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

nlohmann::json configToJson(const RunConfig& cfg);
/// Model, grammar and distribution may be inline objects or file paths
/// (resolved against `baseDir`).
RunConfig configFromJson(const nlohmann::json& j, const std::filesystem::path& baseDir = {});

/// Everything except the `timing` block is a function of the config and seed.
nlohmann::json makeReport(const RunConfig& cfg, const RunResult& result);
nlohmann::json withoutTiming(nlohmann::json report);

/// Re-executes the config recorded in a report. Throws ReplayError when the
/// report was written by another version or RNG.
RunResult replay(const nlohmann::json& report, std::optional<std::uint64_t> seedOverride = std::nullopt);

}  // namespace pacexp
