#include "pacexp/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace pacexp {

std::size_t testSuiteSize(double epsilon, double delta, std::size_t iteration) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (iteration < 1) throw std::invalid_argument("iteration must be >= 1");
    double raw = (static_cast<double>(iteration) * std::log(2.0) - std::log(delta)) / epsilon;
    return static_cast<std::size_t>(std::ceil(raw));
}

std::optional<bool> violationLabel(std::span<const double> x, const Formula& phi, const Query& query,
                                   std::size_t targetClass, const Model& model) {
    if (!query.contains(x)) return std::nullopt;
    bool holds = evaluate(phi, x);
    bool isTarget = model.classify(x) == targetClass;
    if (holds == isTarget) return std::nullopt;
    // phi holds but the model disagrees: future conjectures must falsify x.
    return !holds;
}

VerifierOutcome verify(const Formula& phi, const Model& model, const Query& query, std::size_t targetClass,
                       const Distribution& dist, const VerifyParams& params, Rng& rng) {
    if (params.batchLimit < 1) throw std::invalid_argument("batchLimit must be >= 1");
    VerifierOutcome out;
    out.suiteSize = testSuiteSize(params.epsilon, params.delta, params.iteration);

    std::vector<std::vector<double>> suite(out.suiteSize);
    for (auto& x : suite) dist.sampleInto(rng, x);

    if (params.threads <= 1) {
        for (const auto& x : suite) {
            ++out.testedCount;
            if (auto label = violationLabel(x, phi, query, targetClass, model)) {
                out.counterexamples.push_back({x, *label});
                if (out.counterexamples.size() >= params.batchLimit) break;
            }
        }
    } else {
        // 0 = no violation, 1 = label false, 2 = label true
        std::vector<unsigned char> verdict(suite.size(), 0);
        std::size_t workers = std::min(params.threads, suite.size());
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < suite.size(); i += workers)
                    if (auto label = violationLabel(suite[i], phi, query, targetClass, model))
                        verdict[i] = *label ? 2 : 1;
            });
        }
        pool.clear();
        for (std::size_t i = 0; i < suite.size(); ++i) {
            ++out.testedCount;
            if (verdict[i]) {
                out.counterexamples.push_back({suite[i], verdict[i] == 2});
                if (out.counterexamples.size() >= params.batchLimit) break;
            }
        }
    }
    out.passed = out.counterexamples.empty();
    return out;
}

double estimateTrueError(const Formula& phi, const Model& model, const Query& query, std::size_t targetClass,
                         const Distribution& dist, std::size_t samples, Rng& rng) {
    if (samples < 1) throw std::invalid_argument("estimateTrueError needs at least one sample");
    std::size_t bad = 0;
    std::vector<double> x;
    for (std::size_t i = 0; i < samples; ++i) {
        dist.sampleInto(rng, x);
        if (violationLabel(x, phi, query, targetClass, model)) ++bad;
    }
    return static_cast<double>(bad) / static_cast<double>(samples);
}

std::optional<double> estimateAccuracy(const Formula& phi, const Model& model, const Query& query,
                                       std::size_t targetClass, const Distribution& dist, std::size_t samples,
                                       Rng& rng) {
    std::size_t inside = 0, agree = 0;
    std::vector<double> x;
    for (std::size_t i = 0; i < samples; ++i) {
        dist.sampleInto(rng, x);
        if (!query.contains(x)) continue;
        ++inside;
        if (evaluate(phi, x) == (model.classify(x) == targetClass)) ++agree;
    }
    if (inside == 0) return std::nullopt;
    return static_cast<double>(agree) / static_cast<double>(inside);
}

}  // namespace pacexp
