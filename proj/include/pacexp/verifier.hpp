#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pacexp/distribution.hpp"
#include "pacexp/formula.hpp"
#include "pacexp/model.hpp"
#include "pacexp/query.hpp"

namespace pacexp {

/// ceil((i ln 2 - ln delta) / epsilon). Throws std::invalid_argument unless
/// epsilon, delta in (0,1) and i >= 1.
std::size_t testSuiteSize(double epsilon, double delta, std::size_t iteration);

/// Label every future conjecture must give x, or nullopt when x does not
/// witness a violation (outside the query, or phi agrees with the model).
std::optional<bool> violationLabel(std::span<const double> x, const Formula& phi, const Query& query,
                                   std::size_t targetClass, const Model& model);

struct Counterexample {
    std::vector<double> x;
    bool label = false;
};

struct VerifierOutcome {
    bool passed = false;
    std::size_t suiteSize = 0;     // |T_i|, always fully drawn
    std::size_t testedCount = 0;   // points checked before stopping
    std::vector<Counterexample> counterexamples;  // draw order, empty iff passed
};

struct VerifyParams {
    double epsilon = 0.05;
    double delta = 0.05;
    std::size_t iteration = 1;
    std::size_t batchLimit = 1;
    std::size_t threads = 1;
};

/// Draws the whole test suite from `rng` first, then checks points in draw
/// order and stops after `batchLimit` violations. With threads > 1 the checks
/// run in parallel; the outcome is identical to the serial one.
VerifierOutcome verify(const Formula& phi, const Model& model, const Query& query, std::size_t targetClass,
                       const Distribution& dist, const VerifyParams& params, Rng& rng);

/// Monte Carlo estimate of P_D[x in V_M(phi, psi, c)].
double estimateTrueError(const Formula& phi, const Model& model, const Query& query, std::size_t targetClass,
                         const Distribution& dist, std::size_t samples, Rng& rng);

/// Agreement rate between phi and the model over draws that land in the
/// query; nullopt when none do.
std::optional<double> estimateAccuracy(const Formula& phi, const Model& model, const Query& query,
                                       std::size_t targetClass, const Distribution& dist, std::size_t samples,
                                       Rng& rng);

}  // namespace pacexp
