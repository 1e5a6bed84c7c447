#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pacexp/formula.hpp"

namespace pacexp {

struct LabeledPoint {
    std::vector<double> x;
    bool label = false;
};

class ContradictorySample : public std::logic_error {
    using std::logic_error::logic_error;
};

/// Labeled points collected from counterexamples, in insertion order.
class Sample {
public:
    /// Adds (x, label). Returns false when the identical entry is already
    /// present; throws ContradictorySample when x is present with the other
    /// label.
    bool insert(std::vector<double> x, bool label);
    /// Appends without any check (test fixtures for the contradiction path).
    void append(std::vector<double> x, bool label);

    const std::vector<LabeledPoint>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::size_t positives() const;
    bool contains(std::span<const double> x, bool label) const;
    /// No x occurs with both labels.
    bool isFunctionConsistent() const;

private:
    std::vector<LabeledPoint> entries_;
    std::map<std::vector<double>, bool> index_;
};

/// x |= f for every positive entry and x |/= f for every negative one.
bool isConsistent(const Formula& f, const Sample& s);

inline constexpr double kDefaultThresholds[] = {0.25, 0.5, 0.75};

struct GrammarFeature {
    std::size_t index = 0;
    std::string name;
    bool boolean = false;
    std::vector<double> constants;  // sorted, real features only
    std::vector<CmpOp> ops;         // real features only
};

enum class SearchStrategy {
    /// Exhaustive search for the first consistent formula in `compare` order.
    Occam,
    /// Greedy set cover: one generalized clause per uncovered positive. Fast
    /// but not minimal; meant for grammars too large to enumerate.
    Cover,
};

/// Finite DNF grammar: per-feature predicates plus shape bounds.
struct Grammar {
    std::vector<GrammarFeature> features;
    std::size_t maxClauses = 2;
    std::size_t maxLiteralsPerClause = 4;
    bool includeConstants = true;
    SearchStrategy strategy = SearchStrategy::Occam;

    /// Distinct literals, ascending in `compare` order.
    std::vector<Formula> literals() const;
    void validate(std::size_t arity) const;

    nlohmann::json toJson(const FeatureNames& names = {}) const;
    /// Feature entries resolve through `index`, else through `names`, else
    /// through the `x<j>` spelling.
    static Grammar fromJson(const nlohmann::json& j, std::size_t arity, const FeatureNames& names = {});

    /// Boolean literals over `features`.
    static Grammar booleans(std::span<const std::size_t> features, std::size_t maxClauses,
                            std::size_t maxLiterals, bool includeConstants = true);
};

/// Yields every formula of the grammar's class once, strictly ascending in
/// `compare` order. Buckets of equal (size, disjuncts) are materialized one
/// at a time, so this is meant for small grammars.
class FormulaEnumerator {
public:
    explicit FormulaEnumerator(const Grammar& g);
    std::optional<Formula> next();

private:
    struct Clause {
        std::vector<std::size_t> literals;
        std::string text;
    };
    void fillBucket();
    void collect(std::size_t k, std::size_t remaining, std::size_t minSize, std::size_t minIndex,
                 std::vector<const Clause*>& chosen);

    std::vector<Formula> literals_;
    std::vector<std::string> literalText_;
    std::vector<std::vector<Clause>> bySize_;  // bySize_[s] = clauses with s literals
    std::size_t maxClauses_;
    bool constants_;
    std::size_t size_ = 1;
    std::size_t disjuncts_ = 0;
    std::size_t maxSize_;
    std::vector<std::pair<std::string, Formula>> bucket_;
    std::size_t cursor_ = 0;
};

struct SynthesisResult {
    enum class Status { Found, NoneExists, Cancelled };
    Status status = Status::NoneExists;
    std::optional<Formula> formula;
    std::size_t candidateClauses = 0;  // clauses surviving pruning

    bool found() const { return status == Status::Found; }
};

struct SynthesisLimits {
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

/// Occam strategy: the compare-first formula of the grammar consistent with
/// `s`, or NoneExists when the finite class has none. Throws
/// ContradictorySample when `s` is not function-consistent.
SynthesisResult synthesize(const Sample& s, const Grammar& g, const SynthesisLimits& limits = {});

/// SyGuS-IF v2 problem: LRA logic, one synth-fun over all `arity` features,
/// a grammar block encoding the DNF bounds, one constraint per entry.
std::string exportSygusIf(const Sample& s, const Grammar& g, std::size_t arity,
                          const FeatureNames& names = {});

}  // namespace pacexp
