#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pacexp {

/// Comparison operator of a single-feature atom `(op x_j c)`.
enum class CmpOp { Lt, Le, Gt, Ge, Eq };

std::string_view opSymbol(CmpOp op);
std::optional<CmpOp> opFromSymbol(std::string_view symbol);

/// Maps feature names to 0-based indices. Empty tables are allowed; the
/// `x<j>` spelling always works regardless of the table.
class FeatureNames {
public:
    FeatureNames() = default;
    explicit FeatureNames(std::vector<std::string> names);

    std::optional<std::size_t> find(std::string_view name) const;
    /// Name of feature `index`, or `x<index>` when the table has no entry.
    std::string name(std::size_t index) const;
    std::size_t size() const { return names_.size(); }
    bool empty() const { return names_.empty(); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Immutable quantifier-free formula over real-valued features. Booleans are
/// encoded as reals in {0,1}; `BoolAtom(j)` holds iff `x_j == 1`.
///
/// Nodes are shared and never mutated after construction, so copies are cheap
/// and a Formula may be evaluated from several threads at once.
class Formula {
public:
    enum class Kind { True, False, Atom, BoolAtom, Not, And, Or };

    static Formula constTrue();
    static Formula constFalse();
    static Formula atom(std::size_t feature, CmpOp op, double constant);
    static Formula boolAtom(std::size_t feature);
    static Formula negate(Formula child);
    /// Throws std::invalid_argument when fewer than two children are given.
    static Formula conjunction(std::vector<Formula> children);
    static Formula disjunction(std::vector<Formula> children);

    Kind kind() const;
    /// Valid for Atom and BoolAtom.
    std::size_t feature() const;
    /// Valid for Atom.
    CmpOp op() const;
    double constant() const;
    std::span<const Formula> children() const;

    bool isLiteral() const;

    /// Structural equality (child order matters).
    friend bool operator==(const Formula& a, const Formula& b);

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Parses the s-expression syntax
/// `true | false | var | (not f) | (and f f+) | (or f f+) | (op var number)`.
/// Variables are `x<digits>` or names from `names`. Every feature index must
/// be below `arity`.
Formula parseFormula(std::string_view text, std::size_t arity,
                     const FeatureNames& names = {});

bool evaluate(const Formula& f, std::span<const double> x);

/// Number of literal occurrences; constants count 1.
std::size_t formulaSize(const Formula& f);

/// Children of a top-level Or, otherwise 1.
std::size_t disjunctCount(const Formula& f);

/// Largest feature index referenced, or nullopt for constant formulas.
std::optional<std::size_t> maxFeature(const Formula& f);

/// Canonical s-expression: `x<j>` variables, children of And/Or sorted by
/// `compare`, shortest round-trip number spelling.
std::string render(const Formula& f);

/// Same layout as `render`, with feature names substituted for display.
std::string render(const Formula& f, const FeatureNames& names);

/// Character-wise order used for the string key of `compare`: identical to
/// byte order except that space and parentheses sort after every other
/// character, so bare variables precede compound terms.
std::strong_ordering compareCanonicalText(std::string_view a, std::string_view b);

/// Total order on canonical forms: size, then number of disjuncts, then the
/// canonical rendering under `compareCanonicalText`.
std::strong_ordering compare(const Formula& a, const Formula& b);

/// Same order, when the keys are already known.
std::strong_ordering compareKeys(std::size_t sizeA, std::size_t disjunctsA, std::string_view textA,
                                 std::size_t sizeB, std::size_t disjunctsB, std::string_view textB);

bool equivalentOnGrid(const Formula& a, const Formula& b,
                      std::span<const std::vector<double>> grid);

/// All 2^|features| points of {0,1}^features embedded in R^arity, with the
/// remaining coordinates set to `fill`.
std::vector<std::vector<double>> booleanGrid(std::size_t arity,
                                             std::span<const std::size_t> features,
                                             double fill = 0.0);

/// Shortest decimal string that parses back to exactly `value`.
std::string formatNumber(double value);

}  // namespace pacexp
