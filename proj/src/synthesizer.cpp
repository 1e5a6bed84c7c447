#include "pacexp/synthesizer.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>

namespace pacexp {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Sample

bool Sample::insert(std::vector<double> x, bool label) {
    auto it = index_.find(x);
    if (it != index_.end()) {
        if (it->second != label) throw ContradictorySample("sample point added with both labels");
        return false;
    }
    index_.emplace(x, label);
    entries_.push_back({std::move(x), label});
    return true;
}

void Sample::append(std::vector<double> x, bool label) {
    index_.emplace(x, label);
    entries_.push_back({std::move(x), label});
}

std::size_t Sample::positives() const {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [](const LabeledPoint& p) { return p.label; }));
}

bool Sample::contains(std::span<const double> x, bool label) const {
    auto it = index_.find(std::vector<double>(x.begin(), x.end()));
    if (it == index_.end()) return false;
    return std::any_of(entries_.begin(), entries_.end(), [&](const LabeledPoint& p) {
        return p.label == label && std::equal(p.x.begin(), p.x.end(), x.begin(), x.end());
    });
}

bool Sample::isFunctionConsistent() const {
    std::map<std::vector<double>, bool> seen;
    for (const auto& e : entries_) {
        auto [it, fresh] = seen.emplace(e.x, e.label);
        if (!fresh && it->second != e.label) return false;
    }
    return true;
}

bool isConsistent(const Formula& f, const Sample& s) {
    for (const auto& e : s.entries())
        if (evaluate(f, e.x) != e.label) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Grammar

std::vector<Formula> Grammar::literals() const {
    std::vector<std::pair<std::string, Formula>> lits;
    std::set<std::string> seen;
    auto add = [&](Formula f) {
        std::string t = render(f);
        if (seen.insert(t).second) lits.emplace_back(std::move(t), std::move(f));
    };
    for (const GrammarFeature& gf : features) {
        if (gf.boolean) {
            add(Formula::boolAtom(gf.index));
            add(Formula::negate(Formula::boolAtom(gf.index)));
            continue;
        }
        for (double c : gf.constants)
            for (CmpOp op : gf.ops) add(Formula::atom(gf.index, op, c));
    }
    std::sort(lits.begin(), lits.end(),
              [](const auto& a, const auto& b) { return compareCanonicalText(a.first, b.first) < 0; });
    std::vector<Formula> out;
    out.reserve(lits.size());
    for (auto& [t, f] : lits) out.push_back(std::move(f));
    return out;
}

void Grammar::validate(std::size_t arity) const {
    if (maxClauses < 1) throw std::invalid_argument("grammar maxClauses must be >= 1");
    if (maxLiteralsPerClause < 1) throw std::invalid_argument("grammar maxLiteralsPerClause must be >= 1");
    for (const GrammarFeature& f : features) {
        if (f.index >= arity)
            throw std::invalid_argument("grammar feature index " + std::to_string(f.index) + " >= arity " +
                                        std::to_string(arity));
        if (!f.boolean) {
            if (f.ops.empty()) throw std::invalid_argument("real grammar feature needs at least one op");
            for (double c : f.constants)
                if (!std::isfinite(c)) throw std::invalid_argument("grammar constants must be finite");
        }
    }
}

json Grammar::toJson(const FeatureNames& names) const {
    json feats = json::array();
    for (const GrammarFeature& f : features) {
        json e{{"index", f.index}, {"name", f.name.empty() ? names.name(f.index) : f.name},
               {"kind", f.boolean ? "bool" : "real"}};
        if (!f.boolean) {
            e["constants"] = f.constants;
            json ops = json::array();
            for (CmpOp op : f.ops) ops.push_back(std::string(opSymbol(op)));
            e["ops"] = std::move(ops);
        }
        feats.push_back(std::move(e));
    }
    return {{"features", std::move(feats)},
            {"maxClauses", maxClauses},
            {"maxLiteralsPerClause", maxLiteralsPerClause},
            {"constants", includeConstants},
            {"strategy", strategy == SearchStrategy::Occam ? "occam" : "cover"}};
}

Grammar Grammar::fromJson(const json& j, std::size_t arity, const FeatureNames& names) {
    Grammar g;
    try {
        for (const auto& e : j.at("features")) {
            GrammarFeature f;
            if (e.contains("index")) {
                f.index = e.at("index").get<std::size_t>();
                f.name = e.value("name", names.name(f.index));
            } else {
                f.name = e.at("name").get<std::string>();
                auto idx = names.find(f.name);
                if (!idx) {
                    // fall back to the x<j> spelling
                    Formula v = parseFormula(f.name, arity, names);
                    if (v.kind() != Formula::Kind::BoolAtom)
                        throw std::invalid_argument("cannot resolve grammar feature '" + f.name + "'");
                    idx = v.feature();
                }
                f.index = *idx;
            }
            auto kind = e.value("kind", std::string("real"));
            if (kind == "bool") {
                f.boolean = true;
            } else if (kind == "real") {
                if (e.contains("constants")) f.constants = e.at("constants").get<std::vector<double>>();
                else f.constants.assign(std::begin(kDefaultThresholds), std::end(kDefaultThresholds));
                std::sort(f.constants.begin(), f.constants.end());
                f.constants.erase(std::unique(f.constants.begin(), f.constants.end()), f.constants.end());
                std::vector<std::string> ops = e.value("ops", std::vector<std::string>{"<", ">"});
                for (const auto& s : ops) {
                    auto op = opFromSymbol(s);
                    if (!op || *op == CmpOp::Eq)
                        throw std::invalid_argument("grammar op '" + s + "' not allowed (use <, <=, >, >=)");
                    if (std::find(f.ops.begin(), f.ops.end(), *op) == f.ops.end()) f.ops.push_back(*op);
                }
            } else {
                throw std::invalid_argument("grammar feature kind must be 'real' or 'bool'");
            }
            g.features.push_back(std::move(f));
        }
        g.maxClauses = j.value("maxClauses", g.maxClauses);
        g.maxLiteralsPerClause = j.value("maxLiteralsPerClause", g.maxLiteralsPerClause);
        g.includeConstants = j.value("constants", g.includeConstants);
        auto strategy = j.value("strategy", std::string("occam"));
        if (strategy == "occam") g.strategy = SearchStrategy::Occam;
        else if (strategy == "cover") g.strategy = SearchStrategy::Cover;
        else throw std::invalid_argument("grammar strategy must be 'occam' or 'cover'");
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("grammar schema violation: ") + e.what());
    } catch (const ParseError& e) {
        throw std::invalid_argument(std::string("grammar feature: ") + e.what());
    }
    g.validate(arity);
    return g;
}

Grammar Grammar::booleans(std::span<const std::size_t> features, std::size_t maxClauses,
                          std::size_t maxLiterals, bool includeConstants) {
    Grammar g;
    for (std::size_t j : features) g.features.push_back({j, {}, true, {}, {}});
    g.maxClauses = maxClauses;
    g.maxLiteralsPerClause = maxLiterals;
    g.includeConstants = includeConstants;
    return g;
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace {

Formula clauseFormula(const std::vector<Formula>& lits, std::span<const std::size_t> ids) {
    if (ids.size() == 1) return lits[ids[0]];
    std::vector<Formula> parts;
    for (std::size_t i : ids) parts.push_back(lits[i]);
    return Formula::conjunction(std::move(parts));
}

std::string clauseText(const std::vector<std::string>& litText, std::span<const std::size_t> ids) {
    if (ids.size() == 1) return litText[ids[0]];
    std::string t = "(and";
    for (std::size_t i : ids) t += " " + litText[i];
    return t + ")";
}

// Fixed-width bitset sized at runtime.
class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t n, bool value = false)
        : n_(n), w_((n + 63) / 64, value ? ~std::uint64_t{0} : 0) {
        trim();
    }
    void set(std::size_t i) { w_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1u; }
    bool none() const {
        return std::all_of(w_.begin(), w_.end(), [](std::uint64_t v) { return v == 0; });
    }
    bool full() const {
        for (std::size_t k = 0; k < w_.size(); ++k) {
            std::uint64_t want = (k + 1 < w_.size() || n_ % 64 == 0) ? ~std::uint64_t{0}
                                                                     : (std::uint64_t{1} << (n_ % 64)) - 1;
            if (w_[k] != want) return false;
        }
        return true;
    }
    std::size_t firstUnset() const {
        for (std::size_t k = 0; k < w_.size(); ++k)
            if (~w_[k] != 0) return std::min(n_, k * 64 + std::countr_one(w_[k]));
        return n_;
    }
    Bits& operator&=(const Bits& o) {
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] &= o.w_[k];
        return *this;
    }
    Bits& operator|=(const Bits& o) {
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
        return *this;
    }
    friend Bits operator&(Bits a, const Bits& b) { return a &= b; }
    friend Bits operator|(Bits a, const Bits& b) { return a |= b; }

private:
    void trim() {
        if (n_ % 64 != 0 && !w_.empty()) w_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
    }
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

class DeadlineGuard {
public:
    explicit DeadlineGuard(const SynthesisLimits& l) : limits_(l) {}
    bool expired() {
        if (cancelled_) return true;
        if (!limits_.deadline || (++ticks_ & 1023u) != 0) return false;
        cancelled_ = std::chrono::steady_clock::now() >= *limits_.deadline;
        return cancelled_;
    }
    bool cancelled() const { return cancelled_; }

private:
    const SynthesisLimits& limits_;
    std::uint64_t ticks_ = 0;
    bool cancelled_ = false;
};

struct ClauseRecord {
    std::vector<std::size_t> literals;
    Bits covers;  // positives satisfied
    std::string text;
};

// Literal truth tables over the positive and negative sample points.
struct LiteralTable {
    std::vector<Formula> literals;
    std::vector<std::string> text;
    std::vector<Bits> pos, neg;
    std::vector<const LabeledPoint*> positives, negatives;

    LiteralTable(const Sample& s, const Grammar& g) : literals(g.literals()) {
        for (const auto& e : s.entries()) (e.label ? positives : negatives).push_back(&e);
        for (const Formula& l : literals) {
            text.push_back(render(l));
            Bits p(positives.size()), n(negatives.size());
            for (std::size_t i = 0; i < positives.size(); ++i)
                if (evaluate(l, positives[i]->x)) p.set(i);
            for (std::size_t i = 0; i < negatives.size(); ++i)
                if (evaluate(l, negatives[i]->x)) n.set(i);
            pos.push_back(std::move(p));
            neg.push_back(std::move(n));
        }
    }
};

Formula dnfFormula(const LiteralTable& t, const std::vector<const ClauseRecord*>& clauses) {
    if (clauses.size() == 1) return clauseFormula(t.literals, clauses[0]->literals);
    std::vector<Formula> parts;
    for (const ClauseRecord* c : clauses) parts.push_back(clauseFormula(t.literals, c->literals));
    return Formula::disjunction(std::move(parts));
}

bool clauseLess(const ClauseRecord* a, const ClauseRecord* b) {
    return compareKeys(a->literals.size(), 1, a->text, b->literals.size(), 1, b->text) < 0;
}

// ---------------------------------------------------------------------------
// Occam search

class OccamSearch {
public:
    OccamSearch(const Sample& s, const Grammar& g, const SynthesisLimits& limits)
        : table_(s, g), grammar_(g), guard_(limits) {}

    SynthesisResult run() {
        const std::size_t nPos = table_.positives.size();
        const std::size_t nNeg = table_.negatives.size();
        SynthesisResult result;
        if (grammar_.includeConstants) {
            if (nPos == 0) return found(Formula::constFalse());
            if (nNeg == 0) return found(Formula::constTrue());
        }
        collectClauses();
        result.candidateClauses = clauses_.size();
        if (guard_.cancelled()) return cancelled();

        if (nPos == 0) {
            // Only single clauses are minimal; pick the smallest one.
            const ClauseRecord* best = nullptr;
            for (const auto& c : clauses_)
                if (!best || clauseLess(&c, best)) best = &c;
            if (!best) return none();
            return found(dnfFormula(table_, {best}));
        }

        coverLists_.assign(nPos, {});
        for (std::size_t ci = 0; ci < clauses_.size(); ++ci)
            for (std::size_t p = 0; p < nPos; ++p)
                if (clauses_[ci].covers.test(p)) coverLists_[p].push_back(ci);
        for (auto& list : coverLists_)
            std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
                return clauseLess(&clauses_[a], &clauses_[b]);
            });

        std::size_t maxLits = std::min(grammar_.maxLiteralsPerClause, table_.literals.size());
        std::size_t maxSize = grammar_.maxClauses * maxLits;
        for (target_ = 1; target_ <= maxSize; ++target_) {
            std::vector<std::size_t> chosen;
            cover(chosen, Bits(nPos), 0);
            if (guard_.cancelled()) return cancelled();
            if (!best_.empty()) {
                std::vector<const ClauseRecord*> cs;
                for (std::size_t ci : best_) cs.push_back(&clauses_[ci]);
                std::sort(cs.begin(), cs.end(), clauseLess);
                return found(dnfFormula(table_, cs));
            }
        }
        return none();
    }

private:
    SynthesisResult found(Formula f) {
        return {SynthesisResult::Status::Found, std::move(f), clauses_.size()};
    }
    SynthesisResult none() { return {SynthesisResult::Status::NoneExists, std::nullopt, clauses_.size()}; }
    SynthesisResult cancelled() { return {SynthesisResult::Status::Cancelled, std::nullopt, clauses_.size()}; }

    // Enumerates negative-free clauses none of whose proper sub-clauses is
    // negative-free (any other clause can be replaced by a smaller one). With
    // positives present, clauses covering none of them are dropped.
    void collectClauses() {
        const std::size_t nLit = table_.literals.size();
        const std::size_t maxLits = grammar_.maxLiteralsPerClause;
        const bool needPos = !table_.positives.empty();
        std::vector<std::size_t> lits;
        auto dfs = [&](auto&& self, const Bits& pos, const Bits& neg) -> void {
            if (guard_.expired()) return;
            if (needPos && pos.none()) return;
            if (neg.none()) {
                if (isMinimal(lits)) clauses_.push_back({lits, pos, clauseText(table_.text, lits)});
                return;
            }
            if (lits.size() >= maxLits) return;
            for (std::size_t l = lits.back() + 1; l < nLit; ++l) {
                lits.push_back(l);
                self(self, pos & table_.pos[l], neg & table_.neg[l]);
                lits.pop_back();
            }
        };
        for (std::size_t l = 0; l < nLit; ++l) {
            lits.assign(1, l);
            dfs(dfs, table_.pos[l], table_.neg[l]);
        }
    }

    bool isMinimal(const std::vector<std::size_t>& lits) const {
        if (lits.size() < 2) return true;
        for (std::size_t skip = 0; skip < lits.size(); ++skip) {
            Bits neg(table_.negatives.size(), true);
            for (std::size_t k = 0; k < lits.size(); ++k)
                if (k != skip) neg &= table_.neg[lits[k]];
            if (neg.none()) return false;
        }
        return true;
    }

    // Depth-first cover of the positives with total size exactly target_.
    // The next clause always covers the first uncovered positive, which
    // reaches every non-redundant cover.
    void cover(std::vector<std::size_t>& chosen, const Bits& covered, std::size_t used) {
        if (guard_.expired()) return;
        std::size_t p = covered.firstUnset();
        for (std::size_t ci : coverLists_[p]) {
            const ClauseRecord& c = clauses_[ci];
            std::size_t sz = used + c.literals.size();
            if (sz > target_) break;
            Bits next = covered | c.covers;
            chosen.push_back(ci);
            if (next.full()) {
                if (sz == target_) consider(chosen);
            } else if (chosen.size() < grammar_.maxClauses && sz < target_) {
                cover(chosen, next, sz);
            }
            chosen.pop_back();
            if (guard_.cancelled()) return;
        }
    }

    void consider(const std::vector<std::size_t>& chosen) {
        // Every clause must cover a positive the others miss.
        for (std::size_t i = 0; i < chosen.size() && chosen.size() > 1; ++i) {
            Bits others(table_.positives.size());
            for (std::size_t k = 0; k < chosen.size(); ++k)
                if (k != i) others |= clauses_[chosen[k]].covers;
            if (others.full()) return;
        }
        std::vector<const ClauseRecord*> cs;
        for (std::size_t ci : chosen) cs.push_back(&clauses_[ci]);
        std::sort(cs.begin(), cs.end(), clauseLess);
        std::string text;
        if (cs.size() == 1) {
            text = cs[0]->text;
        } else {
            text = "(or";
            for (const ClauseRecord* c : cs) text += " " + c->text;
            text += ")";
        }
        if (best_.empty() || compareKeys(cs.size(), cs.size(), text, best_.size(), best_.size(), bestText_) < 0) {
            // sizes are equal within one target_, so only disjuncts and text matter
            best_ = chosen;
            bestText_ = std::move(text);
        }
    }

    LiteralTable table_;
    const Grammar& grammar_;
    DeadlineGuard guard_;
    std::vector<ClauseRecord> clauses_;
    std::vector<std::vector<std::size_t>> coverLists_;
    std::size_t target_ = 0;
    std::vector<std::size_t> best_;
    std::string bestText_;
};

// ---------------------------------------------------------------------------
// Greedy cover

SynthesisResult greedyCover(const Sample& s, const Grammar& g, const SynthesisLimits& limits) {
    LiteralTable t(s, g);
    DeadlineGuard guard(limits);
    const std::size_t nPos = t.positives.size();
    const std::size_t nNeg = t.negatives.size();
    auto done = [](SynthesisResult::Status st, std::optional<Formula> f = std::nullopt) {
        return SynthesisResult{st, std::move(f), 0};
    };
    if (g.includeConstants) {
        if (nPos == 0) return done(SynthesisResult::Status::Found, Formula::constFalse());
        if (nNeg == 0) return done(SynthesisResult::Status::Found, Formula::constTrue());
    }
    if (nPos == 0) {
        for (std::size_t l = 0; l < t.literals.size(); ++l)
            if (t.neg[l].none()) return done(SynthesisResult::Status::Found, t.literals[l]);
        return done(SynthesisResult::Status::NoneExists);
    }

    std::vector<ClauseRecord> clauses;
    Bits covered(nPos);
    for (std::size_t p = 0; p < nPos; ++p) {
        if (covered.test(p)) continue;
        if (guard.expired()) return done(SynthesisResult::Status::Cancelled);
        // Most specific clause: every literal true at p.
        std::vector<std::size_t> lits;
        for (std::size_t l = 0; l < t.literals.size(); ++l)
            if (t.pos[l].test(p)) lits.push_back(l);
        auto negOf = [&](const std::vector<std::size_t>& ls) {
            Bits n(nNeg, true);
            for (std::size_t l : ls) n &= t.neg[l];
            return n;
        };
        if (lits.empty() || !negOf(lits).none()) return done(SynthesisResult::Status::NoneExists);
        // Drop literals while the clause stays negative-free.
        for (std::size_t k = 0; k < lits.size() && lits.size() > 1;) {
            std::vector<std::size_t> trial = lits;
            trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
            if (negOf(trial).none()) lits = std::move(trial);
            else ++k;
        }
        if (lits.size() > g.maxLiteralsPerClause) return done(SynthesisResult::Status::NoneExists);
        Bits cov(nPos, true);
        for (std::size_t l : lits) cov &= t.pos[l];
        covered |= cov;
        clauses.push_back({lits, cov, clauseText(t.text, lits)});
        if (clauses.size() > g.maxClauses) return done(SynthesisResult::Status::NoneExists);
    }
    std::vector<const ClauseRecord*> cs;
    for (const auto& c : clauses) cs.push_back(&c);
    std::sort(cs.begin(), cs.end(), clauseLess);
    cs.erase(std::unique(cs.begin(), cs.end(), [](auto* a, auto* b) { return a->text == b->text; }), cs.end());
    SynthesisResult r = done(SynthesisResult::Status::Found, dnfFormula(t, cs));
    r.candidateClauses = clauses.size();
    return r;
}

}  // namespace

SynthesisResult synthesize(const Sample& s, const Grammar& g, const SynthesisLimits& limits) {
    if (!s.isFunctionConsistent()) throw ContradictorySample("sample contains a point with both labels");
    if (g.strategy == SearchStrategy::Cover) return greedyCover(s, g, limits);
    return OccamSearch(s, g, limits).run();
}

// ---------------------------------------------------------------------------
// Enumeration

FormulaEnumerator::FormulaEnumerator(const Grammar& g)
    : literals_(g.literals()), maxClauses_(g.maxClauses), constants_(g.includeConstants) {
    for (const Formula& l : literals_) literalText_.push_back(render(l));
    std::size_t maxLits = std::min(g.maxLiteralsPerClause, literals_.size());
    bySize_.resize(maxLits + 1);
    std::vector<std::size_t> ids;
    auto gen = [&](auto&& self, std::size_t start) -> void {
        if (!ids.empty()) bySize_[ids.size()].push_back({ids, clauseText(literalText_, ids)});
        if (ids.size() == maxLits) return;
        for (std::size_t l = start; l < literals_.size(); ++l) {
            ids.push_back(l);
            self(self, l + 1);
            ids.pop_back();
        }
    };
    gen(gen, 0);
    for (auto& group : bySize_)
        std::sort(group.begin(), group.end(), [](const Clause& a, const Clause& b) {
            return compareCanonicalText(a.text, b.text) < 0;
        });
    maxSize_ = std::max<std::size_t>(1, maxClauses_ * maxLits);
}

void FormulaEnumerator::collect(std::size_t k, std::size_t remaining, std::size_t minSize, std::size_t minIndex,
                                std::vector<const Clause*>& chosen) {
    if (k == 0) {
        if (remaining != 0) return;
        std::vector<Formula> parts;
        std::string text = chosen.size() == 1 ? chosen[0]->text : "(or";
        for (const Clause* c : chosen) {
            parts.push_back(clauseFormula(literals_, c->literals));
            if (chosen.size() > 1) text += " " + c->text;
        }
        if (chosen.size() > 1) text += ")";
        Formula f = parts.size() == 1 ? parts[0] : Formula::disjunction(std::move(parts));
        bucket_.emplace_back(std::move(text), std::move(f));
        return;
    }
    for (std::size_t sz = minSize; sz < bySize_.size() && sz * k <= remaining; ++sz) {
        const auto& group = bySize_[sz];
        for (std::size_t i = (sz == minSize ? minIndex : 0); i < group.size(); ++i) {
            chosen.push_back(&group[i]);
            collect(k - 1, remaining - sz, sz, i + 1, chosen);
            chosen.pop_back();
        }
    }
}

void FormulaEnumerator::fillBucket() {
    bucket_.clear();
    cursor_ = 0;
    if (size_ == 1 && disjuncts_ == 1 && constants_) {
        bucket_.emplace_back("false", Formula::constFalse());
        bucket_.emplace_back("true", Formula::constTrue());
    }
    std::vector<const Clause*> chosen;
    collect(disjuncts_, size_, 1, 0, chosen);
    std::sort(bucket_.begin(), bucket_.end(),
              [](const auto& a, const auto& b) { return compareCanonicalText(a.first, b.first) < 0; });
}

std::optional<Formula> FormulaEnumerator::next() {
    while (cursor_ >= bucket_.size()) {
        if (size_ > maxSize_) return std::nullopt;
        ++disjuncts_;
        if (disjuncts_ > std::min(size_, maxClauses_)) {
            ++size_;
            disjuncts_ = 1;
            if (size_ > maxSize_) return std::nullopt;
        }
        fillBucket();
    }
    return bucket_[cursor_++].second;
}

// ---------------------------------------------------------------------------
// SyGuS-IF export

namespace {

std::string smtNumber(double v) {
    bool neg = v < 0;
    double a = std::abs(v);
    char buf[128];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, a, std::chars_format::fixed);
    std::string s(buf, p);
    return neg ? "(- " + s + ")" : s;
}

bool isSimpleSymbol(const std::string& s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    static const std::string extra = "~!@$%^&*_-+=<>.?/";
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && extra.find(c) == std::string::npos) return false;
    static const std::set<std::string> reserved = {"and", "or", "not", "true", "false", "f", "Start", "Lit",
                                                   "Real", "Bool", "ite", "let"};
    return !reserved.contains(s);
}

std::string smtLiteral(const Formula& l, const std::vector<std::string>& vars) {
    switch (l.kind()) {
        case Formula::Kind::BoolAtom: return "(= " + vars[l.feature()] + " 1)";
        case Formula::Kind::Atom:
            return "(" + std::string(opSymbol(l.op())) + " " + vars[l.feature()] + " " + smtNumber(l.constant()) + ")";
        case Formula::Kind::Not: return "(not " + smtLiteral(l.children()[0], vars) + ")";
        default: return render(l);
    }
}

}  // namespace

std::string exportSygusIf(const Sample& s, const Grammar& g, std::size_t arity, const FeatureNames& names) {
    std::vector<std::string> vars;
    std::set<std::string> used;
    for (std::size_t j = 0; j < arity; ++j) {
        std::string n = names.name(j);
        if (!isSimpleSymbol(n) || used.contains(n)) n = "x" + std::to_string(j);
        used.insert(n);
        vars.push_back(n);
    }
    std::vector<Formula> lits = g.literals();
    std::size_t maxLits = std::min(g.maxLiteralsPerClause, lits.size());

    std::ostringstream os;
    os << "(set-logic LRA)\n\n";
    os << "(synth-fun f (";
    for (std::size_t j = 0; j < arity; ++j) os << (j ? " " : "") << "(" << vars[j] << " Real)";
    os << ") Bool\n";

    // Nonterminals: Start/D<i> chain the disjuncts, C<i> chain the literals.
    std::vector<std::pair<std::string, std::vector<std::string>>> rules;
    std::vector<std::string> start;
    if (g.includeConstants) {
        start.push_back("false");
        start.push_back("true");
    }
    if (!lits.empty()) {
        start.push_back("C1");
        if (g.maxClauses > 1) start.push_back("(or C1 D2)");
    }
    if (start.empty()) start.push_back("false");
    rules.emplace_back("Start", start);
    if (!lits.empty()) {
        for (std::size_t i = 2; i <= g.maxClauses; ++i) {
            std::vector<std::string> alts{"C1"};
            if (i < g.maxClauses) alts.push_back("(or C1 D" + std::to_string(i + 1) + ")");
            rules.emplace_back("D" + std::to_string(i), alts);
        }
        for (std::size_t i = 1; i <= maxLits; ++i) {
            std::vector<std::string> alts{"Lit"};
            if (i < maxLits) alts.push_back("(and Lit C" + std::to_string(i + 1) + ")");
            rules.emplace_back("C" + std::to_string(i), alts);
        }
        std::vector<std::string> litAlts;
        for (const Formula& l : lits) litAlts.push_back(smtLiteral(l, vars));
        rules.emplace_back("Lit", litAlts);
    }
    os << "  (";
    for (std::size_t r = 0; r < rules.size(); ++r) os << (r ? " " : "") << "(" << rules[r].first << " Bool)";
    os << ")\n  (";
    for (std::size_t r = 0; r < rules.size(); ++r) {
        os << (r ? "\n   " : "") << "(" << rules[r].first << " Bool (";
        for (std::size_t a = 0; a < rules[r].second.size(); ++a) os << (a ? " " : "") << rules[r].second[a];
        os << "))";
    }
    os << "))\n\n";

    for (const auto& e : s.entries()) {
        os << "(constraint (= (f";
        for (double v : e.x) os << " " << smtNumber(v);
        os << ") " << (e.label ? "true" : "false") << "))\n";
    }
    os << "\n(check-synth)\n";
    return os.str();
}

}  // namespace pacexp
