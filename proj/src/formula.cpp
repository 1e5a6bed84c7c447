#include "pacexp/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace pacexp {

struct Formula::Node {
    Kind kind;
    std::size_t feature = 0;
    CmpOp op = CmpOp::Eq;
    double constant = 0.0;
    std::vector<Formula> children;

    explicit Node(Kind k, std::size_t f = 0, CmpOp o = CmpOp::Eq, double c = 0.0)
        : kind(k), feature(f), op(o), constant(c) {}
};

// ---------------------------------------------------------------------------
// Operators and names

std::string_view opSymbol(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
        case CmpOp::Eq: return "=";
    }
    return "?";
}

std::optional<CmpOp> opFromSymbol(std::string_view s) {
    if (s == "<") return CmpOp::Lt;
    if (s == "<=") return CmpOp::Le;
    if (s == ">") return CmpOp::Gt;
    if (s == ">=") return CmpOp::Ge;
    if (s == "=") return CmpOp::Eq;
    return std::nullopt;
}

FeatureNames::FeatureNames(std::vector<std::string> names) : names_(std::move(names)) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!index_.emplace(names_[i], i).second)
            throw std::invalid_argument("duplicate feature name '" + names_[i] + "'");
    }
}

std::optional<std::size_t> FeatureNames::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::string FeatureNames::name(std::size_t index) const {
    if (index < names_.size()) return names_[index];
    return "x" + std::to_string(index);
}

// ---------------------------------------------------------------------------
// Construction

Formula Formula::constTrue() {
    static const Formula t{std::make_shared<const Node>(Node(Kind::True))};
    return t;
}

Formula Formula::constFalse() {
    static const Formula f{std::make_shared<const Node>(Node(Kind::False))};
    return f;
}

Formula Formula::atom(std::size_t feature, CmpOp op, double constant) {
    if (!std::isfinite(constant)) throw std::invalid_argument("atom constant must be finite");
    return Formula{std::make_shared<const Node>(Node(Kind::Atom, feature, op, constant))};
}

Formula Formula::boolAtom(std::size_t feature) {
    return Formula{std::make_shared<const Node>(Node(Kind::BoolAtom, feature))};
}

Formula Formula::negate(Formula child) {
    Node n(Kind::Not);
    n.children.push_back(std::move(child));
    return Formula{std::make_shared<const Node>(std::move(n))};
}

Formula Formula::conjunction(std::vector<Formula> children) {
    if (children.size() < 2) throw std::invalid_argument("'and' needs at least two children");
    Node n(Kind::And);
    n.children = std::move(children);
    return Formula{std::make_shared<const Node>(std::move(n))};
}

Formula Formula::disjunction(std::vector<Formula> children) {
    if (children.size() < 2) throw std::invalid_argument("'or' needs at least two children");
    Node n(Kind::Or);
    n.children = std::move(children);
    return Formula{std::make_shared<const Node>(std::move(n))};
}

Formula::Kind Formula::kind() const { return node_->kind; }
std::size_t Formula::feature() const { return node_->feature; }
CmpOp Formula::op() const { return node_->op; }
double Formula::constant() const { return node_->constant; }
std::span<const Formula> Formula::children() const { return node_->children; }

bool Formula::isLiteral() const {
    switch (kind()) {
        case Kind::Atom:
        case Kind::BoolAtom: return true;
        case Kind::Not: return children()[0].kind() == Kind::Atom || children()[0].kind() == Kind::BoolAtom;
        default: return false;
    }
}

bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Formula::Kind::True:
        case Formula::Kind::False: return true;
        case Formula::Kind::BoolAtom: return a.feature() == b.feature();
        case Formula::Kind::Atom:
            return a.feature() == b.feature() && a.op() == b.op() && a.constant() == b.constant();
        default: {
            auto ca = a.children();
            auto cb = b.children();
            return std::equal(ca.begin(), ca.end(), cb.begin(), cb.end());
        }
    }
}

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at offset " + std::to_string(position)), position_(position) {}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
public:
    Parser(std::string_view text, std::size_t arity, const FeatureNames& names)
        : text_(text), arity_(arity), names_(names) {}

    Formula parseAll() {
        Formula f = parseFormula();
        skipSpace();
        if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
        return f;
    }

private:
    void skipSpace() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool atEnd() {
        skipSpace();
        return pos_ >= text_.size();
    }

    char peek() {
        skipSpace();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        return text_[pos_];
    }

    void expect(char c) {
        if (peek() != c) throw ParseError(std::string("expected '") + c + "'", pos_);
        ++pos_;
    }

    std::string_view symbol() {
        skipSpace();
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') break;
            ++pos_;
        }
        if (start == pos_) throw ParseError("expected a symbol", start);
        return text_.substr(start, pos_ - start);
    }

    std::size_t variable(std::string_view tok, std::size_t at) {
        std::optional<std::size_t> idx = names_.find(tok);
        if (!idx && tok.size() > 1 && tok[0] == 'x' &&
            std::all_of(tok.begin() + 1, tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            std::size_t v = 0;
            auto [p, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), v);
            if (ec != std::errc() || p != tok.data() + tok.size()) throw ParseError("bad variable index", at);
            idx = v;
        }
        if (!idx) throw ParseError("unknown variable '" + std::string(tok) + "'", at);
        if (*idx >= arity_)
            throw ParseError("feature index " + std::to_string(*idx) + " >= arity " + std::to_string(arity_), at);
        return *idx;
    }

    double number(std::size_t at) {
        std::string_view tok = symbol();
        const char* begin = tok.data();
        if (!tok.empty() && tok[0] == '+') ++begin;
        double v = 0.0;
        auto [p, ec] = std::from_chars(begin, tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v))
            throw ParseError("expected a number, got '" + std::string(tok) + "'", at);
        return v;
    }

    Formula parseFormula() {
        if (peek() != '(') {
            std::size_t at = pos_;
            std::string_view tok = symbol();
            if (tok == "true") return Formula::constTrue();
            if (tok == "false") return Formula::constFalse();
            return Formula::boolAtom(variable(tok, at));
        }
        std::size_t open = pos_;
        expect('(');
        std::size_t headAt = pos_;
        std::string_view head = symbol();
        if (head == "not") {
            Formula child = parseFormula();
            expect(')');
            return Formula::negate(std::move(child));
        }
        if (head == "and" || head == "or") {
            std::vector<Formula> children;
            while (peek() != ')') children.push_back(parseFormula());
            expect(')');
            if (children.size() < 2)
                throw ParseError("'" + std::string(head) + "' needs at least two operands", open);
            return head == "and" ? Formula::conjunction(std::move(children))
                                 : Formula::disjunction(std::move(children));
        }
        if (auto op = opFromSymbol(head)) {
            skipSpace();
            std::size_t varAt = pos_;
            std::size_t feature = variable(symbol(), varAt);
            skipSpace();
            double c = number(pos_);
            expect(')');
            return Formula::atom(feature, *op, c);
        }
        throw ParseError("unknown operator '" + std::string(head) + "'", headAt);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t arity_;
    const FeatureNames& names_;
};

}  // namespace

Formula parseFormula(std::string_view text, std::size_t arity, const FeatureNames& names) {
    return Parser(text, arity, names).parseAll();
}

// ---------------------------------------------------------------------------
// Semantics

bool evaluate(const Formula& f, std::span<const double> x) {
    switch (f.kind()) {
        case Formula::Kind::True: return true;
        case Formula::Kind::False: return false;
        case Formula::Kind::BoolAtom: return x[f.feature()] == 1.0;
        case Formula::Kind::Atom: {
            double v = x[f.feature()];
            double c = f.constant();
            switch (f.op()) {
                case CmpOp::Lt: return v < c;
                case CmpOp::Le: return v <= c;
                case CmpOp::Gt: return v > c;
                case CmpOp::Ge: return v >= c;
                case CmpOp::Eq: return v == c;
            }
            return false;
        }
        case Formula::Kind::Not: return !evaluate(f.children()[0], x);
        case Formula::Kind::And:
            for (const Formula& c : f.children())
                if (!evaluate(c, x)) return false;
            return true;
        case Formula::Kind::Or:
            for (const Formula& c : f.children())
                if (evaluate(c, x)) return true;
            return false;
    }
    return false;
}

std::size_t formulaSize(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::True:
        case Formula::Kind::False:
        case Formula::Kind::Atom:
        case Formula::Kind::BoolAtom: return 1;
        default: {
            std::size_t n = 0;
            for (const Formula& c : f.children()) n += formulaSize(c);
            return n;
        }
    }
}

std::size_t disjunctCount(const Formula& f) {
    return f.kind() == Formula::Kind::Or ? f.children().size() : 1;
}

std::optional<std::size_t> maxFeature(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::True:
        case Formula::Kind::False: return std::nullopt;
        case Formula::Kind::Atom:
        case Formula::Kind::BoolAtom: return f.feature();
        default: {
            std::optional<std::size_t> best;
            for (const Formula& c : f.children()) {
                auto m = maxFeature(c);
                if (m && (!best || *m > *best)) best = m;
            }
            return best;
        }
    }
}

// ---------------------------------------------------------------------------
// Rendering and order

std::string formatNumber(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, p);
}

namespace {

int charRank(char c) {
    switch (c) {
        case ' ': return 256;
        case '(': return 257;
        case ')': return 258;
        default: return static_cast<unsigned char>(c);
    }
}

struct Rendered {
    std::size_t size;
    std::size_t disjuncts;
    std::string canonical;
    std::string display;
};

Rendered renderNode(const Formula& f, const FeatureNames* names) {
    auto var = [&](std::size_t j, std::string* display) {
        std::string canon = "x" + std::to_string(j);
        *display = names ? names->name(j) : canon;
        return canon;
    };
    switch (f.kind()) {
        case Formula::Kind::True: return {1, 1, "true", "true"};
        case Formula::Kind::False: return {1, 1, "false", "false"};
        case Formula::Kind::BoolAtom: {
            std::string d;
            std::string c = var(f.feature(), &d);
            return {1, 1, c, d};
        }
        case Formula::Kind::Atom: {
            std::string d;
            std::string c = var(f.feature(), &d);
            std::string op(opSymbol(f.op()));
            std::string num = formatNumber(f.constant());
            return {1, 1, "(" + op + " " + c + " " + num + ")", "(" + op + " " + d + " " + num + ")"};
        }
        case Formula::Kind::Not: {
            Rendered r = renderNode(f.children()[0], names);
            return {r.size, 1, "(not " + r.canonical + ")", "(not " + r.display + ")"};
        }
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            std::vector<Rendered> parts;
            parts.reserve(f.children().size());
            std::size_t size = 0;
            for (const Formula& c : f.children()) {
                parts.push_back(renderNode(c, names));
                size += parts.back().size;
            }
            std::stable_sort(parts.begin(), parts.end(), [](const Rendered& a, const Rendered& b) {
                return compareKeys(a.size, a.disjuncts, a.canonical, b.size, b.disjuncts, b.canonical) < 0;
            });
            bool isAnd = f.kind() == Formula::Kind::And;
            std::string canon = isAnd ? "(and" : "(or";
            std::string disp = canon;
            for (const Rendered& p : parts) {
                canon += " " + p.canonical;
                disp += " " + p.display;
            }
            canon += ")";
            disp += ")";
            return {size, isAnd ? 1 : parts.size(), std::move(canon), std::move(disp)};
        }
    }
    return {1, 1, "?", "?"};
}

}  // namespace

std::string render(const Formula& f) { return renderNode(f, nullptr).canonical; }

std::string render(const Formula& f, const FeatureNames& names) {
    return renderNode(f, &names).display;
}

std::strong_ordering compareCanonicalText(std::string_view a, std::string_view b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        int ra = charRank(a[i]);
        int rb = charRank(b[i]);
        if (ra != rb) return ra <=> rb;
    }
    return a.size() <=> b.size();
}

std::strong_ordering compareKeys(std::size_t sizeA, std::size_t disjunctsA, std::string_view textA,
                                 std::size_t sizeB, std::size_t disjunctsB, std::string_view textB) {
    if (auto c = sizeA <=> sizeB; c != 0) return c;
    if (auto c = disjunctsA <=> disjunctsB; c != 0) return c;
    return compareCanonicalText(textA, textB);
}

std::strong_ordering compare(const Formula& a, const Formula& b) {
    Rendered ra = renderNode(a, nullptr);
    Rendered rb = renderNode(b, nullptr);
    return compareKeys(ra.size, ra.disjuncts, ra.canonical, rb.size, rb.disjuncts, rb.canonical);
}

bool equivalentOnGrid(const Formula& a, const Formula& b, std::span<const std::vector<double>> grid) {
    for (const auto& x : grid)
        if (evaluate(a, x) != evaluate(b, x)) return false;
    return true;
}

std::vector<std::vector<double>> booleanGrid(std::size_t arity, std::span<const std::size_t> features,
                                             double fill) {
    if (features.size() >= 30) throw std::invalid_argument("boolean grid too large");
    std::vector<std::vector<double>> grid;
    std::size_t count = std::size_t{1} << features.size();
    grid.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        std::vector<double> x(arity, fill);
        for (std::size_t k = 0; k < features.size(); ++k) {
            if (features[k] >= arity) throw std::out_of_range("grid feature outside arity");
            x[features[k]] = (mask >> k) & 1u ? 1.0 : 0.0;
        }
        grid.push_back(std::move(x));
    }
    return grid;
}

}  // namespace pacexp
