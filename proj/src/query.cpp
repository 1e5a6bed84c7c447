#include "pacexp/query.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pacexp {

double cosineDistance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosineDistance: length mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

Query Query::formula(Formula f) { return Query(std::move(f)); }

Query Query::cosineBall(std::vector<double> center, double maxDistance) {
    bool nonzero = false;
    for (double v : center) {
        if (!std::isfinite(v)) throw std::invalid_argument("cosine center must be finite");
        nonzero = nonzero || v != 0.0;
    }
    if (!nonzero) throw std::invalid_argument("cosine center must not be the zero vector");
    if (!(maxDistance >= 0.0 && maxDistance <= 2.0))
        throw std::invalid_argument("cosine maxDist must lie in [0,2]");
    return Query(CosineBall{std::move(center), maxDistance});
}

bool Query::contains(std::span<const double> x) const {
    if (const auto* f = std::get_if<Formula>(&region_)) return evaluate(*f, x);
    const auto& ball = std::get<CosineBall>(region_);
    if (x.size() != ball.center.size()) throw std::invalid_argument("query arity mismatch");
    double d = cosineDistance(x, ball.center);
    // NaN (zero vector) compares false.
    return d <= ball.maxDistance;
}

nlohmann::json Query::toJson() const {
    if (const auto* f = std::get_if<Formula>(&region_)) return render(*f);
    const auto& ball = std::get<CosineBall>(region_);
    return {{"cosine", {{"center", ball.center}, {"maxDist", ball.maxDistance}}}};
}

std::string Query::describe(const FeatureNames& names) const {
    if (const auto* f = std::get_if<Formula>(&region_)) return render(*f, names);
    return toJson().dump();
}

Query queryFromJson(const nlohmann::json& j, std::size_t arity, const FeatureNames& names) {
    if (j.is_string()) return Query::formula(parseFormula(j.get<std::string>(), arity, names));
    if (!j.is_object() || !j.contains("cosine"))
        throw std::invalid_argument("query JSON must be a formula string or {\"cosine\":{...}}");
    const auto& c = j.at("cosine");
    auto center = c.at("center").get<std::vector<double>>();
    if (center.size() != arity)
        throw std::invalid_argument("cosine center has " + std::to_string(center.size()) +
                                    " coordinates, expected " + std::to_string(arity));
    double r = c.value("maxDist", Query::kDefaultMaxDistance);
    return Query::cosineBall(std::move(center), r);
}

Query parseQuery(std::string_view text, std::size_t arity, const FeatureNames& names) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i < text.size() && text[i] == '{') return queryFromJson(nlohmann::json::parse(text), arity, names);
    return Query::formula(parseFormula(text, arity, names));
}

}  // namespace pacexp
