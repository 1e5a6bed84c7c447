#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pacexp/formula.hpp"

namespace pacexp {

/// 1 - (a.b)/(|a||b|). NaN when either vector is zero.
double cosineDistance(std::span<const double> a, std::span<const double> b);

/// A region of the input space, given either by a formula or by a cosine
/// ball around a center point.
class Query {
public:
    static constexpr double kDefaultMaxDistance = 0.5;

    struct CosineBall {
        std::vector<double> center;
        double maxDistance = kDefaultMaxDistance;
    };

    static Query formula(Formula f);
    /// Throws std::invalid_argument on a zero center or a radius outside [0,2].
    static Query cosineBall(std::vector<double> center, double maxDistance = kDefaultMaxDistance);
    static Query everything() { return formula(Formula::constTrue()); }

    /// Zero vectors are outside every cosine ball.
    bool contains(std::span<const double> x) const;

    bool isFormula() const { return std::holds_alternative<Formula>(region_); }
    const Formula& asFormula() const { return std::get<Formula>(region_); }
    const CosineBall& asCosineBall() const { return std::get<CosineBall>(region_); }

    /// Formula queries serialize as their canonical string, balls as
    /// `{"cosine":{"center":[...],"maxDist":r}}`.
    nlohmann::json toJson() const;
    std::string describe(const FeatureNames& names = {}) const;

private:
    explicit Query(std::variant<Formula, CosineBall> r) : region_(std::move(r)) {}
    std::variant<Formula, CosineBall> region_;
};

/// Accepts either an s-expression or the cosine JSON object.
Query parseQuery(std::string_view text, std::size_t arity, const FeatureNames& names = {});
Query queryFromJson(const nlohmann::json& j, std::size_t arity, const FeatureNames& names = {});

}  // namespace pacexp
