#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace pacexp {

struct Dataset;

/// Seedable generator with a bit-reproducible stream on every platform:
/// std::mt19937_64 seeded through std::seed_seq{seed lo, seed hi, stream lo,
/// stream hi}, with the conversions to doubles defined here rather than by
/// the standard library distributions (whose output is implementation
/// defined).
class Rng {
public:
    static constexpr std::string_view kAlgorithm = "mt19937_64+seed_seq/v1";

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t nextU64() { return engine_(); }
    /// Uniform on [0,1) with 53 random bits.
    double uniform01();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    /// Uniform integer in [0, n), n > 0, without modulo bias.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal via Box-Muller; uses two uniforms per call.
    double normal();

private:
    std::mt19937_64 engine_;
};

/// The sampling distribution D over R^n. Immutable after construction.
class Distribution {
public:
    struct UniformBox {
        std::vector<double> lo;
        std::vector<double> hi;
    };
    /// Resamples dataset rows; real features get N(0, sigma) noise and are
    /// clamped to [0,1]. Boolean features are never perturbed.
    struct Empirical {
        std::shared_ptr<const std::vector<std::vector<double>>> rows;
        std::vector<bool> boolean;
        double sigma = 0.0;
    };
    struct Interval {
        double lo = 0.0;
        double hi = 1.0;
    };
    struct Categorical {
        std::vector<double> values;
        std::vector<double> weights;  // sums to 1
    };
    using FeatureSpec = std::variant<Interval, Categorical>;
    struct Product {
        std::vector<FeatureSpec> features;
    };

    static Distribution uniformBox(std::vector<double> lo, std::vector<double> hi);
    static Distribution unitBox(std::size_t arity);
    static Distribution empirical(const Dataset& data, double sigma);
    static Distribution empirical(std::vector<std::vector<double>> rows, std::vector<bool> boolean,
                                  double sigma);
    static Distribution product(std::vector<FeatureSpec> features);
    /// Fair coin on {0,1} for every feature.
    static Distribution booleanCube(std::size_t arity);

    std::size_t arity() const;
    std::vector<double> sample(Rng& rng) const;
    void sampleInto(Rng& rng, std::vector<double>& out) const;

    /// `{"uniformBox":..}`, `{"empirical":{"rows":..,"boolean":..,"sigma":..}}`
    /// or `{"product":[..]}`. Empirical data is embedded so the JSON is
    /// self-contained.
    nlohmann::json toJson() const;
    std::string describe() const;

private:
    using Variant = std::variant<UniformBox, Empirical, Product>;
    explicit Distribution(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// Parses the distribution JSON; an empirical `dataset` path is resolved
/// against `baseDir` and loaded with its fitted normalization.
Distribution distributionFromJson(const nlohmann::json& j, const std::filesystem::path& baseDir = {});

}  // namespace pacexp
