#include "pacexp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pacexp/formula.hpp"
#include "pacexp/model.hpp"

namespace pacexp {

using nlohmann::json;

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return v % n;
}

double Rng::normal() {
    double u1 = 1.0 - uniform01();  // (0,1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// ---------------------------------------------------------------------------

Distribution Distribution::uniformBox(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || lo.empty()) throw std::invalid_argument("uniformBox: lo/hi length mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] <= hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
            throw std::invalid_argument("uniformBox: need finite lo <= hi");
    return Distribution(UniformBox{std::move(lo), std::move(hi)});
}

Distribution Distribution::unitBox(std::size_t arity) {
    return uniformBox(std::vector<double>(arity, 0.0), std::vector<double>(arity, 1.0));
}

Distribution Distribution::empirical(std::vector<std::vector<double>> rows, std::vector<bool> boolean,
                                     double sigma) {
    if (rows.empty()) throw std::invalid_argument("empirical distribution needs at least one row");
    if (!(sigma >= 0.0)) throw std::invalid_argument("empirical sigma must be >= 0");
    for (const auto& r : rows)
        if (r.size() != rows[0].size()) throw std::invalid_argument("empirical rows have different lengths");
    if (boolean.empty()) boolean.assign(rows[0].size(), false);
    if (boolean.size() != rows[0].size()) throw std::invalid_argument("empirical: boolean mask length mismatch");
    return Distribution(Empirical{std::make_shared<const std::vector<std::vector<double>>>(std::move(rows)),
                                  std::move(boolean), sigma});
}

Distribution Distribution::empirical(const Dataset& data, double sigma) {
    std::vector<bool> boolean;
    for (const auto& f : data.manifest.features) boolean.push_back(f.kind == FeatureKind::Boolean);
    return empirical(data.rows, std::move(boolean), sigma);
}

Distribution Distribution::product(std::vector<FeatureSpec> features) {
    if (features.empty()) throw std::invalid_argument("product distribution needs at least one feature");
    for (auto& f : features) {
        if (auto* iv = std::get_if<Interval>(&f)) {
            if (!(iv->lo <= iv->hi)) throw std::invalid_argument("product interval needs lo <= hi");
        } else {
            auto& cat = std::get<Categorical>(f);
            if (cat.values.empty() || cat.values.size() != cat.weights.size())
                throw std::invalid_argument("categorical needs matching values and weights");
            double sum = 0.0;
            for (double w : cat.weights) {
                if (!(w >= 0.0)) throw std::invalid_argument("categorical weights must be >= 0");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("categorical weights must sum to 1");
        }
    }
    return Distribution(Product{std::move(features)});
}

Distribution Distribution::booleanCube(std::size_t arity) {
    std::vector<FeatureSpec> f(arity, Categorical{{0.0, 1.0}, {0.5, 0.5}});
    return product(std::move(f));
}

std::size_t Distribution::arity() const {
    return std::visit(
        [](const auto& d) -> std::size_t {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, UniformBox>) return d.lo.size();
            else if constexpr (std::is_same_v<T, Empirical>) return d.boolean.size();
            else return d.features.size();
        },
        v_);
}

void Distribution::sampleInto(Rng& rng, std::vector<double>& out) const {
    out.resize(arity());
    if (const auto* box = std::get_if<UniformBox>(&v_)) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = rng.uniform(box->lo[i], box->hi[i]);
        return;
    }
    if (const auto* emp = std::get_if<Empirical>(&v_)) {
        const auto& row = (*emp->rows)[rng.below(emp->rows->size())];
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = row[i];
            if (emp->sigma > 0.0 && !emp->boolean[i])
                out[i] = std::clamp(row[i] + emp->sigma * rng.normal(), 0.0, 1.0);
        }
        return;
    }
    const auto& prod = std::get<Product>(v_);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (const auto* iv = std::get_if<Interval>(&prod.features[i])) {
            out[i] = rng.uniform(iv->lo, iv->hi);
        } else {
            const auto& cat = std::get<Categorical>(prod.features[i]);
            double u = rng.uniform01();
            std::size_t k = 0;
            double acc = cat.weights[0];
            while (u >= acc && k + 1 < cat.values.size()) acc += cat.weights[++k];
            out[i] = cat.values[k];
        }
    }
}

std::vector<double> Distribution::sample(Rng& rng) const {
    std::vector<double> x;
    sampleInto(rng, x);
    return x;
}

json Distribution::toJson() const {
    if (const auto* box = std::get_if<UniformBox>(&v_)) return {{"uniformBox", {{"lo", box->lo}, {"hi", box->hi}}}};
    if (const auto* emp = std::get_if<Empirical>(&v_))
        return {{"empirical", {{"rows", *emp->rows}, {"boolean", emp->boolean}, {"sigma", emp->sigma}}}};
    json feats = json::array();
    for (const auto& f : std::get<Product>(v_).features) {
        if (const auto* iv = std::get_if<Interval>(&f)) feats.push_back({{"uniform", {iv->lo, iv->hi}}});
        else {
            const auto& c = std::get<Categorical>(f);
            feats.push_back({{"categorical", {{"values", c.values}, {"weights", c.weights}}}});
        }
    }
    return {{"product", std::move(feats)}};
}

std::string Distribution::describe() const {
    std::ostringstream os;
    if (const auto* box = std::get_if<UniformBox>(&v_)) {
        os << "uniform box over " << box->lo.size() << " features";
    } else if (const auto* emp = std::get_if<Empirical>(&v_)) {
        os << "empirical over " << emp->rows->size() << " rows, sigma " << formatNumber(emp->sigma);
    } else {
        const auto& p = std::get<Product>(v_);
        std::size_t cats = 0;
        for (const auto& f : p.features) cats += std::holds_alternative<Categorical>(f);
        os << "product of " << p.features.size() << " features (" << cats << " categorical)";
    }
    return os.str();
}

namespace {

Distribution::FeatureSpec featureSpecFromJson(const json& f) {
    if (f.is_string() && f.get<std::string>() == "bool") return Distribution::Categorical{{0.0, 1.0}, {0.5, 0.5}};
    if (f.contains("uniform")) {
        auto b = f.at("uniform").get<std::vector<double>>();
        if (b.size() != 2) throw std::invalid_argument("uniform feature needs [lo, hi]");
        return Distribution::Interval{b[0], b[1]};
    }
    if (f.contains("categorical")) {
        const auto& c = f.at("categorical");
        Distribution::Categorical cat;
        if (c.contains("values")) {
            cat.values = c.at("values").get<std::vector<double>>();
            cat.weights = c.at("weights").get<std::vector<double>>();
        } else {
            std::vector<std::pair<double, double>> pairs;
            for (const auto& [k, w] : c.items()) {
                double v = 0.0;
                std::istringstream is(k);
                if (!(is >> v)) throw std::invalid_argument("categorical key '" + k + "' is not a number");
                pairs.emplace_back(v, w.get<double>());
            }
            std::sort(pairs.begin(), pairs.end());
            for (auto [v, w] : pairs) {
                cat.values.push_back(v);
                cat.weights.push_back(w);
            }
        }
        return cat;
    }
    throw std::invalid_argument("product feature must be \"bool\", {\"uniform\":..} or {\"categorical\":..}");
}

}  // namespace

Distribution distributionFromJson(const json& j, const std::filesystem::path& baseDir) {
    try {
        if (j.contains("uniformBox")) {
            const auto& b = j.at("uniformBox");
            return Distribution::uniformBox(b.at("lo").get<std::vector<double>>(), b.at("hi").get<std::vector<double>>());
        }
        if (j.contains("empirical")) {
            const auto& e = j.at("empirical");
            double sigma = e.value("sigma", 0.0);
            if (e.contains("rows"))
                return Distribution::empirical(e.at("rows").get<std::vector<std::vector<double>>>(),
                                               e.value("boolean", std::vector<bool>{}), sigma);
            std::filesystem::path p = e.at("dataset").get<std::string>();
            if (p.is_relative() && !baseDir.empty()) p = baseDir / p;
            return Distribution::empirical(loadDataset(p), sigma);
        }
        if (j.contains("product")) {
            std::vector<Distribution::FeatureSpec> feats;
            for (const auto& f : j.at("product")) feats.push_back(featureSpecFromJson(f));
            return Distribution::product(std::move(feats));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("distribution schema violation: ") + e.what());
    }
    throw std::invalid_argument("distribution JSON needs uniformBox, empirical or product");
}

}  // namespace pacexp
