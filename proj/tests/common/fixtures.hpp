#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pacexp/engine.hpp"

#ifndef PACEXP_DATA_DIR
#error "PACEXP_DATA_DIR must point at the repository data directory"
#endif

namespace fixtures {

inline std::filesystem::path dataPath(const std::string& name) { return std::filesystem::path(PACEXP_DATA_DIR) / name; }

inline const std::vector<std::string>& zooFeatures() {
    static const std::vector<std::string> names{"hair",     "feathers", "eggs",     "milk",   "airborne", "aquatic",
                                                "predator", "toothed",  "backbone", "breathes", "venomous", "fins",
                                                "legs",     "tail",     "domestic", "catsize"};
    return names;
}

constexpr std::size_t kFins = 11;
constexpr std::size_t kBreathes = 9;
constexpr std::size_t kMilk = 3;

/// The fish/other tree: fins <= 0.5 -> other; else breathes <= 0.5 -> fish, else other.
inline std::shared_ptr<const pacexp::DecisionTreeModel> zooTree() {
    using N = pacexp::DecisionTreeModel::Node;
    std::vector<N> nodes(5);
    nodes[0].feature = kFins;
    nodes[0].threshold = 0.5;
    nodes[0].le = 1;
    nodes[0].gt = 2;
    nodes[1].leafClass = 0;
    nodes[2].feature = kBreathes;
    nodes[2].threshold = 0.5;
    nodes[2].le = 3;
    nodes[2].gt = 4;
    nodes[3].leafClass = 1;
    nodes[4].leafClass = 0;
    return std::make_shared<pacexp::DecisionTreeModel>(16, std::vector<std::string>{"other", "fish"}, nodes,
                                                       pacexp::FeatureNames(zooFeatures()));
}

inline pacexp::Grammar zooGrammar(std::size_t maxClauses = 2, std::size_t maxLits = 2) {
    std::vector<std::size_t> all(16);
    for (std::size_t j = 0; j < 16; ++j) all[j] = j;
    pacexp::Grammar g = pacexp::Grammar::booleans(all, maxClauses, maxLits);
    for (auto& f : g.features) f.name = zooFeatures()[f.index];
    return g;
}

inline pacexp::RunConfig zooConfig(const std::string& query, std::uint64_t seed) {
    pacexp::RunConfig cfg;
    cfg.model = zooTree();
    cfg.featureNames = pacexp::FeatureNames(zooFeatures());
    cfg.query = pacexp::parseQuery(query, 16, cfg.featureNames);
    cfg.targetClass = 1;
    cfg.grammar = zooGrammar();
    cfg.distribution = pacexp::Distribution::booleanCube(16);
    cfg.seed = seed;
    cfg.timeoutSeconds = 60;
    return cfg;
}

/// Random formula over `arity` features, mixing every node kind.
inline pacexp::Formula randomFormula(std::mt19937_64& gen, std::size_t arity, int depth) {
    using pacexp::Formula;
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : 6);
    std::uniform_int_distribution<std::size_t> feat(0, arity - 1);
    static const double consts[] = {-1.5, 0, 0.25, 0.5, 0.75, 1, 2.5e-3, 1e10};
    std::uniform_int_distribution<int> c(0, 7), op(0, 4), kids(2, 3);
    switch (pick(gen)) {
        case 0: return gen() % 2 ? Formula::constTrue() : Formula::constFalse();
        case 1:
        case 2: return Formula::boolAtom(feat(gen));
        case 3: return Formula::atom(feat(gen), static_cast<pacexp::CmpOp>(op(gen)), consts[c(gen)]);
        case 4: return Formula::negate(randomFormula(gen, arity, depth - 1));
        default: {
            std::vector<Formula> ch;
            int k = kids(gen);
            for (int i = 0; i < k; ++i) ch.push_back(randomFormula(gen, arity, depth - 1));
            return pick(gen) % 2 ? Formula::conjunction(ch) : Formula::disjunction(ch);
        }
    }
}

}  // namespace fixtures
