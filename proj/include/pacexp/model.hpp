#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pacexp/formula.hpp"
#include "pacexp/query.hpp"

namespace pacexp {

class ModelError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Black-box classifier R^n -> C. Implementations are immutable after
/// construction and `classify` is safe to call concurrently.
class Model {
public:
    virtual ~Model() = default;

    std::size_t arity() const { return arity_; }
    const std::vector<std::string>& classes() const { return classes_; }
    /// Optional feature names carried in the model file.
    const FeatureNames& featureNames() const { return featureNames_; }

    /// Index into `classes()`. Throws ModelError on an arity mismatch.
    std::size_t classify(std::span<const double> x) const;
    std::optional<std::size_t> classIndex(std::string_view name) const;

    virtual nlohmann::json toJson() const = 0;

protected:
    Model(std::size_t arity, std::vector<std::string> classes, FeatureNames names);
    virtual std::size_t classifyImpl(std::span<const double> x) const = 0;
    nlohmann::json headerJson(std::string_view type) const;

private:
    std::size_t arity_;
    std::vector<std::string> classes_;
    FeatureNames featureNames_;
};

/// Binary decision tree; the `le` branch is taken when x_j <= threshold.
class DecisionTreeModel final : public Model {
public:
    struct Node {
        // Leaf when `leafClass` is set, otherwise a split on `feature`.
        std::optional<std::size_t> leafClass;
        std::size_t feature = 0;
        double threshold = 0.0;
        std::size_t le = 0;
        std::size_t gt = 0;
    };

    /// `nodes[0]` is the root. Children must have larger indices than their
    /// parent, which rules out cycles.
    DecisionTreeModel(std::size_t arity, std::vector<std::string> classes, std::vector<Node> nodes,
                      FeatureNames names = {});

    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t splitCount() const;
    std::size_t leafCount() const;

    /// Or of the root-to-leaf paths ending in `targetClass`, each path a
    /// conjunction of `(<= x_j t)` / `(> x_j t)` atoms.
    Formula pathsTo(std::size_t targetClass) const;

    nlohmann::json toJson() const override;

private:
    std::size_t classifyImpl(std::span<const double> x) const override;
    std::vector<Node> nodes_;
};

enum class Activation { Relu, Identity };

/// Feed-forward network; the predicted class is the argmax of the last layer,
/// ties going to the lowest index.
class MlpModel final : public Model {
public:
    struct Layer {
        std::vector<std::vector<double>> weights;  // rows = outputs
        std::vector<double> bias;
        Activation activation = Activation::Relu;
    };

    MlpModel(std::size_t arity, std::vector<std::string> classes, std::vector<Layer> layers,
             FeatureNames names = {});

    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<double> logits(std::span<const double> x) const;

    nlohmann::json toJson() const override;

private:
    std::size_t classifyImpl(std::span<const double> x) const override;
    std::vector<Layer> layers_;
};

/// Exact-match lookup table with a default class.
class TableModel final : public Model {
public:
    struct Row {
        std::vector<double> x;
        std::size_t label;
    };

    TableModel(std::size_t arity, std::vector<std::string> classes, std::vector<Row> rows,
               std::size_t defaultClass, FeatureNames names = {});

    nlohmann::json toJson() const override;

private:
    std::size_t classifyImpl(std::span<const double> x) const override;
    std::vector<Row> rows_;
    std::size_t defaultClass_;
};

std::shared_ptr<const Model> modelFromJson(const nlohmann::json& j);
std::shared_ptr<const Model> loadModel(const std::filesystem::path& path);
void saveModel(const Model& model, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Datasets

enum class FeatureKind { Boolean, Real, Categorical };

std::string_view featureKindName(FeatureKind kind);

/// How one raw CSV column maps onto [0,1].
struct FeatureEncoding {
    std::string name;
    FeatureKind kind = FeatureKind::Real;
    double lo = 0.0;  // raw min (Real) or 0
    double hi = 1.0;  // raw max (Real) or category count - 1
    std::vector<std::string> categories;  // sorted, Categorical only

    double normalize(double raw) const;
};

/// Normalization bounds and categorical encodings of a dataset.
struct DatasetManifest {
    std::vector<FeatureEncoding> features;
    std::vector<std::string> classes;  // in order of first appearance

    FeatureNames featureNames() const;
    nlohmann::json toJson() const;
    static DatasetManifest fromJson(const nlohmann::json& j);
};

/// Rows are normalized: every coordinate lies in [0,1].
struct Dataset {
    DatasetManifest manifest;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;

    std::size_t arity() const { return manifest.features.size(); }
    FeatureNames featureNames() const { return manifest.featureNames(); }
};

class DatasetError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// RFC-4180 CSV with a header; the last column is the class label. With a
/// manifest the stored bounds and encodings are reused instead of refit.
Dataset parseDataset(std::istream& in, const DatasetManifest* manifest = nullptr);
Dataset loadDataset(const std::filesystem::path& csv, const DatasetManifest* manifest = nullptr);

/// Fraction of query rows where `phi` holds exactly when the model predicts
/// `targetClass`. nullopt when no row lies in the query.
std::optional<double> accuracyOn(const Formula& phi, const Model& model, const Dataset& data,
                                 const Query& query, std::size_t targetClass);

}  // namespace pacexp
