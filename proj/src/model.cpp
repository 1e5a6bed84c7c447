#include "pacexp/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace pacexp {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Model base

Model::Model(std::size_t arity, std::vector<std::string> classes, FeatureNames names)
    : arity_(arity), classes_(std::move(classes)), featureNames_(std::move(names)) {
    if (arity_ == 0) throw ModelError("model arity must be positive");
    if (classes_.empty()) throw ModelError("model needs at least one class");
    if (!featureNames_.empty() && featureNames_.size() != arity_)
        throw ModelError("model feature names do not match arity");
}

std::size_t Model::classify(std::span<const double> x) const {
    if (x.size() != arity_)
        throw ModelError("input has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(arity_));
    return classifyImpl(x);
}

std::optional<std::size_t> Model::classIndex(std::string_view name) const {
    for (std::size_t i = 0; i < classes_.size(); ++i)
        if (classes_[i] == name) return i;
    return std::nullopt;
}

json Model::headerJson(std::string_view type) const {
    json j{{"type", type}, {"arity", arity_}, {"classes", classes_}};
    if (!featureNames_.empty()) j["features"] = featureNames_.names();
    return j;
}

// ---------------------------------------------------------------------------
// Decision tree

DecisionTreeModel::DecisionTreeModel(std::size_t arity, std::vector<std::string> classes,
                                     std::vector<Node> nodes, FeatureNames names)
    : Model(arity, std::move(classes), std::move(names)), nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw ModelError("decision tree has no nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (n.leafClass) {
            if (*n.leafClass >= this->classes().size()) throw ModelError("leaf class out of range");
            continue;
        }
        if (n.feature >= arity) throw ModelError("split feature out of range");
        if (n.le <= i || n.gt <= i || n.le >= nodes_.size() || n.gt >= nodes_.size())
            throw ModelError("decision tree children must follow their parent");
        if (!std::isfinite(n.threshold)) throw ModelError("split threshold must be finite");
    }
}

std::size_t DecisionTreeModel::splitCount() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return !n.leafClass; }));
}

std::size_t DecisionTreeModel::leafCount() const { return nodes_.size() - splitCount(); }

std::size_t DecisionTreeModel::classifyImpl(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes_[i].leafClass) {
        const Node& n = nodes_[i];
        i = x[n.feature] <= n.threshold ? n.le : n.gt;
    }
    return *nodes_[i].leafClass;
}

Formula DecisionTreeModel::pathsTo(std::size_t targetClass) const {
    std::vector<Formula> clauses;
    std::vector<Formula> path;
    auto walk = [&](auto&& self, std::size_t i) -> void {
        const Node& n = nodes_[i];
        if (n.leafClass) {
            if (*n.leafClass != targetClass) return;
            if (path.empty()) clauses.push_back(Formula::constTrue());
            else if (path.size() == 1) clauses.push_back(path[0]);
            else clauses.push_back(Formula::conjunction(path));
            return;
        }
        path.push_back(Formula::atom(n.feature, CmpOp::Le, n.threshold));
        self(self, n.le);
        path.back() = Formula::atom(n.feature, CmpOp::Gt, n.threshold);
        self(self, n.gt);
        path.pop_back();
    };
    walk(walk, 0);
    if (clauses.empty()) return Formula::constFalse();
    if (clauses.size() == 1) return clauses[0];
    return Formula::disjunction(std::move(clauses));
}

json DecisionTreeModel::toJson() const {
    json j = headerJson("tree");
    auto node = [&](auto&& self, std::size_t i) -> json {
        const Node& n = nodes_[i];
        if (n.leafClass) return json{{"leaf", classes()[*n.leafClass]}};
        return json{{"feature", n.feature}, {"threshold", n.threshold}, {"le", self(self, n.le)},
                    {"gt", self(self, n.gt)}};
    };
    j["root"] = node(node, 0);
    return j;
}

// ---------------------------------------------------------------------------
// MLP

MlpModel::MlpModel(std::size_t arity, std::vector<std::string> classes, std::vector<Layer> layers,
                   FeatureNames names)
    : Model(arity, std::move(classes), std::move(names)), layers_(std::move(layers)) {
    if (layers_.empty()) throw ModelError("mlp has no layers");
    std::size_t in = arity;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        if (layer.weights.empty()) throw ModelError("mlp layer " + std::to_string(l) + " has no outputs");
        if (layer.bias.size() != layer.weights.size())
            throw ModelError("mlp layer " + std::to_string(l) + ": bias length " +
                             std::to_string(layer.bias.size()) + " != output count " +
                             std::to_string(layer.weights.size()));
        for (const auto& row : layer.weights)
            if (row.size() != in)
                throw ModelError("mlp layer " + std::to_string(l) + ": weight row length " +
                                 std::to_string(row.size()) + " != input size " + std::to_string(in));
        in = layer.weights.size();
    }
    if (in != this->classes().size())
        throw ModelError("mlp output size " + std::to_string(in) + " != class count " +
                         std::to_string(this->classes().size()));
}

std::vector<double> MlpModel::logits(std::span<const double> x) const {
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (const Layer& layer : layers_) {
        next.assign(layer.weights.size(), 0.0);
        for (std::size_t o = 0; o < layer.weights.size(); ++o) {
            double acc = layer.bias[o];
            const auto& row = layer.weights[o];
            for (std::size_t i = 0; i < row.size(); ++i) acc += row[i] * cur[i];
            next[o] = layer.activation == Activation::Relu ? std::max(acc, 0.0) : acc;
        }
        cur.swap(next);
    }
    return cur;
}

std::size_t MlpModel::classifyImpl(std::span<const double> x) const {
    std::vector<double> out = logits(x);
    return static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
}

json MlpModel::toJson() const {
    json j = headerJson("mlp");
    json layers = json::array();
    for (const Layer& l : layers_)
        layers.push_back({{"w", l.weights}, {"b", l.bias}, {"act", l.activation == Activation::Relu ? "relu" : "id"}});
    j["layers"] = std::move(layers);
    return j;
}

// ---------------------------------------------------------------------------
// Lookup table

TableModel::TableModel(std::size_t arity, std::vector<std::string> classes, std::vector<Row> rows,
                       std::size_t defaultClass, FeatureNames names)
    : Model(arity, std::move(classes), std::move(names)), rows_(std::move(rows)), defaultClass_(defaultClass) {
    if (defaultClass_ >= this->classes().size()) throw ModelError("table default class out of range");
    for (const Row& r : rows_) {
        if (r.x.size() != arity) throw ModelError("table row has wrong arity");
        if (r.label >= this->classes().size()) throw ModelError("table row class out of range");
    }
}

std::size_t TableModel::classifyImpl(std::span<const double> x) const {
    for (const Row& r : rows_)
        if (std::equal(r.x.begin(), r.x.end(), x.begin(), x.end())) return r.label;
    return defaultClass_;
}

json TableModel::toJson() const {
    json j = headerJson("table");
    json rows = json::array();
    for (const Row& r : rows_) rows.push_back({{"x", r.x}, {"class", classes()[r.label]}});
    j["rows"] = std::move(rows);
    j["default"] = classes()[defaultClass_];
    return j;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

std::string labelString(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer() || v.is_number_unsigned() || v.is_boolean()) return v.dump();
    throw ModelError("class labels must be strings or integers");
}

std::size_t resolveClass(const json& v, const std::vector<std::string>& classes) {
    if (v.is_string()) {
        auto name = v.get<std::string>();
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (classes[i] == name) return i;
        throw ModelError("unknown class '" + name + "'");
    }
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
        auto i = v.get<std::size_t>();
        if (i >= classes.size()) throw ModelError("class index out of range");
        return i;
    }
    throw ModelError("class reference must be a name or an index");
}

void flattenTree(const json& j, const std::vector<std::string>& classes,
                 std::vector<DecisionTreeModel::Node>& out) {
    if (!j.is_object()) throw ModelError("tree node must be an object");
    std::size_t self = out.size();
    out.emplace_back();
    if (j.contains("leaf")) {
        out[self].leafClass = resolveClass(j.at("leaf"), classes);
        return;
    }
    if (!j.contains("feature") || !j.contains("threshold") || !j.contains("le") || !j.contains("gt"))
        throw ModelError("tree split needs feature, threshold, le, gt");
    out[self].feature = j.at("feature").get<std::size_t>();
    out[self].threshold = j.at("threshold").get<double>();
    out[self].le = out.size();
    flattenTree(j.at("le"), classes, out);
    out[self].gt = out.size();
    flattenTree(j.at("gt"), classes, out);
}

}  // namespace

std::shared_ptr<const Model> modelFromJson(const json& j) {
    try {
        if (!j.is_object()) throw ModelError("model JSON must be an object");
        auto type = j.at("type").get<std::string>();
        auto arity = j.at("arity").get<std::size_t>();
        std::vector<std::string> classes;
        for (const auto& c : j.at("classes")) classes.push_back(labelString(c));
        FeatureNames names;
        if (j.contains("features")) names = FeatureNames(j.at("features").get<std::vector<std::string>>());

        if (type == "tree") {
            std::vector<DecisionTreeModel::Node> nodes;
            flattenTree(j.at("root"), classes, nodes);
            return std::make_shared<DecisionTreeModel>(arity, classes, std::move(nodes), std::move(names));
        }
        if (type == "mlp") {
            std::vector<MlpModel::Layer> layers;
            for (const auto& l : j.at("layers")) {
                MlpModel::Layer layer;
                layer.weights = l.at("w").get<std::vector<std::vector<double>>>();
                layer.bias = l.at("b").get<std::vector<double>>();
                auto act = l.value("act", std::string("relu"));
                if (act == "relu") layer.activation = Activation::Relu;
                else if (act == "id" || act == "identity") layer.activation = Activation::Identity;
                else throw ModelError("unknown activation '" + act + "'");
                layers.push_back(std::move(layer));
            }
            return std::make_shared<MlpModel>(arity, classes, std::move(layers), std::move(names));
        }
        if (type == "table") {
            std::vector<TableModel::Row> rows;
            for (const auto& r : j.value("rows", json::array()))
                rows.push_back({r.at("x").get<std::vector<double>>(), resolveClass(r.at("class"), classes)});
            std::size_t def = resolveClass(j.at("default"), classes);
            return std::make_shared<TableModel>(arity, classes, std::move(rows), def, std::move(names));
        }
        throw ModelError("unknown model type '" + type + "'");
    } catch (const json::exception& e) {
        throw ModelError(std::string("model schema violation: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ModelError(e.what());
    }
}

std::shared_ptr<const Model> loadModel(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ModelError("model file " + path.string() + " is not JSON: " + e.what());
    }
    return modelFromJson(j);
}

void saveModel(const Model& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write model file " + path.string());
    out << model.toJson().dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Datasets

std::string_view featureKindName(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::Boolean: return "bool";
        case FeatureKind::Real: return "real";
        case FeatureKind::Categorical: return "categorical";
    }
    return "?";
}

double FeatureEncoding::normalize(double raw) const {
    switch (kind) {
        case FeatureKind::Boolean: return raw != 0.0 ? 1.0 : 0.0;
        case FeatureKind::Real:
        case FeatureKind::Categorical: {
            if (hi <= lo) return 0.0;
            return std::clamp((raw - lo) / (hi - lo), 0.0, 1.0);
        }
    }
    return 0.0;
}

FeatureNames DatasetManifest::featureNames() const {
    std::vector<std::string> names;
    for (const auto& f : features) names.push_back(f.name);
    return FeatureNames(std::move(names));
}

json DatasetManifest::toJson() const {
    json feats = json::array();
    for (const auto& f : features) {
        json e{{"name", f.name}, {"kind", featureKindName(f.kind)}};
        if (f.kind == FeatureKind::Real) {
            e["min"] = f.lo;
            e["max"] = f.hi;
        }
        if (f.kind == FeatureKind::Categorical) e["categories"] = f.categories;
        feats.push_back(std::move(e));
    }
    return {{"features", std::move(feats)}, {"classes", classes}};
}

DatasetManifest DatasetManifest::fromJson(const json& j) {
    DatasetManifest m;
    try {
        for (const auto& e : j.at("features")) {
            FeatureEncoding f;
            f.name = e.at("name").get<std::string>();
            auto kind = e.at("kind").get<std::string>();
            if (kind == "bool") {
                f.kind = FeatureKind::Boolean;
            } else if (kind == "real") {
                f.kind = FeatureKind::Real;
                f.lo = e.at("min").get<double>();
                f.hi = e.at("max").get<double>();
            } else if (kind == "categorical") {
                f.kind = FeatureKind::Categorical;
                f.categories = e.at("categories").get<std::vector<std::string>>();
                std::sort(f.categories.begin(), f.categories.end());
                f.lo = 0.0;
                f.hi = f.categories.empty() ? 0.0 : static_cast<double>(f.categories.size() - 1);
            } else {
                throw DatasetError("unknown feature kind '" + kind + "'");
            }
            m.features.push_back(std::move(f));
        }
        m.classes = j.value("classes", std::vector<std::string>{});
    } catch (const json::exception& e) {
        throw DatasetError(std::string("manifest schema violation: ") + e.what());
    }
    return m;
}

namespace {

// One RFC-4180 record; returns false at end of input.
bool readCsvRecord(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    int c = in.peek();
    if (c == EOF) return false;
    std::string cur;
    bool quoted = false;
    bool any = false;
    while (true) {
        c = in.get();
        if (c == EOF) {
            if (quoted) throw DatasetError("unterminated quoted field near line " + std::to_string(line));
            break;
        }
        any = true;
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    cur += '"';
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                cur += ch;
            }
            continue;
        }
        if (ch == '"' && cur.empty()) {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get();
            break;
        } else if (ch == '\n') {
            break;
        } else {
            cur += ch;
        }
    }
    ++line;
    fields.push_back(std::move(cur));
    return any;
}

std::optional<double> parseNumber(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<double> parseBoolWord(std::string_view s) {
    std::string lower;
    for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "true") return 1.0;
    if (lower == "false") return 0.0;
    return std::nullopt;
}

}  // namespace

Dataset parseDataset(std::istream& in, const DatasetManifest* manifest) {
    std::vector<std::string> header;
    std::size_t line = 1;
    if (!readCsvRecord(in, header, line) || header.size() < 2)
        throw DatasetError("dataset needs a header with at least one feature and a class column");
    std::size_t nFeatures = header.size() - 1;

    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> record;
    while (readCsvRecord(in, record, line)) {
        if (record.size() == 1 && record[0].empty()) continue;  // blank line
        if (record.size() != header.size())
            throw DatasetError("ragged row at line " + std::to_string(line - 1) + ": " +
                               std::to_string(record.size()) + " fields, expected " +
                               std::to_string(header.size()));
        cells.push_back(record);
    }

    Dataset data;
    if (manifest) {
        if (manifest->features.size() != nFeatures) throw DatasetError("manifest does not match CSV header");
        data.manifest = *manifest;
    } else {
        for (std::size_t j = 0; j < nFeatures; ++j) {
            FeatureEncoding f;
            f.name = header[j];
            bool numeric = true, binary = true, boolWords = true;
            double lo = 0.0, hi = 0.0;
            bool first = true;
            for (const auto& row : cells) {
                auto v = parseNumber(row[j]);
                if (!parseBoolWord(row[j]) && !(v && (*v == 0.0 || *v == 1.0))) boolWords = false;
                if (!v) {
                    numeric = false;
                    continue;
                }
                if (*v != 0.0 && *v != 1.0) binary = false;
                lo = first ? *v : std::min(lo, *v);
                hi = first ? *v : std::max(hi, *v);
                first = false;
            }
            if (numeric && binary) {
                f.kind = FeatureKind::Boolean;
            } else if (numeric) {
                f.kind = FeatureKind::Real;
                f.lo = lo;
                f.hi = hi;
            } else if (boolWords) {
                f.kind = FeatureKind::Boolean;
            } else {
                f.kind = FeatureKind::Categorical;
                for (const auto& row : cells) f.categories.push_back(row[j]);
                std::sort(f.categories.begin(), f.categories.end());
                f.categories.erase(std::unique(f.categories.begin(), f.categories.end()), f.categories.end());
                f.lo = 0.0;
                f.hi = static_cast<double>(f.categories.size() - 1);
            }
            data.manifest.features.push_back(std::move(f));
        }
    }

    for (std::size_t r = 0; r < cells.size(); ++r) {
        const auto& row = cells[r];
        std::vector<double> x(nFeatures);
        for (std::size_t j = 0; j < nFeatures; ++j) {
            const FeatureEncoding& f = data.manifest.features[j];
            double raw = 0.0;
            if (f.kind == FeatureKind::Categorical) {
                auto it = std::lower_bound(f.categories.begin(), f.categories.end(), row[j]);
                if (it == f.categories.end() || *it != row[j])
                    throw DatasetError("unknown category '" + row[j] + "' in column " + f.name);
                raw = static_cast<double>(it - f.categories.begin());
            } else {
                auto v = parseNumber(row[j]);
                if (!v && f.kind == FeatureKind::Boolean) v = parseBoolWord(row[j]);
                if (!v)
                    throw DatasetError("non-numeric value '" + row[j] + "' in column " + f.name +
                                       " (row " + std::to_string(r + 1) + ")");
                raw = *v;
            }
            x[j] = f.normalize(raw);
        }
        data.rows.push_back(std::move(x));
        data.labels.push_back(row.back());
        if (std::find(data.manifest.classes.begin(), data.manifest.classes.end(), row.back()) ==
            data.manifest.classes.end())
            data.manifest.classes.push_back(row.back());
    }
    return data;
}

Dataset loadDataset(const std::filesystem::path& csv, const DatasetManifest* manifest) {
    std::ifstream in(csv, std::ios::binary);
    if (!in) throw DatasetError("cannot open dataset " + csv.string());
    return parseDataset(in, manifest);
}

std::optional<double> accuracyOn(const Formula& phi, const Model& model, const Dataset& data,
                                 const Query& query, std::size_t targetClass) {
    std::size_t inQuery = 0, agree = 0;
    for (const auto& x : data.rows) {
        if (!query.contains(x)) continue;
        ++inQuery;
        if (evaluate(phi, x) == (model.classify(x) == targetClass)) ++agree;
    }
    if (inQuery == 0) return std::nullopt;
    return static_cast<double>(agree) / static_cast<double>(inQuery);
}

}  // namespace pacexp
