#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pacexp/engine.hpp"

namespace py = pybind11;
using namespace pacexp;
using nlohmann::json;

namespace {

FeatureNames namesFrom(const std::optional<std::vector<std::string>>& names) {
    return names ? FeatureNames(*names) : FeatureNames();
}

// Reports cross the boundary as JSON text; the Python side parses them.
std::string runExplain(const std::string& config, const std::string& baseDir) {
    RunConfig cfg = configFromJson(json::parse(config), baseDir);
    RunResult r;
    {
        py::gil_scoped_release unlocked;
        r = explain(cfg);
    }
    return makeReport(cfg, r).dump();
}

std::string runReplay(const std::string& report, std::optional<std::uint64_t> seed) {
    json recorded = json::parse(report);
    RunConfig cfg = configFromJson(recorded.at("config"));
    if (seed) cfg.seed = *seed;
    RunResult r;
    {
        py::gil_scoped_release unlocked;
        r = replay(recorded, seed);
    }
    return makeReport(cfg, r).dump();
}

std::optional<std::string> runSynthesize(const std::vector<std::vector<double>>& points,
                                         const std::vector<bool>& labels, const std::string& grammar,
                                         std::size_t arity) {
    if (points.size() != labels.size()) throw std::invalid_argument("points and labels differ in length");
    Sample s;
    for (std::size_t i = 0; i < points.size(); ++i) s.insert(points[i], labels[i]);
    Grammar g = Grammar::fromJson(json::parse(grammar), arity);
    SynthesisResult r = synthesize(s, g);
    if (!r.found()) return std::nullopt;
    return render(*r.formula);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of pacexp";
    m.attr("RNG_ALGORITHM") = std::string(Rng::kAlgorithm);

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ReplayError>(m, "ReplayError", PyExc_RuntimeError);
    py::register_exception<ModelError>(m, "ModelError", PyExc_RuntimeError);

    m.def("version", [] { return std::string(version()); });
    m.def("test_suite_size", &testSuiteSize, py::arg("epsilon"), py::arg("delta"), py::arg("iteration"));

    py::class_<Formula>(m, "Formula")
        .def("render", [](const Formula& f) { return render(f); })
        .def("render_named", [](const Formula& f, std::vector<std::string> names) {
            return render(f, FeatureNames(std::move(names)));
        })
        .def("size", [](const Formula& f) { return formulaSize(f); })
        .def("disjuncts", [](const Formula& f) { return disjunctCount(f); })
        .def("evaluate", [](const Formula& f, const std::vector<double>& x) {
            if (auto mf = maxFeature(f); mf && *mf >= x.size())
                throw std::invalid_argument("point is shorter than the formula's features");
            return evaluate(f, x);
        })
        .def("__eq__", [](const Formula& a, const Formula& b) { return compare(a, b) == 0; })
        .def("__lt__", [](const Formula& a, const Formula& b) { return compare(a, b) < 0; })
        .def("__hash__", [](const Formula& f) { return std::hash<std::string>{}(render(f)); })
        .def("__str__", [](const Formula& f) { return render(f); })
        .def("__repr__", [](const Formula& f) { return "Formula(" + render(f) + ")"; });

    m.def(
        "parse_formula",
        [](const std::string& text, std::size_t arity, std::optional<std::vector<std::string>> names) {
            return parseFormula(text, arity, namesFrom(names));
        },
        py::arg("text"), py::arg("arity"), py::arg("names") = py::none());

    py::class_<Model, std::shared_ptr<Model>>(m, "Model")
        .def_property_readonly("arity", &Model::arity)
        .def_property_readonly("classes", &Model::classes)
        .def("classify", [](const Model& model, const std::vector<double>& x) { return model.classify(x); })
        .def("to_json", [](const Model& model) { return model.toJson().dump(); });

    m.def("load_model", [](const std::string& path) { return std::const_pointer_cast<Model>(loadModel(path)); });
    m.def("model_from_json", [](const std::string& text) {
        return std::const_pointer_cast<Model>(modelFromJson(json::parse(text)));
    });

    m.def("explain_json", &runExplain, py::arg("config"), py::arg("base_dir") = "");
    m.def("replay_json", &runReplay, py::arg("report"), py::arg("seed") = py::none());
    m.def("synthesize", &runSynthesize, py::arg("points"), py::arg("labels"), py::arg("grammar"), py::arg("arity"));
}
