#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gamesynth/cegis.hpp"
#include "gamesynth/oracle.hpp"
#include "gamesynth/sexpr.hpp"

namespace py = pybind11;
using namespace gamesynth;

namespace {

SolverConfig solver_from(const std::string& cmd, int timeout_ms) {
    SolverConfig cfg;
    if (!cmd.empty()) {
        std::stringstream ss(cmd);
        std::string w;
        while (ss >> w) cfg.command.push_back(w);
    } else {
        cfg = default_solver_config();
    }
    cfg.timeout_ms = timeout_ms;
    return cfg;
}

Hypothesis hyp_from(const GameDef& g, const std::string& tree_sexpr, const std::string& formula) {
    if (tree_sexpr.empty() == formula.empty())
        throw std::invalid_argument("pass exactly one of tree= / formula=");
    Hypothesis h;
    if (!tree_sexpr.empty()) {
        DecisionTree t = tree_from_sexpr(tree_sexpr, g.variables);
        h.tree = t;
        h.formula = tree_to_formula(t, g.variables);
    } else {
        h.formula = parse_formula(formula);
    }
    return h;
}

py::dict stats_dict(const Stats& st) {
    py::dict d;
    d["iterations"] = st.iterations;
    d["positive"] = st.positive;
    d["negative"] = st.negative;
    d["existential"] = st.existential;
    d["universal"] = st.universal;
    d["tree_size"] = st.tree_size;
    d["learner_ms"] = st.learner_ms;
    d["teacher_ms"] = st.teacher_ms;
    d["total_ms"] = st.total_ms;
    return d;
}

} // namespace

PYBIND11_MODULE(_gamesynth, m) {
    m.doc() = "synthesis of safety controllers over infinite game graphs";

    py::register_exception<ParseError>(m, "GameParseError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverFailure", PyExc_RuntimeError);
    py::register_exception<TeacherError>(m, "TeacherFailure", PyExc_RuntimeError);

    py::class_<GameDef>(m, "Game")
        .def_property_readonly("name", [](const GameDef& g) { return g.name; })
        .def_property_readonly("variables", [](const GameDef& g) { return g.variables; })
        .def_property_readonly("warnings", [](const GameDef& g) { return g.warnings; })
        .def("__repr__", [](const GameDef& g) {
            return "<Game " + (g.name.empty() ? std::string("?") : g.name) + " over " +
                   std::to_string(g.arity()) + " variables>";
        });

    m.def(
        "parse_game",
        [](const std::string& text, const std::string& name) { return parse_game(text, name); },
        py::arg("text"), py::arg("name") = "");

    m.def(
        "validate",
        [](const GameDef& g, const std::string& solver_cmd, int timeout_ms) {
            Session s(solver_from(solver_cmd, timeout_ms));
            s.declare_vars(g.variables);
            Validation v = validate(g, s);
            py::dict d;
            d["ok"] = v.ok();
            d["init_nonempty"] = v.init_nonempty == Validation::Status::Ok;
            d["total"] = v.totality == Validation::Status::Ok;
            if (v.init_witness) d["init_witness"] = *v.init_witness;
            if (v.stuck_vertex) d["stuck_vertex"] = *v.stuck_vertex;
            d["unconstrained_primed"] = v.unconstrained_primed;
            return d;
        },
        py::arg("game"), py::arg("solver_cmd") = "", py::arg("timeout_ms") = 30000);

    m.def(
        "solve",
        [](const GameDef& g, int max_iterations, double timeout_secs, const std::string& solver_cmd,
           int succ_cap, bool octagonal, const std::string& trace_path, int timeout_ms) {
            CegisConfig cfg;
            cfg.max_iterations = max_iterations;
            cfg.solver = solver_from(solver_cmd, timeout_ms);
            cfg.succ_cap = succ_cap;
            cfg.octagonal = octagonal;
            if (timeout_secs > 0) cfg.timeout_secs = timeout_secs;
            if (!trace_path.empty()) cfg.trace_path = trace_path;
            CegisResult r = solve(g, cfg);
            py::dict d;
            d["outcome"] = CegisResult::kind_name(r.kind);
            d["stats"] = stats_dict(r.stats);
            if (!r.detail.empty()) d["detail"] = r.detail;
            if (r.kind == CegisResult::Kind::Solved) {
                d["tree"] = tree_to_sexpr(*r.tree, g.variables);
                d["dot"] = tree_to_dot(*r.tree, g.variables);
                d["formula"] = render(r.formula);
            }
            if (r.kind == CegisResult::Kind::Unrealizable) {
                py::list chain;
                for (const ConflictEntry& e : r.conflict_chain) {
                    py::dict ce;
                    ce["iteration"] = e.iteration;
                    ce["counterexample"] = e.origin.describe();
                    chain.append(ce);
                }
                d["conflict_chain"] = chain;
            }
            return d;
        },
        py::arg("game"), py::arg("max_iterations") = 10000, py::arg("timeout_secs") = 0.0,
        py::arg("solver_cmd") = "", py::arg("succ_cap") = 64, py::arg("octagonal") = true,
        py::arg("trace_path") = "", py::arg("timeout_ms") = 30000);

    m.def(
        "check",
        [](const GameDef& g, const std::string& tree, const std::string& formula,
           const std::string& solver_cmd, int succ_cap, int timeout_ms) {
            Hypothesis h = hyp_from(g, tree, formula);
            Session s(solver_from(solver_cmd, timeout_ms));
            s.declare_vars(g.variables);
            TeacherResult tr = check_hypothesis(g, h, s, succ_cap);
            py::dict d;
            d["yes"] = tr.yes;
            if (tr.cex) {
                d["kind"] = Counterexample::kind_name(tr.cex->kind);
                d["vertex"] = tr.cex->v;
                d["successors"] = tr.cex->succs;
                d["describe"] = tr.cex->describe();
            }
            return d;
        },
        py::arg("game"), py::arg("tree") = "", py::arg("formula") = "", py::arg("solver_cmd") = "",
        py::arg("succ_cap") = 64, py::arg("timeout_ms") = 30000);

    m.def(
        "oracle_box",
        [](const GameDef& g, const std::vector<std::pair<Int, Int>>& ranges,
           const std::string& solver_cmd, int succ_cap, int timeout_ms) {
            Box box;
            box.ranges = ranges;
            Session s(solver_from(solver_cmd, timeout_ms));
            s.declare_vars(g.variables);
            ExplicitGame eg = truncate(g, box, s, succ_cap);
            int rounds = 0;
            std::set<Vertex> w = fixpoint_solve(eg, &rounds);
            bool covered = true;
            for (size_t i = 0; i < eg.size(); i++)
                if (eg.init[i] && !w.count(eg.vertices[i])) covered = false;
            py::dict d;
            d["vertices"] = eg.size();
            d["winning"] = std::vector<Vertex>(w.begin(), w.end());
            d["rounds"] = rounds;
            d["init_covered"] = covered;
            return d;
        },
        py::arg("game"), py::arg("box"), py::arg("solver_cmd") = "", py::arg("succ_cap") = 64,
        py::arg("timeout_ms") = 30000);

    m.def(
        "simulate",
        [](const GameDef& g, const Vertex& start, const std::string& tree, const std::string& formula,
           int steps, std::uint64_t seed, const std::string& solver_cmd, int succ_cap,
           int timeout_ms) {
            Hypothesis h = hyp_from(g, tree, formula);
            Session s(solver_from(solver_cmd, timeout_ms));
            s.declare_vars(g.variables);
            PlayTrace tr = simulate(g, h, start, steps, RandomAdversary{seed}, s, succ_cap);
            py::dict d;
            d["states"] = tr.states;
            d["safe"] = tr.safe_throughout;
            d["first_unsafe"] = tr.first_unsafe;
            return d;
        },
        py::arg("game"), py::arg("start"), py::arg("tree") = "", py::arg("formula") = "",
        py::arg("steps") = 100, py::arg("seed") = 0, py::arg("solver_cmd") = "",
        py::arg("succ_cap") = 64, py::arg("timeout_ms") = 30000);

    m.def(
        "eval_formula",
        [](const GameDef& g, const std::string& formula, const Vertex& v) {
            return eval(parse_formula(formula), vertex_assignment(g, v));
        },
        py::arg("game"), py::arg("formula"), py::arg("vertex"));

    py::class_<DecisionTree>(m, "Tree")
        .def_static(
            "from_sexpr",
            [](const std::string& text, const std::vector<std::string>& vars) {
                return tree_from_sexpr(text, vars);
            },
            py::arg("text"), py::arg("variables"))
        .def("to_sexpr",
             [](const DecisionTree& t, const std::vector<std::string>& vars) {
                 return tree_to_sexpr(t, vars);
             })
        .def("to_dot",
             [](const DecisionTree& t, const std::vector<std::string>& vars) {
                 return tree_to_dot(t, vars);
             })
        .def("to_formula",
             [](const DecisionTree& t, const std::vector<std::string>& vars) {
                 return render(tree_to_formula(t, vars));
             })
        .def("eval", [](const DecisionTree& t, const Point& p) { return eval_tree(t, p); })
        .def("flip", [](const DecisionTree& t) { return flip_leaves(t); })
        .def_property_readonly("inner_nodes", [](const DecisionTree& t) { return t.inner_nodes(); });
}
