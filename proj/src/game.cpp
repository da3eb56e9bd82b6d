#include "gamesynth/game.hpp"

#include <algorithm>

#include "gamesynth/solver.hpp"

namespace gamesynth {

Assignment vertex_assignment(const GameDef& g, const Vertex& v) {
    if (v.size() != g.variables.size())
        throw EvalError("vertex arity " + std::to_string(v.size()) + " does not match game arity " +
                        std::to_string(g.variables.size()));
    Assignment a;
    for (size_t i = 0; i < v.size(); i++) a.unprimed[g.variables[i]] = v[i];
    return a;
}

Assignment edge_assignment(const GameDef& g, const Vertex& v, const Vertex& w) {
    Assignment a = vertex_assignment(g, v);
    if (w.size() != g.variables.size())
        throw EvalError("successor arity does not match game arity");
    for (size_t i = 0; i < w.size(); i++) a.primed[g.variables[i]] = w[i];
    return a;
}

bool vertex_in(const Formula& f, const GameDef& g, const Vertex& v) {
    return eval(f, vertex_assignment(g, v));
}

bool is_player0(const GameDef& g, const Vertex& v) {
    return vertex_in(g.player0, g, v);
}

std::string vertex_to_string(const Vertex& v) {
    std::string out = "(";
    for (size_t i = 0; i < v.size(); i++) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out + ")";
}

std::vector<Vertex> successors(const GameDef& g, const Vertex& v, Session& s, int cap) {
    s.declare_vars(g.variables);
    Formula grounded = instantiate(g.edges, vertex_assignment(g, v), VarClass::Unprimed);
    std::vector<VarRef> primed;
    primed.reserve(g.variables.size());
    for (const std::string& n : g.variables) primed.push_back({n, true});

    EnumResult models = s.enumerate_models({grounded}, primed, cap);
    if (models.over_cap)
        throw SolverError("successor enumeration at " + vertex_to_string(v) + " exceeded cap " +
                          std::to_string(cap) + " (infinite or huge branching; raise --succ-cap)");
    std::vector<Vertex> out;
    out.reserve(models.models.size());
    for (const Assignment& m : models.models) {
        Vertex w;
        w.reserve(g.variables.size());
        for (const std::string& n : g.variables) w.push_back(m.get({n, true}));
        out.push_back(std::move(w));
    }
    std::sort(out.begin(), out.end());
    return out;
}

Validation validate(const GameDef& g, Session& s) {
    s.declare_vars(g.variables);
    Validation val;

    std::vector<VarRef> unprimed;
    for (const std::string& n : g.variables) unprimed.push_back({n, false});

    SatResult init = s.check({g.init}, unprimed);
    if (init.is_sat()) {
        Vertex w;
        for (const std::string& n : g.variables) w.push_back(init.model.get({n, false}));
        val.init_witness = std::move(w);
        val.init_nonempty = Validation::Status::Ok;
    } else if (init.is_unsat()) {
        val.init_nonempty = Validation::Status::Violated;
    } else {
        val.init_nonempty = Validation::Status::Inconclusive;
    }

    // Totality: a stuck vertex satisfies (forall x'. not edges).
    std::string binder;
    for (const std::string& n : g.variables) {
        if (!binder.empty()) binder += " ";
        binder += "(" + wire_name({n, true}) + " Int)";
    }
    std::string stuck = "(forall (" + binder + ") (not " + render(g.edges) + "))";
    SatResult tot = s.check_raw({stuck}, unprimed);
    if (tot.is_sat()) {
        Vertex w;
        for (const std::string& n : g.variables) w.push_back(tot.model.get({n, false}));
        val.stuck_vertex = std::move(w);
        val.totality = Validation::Status::Violated;
    } else if (tot.is_unsat()) {
        val.totality = Validation::Status::Ok;
    } else {
        val.totality = Validation::Status::Inconclusive;
    }

    std::set<VarRef> evars = free_vars(g.edges);
    for (const std::string& n : g.variables)
        if (!evars.count({n, true})) val.unconstrained_primed.push_back(n);
    return val;
}

} // namespace gamesynth
