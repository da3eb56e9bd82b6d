#include "gamesynth/teacher.hpp"

#include <algorithm>

namespace gamesynth {

const char* Counterexample::kind_name(Kind k) {
    switch (k) {
    case Kind::Positive: return "positive";
    case Kind::Negative: return "negative";
    case Kind::Existential: return "existential";
    case Kind::Universal: return "universal";
    }
    return "?";
}

std::string Counterexample::describe() const {
    std::string out = std::string(kind_name(kind)) + " " + vertex_to_string(v);
    if (kind == Kind::Existential || kind == Kind::Universal) {
        out += " -> ";
        const char* sep = kind == Kind::Existential ? " | " : " & ";
        for (size_t i = 0; i < succs.size(); i++) {
            if (i) out += sep;
            out += vertex_to_string(succs[i]);
        }
    }
    return out;
}

namespace {

Vertex model_vertex(const GameDef& g, const Assignment& m, bool primed = false) {
    Vertex v;
    v.reserve(g.variables.size());
    for (const std::string& n : g.variables) v.push_back(m.get({n, primed}));
    return v;
}

std::vector<VarRef> unprimed_refs(const GameDef& g) {
    std::vector<VarRef> out;
    for (const std::string& n : g.variables) out.push_back({n, false});
    return out;
}

void ensure_time(const Deadline& dl) {
    if (dl && std::chrono::steady_clock::now() >= *dl)
        throw TeacherTimeout("teacher check ran past the configured budget");
}

// Shrink a satisfying model into the smallest L-infinity ball around the
// origin that still satisfies the assertions (doubling search, so at most a
// handful of extra cheap queries).  Any model is a valid counterexample, but
// small ones keep the learner's predicate pool small and stop the refinement
// loop from chasing ever-farther vertices.
SatResult check_small(Session& s, const GameDef& g, std::vector<Formula> assertions,
                      const std::vector<VarRef>& project, const Deadline& dl) {
    ensure_time(dl);
    SatResult r = s.check(assertions, project);
    if (!r.is_sat()) return r;

    Int radius = 0;
    for (const std::string& n : g.variables) {
        Int a = r.model.get({n, false});
        radius = std::max(radius, a < 0 ? -a : a);
    }
    for (Int k = 1; k < radius; k *= 2) {
        ensure_time(dl);
        std::vector<Formula> bounded = assertions;
        for (const std::string& n : g.variables) {
            bounded.push_back(Formula::cmp(CmpOp::Le, Term::var(n), Term::int_const(k)));
            bounded.push_back(Formula::cmp(CmpOp::Ge, Term::var(n), Term::int_const(-k)));
        }
        SatResult rb = s.check(bounded, project);
        if (rb.is_sat()) return rb;
        if (rb.is_unknown()) break; // keep the unbounded model
    }
    return r;
}

// Order enumerated fallback candidates smallest-first so the counterexample
// chosen is as close to the origin as the pool allows.
void sort_models_small_first(std::vector<Assignment>& models, const GameDef& g) {
    auto key = [&](const Assignment& m) {
        Int radius = 0;
        Vertex v;
        for (const std::string& n : g.variables) {
            Int a = m.get({n, false});
            radius = std::max(radius, a < 0 ? -a : a);
            v.push_back(a);
        }
        return std::make_pair(radius, v);
    };
    std::sort(models.begin(), models.end(),
              [&](const Assignment& a, const Assignment& b) { return key(a) < key(b); });
}

// Raw-assertion variant for the quantified existential check.
SatResult check_small_raw(Session& s, const GameDef& g, const std::vector<std::string>& assertions,
                          const std::vector<VarRef>& project, const Deadline& dl) {
    ensure_time(dl);
    SatResult r = s.check_raw(assertions, project);
    if (!r.is_sat()) return r;

    Int radius = 0;
    for (const std::string& n : g.variables) {
        Int a = r.model.get({n, false});
        radius = std::max(radius, a < 0 ? -a : a);
    }
    for (Int k = 1; k < radius; k *= 2) {
        ensure_time(dl);
        std::vector<std::string> bounded = assertions;
        for (const std::string& n : g.variables) {
            bounded.push_back(render(Formula::cmp(CmpOp::Le, Term::var(n), Term::int_const(k))));
            bounded.push_back(render(Formula::cmp(CmpOp::Ge, Term::var(n), Term::int_const(-k))));
        }
        SatResult rb = s.check_raw(bounded, project);
        if (rb.is_sat()) return rb;
        if (rb.is_unknown()) break;
    }
    return r;
}

} // namespace

TeacherResult check_hypothesis(const GameDef& g, const Hypothesis& h, Session& s, int succ_cap,
                               Deadline deadline) {
    s.declare_vars(g.variables);
    std::vector<VarRef> unprimed = unprimed_refs(g);
    const Formula& H = h.formula;

    // 1. Every initial vertex must be covered.
    SatResult r1 = check_small(s, g, {g.init, Formula::negate(H)}, unprimed, deadline);
    if (r1.is_sat())
        return {false, Counterexample{Counterexample::Kind::Positive, model_vertex(g, r1.model), {}}};
    if (r1.is_unknown()) throw TeacherError("initial-coverage check inconclusive: " + r1.reason);

    // 2. The hypothesis may not contain unsafe vertices.
    SatResult r2 = check_small(s, g, {H, Formula::negate(g.safe)}, unprimed, deadline);
    if (r2.is_sat())
        return {false, Counterexample{Counterexample::Kind::Negative, model_vertex(g, r2.model), {}}};
    if (r2.is_unknown()) throw TeacherError("safety check inconclusive: " + r2.reason);

    // 3. Existential closedness at player-0 vertices: no v in H & P0 may have
    //    all successors outside H.  Quantified query first; if the solver
    //    waffles, fall back to enumerating candidates and checking each.
    std::string binder;
    for (const std::string& n : g.variables) {
        if (!binder.empty()) binder += " ";
        binder += "(" + wire_name({n, true}) + " Int)";
    }
    Formula Hn = prime_vars(H);
    std::string all_succs_out =
        "(forall (" + binder + ") (=> " + render(g.edges) + " (not " + render(Hn) + ")))";
    SatResult r3 = check_small_raw(s, g, {render(H), render(g.player0), all_succs_out}, unprimed, deadline);
    if (r3.is_sat()) {
        Vertex v = model_vertex(g, r3.model);
        return {false, Counterexample{Counterexample::Kind::Existential, v, successors(g, v, s, succ_cap)}};
    }
    if (r3.is_unknown()) {
        constexpr int kFallback = 256;
        EnumResult cands = s.enumerate_models({H, g.player0}, unprimed, kFallback);
        sort_models_small_first(cands.models, g);
        bool found = false;
        Counterexample cex;
        for (const Assignment& m : cands.models) {
            ensure_time(deadline);
            Vertex v = model_vertex(g, m);
            std::vector<Vertex> succ = successors(g, v, s, succ_cap);
            bool some_in = false;
            for (const Vertex& w : succ)
                if (vertex_in(H, g, w)) { some_in = true; break; }
            if (!some_in) {
                cex = {Counterexample::Kind::Existential, v, std::move(succ)};
                found = true;
                break;
            }
        }
        if (found) return {false, cex};
        if (cands.over_cap)
            throw TeacherError("existential check inconclusive: quantified query unknown and " +
                               std::to_string(kFallback) + " enumerated candidates are all closed");
        // enumeration was exhaustive and found nothing: check genuinely passes
    }

    // 4. Universal closedness at player-1 vertices: an edge from H & !P0
    //    leaving H breaks the hypothesis.
    SatResult r4 = check_small(s, g, {H, Formula::negate(g.player0), g.edges, Formula::negate(Hn)}, unprimed, deadline);
    if (r4.is_sat()) {
        Vertex v = model_vertex(g, r4.model);
        return {false, Counterexample{Counterexample::Kind::Universal, v, successors(g, v, s, succ_cap)}};
    }
    if (r4.is_unknown()) throw TeacherError("universal check inconclusive: " + r4.reason);

    return {true, std::nullopt};
}

bool refutes(const GameDef& g, const Hypothesis& h, const Counterexample& cex) {
    const Formula& H = h.formula;
    switch (cex.kind) {
    case Counterexample::Kind::Positive:
        return vertex_in(g.init, g, cex.v) && !vertex_in(H, g, cex.v);
    case Counterexample::Kind::Negative:
        return vertex_in(H, g, cex.v) && !vertex_in(g.safe, g, cex.v);
    case Counterexample::Kind::Existential: {
        if (!vertex_in(H, g, cex.v) || !is_player0(g, cex.v)) return false;
        for (const Vertex& w : cex.succs)
            if (vertex_in(H, g, w)) return false;
        return true;
    }
    case Counterexample::Kind::Universal: {
        if (!vertex_in(H, g, cex.v) || is_player0(g, cex.v)) return false;
        for (const Vertex& w : cex.succs)
            if (!vertex_in(H, g, w)) return true;
        return false;
    }
    }
    return false;
}

void apply_counterexample(GameSample& s, const Counterexample& cex, int origin) {
    switch (cex.kind) {
    case Counterexample::Kind::Positive: s.add_positive(cex.v, origin); break;
    case Counterexample::Kind::Negative: s.add_negative(cex.v, origin); break;
    case Counterexample::Kind::Existential: s.add_existential(cex.v, cex.succs, origin); break;
    case Counterexample::Kind::Universal: s.add_universal(cex.v, cex.succs, origin); break;
    }
}

} // namespace gamesynth
