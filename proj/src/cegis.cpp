#include "gamesynth/cegis.hpp"

#include <chrono>
#include <fstream>

#include "json.hpp"

namespace gamesynth {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

const char* CegisResult::kind_name(Kind k) {
    switch (k) {
    case Kind::Solved: return "solved";
    case Kind::Unrealizable: return "unrealizable";
    case Kind::Exhausted: return "exhausted";
    case Kind::TeacherFailure: return "teacher-failure";
    }
    return "?";
}

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

json vertex_json(const Vertex& v) {
    json a = json::array();
    for (Int x : v) a.push_back(x);
    return a;
}

} // namespace

CegisResult solve(const GameDef& g, const CegisConfig& cfg) {
    auto t_start = Clock::now();
    CegisResult res;

    std::ofstream trace;
    if (cfg.trace_path) {
        trace.open(*cfg.trace_path, std::ios::trunc);
        if (!trace) throw std::runtime_error("cannot open trace file " + *cfg.trace_path);
    }
    auto emit_trace = [&](int iter, const std::string& kind, const Counterexample* cex,
                          const DecisionTree& tree) {
        if (!trace.is_open()) return;
        json rec{{"iter", iter},
                 {"cex_kind", kind},
                 {"tree", tree_to_sexpr(tree, g.variables)},
                 {"tree_size", tree.inner_nodes()},
                 {"elapsed_ms", ms_since(t_start)}};
        if (cex) {
            json c{{"v", vertex_json(cex->v)}};
            if (cex->kind == Counterexample::Kind::Existential ||
                cex->kind == Counterexample::Kind::Universal) {
                json ss = json::array();
                for (const Vertex& w : cex->succs) ss.push_back(vertex_json(w));
                c["succs"] = ss;
            }
            rec["cex"] = c;
        }
        trace << rec.dump() << "\n";
        trace.flush();
    };

    auto fail = [&](const std::string& detail) {
        res.kind = CegisResult::Kind::TeacherFailure;
        res.detail = detail;
        res.stats.total_ms = ms_since(t_start);
        return res;
    };

    Session session(cfg.solver);
    session.declare_vars(g.variables);

    Deadline deadline;
    if (cfg.timeout_secs)
        deadline = t_start + std::chrono::duration_cast<Clock::duration>(
                                 std::chrono::duration<double>(*cfg.timeout_secs));

    GameSample sample;
    std::vector<std::pair<Counterexample, Formula>> cex_log;

    for (int iter = 1; iter <= cfg.max_iterations; iter++) {
        if (cfg.timeout_secs && ms_since(t_start) > *cfg.timeout_secs * 1000.0) {
            res.kind = CegisResult::Kind::Exhausted;
            res.detail = "timeout after " + std::to_string(iter - 1) + " iterations";
            res.stats.total_ms = ms_since(t_start);
            return res;
        }
        res.stats.iterations = iter;

        auto t_learn = Clock::now();
        LearnerResult lr = learn_hypothesis(sample, g.arity(), cfg.octagonal);
        res.stats.learner_ms += ms_since(t_learn);

        if (lr.kind == LearnOutcome::Kind::Unsatisfiable) {
            // The sample itself is contradictory: no winning set can satisfy
            // it, and every point in it came from a genuine game fact, so the
            // game is unrealizable.  Reconstruct the chain of counterexamples
            // behind the propagation conflict.
            HornSample hs = game_to_horn(sample);
            for (int idx : lr.conflict_core) {
                const HornConstraint& hc = hs.at(idx);
                ConflictEntry e;
                e.constraint = hc;
                if (hc.origin >= 0 && hc.origin < static_cast<int>(cex_log.size())) {
                    e.origin = cex_log[hc.origin].first;
                    e.hypothesis = cex_log[hc.origin].second;
                    e.iteration = hc.origin + 1;
                }
                res.conflict_chain.push_back(std::move(e));
            }
            res.kind = CegisResult::Kind::Unrealizable;
            res.detail = "sample contradictory (" + std::to_string(lr.conflict_core.size()) +
                         " constraints in the conflict core)";
            res.stats.total_ms = ms_since(t_start);
            return res;
        }
        if (lr.kind == LearnOutcome::Kind::NoTree) {
            res.kind = CegisResult::Kind::Exhausted;
            res.detail = "no consistent tree over the predicate pool: " + lr.detail;
            res.stats.total_ms = ms_since(t_start);
            return res;
        }

        DecisionTree tree = *lr.hypothesis;
        Formula phi = tree_to_formula(tree, g.variables);
        Hypothesis h{phi, tree};

        if (!consistent_with_game(tree, sample))
            return fail("internal error: learner produced a sample-inconsistent tree at iteration " +
                        std::to_string(iter));
        if (!cex_log.empty() && refutes(g, h, cex_log.back().first))
            return fail("internal error: new hypothesis still refuted by the previous counterexample");

        TeacherResult tr;
        auto t_teach = Clock::now();
        try {
            tr = check_hypothesis(g, h, session, cfg.succ_cap, deadline);
        } catch (const TeacherTimeout&) {
            res.stats.teacher_ms += ms_since(t_teach);
            res.kind = CegisResult::Kind::Exhausted;
            res.detail = "timeout during teacher check after " + std::to_string(iter - 1) +
                         " completed iterations";
            res.stats.total_ms = ms_since(t_start);
            return res;
        } catch (const TeacherError& e) {
            res.stats.teacher_ms += ms_since(t_teach);
            return fail(e.what());
        } catch (const SolverError& e) {
            res.stats.teacher_ms += ms_since(t_teach);
            return fail(e.what());
        }
        res.stats.teacher_ms += ms_since(t_teach);

        if (tr.yes) {
            // Final answer: re-verify in a fresh solver session so the result
            // does not depend on accumulated session state.
            try {
                Session fresh(cfg.solver);
                fresh.declare_vars(g.variables);
                TeacherResult again = check_hypothesis(g, h, fresh, cfg.succ_cap, deadline);
                if (!again.yes)
                    return fail("re-verification failed: " +
                                (again.cex ? again.cex->describe() : std::string("no counterexample")));
            } catch (const TeacherTimeout&) {
                res.kind = CegisResult::Kind::Exhausted;
                res.detail = "timeout while re-verifying a candidate solution";
                res.stats.total_ms = ms_since(t_start);
                return res;
            } catch (const TeacherError& e) {
                return fail(std::string("re-verification errored: ") + e.what());
            } catch (const SolverError& e) {
                return fail(std::string("re-verification errored: ") + e.what());
            }
            emit_trace(iter, "yes", nullptr, tree);
            res.kind = CegisResult::Kind::Solved;
            res.tree = tree;
            res.formula = phi;
            res.stats.tree_size = tree.inner_nodes();
            res.stats.total_ms = ms_since(t_start);
            return res;
        }

        Counterexample cex = *tr.cex;
        if (cfg.check_honesty && !refutes(g, h, cex))
            return fail("internal error: teacher returned a non-refuting counterexample: " +
                        cex.describe());
        for (const auto& [old_cex, _] : cex_log)
            if (old_cex == cex)
                return fail("internal error: duplicate counterexample (no progress): " + cex.describe());

        switch (cex.kind) {
        case Counterexample::Kind::Positive: res.stats.positive++; break;
        case Counterexample::Kind::Negative: res.stats.negative++; break;
        case Counterexample::Kind::Existential: res.stats.existential++; break;
        case Counterexample::Kind::Universal: res.stats.universal++; break;
        }
        apply_counterexample(sample, cex, static_cast<int>(cex_log.size()));
        cex_log.emplace_back(cex, phi);
        emit_trace(iter, Counterexample::kind_name(cex.kind), &cex, tree);
    }

    res.kind = CegisResult::Kind::Exhausted;
    res.detail = "iteration budget (" + std::to_string(cfg.max_iterations) + ") exhausted";
    res.stats.total_ms = ms_since(t_start);
    return res;
}

Vertex controller_step(const GameDef& g, const Hypothesis& h, const Vertex& v, Session& s, int cap) {
    if (!is_player0(g, v))
        throw std::invalid_argument("controller_step at a player-1 vertex " + vertex_to_string(v));
    if (!vertex_in(h.formula, g, v))
        throw std::invalid_argument("controller_step outside the winning set at " + vertex_to_string(v));
    std::vector<Vertex> succ = successors(g, v, s, cap);
    for (const Vertex& w : succ)
        if (vertex_in(h.formula, g, w)) return w;  // sorted: first hit is lexicographically least
    throw std::runtime_error("hypothesis not existentially closed at " + vertex_to_string(v));
}

} // namespace gamesynth
