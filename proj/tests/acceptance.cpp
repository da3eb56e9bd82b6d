// Acceptance gate: one self-contained check per release criterion, each
// reported as exactly one PASS/FAIL line.  Run all with no arguments or a
// single one with --criterion N.  Exits nonzero if any selected criterion
// fails.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gamesynth/buildinfo.hpp"
#include "gamesynth/cegis.hpp"
#include "gamesynth/oracle.hpp"
#include "test_support.hpp"

using namespace gamesynth;
using Clock = std::chrono::steady_clock;

namespace {

double secs_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw Failure(msg);
}

std::string fmt_secs(double s) {
    std::ostringstream os;
    os.precision(1);
    os << std::fixed << s << " s";
    return os.str();
}

// Shared with the learner tests: Horn clause satisfaction under a total
// labeling given as the set of true points.
bool satisfies(const std::set<Point>& truth, const HornConstraint& c) {
    for (const Point& a : c.antecedents)
        if (!truth.count(a)) return true;
    return c.consequent && truth.count(*c.consequent) > 0;
}

HornConstraint make_hc(std::vector<Point> ante, std::optional<Point> cons) {
    std::sort(ante.begin(), ante.end());
    ante.erase(std::unique(ante.begin(), ante.end()), ante.end());
    HornConstraint c;
    c.antecedents = std::move(ante);
    c.consequent = std::move(cons);
    return c;
}

void fresh_recheck(const GameDef& g, const CegisResult& r, int succ_cap) {
    Session s;
    s.declare_vars(g.variables);
    Hypothesis h;
    h.formula = r.formula;
    h.tree = r.tree;
    require(check_hypothesis(g, h, s, succ_cap).yes,
            g.name + ": fresh-session re-check rejected the winning set");
}

// --- criterion 1: worked example end to end --------------------------------

std::string criterion1() {
    auto t0 = Clock::now();
    GameDef g = ts::load_benchmark("box1d.game");
    CegisConfig cfg;
    cfg.max_iterations = 50;
    CegisResult r = solve(g, cfg);
    double el = secs_since(t0);

    require(r.kind == CegisResult::Kind::Solved, "box1d not solved: " + r.detail);
    require(r.stats.iterations <= 50, "took more than 50 iterations");
    require(el < 10.0, "took " + fmt_secs(el) + " (budget 10 s)");
    fresh_recheck(g, r, 64);
    require(vertex_in(r.formula, g, {0, 0}), "winning set misses (0,0)");
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<Int> dx(-100, -1), dy(-50, 50);
    for (int k = 0; k < 100; k++) {
        Vertex v{dx(rng), dy(rng)};
        require(!vertex_in(r.formula, g, v),
                "winning set contains " + vertex_to_string(v) + " with x < 0");
    }
    std::ostringstream os;
    os << "box1d solved in " << r.stats.iterations << " iterations, tree size "
       << r.stats.tree_size << ", " << fmt_secs(el)
       << "; re-checked, covers (0,0), excludes 100 x<0 samples";
    return os.str();
}

// --- criterion 2: benchmark suite -------------------------------------------

std::string criterion2() {
    struct Bench {
        const char* file;
        int ref_iters;  // reference iteration count; budget is 10x
        int ref_size;   // reference tree size; 4x is report-only
    };
    const Bench suite[] = {
        {"box.game", 9, 5},          {"box_limited.game", 4, 2}, {"diagonal.game", 23, 5},
        {"evasion.game", 6, 3},      {"follow.game", 11, 5},     {"solitary_box.game", 4, 2},
        {"square5x5.game", 61, 12},
    };

    std::ostringstream os;
    std::string warns;
    for (const Bench& b : suite) {
        GameDef g = ts::load_benchmark(b.file);
        CegisConfig cfg;
        cfg.max_iterations = 10 * b.ref_iters;
        cfg.timeout_secs = 900.0;
        auto t0 = Clock::now();
        CegisResult r = solve(g, cfg);
        double el = secs_since(t0);
        require(r.kind == CegisResult::Kind::Solved,
                g.name + " not solved (" + CegisResult::kind_name(r.kind) + ": " + r.detail +
                    ") after " + std::to_string(r.stats.iterations) + " iterations");
        require(el < 900.0, g.name + " exceeded 900 s");
        fresh_recheck(g, r, 64);
        if (r.stats.tree_size > 4 * b.ref_size)
            warns += " [note: " + g.name + " tree size " + std::to_string(r.stats.tree_size) +
                     " above expected " + std::to_string(4 * b.ref_size) + "]";
        os << g.name << " " << r.stats.iterations << "/" << r.stats.tree_size << " ";
    }

    // The water-bucket games are expected to exhaust their budget; solving
    // one counts as exceeding expectations, anything else is a fault.
    double budget = 120.0;
    if (const char* e = std::getenv("GAMESYNTH_ACCEPT_CINDERELLA_SECS")) budget = std::atof(e);
    for (const char* file : {"cinderella_c2.game", "cinderella_c3.game"}) {
        GameDef g = ts::load_benchmark(file);
        CegisConfig cfg;
        cfg.max_iterations = 1000000;
        cfg.timeout_secs = budget;
        cfg.succ_cap = 4096;
        CegisResult r = solve(g, cfg);
        if (r.kind == CegisResult::Kind::Solved) {
            fresh_recheck(g, r, 4096);
            os << g.name << " solved(!) ";
        } else {
            require(r.kind == CegisResult::Kind::Exhausted,
                    g.name + ": expected budget exhaustion, got " +
                        CegisResult::kind_name(r.kind) + " (" + r.detail + ")");
            os << g.name << " exhausted(" << fmt_secs(budget) << ") ";
        }
    }
    return "iterations/size: " + os.str() + warns;
}

// --- criterion 3: horn/game consistency duality -----------------------------

std::string criterion3() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(33);
    for (int k = 0; k < 1000; k++) {
        DecisionTree t = ts::random_tree(rng, 2, 3);
        GameSample s = ts::random_sample(rng, 2);
        bool horn_side = consistent_with_horn(t, game_to_horn(s));
        bool game_side = consistent_with_game(flip_leaves(t), s);
        require(horn_side == game_side, "duality mismatch at pair " + std::to_string(k));
    }
    double el = secs_since(t0);
    require(el < 30.0, "took " + fmt_secs(el) + " (budget 30 s)");
    return "1000 fuzzed pairs agree, " + fmt_secs(el);
}

// --- criterion 4: propagation vs exhaustive labeling search -----------------

std::string criterion4() {
    std::mt19937_64 rng(44);
    std::uniform_int_distribution<int> npts(1, 10), ncons(1, 8), nante(0, 3), coin(0, 9);
    for (int round = 0; round < 500; round++) {
        int n = npts(rng);
        std::uniform_int_distribution<Int> pt(0, n - 1);
        HornSample hs;
        std::set<Point> mentioned;
        int m = ncons(rng);
        for (int k = 0; k < m; k++) {
            std::vector<Point> ante;
            for (int a = nante(rng); a > 0; a--) ante.push_back({pt(rng)});
            std::optional<Point> cons;
            if (coin(rng) >= 4) cons = Point{pt(rng)};
            HornConstraint c = make_hc(std::move(ante), std::move(cons));
            for (const Point& p : c.antecedents) mentioned.insert(p);
            if (c.consequent) mentioned.insert(*c.consequent);
            hs.push_back(std::move(c));
        }

        std::vector<Point> pts(mentioned.begin(), mentioned.end());
        bool model_exists = false;
        for (unsigned mask = 0; mask < (1u << pts.size()) && !model_exists; mask++) {
            std::set<Point> truth;
            for (size_t i = 0; i < pts.size(); i++)
                if (mask & (1u << i)) truth.insert(pts[i]);
            bool ok = true;
            for (const auto& c : hs)
                if (!satisfies(truth, c)) { ok = false; break; }
            model_exists = ok;
        }
        bool conflict = horn_propagate(hs).conflict;
        require(conflict == !model_exists,
                "propagation disagrees with exhaustive search at round " + std::to_string(round));
    }
    return "500 samples, exact agreement with exhaustive search";
}

// --- criterion 5: learner consistency on satisfiable samples ----------------

std::string criterion5() {
    std::mt19937_64 rng(55);
    std::uniform_int_distribution<int> npts(2, 8), ncons(1, 8), nante(0, 3), coin(0, 1);
    for (int round = 0; round < 500; round++) {
        std::set<Point> ptset;
        int target = npts(rng);
        while ((int)ptset.size() < target) ptset.insert(ts::random_point(rng, 2, -6, 6));
        std::vector<Point> pts(ptset.begin(), ptset.end());
        std::set<Point> truth;
        for (const Point& p : pts)
            if (coin(rng)) truth.insert(p);
        auto pick = [&]() {
            return pts[std::uniform_int_distribution<size_t>(0, pts.size() - 1)(rng)];
        };
        HornSample hs;
        int m = ncons(rng);
        for (int k = 0; k < m; k++) {
            for (int attempt = 0; attempt < 12; attempt++) {
                std::vector<Point> ante;
                for (int a = nante(rng); a > 0; a--) ante.push_back(pick());
                std::optional<Point> cons;
                if (coin(rng)) cons = pick();
                HornConstraint c = make_hc(std::move(ante), std::move(cons));
                if (satisfies(truth, c)) {
                    hs.push_back(std::move(c));
                    break;
                }
            }
        }

        LearnOutcome out = learn_horn_tree(hs, generate_predicates(ptset, true));
        require(out.kind != LearnOutcome::Kind::Unsatisfiable,
                "learner called a satisfiable sample contradictory at round " +
                    std::to_string(round));
        require(out.kind == LearnOutcome::Kind::Tree,
                "learner returned no tree at round " + std::to_string(round));
        require(consistent_with_horn(*out.tree, hs),
                "returned tree is inconsistent at round " + std::to_string(round));
    }
    return "500 satisfiable samples, tree returned and consistent every time";
}

// --- criterion 6: finite-game convergence ------------------------------------

std::string criterion6() {
    int wins = 0, losses = 0;
    for (uint64_t seed = 1; seed <= 100; seed++) {
        int m = 3 + (int)(seed % 4);
        ExplicitGame eg = random_explicit_game(seed, m);
        std::set<Vertex> truth = fixpoint_solve(eg);
        bool p0_wins = true;
        for (size_t i = 0; i < eg.size(); i++)
            if (eg.init[i] && !truth.count(eg.vertices[i])) p0_wins = false;

        GameDef g = explicit_to_lia(eg);
        CegisConfig cfg;
        cfg.max_iterations = 2000;
        cfg.succ_cap = 16;
        cfg.timeout_secs = 120.0;
        CegisResult r = solve(g, cfg);

        std::string tag = "seed " + std::to_string(seed) + " (m=" + std::to_string(m) + ")";
        if (p0_wins) {
            require(r.kind == CegisResult::Kind::Solved,
                    tag + ": winnable but " + CegisResult::kind_name(r.kind) + " (" + r.detail +
                        ")");
            std::set<Vertex> w;
            for (const Vertex& v : eg.vertices)
                if (vertex_in(r.formula, g, v)) w.insert(v);
            require(check_winning_set_explicit(eg, w),
                    tag + ": synthesized set fails the extensional check");
            wins++;
        } else {
            require(r.kind != CegisResult::Kind::Solved,
                    tag + ": unwinnable but the loop claimed Solved");
            losses++;
        }
    }
    return "100 games sound (" + std::to_string(wins) + " winnable solved, " +
           std::to_string(losses) + " unwinnable never declared Solved)";
}

// --- criterion 7: unrealizability --------------------------------------------

std::string criterion7() {
    auto t0 = Clock::now();
    GameDef g = ts::load_benchmark("drift.game");
    CegisConfig cfg;
    cfg.max_iterations = 10;
    CegisResult r = solve(g, cfg);
    double el = secs_since(t0);

    require(r.kind == CegisResult::Kind::Unrealizable,
            "expected Unrealizable, got " + std::string(CegisResult::kind_name(r.kind)));
    require(r.stats.iterations <= 10, "took more than 10 iterations");
    require(el < 5.0, "took " + fmt_secs(el) + " (budget 5 s)");
    require(!r.conflict_chain.empty(), "no conflict chain attached");
    HornSample core;
    for (const ConflictEntry& e : r.conflict_chain) {
        Hypothesis h;
        h.formula = e.hypothesis;
        require(refutes(g, h, e.origin),
                "chain step from iteration " + std::to_string(e.iteration) +
                    " does not refute its hypothesis");
        core.push_back(e.constraint);
    }
    require(horn_propagate(core).conflict, "recorded constraints do not replay the conflict");
    std::ostringstream os;
    os << "drift unrealizable in " << r.stats.iterations << " iterations, " << fmt_secs(el)
       << ", witness replayed (" << core.size() << " constraints)";
    return os.str();
}

// --- criterion 8: closed-loop safety -----------------------------------------

std::string criterion8() {
    const char* files[] = {"box1d.game",    "box1d_parity.game", "box.game",
                           "box_limited.game", "diagonal.game",  "evasion.game",
                           "follow.game",   "solitary_box.game", "square5x5.game"};
    long long total_steps = 0;
    int games = 0;
    for (const char* file : files) {
        GameDef g = ts::load_benchmark(file);
        CegisConfig cfg;
        cfg.max_iterations = 1000;
        cfg.timeout_secs = 900.0;
        CegisResult r = solve(g, cfg);
        require(r.kind == CegisResult::Kind::Solved, g.name + " not solved: " + r.detail);
        Hypothesis h;
        h.formula = r.formula;
        h.tree = r.tree;

        Session s;
        s.declare_vars(g.variables);
        std::vector<VarRef> proj;
        for (const auto& n : g.variables) proj.push_back({n, false});
        EnumResult inits = s.enumerate_models({g.init}, proj, 32);
        require(!inits.over_cap && !inits.models.empty(), g.name + ": unusable initial set");
        std::vector<Vertex> starts;
        for (const Assignment& m : inits.models) {
            Vertex v;
            for (const auto& n : g.variables) v.push_back(m.get({n, false}));
            starts.push_back(std::move(v));
        }

        // Reachable closure under (controller x any adversary): at player-0
        // vertices only the controller's move is followed, at player-1
        // vertices every move is.  Every state in the closure must be safe;
        // random plays below then sample inside it without re-querying.
        std::map<Vertex, std::vector<Vertex>> succ_of; // P1: all; P0: the controller move
        std::vector<Vertex> work = starts;
        std::set<Vertex> seen(starts.begin(), starts.end());
        while (!work.empty()) {
            Vertex v = work.back();
            work.pop_back();
            require(vertex_in(g.safe, g, v),
                    g.name + ": reachable state " + vertex_to_string(v) + " is unsafe");
            require(vertex_in(h.formula, g, v),
                    g.name + ": play escapes the winning set at " + vertex_to_string(v));
            std::vector<Vertex> next;
            std::vector<Vertex> all = successors(g, v, s, 4096);
            if (is_player0(g, v)) {
                for (const Vertex& w : all)
                    if (vertex_in(h.formula, g, w)) { next = {w}; break; }
                require(!next.empty(),
                        g.name + ": controller stuck at " + vertex_to_string(v));
            } else {
                next = all;
            }
            succ_of[v] = next;
            for (const Vertex& w : next)
                if (seen.insert(w).second) work.push_back(w);
            require(seen.size() < 100000, g.name + ": closure blow-up");
        }

        // 100 plays of 200 steps each through the cached closure
        for (uint64_t seed = 0; seed < 100; seed++) {
            Vertex v = starts[seed % starts.size()];
            std::mt19937_64 rng(seed);
            for (int step = 0; step < 200; step++) {
                require(vertex_in(g.safe, g, v),
                        g.name + ": unsafe at step " + std::to_string(step) + " of play " +
                            std::to_string(seed));
                const std::vector<Vertex>& options = succ_of.at(v);
                if (options.size() == 1)
                    v = options[0];
                else
                    v = options[std::uniform_int_distribution<size_t>(0, options.size() - 1)(rng)];
                total_steps++;
            }
            require(vertex_in(g.safe, g, v), g.name + ": unsafe final state of play " +
                                                 std::to_string(seed));
        }

        // one play through the shipped simulator as an end-to-end cross-check
        PlayTrace t = simulate(g, h, starts[0], 200, RandomAdversary{7}, s, 4096);
        require(t.safe_throughout, g.name + ": simulate() reported a violation");
        games++;
    }
    std::ostringstream os;
    os << games << " solved games, 100 plays x 200 steps each (" << total_steps
       << " moves), zero safety violations";
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    int which = 0;
    for (int i = 1; i < argc; i++) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            which = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--criterion N]\n";
            return 2;
        }
    }

    const std::pair<int, std::function<std::string()>> criteria[] = {
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
        {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8},
    };

    bool all_ok = true;
    for (const auto& [n, fn] : criteria) {
        if (which != 0 && which != n) continue;
        try {
            std::string detail = fn();
            std::cout << "criterion " << n << ": PASS — " << detail << std::endl;
        } catch (const std::exception& e) {
            std::cout << "criterion " << n << ": FAIL — " << e.what() << std::endl;
            all_ok = false;
        }
    }
    return all_ok ? 0 : 1;
}
