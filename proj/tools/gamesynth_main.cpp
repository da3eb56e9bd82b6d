#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gamesynth/cegis.hpp"
#include "gamesynth/oracle.hpp"
#include "gamesynth/sexpr.hpp"

namespace fs = std::filesystem;
using namespace gamesynth;
using json = nlohmann::json;

namespace {

// exit codes: 0 solved/yes/safe, 1 exhausted/no/unsafe, 2 unrealizable,
//             3 solver or teacher failure, 4 usage or parse error
constexpr int kOk = 0, kNo = 1, kUnrealizable = 2, kEngineError = 3, kUsage = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << content;
}

GameDef load_game(const std::string& path) {
    return parse_game(read_file(path), fs::path(path).stem().string());
}

SolverConfig make_solver(const std::string& solver_cmd, int query_timeout_ms) {
    SolverConfig cfg;
    if (!solver_cmd.empty()) {
        std::stringstream ss(solver_cmd);
        std::string w;
        while (ss >> w) cfg.command.push_back(w);
        if (cfg.command.empty()) throw UsageError("empty --solver-cmd");
    } else {
        cfg = default_solver_config();
    }
    cfg.timeout_ms = query_timeout_ms;
    return cfg;
}

Vertex parse_vertex_arg(const std::string& s) {
    std::string t = s;
    if (!t.empty() && t.front() == '(') {
        if (t.back() != ')') throw UsageError("bad vertex '" + s + "'");
        t = t.substr(1, t.size() - 2);
    }
    Vertex v;
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            size_t used = 0;
            v.push_back(std::stoll(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (...) {
            throw UsageError("bad vertex coordinate '" + part + "' in '" + s + "'");
        }
    }
    if (v.empty()) throw UsageError("empty vertex '" + s + "'");
    return v;
}

Box parse_box_arg(const GameDef& g, const std::string& spec) {
    // name=lo..hi, comma separated, one entry per game variable
    std::map<std::string, std::pair<Int, Int>> ranges;
    std::stringstream ss(spec);
    std::string entry;
    while (std::getline(ss, entry, ',')) {
        size_t eq = entry.find('=');
        size_t dots = entry.find("..");
        if (eq == std::string::npos || dots == std::string::npos || dots < eq)
            throw UsageError("bad box entry '" + entry + "' (want name=lo..hi)");
        std::string name = entry.substr(0, eq);
        try {
            Int lo = std::stoll(entry.substr(eq + 1, dots - eq - 1));
            Int hi = std::stoll(entry.substr(dots + 2));
            if (lo > hi) throw UsageError("inverted range in '" + entry + "'");
            if (!ranges.emplace(name, std::make_pair(lo, hi)).second)
                throw UsageError("duplicate box entry for '" + name + "'");
        } catch (const UsageError&) {
            throw;
        } catch (...) {
            throw UsageError("bad bounds in '" + entry + "'");
        }
    }
    Box box;
    for (const std::string& v : g.variables) {
        auto it = ranges.find(v);
        if (it == ranges.end()) throw UsageError("box is missing variable '" + v + "'");
        box.ranges.push_back(it->second);
        ranges.erase(it);
    }
    if (!ranges.empty()) throw UsageError("box mentions unknown variable '" + ranges.begin()->first + "'");
    return box;
}

Hypothesis load_hypothesis(const GameDef& g, const std::string& tree_path,
                           const std::string& formula_path) {
    if (tree_path.empty() == formula_path.empty())
        throw UsageError("exactly one of --tree / --formula is required");
    Hypothesis h;
    if (!tree_path.empty()) {
        DecisionTree t = tree_from_sexpr(read_file(tree_path), g.variables);
        h.tree = t;
        h.formula = tree_to_formula(t, g.variables);
    } else {
        h.formula = parse_formula(read_file(formula_path));
        for (const VarRef& v : free_vars(h.formula)) {
            if (v.primed) throw UsageError("hypothesis formula must not mention primed variables");
            if (std::find(g.variables.begin(), g.variables.end(), v.name) == g.variables.end())
                throw UsageError("hypothesis formula mentions unknown variable '" + v.name + "'");
        }
    }
    return h;
}

void print_validation(const GameDef& g, const Validation& val) {
    for (const std::string& w : g.warnings) std::cerr << "warning: " << w << "\n";
    if (val.init_nonempty == Validation::Status::Violated)
        std::cerr << "warning: the initial set is empty\n";
    if (val.totality == Validation::Status::Violated)
        std::cerr << "warning: edge relation is not total; stuck vertex "
                  << vertex_to_string(*val.stuck_vertex) << "\n";
    for (const std::string& v : val.unconstrained_primed)
        std::cerr << "warning: " << v << "' is unconstrained by the edge relation\n";
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
    std::string game_path;
    int max_iterations = 10000;
    double timeout_secs = 0;          // 0: none
    std::string solver_cmd;
    int succ_cap = 64;
    std::string octagonal = "on";
    std::string emit_tree, emit_formula, trace, out_dir;
    int query_timeout_ms = 30000;
    bool json_out = false;
};

int cmd_solve(const SolveArgs& a) {
    GameDef g = load_game(a.game_path);

    CegisConfig cfg;
    cfg.max_iterations = a.max_iterations;
    cfg.solver = make_solver(a.solver_cmd, a.query_timeout_ms);
    cfg.succ_cap = a.succ_cap;
    cfg.octagonal = a.octagonal == "on";
    if (a.timeout_secs > 0) cfg.timeout_secs = a.timeout_secs;
    if (!a.trace.empty()) cfg.trace_path = a.trace;

    {
        Session s(cfg.solver);
        s.declare_vars(g.variables);
        print_validation(g, validate(g, s));
    }

    CegisResult r = solve(g, cfg);

    json artifacts = json::object();
    if (r.kind == CegisResult::Kind::Solved) {
        fs::path dir = a.out_dir.empty() ? fs::path(".") : fs::path(a.out_dir);
        if (!a.out_dir.empty()) fs::create_directories(dir);
        std::string stem = g.name.empty() ? "game" : g.name;
        std::string tree_path = a.emit_tree.empty() ? (dir / (stem + ".tree")).string() : a.emit_tree;
        std::string dot_path = (dir / (stem + ".dot")).string();
        std::string formula_path =
            a.emit_formula.empty() ? (dir / (stem + ".smt2")).string() : a.emit_formula;
        write_file(tree_path, tree_to_sexpr(*r.tree, g.variables) + "\n");
        write_file(dot_path, tree_to_dot(*r.tree, g.variables));
        write_file(formula_path, render(r.formula) + "\n");
        artifacts = {{"tree", tree_path}, {"dot", dot_path}, {"formula", formula_path}};
        if (!a.trace.empty()) artifacts["trace"] = a.trace;
    }

    if (a.json_out) {
        json rep{{"game", g.name},
                 {"outcome", CegisResult::kind_name(r.kind)},
                 {"iterations", r.stats.iterations},
                 {"tree_size", r.stats.tree_size},
                 {"counterexamples",
                  {{"positive", r.stats.positive},
                   {"negative", r.stats.negative},
                   {"existential", r.stats.existential},
                   {"universal", r.stats.universal}}},
                 {"learner_ms", r.stats.learner_ms},
                 {"teacher_ms", r.stats.teacher_ms},
                 {"wall_ms", r.stats.total_ms},
                 {"artifacts", artifacts}};
        if (!r.detail.empty()) rep["detail"] = r.detail;
        if (r.kind == CegisResult::Kind::Unrealizable) {
            json chain = json::array();
            for (const ConflictEntry& e : r.conflict_chain)
                chain.push_back({{"iteration", e.iteration}, {"counterexample", e.origin.describe()}});
            rep["conflict_chain"] = chain;
        }
        std::cout << rep.dump() << "\n";
    } else {
        std::cout << "game=" << g.name << " outcome=" << CegisResult::kind_name(r.kind)
                  << " iterations=" << r.stats.iterations << " tree_size=" << r.stats.tree_size
                  << " pos=" << r.stats.positive << " neg=" << r.stats.negative
                  << " ex=" << r.stats.existential << " un=" << r.stats.universal << " wall_ms="
                  << static_cast<long long>(r.stats.total_ms) << "\n";
        if (!r.detail.empty()) std::cout << "detail: " << r.detail << "\n";
        if (r.kind == CegisResult::Kind::Solved) {
            std::cout << "tree: " << tree_to_sexpr(*r.tree, g.variables) << "\n";
            for (auto& [k, v] : artifacts.items()) std::cout << k << ": " << v.get<std::string>() << "\n";
        }
        if (r.kind == CegisResult::Kind::Unrealizable) {
            std::cout << "conflict chain:\n";
            for (const ConflictEntry& e : r.conflict_chain)
                std::cout << "  iteration " << e.iteration << ": " << e.origin.describe() << "\n";
        }
    }

    switch (r.kind) {
    case CegisResult::Kind::Solved: return kOk;
    case CegisResult::Kind::Exhausted: return kNo;
    case CegisResult::Kind::Unrealizable: return kUnrealizable;
    case CegisResult::Kind::TeacherFailure: return kEngineError;
    }
    return kEngineError;
}

// --- check -----------------------------------------------------------------

int cmd_check(const std::string& game_path, const std::string& tree_path,
              const std::string& formula_path, const std::string& solver_cmd, int succ_cap,
              int query_timeout_ms) {
    GameDef g = load_game(game_path);
    Hypothesis h = load_hypothesis(g, tree_path, formula_path);
    Session s(make_solver(solver_cmd, query_timeout_ms));
    s.declare_vars(g.variables);
    TeacherResult tr = check_hypothesis(g, h, s, succ_cap);
    if (tr.yes) {
        std::cout << "yes: the set is a winning set\n";
        return kOk;
    }
    std::cout << "no: " << tr.cex->describe() << "\n";
    return kNo;
}

// --- oracle ----------------------------------------------------------------

int cmd_oracle(const std::string& game_path, const std::string& box_spec,
               const std::string& solver_cmd, int succ_cap, int query_timeout_ms, bool dump) {
    GameDef g = load_game(game_path);
    Box box = parse_box_arg(g, box_spec);
    Session s(make_solver(solver_cmd, query_timeout_ms));
    s.declare_vars(g.variables);
    ExplicitGame eg = truncate(g, box, s, succ_cap);
    int rounds = 0;
    std::set<Vertex> w = fixpoint_solve(eg, &rounds);

    size_t inits = 0, covered = 0;
    for (size_t i = 0; i < eg.size(); i++) {
        if (!eg.init[i]) continue;
        inits++;
        if (w.count(eg.vertices[i])) covered++;
    }
    std::cout << "vertices=" << eg.size() << " winning=" << w.size() << " rounds=" << rounds
              << " init_covered=" << covered << "/" << inits << "\n";
    std::cout << (inits > 0 && covered == inits ? "init is inside the winning region\n"
                                                : "init is NOT fully inside the winning region\n");
    if (dump)
        for (const Vertex& v : w) std::cout << vertex_to_string(v) << "\n";
    return kOk;
}

// --- simulate ----------------------------------------------------------------

int cmd_simulate(const std::string& game_path, const std::string& tree_path,
                 const std::string& formula_path, const std::string& start, int steps,
                 std::uint64_t seed, const std::string& script_path, const std::string& solver_cmd,
                 int succ_cap, int query_timeout_ms) {
    GameDef g = load_game(game_path);
    Hypothesis h = load_hypothesis(g, tree_path, formula_path);
    Session s(make_solver(solver_cmd, query_timeout_ms));
    s.declare_vars(g.variables);

    Vertex v0;
    if (!start.empty()) {
        v0 = parse_vertex_arg(start);
        if (v0.size() != g.variables.size()) throw UsageError("start vertex has wrong arity");
    } else {
        std::vector<VarRef> unprimed;
        for (const std::string& n : g.variables) unprimed.push_back({n, false});
        SatResult r = s.check({g.init}, unprimed);
        if (!r.is_sat()) throw UsageError("no --start given and the initial set is empty");
        for (const std::string& n : g.variables) v0.push_back(r.model.get({n, false}));
    }

    Adversary adv = RandomAdversary{seed};
    if (!script_path.empty()) {
        ScriptedAdversary sa;
        std::stringstream ss(read_file(script_path));
        std::string line;
        while (std::getline(ss, line)) {
            std::string t;
            for (char c : line)
                if (c != ' ' && c != '\t' && c != '\r') t.push_back(c);
            if (t.empty() || t[0] == '#') continue;
            sa.moves.push_back(parse_vertex_arg(t));
        }
        adv = std::move(sa);
    }

    PlayTrace tr = simulate(g, h, v0, steps, adv, s, succ_cap);
    for (size_t i = 0; i < tr.states.size(); i++) {
        bool safe = vertex_in(g.safe, g, tr.states[i]);
        std::cout << i << ": " << vertex_to_string(tr.states[i]) << (safe ? "" : "  UNSAFE") << "\n";
    }
    std::cout << (tr.safe_throughout ? "result: safe for " + std::to_string(tr.states.size() - 1) + " steps"
                                     : "result: UNSAFE at step " + std::to_string(tr.first_unsafe))
              << "\n";
    return tr.safe_throughout ? kOk : kNo;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthesis of safety controllers over infinite game graphs"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "synthesize a controller for a game");
    solve_cmd->add_option("game", sa.game_path, "game file")->required();
    solve_cmd->add_option("--max-iterations", sa.max_iterations, "iteration budget");
    solve_cmd->add_option("--timeout-secs", sa.timeout_secs, "overall wallclock budget");
    solve_cmd->add_option("--solver-cmd", sa.solver_cmd, "SMT solver command line");
    solve_cmd->add_option("--succ-cap", sa.succ_cap, "successor enumeration cap");
    solve_cmd->add_option("--octagonal", sa.octagonal, "octagonal predicates (on/off)")
        ->check(CLI::IsMember({"on", "off"}));
    solve_cmd->add_option("--emit-tree", sa.emit_tree, "path for the tree artifact");
    solve_cmd->add_option("--emit-formula", sa.emit_formula, "path for the formula artifact");
    solve_cmd->add_option("--trace", sa.trace, "JSONL iteration trace path");
    solve_cmd->add_option("--out-dir", sa.out_dir, "directory for default artifacts");
    solve_cmd->add_option("--query-timeout-ms", sa.query_timeout_ms, "per-query solver budget");
    solve_cmd->add_flag("--json", sa.json_out, "machine-readable report");

    std::string game_path, tree_path, formula_path, solver_cmd, box_spec, start, script_path;
    int succ_cap = 64, steps = 100, query_timeout_ms = 30000;
    std::uint64_t seed = 0;
    bool dump = false;

    auto* check_cmd = app.add_subcommand("check", "ask the teacher about a candidate winning set");
    check_cmd->add_option("game", game_path, "game file")->required();
    check_cmd->add_option("--tree", tree_path, "candidate as a decision tree");
    check_cmd->add_option("--formula", formula_path, "candidate as a formula");
    check_cmd->add_option("--solver-cmd", solver_cmd, "SMT solver command line");
    check_cmd->add_option("--succ-cap", succ_cap, "successor enumeration cap");
    check_cmd->add_option("--query-timeout-ms", query_timeout_ms, "per-query solver budget");

    auto* oracle_cmd = app.add_subcommand("oracle", "finite-box ground truth for a game");
    oracle_cmd->add_option("game", game_path, "game file")->required();
    oracle_cmd->add_option("--box", box_spec, "per-variable ranges, e.g. x=-5..8,y=0..1")->required();
    oracle_cmd->add_option("--solver-cmd", solver_cmd, "SMT solver command line");
    oracle_cmd->add_option("--succ-cap", succ_cap, "successor enumeration cap");
    oracle_cmd->add_option("--query-timeout-ms", query_timeout_ms, "per-query solver budget");
    oracle_cmd->add_flag("--dump", dump, "list the winning vertices");

    auto* sim_cmd = app.add_subcommand("simulate", "play the synthesized controller");
    sim_cmd->add_option("game", game_path, "game file")->required();
    sim_cmd->add_option("--tree", tree_path, "controller as a decision tree");
    sim_cmd->add_option("--formula", formula_path, "controller as a formula");
    sim_cmd->add_option("--start", start, "start vertex, e.g. (0,0)");
    sim_cmd->add_option("--steps", steps, "number of moves to play");
    sim_cmd->add_option("--seed", seed, "random adversary seed");
    sim_cmd->add_option("--script", script_path, "scripted adversary move file");
    sim_cmd->add_option("--solver-cmd", solver_cmd, "SMT solver command line");
    sim_cmd->add_option("--succ-cap", succ_cap, "successor enumeration cap");
    sim_cmd->add_option("--query-timeout-ms", query_timeout_ms, "per-query solver budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(sa);
        if (check_cmd->parsed())
            return cmd_check(game_path, tree_path, formula_path, solver_cmd, succ_cap,
                             query_timeout_ms);
        if (oracle_cmd->parsed())
            return cmd_oracle(game_path, box_spec, solver_cmd, succ_cap, query_timeout_ms, dump);
        if (sim_cmd->parsed())
            return cmd_simulate(game_path, tree_path, formula_path, start, steps, seed, script_path,
                                solver_cmd, succ_cap, query_timeout_ms);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kUsage;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kEngineError;
    } catch (const TeacherError& e) {
        std::cerr << "teacher error: " << e.what() << "\n";
        return kEngineError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kEngineError;
    }
    return kUsage;
}
