#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gamesynth/game.hpp"
#include "gamesynth/learner.hpp"
#include "gamesynth/solver.hpp"
#include "gamesynth/teacher.hpp"

namespace gamesynth {

struct CegisConfig {
    int max_iterations = 10000;
    SolverConfig solver = default_solver_config();
    int succ_cap = 64;
    bool octagonal = true;
    std::optional<std::string> trace_path;   // JSONL, one record per iteration
    std::optional<double> timeout_secs;      // overall wallclock budget
    bool check_honesty = true;               // assert refutes() on every counterexample
};

struct Stats {
    int iterations = 0;                      // hypotheses proposed (final Yes round included)
    int positive = 0, negative = 0, existential = 0, universal = 0;
    int tree_size = 0;                       // inner nodes of the final tree
    double teacher_ms = 0, learner_ms = 0, total_ms = 0;
};

// One step of an unrealizability proof: the constraint that participated in
// the Horn conflict, the counterexample it came from, and the hypothesis that
// counterexample refuted.
struct ConflictEntry {
    HornConstraint constraint;
    Counterexample origin;
    Formula hypothesis = Formula::bottom();
    int iteration = 0;
};

struct CegisResult {
    enum class Kind { Solved, Unrealizable, Exhausted, TeacherFailure };
    Kind kind = Kind::Exhausted;
    std::optional<DecisionTree> tree;        // Solved
    Formula formula = Formula::bottom();     // Solved
    std::vector<ConflictEntry> conflict_chain;  // Unrealizable
    Stats stats;
    std::string detail;                      // reason for Exhausted/TeacherFailure
    static const char* kind_name(Kind k);
};

// The synthesis loop: learner proposes, teacher refutes, until Yes (then the
// winning set is re-verified in a fresh solver session), the sample becomes
// contradictory (Unrealizable), or a resource bound trips.
CegisResult solve(const GameDef& g, const CegisConfig& cfg);

// Controller extraction: at a player-0 vertex v inside the winning set, pick
// the lexicographically least successor that stays inside.  Throws on
// contract violations (v not player 0 / not in the set / no safe successor).
Vertex controller_step(const GameDef& g, const Hypothesis& h, const Vertex& v, Session& s, int cap);

} // namespace gamesynth
