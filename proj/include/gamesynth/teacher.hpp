#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gamesynth/game.hpp"
#include "gamesynth/learner.hpp"
#include "gamesynth/solver.hpp"

namespace gamesynth {

class TeacherError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a check runs past the caller's deadline; the loop treats it as
// budget exhaustion, not as a fault.
class TeacherTimeout : public TeacherError {
public:
    using TeacherError::TeacherError;
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

struct Hypothesis {
    Formula formula = Formula::bottom();
    std::optional<DecisionTree> tree;    // present when produced by the learner
};

struct Counterexample {
    enum class Kind { Positive, Negative, Existential, Universal };
    Kind kind = Kind::Positive;
    Vertex v;
    std::vector<Vertex> succs;           // exact E({v}) for Existential/Universal

    bool operator==(const Counterexample&) const = default;
    std::string describe() const;
    static const char* kind_name(Kind k);
};

struct TeacherResult {
    bool yes = false;
    std::optional<Counterexample> cex;
};

// The four closedness checks, in fixed order: initial coverage (I & !H),
// safety (H & !F), existential closedness on player-0 vertices, universal
// closedness on player-1 vertices.  The first failing check yields the
// counterexample, with successor sets enumerated exactly (up to succ_cap).
// A long check throws TeacherTimeout once `deadline` has passed.
TeacherResult check_hypothesis(const GameDef& g, const Hypothesis& h, Session& s, int succ_cap,
                               Deadline deadline = std::nullopt);

// Ground-truth check that a counterexample genuinely rules out a hypothesis;
// evaluated purely by formula evaluation, no solver involved.
bool refutes(const GameDef& g, const Hypothesis& h, const Counterexample& cex);

// Fold a counterexample into the sample (origin = counterexample log id).
void apply_counterexample(GameSample& s, const Counterexample& cex, int origin);

} // namespace gamesynth
