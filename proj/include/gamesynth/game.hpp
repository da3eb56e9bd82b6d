#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gamesynth/formula.hpp"

namespace gamesynth {

class Session;

// A safety game over Z^n given symbolically: vertex set is all integer
// vectors; `player0` carves out the vertices where player 0 moves; `edges`
// relates unprimed to primed variables.  Safe/init are vertex predicates.
struct GameDef {
    std::string name;                      // derived from the file, may be empty
    std::vector<std::string> variables;    // declaration order is vertex coordinate order
    Formula player0 = Formula::bottom();
    Formula init = Formula::bottom();
    Formula safe = Formula::top();
    Formula edges = Formula::bottom();
    std::vector<std::string> warnings;     // parse-time notes (duplicates removed etc.)

    int arity() const { return static_cast<int>(variables.size()); }
};

using Vertex = std::vector<Int>;

// Parse the s-expression game format:
//   (game (vars x y) (player0 F) (init F) (safe F) (edges F))
// Sections may appear in any order; each exactly once.  Variable names must
// be distinct and must not end in _next (reserved for primed copies).
GameDef parse_game(std::string_view text, std::string_view name = "");

// Bind a vertex (resp. an edge) to the game variables by declaration order.
Assignment vertex_assignment(const GameDef& g, const Vertex& v);
Assignment edge_assignment(const GameDef& g, const Vertex& v, const Vertex& w);

bool vertex_in(const Formula& f, const GameDef& g, const Vertex& v);
bool is_player0(const GameDef& g, const Vertex& v);

std::string vertex_to_string(const Vertex& v);

// Successor set E({v}), enumerated through the solver; sorted lexicographically.
// Throws SolverError if the count exceeds `cap` (infinite branching guard).
std::vector<Vertex> successors(const GameDef& g, const Vertex& v, Session& s, int cap);

// Well-formedness checks that need the solver: init nonempty and edge totality.
struct Validation {
    enum class Status { Ok, Violated, Inconclusive };
    Status init_nonempty = Status::Ok;
    Status totality = Status::Ok;
    std::optional<Vertex> init_witness;        // a concrete initial vertex when Ok
    std::optional<Vertex> stuck_vertex;        // a vertex with no successors when Violated
    std::vector<std::string> unconstrained_primed;  // primed vars the edge relation never mentions
    bool ok() const {
        return init_nonempty == Status::Ok && totality == Status::Ok;
    }
};
Validation validate(const GameDef& g, Session& s);

} // namespace gamesynth
