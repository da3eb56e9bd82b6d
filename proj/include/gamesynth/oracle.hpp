#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gamesynth/cegis.hpp"
#include "gamesynth/game.hpp"

namespace gamesynth {

// ---------------------------------------------------------------------------
// Finite explicit games, used as ground truth against the symbolic pipeline.

struct ExplicitGame {
    std::vector<Vertex> vertices;            // id -> coordinates
    std::map<Vertex, int> index;             // coordinates -> id
    std::vector<int> owner;                  // 0 or 1
    std::vector<std::vector<int>> succs;     // adjacency by id
    std::vector<char> init, safe;            // membership flags by id

    int add_vertex(Vertex v, int own);
    int id_of(const Vertex& v) const;        // -1 when absent
    size_t size() const { return vertices.size(); }
};

struct Box {
    // Inclusive per-variable ranges, in game variable order.
    std::vector<std::pair<Int, Int>> ranges;
    bool contains(const Vertex& v) const;
    std::vector<Vertex> all_vertices() const;
};

// Restrict a symbolic game to a box.  Successors are enumerated through the
// solver; edges leaving the box are dropped, and a vertex that loses *all*
// successors to the truncation is marked unsafe (conservative: it cannot be
// declared winning on the finite fragment).
ExplicitGame truncate(const GameDef& g, const Box& box, Session& s, int cap);

// Greatest winning region by iterated removal: drop unsafe vertices, then
// player-0 vertices with no remaining successor and player-1 vertices with a
// removed successor, until stable.  `rounds_out` reports removal rounds.
std::set<Vertex> fixpoint_solve(const ExplicitGame& eg, int* rounds_out = nullptr);

// Extensional check of the winning-set conditions for an arbitrary candidate.
bool check_winning_set_explicit(const ExplicitGame& eg, const std::set<Vertex>& w);

// ---------------------------------------------------------------------------
// Closed-loop simulation of a synthesized controller.

struct RandomAdversary { std::uint64_t seed = 0; };
struct ScriptedAdversary { std::vector<Vertex> moves; };
using Adversary = std::variant<RandomAdversary, ScriptedAdversary>;

struct PlayTrace {
    std::vector<Vertex> states;
    bool safe_throughout = true;
    int first_unsafe = -1;                   // index into states, -1 if none
};

// Alternate controller_step on player-0 vertices with adversary choices on
// player-1 vertices for `steps` moves.  Deterministic given the adversary.
PlayTrace simulate(const GameDef& g, const Hypothesis& h, const Vertex& v0, int steps,
                   const Adversary& adv, Session& s, int cap);

// ---------------------------------------------------------------------------
// Explicit-game text format and the LIA embedding.
//
//   # comment
//   0 (0,1) -> (1,1),(0,0)
//   1 (1,1) -> (0,1)
//   #init
//   (0,1)
//   #safe
//   (0,1) (1,1)
ExplicitGame parse_explicit_game(std::string_view text);
std::string explicit_to_text(const ExplicitGame& eg);

// Embed a finite game into the symbolic format: table disjunctions for
// ownership/init/safe/edges, plus an unsafe self-loop on everything outside
// the vertex table so the edge relation stays total over Z^n.  The symbolic
// game's winning region restricted to the table equals the explicit one's.
GameDef explicit_to_lia(const ExplicitGame& eg);

// Random m x m grid games: ownership by coordinate parity, out-degree 1..3,
// ~85% safe vertices, 1-2 initial vertices.  Deterministic in the seed.
ExplicitGame random_explicit_game(std::uint64_t seed, int m);

} // namespace gamesynth
