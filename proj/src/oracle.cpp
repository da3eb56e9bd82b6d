#include "gamesynth/oracle.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "gamesynth/sexpr.hpp"

namespace gamesynth {

// --- explicit games -------------------------------------------------------------

int ExplicitGame::add_vertex(Vertex v, int own) {
    auto it = index.find(v);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(vertices.size());
    index.emplace(v, id);
    vertices.push_back(std::move(v));
    owner.push_back(own);
    succs.emplace_back();
    init.push_back(0);
    safe.push_back(1);
    return id;
}

int ExplicitGame::id_of(const Vertex& v) const {
    auto it = index.find(v);
    return it == index.end() ? -1 : it->second;
}

bool Box::contains(const Vertex& v) const {
    if (v.size() != ranges.size()) return false;
    for (size_t i = 0; i < v.size(); i++)
        if (v[i] < ranges[i].first || v[i] > ranges[i].second) return false;
    return true;
}

std::vector<Vertex> Box::all_vertices() const {
    std::vector<Vertex> out;
    Vertex cur(ranges.size());
    std::function<void(size_t)> rec = [&](size_t k) {
        if (k == ranges.size()) {
            out.push_back(cur);
            return;
        }
        for (Int x = ranges[k].first; x <= ranges[k].second; x++) {
            cur[k] = x;
            rec(k + 1);
        }
    };
    if (!ranges.empty()) rec(0);
    return out;
}

ExplicitGame truncate(const GameDef& g, const Box& box, Session& s, int cap) {
    if (static_cast<int>(box.ranges.size()) != g.arity())
        throw std::invalid_argument("box arity does not match game arity");
    for (const auto& [lo, hi] : box.ranges)
        if (lo > hi) throw std::invalid_argument("inverted box range");

    ExplicitGame eg;
    std::vector<Vertex> verts = box.all_vertices();
    for (const Vertex& v : verts) eg.add_vertex(v, is_player0(g, v) ? 0 : 1);
    for (const Vertex& v : verts) {
        int id = eg.index.at(v);
        eg.init[id] = vertex_in(g.init, g, v) ? 1 : 0;
        eg.safe[id] = vertex_in(g.safe, g, v) ? 1 : 0;
        std::vector<Vertex> succ = successors(g, v, s, cap);
        bool had_any = !succ.empty();
        for (const Vertex& w : succ) {
            int wid = eg.id_of(w);
            if (wid >= 0) eg.succs[id].push_back(wid);
        }
        // A vertex whose every successor leaves the box cannot be judged on
        // the finite fragment; treat it as losing there.
        if (had_any && eg.succs[id].empty()) eg.safe[id] = 0;
    }
    return eg;
}

std::set<Vertex> fixpoint_solve(const ExplicitGame& eg, int* rounds_out) {
    size_t n = eg.size();
    std::vector<char> in(n, 1);
    for (size_t i = 0; i < n; i++) in[i] = eg.safe[i];

    int rounds = 0;  // scans that removed at least one vertex; at most |V|
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < n; i++) {
            if (!in[i]) continue;
            bool keep;
            if (eg.owner[i] == 0) {
                keep = false;
                for (int w : eg.succs[i])
                    if (in[w]) { keep = true; break; }
            } else {
                keep = true;
                for (int w : eg.succs[i])
                    if (!in[w]) { keep = false; break; }
                if (eg.succs[i].empty()) keep = false;  // stuck player-1 vertex loses too
            }
            if (!keep) {
                in[i] = 0;
                changed = true;
            }
        }
        if (changed) rounds++;
    }
    if (rounds_out) *rounds_out = rounds;

    std::set<Vertex> out;
    for (size_t i = 0; i < n; i++)
        if (in[i]) out.insert(eg.vertices[i]);
    return out;
}

bool check_winning_set_explicit(const ExplicitGame& eg, const std::set<Vertex>& w) {
    // init covered, safe respected, and the two closedness conditions.
    for (size_t i = 0; i < eg.size(); i++)
        if (eg.init[i] && !w.count(eg.vertices[i])) return false;
    for (const Vertex& v : w) {
        int id = eg.id_of(v);
        if (id < 0) return false;  // not even a vertex of the game
        if (!eg.safe[id]) return false;
        if (eg.owner[id] == 0) {
            bool some = false;
            for (int s : eg.succs[id])
                if (w.count(eg.vertices[s])) { some = true; break; }
            if (!some) return false;
        } else {
            for (int s : eg.succs[id])
                if (!w.count(eg.vertices[s])) return false;
        }
    }
    return true;
}

// --- simulation -------------------------------------------------------------------

PlayTrace simulate(const GameDef& g, const Hypothesis& h, const Vertex& v0, int steps,
                   const Adversary& adv, Session& s, int cap) {
    PlayTrace tr;
    tr.states.push_back(v0);

    std::mt19937_64 rng;
    size_t script_pos = 0;
    if (const auto* r = std::get_if<RandomAdversary>(&adv)) rng.seed(r->seed);

    // Plays revisit few distinct vertices, so successor sets are memoized for
    // the duration of the play rather than re-enumerated every step.
    std::map<Vertex, std::vector<Vertex>> memo;
    auto succ_of = [&](const Vertex& v) -> const std::vector<Vertex>& {
        auto it = memo.find(v);
        if (it == memo.end()) it = memo.emplace(v, successors(g, v, s, cap)).first;
        return it->second;
    };

    Vertex cur = v0;
    for (int k = 0; k < steps; k++) {
        Vertex next;
        if (is_player0(g, cur)) {
            // The controller plays: lexicographically least successor inside
            // the hypothesis, as in controller_step.  If the hypothesis offers
            // no safe move (possible when simulating an unverified set), fall
            // back to the least successor so the trace shows what goes wrong.
            const std::vector<Vertex>& succ = succ_of(cur);
            if (succ.empty()) break;
            bool stepped = false;
            if (vertex_in(h.formula, g, cur)) {
                for (const Vertex& w : succ)
                    if (vertex_in(h.formula, g, w)) {
                        next = w;
                        stepped = true;
                        break;
                    }
            }
            if (!stepped) next = succ.front();
        } else {
            const std::vector<Vertex>& succ = succ_of(cur);
            if (succ.empty()) break;
            if (const auto* r = std::get_if<RandomAdversary>(&adv)) {
                (void)r;
                std::uniform_int_distribution<size_t> pick(0, succ.size() - 1);
                next = succ[pick(rng)];
            } else {
                const auto& script = std::get<ScriptedAdversary>(adv).moves;
                if (script_pos >= script.size())
                    throw std::runtime_error("scripted adversary ran out of moves at step " +
                                             std::to_string(k));
                next = script[script_pos++];
                if (std::find(succ.begin(), succ.end(), next) == succ.end())
                    throw std::runtime_error("scripted move " + vertex_to_string(next) +
                                             " is not a successor of " + vertex_to_string(cur));
            }
        }
        cur = next;
        tr.states.push_back(cur);
    }

    for (size_t i = 0; i < tr.states.size(); i++) {
        if (!vertex_in(g.safe, g, tr.states[i])) {
            tr.safe_throughout = false;
            tr.first_unsafe = static_cast<int>(i);
            break;
        }
    }
    return tr;
}

// --- text format --------------------------------------------------------------------

namespace {

Vertex parse_vertex_tuple(const std::string& tok, int lineno) {
    if (tok.size() < 3 || tok.front() != '(' || tok.back() != ')')
        throw ParseError("expected (v1,v2,...) vertex, got '" + tok + "'", lineno, 1);
    Vertex v;
    std::stringstream ss(tok.substr(1, tok.size() - 2));
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            size_t used = 0;
            v.push_back(std::stoll(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (...) {
            throw ParseError("bad vertex coordinate '" + part + "'", lineno, 1);
        }
    }
    if (v.empty()) throw ParseError("empty vertex tuple", lineno, 1);
    return v;
}

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

ExplicitGame parse_explicit_game(std::string_view text) {
    ExplicitGame eg;
    std::vector<std::tuple<int, Vertex, std::vector<Vertex>>> edges;  // lineno, from, tos
    std::vector<std::pair<int, Vertex>> inits, safes;

    enum class Sect { Edges, Init, Safe } sect = Sect::Edges;
    std::stringstream ss{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(ss, raw)) {
        lineno++;
        std::string line = strip(raw);
        if (line.empty()) continue;
        if (line == "#init") { sect = Sect::Init; continue; }
        if (line == "#safe") { sect = Sect::Safe; continue; }
        if (line[0] == '#') continue;  // comment

        if (sect == Sect::Edges) {
            std::stringstream ls(line);
            int owner;
            std::string vtok, arrow, rest;
            if (!(ls >> owner >> vtok >> arrow) || (owner != 0 && owner != 1) || arrow != "->")
                throw ParseError("expected 'owner (v...) -> (w...),(w...)': " + line, lineno, 1);
            std::getline(ls, rest);
            Vertex v = parse_vertex_tuple(vtok, lineno);
            std::vector<Vertex> tos;
            std::string cur;
            for (char c : strip(rest)) {
                if (c == ' ' || c == '\t') continue;
                if (c == ',' && cur.empty()) continue;  // separator between tuples
                cur.push_back(c);
                if (c == ')') {
                    tos.push_back(parse_vertex_tuple(cur, lineno));
                    cur.clear();
                }
            }
            if (!cur.empty())
                throw ParseError("trailing garbage in successor list: '" + cur + "'", lineno, 1);
            if (tos.empty()) throw ParseError("vertex needs at least one successor", lineno, 1);
            eg.add_vertex(v, owner);
            edges.emplace_back(lineno, std::move(v), std::move(tos));
        } else {
            // one or more vertices per line
            std::string cur;
            for (char c : line) {
                if (c == ' ' || c == '\t') continue;
                if (c == ',' && cur.empty()) continue;
                cur.push_back(c);
                if (c == ')') {
                    (sect == Sect::Init ? inits : safes).emplace_back(lineno, parse_vertex_tuple(cur, lineno));
                    cur.clear();
                }
            }
            if (!cur.empty()) throw ParseError("trailing garbage: '" + cur + "'", lineno, 1);
        }
    }

    for (auto& [ln, v, tos] : edges) {
        int id = eg.index.at(v);
        for (Vertex& w : tos) {
            int wid = eg.id_of(w);
            if (wid < 0)
                throw ParseError("successor " + vertex_to_string(w) + " of " + vertex_to_string(v) +
                                 " has no own adjacency line", ln, 1);
            eg.succs[id].push_back(wid);
        }
        std::sort(eg.succs[id].begin(), eg.succs[id].end());
        eg.succs[id].erase(std::unique(eg.succs[id].begin(), eg.succs[id].end()), eg.succs[id].end());
    }
    // Default: nothing safe until listed; #safe section is mandatory in spirit,
    // so start from all-unsafe and mark what the file lists.
    std::fill(eg.safe.begin(), eg.safe.end(), 0);
    for (auto& [ln, v] : inits) {
        int id = eg.id_of(v);
        if (id < 0) throw ParseError("unknown init vertex " + vertex_to_string(v), ln, 1);
        eg.init[id] = 1;
    }
    for (auto& [ln, v] : safes) {
        int id = eg.id_of(v);
        if (id < 0) throw ParseError("unknown safe vertex " + vertex_to_string(v), ln, 1);
        eg.safe[id] = 1;
    }
    return eg;
}

std::string explicit_to_text(const ExplicitGame& eg) {
    std::string out;
    for (size_t i = 0; i < eg.size(); i++) {
        out += std::to_string(eg.owner[i]) + " " + vertex_to_string(eg.vertices[i]) + " ->";
        for (size_t k = 0; k < eg.succs[i].size(); k++)
            out += (k ? "," : " ") + vertex_to_string(eg.vertices[eg.succs[i][k]]);
        out += "\n";
    }
    out += "#init\n";
    for (size_t i = 0; i < eg.size(); i++)
        if (eg.init[i]) out += vertex_to_string(eg.vertices[i]) + "\n";
    out += "#safe\n";
    for (size_t i = 0; i < eg.size(); i++)
        if (eg.safe[i]) out += vertex_to_string(eg.vertices[i]) + "\n";
    return out;
}

// --- LIA embedding -------------------------------------------------------------------

namespace {

Formula vertex_eq(const std::vector<std::string>& vars, const Vertex& v, bool primed) {
    std::vector<Formula> eqs;
    for (size_t i = 0; i < vars.size(); i++)
        eqs.push_back(Formula::cmp(CmpOp::Eq, Term::var(vars[i], primed), Term::int_const(v[i])));
    return Formula::conj(std::move(eqs));
}

} // namespace

GameDef explicit_to_lia(const ExplicitGame& eg) {
    if (eg.size() == 0) throw std::invalid_argument("cannot embed an empty explicit game");
    size_t arity = eg.vertices[0].size();
    GameDef g;
    g.name = "explicit";
    for (size_t i = 0; i < arity; i++) g.variables.push_back("v" + std::to_string(i));

    std::vector<Formula> p0, init, safe, table, edges;
    for (size_t i = 0; i < eg.size(); i++) {
        Formula at = vertex_eq(g.variables, eg.vertices[i], false);
        table.push_back(at);
        if (eg.owner[i] == 0) p0.push_back(at);
        if (eg.init[i]) init.push_back(at);
        if (eg.safe[i]) safe.push_back(at);
        std::vector<Formula> tos;
        for (int w : eg.succs[i]) tos.push_back(vertex_eq(g.variables, eg.vertices[w], true));
        if (!tos.empty()) edges.push_back(Formula::conj({at, Formula::disj(std::move(tos))}));
    }

    // Everything outside the table is a player-1 unsafe sink looping on
    // itself, keeping the edge relation total over Z^n without disturbing the
    // winning region on the table.
    Formula outside = Formula::negate(Formula::disj(table));
    std::vector<Formula> stay;
    for (const std::string& v : g.variables)
        stay.push_back(Formula::cmp(CmpOp::Eq, Term::var(v, true), Term::var(v, false)));
    edges.push_back(Formula::conj({outside, Formula::conj(std::move(stay))}));

    g.player0 = Formula::disj(std::move(p0));
    g.init = Formula::disj(std::move(init));
    g.safe = Formula::disj(std::move(safe));
    g.edges = Formula::disj(std::move(edges));
    return g;
}

// --- random generator ------------------------------------------------------------------

ExplicitGame random_explicit_game(std::uint64_t seed, int m) {
    if (m < 2) throw std::invalid_argument("grid size must be at least 2");
    std::mt19937_64 rng(seed);
    ExplicitGame eg;
    for (Int x = 0; x < m; x++)
        for (Int y = 0; y < m; y++)
            eg.add_vertex({x, y}, static_cast<int>((x + y) % 2));

    std::uniform_int_distribution<int> degree(1, 3);
    std::uniform_int_distribution<int> coord(0, m - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (size_t i = 0; i < eg.size(); i++) {
        int deg = degree(rng);
        std::set<int> chosen;
        while (static_cast<int>(chosen.size()) < deg) {
            Vertex w{coord(rng), coord(rng)};
            chosen.insert(eg.index.at(w));
        }
        eg.succs[i].assign(chosen.begin(), chosen.end());
        eg.safe[i] = unit(rng) < 0.85 ? 1 : 0;
    }
    std::uniform_int_distribution<int> ninit(1, 2);
    int want = ninit(rng);
    std::set<int> starts;
    while (static_cast<int>(starts.size()) < want) {
        Vertex w{coord(rng), coord(rng)};
        starts.insert(eg.index.at(w));
    }
    for (int id : starts) eg.init[id] = 1;
    return eg;
}

} // namespace gamesynth
