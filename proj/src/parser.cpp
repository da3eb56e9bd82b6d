#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>

#include "gamesynth/game.hpp"
#include "gamesynth/sexpr.hpp"

namespace gamesynth {

namespace {

bool is_integer_atom(const std::string& s) {
    if (s.empty()) return false;
    size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); i++)
        if (!isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

Int parse_int(const Sexpr& e) {
    if (!e.atom || !is_integer_atom(e.text))
        throw ParseError("expected an integer literal, got '" + sexpr_to_string(e) + "'", e.line, e.col);
    errno = 0;
    char* end = nullptr;
    long long v = strtoll(e.text.c_str(), &end, 10);
    if (errno != 0 || end != e.text.c_str() + e.text.size())
        throw ParseError("integer literal out of range: " + e.text, e.line, e.col);
    return v;
}

// Shared expression parser.  When `vars` is set, identifiers must be declared
// game variables; primed identifiers are additionally gated by allow_primed.
struct ExprParser {
    const std::vector<std::string>* vars = nullptr;
    bool allow_primed = true;

    VarRef ident(const Sexpr& e) const {
        VarRef v;
        if (e.text.size() > 1 && e.text.back() == '\'') {
            v = {e.text.substr(0, e.text.size() - 1), true};
        } else {
            v = from_wire_name(e.text);
        }
        if (v.name.empty())
            throw ParseError("bad identifier '" + e.text + "'", e.line, e.col);
        if (vars) {
            if (std::find(vars->begin(), vars->end(), v.name) == vars->end())
                throw ParseError("undeclared variable '" + v.name + "'", e.line, e.col);
            if (v.primed && !allow_primed)
                throw ParseError("primed variable '" + e.text + "' is only allowed in the edge relation",
                                 e.line, e.col);
        }
        return v;
    }

    Term term(const Sexpr& e) const {
        if (e.atom) {
            if (is_integer_atom(e.text)) return Term::int_const(parse_int(e));
            VarRef v = ident(e);
            return Term::var(v.name, v.primed);
        }
        std::string_view h = e.head();
        if (h == "+") {
            if (e.size() < 2) throw ParseError("(+ ...) needs at least one argument", e.line, e.col);
            std::vector<Term> xs;
            for (size_t i = 1; i < e.size(); i++) xs.push_back(term(e[i]));
            return Term::add(std::move(xs));
        }
        if (h == "-") {
            if (e.size() == 2) return Term::neg(term(e[1]));
            if (e.size() == 3) return Term::sub(term(e[1]), term(e[2]));
            throw ParseError("(- ...) takes one or two arguments", e.line, e.col);
        }
        if (h == "*") {
            if (e.size() != 3) throw ParseError("(* ...) takes exactly two arguments", e.line, e.col);
            if (e[1].atom && is_integer_atom(e[1].text)) return Term::mul_const(parse_int(e[1]), term(e[2]));
            if (e[2].atom && is_integer_atom(e[2].text)) return Term::mul_const(parse_int(e[2]), term(e[1]));
            throw ParseError("multiplication needs a constant factor", e.line, e.col);
        }
        if (h == "mod" || h == "div") {
            if (e.size() != 3) throw ParseError("(" + std::string(h) + " ...) takes exactly two arguments",
                                                e.line, e.col);
            Int d = parse_int(e[2]);
            if (d <= 0) throw ParseError(std::string(h) + " divisor must be positive", e[2].line, e[2].col);
            return h == "mod" ? Term::mod_const(term(e[1]), d) : Term::div_const(term(e[1]), d);
        }
        throw ParseError("unknown term operator '" + sexpr_to_string(e) + "'", e.line, e.col);
    }

    std::optional<CmpOp> cmp_op(std::string_view h) const {
        if (h == "=") return CmpOp::Eq;
        if (h == "<=") return CmpOp::Le;
        if (h == "<") return CmpOp::Lt;
        if (h == ">=") return CmpOp::Ge;
        if (h == ">") return CmpOp::Gt;
        return std::nullopt;
    }

    Formula formula(const Sexpr& e) const {
        if (e.atom) {
            if (e.text == "true") return Formula::top();
            if (e.text == "false") return Formula::bottom();
            throw ParseError("expected a formula, got '" + e.text + "'", e.line, e.col);
        }
        std::string_view h = e.head();
        if (auto op = cmp_op(h)) {
            if (e.size() != 3) throw ParseError("comparison takes exactly two arguments", e.line, e.col);
            return Formula::cmp(*op, term(e[1]), term(e[2]));
        }
        if (h == "and" || h == "or") {
            if (e.size() < 2)
                throw ParseError("(" + std::string(h) + " ...) needs at least one argument", e.line, e.col);
            std::vector<Formula> xs;
            for (size_t i = 1; i < e.size(); i++) xs.push_back(formula(e[i]));
            return h == "and" ? Formula::conj(std::move(xs)) : Formula::disj(std::move(xs));
        }
        if (h == "not") {
            if (e.size() != 2) throw ParseError("(not ...) takes exactly one argument", e.line, e.col);
            return Formula::negate(formula(e[1]));
        }
        if (h == "=>") {
            if (e.size() != 3) throw ParseError("(=> ...) takes exactly two arguments", e.line, e.col);
            return Formula::implies(formula(e[1]), formula(e[2]));
        }
        throw ParseError("unknown formula operator '" + sexpr_to_string(e) + "'", e.line, e.col);
    }
};

} // namespace

Formula parse_formula(std::string_view text) {
    ExprParser p;
    return p.formula(read_one_sexpr(text));
}

GameDef parse_game(std::string_view text, std::string_view name) {
    Sexpr root = read_one_sexpr(text);
    if (root.atom || root.head() != "game")
        throw ParseError("expected (game ...)", root.line, root.col);

    GameDef g;
    g.name = std::string(name);

    std::map<std::string, const Sexpr*> sections;
    for (size_t i = 1; i < root.size(); i++) {
        const Sexpr& sec = root[i];
        std::string h{sec.head()};
        if (h != "vars" && h != "player0" && h != "init" && h != "safe" && h != "edges")
            throw ParseError("unknown game section '" + sexpr_to_string(sec) + "'", sec.line, sec.col);
        if (!sections.emplace(h, &sec).second)
            throw ParseError("duplicate section (" + h + " ...)", sec.line, sec.col);
    }
    for (const char* req : {"vars", "player0", "init", "safe", "edges"})
        if (!sections.count(req))
            throw ParseError(std::string("missing section (") + req + " ...)", root.line, root.col);

    const Sexpr& vars = *sections["vars"];
    if (vars.size() < 2) throw ParseError("(vars ...) needs at least one variable", vars.line, vars.col);
    for (size_t i = 1; i < vars.size(); i++) {
        const Sexpr* entry = &vars[i];
        if (entry->is_list()) {
            // typed spelling: (x Int)
            if (entry->size() != 2 || !(*entry)[0].atom || !(*entry)[1].atom || (*entry)[1].text != "Int")
                throw ParseError("bad variable declaration '" + sexpr_to_string(*entry) + "' (want NAME or (NAME Int))",
                                 entry->line, entry->col);
            entry = &(*entry)[0];
        }
        const Sexpr& v = *entry;
        if (!v.atom || is_integer_atom(v.text) || v.text.find('\'') != std::string::npos)
            throw ParseError("bad variable name '" + sexpr_to_string(v) + "'", v.line, v.col);
        constexpr std::string_view suffix = "_next";
        if (v.text.size() > suffix.size() &&
            std::string_view(v.text).substr(v.text.size() - suffix.size()) == suffix)
            throw ParseError("variable name '" + v.text + "' collides with primed spelling", v.line, v.col);
        if (std::find(g.variables.begin(), g.variables.end(), v.text) != g.variables.end())
            throw ParseError("duplicate variable '" + v.text + "'", v.line, v.col);
        g.variables.push_back(v.text);
    }

    ExprParser state{&g.variables, /*allow_primed=*/false};
    ExprParser edge{&g.variables, /*allow_primed=*/true};
    auto body = [](const Sexpr& sec) -> const Sexpr& {
        if (sec.size() != 2)
            throw ParseError("section (" + std::string(sec.head()) + " ...) takes exactly one formula",
                             sec.line, sec.col);
        return sec[1];
    };
    g.player0 = state.formula(body(*sections["player0"]));
    g.init = state.formula(body(*sections["init"]));
    g.safe = state.formula(body(*sections["safe"]));
    g.edges = edge.formula(body(*sections["edges"]));

    std::set<VarRef> evars = free_vars(g.edges);
    for (const std::string& v : g.variables)
        if (!evars.count({v, true}))
            g.warnings.push_back("edge relation never constrains " + v + "' (infinite branching likely)");
    return g;
}

} // namespace gamesynth
