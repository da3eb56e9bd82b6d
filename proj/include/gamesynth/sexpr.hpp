#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gamesynth {

// Minimal s-expression reader shared by the game parser, the tree format and
// the solver reply parser.  Atoms are bare tokens; no string literals are
// needed for our inputs, but `;` line comments are skipped.

struct Sexpr {
    bool atom = false;
    std::string text;            // atom spelling
    std::vector<Sexpr> items;    // list elements
    int line = 0, col = 0;

    bool is_atom() const { return atom; }
    bool is_list() const { return !atom; }
    size_t size() const { return items.size(); }
    const Sexpr& operator[](size_t i) const { return items[i]; }
    // head symbol of a list, or "" when not applicable
    std::string_view head() const {
        if (atom || items.empty() || !items[0].atom) return {};
        return items[0].text;
    }
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(col)),
          line(line), col(col) {}
    int line, col;
};

// All top-level expressions in `text`.  Throws ParseError on malformed input.
std::vector<Sexpr> read_sexprs(std::string_view text);

// Exactly one expression (trailing whitespace/comments allowed).
Sexpr read_one_sexpr(std::string_view text);

std::string sexpr_to_string(const Sexpr& e);

} // namespace gamesynth
