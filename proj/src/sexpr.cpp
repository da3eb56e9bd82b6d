#include "gamesynth/sexpr.hpp"

namespace gamesynth {

namespace {

struct Reader {
    std::string_view s;
    size_t i = 0;
    int line = 1, col = 1;

    bool eof() const { return i >= s.size(); }
    char peek() const { return s[i]; }

    void advance() {
        if (s[i] == '\n') { line++; col = 1; } else { col++; }
        i++;
    }

    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == ';') {
                while (!eof() && peek() != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    static bool atom_char(char c) {
        return c != '(' && c != ')' && c != ';' && c != ' ' && c != '\t' && c != '\r' && c != '\n';
    }

    Sexpr parse() {
        skip_ws();
        if (eof()) throw ParseError("unexpected end of input", line, col);
        Sexpr e;
        e.line = line;
        e.col = col;
        if (peek() == '(') {
            advance();
            e.atom = false;
            for (;;) {
                skip_ws();
                if (eof()) throw ParseError("unterminated list", e.line, e.col);
                if (peek() == ')') { advance(); break; }
                e.items.push_back(parse());
            }
        } else if (peek() == ')') {
            throw ParseError("unexpected ')'", line, col);
        } else {
            e.atom = true;
            while (!eof() && atom_char(peek())) {
                e.text.push_back(peek());
                advance();
            }
        }
        return e;
    }
};

} // namespace

std::vector<Sexpr> read_sexprs(std::string_view text) {
    Reader r{text};
    std::vector<Sexpr> out;
    for (;;) {
        r.skip_ws();
        if (r.eof()) break;
        out.push_back(r.parse());
    }
    return out;
}

Sexpr read_one_sexpr(std::string_view text) {
    Reader r{text};
    Sexpr e = r.parse();
    r.skip_ws();
    if (!r.eof()) throw ParseError("trailing input after expression", r.line, r.col);
    return e;
}

std::string sexpr_to_string(const Sexpr& e) {
    if (e.atom) return e.text;
    std::string out = "(";
    for (size_t i = 0; i < e.items.size(); i++) {
        if (i) out.push_back(' ');
        out += sexpr_to_string(e.items[i]);
    }
    out.push_back(')');
    return out;
}

} // namespace gamesynth
