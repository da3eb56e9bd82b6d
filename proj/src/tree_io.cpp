#include <algorithm>

#include "gamesynth/learner.hpp"
#include "gamesynth/sexpr.hpp"

namespace gamesynth {

std::string tree_to_sexpr(const DecisionTree& t, const std::vector<std::string>& vars) {
    if (t.is_leaf()) return std::string("(leaf ") + (t.leaf_label() ? "1" : "0") + ")";
    const Predicate& p = t.pred();
    std::string test;
    if (p.kind == Predicate::Kind::Threshold) {
        test = "(<= " + vars.at(p.i) + " " + std::to_string(p.c) + ")";
    } else {
        test = std::string("(<= (") + (p.sign > 0 ? "+" : "-") + " " + vars.at(p.i) + " " +
               vars.at(p.j) + ") " + std::to_string(p.c) + ")";
    }
    return "(node " + test + " " + tree_to_sexpr(t.yes(), vars) + " " +
           tree_to_sexpr(t.no(), vars) + ")";
}

namespace {

int var_index(const Sexpr& e, const std::vector<std::string>& vars) {
    if (!e.is_atom()) throw ParseError("expected a variable name", e.line, e.col);
    auto it = std::find(vars.begin(), vars.end(), e.text);
    if (it == vars.end()) throw ParseError("unknown variable '" + e.text + "'", e.line, e.col);
    return static_cast<int>(it - vars.begin());
}

Int int_atom(const Sexpr& e) {
    if (!e.is_atom()) throw ParseError("expected an integer", e.line, e.col);
    try {
        size_t used = 0;
        Int v = std::stoll(e.text, &used);
        if (used != e.text.size()) throw std::invalid_argument(e.text);
        return v;
    } catch (...) {
        throw ParseError("expected an integer, got '" + e.text + "'", e.line, e.col);
    }
}

Predicate parse_pred(const Sexpr& e, const std::vector<std::string>& vars) {
    if (e.is_atom() || e.size() != 3 || e.head() != "<=")
        throw ParseError("expected (<= ... c) predicate", e.line, e.col);
    Predicate p;
    p.c = int_atom(e[2]);
    const Sexpr& lhs = e[1];
    if (lhs.is_atom()) {
        p.kind = Predicate::Kind::Threshold;
        p.i = var_index(lhs, vars);
        return p;
    }
    if (lhs.size() != 3 || (lhs.head() != "+" && lhs.head() != "-"))
        throw ParseError("expected (+ x y) or (- x y) on the predicate left side", lhs.line, lhs.col);
    p.kind = Predicate::Kind::Octagonal;
    p.sign = lhs.head() == "+" ? +1 : -1;
    p.i = var_index(lhs[1], vars);
    p.j = var_index(lhs[2], vars);
    if (p.i == p.j) throw ParseError("octagonal predicate needs two distinct variables", lhs.line, lhs.col);
    if (p.sign > 0 && p.i > p.j) std::swap(p.i, p.j);  // + is commutative
    return p;
}

DecisionTree parse_tree(const Sexpr& e, const std::vector<std::string>& vars) {
    if (e.is_atom()) throw ParseError("expected (leaf ...) or (node ...)", e.line, e.col);
    if (e.head() == "leaf") {
        if (e.size() != 2) throw ParseError("(leaf ...) takes exactly one label", e.line, e.col);
        Int v = int_atom(e[1]);
        if (v != 0 && v != 1) throw ParseError("leaf label must be 0 or 1", e[1].line, e[1].col);
        return DecisionTree::leaf(v == 1);
    }
    if (e.head() == "node") {
        if (e.size() != 4)
            throw ParseError("(node ...) takes a predicate and two subtrees", e.line, e.col);
        return DecisionTree::node(parse_pred(e[1], vars), parse_tree(e[2], vars), parse_tree(e[3], vars));
    }
    throw ParseError("expected (leaf ...) or (node ...)", e.line, e.col);
}

void dot_node(const DecisionTree& t, const std::vector<std::string>& vars, int& next,
              std::string& out) {
    int me = next++;
    if (t.is_leaf()) {
        out += "  n" + std::to_string(me) + " [shape=box, label=\"" +
               (t.leaf_label() ? "1" : "0") + "\"];\n";
        return;
    }
    out += "  n" + std::to_string(me) + " [label=\"" + t.pred().to_string(vars) + "\"];\n";
    int yes = next;
    dot_node(t.yes(), vars, next, out);
    int no = next;
    dot_node(t.no(), vars, next, out);
    out += "  n" + std::to_string(me) + " -> n" + std::to_string(yes) + " [label=\"yes\"];\n";
    out += "  n" + std::to_string(me) + " -> n" + std::to_string(no) + " [label=\"no\"];\n";
}

} // namespace

DecisionTree tree_from_sexpr(std::string_view text, const std::vector<std::string>& vars) {
    return parse_tree(read_one_sexpr(text), vars);
}

std::string tree_to_dot(const DecisionTree& t, const std::vector<std::string>& vars) {
    std::string out = "digraph tree {\n";
    int next = 0;
    dot_node(t, vars, next, out);
    out += "}\n";
    return out;
}

} // namespace gamesynth
