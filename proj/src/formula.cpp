#include "gamesynth/formula.hpp"

#include <cassert>
#include <utility>

namespace gamesynth {

// --- construction ----------------------------------------------------------

static std::shared_ptr<const TermNode> mk_term(TermNode n) {
    return std::make_shared<const TermNode>(std::move(n));
}

Term Term::int_const(Int v) {
    TermNode n;
    n.kind = TermKind::IntConst;
    n.value = v;
    return Term(mk_term(std::move(n)));
}

Term Term::var(std::string name, bool primed) {
    TermNode n;
    n.kind = TermKind::Var;
    n.name = std::move(name);
    n.primed = primed;
    return Term(mk_term(std::move(n)));
}

Term Term::add(std::vector<Term> ts) {
    if (ts.empty()) return int_const(0);
    if (ts.size() == 1) return ts[0];
    TermNode n;
    n.kind = TermKind::Add;
    n.args = std::move(ts);
    return Term(mk_term(std::move(n)));
}

Term Term::sub(Term a, Term b) {
    TermNode n;
    n.kind = TermKind::Sub;
    n.args = {std::move(a), std::move(b)};
    return Term(mk_term(std::move(n)));
}

Term Term::neg(Term a) {
    TermNode n;
    n.kind = TermKind::Neg;
    n.args = {std::move(a)};
    return Term(mk_term(std::move(n)));
}

Term Term::mul_const(Int k, Term a) {
    TermNode n;
    n.kind = TermKind::MulConst;
    n.value = k;
    n.args = {std::move(a)};
    return Term(mk_term(std::move(n)));
}

Term Term::mod_const(Term a, Int d) {
    if (d <= 0) throw EvalError("mod divisor must be a positive constant");
    TermNode n;
    n.kind = TermKind::ModConst;
    n.value = d;
    n.args = {std::move(a)};
    return Term(mk_term(std::move(n)));
}

Term Term::div_const(Term a, Int d) {
    if (d <= 0) throw EvalError("div divisor must be a positive constant");
    TermNode n;
    n.kind = TermKind::DivConst;
    n.value = d;
    n.args = {std::move(a)};
    return Term(mk_term(std::move(n)));
}

static std::shared_ptr<const FormulaNode> mk_formula(FormulaNode n) {
    return std::make_shared<const FormulaNode>(std::move(n));
}

Formula Formula::bool_const(bool v) {
    FormulaNode n;
    n.kind = FormulaKind::BoolConst;
    n.value = v;
    return Formula(mk_formula(std::move(n)));
}

Formula Formula::cmp(CmpOp op, Term lhs, Term rhs) {
    FormulaNode n;
    n.kind = FormulaKind::Cmp;
    n.op = op;
    n.terms = {std::move(lhs), std::move(rhs)};
    return Formula(mk_formula(std::move(n)));
}

Formula Formula::conj(std::vector<Formula> fs) {
    if (fs.empty()) return top();
    if (fs.size() == 1) return fs[0];
    FormulaNode n;
    n.kind = FormulaKind::And;
    n.args = std::move(fs);
    return Formula(mk_formula(std::move(n)));
}

Formula Formula::disj(std::vector<Formula> fs) {
    if (fs.empty()) return bottom();
    if (fs.size() == 1) return fs[0];
    FormulaNode n;
    n.kind = FormulaKind::Or;
    n.args = std::move(fs);
    return Formula(mk_formula(std::move(n)));
}

Formula Formula::negate(Formula f) {
    FormulaNode n;
    n.kind = FormulaKind::Not;
    n.args = {std::move(f)};
    return Formula(mk_formula(std::move(n)));
}

Formula Formula::implies(Formula a, Formula b) {
    FormulaNode n;
    n.kind = FormulaKind::Implies;
    n.args = {std::move(a), std::move(b)};
    return Formula(mk_formula(std::move(n)));
}

// --- assignments -----------------------------------------------------------

std::string wire_name(const VarRef& v) {
    return v.primed ? v.name + "_next" : v.name;
}

VarRef from_wire_name(std::string_view wire) {
    constexpr std::string_view suffix = "_next";
    if (wire.size() > suffix.size() && wire.substr(wire.size() - suffix.size()) == suffix) {
        return {std::string(wire.substr(0, wire.size() - suffix.size())), true};
    }
    return {std::string(wire), false};
}

bool Assignment::has(const VarRef& v) const {
    const auto& m = v.primed ? primed : unprimed;
    return m.count(v.name) != 0;
}

Int Assignment::get(const VarRef& v) const {
    const auto& m = v.primed ? primed : unprimed;
    auto it = m.find(v.name);
    if (it == m.end()) throw EvalError("unbound variable: " + wire_name(v));
    return it->second;
}

void Assignment::set(const VarRef& v, Int x) {
    (v.primed ? primed : unprimed)[v.name] = x;
}

// --- evaluation ------------------------------------------------------------

// Euclidean semantics, matching SMT-LIB: mod result is in [0, d) for d > 0.
static Int euclid_mod(Int a, Int d) {
    Int r = a % d;
    if (r < 0) r += d;
    return r;
}

static Int euclid_div(Int a, Int d) {
    return (a - euclid_mod(a, d)) / d;
}

Int eval_term(const Term& t, const Assignment& a) {
    const TermNode& n = t.node();
    switch (n.kind) {
    case TermKind::IntConst: return n.value;
    case TermKind::Var: return a.get({n.name, n.primed});
    case TermKind::Add: {
        Int s = 0;
        for (const Term& x : n.args) s += eval_term(x, a);
        return s;
    }
    case TermKind::Sub: return eval_term(n.args[0], a) - eval_term(n.args[1], a);
    case TermKind::Neg: return -eval_term(n.args[0], a);
    case TermKind::MulConst: return n.value * eval_term(n.args[0], a);
    case TermKind::ModConst: return euclid_mod(eval_term(n.args[0], a), n.value);
    case TermKind::DivConst: return euclid_div(eval_term(n.args[0], a), n.value);
    }
    throw EvalError("corrupt term");
}

bool eval(const Formula& f, const Assignment& a) {
    const FormulaNode& n = f.node();
    switch (n.kind) {
    case FormulaKind::BoolConst: return n.value;
    case FormulaKind::Cmp: {
        Int l = eval_term(n.terms[0], a), r = eval_term(n.terms[1], a);
        switch (n.op) {
        case CmpOp::Eq: return l == r;
        case CmpOp::Le: return l <= r;
        case CmpOp::Lt: return l < r;
        case CmpOp::Ge: return l >= r;
        case CmpOp::Gt: return l > r;
        }
        break;
    }
    case FormulaKind::And:
        for (const Formula& g : n.args)
            if (!eval(g, a)) return false;
        return true;
    case FormulaKind::Or:
        for (const Formula& g : n.args)
            if (eval(g, a)) return true;
        return false;
    case FormulaKind::Not: return !eval(n.args[0], a);
    case FormulaKind::Implies: return !eval(n.args[0], a) || eval(n.args[1], a);
    }
    throw EvalError("corrupt formula");
}

// --- variable collection ----------------------------------------------------

void collect_vars(const Term& t, std::set<VarRef>& out) {
    const TermNode& n = t.node();
    if (n.kind == TermKind::Var) {
        out.insert({n.name, n.primed});
        return;
    }
    for (const Term& x : n.args) collect_vars(x, out);
}

static void collect_vars(const Formula& f, std::set<VarRef>& out) {
    const FormulaNode& n = f.node();
    for (const Term& t : n.terms) collect_vars(t, out);
    for (const Formula& g : n.args) collect_vars(g, out);
}

std::set<VarRef> free_vars(const Formula& f) {
    std::set<VarRef> out;
    collect_vars(f, out);
    return out;
}

// --- instantiation ----------------------------------------------------------

static bool selected(VarClass which, bool primed) {
    return which == VarClass::Both || (which == VarClass::Primed) == primed;
}

Term instantiate(const Term& t, const Assignment& a, VarClass which) {
    const TermNode& n = t.node();
    switch (n.kind) {
    case TermKind::IntConst: return t;
    case TermKind::Var:
        if (selected(which, n.primed) && a.has({n.name, n.primed}))
            return Term::int_const(a.get({n.name, n.primed}));
        return t;
    case TermKind::Add: {
        std::vector<Term> xs;
        xs.reserve(n.args.size());
        for (const Term& x : n.args) xs.push_back(instantiate(x, a, which));
        return Term::add(std::move(xs));
    }
    case TermKind::Sub:
        return Term::sub(instantiate(n.args[0], a, which), instantiate(n.args[1], a, which));
    case TermKind::Neg: return Term::neg(instantiate(n.args[0], a, which));
    case TermKind::MulConst: return Term::mul_const(n.value, instantiate(n.args[0], a, which));
    case TermKind::ModConst: return Term::mod_const(instantiate(n.args[0], a, which), n.value);
    case TermKind::DivConst: return Term::div_const(instantiate(n.args[0], a, which), n.value);
    }
    throw EvalError("corrupt term");
}

Formula instantiate(const Formula& f, const Assignment& a, VarClass which) {
    const FormulaNode& n = f.node();
    switch (n.kind) {
    case FormulaKind::BoolConst: return f;
    case FormulaKind::Cmp:
        return Formula::cmp(n.op, instantiate(n.terms[0], a, which), instantiate(n.terms[1], a, which));
    case FormulaKind::And:
    case FormulaKind::Or: {
        std::vector<Formula> xs;
        xs.reserve(n.args.size());
        for (const Formula& g : n.args) xs.push_back(instantiate(g, a, which));
        return n.kind == FormulaKind::And ? Formula::conj(std::move(xs)) : Formula::disj(std::move(xs));
    }
    case FormulaKind::Not: return Formula::negate(instantiate(n.args[0], a, which));
    case FormulaKind::Implies:
        return Formula::implies(instantiate(n.args[0], a, which), instantiate(n.args[1], a, which));
    }
    throw EvalError("corrupt formula");
}

// --- priming ----------------------------------------------------------------

static Term prime_term(const Term& t) {
    const TermNode& n = t.node();
    switch (n.kind) {
    case TermKind::IntConst: return t;
    case TermKind::Var: return n.primed ? t : Term::var(n.name, true);
    case TermKind::Add: {
        std::vector<Term> xs;
        xs.reserve(n.args.size());
        for (const Term& x : n.args) xs.push_back(prime_term(x));
        return Term::add(std::move(xs));
    }
    case TermKind::Sub: return Term::sub(prime_term(n.args[0]), prime_term(n.args[1]));
    case TermKind::Neg: return Term::neg(prime_term(n.args[0]));
    case TermKind::MulConst: return Term::mul_const(n.value, prime_term(n.args[0]));
    case TermKind::ModConst: return Term::mod_const(prime_term(n.args[0]), n.value);
    case TermKind::DivConst: return Term::div_const(prime_term(n.args[0]), n.value);
    }
    throw EvalError("corrupt term");
}

Formula prime_vars(const Formula& f) {
    const FormulaNode& n = f.node();
    switch (n.kind) {
    case FormulaKind::BoolConst: return f;
    case FormulaKind::Cmp: return Formula::cmp(n.op, prime_term(n.terms[0]), prime_term(n.terms[1]));
    case FormulaKind::And:
    case FormulaKind::Or: {
        std::vector<Formula> xs;
        xs.reserve(n.args.size());
        for (const Formula& g : n.args) xs.push_back(prime_vars(g));
        return n.kind == FormulaKind::And ? Formula::conj(std::move(xs)) : Formula::disj(std::move(xs));
    }
    case FormulaKind::Not: return Formula::negate(prime_vars(n.args[0]));
    case FormulaKind::Implies: return Formula::implies(prime_vars(n.args[0]), prime_vars(n.args[1]));
    }
    throw EvalError("corrupt formula");
}

// --- rendering ---------------------------------------------------------------

std::string render(const Term& t) {
    const TermNode& n = t.node();
    switch (n.kind) {
    case TermKind::IntConst:
        if (n.value < 0) return "(- " + std::to_string(-n.value) + ")";
        return std::to_string(n.value);
    case TermKind::Var: return wire_name({n.name, n.primed});
    case TermKind::Add: {
        std::string out = "(+";
        for (const Term& x : n.args) out += " " + render(x);
        return out + ")";
    }
    case TermKind::Sub: return "(- " + render(n.args[0]) + " " + render(n.args[1]) + ")";
    case TermKind::Neg: return "(- " + render(n.args[0]) + ")";
    case TermKind::MulConst: {
        Int k = n.value;
        std::string ks = k < 0 ? "(- " + std::to_string(-k) + ")" : std::to_string(k);
        return "(* " + ks + " " + render(n.args[0]) + ")";
    }
    case TermKind::ModConst: return "(mod " + render(n.args[0]) + " " + std::to_string(n.value) + ")";
    case TermKind::DivConst: return "(div " + render(n.args[0]) + " " + std::to_string(n.value) + ")";
    }
    throw EvalError("corrupt term");
}

std::string render(const Formula& f) {
    const FormulaNode& n = f.node();
    switch (n.kind) {
    case FormulaKind::BoolConst: return n.value ? "true" : "false";
    case FormulaKind::Cmp: {
        const char* op = nullptr;
        switch (n.op) {
        case CmpOp::Eq: op = "="; break;
        case CmpOp::Le: op = "<="; break;
        case CmpOp::Lt: op = "<"; break;
        case CmpOp::Ge: op = ">="; break;
        case CmpOp::Gt: op = ">"; break;
        }
        return std::string("(") + op + " " + render(n.terms[0]) + " " + render(n.terms[1]) + ")";
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
        std::string out = n.kind == FormulaKind::And ? "(and" : "(or";
        for (const Formula& g : n.args) out += " " + render(g);
        return out + ")";
    }
    case FormulaKind::Not: return "(not " + render(n.args[0]) + ")";
    case FormulaKind::Implies:
        return "(=> " + render(n.args[0]) + " " + render(n.args[1]) + ")";
    }
    throw EvalError("corrupt formula");
}

} // namespace gamesynth
