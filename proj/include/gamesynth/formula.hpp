#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gamesynth {

using Int = long long;

class Term;
class Formula;

// ---------------------------------------------------------------------------
// Terms: linear integer arithmetic plus mod/div by positive constants.
// Immutable nodes behind shared_ptr so subtrees are shared freely.

enum class TermKind { IntConst, Var, Add, Sub, Neg, MulConst, ModConst, DivConst };

struct TermNode {
    TermKind kind = TermKind::IntConst;
    Int value = 0;           // IntConst; coefficient for MulConst; divisor for Mod/DivConst
    std::string name;        // Var
    bool primed = false;     // Var
    std::vector<Term> args;
};

class Term {
public:
    static Term int_const(Int v);
    static Term var(std::string name, bool primed = false);
    static Term add(std::vector<Term> ts);                 // n-ary sum, n >= 1
    static Term sub(Term a, Term b);
    static Term neg(Term a);
    static Term mul_const(Int k, Term a);
    static Term mod_const(Term a, Int d);                  // d > 0, Euclidean
    static Term div_const(Term a, Int d);                  // d > 0, Euclidean

    const TermNode& node() const { return *node_; }
    TermKind kind() const { return node_->kind; }

private:
    explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const TermNode> node_;
};

// ---------------------------------------------------------------------------
// Formulas: quantifier-free boolean combinations of integer comparisons.

enum class CmpOp { Eq, Le, Lt, Ge, Gt };
enum class FormulaKind { BoolConst, Cmp, And, Or, Not, Implies };

struct FormulaNode {
    FormulaKind kind = FormulaKind::BoolConst;
    bool value = false;                    // BoolConst
    CmpOp op = CmpOp::Eq;                  // Cmp
    std::vector<Term> terms;               // Cmp: [lhs, rhs]
    std::vector<Formula> args;             // And/Or (n >= 1), Not (1), Implies (2)
};

class Formula {
public:
    static Formula bool_const(bool v);
    static Formula top() { return bool_const(true); }
    static Formula bottom() { return bool_const(false); }
    static Formula cmp(CmpOp op, Term lhs, Term rhs);
    static Formula conj(std::vector<Formula> fs);          // empty -> true
    static Formula disj(std::vector<Formula> fs);          // empty -> false
    static Formula negate(Formula f);
    static Formula implies(Formula a, Formula b);

    const FormulaNode& node() const { return *node_; }
    FormulaKind kind() const { return node_->kind; }

private:
    explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const FormulaNode> node_;
};

// ---------------------------------------------------------------------------
// Variables and assignments.  A variable reference is a name plus whether it
// is the primed (next-state) copy.  On the wire, x' is spelled x_next.

struct VarRef {
    std::string name;
    bool primed = false;
    auto operator<=>(const VarRef&) const = default;
};

std::string wire_name(const VarRef& v);
// Reverse of wire_name: "x_next" -> {x, primed}; anything else unprimed.
VarRef from_wire_name(std::string_view wire);

struct Assignment {
    std::map<std::string, Int> unprimed;
    std::map<std::string, Int> primed;

    bool has(const VarRef& v) const;
    Int get(const VarRef& v) const;     // throws EvalError when unbound
    void set(const VarRef& v, Int x);
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Operations.

Int eval_term(const Term& t, const Assignment& a);
bool eval(const Formula& f, const Assignment& a);

void collect_vars(const Term& t, std::set<VarRef>& out);
std::set<VarRef> free_vars(const Formula& f);

enum class VarClass { Unprimed, Primed, Both };
// Replace bound variables of the selected class with their values from `a`;
// variables of the other class (or unbound ones) are left symbolic.
Formula instantiate(const Formula& f, const Assignment& a, VarClass which);
Term instantiate(const Term& t, const Assignment& a, VarClass which);

// Rewrite every unprimed variable to its primed copy (H -> H[x'/x]).
Formula prime_vars(const Formula& f);

// SMT-LIB 2 rendering; primed variables come out as <name>_next.
std::string render(const Term& t);
std::string render(const Formula& f);

// Parse a standalone formula in the game-file expression syntax.  Accepts
// both the surface priming (x') and the wire spelling (x_next).
Formula parse_formula(std::string_view text);

} // namespace gamesynth
