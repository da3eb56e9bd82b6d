#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gamesynth/formula.hpp"

namespace gamesynth {

using Point = std::vector<Int>;

// ---------------------------------------------------------------------------
// Samples.  A game sample collects the four counterexample shapes; values map
// each element to the id of the counterexample that produced it (-1 when built
// by hand), which the CEGIS loop uses to reconstruct unrealizability proofs.

using Implication = std::pair<Point, std::vector<Point>>;

struct GameSample {
    std::map<Point, int> pos, neg;
    std::map<Implication, int> ex, un;   // rhs sorted + dedup'd

    void add_positive(Point p, int origin = -1);
    void add_negative(Point p, int origin = -1);
    void add_existential(Point p, std::vector<Point> succs, int origin = -1);
    void add_universal(Point p, std::vector<Point> succs, int origin = -1);

    std::set<Point> all_points() const;
    size_t size() const { return pos.size() + neg.size() + ex.size() + un.size(); }
    int arity() const;                   // -1 when empty
};

// Horn constraint over sample points: antecedents -> consequent, where an
// absent consequent means FALSE.  Empty antecedent list means "unconditionally
// consequent".
struct HornConstraint {
    std::vector<Point> antecedents;      // sorted, dedup'd
    std::optional<Point> consequent;
    int origin = -1;

    bool operator==(const HornConstraint& o) const {
        return antecedents == o.antecedents && consequent == o.consequent;
    }
};
using HornSample = std::vector<HornConstraint>;

// The sample translation: positives forbid membership in the learned set
// (which approximates the *complement* of the winning region), negatives
// force it, existentials map v -> (v1 | ... | vk) to (v1 & ... & vk) -> v,
// universals map v -> (v1 & ... & vk) to the clauses vi -> v.
HornSample game_to_horn(const GameSample& s);

// ---------------------------------------------------------------------------
// Horn labeling by unit propagation (decision procedure for Horn-SAT).

enum class Label { True, False, Unknown };

struct PartialLabeling {
    std::map<Point, Label> labels;
    Label get(const Point& p) const;
    void set(const Point& p, Label l) { labels[p] = l; }
};

struct PropagationResult {
    bool conflict = false;
    PartialLabeling labeling;            // forced labels when no conflict
    std::vector<int> conflict_core;      // constraint indices deriving the conflict
};

// Runs unit propagation from `seed` over the constraints.  Without a conflict
// the forced-true points plus everything-else-false is a consistent total
// labeling (Horn minimal model).
PropagationResult horn_propagate(const HornSample& hs, const PartialLabeling& seed = {});

// ---------------------------------------------------------------------------
// Predicates.  Thresholds x_i <= c and octagonal x_i +- x_j <= c, constants
// drawn from values realized in the sample.

struct Predicate {
    enum class Kind { Threshold, Octagonal };
    Kind kind = Kind::Threshold;
    int i = 0, j = 0;        // attribute indices; i < j for octagonal
    int sign = +1;           // octagonal: +1 for x_i + x_j, -1 for x_i - x_j
    Int c = 0;

    bool holds(const Point& p) const;
    Formula to_formula(const std::vector<std::string>& vars) const;
    std::string to_string(const std::vector<std::string>& vars) const;

    auto operator<=>(const Predicate&) const = default;
};

std::vector<Predicate> generate_predicates(const std::set<Point>& points, bool octagonal);

// ---------------------------------------------------------------------------
// Decision trees over points; inner nodes test a predicate, true-branch left.

class DecisionTree {
public:
    static DecisionTree leaf(bool label);
    static DecisionTree node(Predicate p, DecisionTree yes, DecisionTree no);

    bool is_leaf() const { return n_->leaf; }
    bool leaf_label() const { return n_->label; }
    const Predicate& pred() const { return n_->pred; }
    DecisionTree yes() const { return DecisionTree(n_->yes); }
    DecisionTree no() const { return DecisionTree(n_->no); }

    int inner_nodes() const;
    bool operator==(const DecisionTree& o) const;

private:
    struct Node {
        bool leaf = true;
        bool label = false;
        Predicate pred;
        std::shared_ptr<const Node> yes, no;
    };
    explicit DecisionTree(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
    std::shared_ptr<const Node> n_;
};

bool eval_tree(const DecisionTree& t, const Point& p);
DecisionTree flip_leaves(const DecisionTree& t);

// Semantics-preserving simplification: drops tests whose outcome is already
// implied by ancestor tests on the same linear expression, and collapses
// nodes whose branches became structurally equal.
DecisionTree prune_tree(const DecisionTree& t);
Formula tree_to_formula(const DecisionTree& t, const std::vector<std::string>& vars);

bool consistent_with_horn(const DecisionTree& t, const HornSample& hs);
bool consistent_with_game(const DecisionTree& t, const GameSample& s);

// Textual tree format: (leaf 0|1) / (node (<= x 3) YES NO), plus Graphviz.
std::string tree_to_sexpr(const DecisionTree& t, const std::vector<std::string>& vars);
DecisionTree tree_from_sexpr(std::string_view text, const std::vector<std::string>& vars);
std::string tree_to_dot(const DecisionTree& t, const std::vector<std::string>& vars);

// ---------------------------------------------------------------------------
// Learning.  Builds a tree consistent with the Horn sample or reports that no
// tree over the predicate pool separates the points (NoTree) / the sample
// itself is contradictory (Unsatisfiable, with the propagation core).

struct LearnOutcome {
    enum class Kind { Tree, NoTree, Unsatisfiable };
    Kind kind = Kind::NoTree;
    std::optional<DecisionTree> tree;
    std::vector<int> conflict_core;
    std::string detail;
};

LearnOutcome learn_horn_tree(const HornSample& hs, const std::vector<Predicate>& pool);

// Convenience wrapper for the full pipeline used by CEGIS: horn translation,
// predicate generation from realized values, then learn + leaf flip, so the
// returned tree denotes the hypothesis winning set itself.
struct LearnerResult {
    LearnOutcome::Kind kind = LearnOutcome::Kind::NoTree;
    std::optional<DecisionTree> hypothesis;  // flipped tree (winning-set side)
    std::vector<int> conflict_core;
    std::string detail;
};
LearnerResult learn_hypothesis(const GameSample& s, int arity, bool octagonal);

} // namespace gamesynth
