#include "gamesynth/learner.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <memory>
#include <tuple>

namespace gamesynth {

// --- samples -----------------------------------------------------------------

static std::vector<Point> normalize_succs(std::vector<Point> succs) {
    std::sort(succs.begin(), succs.end());
    succs.erase(std::unique(succs.begin(), succs.end()), succs.end());
    return succs;
}

void GameSample::add_positive(Point p, int origin) { pos.emplace(std::move(p), origin); }
void GameSample::add_negative(Point p, int origin) { neg.emplace(std::move(p), origin); }

void GameSample::add_existential(Point p, std::vector<Point> succs, int origin) {
    ex.emplace(Implication{std::move(p), normalize_succs(std::move(succs))}, origin);
}

void GameSample::add_universal(Point p, std::vector<Point> succs, int origin) {
    un.emplace(Implication{std::move(p), normalize_succs(std::move(succs))}, origin);
}

std::set<Point> GameSample::all_points() const {
    std::set<Point> out;
    for (const auto& [p, _] : pos) out.insert(p);
    for (const auto& [p, _] : neg) out.insert(p);
    for (const auto* m : {&ex, &un}) {
        for (const auto& [impl, _] : *m) {
            out.insert(impl.first);
            out.insert(impl.second.begin(), impl.second.end());
        }
    }
    return out;
}

int GameSample::arity() const {
    for (const auto& [p, _] : pos) return static_cast<int>(p.size());
    for (const auto& [p, _] : neg) return static_cast<int>(p.size());
    for (const auto& [i, _] : ex) return static_cast<int>(i.first.size());
    for (const auto& [i, _] : un) return static_cast<int>(i.first.size());
    return -1;
}

// The learned set approximates the complement of the winning region, so the
// sample conditions dualize: positives may not enter it, negatives must,
// existential closures flip into conjunctive antecedents, universal closures
// into one clause per successor.
HornSample game_to_horn(const GameSample& s) {
    HornSample hs;
    for (const auto& [p, origin] : s.pos) {
        HornConstraint c;
        c.antecedents = {p};
        c.consequent = std::nullopt;
        c.origin = origin;
        hs.push_back(std::move(c));
    }
    for (const auto& [p, origin] : s.neg) {
        HornConstraint c;
        c.antecedents = {};
        c.consequent = p;
        c.origin = origin;
        hs.push_back(std::move(c));
    }
    for (const auto& [impl, origin] : s.ex) {
        HornConstraint c;
        c.antecedents = impl.second;   // already sorted + dedup'd
        c.consequent = impl.first;
        c.origin = origin;
        hs.push_back(std::move(c));
    }
    for (const auto& [impl, origin] : s.un) {
        for (const Point& w : impl.second) {
            HornConstraint c;
            c.antecedents = {w};
            c.consequent = impl.first;
            c.origin = origin;
            hs.push_back(std::move(c));
        }
    }
    return hs;
}

// --- unit propagation ----------------------------------------------------------

Label PartialLabeling::get(const Point& p) const {
    auto it = labels.find(p);
    return it == labels.end() ? Label::Unknown : it->second;
}

namespace {

// Bookkeeping for conflict cores: which constraint forced each label and which
// already-labeled points that rule consumed.
struct PropState {
    PartialLabeling lab;
    std::map<Point, int> reason;                  // -1 for seed labels
    std::map<Point, std::vector<Point>> support;

    void force(const Point& p, Label l, int why, std::vector<Point> sup) {
        lab.set(p, l);
        reason[p] = why;
        support[p] = std::move(sup);
    }

    std::vector<int> core_from(int conflict_idx, const std::vector<Point>& involved) const {
        std::vector<int> core{conflict_idx};
        std::vector<Point> work = involved;
        std::set<Point> seen;
        while (!work.empty()) {
            Point p = work.back();
            work.pop_back();
            if (!seen.insert(p).second) continue;
            auto r = reason.find(p);
            if (r != reason.end() && r->second >= 0) core.push_back(r->second);
            auto s = support.find(p);
            if (s != support.end())
                work.insert(work.end(), s->second.begin(), s->second.end());
        }
        std::sort(core.begin(), core.end());
        core.erase(std::unique(core.begin(), core.end()), core.end());
        return core;
    }
};

} // namespace

PropagationResult horn_propagate(const HornSample& hs, const PartialLabeling& seed) {
    PropState st;
    st.lab = seed;

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t ci = 0; ci < hs.size(); ci++) {
            const HornConstraint& c = hs[ci];
            size_t trues = 0;
            const Point* unknown = nullptr;
            size_t unknowns = 0;
            for (const Point& a : c.antecedents) {
                Label l = st.lab.get(a);
                if (l == Label::True) trues++;
                else if (l == Label::Unknown) { unknowns++; unknown = &a; }
            }
            Label cons = c.consequent ? st.lab.get(*c.consequent) : Label::False;

            if (trues == c.antecedents.size()) {
                // all antecedents hold
                if (!c.consequent) {
                    PropagationResult r;
                    r.conflict = true;
                    r.conflict_core = st.core_from(static_cast<int>(ci), c.antecedents);
                    return r;
                }
                if (cons == Label::False) {
                    std::vector<Point> inv = c.antecedents;
                    inv.push_back(*c.consequent);
                    PropagationResult r;
                    r.conflict = true;
                    r.conflict_core = st.core_from(static_cast<int>(ci), inv);
                    return r;
                }
                if (cons == Label::Unknown) {
                    st.force(*c.consequent, Label::True, static_cast<int>(ci), c.antecedents);
                    changed = true;
                }
            } else if (unknowns == 1 && trues == c.antecedents.size() - 1) {
                // consequent known false: the last open antecedent must be false
                bool cons_false = !c.consequent || cons == Label::False;
                if (cons_false) {
                    std::vector<Point> sup;
                    for (const Point& a : c.antecedents)
                        if (a != *unknown) sup.push_back(a);
                    if (c.consequent) sup.push_back(*c.consequent);
                    st.force(*unknown, Label::False, static_cast<int>(ci), std::move(sup));
                    changed = true;
                }
            }
        }
    }

    PropagationResult r;
    r.conflict = false;
    r.labeling = st.lab;
    return r;
}

// --- predicates ---------------------------------------------------------------

bool Predicate::holds(const Point& p) const {
    if (kind == Kind::Threshold) return p.at(i) <= c;
    Int lhs = sign > 0 ? p.at(i) + p.at(j) : p.at(i) - p.at(j);
    return lhs <= c;
}

Formula Predicate::to_formula(const std::vector<std::string>& vars) const {
    Term xi = Term::var(vars.at(i));
    if (kind == Kind::Threshold) return Formula::cmp(CmpOp::Le, xi, Term::int_const(c));
    Term xj = Term::var(vars.at(j));
    Term lhs = sign > 0 ? Term::add({xi, xj}) : Term::sub(xi, xj);
    return Formula::cmp(CmpOp::Le, lhs, Term::int_const(c));
}

std::string Predicate::to_string(const std::vector<std::string>& vars) const {
    if (kind == Kind::Threshold) return vars.at(i) + " <= " + std::to_string(c);
    return vars.at(i) + (sign > 0 ? " + " : " - ") + vars.at(j) + " <= " + std::to_string(c);
}

// Deterministic predicate order: thresholds before octagonal, then attribute
// indices, then + before -, then constant ascending.
static bool pred_less(const Predicate& a, const Predicate& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.i != b.i) return a.i < b.i;
    if (a.j != b.j) return a.j < b.j;
    int sa = a.sign > 0 ? 0 : 1, sb = b.sign > 0 ? 0 : 1;
    if (sa != sb) return sa < sb;
    return a.c < b.c;
}

std::vector<Predicate> generate_predicates(const std::set<Point>& points, bool octagonal) {
    std::vector<Predicate> out;
    if (points.empty()) return out;
    size_t arity = points.begin()->size();

    for (size_t i = 0; i < arity; i++) {
        std::set<Int> vals;
        for (const Point& p : points) vals.insert(p.at(i));
        for (Int c : vals) out.push_back({Predicate::Kind::Threshold, static_cast<int>(i), 0, +1, c});
    }
    if (octagonal) {
        for (size_t i = 0; i < arity; i++) {
            for (size_t j = i + 1; j < arity; j++) {
                std::set<Int> sums, diffs;
                for (const Point& p : points) {
                    sums.insert(p.at(i) + p.at(j));
                    diffs.insert(p.at(i) - p.at(j));
                }
                for (Int c : sums)
                    out.push_back({Predicate::Kind::Octagonal, static_cast<int>(i), static_cast<int>(j), +1, c});
                for (Int c : diffs)
                    out.push_back({Predicate::Kind::Octagonal, static_cast<int>(i), static_cast<int>(j), -1, c});
            }
        }
    }
    std::sort(out.begin(), out.end(), pred_less);
    return out;
}

// --- decision trees -------------------------------------------------------------

DecisionTree DecisionTree::leaf(bool label) {
    auto n = std::make_shared<Node>();
    n->leaf = true;
    n->label = label;
    return DecisionTree(std::move(n));
}

DecisionTree DecisionTree::node(Predicate p, DecisionTree yes, DecisionTree no) {
    auto n = std::make_shared<Node>();
    n->leaf = false;
    n->pred = p;
    n->yes = yes.n_;
    n->no = no.n_;
    return DecisionTree(std::move(n));
}

int DecisionTree::inner_nodes() const {
    if (is_leaf()) return 0;
    return 1 + yes().inner_nodes() + no().inner_nodes();
}

bool DecisionTree::operator==(const DecisionTree& o) const {
    if (is_leaf() != o.is_leaf()) return false;
    if (is_leaf()) return leaf_label() == o.leaf_label();
    return pred() == o.pred() && yes() == o.yes() && no() == o.no();
}

bool eval_tree(const DecisionTree& t, const Point& p) {
    DecisionTree cur = t;
    while (!cur.is_leaf()) cur = cur.pred().holds(p) ? cur.yes() : cur.no();
    return cur.leaf_label();
}

DecisionTree flip_leaves(const DecisionTree& t) {
    if (t.is_leaf()) return DecisionTree::leaf(!t.leaf_label());
    return DecisionTree::node(t.pred(), flip_leaves(t.yes()), flip_leaves(t.no()));
}

namespace {

// Known range of one tested expression along the current tree path.  The key
// identifies the expression: (i, -1, 0) for a single attribute, (i, j, sign)
// for an octagonal sum/difference.
struct ExprRange {
    std::optional<Int> lo, hi;
};
using RangeMap = std::map<std::tuple<int, int, int>, ExprRange>;

std::tuple<int, int, int> expr_key(const Predicate& p) {
    if (p.kind == Predicate::Kind::Threshold) return {p.i, -1, 0};
    return {p.i, p.j, p.sign};
}

DecisionTree prune_rec(const DecisionTree& t, RangeMap& ranges) {
    if (t.is_leaf()) return t;
    const Predicate& p = t.pred();
    auto key = expr_key(p);
    ExprRange r = ranges[key];

    // The test is decided when ancestors already bound the expression past c.
    if (r.hi && *r.hi <= p.c) return prune_rec(t.yes(), ranges);
    if (r.lo && *r.lo > p.c) return prune_rec(t.no(), ranges);

    ExprRange yes_r = r, no_r = r;
    yes_r.hi = r.hi ? std::min(*r.hi, p.c) : p.c;
    no_r.lo = r.lo ? std::max(*r.lo, p.c + 1) : p.c + 1;

    ranges[key] = yes_r;
    DecisionTree yes = prune_rec(t.yes(), ranges);
    ranges[key] = no_r;
    DecisionTree no = prune_rec(t.no(), ranges);
    ranges[key] = r;

    if (yes == no) return yes;
    return DecisionTree::node(p, yes, no);
}

} // namespace

DecisionTree prune_tree(const DecisionTree& t) {
    RangeMap ranges;
    return prune_rec(t, ranges);
}

static void collect_paths(const DecisionTree& t, std::vector<Formula>& path,
                          std::vector<Formula>& out, const std::vector<std::string>& vars) {
    if (t.is_leaf()) {
        if (t.leaf_label()) out.push_back(Formula::conj(path));
        return;
    }
    Formula p = t.pred().to_formula(vars);
    path.push_back(p);
    collect_paths(t.yes(), path, out, vars);
    path.back() = Formula::negate(p);
    collect_paths(t.no(), path, out, vars);
    path.pop_back();
}

Formula tree_to_formula(const DecisionTree& t, const std::vector<std::string>& vars) {
    std::vector<Formula> path, disjuncts;
    collect_paths(t, path, disjuncts, vars);
    return Formula::disj(std::move(disjuncts));
}

bool consistent_with_horn(const DecisionTree& t, const HornSample& hs) {
    for (const HornConstraint& c : hs) {
        bool all = true;
        for (const Point& a : c.antecedents)
            if (!eval_tree(t, a)) { all = false; break; }
        if (!all) continue;
        if (!c.consequent) return false;
        if (!eval_tree(t, *c.consequent)) return false;
    }
    return true;
}

bool consistent_with_game(const DecisionTree& t, const GameSample& s) {
    for (const auto& [p, _] : s.pos)
        if (!eval_tree(t, p)) return false;
    for (const auto& [p, _] : s.neg)
        if (eval_tree(t, p)) return false;
    for (const auto& [impl, _] : s.ex) {
        if (!eval_tree(t, impl.first)) continue;
        bool some = false;
        for (const Point& w : impl.second)
            if (eval_tree(t, w)) { some = true; break; }
        if (!some) return false;
    }
    for (const auto& [impl, _] : s.un) {
        if (!eval_tree(t, impl.first)) continue;
        for (const Point& w : impl.second)
            if (!eval_tree(t, w)) return false;
    }
    return true;
}

// --- learning --------------------------------------------------------------------

namespace {

struct NoTreeError {
    std::string detail;
};

// Mutable build-time tree; leaves carry their point sets.
struct BNode {
    std::vector<Point> pts;
    bool leaf = true;
    Predicate pred;
    std::unique_ptr<BNode> yes, no;
};

struct Builder {
    const HornSample& hs;
    const std::vector<Predicate>& pool;
    const PartialLabeling& forced;    // labels propagation forces outright
    const PartialLabeling& minmodel;  // forced plus everything-else-false

    // Points of each constraint, for touch/cut tests.
    std::vector<std::vector<Point>> cpoints;

    Builder(const HornSample& h, const std::vector<Predicate>& p, const PartialLabeling& f,
            const PartialLabeling& m)
        : hs(h), pool(p), forced(f), minmodel(m) {
        cpoints.reserve(hs.size());
        for (const HornConstraint& c : hs) {
            std::vector<Point> ps = c.antecedents;
            if (c.consequent) ps.push_back(*c.consequent);
            std::sort(ps.begin(), ps.end());
            ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
            cpoints.push_back(std::move(ps));
        }
    }

    static double entropy(size_t t, size_t f) {
        size_t n = t + f;
        if (n == 0 || t == 0 || f == 0) return 0.0;
        double pt = double(t) / double(n), pf = double(f) / double(n);
        return -(pt * std::log2(pt) + pf * std::log2(pf));
    }

    static void label_counts(const std::vector<Point>& pts, const PartialLabeling& src,
                             size_t& t, size_t& f) {
        t = f = 0;
        for (const Point& p : pts) {
            Label l = src.get(p);
            if (l == Label::True) t++;
            else if (l == Label::False) f++;
        }
    }

    bool touched(const std::vector<Point>& pts) const {
        std::set<Point> s(pts.begin(), pts.end());
        for (const auto& ps : cpoints)
            for (const Point& p : ps)
                if (s.count(p)) return true;
        return false;
    }

    int cuts(const std::vector<Point>& pts, const Predicate& pr) const {
        std::set<Point> s(pts.begin(), pts.end());
        int n = 0;
        for (const auto& ps : cpoints) {
            bool l = false, r = false;
            for (const Point& p : ps) {
                if (!s.count(p)) continue;
                (pr.holds(p) ? l : r) = true;
            }
            if (l && r) n++;
        }
        return n;
    }

    // Best splitting predicate for pts by gain over src labels, or nullopt
    // when none splits.
    std::optional<Predicate> choose_split(const std::vector<Point>& pts,
                                          const PartialLabeling& src) const {
        size_t t, f;
        label_counts(pts, src, t, f);
        double base = entropy(t, f);
        size_t total_labeled = t + f;

        std::optional<Predicate> best;
        double best_gain = -1.0;
        int best_cuts = 0;
        for (const Predicate& pr : pool) {
            std::vector<Point> yes, no;
            for (const Point& p : pts) (pr.holds(p) ? yes : no).push_back(p);
            if (yes.empty() || no.empty()) continue;

            double gain = 0.0;
            if (total_labeled > 0) {
                size_t ty, fy, tn, fn;
                label_counts(yes, src, ty, fy);
                label_counts(no, src, tn, fn);
                double wy = double(ty + fy) / double(total_labeled);
                double wn = double(tn + fn) / double(total_labeled);
                gain = base - wy * entropy(ty, fy) - wn * entropy(tn, fn);
            }
            if (!best) {
                best = pr;
                best_gain = gain;
                best_cuts = cuts(pts, pr);
                continue;
            }
            if (gain > best_gain + 1e-12) {
                best = pr;
                best_gain = gain;
                best_cuts = cuts(pts, pr);
            } else if (std::abs(gain - best_gain) <= 1e-12) {
                int c = cuts(pts, pr);
                if (c < best_cuts) {  // pool is pre-sorted, so earlier pred wins remaining ties
                    best = pr;
                    best_gain = gain;
                    best_cuts = c;
                }
            }
        }
        return best;
    }

    std::unique_ptr<BNode> build(std::vector<Point> pts) const {
        auto node = std::make_unique<BNode>();
        size_t t, f;
        label_counts(pts, forced, t, f);
        bool mixed = t > 0 && f > 0;
        if (!mixed) {
            // homogeneous forced labels, or nothing forced at all: stop here;
            // leaf labeling (with the split-retry loop above) finishes the job
            node->pts = std::move(pts);
            return node;
        }
        auto pr = choose_split(pts, forced);
        if (!pr)
            throw NoTreeError{"no predicate separates " + std::to_string(pts.size()) +
                              " points with mixed forced labels"};
        std::vector<Point> yes, no;
        for (Point& p : pts) (pr->holds(p) ? yes : no).push_back(std::move(p));
        node->leaf = false;
        node->pred = *pr;
        node->pts.clear();
        node->yes = build(std::move(yes));
        node->no = build(std::move(no));
        return node;
    }
};

// Leaf ids by preorder; routing maps each point to the leaf it lands in.
void collect_leaves(BNode* n, std::vector<BNode*>& out) {
    if (n->leaf) {
        out.push_back(n);
        return;
    }
    collect_leaves(n->yes.get(), out);
    collect_leaves(n->no.get(), out);
}

int route(const BNode* n, const Point& p, const std::map<const BNode*, int>& ids) {
    while (!n->leaf) n = n->pred.holds(p) ? n->yes.get() : n->no.get();
    return ids.at(n);
}

// Horn constraints lifted to leaf ids; -1 consequent encodes FALSE.
struct LeafConstraint {
    std::vector<int> ante;
    int cons = -1;
};

// Propagation over leaf constraints; labels: 0 unknown, 1 true, 2 false.
bool leaf_propagate(const std::vector<LeafConstraint>& lcs, std::vector<int>& lab) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const LeafConstraint& c : lcs) {
            size_t trues = 0, unknowns = 0;
            int open = -1;
            for (int a : c.ante) {
                if (lab[a] == 1) trues++;
                else if (lab[a] == 0) { unknowns++; open = a; }
            }
            int cons_lab = c.cons < 0 ? 2 : lab[c.cons];
            if (trues == c.ante.size()) {
                if (c.cons < 0 || cons_lab == 2) return false;
                if (cons_lab == 0) { lab[c.cons] = 1; changed = true; }
            } else if (unknowns == 1 && trues == c.ante.size() - 1 && cons_lab == 2) {
                lab[open] = 2;
                changed = true;
            }
        }
    }
    return true;
}

} // namespace

LearnOutcome learn_horn_tree(const HornSample& hs, const std::vector<Predicate>& pool) {
    LearnOutcome out;

    PropagationResult prop = horn_propagate(hs);
    if (prop.conflict) {
        out.kind = LearnOutcome::Kind::Unsatisfiable;
        out.conflict_core = prop.conflict_core;
        out.detail = "sample admits no consistent labeling";
        return out;
    }

    if (hs.empty()) {
        // No evidence yet: the all-true tree flips to the empty winning set,
        // so the first counterexample is positive whenever init is nonempty.
        out.kind = LearnOutcome::Kind::Tree;
        out.tree = DecisionTree::leaf(true);
        return out;
    }

    std::set<Point> pointset;
    for (const HornConstraint& c : hs) {
        pointset.insert(c.antecedents.begin(), c.antecedents.end());
        if (c.consequent) pointset.insert(*c.consequent);
    }
    std::vector<Point> points(pointset.begin(), pointset.end());

    // The minimal Horn model — forced labels plus everything-else-false — is
    // a consistent total labeling whenever propagation found no conflict.  It
    // guides refinement when leaf labeling gets stuck: once every leaf is
    // pure under a consistent total labeling, that labeling restricted to
    // leaves satisfies all lifted constraints.
    PartialLabeling minmodel = prop.labeling;
    for (const Point& p : points) {
        if (minmodel.get(p) == Label::Unknown) minmodel.set(p, Label::False);
    }

    Builder b(hs, pool, prop.labeling, minmodel);
    std::unique_ptr<BNode> root;
    try {
        root = b.build(points);
    } catch (const NoTreeError& e) {
        out.kind = LearnOutcome::Kind::NoTree;
        out.detail = e.detail;
        return out;
    }

    for (;;) {
        std::vector<BNode*> leaves;
        collect_leaves(root.get(), leaves);
        std::map<const BNode*, int> ids;
        for (size_t i = 0; i < leaves.size(); i++) ids[leaves[i]] = static_cast<int>(i);

        // Seed each leaf from the forced labels of the points inside it.
        std::vector<int> lab(leaves.size(), 0);
        bool seed_ok = true;
        for (size_t i = 0; i < leaves.size() && seed_ok; i++) {
            for (const Point& p : leaves[i]->pts) {
                Label l = prop.labeling.get(p);
                if (l == Label::Unknown) continue;
                int want = l == Label::True ? 1 : 2;
                if (lab[i] == 0) lab[i] = want;
                else if (lab[i] != want) { seed_ok = false; break; }
            }
        }

        bool solved = false;
        if (seed_ok) {
            // Lift constraints to leaf level; self-supporting ones drop out.
            std::vector<LeafConstraint> lcs;
            for (const HornConstraint& c : hs) {
                LeafConstraint lc;
                std::set<int> ante;
                for (const Point& a : c.antecedents) ante.insert(route(root.get(), a, ids));
                lc.cons = c.consequent ? route(root.get(), *c.consequent, ids) : -1;
                if (lc.cons >= 0 && ante.count(lc.cons)) continue;
                lc.ante.assign(ante.begin(), ante.end());
                lcs.push_back(std::move(lc));
            }
            std::vector<int> work = lab;
            if (leaf_propagate(lcs, work)) {
                // Complete with the minimal Horn model: leaves not forced true
                // become false, always consistent for Horn constraints.  This
                // keeps the losing side as small as the evidence allows, which
                // is the shape safety games converge to from above.
                solved = true;
                for (int& l : work) {
                    if (l == 0) l = 2;
                }
                bool ok = leaf_propagate(lcs, work);
                assert(ok);
                (void)ok;
                lab = work;
            }
        }

        if (solved) {
            // Assemble the immutable tree.
            std::map<const BNode*, int>& idref = ids;
            std::function<DecisionTree(const BNode*)> assemble = [&](const BNode* n) -> DecisionTree {
                if (n->leaf) return DecisionTree::leaf(lab[idref.at(n)] == 1);
                return DecisionTree::node(n->pred, assemble(n->yes.get()), assemble(n->no.get()));
            };
            out.kind = LearnOutcome::Kind::Tree;
            out.tree = prune_tree(assemble(root.get()));
            return out;
        }

        // Labeling failed: the partition is too coarse for any consistent
        // assignment.  Refine toward the minimal Horn model — split the
        // largest leaf whose points it labels both ways; once all leaves are
        // pure under it, labeling is guaranteed to succeed.
        BNode* victim = nullptr;
        std::optional<Predicate> split;
        for (BNode* leaf : leaves) {
            size_t t, f;
            Builder::label_counts(leaf->pts, b.minmodel, t, f);
            if (t == 0 || f == 0) continue;
            if (victim && leaf->pts.size() <= victim->pts.size()) continue;
            auto pr = b.choose_split(leaf->pts, b.minmodel);
            if (pr) {
                victim = leaf;
                split = pr;
            }
        }
        if (!victim) {
            // Should be unreachable; fall back to any splittable leaf.
            for (BNode* leaf : leaves) {
                if (victim && leaf->pts.size() <= victim->pts.size()) continue;
                auto pr = b.choose_split(leaf->pts, b.forced);
                if (pr) {
                    victim = leaf;
                    split = pr;
                }
            }
        }
        if (!victim) {
            out.kind = LearnOutcome::Kind::NoTree;
            out.detail = "leaf labeling failed and no leaf can be split further";
            return out;
        }
        std::vector<Point> yes, no;
        for (Point& p : victim->pts) (split->holds(p) ? yes : no).push_back(std::move(p));
        victim->leaf = false;
        victim->pred = *split;
        victim->pts.clear();
        auto ynode = std::make_unique<BNode>();
        ynode->pts = std::move(yes);
        auto nnode = std::make_unique<BNode>();
        nnode->pts = std::move(no);
        victim->yes = std::move(ynode);
        victim->no = std::move(nnode);
    }
}

LearnerResult learn_hypothesis(const GameSample& s, int arity, bool octagonal) {
    (void)arity;
    LearnerResult res;
    HornSample hs = game_to_horn(s);
    std::vector<Predicate> pool = generate_predicates(s.all_points(), octagonal);
    LearnOutcome out = learn_horn_tree(hs, pool);
    res.kind = out.kind;
    res.conflict_core = out.conflict_core;
    res.detail = out.detail;
    if (out.kind == LearnOutcome::Kind::Tree) res.hypothesis = flip_leaves(*out.tree);
    return res;
}

} // namespace gamesynth
