#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "reslin/extend.hpp"
#include "reslin/formula.hpp"
#include "reslin/gf2.hpp"
#include "reslin/proofcheck.hpp"
#include "reslin/textio.hpp"

namespace reslin {

// A linear splitting tree: internal nodes query a form, leaves name a
// clause falsified on the whole subspace cut out by the path constraints.
struct SplitTree {
  struct Leaf {
    int clause_index;
  };
  struct Node {
    BitVec form;
    int child0;  // subtree under form = 0
    int child1;  // subtree under form = 1
  };
  using N = std::variant<Leaf, Node>;

  std::vector<N> nodes;
  int root = -1;

  std::size_t size() const { return nodes.size(); }
};

struct OracleLimits {
  std::size_t max_vars = 8;
  std::size_t memo_budget = 10'000'000;
  bool memoize = true;
  int jobs = 1;  // accepted for interface symmetry; the search is sequential
};

struct OracleResult {
  bool optimal = false;
  std::size_t size = 0;
  SplitTree tree;
  std::size_t subspaces = 0;  // distinct canonical subspaces explored
};

namespace detail {

struct OracleBudgetHit {};

// Shared helpers over a fixed cnf: leaf detection and the coset
// representatives of forms that are non-constant on a subspace.
struct SplitContext {
  const LinCnf& cnf;
  std::vector<std::vector<LinEquation>> neg_rows;

  explicit SplitContext(const LinCnf& c) : cnf(c) {
    for (const auto& clause : c.clauses()) {
      std::vector<LinEquation> rows;
      for (const auto& lit : clause.literals()) rows.push_back(lit.flipped());
      neg_rows.push_back(std::move(rows));
    }
  }

  // Smallest clause index falsified everywhere on the subspace, or -1.
  int dead_clause(const LinSystem& a) const {
    for (std::size_t i = 0; i < neg_rows.size(); ++i) {
      bool dead = true;
      for (const auto& row : neg_rows[i])
        if (!a.implies(row)) {
          dead = false;
          break;
        }
      if (dead) return static_cast<int>(i);
    }
    return -1;
  }

  // Reduced representatives of all forms non-constant on the subspace, in
  // ascending order: forms equal modulo the constraint span split alike.
  std::vector<BitVec> split_forms(const LinSystem& a) const {
    const std::size_t n = cnf.nvars();
    std::vector<BitVec> reps;
    for (std::uint64_t fm = 1; fm < (std::uint64_t{1} << n); ++fm) {
      BitVec f(n);
      for (std::size_t i = 0; i < n; ++i)
        if ((fm >> i) & 1u) f.set(i, true);
      LinEquation r = a.reduce(LinEquation(f, false));
      if (r.form.none()) continue;
      reps.push_back(r.form);
    }
    std::sort(reps.begin(), reps.end());
    reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
    return reps;
  }
};

}  // namespace detail

// Exact minimum node count of a splitting tree for an unsatisfiable cnf:
// T(A) = 1 when a clause dies on A, else 1 + min over coset representatives
// f of T(A & f=0) + T(A & f=1), memoized on the canonical subspace key with
// the least minimizing form recorded for reconstruction. When the memo
// budget trips, a greedy descent supplies an honest upper bound with
// optimal = false. A satisfiable cnf is reported as an error naming a model.
inline OracleResult min_split_tree(const LinCnf& cnf, OracleLimits limits = {}) {
  if (cnf.nvars() > limits.max_vars)
    throw LimitError("oracle limited to " + std::to_string(limits.max_vars) +
                     " variables, got " + std::to_string(cnf.nvars()));
  detail::SplitContext ctx(cnf);

  struct Rec {
    std::uint32_t size;
    int leaf_clause;  // >= 0 at leaves
    BitVec form;      // the chosen split otherwise
  };
  std::unordered_map<std::string, Rec> memo;

  // Non-constant forms exist on every non-leaf subspace of an unsatisfiable
  // cnf; an exhausted subspace is a single point satisfying every clause.
  auto splits_or_fail = [&](const LinSystem& a) {
    auto reps = ctx.split_forms(a);
    if (reps.empty()) {
      std::string model;
      if (auto point = solve(a))
        for (std::size_t i = 0; i < point->size(); ++i) model += point->get(i) ? '1' : '0';
      throw std::invalid_argument("cnf is satisfiable, e.g. by assignment " + model);
    }
    return reps;
  };

  // Plain recursion; used when memoization is disabled (small instances).
  std::function<std::uint32_t(const LinSystem&)> solve_plain =
      [&](const LinSystem& a) -> std::uint32_t {
    if (ctx.dead_clause(a) >= 0) return 1;
    std::uint32_t best = 0;
    for (const auto& f : splits_or_fail(a)) {
      const std::uint32_t s = 1 + solve_plain(a.extended(LinEquation(f, false))) +
                              solve_plain(a.extended(LinEquation(f, true)));
      if (best == 0 || s < best) best = s;
    }
    return best;
  };

  std::function<std::uint32_t(const LinSystem&)> solve_memo =
      [&](const LinSystem& a) -> std::uint32_t {
    const std::string key = a.canonical_key();
    if (auto it = memo.find(key); it != memo.end()) return it->second.size;
    Rec rec{0, ctx.dead_clause(a), {}};
    if (rec.leaf_clause >= 0) {
      rec.size = 1;
    } else {
      for (const auto& f : splits_or_fail(a)) {
        const std::uint32_t s = 1 + solve_memo(a.extended(LinEquation(f, false))) +
                                solve_memo(a.extended(LinEquation(f, true)));
        if (rec.size == 0 || s < rec.size) {
          rec.size = s;
          rec.form = f;
        }
      }
    }
    if (memo.size() >= limits.memo_budget) throw detail::OracleBudgetHit{};
    memo.emplace(key, rec);
    return rec.size;
  };

  // Greedy fallback: always split on the first representative.
  std::function<int(SplitTree&, const LinSystem&)> greedy =
      [&](SplitTree& tree, const LinSystem& a) -> int {
    const int dead = ctx.dead_clause(a);
    if (dead >= 0) {
      tree.nodes.push_back(SplitTree::Leaf{dead});
      return static_cast<int>(tree.nodes.size()) - 1;
    }
    const BitVec f = splits_or_fail(a).front();
    const int c0 = greedy(tree, a.extended(LinEquation(f, false)));
    const int c1 = greedy(tree, a.extended(LinEquation(f, true)));
    tree.nodes.push_back(SplitTree::Node{f, c0, c1});
    return static_cast<int>(tree.nodes.size()) - 1;
  };

  OracleResult res;
  const LinSystem root(cnf.nvars());
  if (!limits.memoize) {
    res.size = solve_plain(root);
    res.optimal = true;
    // Rebuild by re-solving: cheap at the scales memoization is disabled for.
    std::function<int(const LinSystem&)> build = [&](const LinSystem& a) -> int {
      const int dead = ctx.dead_clause(a);
      if (dead >= 0) {
        res.tree.nodes.push_back(SplitTree::Leaf{dead});
        return static_cast<int>(res.tree.nodes.size()) - 1;
      }
      std::uint32_t best = 0;
      BitVec best_form;
      for (const auto& f : splits_or_fail(a)) {
        const std::uint32_t s = 1 + solve_plain(a.extended(LinEquation(f, false))) +
                                solve_plain(a.extended(LinEquation(f, true)));
        if (best == 0 || s < best) {
          best = s;
          best_form = f;
        }
      }
      const int c0 = build(a.extended(LinEquation(best_form, false)));
      const int c1 = build(a.extended(LinEquation(best_form, true)));
      res.tree.nodes.push_back(SplitTree::Node{best_form, c0, c1});
      return static_cast<int>(res.tree.nodes.size()) - 1;
    };
    res.tree.root = build(root);
    return res;
  }

  try {
    res.size = solve_memo(root);
    res.optimal = true;
  } catch (const detail::OracleBudgetHit&) {
    res.optimal = false;
    res.tree.nodes.clear();
    res.tree.root = greedy(res.tree, root);
    res.size = res.tree.size();
    res.subspaces = memo.size();
    return res;
  }
  std::function<int(const LinSystem&)> rebuild = [&](const LinSystem& a) -> int {
    const Rec& rec = memo.at(a.canonical_key());
    if (rec.leaf_clause >= 0) {
      res.tree.nodes.push_back(SplitTree::Leaf{rec.leaf_clause});
      return static_cast<int>(res.tree.nodes.size()) - 1;
    }
    const int c0 = rebuild(a.extended(LinEquation(rec.form, false)));
    const int c1 = rebuild(a.extended(LinEquation(rec.form, true)));
    res.tree.nodes.push_back(SplitTree::Node{rec.form, c0, c1});
    return static_cast<int>(res.tree.nodes.size()) - 1;
  };
  res.tree.root = rebuild(root);
  res.subspaces = memo.size();
  return res;
}

// Turns a splitting tree into a tree-like refutation: each node derives the
// clause negating its path system; leaves are inputs weakened to that
// clause (the weakening is elided when the input already equals it), and
// every split resolves the two children on its form. The proof has at most
// twice the tree's node count.
inline TreeProof split_tree_to_proof(const SplitTree& tree, const LinCnf& cnf) {
  if (tree.root < 0) throw std::invalid_argument("empty splitting tree");
  const std::size_t n = cnf.nvars();
  TreeProof proof;

  std::function<int(int, std::vector<LinEquation>&)> build =
      [&](int node, std::vector<LinEquation>& path) -> int {
    std::vector<LinLiteral> flipped;
    for (const auto& row : path) flipped.push_back(row.flipped());
    const LinClause path_clause(std::move(flipped));

    const auto& nd = tree.nodes.at(static_cast<std::size_t>(node));
    if (const auto* leaf = std::get_if<SplitTree::Leaf>(&nd)) {
      if (leaf->clause_index < 0 ||
          static_cast<std::size_t>(leaf->clause_index) >= cnf.size())
        throw std::invalid_argument("leaf clause index out of range at tree node " +
                                    std::to_string(node));
      const LinSystem a(n, path);
      for (const auto& lit : cnf.clause(static_cast<std::size_t>(leaf->clause_index)).literals())
        if (!a.implies(lit.flipped()))
          throw std::invalid_argument(
              "leaf clause is not falsified on the whole subspace at tree node " +
              std::to_string(node));
      proof.nodes.push_back(TreeProof::Input{leaf->clause_index});
      int id = static_cast<int>(proof.nodes.size()) - 1;
      if (!(cnf.clause(static_cast<std::size_t>(leaf->clause_index)) == path_clause)) {
        proof.nodes.push_back(TreeProof::Weaken{id, path_clause});
        id = static_cast<int>(proof.nodes.size()) - 1;
      }
      return id;
    }

    const auto& split = std::get<SplitTree::Node>(nd);
    if (LinSystem(n, path).reduce(LinEquation(split.form, false)).form.none())
      throw std::invalid_argument("split form is constant on the subspace at tree node " +
                                  std::to_string(node));
    path.emplace_back(split.form, true);
    const int left = build(split.child1, path);  // carries the literal (f=0)
    path.back() = LinEquation(split.form, false);
    const int right = build(split.child0, path);  // carries the literal (f=1)
    path.pop_back();
    proof.nodes.push_back(TreeProof::Resolve{left, right, split.form});
    return static_cast<int>(proof.nodes.size()) - 1;
  };

  std::vector<LinEquation> path;
  build(tree.root, path);
  return proof;
}

// ---------------------------------------------------------------------------
// S-expression codec: "(leaf <clause>)" | "(node <form> <t0> <t1>)".

inline std::string write_split_tree(const SplitTree& tree) {
  std::function<std::string(int)> emit = [&](int node) -> std::string {
    const auto& nd = tree.nodes.at(static_cast<std::size_t>(node));
    if (const auto* leaf = std::get_if<SplitTree::Leaf>(&nd))
      return "(leaf " + std::to_string(leaf->clause_index + 1) + ")";
    const auto& split = std::get<SplitTree::Node>(nd);
    return "(node " + textio::write_form(split.form) + " " + emit(split.child0) + " " +
           emit(split.child1) + ")";
  };
  return tree.root < 0 ? std::string() : emit(tree.root) + "\n";
}

inline SplitTree parse_split_tree(std::string_view text, std::size_t nvars) {
  SplitTree tree;
  std::size_t pos = 0;

  auto error = [&](const std::string& what) -> ParseError {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return ParseError(line, col, what);
  };
  auto skip_ws = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\n' || text[pos] == '\t'))
      ++pos;
  };
  auto atom = [&]() -> std::string_view {
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != '\n' && text[pos] != '\t' &&
           text[pos] != '(' && text[pos] != ')')
      ++pos;
    return text.substr(start, pos - start);
  };

  std::function<int()> parse_node = [&]() -> int {
    skip_ws();
    if (pos >= text.size() || text[pos] != '(') throw error("expected '('");
    ++pos;
    skip_ws();
    const std::string_view head = atom();
    if (head == "leaf") {
      skip_ws();
      const long idx = textio::parse_int(atom(), 1, 1);
      skip_ws();
      if (pos >= text.size() || text[pos] != ')') throw error("expected ')'");
      ++pos;
      tree.nodes.push_back(SplitTree::Leaf{static_cast<int>(idx) - 1});
      return static_cast<int>(tree.nodes.size()) - 1;
    }
    if (head != "node") throw error("expected 'leaf' or 'node'");
    skip_ws();
    const BitVec form = textio::parse_form(atom(), nvars, 1, 1);
    const int c0 = parse_node();
    const int c1 = parse_node();
    skip_ws();
    if (pos >= text.size() || text[pos] != ')') throw error("expected ')'");
    ++pos;
    tree.nodes.push_back(SplitTree::Node{form, c0, c1});
    return static_cast<int>(tree.nodes.size()) - 1;
  };

  tree.root = parse_node();
  skip_ws();
  if (pos != text.size()) throw error("trailing content after the tree");
  return tree;
}

}  // namespace reslin
