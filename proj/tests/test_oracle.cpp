#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "reslin/games.hpp"
#include "reslin/oracle.hpp"

using namespace reslin;

namespace {

BitVec bits_of(std::size_t nvars, std::initializer_list<int> ones) {
  BitVec v(nvars);
  for (int i : ones) v.set(static_cast<std::size_t>(i), true);
  return v;
}

LinCnf unit_pair_cnf() {
  LinCnf cnf(1);
  cnf.add_clause(LinClause({LinEquation(bits_of(1, {0}), true)}));
  cnf.add_clause(LinClause({LinEquation(bits_of(1, {0}), false)}));
  return cnf;
}

LinCnf xor_cycle_cnf() {
  LinCnf cnf(3);
  cnf.add_clause(LinClause({LinEquation(bits_of(3, {0, 1}), false)}));
  cnf.add_clause(LinClause({LinEquation(bits_of(3, {1, 2}), false)}));
  cnf.add_clause(LinClause({LinEquation(bits_of(3, {0, 2}), true)}));
  return cnf;
}

// Plays a splitting tree as a Prover strategy: ask the current node's form
// and descend along the settled value.
class TreeProver : public Prover {
 public:
  explicit TreeProver(const SplitTree& tree) : tree_(tree), cur_(tree.root) {}

  BitVec choose_form(const GameState& state, const LinCnf&) override {
    if (!state.transcript().empty()) {
      const auto& prev = state.transcript().back();
      const auto& nd = std::get<SplitTree::Node>(tree_.nodes.at(static_cast<std::size_t>(cur_)));
      cur_ = prev.settled ? nd.child1 : nd.child0;
    }
    const auto& nd = tree_.nodes.at(static_cast<std::size_t>(cur_));
    if (const auto* n = std::get_if<SplitTree::Node>(&nd)) return n->form;
    throw std::logic_error("tree prover asked for a form at a leaf");
  }

  bool choose_value(const GameState&, const BitVec&, const LinCnf&,
                    const std::vector<int>&) override {
    return false;
  }

 private:
  const SplitTree& tree_;
  int cur_;
};

}  // namespace

TEST_CASE("trivial minimum trees") {
  LinCnf with_empty(2);
  with_empty.add_clause(LinClause({LinEquation(bits_of(2, {0}), true)}));
  with_empty.add_clause(LinClause());
  auto r = min_split_tree(with_empty);
  REQUIRE(r.optimal);
  CHECK(r.size == 1);
  TreeProof proof = split_tree_to_proof(r.tree, with_empty);
  CHECK(proof.nodes.size() == 1);
  CHECK(verify_tree_proof(proof, with_empty).ok);

  auto up = min_split_tree(unit_pair_cnf());
  REQUIRE(up.optimal);
  CHECK(up.size == 3);
  CHECK(write_split_tree(up.tree) == "(node 1 (leaf 1) (leaf 2))\n");
  TreeProof up_proof = split_tree_to_proof(up.tree, unit_pair_cnf());
  CHECK(up_proof.nodes.size() == 3);  // two inputs and a resolution; weakenings elided
  CHECK(verify_tree_proof(up_proof, unit_pair_cnf()).ok);
}

TEST_CASE("exact minimum splitting trees at six variables") {
  LinCnf php = make_pigeonhole(3, 2);
  auto r = min_split_tree(php);
  REQUIRE(r.optimal);
  CHECK(r.size == 21);
  CHECK(r.subspaces == 26387);  // every affine subspace of F2^6

  LinCnf ord = make_ordering(3);
  auto r2 = min_split_tree(ord);
  REQUIRE(r2.optimal);
  CHECK(r2.size == 17);

  // Determinism of the reconstructed tree.
  auto r3 = min_split_tree(php);
  CHECK(write_split_tree(r.tree) == write_split_tree(r3.tree));
}

TEST_CASE("conversion produces verifiable refutations within 2x the tree") {
  for (const LinCnf& cnf : {make_pigeonhole(3, 2), make_ordering(3), xor_cycle_cnf()}) {
    auto r = min_split_tree(cnf);
    REQUIRE(r.optimal);
    TreeProof proof = split_tree_to_proof(r.tree, cnf);
    auto check = verify_tree_proof(proof, cnf);
    REQUIRE(check.ok);
    CHECK(proof.nodes.size() <= 2 * r.size);
    CHECK(check.size == proof.nodes.size());

    SpaceScript script = tree_proof_to_space_script(proof, cnf);
    auto sc = verify_space_script(script, cnf);
    REQUIRE(sc.ok);
    CHECK(sc.refuted);
    CHECK(sc.space >= 1);
  }
}

TEST_CASE("memoization does not change results") {
  OracleLimits no_memo;
  no_memo.memoize = false;
  for (const LinCnf& cnf : {unit_pair_cnf(), xor_cycle_cnf()}) {
    auto with = min_split_tree(cnf);
    auto without = min_split_tree(cnf, no_memo);
    REQUIRE(with.optimal);
    REQUIRE(without.optimal);
    CHECK(with.size == without.size);
    CHECK(write_split_tree(with.tree) == write_split_tree(without.tree));
  }
}

TEST_CASE("a satisfiable cnf is reported with a model") {
  LinCnf sat(2);
  sat.add_clause(LinClause({LinEquation(bits_of(2, {0}), true)}));
  try {
    min_split_tree(sat);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("satisfiable") != std::string::npos);
  }
}

TEST_CASE("budget exhaustion yields an honest upper bound") {
  OracleLimits tiny;
  tiny.memo_budget = 10;
  LinCnf php = make_pigeonhole(3, 2);
  auto r = min_split_tree(php, tiny);
  REQUIRE_FALSE(r.optimal);
  CHECK(r.size >= 21);  // never better than the proven optimum
  TreeProof proof = split_tree_to_proof(r.tree, php);
  CHECK(verify_tree_proof(proof, php).ok);
}

TEST_CASE("tree codec round trips and validates") {
  auto r = min_split_tree(make_pigeonhole(3, 2));
  const std::string text = write_split_tree(r.tree);
  SplitTree back = parse_split_tree(text, 6);
  CHECK(write_split_tree(back) == text);
  CHECK_THROWS_AS(parse_split_tree("(node 1 (leaf 1)", 6), ParseError);
  CHECK_THROWS_AS(parse_split_tree("(branch 1 (leaf 1) (leaf 2))", 6), ParseError);
}

TEST_CASE("conversion pinpoints invariant violations") {
  // A leaf naming a clause that is not falsified on the whole subspace.
  SplitTree bad;
  bad.nodes.push_back(SplitTree::Leaf{0});
  bad.root = 0;
  LinCnf php = make_pigeonhole(3, 2);
  try {
    split_tree_to_proof(bad, php);
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("tree node 0") != std::string::npos);
  }
}

TEST_CASE("lower-bound consistency with extensibility and games") {
  // php(3,2) is 1-extensible w.r.t. HOLES and ordering(3) w.r.t. ORDER,
  // so both brackets [2^m, converted proof size] must hold.
  struct Case {
    LinCnf cnf;
    std::vector<int> f;
    int m;
  };
  LinCnf php = make_pigeonhole(3, 2);
  LinCnf ord = make_ordering(3);
  std::vector<Case> cases;
  cases.push_back({php, php.indices_with_label("hole"), 1});
  cases.push_back({ord, ord.indices_with_label("order"), 1});
  for (const auto& c : cases) {
    REQUIRE(check_extensibility(c.cnf, c.f, c.m).holds());
    auto r = min_split_tree(c.cnf);
    REQUIRE(r.optimal);
    CHECK(r.size >= (std::size_t{1} << c.m));
    TreeProof proof = split_tree_to_proof(r.tree, c.cnf);
    CHECK(proof.nodes.size() >= (std::size_t{1} << c.m));

    TreeProver prover(r.tree);
    auto game = run_game(c.cnf, c.f, prover);
    REQUIRE(game.outcome == GameOutcome::Refuted);
    CHECK(game.coins >= c.m);
  }
}
