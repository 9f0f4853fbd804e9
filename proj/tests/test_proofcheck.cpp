#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <vector>

#include "reslin/proofcheck.hpp"

using namespace reslin;

namespace {

BitVec bits_of(std::size_t nvars, std::initializer_list<int> ones) {
  BitVec v(nvars);
  for (int i : ones) v.set(static_cast<std::size_t>(i), true);
  return v;
}

LinEquation eqn(std::size_t nvars, std::initializer_list<int> ones, bool rhs) {
  return LinEquation(bits_of(nvars, ones), rhs);
}

LinCnf unit_pair_cnf() {  // {(x=1), (x=0)} over one variable
  LinCnf cnf(1);
  cnf.add_clause(LinClause({eqn(1, {0}, true)}));
  cnf.add_clause(LinClause({eqn(1, {0}, false)}));
  return cnf;
}

bool brute_implication(const LinClause& c, const LinClause& d, std::size_t nvars) {
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << nvars); ++m) {
    BitVec a(nvars);
    for (std::size_t i = 0; i < nvars; ++i) a.set(i, (m >> i) & 1u);
    if (c.evaluate(a) && !d.evaluate(a)) return false;
  }
  return true;
}

LinClause random_clause(std::mt19937_64& rng, std::size_t nvars, std::size_t max_width) {
  std::vector<LinLiteral> lits;
  const std::size_t w = rng() % (max_width + 1);
  for (std::size_t i = 0; i < w; ++i) {
    BitVec f(nvars);
    for (std::size_t v = 0; v < nvars; ++v) f.set(v, rng() & 1u);
    lits.emplace_back(f, rng() & 1u);
  }
  return LinClause(std::move(lits));
}

// A random non-tautological pair c |= d, built by extending the negation
// system of c with extra rows and re-mixing.
bool random_weakening_pair(std::mt19937_64& rng, std::size_t nvars, LinClause& c, LinClause& d) {
  c = random_clause(rng, nvars, 3);
  if (c.is_tautological() || c.empty()) return false;
  std::vector<LinEquation> base;
  for (const auto& lit : c.literals()) base.push_back(lit.flipped());
  std::vector<LinEquation> rows = base;
  const std::size_t extra = rng() % 3;
  for (std::size_t i = 0; i < extra; ++i) {
    BitVec f(nvars);
    for (std::size_t v = 0; v < nvars; ++v) f.set(v, rng() & 1u);
    rows.emplace_back(f, rng() & 1u);
  }
  // Mix a few rows into each other to hide the original literals.
  for (int i = 0; i < 3 && rows.size() >= 2; ++i) {
    std::size_t a = rng() % rows.size(), b = rng() % rows.size();
    if (a == b) continue;
    rows[a].form ^= rows[b].form;
    rows[a].rhs = rows[a].rhs ^ rows[b].rhs;
  }
  // The span must still cover the base rows; mixing keeps the span intact.
  std::vector<LinLiteral> dl;
  for (const auto& r : rows) dl.push_back(r.flipped());
  d = LinClause(std::move(dl));
  if (d.is_tautological()) return false;
  if (!check_clause_implication(c, d, nvars)) return false;
  return true;
}

}  // namespace

TEST_CASE("clause implication spec cases") {
  const std::size_t n = 2;
  LinClause c({eqn(n, {0}, true)});
  CHECK(check_clause_implication(c, LinClause({eqn(n, {0}, true), eqn(n, {1}, false)}), n));
  CHECK(check_clause_implication(c, LinClause({eqn(n, {0, 1}, true), eqn(n, {1}, true)}), n));
  CHECK_FALSE(check_clause_implication(c, LinClause({eqn(n, {1}, true)}), n));

  // The empty clause implies everything; nothing satisfiable implies it.
  CHECK(check_clause_implication(LinClause(), c, n));
  CHECK_FALSE(check_clause_implication(c, LinClause(), n));
  // Any clause implies a tautology.
  CHECK(check_clause_implication(c, LinClause({eqn(n, {1}, true), eqn(n, {1}, false)}), n));
}

TEST_CASE("clause implication agrees with exhaustive evaluation") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 400; ++it) {
    const std::size_t n = 1 + rng() % 12;
    LinClause c = random_clause(rng, n, 3);
    LinClause d = random_clause(rng, n, 3);
    REQUIRE(check_clause_implication(c, d, n) == brute_implication(c, d, n));
  }
}

TEST_CASE("a one-resolution refutation verifies") {
  LinCnf cnf = unit_pair_cnf();
  TreeProof proof;
  proof.nodes.push_back(TreeProof::Input{1});  // (x=0), contains pivot literal x=0
  proof.nodes.push_back(TreeProof::Input{0});  // (x=1)
  proof.nodes.push_back(TreeProof::Resolve{0, 1, bits_of(1, {0})});
  auto res = verify_tree_proof(proof, cnf);
  REQUIRE(res.ok);
  CHECK(res.size == 3);
  CHECK(res.width == 1);
}

TEST_CASE("resolution premises must carry the pivot literals") {
  LinCnf cnf(2);
  cnf.add_clause(LinClause({eqn(2, {0}, true)}));
  cnf.add_clause(LinClause({eqn(2, {1}, true)}));
  TreeProof proof;
  proof.nodes.push_back(TreeProof::Input{0});
  proof.nodes.push_back(TreeProof::Input{1});
  proof.nodes.push_back(TreeProof::Resolve{0, 1, bits_of(2, {0})});
  auto res = verify_tree_proof(proof, cnf);
  REQUIRE_FALSE(res.ok);
  CHECK(res.failed_node == 2);
  CHECK(res.diagnostic.find("lacks literal") != std::string::npos);
}

TEST_CASE("weakening to an unimplied clause is rejected") {
  LinCnf cnf(2);
  cnf.add_clause(LinClause({eqn(2, {0}, true)}));
  TreeProof proof;
  proof.nodes.push_back(TreeProof::Input{0});
  proof.nodes.push_back(TreeProof::Weaken{0, LinClause({eqn(2, {1}, true)})});
  auto res = verify_tree_proof(proof, cnf);
  REQUIRE_FALSE(res.ok);
  CHECK(res.failed_node == 1);
  CHECK(res.diagnostic.find("not semantically implied") != std::string::npos);
}

TEST_CASE("tree shape violations are rejected") {
  LinCnf cnf = unit_pair_cnf();
  TreeProof reuse;  // node 0 used twice
  reuse.nodes.push_back(TreeProof::Input{0});
  reuse.nodes.push_back(TreeProof::SynWeaken{0, eqn(1, {0}, false)});
  reuse.nodes.push_back(TreeProof::Resolve{1, 0, bits_of(1, {0})});
  auto res = verify_tree_proof(reuse, cnf);
  REQUIRE_FALSE(res.ok);
  CHECK(res.diagnostic.find("tree shape") != std::string::npos);

  TreeProof nonempty;  // root is not the empty clause
  nonempty.nodes.push_back(TreeProof::Input{0});
  auto res2 = verify_tree_proof(nonempty, cnf);
  REQUIRE_FALSE(res2.ok);
  CHECK(res2.diagnostic.find("root") != std::string::npos);
  CHECK(res2.size == 1);
}

TEST_CASE("syntactic rules compute the stated clauses") {
  LinCnf cnf(2);
  cnf.add_clause(LinClause({eqn(2, {0}, true), eqn(2, {1}, false)}));
  TreeProof proof;
  proof.nodes.push_back(TreeProof::Input{0});
  // add on positions 1,2 of [x=1, y=0]: keeps x=1, replaces y=0 by x+y=0.
  proof.nodes.push_back(TreeProof::Add{0, 0, 1});
  auto res = verify_tree_proof(proof, cnf);
  REQUIRE(res.failed_node == 1);  // fails only the root-emptiness check
  CHECK(res.clauses[1] == LinClause({eqn(2, {0}, true), eqn(2, {0, 1}, false)}));

  // Simplification removes exactly the 0=1 literal.
  LinClause with_falsum({eqn(2, {0}, true), LinEquation(BitVec(2), true)});
  SynStep simp{SynStep::Kind::Simplify, {}, 0, 0};
  CHECK(apply_syn_step(with_falsum, simp, 2) == LinClause({eqn(2, {0}, true)}));
  CHECK_THROWS_AS(apply_syn_step(LinClause({eqn(2, {0}, true)}), simp, 2),
                  std::invalid_argument);
}

TEST_CASE("space script verification") {
  LinCnf cnf = unit_pair_cnf();
  SpaceScript s;
  s.steps.push_back(SpaceScript::Load{1});
  s.steps.push_back(SpaceScript::Load{0});
  s.steps.push_back(SpaceScript::InferRes{1, 2, bits_of(1, {0})});
  auto res = verify_space_script(s, cnf);
  REQUIRE(res.ok);
  CHECK(res.space == 3);
  CHECK(res.refuted);

  SpaceScript bad;
  bad.steps.push_back(SpaceScript::Load{0});
  bad.steps.push_back(SpaceScript::Erase{2});
  auto res2 = verify_space_script(bad, cnf);
  REQUIRE_FALSE(res2.ok);
  CHECK(res2.failed_step == 1);
  CHECK(res2.diagnostic.find("erase") != std::string::npos);

  // Premises stay in memory across an inference.
  SpaceScript keep;
  keep.steps.push_back(SpaceScript::Load{0});
  keep.steps.push_back(SpaceScript::InferWeak{1, cnf.clause(0).with(eqn(1, {0}, false))});
  auto res3 = verify_space_script(keep, cnf);
  REQUIRE(res3.ok);
  CHECK(res3.space == 2);
  CHECK_FALSE(res3.refuted);
}

TEST_CASE("desugar_weakening spec cases") {
  const std::size_t n = 2;
  LinClause c({eqn(n, {0}, true)});

  auto steps = desugar_weakening(c, LinClause({eqn(n, {0}, true), eqn(n, {1}, false)}), n);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].kind == SynStep::Kind::SynWeaken);
  CHECK(steps[0].lit == eqn(n, {1}, false));

  LinClause d({eqn(n, {0, 1}, true), eqn(n, {1}, true)});
  auto steps2 = desugar_weakening(c, d, n);
  auto chain = replay_syn_steps(c, steps2, n);
  REQUIRE_FALSE(chain.empty());
  CHECK(chain.back() == d);

  CHECK(desugar_weakening(c, c, n).empty());

  CHECK_THROWS_AS(desugar_weakening(c, LinClause({eqn(n, {1}, true)}), n),
                  std::invalid_argument);
  LinClause taut({eqn(n, {0}, true), eqn(n, {0}, false)});
  CHECK_THROWS_AS(desugar_weakening(taut, taut, n), std::invalid_argument);
}

TEST_CASE("random weakenings desugar, replay and splice within one extra clause") {
  std::mt19937_64 rng(12);
  int done = 0;
  while (done < 60) {
    const std::size_t n = 2 + rng() % 7;  // up to 8 variables
    LinClause c, d;
    if (!random_weakening_pair(rng, n, c, d)) continue;
    ++done;

    auto steps = desugar_weakening(c, d, n);
    auto chain = replay_syn_steps(c, steps, n);
    const LinClause last = chain.empty() ? c : chain.back();
    REQUIRE(last == d);

    LinCnf cnf(n);
    cnf.add_clause(c);
    SpaceScript script;
    script.steps.push_back(SpaceScript::Load{0});
    script.steps.push_back(SpaceScript::InferWeak{1, d});
    auto before = verify_space_script(script, cnf);
    REQUIRE(before.ok);

    SpaceScript spliced = desugar_script_weakenings(script, cnf);
    auto after = verify_space_script(spliced, cnf);
    REQUIRE(after.ok);
    REQUIRE(after.space <= before.space + 1);
  }
}

TEST_CASE("verified proofs are sound against subtree inputs (brute force)") {
  LinCnf cnf(2);
  cnf.add_clause(LinClause({eqn(2, {0}, true), eqn(2, {1}, true)}));
  cnf.add_clause(LinClause({eqn(2, {0}, true), eqn(2, {1}, false)}));
  cnf.add_clause(LinClause({eqn(2, {0}, false)}));
  TreeProof proof;
  proof.nodes.push_back(TreeProof::Input{0});
  proof.nodes.push_back(TreeProof::Input{1});
  proof.nodes.push_back(TreeProof::Resolve{1, 0, bits_of(2, {1})});  // (x=1)
  proof.nodes.push_back(TreeProof::Input{2});                        // (x=0)
  proof.nodes.push_back(TreeProof::Resolve{3, 2, bits_of(2, {0})});  // empty
  auto res = verify_tree_proof(proof, cnf);
  REQUIRE(res.ok);

  // Collect subtree inputs per node, then check semantic soundness.
  std::vector<std::vector<int>> inputs(proof.nodes.size());
  for (std::size_t id = 0; id < proof.nodes.size(); ++id) {
    const auto& node = proof.nodes[id];
    if (const auto* in = std::get_if<TreeProof::Input>(&node))
      inputs[id] = {in->clause_index};
    else if (const auto* r = std::get_if<TreeProof::Resolve>(&node)) {
      inputs[id] = inputs[static_cast<std::size_t>(r->left)];
      for (int x : inputs[static_cast<std::size_t>(r->right)]) inputs[id].push_back(x);
    }
  }
  for (std::size_t id = 0; id < proof.nodes.size(); ++id) {
    for (std::uint64_t m = 0; m < 4; ++m) {
      BitVec a(2);
      a.set(0, m & 1u);
      a.set(1, (m >> 1) & 1u);
      bool all_inputs = true;
      for (int ci : inputs[id])
        if (!cnf.clause(static_cast<std::size_t>(ci)).evaluate(a)) all_inputs = false;
      if (all_inputs) REQUIRE(res.clauses[id].evaluate(a));
    }
  }
}

TEST_CASE("tree proofs replay as space scripts") {
  LinCnf cnf = unit_pair_cnf();
  TreeProof proof;
  proof.nodes.push_back(TreeProof::Input{1});
  proof.nodes.push_back(TreeProof::Input{0});
  proof.nodes.push_back(TreeProof::Resolve{0, 1, bits_of(1, {0})});
  SpaceScript script = tree_proof_to_space_script(proof, cnf);
  auto res = verify_space_script(script, cnf);
  REQUIRE(res.ok);
  CHECK(res.refuted);
  CHECK(res.space >= 1);
}

TEST_CASE("xlp codec round trips and validates") {
  LinCnf cnf = unit_pair_cnf();
  TreeProof proof;
  proof.nodes.push_back(TreeProof::Input{1});
  proof.nodes.push_back(TreeProof::Input{0});
  proof.nodes.push_back(TreeProof::Resolve{0, 1, bits_of(1, {0})});
  const std::string text = write_xlp(proof);
  CHECK(text == "p xlp tree 3\n1 input 2\n2 input 1\n3 res 1 2 1\n");
  TreeProof back = parse_xlp(text, 1);
  CHECK(write_xlp(back) == text);
  REQUIRE(verify_tree_proof(back, cnf).ok);

  CHECK_THROWS_AS(parse_xlp("p xlp tree 1\n2 input 1\n", 1), ParseError);  // bad id
  CHECK_THROWS_AS(parse_xlp("p xlp tree 1\n1 res 1 1 1\n", 1), ParseError);  // forward ref
  CHECK_THROWS_AS(parse_xlp("p xlp tree 2\n1 input 1\n", 1), ParseError);  // count mismatch
}

TEST_CASE("xls codec round trips and validates") {
  SpaceScript s;
  s.steps.push_back(SpaceScript::Load{1});
  s.steps.push_back(SpaceScript::Load{0});
  s.steps.push_back(SpaceScript::InferRes{1, 2, bits_of(1, {0})});
  s.steps.push_back(SpaceScript::Erase{1});
  const std::string text = write_xls(s);
  CHECK(text == "p xls\nload 2\nload 1\nres 1 2 1\nerase 1\n");
  SpaceScript back = parse_xls(text, 1);
  CHECK(write_xls(back) == text);

  CHECK_THROWS_AS(parse_xls("p xls\nres 1 2 1\n", 1), ParseError);  // ids not issued
  CHECK_THROWS_AS(parse_xls("load 1\n", 1), ParseError);            // missing header
}
