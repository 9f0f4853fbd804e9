#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <sstream>
#include <vector>

#include "reslin/games.hpp"

using namespace reslin;

namespace {

BitVec bits_of(std::size_t nvars, std::initializer_list<int> ones) {
  BitVec v(nvars);
  for (int i : ones) v.set(static_cast<std::size_t>(i), true);
  return v;
}

GameState state_with(std::size_t nvars, std::vector<std::pair<BitVec, bool>> rows) {
  GameState s(nvars);
  for (auto& [f, b] : rows) s.record(f, Answer::Zero, b);
  return s;
}

std::vector<std::string> transcript_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  return lines;
}

}  // namespace

TEST_CASE("game_status spec cases on php(3,2)") {
  LinCnf php = make_pigeonhole(3, 2);
  // Phi = {p11=0, p12=0} falsifies the first pigeon axiom (clause 0).
  auto s1 = state_with(6, {{bits_of(6, {0}), false}, {bits_of(6, {1}), false}});
  auto g1 = game_status(s1, php);
  REQUIRE_FALSE(g1.running);
  CHECK(g1.falsified_clause == 0);

  // Phi = {p11=1, p21=1} falsifies the hole axiom H_{1,2,1} (clause 3).
  auto s2 = state_with(6, {{bits_of(6, {0}), true}, {bits_of(6, {2}), true}});
  auto g2 = game_status(s2, php);
  REQUIRE_FALSE(g2.running);
  CHECK(g2.falsified_clause == 3);

  CHECK(game_status(GameState(6), php).running);
}

TEST_CASE("game_status agrees with exhaustive falsification") {
  std::mt19937_64 rng(21);
  LinCnf php = make_pigeonhole(3, 2);
  for (int it = 0; it < 200; ++it) {
    GameState s(6);
    const std::size_t rounds = rng() % 4;
    for (std::size_t r = 0; r < rounds; ++r) {
      BitVec f(6);
      for (std::size_t v = 0; v < 6; ++v) f.set(v, rng() & 1u);
      s.record(f, Answer::Zero, rng() & 1u);
    }
    const LinSystem phi = s.phi();
    int expected = -1;
    for (std::size_t i = 0; i < php.size() && expected < 0; ++i) {
      if (php.clause(i).is_tautological()) continue;
      bool all_falsify = true;
      for (std::uint64_t m = 0; m < 64 && all_falsify; ++m) {
        BitVec a(6);
        for (std::size_t v = 0; v < 6; ++v) a.set(v, (m >> v) & 1u);
        if (phi.eval(a) && php.clause(i).evaluate(a)) all_falsify = false;
      }
      if (all_falsify) expected = static_cast<int>(i);
    }
    auto st = game_status(s, php);
    CHECK((st.running ? -1 : st.falsified_clause) == expected);
  }
}

TEST_CASE("delayer_respond spec cases on php(3,2)") {
  LinCnf php = make_pigeonhole(3, 2);
  auto holes = php.indices_with_label("hole");

  auto a1 = delayer_respond(GameState(6), bits_of(6, {0}), php, holes);
  CHECK(a1.answer == Answer::Star);

  auto s2 = state_with(6, {{bits_of(6, {0}), true}});
  auto a2 = delayer_respond(s2, bits_of(6, {0}), php, holes);
  CHECK(a2.answer == Answer::One);

  // Every HOLES-proper solution with p11=1 puts no second pigeon in hole 1.
  auto a3 = delayer_respond(s2, bits_of(6, {2}), php, holes);
  CHECK(a3.answer == Answer::Zero);
}

TEST_CASE("the delayer earns the extensibility guarantee") {
  LinCnf php = make_pigeonhole(3, 2);
  auto holes = php.indices_with_label("hole");
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    RandomProver p(seed);
    auto res = run_game(php, holes, p);
    REQUIRE(res.outcome == GameOutcome::Refuted);
    REQUIRE(res.coins >= 1);
  }
  SweepProver sweep;
  auto res = run_game(php, holes, sweep);
  REQUIRE(res.outcome == GameOutcome::Refuted);
  REQUIRE(res.coins >= 1);

  LinCnf ord = make_ordering(4);
  auto order = ord.indices_with_label("order");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomProver p(seed);
    auto r = run_game(ord, order, p);
    REQUIRE(r.outcome == GameOutcome::Refuted);
    REQUIRE(r.coins >= 2);
  }
  SweepProver sweep2;
  auto r2 = run_game(ord, order, sweep2);
  REQUIRE(r2.outcome == GameOutcome::Refuted);
  REQUIRE(r2.coins >= 2);
}

TEST_CASE("a cnf containing the empty clause ends at round zero") {
  LinCnf cnf(2);
  cnf.add_clause(LinClause({LinEquation(bits_of(2, {0}), true)}));
  cnf.add_clause(LinClause());
  RandomProver p(1);
  auto res = run_game(cnf, {}, p);
  REQUIRE(res.outcome == GameOutcome::Refuted);
  CHECK(res.falsified_clause == 1);
  CHECK(res.coins == 0);
  CHECK(res.rounds == 0);
}

TEST_CASE("transcripts replay: coins, star rows, invariant, determinism") {
  LinCnf php = make_pigeonhole(3, 2);
  auto holes = php.indices_with_label("hole");
  RandomProver p(7);
  auto res = run_game(php, holes, p);
  REQUIRE(res.outcome == GameOutcome::Refuted);

  // coins equals the number of star answers.
  int stars = 0;
  for (const auto& e : res.transcript)
    if (e.answer == Answer::Star) ++stars;
  CHECK(stars == res.coins);

  // Theorem 3.1 invariant: while coins < m = 1, Phi has an F-proper solution.
  GameState replay(6);
  for (const auto& e : res.transcript) {
    if (replay.coins() < 1) {
      auto r = find_f_proper_solution(replay.phi(), php, holes);
      REQUIRE(r.status == SearchStatus::Found);
    }
    replay.record(e.form, e.answer, e.settled);
  }

  // Every non-star row is implied by all F-proper solutions of the star rows.
  const LinSystem stars_sys = replay.star_rows();
  for (const auto& e : res.transcript) {
    if (e.answer == Answer::Star) continue;
    const LinEquation row(e.form, e.settled);
    bool all_imply = true;
    for_each_solution(stars_sys, ~std::uint64_t{0}, [&](const BitVec& a) {
      bool proper = true;
      for (int i : holes)
        if (!php.clause(static_cast<std::size_t>(i)).evaluate(a)) proper = false;
      if (proper && !row.eval(a)) all_imply = false;
      return true;
    });
    CHECK(all_imply);
  }

  // Byte-identical transcripts for equal seeds.
  RandomProver p2(7);
  auto res2 = run_game(php, holes, p2);
  CHECK(write_transcript(res.transcript) == write_transcript(res2.transcript));

  // The recorded answers are exactly the standalone delayer's answers.
  GameState check(6);
  for (const auto& e : res.transcript) {
    auto a = delayer_respond(check, e.form, php, holes);
    CHECK(a.answer == e.answer);
    if (a.answer != Answer::Star) CHECK(a.value == e.settled);
    check.record(e.form, e.answer, e.settled);
  }
}

TEST_CASE("scripted prover replays a recorded game") {
  LinCnf php = make_pigeonhole(3, 2);
  auto holes = php.indices_with_label("hole");
  RandomProver p(3);
  auto original = run_game(php, holes, p);
  REQUIRE(original.outcome == GameOutcome::Refuted);

  ScriptedProver replay(transcript_lines(write_transcript(original.transcript)));
  auto replayed = run_game(php, holes, replay);
  CHECK(replayed.outcome == GameOutcome::Refuted);
  CHECK(replayed.coins == original.coins);
  CHECK(replayed.falsified_clause == original.falsified_clause);
  CHECK(write_transcript(replayed.transcript) == write_transcript(original.transcript));

  ScriptedProver exhausted({});
  CHECK_THROWS_AS(run_game(php, holes, exhausted), std::runtime_error);
}

TEST_CASE("interactive prover parses forms and bits from a stream") {
  LinCnf up(1);
  up.add_clause(LinClause({LinEquation(bits_of(1, {0}), true)}));
  up.add_clause(LinClause({LinEquation(bits_of(1, {0}), false)}));
  std::istringstream in("bogus\n1\n0\n");
  std::ostringstream out;
  InteractiveProver p(in, out);
  auto res = run_game(up, {}, p);
  REQUIRE(res.outcome == GameOutcome::Refuted);
  CHECK(res.coins == 1);  // the empty F makes both answers possible: a star
  CHECK(out.str().find("form>") != std::string::npos);
  CHECK(out.str().find("!") != std::string::npos);  // the bogus line was rejected
}
