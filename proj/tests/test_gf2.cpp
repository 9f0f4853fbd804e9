#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "reslin/gf2.hpp"

using namespace reslin;

namespace {

BitVec bits(std::size_t nvars, std::initializer_list<int> ones) {
  BitVec v(nvars);
  for (int i : ones) v.set(static_cast<std::size_t>(i), true);
  return v;
}

LinEquation eq(std::size_t nvars, std::initializer_list<int> ones, bool rhs) {
  return LinEquation(bits(nvars, ones), rhs);
}

// Independent oracle: all satisfying assignments by trying every point.
std::vector<std::uint64_t> brute_solutions(const LinSystem& sys) {
  std::vector<std::uint64_t> sols;
  const std::size_t n = sys.nvars();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    BitVec a(n);
    for (std::size_t i = 0; i < n; ++i) a.set(i, (m >> i) & 1u);
    if (sys.eval(a)) sols.push_back(m);
  }
  return sols;
}

std::uint64_t pack(const BitVec& a) {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.get(i)) m |= std::uint64_t{1} << i;
  return m;
}

LinSystem random_system(std::mt19937_64& rng, std::size_t nvars, std::size_t max_rows) {
  std::vector<LinEquation> rows;
  const std::size_t nrows = rng() % (max_rows + 1);
  for (std::size_t r = 0; r < nrows; ++r) {
    BitVec f(nvars);
    for (std::size_t i = 0; i < nvars; ++i) f.set(i, rng() & 1u);
    rows.emplace_back(f, rng() & 1u);
  }
  return LinSystem(nvars, std::move(rows));
}

}  // namespace

TEST_CASE("rref collapses duplicate rows") {
  LinSystem s(1, {eq(1, {0}, true), eq(1, {0}, true)});
  REQUIRE(s.consistent());
  REQUIRE(s.canonical_rows().size() == 1);
  REQUIRE(s.canonical_rows()[0] == eq(1, {0}, true));
}

TEST_CASE("rref reports a contradictory pair as 0=1") {
  LinSystem s(1, {eq(1, {0}, true), eq(1, {0}, false)});
  REQUIRE_FALSE(s.consistent());
  REQUIRE(s.canonical_rows().size() == 1);
  REQUIRE(s.canonical_rows()[0].trivially_false());
}

TEST_CASE("rref of a rank-2 cycle system") {
  LinSystem s(3, {eq(3, {0, 1}, true), eq(3, {1, 2}, false), eq(3, {0, 2}, true)});
  REQUIRE(s.consistent());
  REQUIRE(s.rank() == 2);
  REQUIRE(s.canonical_rows()[0] == eq(3, {0, 2}, true));
  REQUIRE(s.canonical_rows()[1] == eq(3, {1, 2}, false));
}

TEST_CASE("implies_equation on the spec cases") {
  LinSystem s(2, {eq(2, {0}, true), eq(2, {1}, false)});
  CHECK(implies_equation(s, eq(2, {0, 1}, true)));

  LinSystem t(2, {eq(2, {0}, true)});
  CHECK_FALSE(implies_equation(t, eq(2, {1}, false)));

  LinSystem u(2, {eq(2, {0}, false), eq(2, {0}, true)});
  CHECK(implies_equation(u, eq(2, {1}, true)));
}

TEST_CASE("solve defaults free variables to zero") {
  CHECK(pack(*solve(LinSystem(2))) == 0);

  auto a = solve(LinSystem(2, {eq(2, {0, 1}, true)}));
  REQUIRE(a.has_value());
  CHECK(a->get(0));
  CHECK_FALSE(a->get(1));

  CHECK_FALSE(solve(LinSystem(1, {eq(1, {0}, true), eq(1, {0}, false)})).has_value());
}

TEST_CASE("enumerate_solutions order and edge cases") {
  auto sols = enumerate_solutions(LinSystem(2, {eq(2, {0}, true)}), 100);
  REQUIRE(sols.size() == 2);
  CHECK(pack(sols[0]) == 0b01);
  CHECK(pack(sols[1]) == 0b11);

  CHECK(enumerate_solutions(LinSystem(1, {eq(1, {0}, true), eq(1, {0}, false)}), 100).empty());

  auto cube = enumerate_solutions(LinSystem(3), 100);
  REQUIRE(cube.size() == 8);
  CHECK(pack(cube[0]) == 0);
  CHECK(pack(cube[7]) == 0b111);

  auto capped = enumerate_solutions(LinSystem(3), 3);
  CHECK(capped.size() == 3);
}

TEST_CASE("enumeration limit error names the free-variable count") {
  LinSystem big(30);
  try {
    enumerate_solutions(big, 1);
    FAIL("expected EnumerationLimitError");
  } catch (const EnumerationLimitError& e) {
    CHECK(e.free_vars == 30);
    CHECK(std::string(e.what()).find("30") != std::string::npos);
  }
}

TEST_CASE("rref is idempotent on random systems") {
  std::mt19937_64 rng(1);
  for (int it = 0; it < 200; ++it) {
    LinSystem s = random_system(rng, 1 + rng() % 12, 6);
    LinSystem r = rref(s);
    LinSystem rr = rref(r);
    CHECK(r.canonical_key() == s.canonical_key());
    CHECK(rr.canonical_key() == r.canonical_key());
    CHECK(rr.equations() == r.equations());
  }
}

TEST_CASE("rref preserves the solution set exhaustively") {
  std::mt19937_64 rng(2);
  for (int it = 0; it < 150; ++it) {
    const std::size_t n = 1 + rng() % 12;
    LinSystem s = random_system(rng, n, 5);
    CHECK(brute_solutions(s) == brute_solutions(rref(s)));
  }
}

TEST_CASE("implies_equation agrees with the brute-force oracle") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 300; ++it) {
    const std::size_t n = 1 + rng() % 12;
    LinSystem s = random_system(rng, n, 4);
    BitVec f(n);
    for (std::size_t i = 0; i < n; ++i) f.set(i, rng() & 1u);
    LinEquation e(f, rng() & 1u);
    bool expected = true;
    for (std::uint64_t m : brute_solutions(s)) {
      BitVec a(n);
      for (std::size_t i = 0; i < n; ++i) a.set(i, (m >> i) & 1u);
      if (!e.eval(a)) {
        expected = false;
        break;
      }
    }
    CHECK(implies_equation(s, e) == expected);
  }
}

TEST_CASE("equal solution sets have identical canonical forms") {
  std::mt19937_64 rng(4);
  std::map<std::vector<std::uint64_t>, std::string> seen;
  for (int it = 0; it < 400; ++it) {
    const std::size_t n = 1 + rng() % 5;
    LinSystem s = random_system(rng, n, 4);
    auto sols = brute_solutions(s);
    std::vector<std::uint64_t> key{static_cast<std::uint64_t>(n)};
    key.insert(key.end(), sols.begin(), sols.end());
    auto [it2, fresh] = seen.emplace(key, s.canonical_key());
    if (!fresh) CHECK(it2->second == s.canonical_key());
  }
}

TEST_CASE("IncrementalRref matches the batch canonical form") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 200; ++it) {
    const std::size_t n = 1 + rng() % 10;
    LinSystem s = random_system(rng, n, 6);
    IncrementalRref inc(n);
    for (const auto& e : s.equations()) inc.add(e);
    CHECK(inc.to_system().canonical_key() == s.canonical_key());
    CHECK(inc.consistent() == s.consistent());
  }
}
