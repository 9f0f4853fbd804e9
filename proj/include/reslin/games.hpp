#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "reslin/extend.hpp"
#include "reslin/formula.hpp"
#include "reslin/gf2.hpp"
#include "reslin/textio.hpp"

namespace reslin {

enum class Answer { Zero, One, Star };

struct TranscriptEntry {
  BitVec form;
  Answer answer;
  bool settled;  // the value recorded in Phi (Prover's choice after a star)
};

// The running state of one Prover-Delayer game: every asked form with its
// settled value, which of them earned coins, and the transcript.
class GameState {
 public:
  explicit GameState(std::size_t nvars) : nvars_(nvars), rref_(nvars) {}

  std::size_t nvars() const { return nvars_; }
  int coins() const { return coins_; }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
  const IncrementalRref& phi_rref() const { return rref_; }

  LinSystem phi() const {
    std::vector<LinEquation> rows;
    for (const auto& e : transcript_) rows.emplace_back(e.form, e.settled);
    return LinSystem(nvars_, std::move(rows));
  }

  LinSystem star_rows() const {
    std::vector<LinEquation> rows;
    for (const auto& e : transcript_)
      if (e.answer == Answer::Star) rows.emplace_back(e.form, e.settled);
    return LinSystem(nvars_, std::move(rows));
  }

  // Appends one round; returns the new basis row if the rank grew.
  std::optional<LinEquation> record(const BitVec& form, Answer answer, bool settled) {
    transcript_.push_back({form, answer, settled});
    if (answer == Answer::Star) ++coins_;
    return rref_.add(LinEquation(form, settled));
  }

 private:
  std::size_t nvars_;
  IncrementalRref rref_;
  std::vector<TranscriptEntry> transcript_;
  int coins_ = 0;
};

struct GameStatus {
  bool running = true;
  int falsified_clause = -1;
};

// The game-over test: the smallest non-tautological clause whose negation
// is implied row-by-row by Phi. Polynomial; no solution enumeration.
inline GameStatus game_status(const GameState& state, const LinCnf& cnf) {
  for (std::size_t i = 0; i < cnf.size(); ++i) {
    const LinClause& c = cnf.clause(i);
    if (c.is_tautological()) continue;
    bool falsified = true;
    for (const auto& lit : c.literals())
      if (!state.phi_rref().implies(lit.flipped())) {
        falsified = false;
        break;
      }
    if (falsified) return {false, static_cast<int>(i)};
  }
  return {};
}

struct DelayerAnswer {
  Answer answer;
  bool value = false;  // meaningful for Zero/One
};

// The extensible-formula Delayer: answer the forced value when every
// F-proper solution of Phi fixes g, give a star when both extensions stay
// F-proper, and fall back to a consistency-keeping value (0 preferred)
// once Phi has no F-proper solution at all.
inline DelayerAnswer delayer_respond(const GameState& state, const BitVec& g,
                                     const LinCnf& cnf, const std::vector<int>& f_indices,
                                     SearchLimits limits = {}) {
  const LinSystem phi = state.phi();
  auto e0 = find_f_proper_solution(phi.extended(LinEquation(g, false)), cnf, f_indices,
                                   std::nullopt, limits);
  auto e1 = find_f_proper_solution(phi.extended(LinEquation(g, true)), cnf, f_indices,
                                   std::nullopt, limits);
  if (e0.status == SearchStatus::Budget || e1.status == SearchStatus::Budget)
    throw LimitError("delayer: search budget exhausted");
  const bool ok0 = e0.status == SearchStatus::Found;
  const bool ok1 = e1.status == SearchStatus::Found;
  if (ok0 && ok1) return {Answer::Star};
  if (ok0) return {Answer::Zero, false};
  if (ok1) return {Answer::One, true};
  if (!state.phi_rref().consistent())
    throw std::logic_error("delayer: Phi became inconsistent");
  LinEquation r = state.phi_rref().reduce(LinEquation(g, false));
  if (r.trivially_false()) return {Answer::One, true};
  return {Answer::Zero, false};
}

// ---------------------------------------------------------------------------
// Prover strategies.

class Prover {
 public:
  virtual ~Prover() = default;
  virtual BitVec choose_form(const GameState& state, const LinCnf& cnf) = 0;
  virtual bool choose_value(const GameState& state, const BitVec& g, const LinCnf& cnf,
                            const std::vector<int>& f_indices) = 0;
};

class RandomProver : public Prover {
 public:
  explicit RandomProver(std::uint64_t seed) : rng_(seed) {}

  BitVec choose_form(const GameState& state, const LinCnf&) override {
    const std::size_t n = state.nvars();
    for (;;) {
      BitVec f(n);
      for (std::size_t i = 0; i < n; ++i) f.set(i, rng_() & 1u);
      if (f.any()) return f;
    }
  }

  bool choose_value(const GameState&, const BitVec&, const LinCnf&,
                    const std::vector<int>&) override {
    return rng_() & 1u;
  }

 private:
  std::mt19937_64 rng_;
};

// Asks the variables in index order; after a star, picks the value that
// leaves the fewest F-proper solutions, counted exactly while the free
// variable count permits enumeration, otherwise the constant 1.
class SweepProver : public Prover {
 public:
  explicit SweepProver(std::size_t enum_free_limit = 16) : limit_(enum_free_limit) {}

  BitVec choose_form(const GameState& state, const LinCnf&) override {
    const std::size_t v = next_++ % state.nvars();
    return BitVec::unit(state.nvars(), v);
  }

  bool choose_value(const GameState& state, const BitVec& g, const LinCnf& cnf,
                    const std::vector<int>& f_indices) override {
    std::uint64_t counts[2];
    for (int b = 0; b < 2; ++b) {
      LinSystem sys = state.phi().extended(LinEquation(g, b == 1));
      const std::size_t free = cnf.nvars() - sys.rank();
      if (!sys.consistent()) {
        counts[b] = 0;
        continue;
      }
      if (free > limit_) return true;  // out of counting range: fixed fallback
      std::uint64_t cnt = 0;
      for_each_solution(
          sys, ~std::uint64_t{0},
          [&](const BitVec& a) {
            for (int i : f_indices)
              if (!cnf.clause(static_cast<std::size_t>(i)).evaluate(a)) return true;
            ++cnt;
            return true;
          },
          {free});
      counts[b] = cnt;
    }
    return counts[1] < counts[0];
  }

 private:
  std::size_t next_ = 0;
  std::size_t limit_;
};

// Replays forms and star values from a fixed list of lines, the format the
// interactive mode writes.
class ScriptedProver : public Prover {
 public:
  explicit ScriptedProver(std::vector<std::string> lines) : lines_(std::move(lines)) {}

  BitVec choose_form(const GameState& state, const LinCnf&) override {
    return textio::parse_form(next_line(), state.nvars(), pos_, 1);
  }

  bool choose_value(const GameState&, const BitVec&, const LinCnf&,
                    const std::vector<int>&) override {
    const std::string line = next_line();
    if (line == "0") return false;
    if (line == "1") return true;
    throw std::runtime_error("prover script: expected a bit, got '" + line + "'");
  }

 private:
  std::string next_line() {
    while (pos_ < lines_.size()) {
      const std::string& l = lines_[pos_++];
      if (!l.empty()) return l;
    }
    throw std::runtime_error("prover script exhausted");
  }

  std::vector<std::string> lines_;
  std::size_t pos_ = 0;
};

class InteractiveProver : public Prover {
 public:
  InteractiveProver(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

  BitVec choose_form(const GameState& state, const LinCnf&) override {
    for (;;) {
      out_ << "form> " << std::flush;
      std::string line;
      if (!std::getline(in_, line)) throw std::runtime_error("input closed");
      if (line.empty()) continue;
      try {
        return textio::parse_form(line, state.nvars(), 1, 1);
      } catch (const ParseError& e) {
        out_ << "  ! " << e.what() << "\n";
      }
    }
  }

  bool choose_value(const GameState&, const BitVec&, const LinCnf&,
                    const std::vector<int>&) override {
    for (;;) {
      out_ << "value> " << std::flush;
      std::string line;
      if (!std::getline(in_, line)) throw std::runtime_error("input closed");
      if (line == "0") return false;
      if (line == "1") return true;
      out_ << "  ! expected 0 or 1\n";
    }
  }

 private:
  std::istream& in_;
  std::ostream& out_;
};

// ---------------------------------------------------------------------------
// The game loop.

enum class GameOutcome { Refuted, Timeout };

struct GameResult {
  int coins = 0;
  GameOutcome outcome = GameOutcome::Timeout;
  int falsified_clause = -1;
  int rounds = 0;
  std::vector<TranscriptEntry> transcript;
};

struct RoundInfo {
  int round;
  BitVec form;
  Answer answer;
  bool settled;
  int coins;
};

// Runs ask -> respond -> (on star) Prover picks -> status check until a
// clause is falsified or the round limit runs out. The Delayer carries a
// witness solution between rounds, so each round costs one search; the
// answers are exactly those of delayer_respond.
inline GameResult run_game(const LinCnf& cnf, const std::vector<int>& f_indices,
                           Prover& prover, int max_rounds = -1, SearchLimits limits = {},
                           const std::function<void(const RoundInfo&)>& observer = {}) {
  const std::size_t n = cnf.nvars();
  if (max_rounds < 0) max_rounds = static_cast<int>(4 * n);
  GameState state(n);

  // Falsification tracker: per non-tautological clause, the residuals of
  // its flipped literals against Phi; a clause dies when all are implied.
  struct Tracked {
    std::vector<LinEquation> residuals;
    std::size_t remaining;
    bool tautological;
  };
  std::vector<Tracked> tracked;
  for (const auto& c : cnf.clauses()) {
    Tracked t;
    t.tautological = c.is_tautological();
    for (const auto& lit : c.literals()) t.residuals.push_back(lit.flipped());
    t.remaining = t.residuals.size();
    tracked.push_back(std::move(t));
  }
  auto apply_row = [&](const LinEquation& row) {
    const int p = row.form.lowest_set();
    for (auto& t : tracked) {
      if (t.tautological) continue;
      for (auto& r : t.residuals) {
        if (r.trivially_true() || !r.form.get(static_cast<std::size_t>(p))) continue;
        r.form ^= row.form;
        r.rhs = r.rhs ^ row.rhs;
        if (r.trivially_true()) --t.remaining;
      }
    }
  };
  auto first_falsified = [&]() -> int {
    for (std::size_t i = 0; i < tracked.size(); ++i)
      if (!tracked[i].tautological && tracked[i].remaining == 0) return static_cast<int>(i);
    return -1;
  };

  std::optional<BitVec> witness;
  {
    auto r = find_f_proper_solution(LinSystem(n), cnf, f_indices, std::nullopt, limits);
    if (r.status == SearchStatus::Budget) throw LimitError("game: search budget exhausted");
    if (r.status == SearchStatus::Found) witness = r.assignment;
  }

  GameResult res;
  for (int round = 0; round < max_rounds; ++round) {
    const int dead = first_falsified();
    if (dead >= 0) {
      res.outcome = GameOutcome::Refuted;
      res.falsified_clause = dead;
      break;
    }
    const BitVec g = prover.choose_form(state, cnf);

    Answer answer;
    bool settled;
    if (witness) {
      const bool alpha = g.dot(*witness);
      LinSystem flipped = state.phi().extended(LinEquation(g, !alpha));
      auto other =
          find_f_proper_solution(flipped, cnf, f_indices, std::nullopt, limits, &*witness);
      if (other.status == SearchStatus::Budget)
        throw LimitError("game: search budget exhausted");
      if (other.status == SearchStatus::Found) {
        answer = Answer::Star;
        settled = prover.choose_value(state, g, cnf, f_indices);
        if (settled != alpha) witness = other.assignment;
      } else {
        answer = alpha ? Answer::One : Answer::Zero;
        settled = alpha;
      }
    } else {
      // Phi has no F-proper solution; keep it consistent, preferring 0.
      LinEquation r = state.phi_rref().reduce(LinEquation(g, false));
      settled = r.trivially_false();
      answer = settled ? Answer::One : Answer::Zero;
    }

    auto new_row = state.record(g, answer, settled);
    if (new_row) apply_row(*new_row);
    if (witness && !LinEquation(g, settled).eval(*witness))
      throw std::logic_error("game: witness invariant broken");
    ++res.rounds;
    if (observer) observer({round, g, answer, settled, state.coins()});
  }
  if (res.outcome == GameOutcome::Timeout) {
    const int dead = first_falsified();
    if (dead >= 0) {
      res.outcome = GameOutcome::Refuted;
      res.falsified_clause = dead;
    }
  }
  res.coins = state.coins();
  res.transcript = state.transcript();
  return res;
}

// Transcript in the scripted-prover format: one form per round, followed by
// the chosen bit after a star.
inline std::string write_transcript(const std::vector<TranscriptEntry>& transcript) {
  std::string out;
  for (const auto& e : transcript) {
    out += textio::write_form(e.form);
    out.push_back('\n');
    if (e.answer == Answer::Star) {
      out += e.settled ? "1" : "0";
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace reslin
