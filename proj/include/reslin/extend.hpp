#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "reslin/formula.hpp"
#include "reslin/gf2.hpp"
#include "reslin/textio.hpp"

namespace reslin {

class LimitError : public std::runtime_error {
 public:
  explicit LimitError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Backtracking search for a solution of a linear system that satisfies a
// designated set of clauses.

struct SearchLimits {
  std::uint64_t node_budget = 10'000'000;
};

enum class SearchStatus { Found, None, Budget };

struct SearchResult {
  SearchStatus status = SearchStatus::None;
  BitVec assignment;  // valid when status == Found
  std::uint64_t nodes = 0;
};

namespace detail {

inline int first_unassigned(const BitVec& form, const BitVec& mask) {
  const auto& fw = form.words();
  const auto& mw = mask.words();
  for (std::size_t w = 0; w < fw.size(); ++w) {
    const std::uint64_t x = fw[w] & ~mw[w];
    if (x) return static_cast<int>(w * 64 + std::countr_zero(x));
  }
  return -1;
}

// DPLL over single variables: the system rows are kept reduced (the caller
// passes canonical rows) and propagation fires on equations or clause
// literals with one unassigned variable. Decisions take the hint value
// first when a hint is given, otherwise 0.
class Dpll {
 public:
  Dpll(std::size_t nvars, const std::vector<LinEquation>& equations,
       std::vector<const LinClause*> clauses, const BitVec* hint)
      : n_(nvars), mask_(nvars), values_(nvars), hint_(hint) {
    for (const auto& e : equations) {
      if (e.trivially_true()) continue;
      if (e.trivially_false()) {
        broken_ = true;
        return;
      }
      Eq q;
      q.form = e.form;
      q.cur = e.rhs;
      q.open = static_cast<int>(e.form.popcount());
      eqs_.push_back(std::move(q));
    }
    for (const LinClause* c : clauses) {
      Cls cl;
      cl.open = 0;
      cl.sat = 0;
      for (const auto& lit : c->literals()) {
        Lit l;
        l.form = lit.form;
        l.cur = lit.rhs;
        l.open = static_cast<int>(lit.form.popcount());
        if (l.open == 0) {
          if (!l.cur) ++cl.sat;  // literal 0=0
        } else {
          ++cl.open;
        }
        cl.lits.push_back(std::move(l));
      }
      if (cl.open == 0 && cl.sat == 0) {
        broken_ = true;  // a clause false under the empty assignment
        return;
      }
      clauses_.push_back(std::move(cl));
    }
    adj_eq_.resize(n_);
    adj_cl_.resize(n_);
    for (std::size_t i = 0; i < eqs_.size(); ++i)
      for (std::size_t v = 0; v < n_; ++v)
        if (eqs_[i].form.get(v)) adj_eq_[v].push_back(static_cast<int>(i));
    for (std::size_t i = 0; i < clauses_.size(); ++i)
      for (std::size_t j = 0; j < clauses_[i].lits.size(); ++j)
        for (std::size_t v = 0; v < n_; ++v)
          if (clauses_[i].lits[j].form.get(v))
            adj_cl_[v].push_back({static_cast<int>(i), static_cast<int>(j)});
  }

  SearchResult run(SearchLimits limits) {
    SearchResult res;
    if (broken_) {
      res.status = SearchStatus::None;
      return res;
    }
    // Initial units.
    for (std::size_t i = 0; i < eqs_.size(); ++i)
      if (eqs_[i].open == 1)
        queue_.push_back({first_unassigned(eqs_[i].form, mask_), eqs_[i].cur});
    for (const auto& cl : clauses_) enqueue_clause_unit(cl);

    bool conflict = false;
    for (;;) {
      while (!queue_.empty()) {
        auto [var, val] = queue_.front();
        queue_.pop_front();
        if (var < 0) throw std::logic_error("unit propagation saw a closed literal");
        if (mask_.get(static_cast<std::size_t>(var))) {
          if (values_.get(static_cast<std::size_t>(var)) != val) {
            conflict = true;
            break;
          }
          continue;
        }
        ++res.nodes;
        if (res.nodes > limits.node_budget) {
          res.status = SearchStatus::Budget;
          return res;
        }
        if (assign(static_cast<std::size_t>(var), val)) {
          conflict = true;
          break;
        }
      }
      if (conflict) {
        queue_.clear();
        conflict = false;
        if (decisions_.empty()) {
          res.status = SearchStatus::None;
          return res;
        }
        Decision d = decisions_.back();
        decisions_.pop_back();
        undo_to(d.mark);
        queue_.push_back({static_cast<int>(d.var), !d.first_val});
        continue;
      }
      if (trail_.size() == n_) {
        res.status = SearchStatus::Found;
        res.assignment = values_;
        return res;
      }
      // Decide the first unassigned variable.
      std::size_t var = 0;
      while (mask_.get(var)) ++var;
      const bool val = hint_ ? hint_->get(var) : false;
      decisions_.push_back({var, val, trail_.size()});
      ++res.nodes;
      if (res.nodes > limits.node_budget) {
        res.status = SearchStatus::Budget;
        return res;
      }
      if (assign(var, val)) conflict = true;
    }
  }

 private:
  struct Eq {
    BitVec form;
    bool cur;  // rhs xor assigned contributions; with open == 0 must be 0
    int open;
  };
  struct Lit {
    BitVec form;
    bool cur;
    int open;
  };
  struct Cls {
    std::vector<Lit> lits;
    int open;  // literals with unassigned variables
    int sat;   // literals already true
  };
  struct Decision {
    std::size_t var;
    bool first_val;
    std::size_t mark;
  };

  void enqueue_clause_unit(const Cls& cl) {
    if (cl.sat > 0 || cl.open != 1) return;
    for (const auto& l : cl.lits)
      if (l.open > 0) {
        if (l.open == 1) queue_.push_back({first_unassigned(l.form, mask_), l.cur});
        return;
      }
  }

  bool assign(std::size_t var, bool val) {
    values_.set(var, val);
    mask_.set(var, true);
    trail_.push_back(var);
    bool conflict = false;
    // First settle every counter this assignment touches; only then look
    // for units, so sibling literals are never read in a stale state.
    for (int ei : adj_eq_[var]) {
      Eq& e = eqs_[static_cast<std::size_t>(ei)];
      --e.open;
      e.cur = e.cur ^ val;
      if (e.open == 0 && e.cur) conflict = true;
    }
    for (auto [ci, li] : adj_cl_[var]) {
      Cls& cl = clauses_[static_cast<std::size_t>(ci)];
      Lit& l = cl.lits[static_cast<std::size_t>(li)];
      --l.open;
      l.cur = l.cur ^ val;
      if (l.open == 0) {
        --cl.open;
        if (!l.cur) ++cl.sat;
      }
      if (cl.sat == 0 && cl.open == 0) conflict = true;
    }
    if (conflict) return true;
    for (int ei : adj_eq_[var]) {
      const Eq& e = eqs_[static_cast<std::size_t>(ei)];
      if (e.open == 1) queue_.push_back({first_unassigned(e.form, mask_), e.cur});
    }
    for (auto [ci, li] : adj_cl_[var]) enqueue_clause_unit(clauses_[static_cast<std::size_t>(ci)]);
    return conflict;
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      const std::size_t var = trail_.back();
      trail_.pop_back();
      const bool val = values_.get(var);
      for (int ei : adj_eq_[var]) {
        Eq& e = eqs_[static_cast<std::size_t>(ei)];
        ++e.open;
        e.cur = e.cur ^ val;
      }
      for (auto [ci, li] : adj_cl_[var]) {
        Cls& cl = clauses_[static_cast<std::size_t>(ci)];
        Lit& l = cl.lits[static_cast<std::size_t>(li)];
        if (l.open == 0) {
          ++cl.open;
          if (!l.cur) --cl.sat;
        }
        ++l.open;
        l.cur = l.cur ^ val;
      }
      mask_.set(var, false);
    }
  }

  std::size_t n_;
  bool broken_ = false;
  std::vector<Eq> eqs_;
  std::vector<Cls> clauses_;
  std::vector<std::vector<int>> adj_eq_;
  std::vector<std::vector<std::pair<int, int>>> adj_cl_;
  BitVec mask_;
  BitVec values_;
  const BitVec* hint_;
  std::vector<std::size_t> trail_;
  std::deque<std::pair<int, bool>> queue_;
  std::vector<Decision> decisions_;
};

}  // namespace detail

// Finds an assignment solving sys that satisfies every clause indexed by
// f_indices (and require_clause when given), or reports that none exists.
// The system is eliminated up front: every watched literal is reduced
// modulo the RREF rows, leaving a pure clause search over the free
// variables; pivot values are reconstructed afterwards. Deterministic:
// free variables are decided in index order, value 0 first unless a hint
// assignment is given.
inline SearchResult find_f_proper_solution(const LinSystem& sys, const LinCnf& cnf,
                                           const std::vector<int>& f_indices,
                                           std::optional<int> require_clause = std::nullopt,
                                           SearchLimits limits = {},
                                           const BitVec* hint = nullptr) {
  if (!sys.consistent()) return {};
  const std::size_t n = cnf.nvars();

  std::vector<std::size_t> free_vars;
  std::vector<int> free_pos(n, -1);
  {
    std::vector<bool> is_pivot(n, false);
    for (int p : sys.pivots()) is_pivot[static_cast<std::size_t>(p)] = true;
    for (std::size_t v = 0; v < n; ++v)
      if (!is_pivot[v]) {
        free_pos[v] = static_cast<int>(free_vars.size());
        free_vars.push_back(v);
      }
  }
  const std::size_t nf = free_vars.size();
  auto compress = [&](const BitVec& full) {
    BitVec out(nf);
    for (std::size_t j = 0; j < nf; ++j) out.set(j, full.get(free_vars[j]));
    return out;
  };

  std::vector<int> watched;
  watched.reserve(f_indices.size() + 1);
  for (int i : f_indices) watched.push_back(i);
  if (require_clause) watched.push_back(*require_clause);

  std::vector<LinClause> reduced;
  reduced.reserve(watched.size());
  for (int i : watched) {
    std::vector<LinLiteral> lits;
    for (const auto& lit : cnf.clause(static_cast<std::size_t>(i)).literals()) {
      LinEquation r = sys.reduce(lit);  // only free variables remain
      lits.emplace_back(compress(r.form), r.rhs);
    }
    reduced.push_back(LinClause(std::move(lits)));
  }
  std::vector<const LinClause*> clause_ptrs;
  for (const auto& c : reduced) clause_ptrs.push_back(&c);

  std::optional<BitVec> free_hint;
  if (hint) free_hint = compress(*hint);

  detail::Dpll dpll(nf, {}, std::move(clause_ptrs), free_hint ? &*free_hint : nullptr);
  SearchResult res = dpll.run(limits);
  if (res.status == SearchStatus::Found) {
    BitVec full(n);
    for (std::size_t j = 0; j < nf; ++j) full.set(free_vars[j], res.assignment.get(j));
    const auto& rows = sys.canonical_rows();
    const auto& piv = sys.pivots();
    for (std::size_t i = 0; i < rows.size(); ++i)
      full.set(static_cast<std::size_t>(piv[i]), rows[i].rhs ^ rows[i].form.dot(full));
    res.assignment = std::move(full);
    // Cheap audit of the found model.
    if (!sys.eval(res.assignment)) throw std::logic_error("search returned a non-solution");
    for (int i : watched)
      if (!cnf.clause(static_cast<std::size_t>(i)).evaluate(res.assignment))
        throw std::logic_error("search violated a watched clause");
  }
  return res;
}

// ---------------------------------------------------------------------------
// Enumeration of canonical consistent systems in RREF, by rank, then pivot
// columns, then row bits (row-major, each row's free coefficients in column
// order followed by its right-hand side).

class CanonicalSystems {
 public:
  CanonicalSystems(std::size_t nvars, int max_rank)
      : nvars_(nvars), max_rank_(max_rank), rank_(0) {}

  std::optional<LinSystem> next() {
    for (;;) {
      if (rank_ > max_rank_ || rank_ > static_cast<int>(nvars_)) return std::nullopt;
      if (rank_ == 0) {
        rank_ = 1;
        init_pivots();
        return LinSystem(nvars_);
      }
      if (static_cast<int>(pivots_.size()) != rank_) {
        ++rank_;
        init_pivots();
        continue;
      }
      LinSystem sys = build();
      if (!advance_bits()) {
        if (!advance_pivots()) {
          ++rank_;
          init_pivots();
        }
      }
      return sys;
    }
  }

 private:
  void init_pivots() {
    pivots_.clear();
    if (rank_ > static_cast<int>(nvars_) || rank_ > max_rank_) return;
    for (int i = 0; i < rank_; ++i) pivots_.push_back(i);
    init_bits();
  }

  void init_bits() {
    free_cols_.assign(static_cast<std::size_t>(rank_), {});
    std::vector<bool> is_pivot(nvars_, false);
    for (int p : pivots_) is_pivot[static_cast<std::size_t>(p)] = true;
    for (int i = 0; i < rank_; ++i)
      for (std::size_t c = static_cast<std::size_t>(pivots_[static_cast<std::size_t>(i)]) + 1;
           c < nvars_; ++c)
        if (!is_pivot[c]) free_cols_[static_cast<std::size_t>(i)].push_back(c);
    bits_.assign(static_cast<std::size_t>(rank_), 0);
  }

  LinSystem build() const {
    std::vector<LinEquation> rows;
    for (int i = 0; i < rank_; ++i) {
      const auto& fc = free_cols_[static_cast<std::size_t>(i)];
      const std::uint64_t v = bits_[static_cast<std::size_t>(i)];
      const std::size_t len = fc.size() + 1;
      BitVec form(nvars_);
      form.set(static_cast<std::size_t>(pivots_[static_cast<std::size_t>(i)]), true);
      for (std::size_t b = 0; b < fc.size(); ++b)
        form.set(fc[b], (v >> (len - 1 - b)) & 1u);
      rows.emplace_back(form, v & 1u);
    }
    return LinSystem(nvars_, std::move(rows));
  }

  bool advance_bits() {
    for (std::size_t i = bits_.size(); i-- > 0;) {
      const std::uint64_t limit = std::uint64_t{1} << (free_cols_[i].size() + 1);
      if (++bits_[i] < limit) {
        for (std::size_t j = i + 1; j < bits_.size(); ++j) bits_[j] = 0;
        return true;
      }
      bits_[i] = 0;
    }
    return false;
  }

  bool advance_pivots() {
    int i = rank_ - 1;
    while (i >= 0 &&
           pivots_[static_cast<std::size_t>(i)] == static_cast<int>(nvars_) - rank_ + i)
      --i;
    if (i < 0) return false;
    ++pivots_[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < rank_; ++j)
      pivots_[static_cast<std::size_t>(j)] = pivots_[static_cast<std::size_t>(j - 1)] + 1;
    init_bits();
    return true;
  }

  std::size_t nvars_;
  int max_rank_;
  int rank_;
  std::vector<int> pivots_;
  std::vector<std::vector<std::size_t>> free_cols_;
  std::vector<std::uint64_t> bits_;
};

// ---------------------------------------------------------------------------
// m-extensibility.

struct ExtendLimits {
  std::uint64_t max_systems = 10'000'000;
  SearchLimits search;
  int jobs = 1;
};

struct ExtendVerdict {
  enum class Status { Holds, Fails, Budget };
  Status status = Status::Holds;
  std::optional<LinSystem> counterexample_system;
  int counterexample_clause = -1;
  std::uint64_t systems_checked = 0;

  bool holds() const { return status == Status::Holds; }
};

// Checks the definition directly: every canonical consistent system of rank
// < m that has an F-proper solution must, for each clause outside F, have an
// F-proper solution satisfying that clause. Canonical RREF enumeration
// stands in for "all systems with fewer than m equations": every such
// system is inconsistent (vacuous) or row-equivalent to exactly one
// representative. Workers stride over the enumeration; the counterexample
// with the least ordinal wins, independent of the worker count.
inline ExtendVerdict check_extensibility(const LinCnf& cnf, const std::vector<int>& f_indices,
                                         int m, ExtendLimits limits = {}) {
  if (m < 1) throw std::invalid_argument("check_extensibility requires m >= 1");
  std::vector<int> outside;
  {
    std::vector<bool> in_f(cnf.size(), false);
    for (int i : f_indices) in_f[static_cast<std::size_t>(i)] = true;
    for (std::size_t i = 0; i < cnf.size(); ++i)
      if (!in_f[i]) outside.push_back(static_cast<int>(i));
  }

  struct Event {
    std::uint64_t ordinal;
    bool budget;  // inner search ran out of nodes
    LinSystem sys;
    int clause;
  };
  const int jobs = std::max(1, limits.jobs);
  std::vector<std::optional<Event>> events(static_cast<std::size_t>(jobs));
  std::atomic<std::uint64_t> best{~std::uint64_t{0}};
  std::atomic<bool> enumeration_truncated{false};
  auto lower_best = [&](std::uint64_t o) {
    std::uint64_t cur = best.load();
    while (o < cur && !best.compare_exchange_weak(cur, o)) {
    }
  };

  auto worker = [&](int t) {
    CanonicalSystems gen(cnf.nvars(), m - 1);
    std::uint64_t ordinal = 0;
    for (;;) {
      auto sys = gen.next();
      if (!sys) return;
      const std::uint64_t o = ordinal++;
      if (o >= limits.max_systems) {
        enumeration_truncated.store(true, std::memory_order_relaxed);
        return;
      }
      if (o % static_cast<std::uint64_t>(jobs) != static_cast<std::uint64_t>(t)) continue;
      if (o > best.load(std::memory_order_relaxed)) continue;

      auto base = find_f_proper_solution(*sys, cnf, f_indices, std::nullopt, limits.search);
      if (base.status == SearchStatus::Budget) {
        events[static_cast<std::size_t>(t)] = Event{o, true, *sys, -1};
        lower_best(o);
        return;
      }
      if (base.status == SearchStatus::None) continue;  // vacuous
      for (int c : outside) {
        auto r = find_f_proper_solution(*sys, cnf, f_indices, c, limits.search);
        if (r.status == SearchStatus::Budget) {
          events[static_cast<std::size_t>(t)] = Event{o, true, *sys, c};
          lower_best(o);
          return;
        }
        if (r.status == SearchStatus::None) {
          events[static_cast<std::size_t>(t)] = Event{o, false, *sys, c};
          lower_best(o);
          return;
        }
      }
    }
  };

  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  ExtendVerdict verdict;
  std::optional<Event> first;
  for (auto& e : events)
    if (e && (!first || e->ordinal < first->ordinal)) first = e;
  if (first) {
    verdict.systems_checked = first->ordinal + 1;
    if (first->budget) {
      verdict.status = ExtendVerdict::Status::Budget;
    } else {
      verdict.status = ExtendVerdict::Status::Fails;
      verdict.counterexample_system = first->sys;
      verdict.counterexample_clause = first->clause;
    }
    return verdict;
  }
  if (enumeration_truncated.load()) {
    verdict.status = ExtendVerdict::Status::Budget;
    verdict.systems_checked = limits.max_systems;
    return verdict;
  }
  std::uint64_t total = 0;
  {
    CanonicalSystems gen(cnf.nvars(), m - 1);
    while (gen.next()) ++total;
  }
  verdict.systems_checked = total;
  return verdict;
}

// ---------------------------------------------------------------------------
// Width via saturation.
//
// Clauses are tracked up to semantic equivalence: the class of a clause is
// the canonical form of its negation system, and a class has a width-k
// representative exactly when its rank is at most k. Weakening becomes span
// extension by one independent row; resolution pairs a class whose span
// holds the row (f|1) - the literal (f=0) - with one holding (f|0). The
// "rest" of a premise ranges over the hyperplanes of its span avoiding the
// pivot row (larger rests only produce weakenings of smaller resolvents),
// and the resolvent class is the join of the two rests.
//
// Systems here are bit-packed: an augmented row occupies one word (form
// bits then the right-hand side bit), a system is at most four rows in
// pivot order, and the canonical key is the concatenation of the rows.

struct WidthLimits {
  std::size_t max_vars = 6;
  int max_width = 3;
  std::size_t max_classes = 2'000'000;
};

struct WidthClosure {
  std::vector<LinSystem> classes;   // canonical negation systems
  std::vector<LinClause> clauses;   // canonical clause representative per class
  bool refuted = false;
  // When refuted, saturation stops at the first derivation of the empty
  // clause: every class of rank <= k is then derivable by weakening from
  // it, so the listed classes are a prefix of that degenerate fixpoint.
};

namespace detail {

inline BitVec form_from_mask(std::size_t nvars, std::uint64_t mask) {
  BitVec f(nvars);
  for (std::size_t i = 0; i < nvars; ++i)
    if ((mask >> i) & 1u) f.set(i, true);
  return f;
}

inline LinClause class_clause(const LinSystem& sys) {
  std::vector<LinLiteral> lits;
  for (const auto& row : sys.canonical_rows()) lits.push_back(row.flipped());
  return LinClause(std::move(lits));
}

// Packed RREF systems over n <= 8 variables with rank <= 4.
struct PackedSaturation {
  using Row = std::uint16_t;  // bits 0..n-1: form, bit n: rhs

  struct Sys {
    std::array<Row, 5> rows{};  // pivot-ascending; rows[rank..] are zero
    int rank = 0;

    std::uint64_t key() const {
      std::uint64_t k = 0;
      for (int i = 0; i < rank; ++i) k |= static_cast<std::uint64_t>(rows[static_cast<std::size_t>(i)]) << (16 * i);
      return k;
    }
  };

  std::size_t n;
  Row form_mask;
  Row rhs_bit;
  int k;

  PackedSaturation(std::size_t nvars, int width)
      : n(nvars),
        form_mask(static_cast<Row>((1u << nvars) - 1)),
        rhs_bit(static_cast<Row>(1u << nvars)),
        k(width) {}

  Row reduce(const Sys& s, Row r) const {
    for (int i = 0; i < s.rank; ++i) {
      const Row row = s.rows[static_cast<std::size_t>(i)];
      const int p = std::countr_zero(static_cast<unsigned>(row & form_mask));
      if ((r >> p) & 1u) r ^= row;
    }
    return r;
  }

  // Adds a row; returns false when the result is inconsistent or the rank
  // would exceed max_rank. Redundant rows are fine.
  bool insert(Sys& s, Row r, int max_rank) const {
    r = reduce(s, r);
    if (r == 0) return true;
    if ((r & form_mask) == 0) return false;  // reduced to 0=1
    if (s.rank >= max_rank) return false;
    const int p = std::countr_zero(static_cast<unsigned>(r & form_mask));
    int at = s.rank;
    for (int i = 0; i < s.rank; ++i) {
      Row& row = s.rows[static_cast<std::size_t>(i)];
      if ((row >> p) & 1u) row ^= r;
      if (at == s.rank &&
          std::countr_zero(static_cast<unsigned>(s.rows[static_cast<std::size_t>(i)] & form_mask)) > p)
        at = i;
    }
    for (int i = s.rank; i > at; --i)
      s.rows[static_cast<std::size_t>(i)] = s.rows[static_cast<std::size_t>(i - 1)];
    s.rows[static_cast<std::size_t>(at)] = r;
    ++s.rank;
    return true;
  }

  LinSystem unpack(const Sys& s) const {
    std::vector<LinEquation> rows;
    for (int i = 0; i < s.rank; ++i) {
      const Row r = s.rows[static_cast<std::size_t>(i)];
      BitVec f(n);
      for (std::size_t b = 0; b < n; ++b)
        if ((r >> b) & 1u) f.set(b, true);
      rows.emplace_back(f, (r & rhs_bit) != 0);
    }
    return LinSystem(n, std::move(rows));
  }
};

}  // namespace detail

inline WidthClosure width_closure(const LinCnf& cnf, int k, WidthLimits limits = {}) {
  if (cnf.nvars() > limits.max_vars)
    throw LimitError("width closure limited to " + std::to_string(limits.max_vars) +
                     " variables, got " + std::to_string(cnf.nvars()));
  if (k > limits.max_width)
    throw LimitError("width closure limited to width " + std::to_string(limits.max_width));
  if (cnf.nvars() > 8 || k > 4)
    throw LimitError("width closure supports at most 8 variables and width 4");
  const std::size_t n = cnf.nvars();
  using PS = detail::PackedSaturation;
  const PS ps(n, k);

  std::vector<PS::Sys> classes;
  std::unordered_map<std::uint64_t, int> index;
  std::deque<int> todo;
  auto add_class = [&](const PS::Sys& s) {
    const std::uint64_t key = s.key();
    if (index.count(key)) return;
    if (classes.size() >= limits.max_classes)
      throw LimitError("width closure exceeded the class budget");
    index.emplace(key, static_cast<int>(classes.size()));
    todo.push_back(static_cast<int>(classes.size()));
    classes.push_back(s);
  };

  auto encode_flipped = [&](const LinLiteral& lit) {
    PS::Row r = 0;
    for (std::size_t b = 0; b < n; ++b)
      if (lit.form.get(b)) r = static_cast<PS::Row>(r | (1u << b));
    if (!lit.rhs) r = static_cast<PS::Row>(r | ps.rhs_bit);  // negation flips rhs
    return r;
  };

  for (const auto& clause : cnf.clauses()) {
    if (clause.width() > static_cast<std::size_t>(k)) continue;
    if (clause.is_tautological()) continue;
    PS::Sys s;
    bool ok = true;
    for (const auto& lit : clause.literals())
      if (!ps.insert(s, encode_flipped(lit), k)) {
        ok = false;
        break;
      }
    if (ok) add_class(s);
  }

  // Per pivot form and polarity, the deduplicated rest subspaces seen so far.
  struct FormSlot {
    std::vector<PS::Sys> rests[2];
    std::unordered_set<std::uint64_t> seen[2];
  };
  std::vector<FormSlot> registry(std::size_t{1} << n);

  const auto join_and_add = [&](const PS::Sys& a, const PS::Sys& b) {
    PS::Sys j = a;
    for (int i = 0; i < b.rank; ++i)
      if (!ps.insert(j, b.rows[static_cast<std::size_t>(i)], k)) return;
    add_class(j);
  };

  while (!todo.empty() && !index.count(0)) {
    const int id = todo.front();
    todo.pop_front();
    const PS::Sys a = classes[static_cast<std::size_t>(id)];

    // Weakening: one independent row, either right-hand side.
    if (a.rank + 1 <= k) {
      for (std::uint64_t fm = 1; fm < (std::uint64_t{1} << n); ++fm) {
        const PS::Row f = static_cast<PS::Row>(fm);
        if ((ps.reduce(a, f) & ps.form_mask) == 0) continue;  // dependent form
        for (int rhs = 0; rhs < 2; ++rhs) {
          PS::Sys ext = a;
          if (ps.insert(ext, static_cast<PS::Row>(f | (rhs ? ps.rhs_bit : 0)), k))
            add_class(ext);
        }
      }
    }

    // Resolution: for every pivot row in the span, enumerate the hyperplane
    // rests avoiding it and join against the opposite polarity.
    if (a.rank >= 1) {
      // Span vectors with their basis coordinates.
      for (std::uint64_t cm = 1; cm < (std::uint64_t{1} << a.rank); ++cm) {
        PS::Row v = 0;
        for (int i = 0; i < a.rank; ++i)
          if ((cm >> i) & 1u) v ^= a.rows[static_cast<std::size_t>(i)];
        if ((v & ps.form_mask) == 0) continue;  // cannot happen: spans are consistent
        const std::uint64_t fm = static_cast<std::uint64_t>(v & ps.form_mask);
        const int side = (v & ps.rhs_bit) ? 0 : 1;  // row (f|1) carries literal (f=0)
        FormSlot& slot = registry[fm];

        // Hyperplanes of the span avoiding v: kernels of functionals t with
        // t(v) = 1, basis { r_i + t_i r_J : i != J } for some t_J = 1.
        for (std::uint64_t tm = 1; tm < (std::uint64_t{1} << a.rank); ++tm) {
          if ((std::popcount(tm & cm) & 1) == 0) continue;
          const int J = std::countr_zero(tm);
          PS::Sys rest;
          const PS::Row rj = a.rows[static_cast<std::size_t>(J)];
          for (int i = 0; i < a.rank; ++i) {
            if (i == J) continue;
            PS::Row row = a.rows[static_cast<std::size_t>(i)];
            if ((tm >> i) & 1u) row ^= rj;
            if (!ps.insert(rest, row, k)) throw std::logic_error("bad rest basis");
          }
          if (!slot.seen[side].insert(rest.key()).second) continue;
          for (const auto& other : slot.rests[1 - side]) join_and_add(rest, other);
          slot.rests[side].push_back(rest);
        }
      }
    }
  }

  WidthClosure out;
  out.refuted = index.count(0) != 0;
  for (const auto& s : classes) {
    out.classes.push_back(ps.unpack(s));
    out.clauses.push_back(detail::class_clause(out.classes.back()));
  }
  return out;
}

// Minimum k in [0, kmax] whose width closure derives the empty clause, or
// nothing when every scan stays unrefuted.
inline std::optional<int> exact_width(const LinCnf& cnf, int kmax, WidthLimits limits = {}) {
  for (int k = 0; k <= kmax; ++k)
    if (width_closure(cnf, k, limits).refuted) return k;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// k-winning strategies.

struct StrategyFamily {
  int k = 0;
  std::vector<LinSystem> members;  // canonical, deduplicated, in insertion order

  static StrategyFamily of(int k, const std::vector<LinSystem>& systems) {
    StrategyFamily h;
    h.k = k;
    std::unordered_set<std::string> seen;
    for (const auto& s : systems) {
      LinSystem c = rref(s);
      if (seen.insert(c.canonical_key()).second) h.members.push_back(std::move(c));
    }
    return h;
  }
};

struct StrategyVerdict {
  bool ok = false;
  int violated_property = 0;  // 1..4; 0 with !ok means the family is empty
  std::string detail;
  std::optional<LinSystem> member;
  int clause_index = -1;
  std::optional<LinSystem> witness_system;  // property 3
  std::optional<BitVec> witness_form;       // property 4
};

inline StrategyVerdict check_winning_strategy(const StrategyFamily& h, const LinCnf& cnf,
                                              int k, ExtendLimits limits = {}) {
  StrategyVerdict v;
  if (h.members.empty()) {
    v.detail = "a winning strategy must be a non-empty family";
    return v;
  }
  std::unordered_set<std::string> keys;
  for (const auto& m : h.members) keys.insert(m.canonical_key());

  // Property 1: at most k equations per member.
  for (const auto& m : h.members)
    if (m.canonical_rows().size() > static_cast<std::size_t>(k)) {
      v.violated_property = 1;
      v.member = m;
      v.detail = "member has more than " + std::to_string(k) + " equations";
      return v;
    }

  // Property 2: every member has a solution satisfying each clause.
  for (const auto& m : h.members)
    for (std::size_t c = 0; c < cnf.size(); ++c) {
      auto r = find_f_proper_solution(m, cnf, {}, static_cast<int>(c), limits.search);
      if (r.status == SearchStatus::Budget)
        throw LimitError("strategy check: search budget exhausted");
      if (r.status == SearchStatus::None) {
        v.violated_property = 2;
        v.member = m;
        v.clause_index = static_cast<int>(c);
        v.detail = "member has no solution satisfying clause " + std::to_string(c + 1);
        return v;
      }
    }

  // Property 3: closure under implied systems of at most k equations.
  for (const auto& m : h.members) {
    std::vector<LinSystem> subs;
    if (!m.consistent()) {
      CanonicalSystems gen(cnf.nvars(), k);
      std::uint64_t seen_count = 0;
      while (auto s = gen.next()) {
        if (++seen_count > limits.max_systems)
          throw LimitError("strategy check: system enumeration budget exhausted");
        subs.push_back(std::move(*s));
      }
      if (k >= 1)  // the inconsistent system itself is implied as well
        subs.push_back(LinSystem(cnf.nvars(), {LinEquation(BitVec(cnf.nvars()), true)}));
    } else {
      std::unordered_set<std::string> sub_seen;
      std::deque<LinSystem> frontier;
      LinSystem empty(cnf.nvars());
      sub_seen.insert(empty.canonical_key());
      subs.push_back(empty);
      frontier.push_back(std::move(empty));
      const auto& rows = m.canonical_rows();
      while (!frontier.empty()) {
        LinSystem s = std::move(frontier.front());
        frontier.pop_front();
        if (static_cast<int>(s.rank()) >= k) continue;
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << rows.size()); ++mask) {
          LinEquation vsum(BitVec(cnf.nvars()), false);
          for (std::size_t i = 0; i < rows.size(); ++i)
            if ((mask >> i) & 1u) {
              vsum.form ^= rows[i].form;
              vsum.rhs = vsum.rhs ^ rows[i].rhs;
            }
          if (s.implies(vsum)) continue;
          LinSystem ext = s.extended(vsum);
          if (sub_seen.insert(ext.canonical_key()).second) {
            subs.push_back(ext);
            frontier.push_back(std::move(ext));
          }
        }
      }
    }
    for (const auto& g : subs)
      if (!keys.count(g.canonical_key())) {
        v.violated_property = 3;
        v.member = m;
        v.witness_system = g;
        v.detail = "an implied system with at most k equations is missing from the family";
        return v;
      }
  }

  // Property 4: members below k equations extend along every nonzero form.
  if (cnf.nvars() > 24) throw LimitError("strategy check: too many variables for property 4");
  for (const auto& m : h.members) {
    if (m.canonical_rows().size() >= static_cast<std::size_t>(k)) continue;
    for (std::uint64_t fm = 1; fm < (std::uint64_t{1} << cnf.nvars()); ++fm) {
      BitVec f = detail::form_from_mask(cnf.nvars(), fm);
      const bool ok0 = keys.count(m.extended(LinEquation(f, false)).canonical_key()) != 0;
      const bool ok1 = ok0 || keys.count(m.extended(LinEquation(f, true)).canonical_key()) != 0;
      if (!ok1) {
        v.violated_property = 4;
        v.member = m;
        v.witness_form = f;
        v.detail = "no extension of a member along form " + textio::write_form(f) +
                   " stays in the family";
        return v;
      }
    }
  }

  v.ok = true;
  return v;
}

// The Lemma 4.1-style family: all canonical systems with at most k
// equations whose solutions meet every clause derivable in width k.
// Returns nothing exactly when the closure refutes.
inline std::optional<StrategyFamily> build_canonical_strategy(const LinCnf& cnf, int k,
                                                              WidthLimits limits = {}) {
  WidthClosure closure = width_closure(cnf, k, limits);
  if (closure.refuted) return std::nullopt;
  const std::size_t n = cnf.nvars();

  // Row encoding for span membership bitsets over the 2^(n+1) augmented
  // vectors.
  auto encode = [n](const LinEquation& e) {
    std::uint64_t x = e.rhs ? (std::uint64_t{1} << n) : 0;
    for (std::size_t i = 0; i < n; ++i)
      if (e.form.get(i)) x |= std::uint64_t{1} << i;
    return x;
  };
  std::vector<std::vector<std::uint64_t>> class_rows;
  for (const auto& cls : closure.classes) {
    std::vector<std::uint64_t> rows;
    for (const auto& r : cls.canonical_rows()) rows.push_back(encode(r));
    class_rows.push_back(std::move(rows));
  }

  StrategyFamily h;
  h.k = k;
  CanonicalSystems gen(n, k);
  std::vector<std::uint64_t> span;
  std::vector<bool> in_span(std::size_t{1} << (n + 1), false);
  while (auto sys = gen.next()) {
    // Span of the candidate as a membership table.
    span.clear();
    span.push_back(0);
    for (const auto& r : sys->canonical_rows()) {
      const std::uint64_t e = encode(r);
      const std::size_t sz = span.size();
      for (std::size_t i = 0; i < sz; ++i) span.push_back(span[i] ^ e);
    }
    for (std::uint64_t s : span) in_span[s] = true;
    bool good = true;
    for (const auto& rows : class_rows) {
      bool contained = true;
      for (std::uint64_t r : rows)
        if (!in_span[r]) {
          contained = false;
          break;
        }
      if (contained) {  // some derivable clause is falsified by all solutions
        good = false;
        break;
      }
    }
    for (std::uint64_t s : span) in_span[s] = false;
    if (good) h.members.push_back(std::move(*sys));
  }
  return h;
}

// ---------------------------------------------------------------------------
// Strategy family codec: "p xws <k>", then one equation block per member,
// blocks separated by blank lines. The empty system is the single line 0=0.

inline std::string write_xws(const StrategyFamily& h) {
  std::string out = "p xws " + std::to_string(h.k) + "\n";
  for (std::size_t i = 0; i < h.members.size(); ++i) {
    if (i) out.push_back('\n');
    const auto& rows = h.members[i].canonical_rows();
    if (rows.empty()) {
      out += "0=0\n";
    } else {
      for (const auto& r : rows) out += textio::write_literal(r) + "\n";
    }
  }
  return out;
}

inline StrategyFamily parse_xws(std::string_view text, std::size_t nvars) {
  const auto lines = textio::split_lines(text);
  std::optional<int> k;
  std::vector<LinSystem> members;
  std::vector<LinEquation> block;
  bool block_open = false;

  auto flush = [&]() {
    if (!block_open) return;
    members.emplace_back(nvars, block);
    block.clear();
    block_open = false;
  };

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    const std::size_t lno = ln + 1;
    if (textio::is_comment(line)) continue;
    if (textio::is_blank(line)) {
      flush();
      continue;
    }
    auto toks = textio::split_tokens(line);
    if (toks[0] == "p") {
      if (k) throw ParseError(lno, 1, "duplicate header");
      if (toks.size() != 3 || toks[1] != "xws")
        throw ParseError(lno, 1, "expected header 'p xws <k>'");
      k = static_cast<int>(textio::parse_int(toks[2], lno, 1));
      continue;
    }
    if (!k) throw ParseError(lno, 1, "equation before header");
    for (const auto& t : toks) block.push_back(textio::parse_literal(t, nvars, lno, 1));
    block_open = true;
  }
  flush();
  if (!k) throw ParseError(lines.size() + 1, 1, "missing header");
  return StrategyFamily::of(*k, members);
}

}  // namespace reslin
