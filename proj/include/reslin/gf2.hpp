#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace reslin {

// Fixed-length coefficient vector over F2, bit-packed into 64-bit words.
// Variable i lives at bit (i % 64) of word (i / 64). Length is fixed at
// construction; ordering is the numeric order of the packed value with
// variable 0 as the least significant bit.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  static BitVec unit(std::size_t nbits, std::size_t i) {
    BitVec v(nbits);
    v.set(i, true);
    return v;
  }

  std::size_t size() const { return nbits_; }

  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

  void set(std::size_t i, bool v) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= m;
    else
      words_[i >> 6] &= ~m;
  }

  BitVec& operator^=(const BitVec& o) {
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
  }

  friend BitVec operator^(BitVec a, const BitVec& b) {
    a ^= b;
    return a;
  }

  bool none() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  bool any() const { return !none(); }

  // Index of the lowest set bit, or -1 if the vector is zero.
  int lowest_set() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w]) return static_cast<int>(w * 64 + std::countr_zero(words_[w]));
    return -1;
  }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // Parity of the AND with another vector of the same length.
  bool dot(const BitVec& o) const {
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & o.words_[w];
    return std::popcount(acc) & 1u;
  }

  bool operator==(const BitVec& o) const { return nbits_ == o.nbits_ && words_ == o.words_; }
  bool operator!=(const BitVec& o) const { return !(*this == o); }

  // Numeric order of the packed value; used as the canonical form order.
  bool operator<(const BitVec& o) const {
    for (std::size_t w = words_.size(); w-- > 0;)
      if (words_[w] != o.words_[w]) return words_[w] < o.words_[w];
    return false;
  }

  void append_bytes(std::string& out) const {
    for (auto w : words_)
      for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((w >> (8 * b)) & 0xff));
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

// One linear equation f = rhs over F2. The form is homogeneous; constant
// terms are folded into the right-hand side.
struct LinEquation {
  BitVec form;
  bool rhs = false;

  LinEquation() = default;
  LinEquation(BitVec f, bool r) : form(std::move(f)), rhs(r) {}

  static LinEquation var(std::size_t nvars, std::size_t i, bool value) {
    return LinEquation(BitVec::unit(nvars, i), value);
  }

  bool trivially_true() const { return form.none() && !rhs; }   // 0 = 0
  bool trivially_false() const { return form.none() && rhs; }   // 0 = 1

  bool eval(const BitVec& assignment) const { return form.dot(assignment) == rhs; }

  LinEquation flipped() const { return LinEquation(form, !rhs); }

  bool operator==(const LinEquation& o) const { return rhs == o.rhs && form == o.form; }
  bool operator!=(const LinEquation& o) const { return !(*this == o); }
  bool operator<(const LinEquation& o) const {
    if (form != o.form) return form < o.form;
    return rhs < o.rhs;
  }
};

class EnumerationLimitError : public std::runtime_error {
 public:
  EnumerationLimitError(std::size_t free_vars, std::size_t limit)
      : std::runtime_error("enumeration too large: " + std::to_string(free_vars) +
                           " free variables exceed the limit of " + std::to_string(limit)),
        free_vars(free_vars) {}
  std::size_t free_vars;
};

// A conjunction of linear equations. The canonical form (reduced row-echelon
// form of the augmented matrix) is computed eagerly; values are immutable
// afterwards. An inconsistent system canonicalizes to the single row 0 = 1,
// so equal canonical keys always mean equal solution sets.
class LinSystem {
 public:
  explicit LinSystem(std::size_t nvars) : nvars_(nvars) { canonicalize(); }

  LinSystem(std::size_t nvars, std::vector<LinEquation> equations)
      : nvars_(nvars), equations_(std::move(equations)) {
    canonicalize();
  }

  std::size_t nvars() const { return nvars_; }
  const std::vector<LinEquation>& equations() const { return equations_; }
  const std::vector<LinEquation>& canonical_rows() const { return canon_; }
  const std::vector<int>& pivots() const { return pivots_; }
  bool consistent() const { return consistent_; }
  std::size_t rank() const { return pivots_.size(); }

  LinSystem extended(const LinEquation& eq) const {
    std::vector<LinEquation> rows = equations_;
    rows.push_back(eq);
    return LinSystem(nvars_, std::move(rows));
  }

  // Residual of eq modulo the row span: XORs away every canonical row whose
  // pivot occurs in eq. The result has zeros at all pivot columns.
  LinEquation reduce(LinEquation eq) const {
    for (std::size_t i = 0; i < canon_.size(); ++i) {
      if (pivots_[i] >= 0 && eq.form.get(static_cast<std::size_t>(pivots_[i]))) {
        eq.form ^= canon_[i].form;
        eq.rhs ^= canon_[i].rhs;
      }
    }
    return eq;
  }

  // True iff every solution satisfies eq (an inconsistent system implies
  // everything; otherwise membership of eq in the augmented row span).
  bool implies(const LinEquation& eq) const {
    if (!consistent_) return true;
    return reduce(eq).trivially_true();
  }

  bool eval(const BitVec& assignment) const {
    for (const auto& e : equations_)
      if (!e.eval(assignment)) return false;
    return true;
  }

  // Unique byte key of the canonical form.
  std::string canonical_key() const {
    std::string key;
    key.reserve(canon_.size() * (nvars_ / 8 + 9));
    for (const auto& row : canon_) {
      row.form.append_bytes(key);
      key.push_back(row.rhs ? '\1' : '\0');
    }
    return key;
  }

 private:
  void canonicalize() {
    for (const auto& e : equations_) {
      LinEquation r = reduce(e);
      if (r.trivially_true()) continue;
      if (r.trivially_false()) {
        canon_.assign(1, LinEquation(BitVec(nvars_), true));
        pivots_.assign(1, -1);
        consistent_ = false;
        return;
      }
      const int p = r.form.lowest_set();
      // Back-substitute into earlier rows, then insert keeping pivots sorted.
      std::size_t at = canon_.size();
      for (std::size_t i = 0; i < canon_.size(); ++i) {
        if (canon_[i].form.get(static_cast<std::size_t>(p))) {
          canon_[i].form ^= r.form;
          canon_[i].rhs ^= r.rhs;
        }
        if (pivots_[i] > p && at == canon_.size()) at = i;
      }
      canon_.insert(canon_.begin() + static_cast<std::ptrdiff_t>(at), r);
      pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(at), p);
    }
  }

  std::size_t nvars_;
  std::vector<LinEquation> equations_;
  std::vector<LinEquation> canon_;
  std::vector<int> pivots_;
  bool consistent_ = true;
};

// Canonical form as a system of its own: same solution set, RREF rows.
inline LinSystem rref(const LinSystem& sys) {
  return LinSystem(sys.nvars(), sys.canonical_rows());
}

inline bool implies_equation(const LinSystem& sys, const LinEquation& eq) {
  return sys.implies(eq);
}

// One solution with all free variables set to 0, or nothing if inconsistent.
inline std::optional<BitVec> solve(const LinSystem& sys) {
  if (!sys.consistent()) return std::nullopt;
  BitVec a(sys.nvars());
  const auto& rows = sys.canonical_rows();
  const auto& piv = sys.pivots();
  for (std::size_t i = 0; i < rows.size(); ++i)
    a.set(static_cast<std::size_t>(piv[i]), rows[i].rhs);
  return a;
}

struct EnumerationLimits {
  std::size_t max_free_vars = 24;
};

// Visits solutions in lexicographic order of the free-variable values (free
// variables taken in ascending index order, the last one toggling fastest).
// The callback returns false to stop early. Returns the number visited.
inline std::uint64_t for_each_solution(const LinSystem& sys, std::uint64_t cap,
                                       const std::function<bool(const BitVec&)>& fn,
                                       EnumerationLimits limits = {}) {
  if (!sys.consistent()) return 0;
  const auto& rows = sys.canonical_rows();
  const auto& piv = sys.pivots();
  std::vector<std::size_t> free_vars;
  {
    std::vector<bool> is_pivot(sys.nvars(), false);
    for (int p : piv) is_pivot[static_cast<std::size_t>(p)] = true;
    for (std::size_t v = 0; v < sys.nvars(); ++v)
      if (!is_pivot[v]) free_vars.push_back(v);
  }
  if (free_vars.size() > limits.max_free_vars)
    throw EnumerationLimitError(free_vars.size(), limits.max_free_vars);

  const std::size_t nf = free_vars.size();
  const std::uint64_t total = std::uint64_t{1} << nf;
  std::uint64_t visited = 0;
  for (std::uint64_t idx = 0; idx < total && visited < cap; ++idx) {
    BitVec a(sys.nvars());
    for (std::size_t j = 0; j < nf; ++j)
      a.set(free_vars[j], (idx >> (nf - 1 - j)) & 1u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const bool v = rows[i].rhs ^ rows[i].form.dot(a);
      a.set(static_cast<std::size_t>(piv[i]), v);
    }
    ++visited;
    if (!fn(a)) break;
  }
  return visited;
}

inline std::vector<BitVec> enumerate_solutions(const LinSystem& sys, std::uint64_t cap,
                                               EnumerationLimits limits = {}) {
  std::vector<BitVec> out;
  for_each_solution(
      sys, cap,
      [&](const BitVec& a) {
        out.push_back(a);
        return true;
      },
      limits);
  return out;
}

// Row-echelon state that grows one equation at a time. Keeps full RREF and
// reports, per added equation, the reduced row that entered the basis (or
// nothing if redundant). Residuals computed by reduce() stay canonical.
class IncrementalRref {
 public:
  explicit IncrementalRref(std::size_t nvars) : nvars_(nvars) {}

  std::size_t nvars() const { return nvars_; }
  bool consistent() const { return consistent_; }
  std::size_t rank() const { return rows_.size(); }
  const std::vector<LinEquation>& rows() const { return rows_; }

  LinEquation reduce(LinEquation eq) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (eq.form.get(static_cast<std::size_t>(pivots_[i]))) {
        eq.form ^= rows_[i].form;
        eq.rhs ^= rows_[i].rhs;
      }
    }
    return eq;
  }

  bool implies(const LinEquation& eq) const {
    if (!consistent_) return true;
    return reduce(eq).trivially_true();
  }

  // Adds eq; returns the new canonical basis row if the rank grew.
  std::optional<LinEquation> add(const LinEquation& eq) {
    if (!consistent_) return std::nullopt;
    LinEquation r = reduce(eq);
    if (r.trivially_true()) return std::nullopt;
    if (r.trivially_false()) {
      consistent_ = false;
      return std::nullopt;
    }
    const int p = r.form.lowest_set();
    std::size_t at = rows_.size();
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (rows_[i].form.get(static_cast<std::size_t>(p))) {
        rows_[i].form ^= r.form;
        rows_[i].rhs ^= r.rhs;
      }
      if (pivots_[i] > p && at == rows_.size()) at = i;
    }
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(at), r);
    pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(at), p);
    return r;
  }

  LinSystem to_system() const {
    if (!consistent_)
      return LinSystem(nvars_, {LinEquation(BitVec(nvars_), true)});
    return LinSystem(nvars_, rows_);
  }

 private:
  std::size_t nvars_;
  std::vector<LinEquation> rows_;
  std::vector<int> pivots_;
  bool consistent_ = true;
};

}  // namespace reslin
