#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reslin/gf2.hpp"
#include "reslin/textio.hpp"

namespace reslin {

// A linear literal is one disjunct f = b of a linear clause.
using LinLiteral = LinEquation;

// Disjunction of linear literals, stored canonically sorted and
// deduplicated. The empty clause is unsatisfiable. A clause containing the
// literal 0=0, or both f=0 and f=1 for the same form, is tautological;
// 0=1 literals are kept (they are inert disjuncts removable only by the
// simplification rule).
class LinClause {
 public:
  LinClause() = default;

  explicit LinClause(std::vector<LinLiteral> lits) : lits_(std::move(lits)) {
    std::sort(lits_.begin(), lits_.end());
    lits_.erase(std::unique(lits_.begin(), lits_.end()), lits_.end());
  }

  const std::vector<LinLiteral>& literals() const { return lits_; }
  std::size_t width() const { return lits_.size(); }
  bool empty() const { return lits_.empty(); }

  bool is_tautological() const {
    for (std::size_t i = 0; i < lits_.size(); ++i) {
      if (lits_[i].trivially_true()) return true;
      if (i + 1 < lits_.size() && lits_[i].form == lits_[i + 1].form) return true;
    }
    return false;
  }

  bool contains(const LinLiteral& lit) const {
    return std::binary_search(lits_.begin(), lits_.end(), lit);
  }

  LinClause with(const LinLiteral& lit) const {
    std::vector<LinLiteral> ls = lits_;
    ls.push_back(lit);
    return LinClause(std::move(ls));
  }

  LinClause without(std::size_t pos) const {
    std::vector<LinLiteral> ls = lits_;
    ls.erase(ls.begin() + static_cast<std::ptrdiff_t>(pos));
    LinClause c;
    c.lits_ = std::move(ls);  // removal keeps the canonical order
    return c;
  }

  bool evaluate(const BitVec& assignment) const {
    for (const auto& lit : lits_)
      if (lit.eval(assignment)) return true;
    return false;
  }

  bool operator==(const LinClause& o) const { return lits_ == o.lits_; }
  bool operator!=(const LinClause& o) const { return !(*this == o); }
  bool operator<(const LinClause& o) const {
    return std::lexicographical_compare(lits_.begin(), lits_.end(), o.lits_.begin(),
                                        o.lits_.end());
  }

 private:
  std::vector<LinLiteral> lits_;
};

// The negation of a non-tautological clause: one equation f = 1-b per
// literal f = b. Solutions of the system are exactly the falsifiers.
inline LinSystem negate_clause(const LinClause& clause, std::size_t nvars) {
  if (clause.is_tautological())
    throw std::invalid_argument("negate_clause: clause is tautological");
  std::vector<LinEquation> rows;
  rows.reserve(clause.width());
  for (const auto& lit : clause.literals()) rows.push_back(lit.flipped());
  return LinSystem(nvars, std::move(rows));
}

// Unchecked variant used by verification code, where a tautological input
// simply yields an inconsistent system.
inline LinSystem negation_system(const LinClause& clause, std::size_t nvars) {
  std::vector<LinEquation> rows;
  rows.reserve(clause.width());
  for (const auto& lit : clause.literals()) rows.push_back(lit.flipped());
  return LinSystem(nvars, std::move(rows));
}

// A linear CNF: clauses in a fixed order, each optionally labeled.
class LinCnf {
 public:
  explicit LinCnf(std::size_t nvars) : nvars_(nvars) {}

  std::size_t nvars() const { return nvars_; }
  const std::vector<LinClause>& clauses() const { return clauses_; }
  const LinClause& clause(std::size_t i) const { return clauses_.at(i); }
  std::size_t size() const { return clauses_.size(); }

  // Maximum clause width (the r of a linear r-CNF).
  std::size_t max_width() const {
    std::size_t r = 0;
    for (const auto& c : clauses_) r = std::max(r, c.width());
    return r;
  }

  const std::string& label(std::size_t i) const { return labels_.at(i); }

  std::vector<int> indices_with_label(std::string_view name) const {
    std::vector<int> idx;
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == name) idx.push_back(static_cast<int>(i));
    return idx;
  }

  std::vector<std::string> label_names() const {
    std::vector<std::string> names;
    for (const auto& l : labels_)
      if (!l.empty() && std::find(names.begin(), names.end(), l) == names.end())
        names.push_back(l);
    return names;
  }

  void add_clause(LinClause c, std::string label = "") {
    for (const auto& lit : c.literals())
      if (lit.form.size() != nvars_)
        throw std::invalid_argument("clause literal length does not match nvars");
    clauses_.push_back(std::move(c));
    labels_.push_back(std::move(label));
  }

  bool evaluate(const BitVec& assignment) const {
    if (assignment.size() != nvars_)
      throw std::invalid_argument("assignment length does not match nvars");
    for (const auto& c : clauses_)
      if (!c.evaluate(assignment)) return false;
    return true;
  }

 private:
  std::size_t nvars_;
  std::vector<LinClause> clauses_;
  std::vector<std::string> labels_;
};

// ---------------------------------------------------------------------------
// Graphs for the graph-parameterized families.

struct Graph {
  int nverts = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based, u < v

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(nverts));
    for (auto [u, v] : edges) {
      adj[static_cast<std::size_t>(u)].push_back(v);
      adj[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
  }

  static Graph complete(int n) {
    Graph g;
    g.nverts = n;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v) g.edges.emplace_back(u, v);
    return g;
  }
};

struct BipartiteGraph {
  int nleft = 0;
  int nright = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based (left, right)

  static BipartiteGraph complete(int nleft, int nright) {
    BipartiteGraph g;
    g.nleft = nleft;
    g.nright = nright;
    for (int u = 0; u < nleft; ++u)
      for (int v = 0; v < nright; ++v) g.edges.emplace_back(u, v);
    return g;
  }
};

// ---------------------------------------------------------------------------
// Variable index maps. All deterministic; i, j, k are 1-based here and the
// result is the 0-based variable index.

// Pigeonhole: p_ij -> (i-1)*n + j for i in [m] pigeons, j in [n] holes.
inline std::size_t php_var(int holes, int i, int j) {
  return static_cast<std::size_t>((i - 1) * holes + (j - 1));
}

// Ordering-style x_ij for i != j in [n]: row-major over i with the j = i
// column skipped.
inline std::size_t ordering_var(int n, int i, int j) {
  return static_cast<std::size_t>((i - 1) * (n - 1) + (j - 1) - (j > i ? 1 : 0));
}

// DLO z_ikj (k witnesses i < j): packed after the x block, lexicographic in
// (i, k, j) with the used indices skipped.
inline std::size_t dlo_z_var(int n, int i, int k, int j) {
  const int pk = (k - 1) - (k > i ? 1 : 0);
  const int pj = (j - 1) - (j > i ? 1 : 0) - (j > k ? 1 : 0);
  return static_cast<std::size_t>(n * (n - 1) + (i - 1) * (n - 1) * (n - 2) + pk * (n - 2) +
                                  pj);
}

// ---------------------------------------------------------------------------
// Formula families.

namespace detail {
inline LinLiteral pos(std::size_t nvars, std::size_t v) {
  return LinEquation(BitVec::unit(nvars, v), true);
}
inline LinLiteral neg(std::size_t nvars, std::size_t v) {
  return LinEquation(BitVec::unit(nvars, v), false);
}
}  // namespace detail

// PHP with m pigeons and n holes (m > n >= 1): pigeon clauses then hole
// clauses H_{ijk} over unordered pigeon pairs.
inline LinCnf make_pigeonhole(int pigeons, int holes) {
  if (holes < 1 || pigeons <= holes)
    throw std::invalid_argument("php requires pigeons > holes >= 1");
  const std::size_t nvars = static_cast<std::size_t>(pigeons) * static_cast<std::size_t>(holes);
  LinCnf cnf(nvars);
  for (int i = 1; i <= pigeons; ++i) {
    std::vector<LinLiteral> lits;
    for (int j = 1; j <= holes; ++j) lits.push_back(detail::pos(nvars, php_var(holes, i, j)));
    cnf.add_clause(LinClause(std::move(lits)), "pigeon");
  }
  for (int i = 1; i <= pigeons; ++i)
    for (int j = i + 1; j <= pigeons; ++j)
      for (int k = 1; k <= holes; ++k)
        cnf.add_clause(LinClause({detail::neg(nvars, php_var(holes, i, k)),
                                  detail::neg(nvars, php_var(holes, j, k))}),
                       "hole");
  return cnf;
}

// FPHP(G) over a bipartite graph: one variable per edge; hole and
// functionality clauses are emitted where both edges exist.
inline LinCnf make_functional_pigeonhole(const BipartiteGraph& g) {
  std::vector<std::pair<int, int>> edges = g.edges;
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("fphp: duplicate edge");
  const std::size_t nvars = edges.size();
  auto var = [&](int u, int v) -> int {
    auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(u, v));
    if (it == edges.end() || *it != std::make_pair(u, v)) return -1;
    return static_cast<int>(it - edges.begin());
  };
  std::vector<std::vector<int>> nbr(static_cast<std::size_t>(g.nleft));
  for (auto [u, v] : edges) nbr[static_cast<std::size_t>(u)].push_back(v);

  LinCnf cnf(nvars);
  for (int u = 0; u < g.nleft; ++u) {
    if (nbr[static_cast<std::size_t>(u)].empty())
      throw std::invalid_argument("fphp: pigeon " + std::to_string(u + 1) + " has no holes");
    std::vector<LinLiteral> lits;
    for (int v : nbr[static_cast<std::size_t>(u)])
      lits.push_back(detail::pos(nvars, static_cast<std::size_t>(var(u, v))));
    cnf.add_clause(LinClause(std::move(lits)), "pigeon");
  }
  for (int u = 0; u < g.nleft; ++u)
    for (int u2 = u + 1; u2 < g.nleft; ++u2)
      for (int v = 0; v < g.nright; ++v) {
        int a = var(u, v), b = var(u2, v);
        if (a >= 0 && b >= 0)
          cnf.add_clause(LinClause({detail::neg(nvars, static_cast<std::size_t>(a)),
                                    detail::neg(nvars, static_cast<std::size_t>(b))}),
                         "hole");
      }
  for (int u = 0; u < g.nleft; ++u) {
    const auto& vs = nbr[static_cast<std::size_t>(u)];
    for (std::size_t a = 0; a < vs.size(); ++a)
      for (std::size_t b = a + 1; b < vs.size(); ++b)
        cnf.add_clause(
            LinClause({detail::neg(nvars, static_cast<std::size_t>(var(u, vs[a]))),
                       detail::neg(nvars, static_cast<std::size_t>(var(u, vs[b])))}),
            "functional");
  }
  return cnf;
}

namespace detail {
// Order axioms shared by ordering, DLO and GOP: antisymmetry, totality,
// transitivity over all (ordered) pairs and triples of [n].
inline void add_order_axioms(LinCnf& cnf, int n, std::size_t nvars, const std::string& label) {
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      cnf.add_clause(LinClause({neg(nvars, ordering_var(n, i, j)),
                                neg(nvars, ordering_var(n, j, i))}),
                     label);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      cnf.add_clause(LinClause({pos(nvars, ordering_var(n, i, j)),
                                pos(nvars, ordering_var(n, j, i))}),
                     label);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (j == i) continue;
      for (int k = 1; k <= n; ++k) {
        if (k == i || k == j) continue;
        cnf.add_clause(LinClause({neg(nvars, ordering_var(n, i, j)),
                                  neg(nvars, ordering_var(n, j, k)),
                                  pos(nvars, ordering_var(n, i, k))}),
                       label);
      }
    }
}
}  // namespace detail

// Ordering principle on [n] (n >= 2): order axioms plus non-minimality.
inline LinCnf make_ordering(int n) {
  if (n < 2) throw std::invalid_argument("ordering requires n >= 2");
  const std::size_t nvars = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1);
  LinCnf cnf(nvars);
  detail::add_order_axioms(cnf, n, nvars, "order");
  for (int i = 1; i <= n; ++i) {
    std::vector<LinLiteral> lits;
    for (int j = 1; j <= n; ++j)
      if (j != i) lits.push_back(detail::pos(nvars, ordering_var(n, j, i)));
    cnf.add_clause(LinClause(std::move(lits)), "nonmin");
  }
  return cnf;
}

// Dense linear ordering principle on [n] (n >= 3): order axioms and witness
// semantics (types 1-4, labeled "worder"), then density clauses.
inline LinCnf make_dense_linear_ordering(int n) {
  if (n < 3) throw std::invalid_argument("dlo requires n >= 3");
  const std::size_t nx = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1);
  const std::size_t nvars = nx + nx * static_cast<std::size_t>(n - 2);
  LinCnf cnf(nvars);
  detail::add_order_axioms(cnf, n, nvars, "worder");
  for (int i = 1; i <= n; ++i)
    for (int k = 1; k <= n; ++k) {
      if (k == i) continue;
      for (int j = 1; j <= n; ++j) {
        if (j == i || j == k) continue;
        const std::size_t z = dlo_z_var(n, i, k, j);
        cnf.add_clause(
            LinClause({detail::neg(nvars, z), detail::pos(nvars, ordering_var(n, i, k))}),
            "worder");
        cnf.add_clause(
            LinClause({detail::neg(nvars, z), detail::pos(nvars, ordering_var(n, k, j))}),
            "worder");
      }
    }
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (j == i) continue;
      std::vector<LinLiteral> lits{detail::neg(nvars, ordering_var(n, i, j))};
      for (int k = 1; k <= n; ++k)
        if (k != i && k != j) lits.push_back(detail::pos(nvars, dlo_z_var(n, i, k, j)));
      cnf.add_clause(LinClause(std::move(lits)), "density");
    }
  return cnf;
}

// Graph ordering principle GOP(G): order axioms over all vertex pairs, with
// non-minimality restricted to graph neighborhoods. G must have no isolated
// vertices.
inline LinCnf make_graph_ordering(const Graph& g) {
  const int n = g.nverts;
  if (n < 2) throw std::invalid_argument("gop requires at least 2 vertices");
  const auto adj = g.adjacency();
  for (int u = 0; u < n; ++u)
    if (adj[static_cast<std::size_t>(u)].empty())
      throw std::invalid_argument("gop: vertex " + std::to_string(u + 1) + " is isolated");
  const std::size_t nvars = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1);
  LinCnf cnf(nvars);
  detail::add_order_axioms(cnf, n, nvars, "order");
  for (int u = 1; u <= n; ++u) {
    std::vector<LinLiteral> lits;
    for (int v : adj[static_cast<std::size_t>(u - 1)])
      lits.push_back(detail::pos(nvars, ordering_var(n, v + 1, u)));
    cnf.add_clause(LinClause(std::move(lits)), "nonmin");
  }
  return cnf;
}

// ---------------------------------------------------------------------------
// XLCNF codec.
//
//   c <comment>
//   p xlcnf <nvars> <nclauses>
//   <clause line> x nclauses
//
// A clause line is space-separated literals "<i1>+...+<ik>=<b>", or the
// single token "F" for the empty clause, optionally followed by "| <label>".

inline std::string write_xlcnf(const LinCnf& cnf) {
  std::string out = "p xlcnf " + std::to_string(cnf.nvars()) + " " +
                    std::to_string(cnf.size()) + "\n";
  for (std::size_t i = 0; i < cnf.size(); ++i) {
    const auto& c = cnf.clause(i);
    if (c.empty()) {
      out += "F";
    } else {
      for (std::size_t l = 0; l < c.literals().size(); ++l) {
        if (l) out.push_back(' ');
        out += textio::write_literal(c.literals()[l]);
      }
    }
    if (!cnf.label(i).empty()) out += " | " + cnf.label(i);
    out.push_back('\n');
  }
  return out;
}

inline LinCnf parse_xlcnf(std::string_view text) {
  const auto lines = textio::split_lines(text);
  std::size_t nvars = 0, nclauses = 0;
  bool seen_header = false;
  std::vector<std::pair<LinClause, std::string>> clauses;

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    const std::size_t lno = ln + 1;
    if (textio::is_blank(line) || textio::is_comment(line)) continue;
    auto toks = textio::split_tokens(line);
    if (toks[0] == "p") {
      if (seen_header) throw ParseError(lno, 1, "duplicate header");
      if (toks.size() != 4 || toks[1] != "xlcnf")
        throw ParseError(lno, 1, "expected header 'p xlcnf <nvars> <nclauses>'");
      nvars = static_cast<std::size_t>(textio::parse_int(toks[2], lno, 1));
      nclauses = static_cast<std::size_t>(textio::parse_int(toks[3], lno, 1));
      seen_header = true;
      continue;
    }
    if (!seen_header) throw ParseError(lno, 1, "clause before header");
    if (clauses.size() >= nclauses)
      throw ParseError(lno, 1, "more clause lines than declared in the header");

    std::vector<LinLiteral> lits;
    std::string label;
    bool is_empty_clause = false;
    for (std::size_t t = 0; t < toks.size(); ++t) {
      const std::size_t col = static_cast<std::size_t>(toks[t].data() - line.data()) + 1;
      if (toks[t] == "|") {
        for (std::size_t r = t + 1; r < toks.size(); ++r) {
          if (!label.empty()) label.push_back(' ');
          label += std::string(toks[r]);
        }
        if (label.empty()) throw ParseError(lno, col, "empty label after '|'");
        break;
      }
      if (toks[t] == "F") {
        if (t != 0) throw ParseError(lno, col, "'F' must be the only literal token");
        is_empty_clause = true;
        continue;
      }
      if (is_empty_clause) throw ParseError(lno, col, "literal after 'F'");
      lits.push_back(textio::parse_literal(toks[t], nvars, lno, col));
    }
    if (lits.empty() && !is_empty_clause)
      throw ParseError(lno, 1, "expected a clause line");
    clauses.emplace_back(LinClause(std::move(lits)), std::move(label));
  }
  if (!seen_header) throw ParseError(lines.size() + 1, 1, "missing header");
  if (clauses.size() != nclauses)
    throw ParseError(lines.size() + 1, 1,
                     "expected " + std::to_string(nclauses) + " clauses, got " +
                         std::to_string(clauses.size()));
  LinCnf cnf(nvars);
  for (auto& [c, label] : clauses) cnf.add_clause(std::move(c), std::move(label));
  return cnf;
}

// ---------------------------------------------------------------------------
// Graph codecs: "p graph <nverts> <nedges>" or "p bigraph <nl> <nr> <nedges>"
// followed by one "u v" line per edge, 1-based.

namespace detail {
inline std::vector<std::vector<long>> parse_edge_lines(
    const std::vector<std::string_view>& lines, std::size_t& ln, std::size_t nedges) {
  std::vector<std::vector<long>> out;
  for (; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    if (textio::is_blank(line) || textio::is_comment(line)) continue;
    auto toks = textio::split_tokens(line);
    if (toks.size() != 2) throw ParseError(ln + 1, 1, "expected 'u v'");
    out.push_back({textio::parse_int(toks[0], ln + 1, 1), textio::parse_int(toks[1], ln + 1, 1)});
    if (out.size() == nedges) {
      ++ln;
      break;
    }
  }
  if (out.size() != nedges)
    throw ParseError(lines.size() + 1, 1, "fewer edges than declared in the header");
  return out;
}
}  // namespace detail

inline Graph parse_graph(std::string_view text) {
  const auto lines = textio::split_lines(text);
  std::size_t ln = 0;
  for (; ln < lines.size(); ++ln)
    if (!textio::is_blank(lines[ln]) && !textio::is_comment(lines[ln])) break;
  if (ln == lines.size()) throw ParseError(lines.size() + 1, 1, "missing header");
  auto toks = textio::split_tokens(lines[ln]);
  if (toks.size() != 4 || toks[0] != "p" || toks[1] != "graph")
    throw ParseError(ln + 1, 1, "expected header 'p graph <nverts> <nedges>'");
  Graph g;
  g.nverts = static_cast<int>(textio::parse_int(toks[2], ln + 1, 1));
  const std::size_t nedges = static_cast<std::size_t>(textio::parse_int(toks[3], ln + 1, 1));
  ++ln;
  for (auto& e : detail::parse_edge_lines(lines, ln, nedges)) {
    long u = e[0], v = e[1];
    if (u < 1 || u > g.nverts || v < 1 || v > g.nverts || u == v)
      throw ParseError(ln, 1, "bad edge");
    g.edges.emplace_back(static_cast<int>(std::min(u, v)) - 1,
                         static_cast<int>(std::max(u, v)) - 1);
  }
  std::sort(g.edges.begin(), g.edges.end());
  if (std::adjacent_find(g.edges.begin(), g.edges.end()) != g.edges.end())
    throw ParseError(ln, 1, "duplicate edge");
  return g;
}

inline BipartiteGraph parse_bigraph(std::string_view text) {
  const auto lines = textio::split_lines(text);
  std::size_t ln = 0;
  for (; ln < lines.size(); ++ln)
    if (!textio::is_blank(lines[ln]) && !textio::is_comment(lines[ln])) break;
  if (ln == lines.size()) throw ParseError(lines.size() + 1, 1, "missing header");
  auto toks = textio::split_tokens(lines[ln]);
  if (toks.size() != 5 || toks[0] != "p" || toks[1] != "bigraph")
    throw ParseError(ln + 1, 1, "expected header 'p bigraph <nleft> <nright> <nedges>'");
  BipartiteGraph g;
  g.nleft = static_cast<int>(textio::parse_int(toks[2], ln + 1, 1));
  g.nright = static_cast<int>(textio::parse_int(toks[3], ln + 1, 1));
  const std::size_t nedges = static_cast<std::size_t>(textio::parse_int(toks[4], ln + 1, 1));
  ++ln;
  for (auto& e : detail::parse_edge_lines(lines, ln, nedges)) {
    long u = e[0], v = e[1];
    if (u < 1 || u > g.nleft || v < 1 || v > g.nright) throw ParseError(ln, 1, "bad edge");
    g.edges.emplace_back(static_cast<int>(u) - 1, static_cast<int>(v) - 1);
  }
  std::sort(g.edges.begin(), g.edges.end());
  if (std::adjacent_find(g.edges.begin(), g.edges.end()) != g.edges.end())
    throw ParseError(ln, 1, "duplicate edge");
  return g;
}

}  // namespace reslin
