#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "reslin/formula.hpp"
#include "reslin/gf2.hpp"
#include "reslin/textio.hpp"

namespace reslin {

// True iff every assignment satisfying c also satisfies d, decided without
// enumeration: the falsifiers of d must all falsify c, i.e. every equation
// of the negation of c lies in the span of the negation of d (an
// inconsistent negation of d means d is tautological and implies holds).
inline bool check_clause_implication(const LinClause& c, const LinClause& d,
                                     std::size_t nvars) {
  const LinSystem neg_d = negation_system(d, nvars);
  for (const auto& lit : c.literals())
    if (!neg_d.implies(lit.flipped())) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Tree-like proofs.

struct TreeProof {
  struct Input {
    int clause_index;
  };
  struct Resolve {
    int left;  // premise containing (pivot = 0)
    int right;  // premise containing (pivot = 1)
    BitVec pivot;
  };
  struct Weaken {
    int child;
    LinClause target;
  };
  struct SynWeaken {
    int child;
    LinLiteral added;
  };
  struct Simplify {
    int child;
  };
  struct Add {
    int child;
    std::size_t pos1;  // kept literal, position in the canonical order
    std::size_t pos2;  // replaced literal
  };
  using Node = std::variant<Input, Resolve, Weaken, SynWeaken, Simplify, Add>;

  std::vector<Node> nodes;  // the root is the last node

  std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline std::optional<LinClause> resolve_clauses(const LinClause& left, const LinClause& right,
                                                const BitVec& pivot, std::string& why) {
  const LinLiteral p0(pivot, false), p1(pivot, true);
  if (!left.contains(p0)) {
    why = "left premise lacks literal " + textio::write_literal(p0);
    return std::nullopt;
  }
  if (!right.contains(p1)) {
    why = "right premise lacks literal " + textio::write_literal(p1);
    return std::nullopt;
  }
  std::vector<LinLiteral> lits;
  for (const auto& l : left.literals())
    if (!(l == p0)) lits.push_back(l);
  for (const auto& l : right.literals())
    if (!(l == p1)) lits.push_back(l);
  return LinClause(std::move(lits));
}

inline LinLiteral falsum_literal(std::size_t nvars) {
  return LinEquation(BitVec(nvars), true);  // the removable literal 0=1
}

inline bool clause_fits(const LinClause& c, std::size_t nvars) {
  for (const auto& lit : c.literals())
    if (lit.form.size() != nvars) return false;
  return true;
}

}  // namespace detail

struct TreeCheckResult {
  bool ok = false;
  std::size_t size = 0;
  std::size_t width = 0;
  int failed_node = -1;  // 0-based index of the first bad node
  std::string diagnostic;
  std::vector<LinClause> clauses;  // per node, as far as computed
};

// Checks every node of a tree-like refutation. Resolution is syntactic
// (pivot literals must be present), weakening is the semantic rule, and
// synweak/simp/add are the three syntactic rules. Size and width are
// reported for the checked prefix even when verification fails.
inline TreeCheckResult verify_tree_proof(const TreeProof& proof, const LinCnf& cnf) {
  TreeCheckResult res;
  res.size = proof.nodes.size();
  const std::size_t nvars = cnf.nvars();
  std::vector<int> uses(proof.nodes.size(), 0);

  auto fail = [&](std::size_t id, const std::string& why) {
    res.failed_node = static_cast<int>(id);
    res.diagnostic = "node " + std::to_string(id + 1) + ": " + why;
    return res;
  };

  for (std::size_t id = 0; id < proof.nodes.size(); ++id) {
    auto child_of = [&](int c) -> const LinClause* {
      if (c < 0 || static_cast<std::size_t>(c) >= id) return nullptr;
      ++uses[static_cast<std::size_t>(c)];
      return &res.clauses[static_cast<std::size_t>(c)];
    };
    const auto& node = proof.nodes[id];
    LinClause clause;

    if (const auto* in = std::get_if<TreeProof::Input>(&node)) {
      if (in->clause_index < 0 || static_cast<std::size_t>(in->clause_index) >= cnf.size())
        return fail(id, "input clause index " + std::to_string(in->clause_index + 1) +
                            " out of range");
      clause = cnf.clause(static_cast<std::size_t>(in->clause_index));
    } else if (const auto* r = std::get_if<TreeProof::Resolve>(&node)) {
      const LinClause* left = child_of(r->left);
      const LinClause* right = child_of(r->right);
      if (!left || !right) return fail(id, "premise id out of range");
      std::string why;
      auto resolvent = detail::resolve_clauses(*left, *right, r->pivot, why);
      if (!resolvent) return fail(id, "resolution: " + why);
      clause = *resolvent;
    } else if (const auto* w = std::get_if<TreeProof::Weaken>(&node)) {
      const LinClause* child = child_of(w->child);
      if (!child) return fail(id, "premise id out of range");
      if (!detail::clause_fits(w->target, nvars))
        return fail(id, "weakening target does not fit the variable count");
      if (!check_clause_implication(*child, w->target, nvars))
        return fail(id, "weakening target is not semantically implied");
      clause = w->target;
    } else if (const auto* sw = std::get_if<TreeProof::SynWeaken>(&node)) {
      const LinClause* child = child_of(sw->child);
      if (!child) return fail(id, "premise id out of range");
      clause = child->with(sw->added);
    } else if (const auto* sp = std::get_if<TreeProof::Simplify>(&node)) {
      const LinClause* child = child_of(sp->child);
      if (!child) return fail(id, "premise id out of range");
      const LinLiteral falsum = detail::falsum_literal(nvars);
      if (!child->contains(falsum)) return fail(id, "simplification: premise lacks literal 0=1");
      const auto& lits = child->literals();
      for (std::size_t p = 0; p < lits.size(); ++p)
        if (lits[p] == falsum) {
          clause = child->without(p);
          break;
        }
    } else if (const auto* ad = std::get_if<TreeProof::Add>(&node)) {
      const LinClause* child = child_of(ad->child);
      if (!child) return fail(id, "premise id out of range");
      if (ad->pos1 >= child->width() || ad->pos2 >= child->width() || ad->pos1 == ad->pos2)
        return fail(id, "addition: bad literal positions");
      const LinLiteral& l1 = child->literals()[ad->pos1];
      const LinLiteral& l2 = child->literals()[ad->pos2];
      const LinLiteral sum(l1.form ^ l2.form, l1.rhs ^ l2.rhs ^ 1);
      clause = child->without(ad->pos2).with(sum);
    }

    res.clauses.push_back(std::move(clause));
    if (res.clauses.back().width() > res.width) res.width = res.clauses.back().width();
  }

  if (proof.nodes.empty()) {
    res.diagnostic = "empty proof";
    return res;
  }
  for (std::size_t id = 0; id + 1 < proof.nodes.size(); ++id)
    if (uses[id] != 1)
      return fail(id, uses[id] == 0 ? "unused node breaks the tree shape"
                                    : "node used more than once breaks the tree shape");
  if (uses.back() != 0) return fail(proof.nodes.size() - 1, "the root is used as a premise");
  if (!res.clauses.back().empty())
    return fail(proof.nodes.size() - 1, "root clause is not the empty clause");
  res.ok = true;
  return res;
}

// ---------------------------------------------------------------------------
// Space scripts.

struct SpaceScript {
  struct Load {
    int clause_index;
  };
  struct InferRes {
    int id1;  // premise containing (pivot = 0)
    int id2;  // premise containing (pivot = 1)
    BitVec pivot;
  };
  struct InferWeak {
    int id;
    LinClause target;
  };
  struct Erase {
    int id;
  };
  using Step = std::variant<Load, InferRes, InferWeak, Erase>;

  std::vector<Step> steps;
};

struct SpaceCheckResult {
  bool ok = false;
  std::size_t space = 0;
  bool refuted = false;
  int failed_step = -1;  // 0-based index of the first bad step
  std::string diagnostic;
};

// Simulates configurations from the empty one. Each Load/Infer binds the
// next fresh id (1-based); premises stay in memory until erased. Space is
// the maximum number of clauses simultaneously present.
inline SpaceCheckResult verify_space_script(const SpaceScript& script, const LinCnf& cnf) {
  SpaceCheckResult res;
  const std::size_t nvars = cnf.nvars();
  std::map<int, LinClause> config;
  int next_id = 1;

  auto fail = [&](std::size_t at, const std::string& why) {
    res.failed_step = static_cast<int>(at);
    res.diagnostic = "step " + std::to_string(at + 1) + ": " + why;
    return res;
  };

  for (std::size_t at = 0; at < script.steps.size(); ++at) {
    const auto& step = script.steps[at];
    auto present = [&](int id) -> const LinClause* {
      auto it = config.find(id);
      return it == config.end() ? nullptr : &it->second;
    };

    if (const auto* l = std::get_if<SpaceScript::Load>(&step)) {
      if (l->clause_index < 0 || static_cast<std::size_t>(l->clause_index) >= cnf.size())
        return fail(at, "load: clause index out of range");
      config.emplace(next_id++, cnf.clause(static_cast<std::size_t>(l->clause_index)));
    } else if (const auto* r = std::get_if<SpaceScript::InferRes>(&step)) {
      const LinClause* c1 = present(r->id1);
      const LinClause* c2 = present(r->id2);
      if (!c1 || !c2) return fail(at, "resolution premise not in the configuration");
      std::string why;
      auto resolvent = detail::resolve_clauses(*c1, *c2, r->pivot, why);
      if (!resolvent) return fail(at, "resolution: " + why);
      config.emplace(next_id++, std::move(*resolvent));
    } else if (const auto* w = std::get_if<SpaceScript::InferWeak>(&step)) {
      const LinClause* c = present(w->id);
      if (!c) return fail(at, "weakening premise not in the configuration");
      if (!detail::clause_fits(w->target, nvars))
        return fail(at, "weakening target does not fit the variable count");
      if (!check_clause_implication(*c, w->target, nvars))
        return fail(at, "weakening target is not semantically implied");
      config.emplace(next_id++, w->target);
    } else if (const auto* e = std::get_if<SpaceScript::Erase>(&step)) {
      if (!present(e->id)) return fail(at, "erase: id not in the configuration");
      config.erase(e->id);
    }

    if (config.size() > res.space) res.space = config.size();
    if (!res.refuted)
      for (const auto& [id, c] : config)
        if (c.empty()) {
          res.refuted = true;
          break;
        }
  }
  res.ok = true;
  return res;
}

// ---------------------------------------------------------------------------
// Desugaring the semantic weakening rule into the three syntactic rules.

struct SynStep {
  enum class Kind { SynWeaken, Add, Simplify };
  Kind kind;
  LinLiteral lit;            // SynWeaken: the added literal
  std::size_t pos1 = 0;      // Add: source literal position (kept)
  std::size_t pos2 = 0;      // Add: replaced literal position
};

inline LinClause apply_syn_step(const LinClause& clause, const SynStep& step,
                                std::size_t nvars) {
  switch (step.kind) {
    case SynStep::Kind::SynWeaken:
      return clause.with(step.lit);
    case SynStep::Kind::Simplify: {
      const LinLiteral falsum = detail::falsum_literal(nvars);
      const auto& lits = clause.literals();
      for (std::size_t p = 0; p < lits.size(); ++p)
        if (lits[p] == falsum) return clause.without(p);
      throw std::invalid_argument("simplification: clause lacks literal 0=1");
    }
    case SynStep::Kind::Add: {
      if (step.pos1 >= clause.width() || step.pos2 >= clause.width() || step.pos1 == step.pos2)
        throw std::invalid_argument("addition: bad literal positions");
      const LinLiteral& l1 = clause.literals()[step.pos1];
      const LinLiteral& l2 = clause.literals()[step.pos2];
      return clause.without(step.pos2).with(LinLiteral(l1.form ^ l2.form, l1.rhs ^ l2.rhs ^ 1));
    }
  }
  throw std::logic_error("unreachable");
}

inline std::vector<LinClause> replay_syn_steps(const LinClause& start,
                                               const std::vector<SynStep>& steps,
                                               std::size_t nvars) {
  std::vector<LinClause> out;
  LinClause cur = start;
  for (const auto& s : steps) {
    cur = apply_syn_step(cur, s, nvars);
    out.push_back(cur);
  }
  return out;
}

namespace detail {

inline std::size_t position_of(const LinClause& clause, const LinLiteral& lit) {
  const auto& lits = clause.literals();
  for (std::size_t p = 0; p < lits.size(); ++p)
    if (lits[p] == lit) return p;
  throw std::logic_error("literal not present");
}

// Subset of base literals whose row vectors sum to the row vector of
// target. Rows mean the negation view: literal (f = a) is the row (f, a+1).
// Solvable whenever target's row lies in the span of the base rows.
inline std::optional<std::vector<LinLiteral>> row_combination(
    const std::vector<LinLiteral>& base, const LinLiteral& target, std::size_t nvars) {
  const std::size_t t = base.size();
  std::vector<LinEquation> eqs;
  for (std::size_t c = 0; c <= nvars; ++c) {
    BitVec coef(t);
    bool rhs;
    if (c < nvars) {
      for (std::size_t j = 0; j < t; ++j) coef.set(j, base[j].form.get(c));
      rhs = target.form.get(c);
    } else {
      for (std::size_t j = 0; j < t; ++j) coef.set(j, !base[j].rhs);
      rhs = !target.rhs;
    }
    eqs.emplace_back(coef, rhs);
  }
  auto sel = solve(LinSystem(t, std::move(eqs)));
  if (!sel) return std::nullopt;
  std::vector<LinLiteral> picked;
  for (std::size_t j = 0; j < t; ++j)
    if (sel->get(j)) picked.push_back(base[j]);
  return picked;
}

}  // namespace detail

// Emits syntactic steps turning c into exactly d (canonical form): first the
// missing literals of d are added, then every leftover literal is cancelled
// by additions against d's literals, ending in 0=1 and a simplification
// unless the intermediate merges with a literal already present. Requires
// c |= d, c non-tautological, and d non-tautological (the syntactic rules
// cannot introduce the tautological literal 0=0).
inline std::vector<SynStep> desugar_weakening(const LinClause& c, const LinClause& d,
                                              std::size_t nvars) {
  if (c.is_tautological())
    throw std::invalid_argument("desugar_weakening: premise is tautological");
  if (d.is_tautological())
    throw std::invalid_argument("desugar_weakening: target is tautological");
  if (!check_clause_implication(c, d, nvars))
    throw std::invalid_argument("desugar_weakening: target is not implied by the premise");

  std::vector<SynStep> steps;
  LinClause cur = c;
  auto emit = [&](SynStep s) {
    cur = apply_syn_step(cur, s, nvars);
    steps.push_back(std::move(s));
  };

  for (const auto& lit : d.literals())
    if (!cur.contains(lit)) emit({SynStep::Kind::SynWeaken, lit, 0, 0});

  const LinLiteral falsum = detail::falsum_literal(nvars);
  for (;;) {
    // Pick any literal still foreign to d; additions only ever touch its
    // own position, so d's literals stay present throughout.
    LinLiteral v;
    bool have_leftover = false;
    for (const auto& lit : cur.literals())
      if (!d.contains(lit)) {
        v = lit;
        have_leftover = true;
        break;
      }
    if (!have_leftover) break;

    auto combo = v == falsum ? std::make_optional(std::vector<LinLiteral>())
                             : detail::row_combination(d.literals(), v, nvars);
    if (!combo)
      throw std::logic_error("desugar_weakening: leftover literal outside the target span");
    bool merged = false;
    for (const auto& src : *combo) {
      const std::size_t p1 = detail::position_of(cur, src);
      const std::size_t p2 = detail::position_of(cur, v);
      const LinLiteral next(src.form ^ v.form, src.rhs ^ v.rhs ^ 1);
      merged = cur.contains(next);
      emit({SynStep::Kind::Add, {}, p1, p2});
      if (merged) break;  // the intermediate coincided with a present literal
      v = next;
    }
    if (!merged) {
      if (!(v == falsum)) throw std::logic_error("desugar_weakening: cancellation fell short");
      emit({SynStep::Kind::Simplify, {}, 0, 0});
    }
  }
  if (!(cur == d)) throw std::logic_error("desugar_weakening: replay mismatch");
  return steps;
}

// Rewrites every semantic weakening inference of a script through
// desugar_weakening, keeping each intermediate clause only until the next
// one is derived. Measured space grows by at most 1.
inline SpaceScript desugar_script_weakenings(const SpaceScript& script, const LinCnf& cnf) {
  const std::size_t nvars = cnf.nvars();
  SpaceScript out;
  std::map<int, int> idmap;
  std::map<int, LinClause> clause_of;  // original ids
  int orig_next = 1, new_next = 1;

  for (std::size_t at = 0; at < script.steps.size(); ++at) {
    const auto& step = script.steps[at];
    if (const auto* l = std::get_if<SpaceScript::Load>(&step)) {
      out.steps.push_back(*l);
      clause_of.emplace(orig_next, cnf.clause(static_cast<std::size_t>(l->clause_index)));
      idmap[orig_next++] = new_next++;
    } else if (const auto* r = std::get_if<SpaceScript::InferRes>(&step)) {
      std::string why;
      auto resolvent =
          detail::resolve_clauses(clause_of.at(r->id1), clause_of.at(r->id2), r->pivot, why);
      if (!resolvent)
        throw std::invalid_argument("step " + std::to_string(at + 1) + ": " + why);
      out.steps.push_back(SpaceScript::InferRes{idmap.at(r->id1), idmap.at(r->id2), r->pivot});
      clause_of.emplace(orig_next, std::move(*resolvent));
      idmap[orig_next++] = new_next++;
    } else if (const auto* w = std::get_if<SpaceScript::InferWeak>(&step)) {
      const LinClause& c = clause_of.at(w->id);
      const auto syn = desugar_weakening(c, w->target, nvars);
      const auto chain = replay_syn_steps(c, syn, nvars);
      int prev = idmap.at(w->id);
      if (chain.empty()) {
        out.steps.push_back(SpaceScript::InferWeak{prev, w->target});
        prev = new_next++;
      } else {
        bool prev_intermediate = false;
        for (const auto& e : chain) {
          out.steps.push_back(SpaceScript::InferWeak{prev, e});
          const int q = new_next++;
          if (prev_intermediate) out.steps.push_back(SpaceScript::Erase{prev});
          prev = q;
          prev_intermediate = true;
        }
      }
      clause_of.emplace(orig_next, w->target);
      idmap[orig_next++] = prev;
    } else if (const auto* e = std::get_if<SpaceScript::Erase>(&step)) {
      out.steps.push_back(SpaceScript::Erase{idmap.at(e->id)});
    }
  }
  return out;
}

// Replays a verified tree proof as a space script: post-order evaluation,
// erasing each premise once its parent has been derived.
inline SpaceScript tree_proof_to_space_script(const TreeProof& proof, const LinCnf& cnf) {
  const TreeCheckResult check = verify_tree_proof(proof, cnf);
  if (!check.ok)
    throw std::invalid_argument("tree_proof_to_space_script: " + check.diagnostic);

  SpaceScript out;
  int next_id = 1;
  auto emit = [&](auto&& self, int node) -> int {
    const auto& n = proof.nodes[static_cast<std::size_t>(node)];
    if (const auto* in = std::get_if<TreeProof::Input>(&n)) {
      out.steps.push_back(SpaceScript::Load{in->clause_index});
      return next_id++;
    }
    if (const auto* r = std::get_if<TreeProof::Resolve>(&n)) {
      const int il = self(self, r->left);
      const int ir = self(self, r->right);
      out.steps.push_back(SpaceScript::InferRes{il, ir, r->pivot});
      const int id = next_id++;
      out.steps.push_back(SpaceScript::Erase{il});
      out.steps.push_back(SpaceScript::Erase{ir});
      return id;
    }
    int child = -1;
    if (const auto* w = std::get_if<TreeProof::Weaken>(&n)) child = w->child;
    if (const auto* sw = std::get_if<TreeProof::SynWeaken>(&n)) child = sw->child;
    if (const auto* sp = std::get_if<TreeProof::Simplify>(&n)) child = sp->child;
    if (const auto* ad = std::get_if<TreeProof::Add>(&n)) child = ad->child;
    const int ic = self(self, child);
    out.steps.push_back(
        SpaceScript::InferWeak{ic, check.clauses[static_cast<std::size_t>(node)]});
    const int id = next_id++;
    out.steps.push_back(SpaceScript::Erase{ic});
    return id;
  };
  emit(emit, static_cast<int>(proof.nodes.size()) - 1);
  return out;
}

// ---------------------------------------------------------------------------
// XLP / XLS codecs.

namespace detail {

inline std::string write_clause_tokens(const LinClause& c) {
  if (c.empty()) return "F";
  std::string s;
  for (std::size_t l = 0; l < c.literals().size(); ++l) {
    if (l) s.push_back(' ');
    s += textio::write_literal(c.literals()[l]);
  }
  return s;
}

inline LinClause parse_clause_tokens(const std::vector<std::string_view>& toks,
                                     std::size_t from, std::size_t nvars, std::size_t lno) {
  if (from >= toks.size()) throw ParseError(lno, 1, "expected a clause");
  if (toks[from] == "F") {
    if (from + 1 != toks.size()) throw ParseError(lno, 1, "tokens after 'F'");
    return LinClause();
  }
  std::vector<LinLiteral> lits;
  for (std::size_t t = from; t < toks.size(); ++t)
    lits.push_back(textio::parse_literal(toks[t], nvars, lno, 1));
  return LinClause(std::move(lits));
}

}  // namespace detail

inline std::string write_xlp(const TreeProof& proof) {
  std::string out = "p xlp tree " + std::to_string(proof.nodes.size()) + "\n";
  for (std::size_t id = 0; id < proof.nodes.size(); ++id) {
    out += std::to_string(id + 1);
    const auto& n = proof.nodes[id];
    if (const auto* in = std::get_if<TreeProof::Input>(&n)) {
      out += " input " + std::to_string(in->clause_index + 1);
    } else if (const auto* r = std::get_if<TreeProof::Resolve>(&n)) {
      out += " res " + std::to_string(r->left + 1) + " " + std::to_string(r->right + 1) + " " +
             textio::write_form(r->pivot);
    } else if (const auto* w = std::get_if<TreeProof::Weaken>(&n)) {
      out += " weak " + std::to_string(w->child + 1) + " " + detail::write_clause_tokens(w->target);
    } else if (const auto* sw = std::get_if<TreeProof::SynWeaken>(&n)) {
      out += " synweak " + std::to_string(sw->child + 1) + " " +
             textio::write_literal(sw->added);
    } else if (const auto* sp = std::get_if<TreeProof::Simplify>(&n)) {
      out += " simp " + std::to_string(sp->child + 1);
    } else if (const auto* ad = std::get_if<TreeProof::Add>(&n)) {
      out += " add " + std::to_string(ad->child + 1) + " " + std::to_string(ad->pos1 + 1) + " " +
             std::to_string(ad->pos2 + 1);
    }
    out.push_back('\n');
  }
  return out;
}

inline TreeProof parse_xlp(std::string_view text, std::size_t nvars) {
  const auto lines = textio::split_lines(text);
  TreeProof proof;
  std::size_t declared = 0;
  bool seen_header = false;

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    const std::size_t lno = ln + 1;
    if (textio::is_blank(line) || textio::is_comment(line)) continue;
    auto toks = textio::split_tokens(line);
    if (toks[0] == "p") {
      if (seen_header) throw ParseError(lno, 1, "duplicate header");
      if (toks.size() != 4 || toks[1] != "xlp" || toks[2] != "tree")
        throw ParseError(lno, 1, "expected header 'p xlp tree <nnodes>'");
      declared = static_cast<std::size_t>(textio::parse_int(toks[3], lno, 1));
      seen_header = true;
      continue;
    }
    if (!seen_header) throw ParseError(lno, 1, "node before header");
    if (toks.size() < 2) throw ParseError(lno, 1, "expected '<id> <rule> ...'");
    const long id = textio::parse_int(toks[0], lno, 1);
    if (id != static_cast<long>(proof.nodes.size()) + 1)
      throw ParseError(lno, 1, "node ids must be sequential from 1");
    auto child = [&](std::string_view tok) -> int {
      const long c = textio::parse_int(tok, lno, 1);
      if (c < 1 || c >= id) throw ParseError(lno, 1, "premise id must reference an earlier node");
      return static_cast<int>(c - 1);
    };

    if (toks[1] == "input") {
      if (toks.size() != 3) throw ParseError(lno, 1, "expected '<id> input <clause>'");
      proof.nodes.push_back(
          TreeProof::Input{static_cast<int>(textio::parse_int(toks[2], lno, 1)) - 1});
    } else if (toks[1] == "res") {
      if (toks.size() != 5) throw ParseError(lno, 1, "expected '<id> res <l> <r> <form>'");
      proof.nodes.push_back(TreeProof::Resolve{child(toks[2]), child(toks[3]),
                                               textio::parse_form(toks[4], nvars, lno, 1)});
    } else if (toks[1] == "weak") {
      if (toks.size() < 4) throw ParseError(lno, 1, "expected '<id> weak <child> <clause>'");
      proof.nodes.push_back(
          TreeProof::Weaken{child(toks[2]), detail::parse_clause_tokens(toks, 3, nvars, lno)});
    } else if (toks[1] == "synweak") {
      if (toks.size() != 4) throw ParseError(lno, 1, "expected '<id> synweak <child> <literal>'");
      proof.nodes.push_back(
          TreeProof::SynWeaken{child(toks[2]), textio::parse_literal(toks[3], nvars, lno, 1)});
    } else if (toks[1] == "simp") {
      if (toks.size() != 3) throw ParseError(lno, 1, "expected '<id> simp <child>'");
      proof.nodes.push_back(TreeProof::Simplify{child(toks[2])});
    } else if (toks[1] == "add") {
      if (toks.size() != 5) throw ParseError(lno, 1, "expected '<id> add <child> <p1> <p2>'");
      proof.nodes.push_back(TreeProof::Add{
          child(toks[2]),
          static_cast<std::size_t>(textio::parse_int(toks[3], lno, 1)) - 1,
          static_cast<std::size_t>(textio::parse_int(toks[4], lno, 1)) - 1});
    } else {
      throw ParseError(lno, 1, "unknown rule '" + std::string(toks[1]) + "'");
    }
  }
  if (!seen_header) throw ParseError(lines.size() + 1, 1, "missing header");
  if (proof.nodes.size() != declared)
    throw ParseError(lines.size() + 1, 1,
                     "expected " + std::to_string(declared) + " nodes, got " +
                         std::to_string(proof.nodes.size()));
  return proof;
}

inline std::string write_xls(const SpaceScript& script) {
  std::string out = "p xls\n";
  for (const auto& step : script.steps) {
    if (const auto* l = std::get_if<SpaceScript::Load>(&step)) {
      out += "load " + std::to_string(l->clause_index + 1);
    } else if (const auto* r = std::get_if<SpaceScript::InferRes>(&step)) {
      out += "res " + std::to_string(r->id1) + " " + std::to_string(r->id2) + " " +
             textio::write_form(r->pivot);
    } else if (const auto* w = std::get_if<SpaceScript::InferWeak>(&step)) {
      out += "weak " + std::to_string(w->id) + " " + detail::write_clause_tokens(w->target);
    } else if (const auto* e = std::get_if<SpaceScript::Erase>(&step)) {
      out += "erase " + std::to_string(e->id);
    }
    out.push_back('\n');
  }
  return out;
}

inline SpaceScript parse_xls(std::string_view text, std::size_t nvars) {
  const auto lines = textio::split_lines(text);
  SpaceScript script;
  bool seen_header = false;
  long issued = 0;

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = lines[ln];
    const std::size_t lno = ln + 1;
    if (textio::is_blank(line) || textio::is_comment(line)) continue;
    auto toks = textio::split_tokens(line);
    if (toks[0] == "p") {
      if (seen_header) throw ParseError(lno, 1, "duplicate header");
      if (toks.size() != 2 || toks[1] != "xls") throw ParseError(lno, 1, "expected header 'p xls'");
      seen_header = true;
      continue;
    }
    if (!seen_header) throw ParseError(lno, 1, "step before header");
    auto ref = [&](std::string_view tok) -> int {
      const long id = textio::parse_int(tok, lno, 1);
      if (id < 1 || id > issued) throw ParseError(lno, 1, "id references a step not yet issued");
      return static_cast<int>(id);
    };
    if (toks[0] == "load") {
      if (toks.size() != 2) throw ParseError(lno, 1, "expected 'load <clause>'");
      script.steps.push_back(
          SpaceScript::Load{static_cast<int>(textio::parse_int(toks[1], lno, 1)) - 1});
      ++issued;
    } else if (toks[0] == "res") {
      if (toks.size() != 4) throw ParseError(lno, 1, "expected 'res <id1> <id2> <form>'");
      script.steps.push_back(SpaceScript::InferRes{ref(toks[1]), ref(toks[2]),
                                                   textio::parse_form(toks[3], nvars, lno, 1)});
      ++issued;
    } else if (toks[0] == "weak") {
      if (toks.size() < 3) throw ParseError(lno, 1, "expected 'weak <id> <clause>'");
      script.steps.push_back(
          SpaceScript::InferWeak{ref(toks[1]), detail::parse_clause_tokens(toks, 2, nvars, lno)});
      ++issued;
    } else if (toks[0] == "erase") {
      if (toks.size() != 2) throw ParseError(lno, 1, "expected 'erase <id>'");
      script.steps.push_back(SpaceScript::Erase{ref(toks[1])});
    } else {
      throw ParseError(lno, 1, "unknown step '" + std::string(toks[0]) + "'");
    }
  }
  if (!seen_header) throw ParseError(lines.size() + 1, 1, "missing header");
  return script;
}

}  // namespace reslin
