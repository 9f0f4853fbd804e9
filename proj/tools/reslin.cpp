#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reslin/extend.hpp"
#include "reslin/formula.hpp"
#include "reslin/games.hpp"
#include "reslin/gf2.hpp"
#include "reslin/oracle.hpp"
#include "reslin/proofcheck.hpp"
#include "reslin/textio.hpp"

namespace {

using namespace reslin;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Report {
  std::vector<std::pair<std::string, std::string>> fields;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void add(const std::string& key, const std::string& value) { fields.emplace_back(key, value); }
  void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, value ? std::string("true") : "false"); }

  void print() const {
    for (const auto& [k, v] : fields) std::cout << k << "=" << v << "\n";
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    std::cout << "wall_ms=" << ms << "\n";
  }
};

LinCnf load_cnf(const std::string& path, Report& report) {
  const std::string text = read_file(path);
  LinCnf cnf = parse_xlcnf(text);
  report.add("fingerprint", hex64(fnv1a(write_xlcnf(cnf))));
  return cnf;
}

std::optional<std::uint64_t> env_budget() {
  const char* s = std::getenv("RESLIN_BUDGET");
  if (!s || !*s) return std::nullopt;
  return std::strtoull(s, nullptr, 10);
}

std::vector<int> resolve_family(const LinCnf& cnf, const std::string& family,
                                const std::string& indices) {
  if (!family.empty() && !indices.empty())
    throw std::runtime_error("--family and --indices are mutually exclusive");
  if (!family.empty()) {
    auto idx = cnf.indices_with_label(family);
    if (idx.empty()) {
      std::string known;
      for (const auto& name : cnf.label_names()) known += (known.empty() ? "" : ", ") + name;
      throw std::runtime_error("no clauses labeled '" + family + "' (labels: " + known + ")");
    }
    return idx;
  }
  std::vector<int> idx;
  std::stringstream ss(indices);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const long v = std::strtol(tok.c_str(), nullptr, 10);
    if (v < 1 || static_cast<std::size_t>(v) > cnf.size())
      throw std::runtime_error("clause index " + tok + " out of range");
    idx.push_back(static_cast<int>(v) - 1);
  }
  return idx;
}

std::string describe_system(const LinSystem& sys) {
  if (sys.canonical_rows().empty()) return "(empty)";
  std::string s;
  for (const auto& row : sys.canonical_rows()) {
    if (!s.empty()) s += " & ";
    s += textio::write_literal(row);
  }
  return s;
}

// --- gen ---------------------------------------------------------------

int run_gen(const std::string& family, int pigeons, int holes, int n,
            const std::string& graph_path, const std::string& out, Report& report) {
  LinCnf cnf(0);
  report.add("family", family);
  if (family == "php") {
    cnf = make_pigeonhole(pigeons, holes);
    report.add("pigeons", static_cast<std::uint64_t>(pigeons));
    report.add("holes", static_cast<std::uint64_t>(holes));
  } else if (family == "ordering") {
    cnf = make_ordering(n);
    report.add("n", static_cast<std::uint64_t>(n));
  } else if (family == "dlo") {
    cnf = make_dense_linear_ordering(n);
    report.add("n", static_cast<std::uint64_t>(n));
  } else if (family == "gop") {
    cnf = make_graph_ordering(parse_graph(read_file(graph_path)));
    report.add("graph", graph_path);
  } else {
    cnf = make_functional_pigeonhole(parse_bigraph(read_file(graph_path)));
    report.add("graph", graph_path);
  }
  const std::string text = write_xlcnf(cnf);
  report.add("fingerprint", hex64(fnv1a(text)));
  report.add("nvars", static_cast<std::uint64_t>(cnf.nvars()));
  report.add("nclauses", static_cast<std::uint64_t>(cnf.size()));
  report.add("r", static_cast<std::uint64_t>(cnf.max_width()));
  if (out.empty()) {
    report.print();
    std::cout << text;
  } else {
    write_file(out, text);
    report.add("out", out);
    report.print();
  }
  return kExitOk;
}

// --- verify ------------------------------------------------------------

int run_verify(const std::string& cnf_path, const std::string& proof_path,
               const std::string& kind_arg, Report& report) {
  LinCnf cnf = load_cnf(cnf_path, report);
  const std::string text = read_file(proof_path);
  std::string kind;
  for (const auto line : textio::split_lines(text)) {
    if (textio::is_blank(line) || textio::is_comment(line)) continue;
    if (line.rfind("p xlp", 0) == 0) kind = "tree";
    if (line.rfind("p xls", 0) == 0) kind = "space";
    break;
  }
  if (kind.empty()) throw std::runtime_error("cannot determine the proof kind from the header");
  if (!kind_arg.empty() && kind_arg != kind)
    throw std::runtime_error("file is a " + kind + " proof, not " + kind_arg);
  report.add("kind", kind);

  if (kind == "tree") {
    auto res = verify_tree_proof(parse_xlp(text, cnf.nvars()), cnf);
    report.add("ok", res.ok);
    report.add("size", static_cast<std::uint64_t>(res.size));
    report.add("width", static_cast<std::uint64_t>(res.width));
    if (!res.ok) {
      report.add("node", static_cast<std::uint64_t>(res.failed_node + 1));
      report.add("diagnostic", res.diagnostic);
    }
    report.print();
    return res.ok ? kExitOk : kExitFail;
  }
  auto res = verify_space_script(parse_xls(text, cnf.nvars()), cnf);
  report.add("ok", res.ok);
  report.add("space", static_cast<std::uint64_t>(res.space));
  report.add("refuted", res.refuted);
  if (!res.ok) {
    report.add("step", static_cast<std::uint64_t>(res.failed_step + 1));
    report.add("diagnostic", res.diagnostic);
  }
  report.print();
  return res.ok ? kExitOk : kExitFail;
}

// --- width -------------------------------------------------------------

int run_width(const std::string& cnf_path, int kmax, Report& report) {
  LinCnf cnf = load_cnf(cnf_path, report);
  WidthLimits limits;
  if (auto b = env_budget()) limits.max_classes = *b;
  report.add("kmax", static_cast<std::uint64_t>(kmax));
  auto w = exact_width(cnf, kmax, limits);
  if (w)
    report.add("width", static_cast<std::uint64_t>(*w));
  else
    report.add("width_gt", static_cast<std::uint64_t>(kmax));
  report.print();
  return kExitOk;
}

// --- extend ------------------------------------------------------------

int run_extend(const std::string& cnf_path, const std::string& family,
               const std::string& indices, int m, int jobs, Report& report) {
  LinCnf cnf = load_cnf(cnf_path, report);
  auto f = resolve_family(cnf, family, indices);
  ExtendLimits limits;
  limits.jobs = jobs;
  if (auto b = env_budget()) {
    limits.max_systems = *b;
    limits.search.node_budget = *b;
  }
  if (!family.empty()) report.add("family", family);
  report.add("f_clauses", static_cast<std::uint64_t>(f.size()));
  report.add("m", static_cast<std::uint64_t>(m));
  auto verdict = check_extensibility(cnf, f, m, limits);
  report.add("systems_checked", verdict.systems_checked);
  if (verdict.status == ExtendVerdict::Status::Budget) {
    report.add("budget_exceeded", true);
    report.print();
    return kExitUsage;
  }
  report.add("holds", verdict.holds());
  if (!verdict.holds()) {
    report.add("counterexample_system", describe_system(*verdict.counterexample_system));
    report.add("counterexample_clause",
               static_cast<std::uint64_t>(verdict.counterexample_clause + 1));
  }
  report.print();
  return verdict.holds() ? kExitOk : kExitFail;
}

// --- strategy ----------------------------------------------------------

int run_strategy_check(const std::string& cnf_path, const std::string& strategy_path, int k,
                       Report& report) {
  LinCnf cnf = load_cnf(cnf_path, report);
  StrategyFamily h = parse_xws(read_file(strategy_path), cnf.nvars());
  if (k <= 0) k = h.k;
  ExtendLimits limits;
  if (auto b = env_budget()) {
    limits.max_systems = *b;
    limits.search.node_budget = *b;
  }
  report.add("k", static_cast<std::uint64_t>(k));
  report.add("members", static_cast<std::uint64_t>(h.members.size()));
  auto verdict = check_winning_strategy(h, cnf, k, limits);
  report.add("ok", verdict.ok);
  if (!verdict.ok) {
    report.add("violated_property", static_cast<std::uint64_t>(verdict.violated_property));
    report.add("detail", verdict.detail);
    if (verdict.member) report.add("member", describe_system(*verdict.member));
    if (verdict.clause_index >= 0)
      report.add("clause", static_cast<std::uint64_t>(verdict.clause_index + 1));
    if (verdict.witness_system) report.add("witness", describe_system(*verdict.witness_system));
    if (verdict.witness_form) report.add("form", textio::write_form(*verdict.witness_form));
  }
  report.print();
  return verdict.ok ? kExitOk : kExitFail;
}

int run_strategy_build(const std::string& cnf_path, int k, const std::string& out,
                       Report& report) {
  LinCnf cnf = load_cnf(cnf_path, report);
  WidthLimits limits;
  if (auto b = env_budget()) limits.max_classes = *b;
  report.add("k", static_cast<std::uint64_t>(k));
  auto h = build_canonical_strategy(cnf, k, limits);
  if (!h) {
    report.add("none_exists", true);
    report.print();
    return kExitFail;
  }
  report.add("members", static_cast<std::uint64_t>(h->members.size()));
  if (!out.empty()) {
    write_file(out, write_xws(*h));
    report.add("out", out);
  }
  report.print();
  return kExitOk;
}

// --- game --------------------------------------------------------------

int run_game_cmd(const std::string& cnf_path, const std::string& family,
                 const std::string& indices, const std::string& prover_kind,
                 std::uint64_t seed, int rounds, const std::string& script_path,
                 const std::string& transcript_out, Report& report) {
  LinCnf cnf = load_cnf(cnf_path, report);
  auto f = resolve_family(cnf, family, indices);
  SearchLimits limits;
  if (auto b = env_budget()) limits.node_budget = *b;
  if (!family.empty()) report.add("family", family);
  report.add("prover", prover_kind);
  report.add("seed", seed);

  std::unique_ptr<Prover> prover;
  if (prover_kind == "random") {
    prover = std::make_unique<RandomProver>(seed);
  } else if (prover_kind == "sweep") {
    prover = std::make_unique<SweepProver>();
  } else if (prover_kind == "scripted") {
    if (script_path.empty()) throw std::runtime_error("--prover scripted requires --script");
    std::vector<std::string> lines;
    for (const auto l : textio::split_lines(read_file(script_path))) lines.emplace_back(l);
    prover = std::make_unique<ScriptedProver>(std::move(lines));
  } else {
    prover = std::make_unique<InteractiveProver>(std::cin, std::cout);
  }

  std::function<void(const RoundInfo&)> observer;
  if (prover_kind == "interactive") {
    observer = [](const RoundInfo& info) {
      std::cout << "round=" << info.round + 1 << " form=" << textio::write_form(info.form)
                << " answer="
                << (info.answer == Answer::Star ? "*" : info.answer == Answer::One ? "1" : "0")
                << " settled=" << (info.settled ? 1 : 0) << " coins=" << info.coins
                << " status=running\n";
    };
  }

  auto res = run_game(cnf, f, *prover, rounds, limits, observer);
  report.add("rounds", static_cast<std::uint64_t>(res.rounds));
  report.add("coins", static_cast<std::uint64_t>(res.coins));
  report.add("status", res.outcome == GameOutcome::Refuted ? std::string("falsified")
                                                           : std::string("timeout"));
  if (res.outcome == GameOutcome::Refuted)
    report.add("clause", static_cast<std::uint64_t>(res.falsified_clause + 1));
  if (!transcript_out.empty()) {
    write_file(transcript_out, write_transcript(res.transcript));
    report.add("transcript", transcript_out);
  }
  report.print();
  return res.outcome == GameOutcome::Refuted ? kExitOk : kExitFail;
}

// --- oracle ------------------------------------------------------------

int run_oracle_size(const std::string& cnf_path, std::uint64_t budget, const std::string& out,
                    Report& report) {
  LinCnf cnf = load_cnf(cnf_path, report);
  OracleLimits limits;
  if (budget) limits.memo_budget = budget;
  else if (auto b = env_budget()) limits.memo_budget = *b;
  report.add("budget", static_cast<std::uint64_t>(limits.memo_budget));
  auto res = min_split_tree(cnf, limits);
  report.add("optimal", res.optimal);
  report.add(res.optimal ? "size" : "upper_bound", static_cast<std::uint64_t>(res.size));
  report.add("subspaces", static_cast<std::uint64_t>(res.subspaces));
  if (!out.empty()) {
    write_file(out, write_split_tree(res.tree));
    report.add("out", out);
  }
  report.print();
  return res.optimal ? kExitOk : kExitUsage;
}

int run_oracle_to_proof(const std::string& cnf_path, const std::string& tree_path,
                        const std::string& out, Report& report) {
  LinCnf cnf = load_cnf(cnf_path, report);
  SplitTree tree = parse_split_tree(read_file(tree_path), cnf.nvars());
  TreeProof proof;
  try {
    proof = split_tree_to_proof(tree, cnf);
  } catch (const std::invalid_argument& e) {
    report.add("ok", false);
    report.add("diagnostic", e.what());
    report.print();
    return kExitFail;
  }
  auto check = verify_tree_proof(proof, cnf);
  report.add("ok", check.ok);
  report.add("nodes", static_cast<std::uint64_t>(proof.nodes.size()));
  report.add("width", static_cast<std::uint64_t>(check.width));
  if (!out.empty()) {
    write_file(out, write_xlp(proof));
    report.add("out", out);
  }
  report.print();
  return check.ok ? kExitOk : kExitFail;
}

// --- fmt ---------------------------------------------------------------

int run_fmt(const std::string& path, const std::string& cnf_path, const std::string& out,
            Report& report) {
  const std::string text = read_file(path);
  std::string kind, canonical;
  std::string first_line;
  for (const auto line : textio::split_lines(text)) {
    if (textio::is_blank(line) || textio::is_comment(line)) continue;
    first_line = std::string(line);
    break;
  }
  auto need_cnf = [&]() -> std::size_t {
    if (cnf_path.empty())
      throw std::runtime_error("--cnf is required to reformat proof or strategy files");
    return parse_xlcnf(read_file(cnf_path)).nvars();
  };
  if (first_line.rfind("p xlcnf", 0) == 0) {
    kind = "xlcnf";
    canonical = write_xlcnf(parse_xlcnf(text));
  } else if (first_line.rfind("p graph", 0) == 0) {
    kind = "graph";
    Graph g = parse_graph(text);
    canonical =
        "p graph " + std::to_string(g.nverts) + " " + std::to_string(g.edges.size()) + "\n";
    for (auto [u, v] : g.edges) canonical += std::to_string(u + 1) + " " + std::to_string(v + 1) + "\n";
  } else if (first_line.rfind("p bigraph", 0) == 0) {
    kind = "bigraph";
    BipartiteGraph g = parse_bigraph(text);
    canonical = "p bigraph " + std::to_string(g.nleft) + " " + std::to_string(g.nright) + " " +
                std::to_string(g.edges.size()) + "\n";
    for (auto [u, v] : g.edges) canonical += std::to_string(u + 1) + " " + std::to_string(v + 1) + "\n";
  } else if (first_line.rfind("p xlp", 0) == 0) {
    kind = "xlp";
    canonical = write_xlp(parse_xlp(text, need_cnf()));
  } else if (first_line.rfind("p xls", 0) == 0) {
    kind = "xls";
    canonical = write_xls(parse_xls(text, need_cnf()));
  } else if (first_line.rfind("p xws", 0) == 0) {
    kind = "xws";
    canonical = write_xws(parse_xws(text, need_cnf()));
  } else if (!first_line.empty() && first_line[0] == '(') {
    kind = "tree";
    canonical = write_split_tree(parse_split_tree(text, need_cnf()));
  } else {
    throw std::runtime_error("unrecognized file header");
  }
  report.add("kind", kind);
  report.add("valid", true);
  if (out.empty()) {
    report.print();
    std::cout << canonical;
  } else {
    write_file(out, canonical);
    report.add("out", out);
    report.print();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reslin: a workbench for resolution over F2-linear equations"};
  app.require_subcommand(1);

  Report report;
  {
    std::string echo;
    for (int i = 0; i < argc; ++i) {
      if (i) echo.push_back(' ');
      echo += argv[i];
    }
    report.add("command", echo);
  }

  // gen
  auto* gen = app.add_subcommand("gen", "generate a formula family");
  gen->require_subcommand(1);
  int pigeons = 0, holes = 0, gen_n = 0;
  std::string gen_out, gen_graph;
  auto* gen_php = gen->add_subcommand("php", "pigeonhole principle");
  gen_php->add_option("--pigeons", pigeons)->required();
  gen_php->add_option("--holes", holes)->required();
  auto* gen_ord = gen->add_subcommand("ordering", "ordering principle");
  gen_ord->add_option("--n", gen_n)->required();
  auto* gen_dlo = gen->add_subcommand("dlo", "dense linear ordering principle");
  gen_dlo->add_option("--n", gen_n)->required();
  auto* gen_gop = gen->add_subcommand("gop", "graph ordering principle");
  gen_gop->add_option("--graph", gen_graph)->required();
  auto* gen_fphp = gen->add_subcommand("fphp", "functional pigeonhole principle on a graph");
  gen_fphp->add_option("--graph", gen_graph)->required();
  for (auto* sc : {gen_php, gen_ord, gen_dlo, gen_gop, gen_fphp})
    sc->add_option("-o,--out", gen_out, "output file (stdout when omitted)");

  // verify
  auto* verify = app.add_subcommand("verify", "verify a tree proof or space script");
  std::string v_kind, v_cnf, v_proof;
  verify->add_option("kind", v_kind, "tree|space (sniffed from the file when omitted)")
      ->check(CLI::IsMember({"tree", "space"}));
  verify->add_option("-f,--formula", v_cnf)->required();
  verify->add_option("-p,--proof", v_proof)->required();

  // width
  auto* width = app.add_subcommand("width", "exact refutation width by saturation");
  std::string w_cnf;
  int w_kmax = 3;
  width->add_option("-f,--formula", w_cnf)->required();
  width->add_option("--kmax", w_kmax);

  // extend
  auto* extend = app.add_subcommand("extend", "check m-extensibility");
  std::string e_cnf, e_family, e_indices;
  int e_m = 1, e_jobs = 0;
  extend->add_option("-f,--formula", e_cnf)->required();
  extend->add_option("--family", e_family, "label of the clause subset F");
  extend->add_option("--indices", e_indices, "comma-separated 1-based clause indices for F");
  extend->add_option("--m", e_m)->required();
  extend->add_option("--jobs", e_jobs);

  // strategy
  auto* strategy = app.add_subcommand("strategy", "k-winning strategies");
  strategy->require_subcommand(1);
  std::string s_cnf, s_file, s_out;
  int s_k = 0;
  auto* s_check = strategy->add_subcommand("check", "check the four properties");
  s_check->add_option("-f,--formula", s_cnf)->required();
  s_check->add_option("-H,--strategy", s_file)->required();
  s_check->add_option("--k", s_k, "bound (defaults to the file header)");
  auto* s_build = strategy->add_subcommand("build", "build the canonical family");
  s_build->add_option("-f,--formula", s_cnf)->required();
  s_build->add_option("--k", s_k)->required();
  s_build->add_option("-o,--out", s_out);

  // game
  auto* game = app.add_subcommand("game", "run a Prover-Delayer game");
  std::string g_cnf, g_family, g_indices, g_prover = "random", g_script, g_transcript;
  std::uint64_t g_seed = 0;
  int g_rounds = -1;
  game->add_option("-f,--formula", g_cnf)->required();
  game->add_option("--family", g_family, "label of the clause subset F");
  game->add_option("--indices", g_indices);
  game->add_option("--prover", g_prover)
      ->check(CLI::IsMember({"random", "sweep", "scripted", "interactive"}));
  game->add_option("--seed", g_seed);
  game->add_option("--rounds", g_rounds);
  game->add_option("--script", g_script, "prover script (for --prover scripted)");
  game->add_option("--transcript-out", g_transcript);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact splitting-tree search");
  oracle->require_subcommand(1);
  std::string o_cnf, o_out, o_tree;
  std::uint64_t o_budget = 0;
  auto* o_size = oracle->add_subcommand("tree-size", "minimum splitting tree");
  o_size->add_option("-f,--formula", o_cnf)->required();
  o_size->add_option("--budget", o_budget, "memo entry budget");
  o_size->add_option("-o,--out", o_out, "write the optimal tree");
  auto* o_proof = oracle->add_subcommand("to-proof", "convert a tree to a proof");
  o_proof->add_option("-f,--formula", o_cnf)->required();
  o_proof->add_option("-t,--tree", o_tree)->required();
  o_proof->add_option("-o,--out", o_out, "write the proof");

  // fmt
  auto* fmt = app.add_subcommand("fmt", "validate and canonically reformat a file");
  std::string f_path, f_cnf, f_out;
  fmt->add_option("-f,--file", f_path)->required();
  fmt->add_option("--cnf", f_cnf, "formula supplying the variable count for proof files");
  fmt->add_option("-o,--out", f_out);

  int jobs_global = 1;
  app.add_option("--jobs", jobs_global, "worker threads for enumeration-heavy commands");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_php->parsed()) return run_gen("php", pigeons, holes, 0, "", gen_out, report);
    if (gen_ord->parsed()) return run_gen("ordering", 0, 0, gen_n, "", gen_out, report);
    if (gen_dlo->parsed()) return run_gen("dlo", 0, 0, gen_n, "", gen_out, report);
    if (gen_gop->parsed()) return run_gen("gop", 0, 0, 0, gen_graph, gen_out, report);
    if (gen_fphp->parsed()) return run_gen("fphp", 0, 0, 0, gen_graph, gen_out, report);
    if (verify->parsed()) return run_verify(v_cnf, v_proof, v_kind, report);
    if (width->parsed()) return run_width(w_cnf, w_kmax, report);
    if (extend->parsed())
      return run_extend(e_cnf, e_family, e_indices, e_m, e_jobs > 0 ? e_jobs : jobs_global,
                        report);
    if (s_check->parsed()) return run_strategy_check(s_cnf, s_file, s_k, report);
    if (s_build->parsed()) return run_strategy_build(s_cnf, s_k, s_out, report);
    if (game->parsed())
      return run_game_cmd(g_cnf, g_family, g_indices, g_prover, g_seed, g_rounds, g_script,
                          g_transcript, report);
    if (o_size->parsed()) return run_oracle_size(o_cnf, o_budget, o_out, report);
    if (o_proof->parsed()) return run_oracle_to_proof(o_cnf, o_tree, o_out, report);
    if (fmt->parsed()) return run_fmt(f_path, f_cnf, f_out, report);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
