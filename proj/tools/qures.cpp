#include <CLI11.hpp>

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "qures/error.hpp"
#include "qures/families.hpp"
#include "qures/game.hpp"
#include "qures/io.hpp"
#include "qures/relax.hpp"
#include "qures/search.hpp"
#include "qures/semantics.hpp"
#include "qures/stratex.hpp"

using namespace qures;

namespace {

constexpr int kOk = 0, kNegative = 1, kUsage = 2, kResource = 3;

struct Globals {
  std::string report;
  std::size_t cap_vars = kDefaultVarCap;
  std::uint64_t seed = 0;
};

struct Ctx {
  Globals g;
  Report rep{""};

  Qbc load(const std::string& path) {
    std::string text = read_file(path);
    rep.add_input(path, text);
    return parse_instance(text);
  }
  std::string load_text(const std::string& path) {
    std::string text = read_file(path);
    rep.add_input(path, text);
    return text;
  }
};

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_file(out_path, text);
}

PartialAssignment parse_clause_arg(const Qbc& phi, const std::string& s) {
  std::string t = s;
  for (char& ch : t)
    if (ch == ',') ch = ' ';
  std::istringstream in(t);
  std::vector<Literal> lits;
  for (long long v; in >> v;) {
    if (v == 0) break;
    long long a = v < 0 ? -v : v;
    if (static_cast<std::size_t>(a) > phi.num_vars()) throw Error("literal " + std::to_string(v) + " out of range");
    lits.push_back({static_cast<Var>(a - 1), v > 0});
  }
  if (!in.eof() && in.fail()) throw Error("cannot read clause '" + s + "'");
  return to_assignment(Clause::from_literals(std::move(lits)), phi.num_vars());
}

nlohmann::json assignment_json(const Qbc& phi, const PartialAssignment& a) {
  nlohmann::json j = nlohmann::json::object();
  for (Var v : a.domain()) j[phi.var_name(v)] = a.value(v) ? 1 : 0;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relaxing QU-resolution toolkit"};
  app.fallthrough();
  app.require_subcommand(1);
  Ctx ctx;
  app.add_option("--report", ctx.g.report, "Write a JSON report");
  app.add_option("--cap-vars", ctx.g.cap_vars, "Variable cap for exhaustive evaluation");
  app.add_option("--seed", ctx.g.seed, "Seed for randomized choices");

  std::function<int()> run;
  std::string command;
  auto bind = [&](CLI::App* sub, std::string name, std::function<int()> fn) {
    sub->callback([&, name, fn] {
      command = name;
      run = fn;
    });
  };

  // eval
  std::string file;
  auto* eval = app.add_subcommand("eval", "Decide a QBC");
  eval->add_option("file", file)->required();
  bind(eval, "eval", [&] {
    Qbc phi = ctx.load(file);
    bool v = decide(phi, ctx.g.cap_vars);
    ctx.rep.outcome()["value"] = v;
    std::cout << (v ? "true" : "false") << "\n";
    return v ? kOk : kNegative;
  });

  // strategy extract|verify
  auto* strategy = app.add_subcommand("strategy", "Winning strategies");
  strategy->require_subcommand(1);
  std::string out_path, strat_path;
  auto* sx = strategy->add_subcommand("extract", "Extract the winning side's strategy");
  sx->add_option("file", file)->required();
  sx->add_option("-o,--output", out_path);
  bind(sx, "strategy extract", [&] {
    Qbc phi = ctx.load(file);
    Strategy s = extract_strategy(phi, ctx.g.cap_vars);
    ctx.rep.outcome()["side"] = s.side == Quant::Forall ? "a" : "e";
    emit(out_path, write_strategy(phi, compile_strategy(phi, s)));
    return kOk;
  });
  auto* sv = strategy->add_subcommand("verify", "Check that a strategy wins");
  sv->add_option("file", file)->required();
  sv->add_option("--strategy", strat_path)->required();
  bind(sv, "strategy verify", [&] {
    Qbc phi = ctx.load(file);
    CircuitStrategy cs = parse_strategy(ctx.load_text(strat_path), phi);
    bool ok = verify_strategy(phi, tabulate(phi, cs), ctx.g.cap_vars);
    ctx.rep.outcome()["winning"] = ok;
    std::cout << (ok ? "winning" : "not winning") << "\n";
    return ok ? kOk : kNegative;
  });

  // relax in-h
  auto* relax = app.add_subcommand("relax", "Relaxations and H(Phi, Pi_k)");
  relax->require_subcommand(1);
  std::string clause_arg;
  unsigned k = 0;
  auto* inh = relax->add_subcommand("in-h", "Membership of a clause in H(Phi, Pi_K)");
  inh->add_option("file", file)->required();
  inh->add_option("--clause", clause_arg, "Literals, DIMACS numbering")->required();
  inh->add_option("-k", k, "Level K >= 2")->required()->check(CLI::Range(2u, 64u));
  bind(inh, "relax in-h", [&] {
    Qbc phi = ctx.load(file);
    PartialAssignment a = parse_clause_arg(phi, clause_arg);
    AxiomSetOracle o(phi, ctx.g.cap_vars);
    bool in = o.in_H(a, k);
    ctx.rep.parameters()["k"] = k;
    ctx.rep.parameters()["clause"] = format_clause(phi, to_clause(a));
    ctx.rep.outcome()["member"] = in;
    std::cout << (in ? "member" : "not a member") << "\n";
    return in ? kOk : kNegative;
  });

  // check
  std::string proof_path;
  bool tree_like = false, matrix = false;
  auto* check = app.add_subcommand("check", "Check a falsity proof from H(Phi, Pi_{k+2})");
  check->add_option("file", file)->required();
  check->add_option("--proof", proof_path)->required();
  check->add_option("-k", k)->required();
  check->add_flag("--tree-like", tree_like, "Also require a tree-like proof");
  check->add_flag("--matrix", matrix, "Use the matrix clauses as axioms instead");
  bind(check, "check", [&] {
    Qbc phi = ctx.load(file);
    Proof p = parse_proof(ctx.load_text(proof_path));
    ctx.rep.parameters()["k"] = k;
    ctx.rep.parameters()["tree_like"] = tree_like;
    ProofReport pr;
    Verdict v;
    if (matrix) {
      AxiomOracle o = AxiomOracle::matrix_clauses(phi);
      pr = check_proof(phi, p, o);
      v = pr.falsity_proof ? Verdict::Accept : Verdict::Reject;
    } else {
      v = relaxing_check(k, phi, p, ctx.g.cap_vars, &pr);
    }
    ProofStats st = proof_stats(p);
    if (v == Verdict::Accept && tree_like && !st.tree_like) {
      v = Verdict::Reject;
      pr.error_reason = "proof is not tree-like";
    }
    ctx.rep.outcome()["verdict"] = to_string(v);
    ctx.rep.outcome()["size"] = st.size;
    ctx.rep.outcome()["tree_like"] = st.tree_like;
    ctx.rep.outcome()["sinks"] = st.sinks;
    std::cout << to_string(v) << "\n";
    if (v != Verdict::Accept) {
      nlohmann::json c{{"reason", pr.error_reason}};
      if (pr.error_line) c["line"] = *pr.error_line + 1;
      ctx.rep.add_counterexample(c);
      std::cerr << (pr.error_line ? "line " + std::to_string(*pr.error_line + 1) + ": " : "") << pr.error_reason << "\n";
    }
    if (v == Verdict::OracleOverflow) return kResource;
    return v == Verdict::Accept ? kOk : kNegative;
  });

  // gen
  auto* gen = app.add_subcommand("gen", "Generate instances and proofs");
  gen->require_subcommand(1);
  unsigned n = 1, j = 0;
  std::string format;
  auto* gsep = gen->add_subcommand("separation", "Separation family");
  gsep->add_option("-n", n)->required()->check(CLI::Range(1u, 100000u));
  gsep->add_option("--format", format, "qdimacs (default) or qcl")->check(CLI::IsMember({"qdimacs", "qcl"}));
  gsep->add_option("-o,--output", out_path);
  bind(gsep, "gen separation", [&] {
    ctx.rep.parameters()["n"] = n;
    auto inst = gen_separation(n);
    emit(out_path, format == "qcl" ? write_qcl(inst.qbc) : write_qdimacs(inst.qbc));
    ctx.rep.outcome()["clauses"] = inst.qbc.clauses->size();
    return kOk;
  });
  auto* gmod = gen->add_subcommand("mod3", "Mod-3 family");
  gmod->add_option("-n", n)->required()->check(CLI::Range(1u, 100000u));
  gmod->add_option("-j", j)->check(CLI::Range(0u, 2u));
  gmod->add_option("-o,--output", out_path);
  bind(gmod, "gen mod3", [&] {
    ctx.rep.parameters()["n"] = n;
    ctx.rep.parameters()["j"] = j;
    auto inst = gen_mod3(n, j);
    emit(out_path, write_qcl(inst.qbc));
    ctx.rep.outcome()["gates"] = inst.qbc.matrix.size();
    return kOk;
  });
  auto* gproof = gen->add_subcommand("proof", "Generate proofs");
  gproof->require_subcommand(1);
  auto* gpsep = gproof->add_subcommand("separation", "Linear proof of the separation family");
  gpsep->add_option("-n", n)->required()->check(CLI::Range(1u, 100000u));
  gpsep->add_option("-o,--output", out_path);
  bind(gpsep, "gen proof separation", [&] {
    ctx.rep.parameters()["n"] = n;
    Proof p = gen_separation_proof(gen_separation(n));
    emit(out_path, write_proof(p));
    ctx.rep.outcome()["size"] = p.size();
    return kOk;
  });

  // game
  auto* game = app.add_subcommand("game", "Prover-delayer game on the separation family");
  game->require_subcommand(1);
  unsigned d = 2;
  auto* gcc = game->add_subcommand("check-conditions", "Check the delayer strategy conditions");
  gcc->add_option("-n", n)->required()->check(CLI::Range(1u, 1000u));
  gcc->add_option("-d", d)->required();
  gcc->add_option("-k", k, "Axioms from H(Phi, Pi_{k+2})");
  bind(gcc, "game check-conditions", [&] {
    ctx.rep.parameters()["n"] = n;
    ctx.rep.parameters()["d"] = d;
    ctx.rep.parameters()["k"] = k;
    auto inst = gen_separation(n);
    MaterializedStrategy ms(inst.qbc, delayer_strategy(inst, d));
    AxiomSetOracle o(inst.qbc, ctx.g.cap_vars);
    unsigned level = k + 2;
    auto rep = check_conditions(ms, [&](const PartialAssignment& a) { return o.in_H(a, level); });
    ctx.rep.outcome()["points"] = ms.points();
    ctx.rep.outcome()["members"] = ms.members().size();
    for (const auto& c : rep.conditions) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.checked << " checked)\n";
      ctx.rep.outcome()["conditions"][c.name] = c.passed;
      if (!c.passed) ctx.rep.add_counterexample({{"condition", c.name}, {"witness", c.counterexample}});
    }
    return rep.all_passed() ? kOk : kNegative;
  });
  auto* gal = game->add_subcommand("audit-leaves", "Leaf bound audit of a tree-like proof");
  gal->add_option("--proof", proof_path)->required();
  gal->add_option("-n", n)->required()->check(CLI::Range(1u, 1000u));
  gal->add_option("-d", d)->required();
  bind(gal, "game audit-leaves", [&] {
    ctx.rep.parameters()["n"] = n;
    ctx.rep.parameters()["d"] = d;
    auto inst = gen_separation(n);
    Proof p = parse_proof(ctx.load_text(proof_path));
    MaterializedStrategy ms(inst.qbc, delayer_strategy(inst, d));
    LeafAudit la = leaf_bound_audit(p, ms);
    ctx.rep.outcome()["leaves"] = la.leaves;
    ctx.rep.outcome()["bound"] = la.bound;
    ctx.rep.outcome()["bound_ok"] = la.bound_ok;
    ctx.rep.outcome()["witness_ok"] = la.witness_ok;
    std::cout << "leaves " << la.leaves << " bound " << la.bound << (la.bound_ok ? " ok" : " VIOLATED") << "\n";
    if (!la.witness_ok) {
      std::cout << "descent failed: " << la.witness_failure << "\n";
      ctx.rep.add_counterexample({{"descent", la.witness_failure}});
    }
    return la.bound_ok && la.witness_ok ? kOk : kNegative;
  });

  // search
  auto* search = app.add_subcommand("search", "Exhaustive proof search");
  search->require_subcommand(1);
  std::string mode = "dag";
  std::size_t cap = 20, node_limit = 50'000'000;
  auto* smp = search->add_subcommand("min-proof", "Minimum proof size from H(Phi, Pi_{k+2})");
  smp->add_option("file", file)->required();
  smp->add_option("-k", k)->required();
  smp->add_option("--mode", mode)->check(CLI::IsMember({"dag", "tree"}));
  smp->add_option("--cap", cap)->required();
  smp->add_option("--node-limit", node_limit);
  smp->add_option("-o,--output", out_path, "Write the proof found");
  bind(smp, "search min-proof", [&] {
    Qbc phi = ctx.load(file);
    SearchOptions opt;
    opt.mode = mode == "tree" ? SearchMode::Tree : SearchMode::Dag;
    opt.cap = cap;
    opt.seed = ctx.g.seed;
    opt.node_limit = node_limit;
    opt.cap_vars = ctx.g.cap_vars;
    ctx.rep.parameters()["k"] = k;
    ctx.rep.parameters()["mode"] = mode;
    ctx.rep.parameters()["cap"] = cap;
    ctx.rep.parameters()["seed"] = ctx.g.seed;
    SearchResult r = min_proof_size(phi, k, opt);
    ctx.rep.outcome()["expansions"] = r.expansions;
    if (!r.size) {
      ctx.rep.outcome()["size"] = nullptr;
      std::cout << "none within cap " << cap << "\n";
      return kNegative;
    }
    ctx.rep.outcome()["size"] = *r.size;
    std::cout << "size " << *r.size << "\n";
    if (!out_path.empty()) emit(out_path, write_proof(r.proof));
    return kOk;
  });

  // stratex
  auto* stratex = app.add_subcommand("stratex", "Circuit strategies against H(Phi, Pi_{k+2})");
  stratex->require_subcommand(1);
  auto* stv = stratex->add_subcommand("verify", "Verify a circuit universal strategy");
  stv->add_option("file", file)->required();
  stv->add_option("-k", k)->required();
  stv->add_option("--strategy", strat_path)->required();
  bind(stv, "stratex verify", [&] {
    Qbc phi = ctx.load(file);
    CircuitStrategy cs = parse_strategy(ctx.load_text(strat_path), phi);
    ctx.rep.parameters()["k"] = k;
    StratexReport sr;
    Verdict v = verify_stratex(k, phi, cs, ctx.g.cap_vars, &sr);
    ctx.rep.outcome()["verdict"] = to_string(v);
    ctx.rep.outcome()["assignments"] = sr.sigmas;
    if (sr.counterexample) ctx.rep.add_counterexample(assignment_json(phi, *sr.counterexample));
    std::cout << to_string(v) << "\n";
    if (sr.counterexample) std::cout << "no axiom below " << format_assignment(phi, *sr.counterexample) << "\n";
    return v == Verdict::Accept ? kOk : kNegative;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  ctx.rep = Report(command);
  auto t0 = std::chrono::steady_clock::now();
  int rc;
  try {
    rc = run();
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    ctx.rep.outcome()["error"] = e.what();
    rc = kResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    ctx.rep.outcome()["error"] = e.what();
    rc = kUsage;
  }
  ctx.rep.outcome()["exit_code"] = rc;
  ctx.rep.set_timing("total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  if (!ctx.g.report.empty()) {
    try {
      write_file(ctx.g.report, ctx.rep.dump());
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kUsage;
    }
  }
  return rc;
}
