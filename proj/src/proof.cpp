#include "qures/proof.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "qures/semantics.hpp"

namespace qures {

std::size_t ProofBuilder::axiom(Clause c) {
  ProofLine l;
  l.clause = std::move(c);
  proof_.lines.push_back(std::move(l));
  return proof_.size() - 1;
}

std::size_t ProofBuilder::resolve(std::size_t i, std::size_t j, Var pivot) {
  ProofLine l;
  l.clause = resolvent(clause(i), clause(j), pivot);
  l.rule = Rule::Resolve;
  l.left = i;
  l.right = j;
  l.pivot = pivot;
  proof_.lines.push_back(std::move(l));
  return proof_.size() - 1;
}

std::size_t ProofBuilder::forall_elim(std::size_t i, Literal lit) {
  if (!clause(i).contains(lit)) throw Error("literal to eliminate is not in the clause");
  ProofLine l;
  l.clause = clause(i).without(lit.var);
  l.rule = Rule::ForallElim;
  l.left = i;
  l.eliminated = lit;
  proof_.lines.push_back(std::move(l));
  return proof_.size() - 1;
}

std::size_t ProofBuilder::forall_reduce(std::size_t i, const QuantifierPrefix& prefix) {
  for (;;) {
    const Clause& c = clause(i);
    std::optional<Literal> pick;
    for (const auto& l : c.literals()) {
      if (prefix.quant(l.var) != Quant::Forall || !forall_elim_allowed(prefix, c, l)) continue;
      if (!pick || prefix.position(l.var) > prefix.position(pick->var)) pick = l;
    }
    if (!pick) return i;
    i = forall_elim(i, *pick);
  }
}

bool forall_elim_allowed(const QuantifierPrefix& prefix, const Clause& from, Literal lit) {
  if (!from.contains(lit) || !prefix.contains(lit.var) || prefix.quant(lit.var) != Quant::Forall) return false;
  std::size_t by = prefix.block(lit.var);
  for (const auto& l : from.literals())
    if (l.var != lit.var && (!prefix.contains(l.var) || prefix.block(l.var) > by)) return false;
  return true;
}

AxiomOracle AxiomOracle::explicit_set(std::vector<Clause> clauses) {
  AxiomOracle o;
  o.kind_ = Kind::ExplicitSet;
  o.set_.insert(clauses.begin(), clauses.end());
  o.members_ = std::move(clauses);
  return o;
}

AxiomOracle AxiomOracle::matrix_clauses(const Qbc& phi) {
  if (!phi.clauses) throw Error("matrix-clause oracle needs a clausal QBC");
  AxiomOracle o = explicit_set(*phi.clauses);
  o.kind_ = Kind::MatrixClauses;
  return o;
}

AxiomOracle AxiomOracle::relaxing(const Qbc& phi, unsigned level, std::size_t cap_vars) {
  AxiomOracle o;
  o.kind_ = Kind::RelaxingH;
  o.level_ = level;
  o.num_vars_ = phi.num_vars();
  o.relax_ = std::make_shared<AxiomSetOracle>(phi, cap_vars);
  return o;
}

bool AxiomOracle::contains(const Clause& c) {
  if (kind_ == Kind::RelaxingH) {
    for (const auto& l : c.literals())
      if (l.var >= num_vars_ || !relax_->qbc().prefix.contains(l.var)) return false;
    return relax_->in_H(c, level_);
  }
  return set_.count(c) > 0;
}

std::optional<Clause> AxiomOracle::member_falsified_by(const PartialAssignment& a) {
  if (kind_ == Kind::RelaxingH) {
    if (relax_->in_H(a, level_)) return to_clause(a);
    return std::nullopt;
  }
  for (const auto& c : members_) {
    bool falsified = true;
    for (const auto& l : c.literals())
      if (l.var >= a.num_vars() || !a.defined(l.var) || a.value(l.var) == l.positive) {
        falsified = false;
        break;
      }
    if (falsified) return c;
  }
  return std::nullopt;
}

std::size_t AxiomOracle::oracle_calls() const { return relax_ ? relax_->decide_calls() : 0; }

ProofReport check_proof(const Qbc& phi, const Proof& proof, AxiomOracle& oracle) {
  ProofReport r;
  r.size = proof.size();
  r.oracle_cost.assign(proof.size(), 0);
  auto fail = [&](std::size_t i, std::string why) {
    r.valid = false;
    r.error_line = i;
    r.error_reason = std::move(why);
    return r;
  };
  if (proof.lines.empty()) return fail(0, "proof is empty");
  const auto& prefix = phi.prefix;
  for (std::size_t i = 0; i < proof.size(); ++i) {
    const ProofLine& l = proof.lines[i];
    for (const auto& lit : l.clause.literals())
      if (!prefix.contains(lit.var)) return fail(i, "literal on unquantified variable " + phi.var_name(lit.var));
    switch (l.rule) {
      case Rule::Axiom: {
        std::size_t before = oracle.oracle_calls();
        bool ok = oracle.contains(l.clause);
        r.oracle_cost[i] = oracle.oracle_calls() - before;
        if (!ok) return fail(i, "clause is not an axiom");
        break;
      }
      case Rule::Resolve: {
        if (l.left >= i || l.right >= i) return fail(i, "premise does not precede the line");
        Clause res;
        try {
          res = resolvent(proof.lines[l.left].clause, proof.lines[l.right].clause, l.pivot);
        } catch (const Error& e) {
          return fail(i, e.what());
        }
        if (res != l.clause) return fail(i, "clause is not the resolvent of its premises");
        break;
      }
      case Rule::ForallElim: {
        if (l.left >= i) return fail(i, "premise does not precede the line");
        const Clause& from = proof.lines[l.left].clause;
        if (!from.contains(l.eliminated)) return fail(i, "eliminated literal is not in the premise");
        if (prefix.quant(l.eliminated.var) != Quant::Forall)
          return fail(i, "eliminated variable " + phi.var_name(l.eliminated.var) + " is not universal");
        if (!forall_elim_allowed(prefix, from, l.eliminated))
          return fail(i, "remaining variables do not all precede " + phi.var_name(l.eliminated.var));
        if (from.without(l.eliminated.var) != l.clause) return fail(i, "clause is not the premise minus the literal");
        break;
      }
    }
  }
  r.valid = true;
  r.falsity_proof = proof.lines.back().clause.empty();
  return r;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "accept";
    case Verdict::Reject: return "reject";
    case Verdict::OracleOverflow: return "oracle-overflow";
  }
  return "?";
}

Verdict relaxing_check(unsigned k, const Qbc& phi, const Proof& proof, std::size_t cap_vars, ProofReport* report) {
  AxiomOracle o = AxiomOracle::relaxing(phi, k + 2, cap_vars);
  try {
    ProofReport r = check_proof(phi, proof, o);
    bool ok = r.valid && r.falsity_proof;
    if (report) *report = std::move(r);
    return ok ? Verdict::Accept : Verdict::Reject;
  } catch (const ResourceError& e) {
    if (report) report->error_reason = e.what();
    return Verdict::OracleOverflow;
  }
}

std::vector<std::size_t> ProofDag::in_degree() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  for (const auto& n : nodes)
    for (std::size_t c : n.children) ++d[c];
  return d;
}

ProofDag build_graph(const Qbc& phi, const Proof& proof, AxiomOracle* oracle) {
  ProofDag g;
  for (std::size_t i = 0; i < proof.size(); ++i) {
    const ProofLine& l = proof.lines[i];
    DagNode n;
    n.label = to_assignment(l.clause, phi.num_vars());
    if (l.rule == Rule::Resolve) {
      if (l.left >= i || l.right >= i) throw Error("line " + std::to_string(i + 1) + " references a later line");
      n.children = {l.left, l.right};
    } else if (l.rule == Rule::ForallElim) {
      if (l.left >= i) throw Error("line " + std::to_string(i + 1) + " references a later line");
      n.children = {l.left};
    }
    g.nodes.push_back(std::move(n));
  }
  g.violations = check_graph(phi, g, oracle);
  return g;
}

std::vector<GraphViolation> check_graph(const Qbc& phi, const ProofDag& g, AxiomOracle* oracle) {
  std::vector<GraphViolation> out;
  const auto& prefix = phi.prefix;
  for (std::size_t u = 0; u < g.nodes.size(); ++u) {
    const DagNode& n = g.nodes[u];
    const auto& a = n.label;
    if (n.children.empty()) {
      if (oracle && !oracle->contains(to_clause(a))) out.push_back({u, "alpha", "sink label is not an axiom"});
    } else if (n.children.size() == 1) {
      const auto& b = g.nodes[n.children[0]].label;
      if (!b.extends(a)) {
        out.push_back({u, "beta", "child label does not extend the node label"});
        continue;
      }
      auto da = a.domain();
      std::vector<Var> extra;
      for (Var v : b.domain())
        if (!a.defined(v)) extra.push_back(v);
      if (extra.size() != 1) {
        out.push_back({u, "beta", "child label must add exactly one variable"});
        continue;
      }
      Var y = extra[0];
      if (!prefix.contains(y) || prefix.quant(y) != Quant::Forall) {
        out.push_back({u, "beta", "added variable is not universal"});
        continue;
      }
      if (!prefix.all_precede(da, y)) out.push_back({u, "beta", "label domain does not precede the added variable"});
    } else if (n.children.size() == 2) {
      const auto& a1 = g.nodes[n.children[0]].label;
      const auto& a2 = g.nodes[n.children[1]].label;
      std::optional<Var> pivot;
      for (Var v : a1.domain())
        if (a2.defined(v) && a1.value(v) != a2.value(v)) {
          pivot = v;
          break;
        }
      if (!pivot) {
        out.push_back({u, "gamma", "children labels have no clashing variable"});
        continue;
      }
      bool dom_ok = true;
      for (std::size_t v = 0; v < a.num_vars() && dom_ok; ++v) {
        bool in_union = (a1.defined(v) || a2.defined(v)) && v != *pivot;
        if (in_union != a.defined(v)) dom_ok = false;
      }
      if (!dom_ok) {
        out.push_back({u, "gamma", "label domain is not the children's union minus the pivot"});
        continue;
      }
      if (!a.agrees(a1) || !a.agrees(a2)) out.push_back({u, "gamma", "label disagrees with a child"});
    } else {
      out.push_back({u, "degree", "node has " + std::to_string(n.children.size()) + " out-edges"});
    }
  }
  return out;
}

Proof graph_to_proof(const Qbc& phi, const ProofDag& g) {
  auto violations = check_graph(phi, g);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw Error("node " + std::to_string(v.node) + " violates " + v.property + ": " + v.reason);
  }
  std::vector<std::size_t> line_of(g.nodes.size(), SIZE_MAX);
  std::vector<char> on_stack(g.nodes.size(), 0);
  Proof p;
  std::function<void(std::size_t)> emit = [&](std::size_t u) {
    if (line_of[u] != SIZE_MAX) return;
    if (on_stack[u]) throw Error("node " + std::to_string(u) + " lies on a cycle");
    on_stack[u] = 1;
    const DagNode& n = g.nodes[u];
    for (std::size_t c : n.children) {
      if (c >= g.nodes.size()) throw Error("node " + std::to_string(u) + " has a dangling edge");
      emit(c);
    }
    ProofLine l;
    l.clause = to_clause(n.label);
    if (n.children.size() == 1) {
      const auto& b = g.nodes[n.children[0]].label;
      Var y = 0;
      for (Var v : b.domain())
        if (!n.label.defined(v)) y = v;
      l.rule = Rule::ForallElim;
      l.left = line_of[n.children[0]];
      l.eliminated = Literal{y, !b.value(y)};
    } else if (n.children.size() == 2) {
      const auto& a1 = g.nodes[n.children[0]].label;
      const auto& a2 = g.nodes[n.children[1]].label;
      Var pv = 0;
      for (Var v : a1.domain())
        if (a2.defined(v) && a1.value(v) != a2.value(v)) pv = v;
      l.rule = Rule::Resolve;
      l.left = line_of[n.children[0]];
      l.right = line_of[n.children[1]];
      l.pivot = pv;
    }
    on_stack[u] = 0;
    line_of[u] = p.lines.size();
    p.lines.push_back(std::move(l));
  };
  for (std::size_t u = 0; u < g.nodes.size(); ++u) emit(u);
  return p;
}

ProofStats proof_stats(const Proof& proof) {
  ProofStats s;
  s.size = proof.size();
  std::vector<std::size_t> indeg(proof.size(), 0);
  for (const auto& l : proof.lines) {
    if (l.rule == Rule::Axiom) {
      ++s.sinks;
    } else {
      ++indeg[l.left];
      if (l.rule == Rule::Resolve) ++indeg[l.right];
    }
  }
  s.tree_like = std::all_of(indeg.begin(), indeg.end(), [](std::size_t d) { return d <= 1; });
  if (s.tree_like) {
    s.leaves = s.sinks;
    return s;
  }
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> leaves(proof.size(), 0);
  for (std::size_t i = 0; i < proof.size(); ++i) {
    const auto& l = proof.lines[i];
    if (l.rule == Rule::Axiom)
      leaves[i] = 1;
    else if (l.rule == Rule::ForallElim)
      leaves[i] = leaves[l.left];
    else
      leaves[i] = leaves[l.left] > kMax - leaves[l.right] ? kMax : leaves[l.left] + leaves[l.right];
  }
  s.leaves = proof.lines.empty() ? 0 : leaves.back();
  return s;
}

Proof prune_unreachable(const Proof& proof) {
  if (proof.lines.empty()) return proof;
  std::vector<char> keep(proof.size(), 0);
  keep.back() = 1;
  for (std::size_t i = proof.size(); i-- > 0;) {
    if (!keep[i]) continue;
    const auto& l = proof.lines[i];
    if (l.rule != Rule::Axiom) keep[l.left] = 1;
    if (l.rule == Rule::Resolve) keep[l.right] = 1;
  }
  std::vector<std::size_t> remap(proof.size(), 0);
  Proof out;
  for (std::size_t i = 0; i < proof.size(); ++i) {
    if (!keep[i]) continue;
    ProofLine l = proof.lines[i];
    l.left = remap[l.left];
    l.right = remap[l.right];
    remap[i] = out.lines.size();
    out.lines.push_back(std::move(l));
  }
  return out;
}

namespace {

struct Generator {
  const Qbc& phi;
  AxiomOracle& oracle;
  GameEvaluator& ev;
  ProofBuilder b;

  // Derives a subclause of clause(a); a covers every position < pos.
  std::size_t derive(std::size_t pos, PartialAssignment& a) {
    if (auto ax = oracle.member_falsified_by(a)) return b.axiom(*ax);
    const auto& prefix = phi.prefix;
    if (pos == prefix.size()) throw Error("oracle has no axiom falsified by a total falsifying assignment");
    Var v = prefix[pos].var;
    std::size_t line;
    if (prefix[pos].quant == Quant::Forall) {
      a.set(v, false);
      if (ev.value_from(pos + 1, a)) a.set(v, true);
      bool val = a.value(v);
      line = derive(pos + 1, a);
      Literal lit{v, !val};
      if (b.clause(line).contains(lit)) line = b.forall_elim(line, lit);
    } else {
      a.set(v, false);
      std::size_t l0 = derive(pos + 1, a);
      if (!b.clause(l0).literal_on(v)) {
        a.unset(v);
        return l0;
      }
      a.set(v, true);
      std::size_t l1 = derive(pos + 1, a);
      if (!b.clause(l1).literal_on(v))
        line = l1;
      else
        line = b.resolve(l0, l1, v);
    }
    a.unset(v);
    return line;
  }
};

}  // namespace

Proof generate_falsity_proof(const Qbc& phi, AxiomOracle& oracle, std::size_t cap_vars) {
  GameEvaluator ev(phi, cap_vars);
  if (ev.decide()) throw Error("QBC is true; it has no falsity proof");
  Generator gen{phi, oracle, ev, {}};
  PartialAssignment a(phi.num_vars());
  gen.derive(0, a);
  return prune_unreachable(gen.b.take());
}

}  // namespace qures
