#include "qures/game.hpp"

#include <algorithm>

namespace qures {

MaterializedStrategy::MaterializedStrategy(const Qbc& phi, const DelayerStrategy& strat, std::size_t cap)
    : phi_(&phi), points_(strat.points) {
  const auto vars = phi.prefix.vars();
  if (vars.size() > cap)
    throw ResourceError("materializing F over " + std::to_string(vars.size()) + " variables exceeds cap " +
                        std::to_string(cap));
  PartialAssignment f(phi.num_vars());
  // odometer over {unset, 0, 1}^N
  std::vector<int> digit(vars.size(), 0);
  for (;;) {
    ++scanned_;
    if (auto s = strat.score(f)) {
      members_.push_back(f);
      scores_.push_back(*s);
    }
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      if (digit[i] < 2) {
        ++digit[i];
        f.set(vars[i], digit[i] == 2);
        break;
      }
      digit[i] = 0;
      f.unset(vars[i]);
    }
    if (i == vars.size()) break;
  }
}

std::optional<std::size_t> MaterializedStrategy::best_semicompletion(const PartialAssignment& h,
                                                                     const std::function<bool(unsigned)>& accept) const {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (best && scores_[i] >= scores_[*best]) continue;
    if (accept && !accept(scores_[i])) continue;
    if (!is_semicompletion(phi_->prefix, h, members_[i])) continue;
    best = i;
  }
  return best;
}

std::optional<unsigned> MaterializedStrategy::min_semicompletion_score(const PartialAssignment& h) const {
  auto b = best_semicompletion(h);
  if (!b) return std::nullopt;
  return scores_[*b];
}

std::optional<std::size_t> MaterializedStrategy::find(const PartialAssignment& f) const {
  for (std::size_t i = 0; i < members_.size(); ++i)
    if (members_[i] == f) return i;
  return std::nullopt;
}

const std::vector<std::string>& condition_names() {
  static const std::vector<std::string> names = {"semicompletion-of-empty", "all-points", "monotonicity",
                                                 "forall-branching", "double-branching"};
  return names;
}

bool ConditionReport::all_passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const ConditionResult& c) { return c.passed; });
}

const ConditionResult& ConditionReport::get(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw Error("unknown condition " + name);
}

ConditionReport check_conditions(const MaterializedStrategy& strat, const AxiomMembership& in_h) {
  const Qbc& phi = strat.qbc();
  const auto& prefix = phi.prefix;
  const auto& F = strat.members();
  const auto& S = strat.scores();
  auto fmt = [&](const PartialAssignment& a) { return format_assignment(phi, a); };
  ConditionReport rep;
  for (const auto& n : condition_names()) rep.conditions.push_back({n, true, 0, ""});
  auto fail = [&](std::size_t c, std::string why) {
    if (!rep.conditions[c].passed) return;
    rep.conditions[c].passed = false;
    rep.conditions[c].counterexample = std::move(why);
  };

  {
    PartialAssignment empty(phi.num_vars());
    rep.conditions[0].checked = F.size();
    if (!strat.best_semicompletion(empty, [](unsigned s) { return s == 0; }))
      fail(0, "no member of F with score 0 is a semicompletion of {}");
  }

  for (std::size_t i = 0; i < F.size(); ++i) {
    ++rep.conditions[1].checked;
    if (S[i] < strat.points() && in_h(F[i]))
      fail(1, "f=" + fmt(F[i]) + " is in H with score " + std::to_string(S[i]) + " < " +
                  std::to_string(strat.points()));
  }

  for (std::size_t i = 0; i < F.size() && rep.conditions[2].passed; ++i) {
    auto dom = F[i].domain();
    if (dom.size() > 24) throw ResourceError("monotonicity check over 2^" + std::to_string(dom.size()) + " restrictions");
    for (std::uint32_t mask = 0; mask < (1u << dom.size()); ++mask) {
      PartialAssignment h(phi.num_vars());
      for (std::size_t b = 0; b < dom.size(); ++b)
        if (mask >> b & 1) h.set(dom[b], F[i].value(dom[b]));
      ++rep.conditions[2].checked;
      auto m = strat.min_semicompletion_score(h);
      if (!m || *m > S[i]) {
        fail(2, "g=" + fmt(F[i]) + " (score " + std::to_string(S[i]) + "), restriction " + fmt(h) +
                    (m ? " has best semicompletion score " + std::to_string(*m) : " has no semicompletion in F"));
        break;
      }
    }
  }

  for (std::size_t i = 0; i < F.size(); ++i) {
    auto dom = F[i].domain();
    for (const auto& e : prefix.entries()) {
      if (e.quant != Quant::Forall || F[i].defined(e.var) || !prefix.all_precede(dom, e.var)) continue;
      for (int b = 0; b < 2; ++b) {
        ++rep.conditions[3].checked;
        auto h = F[i].with(e.var, b == 1);
        unsigned want = S[i];
        if (!strat.best_semicompletion(h, [want](unsigned s) { return s == want; }))
          fail(3, "f=" + fmt(F[i]) + " (score " + std::to_string(S[i]) + "), " + phi.var_name(e.var) + "=" +
                      std::to_string(b) + " has no semicompletion of equal score");
      }
    }
  }

  for (std::size_t i = 0; i < F.size(); ++i) {
    for (const auto& e : prefix.entries()) {
      if (F[i].defined(e.var)) continue;
      ++rep.conditions[4].checked;
      std::optional<unsigned> m[2];
      for (int b = 0; b < 2; ++b) m[b] = strat.min_semicompletion_score(F[i].with(e.var, b == 1));
      unsigned s = S[i];
      bool ok = false;
      for (int b = 0; b < 2 && !ok; ++b) {
        if (!m[b]) continue;
        if (*m[b] <= s) ok = true;
        else if (*m[b] == s + 1 && m[1 - b] && *m[1 - b] <= s + 1) ok = true;
      }
      if (!ok)
        fail(4, "f=" + fmt(F[i]) + " (score " + std::to_string(s) + "), variable " + phi.var_name(e.var) +
                    " admits no branching value");
    }
  }
  return rep;
}

namespace {

PartialAssignment label_of(const Qbc& phi, const Proof& p, std::size_t line) {
  return to_assignment(p.lines[line].clause, phi.num_vars());
}

}  // namespace

LeafAudit leaf_bound_audit(const Proof& proof, const MaterializedStrategy& strat) {
  const Qbc& phi = strat.qbc();
  auto stats = proof_stats(proof);
  if (!stats.tree_like) throw Error("leaf audit needs a tree-like proof");
  if (proof.lines.empty()) throw Error("leaf audit needs a nonempty proof");
  LeafAudit a;
  a.leaves = proof_stats(prune_unreachable(proof)).sinks;
  unsigned p = strat.points();
  a.bound = p >= 63 ? SIZE_MAX : (std::size_t{1} << p);
  a.bound_ok = a.leaves >= a.bound;

  std::size_t u = proof.size() - 1;
  auto best = strat.best_semicompletion(label_of(phi, proof, u));
  if (!best) {
    a.witness_failure = "root label has no semicompletion in F";
    return a;
  }
  PartialAssignment f = strat.members()[*best];
  unsigned s = strat.scores()[*best];
  std::string how = "root";
  for (;;) {
    a.witness.push_back({u, f, s, how});
    if (s >= p) {
      a.witness_ok = true;
      return a;
    }
    const ProofLine& l = proof.lines[u];
    if (l.rule == Rule::Axiom) {
      a.witness_failure = "reached axiom line " + std::to_string(u + 1) + " with score " + std::to_string(s);
      return a;
    }
    std::size_t child;
    unsigned limit = s;
    if (l.rule == Rule::ForallElim) {
      child = l.left;
      how = "forall-branching on " + phi.var_name(l.eliminated.var);
    } else {
      Var x = l.pivot;
      auto a1 = label_of(phi, proof, l.left);
      auto a2 = label_of(phi, proof, l.right);
      auto child_with = [&](bool b) { return a1.value(x) == b ? l.left : l.right; };
      if (f.defined(x)) {
        child = child_with(f.value(x));
        how = "monotonicity on " + phi.var_name(x);
      } else {
        std::optional<unsigned> m[2];
        for (int b = 0; b < 2; ++b) m[b] = strat.min_semicompletion_score(f.with(x, b == 1));
        std::optional<int> pick;
        for (int b = 0; b < 2 && !pick; ++b)
          if (m[b] && *m[b] <= s) pick = b;
        for (int b = 0; b < 2 && !pick; ++b)
          if (m[b] && *m[b] == s + 1 && m[1 - b] && *m[1 - b] <= s + 1) pick = b;
        if (!pick) {
          a.witness_failure = "double-branching fails at line " + std::to_string(u + 1);
          return a;
        }
        child = child_with(*pick == 1);
        limit = s + 1;
        how = "double-branching on " + phi.var_name(x) + "=" + std::to_string(*pick);
        std::size_t other = child == l.left ? l.right : l.left;
        auto mo = strat.min_semicompletion_score(label_of(phi, proof, other));
        auto mc = strat.min_semicompletion_score(label_of(phi, proof, child));
        if (mc && *mc == s + 1 && (!mo || *mo > s + 1)) {
          a.witness_failure = "second child of line " + std::to_string(u + 1) + " lacks a cheap semicompletion";
          return a;
        }
      }
      (void)a2;
    }
    auto nb = strat.best_semicompletion(label_of(phi, proof, child));
    if (!nb || strat.scores()[*nb] > limit) {
      a.witness_failure = "child line " + std::to_string(child + 1) + " has no semicompletion within score " +
                          std::to_string(limit);
      return a;
    }
    u = child;
    f = strat.members()[*nb];
    s = strat.scores()[*nb];
  }
}

ProverMove RandomProver::next(const Qbc& phi, const PartialAssignment& current) {
  const auto& prefix = phi.prefix;
  auto dom = current.domain();
  std::vector<Var> unset, eligible;
  for (const auto& e : prefix.entries()) {
    if (current.defined(e.var)) continue;
    unset.push_back(e.var);
    if (e.quant == Quant::Forall && prefix.all_precede(dom, e.var)) eligible.push_back(e.var);
  }
  std::uniform_int_distribution<int> pct(0, 99);
  ProverMove m;
  int roll = pct(rng_);
  if (unset.empty() || (!dom.empty() && roll < 10)) {
    m.kind = ProverMove::Kind::Restrict;
    for (Var v : dom)
      if (pct(rng_) < 70) m.keep.push_back(v);
    return m;
  }
  if (!eligible.empty() && roll < 40) {
    m.kind = ProverMove::Kind::AssignForall;
    m.var = eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng_)];
    m.value = pct(rng_) < 50;
    return m;
  }
  m.kind = ProverMove::Kind::Select;
  m.var = unset[std::uniform_int_distribution<std::size_t>(0, unset.size() - 1)(rng_)];
  return m;
}

bool RandomProver::choose(const Qbc&, const PartialAssignment&, Var) {
  return std::uniform_int_distribution<int>(0, 1)(rng_) == 1;
}

GameTranscript play_game(const MaterializedStrategy& strat, const AxiomMembership& in_h, ProverPolicy& prover,
                         std::size_t max_rounds) {
  const Qbc& phi = strat.qbc();
  const auto& prefix = phi.prefix;
  GameTranscript t;
  PartialAssignment empty(phi.num_vars());
  auto start = strat.best_semicompletion(empty, [](unsigned s) { return s == 0; });
  if (!start) throw Error("semicompletion-of-empty: the strategy has no score-0 response to the empty assignment");
  PartialAssignment cur = strat.members()[*start];
  unsigned score = 0;
  t.start = cur;
  std::vector<Var> claimed;
  while (!in_h(cur) && t.rounds.size() < max_rounds) {
    GameRound r;
    r.move = prover.next(phi, cur);
    const auto& m = r.move;
    std::optional<std::size_t> resp;
    switch (m.kind) {
      case ProverMove::Kind::Restrict: {
        for (Var v : m.keep)
          if (v >= cur.num_vars() || !cur.defined(v))
            throw Error("restrict: variable " + phi.var_name(v) + " is not in the current domain");
        r.prover_result = cur.restricted(m.keep);
        unsigned lim = score;
        resp = strat.best_semicompletion(r.prover_result, [lim](unsigned s) { return s <= lim; });
        if (!resp) throw Error("monotonicity: no semicompletion for the restriction");
        break;
      }
      case ProverMove::Kind::AssignForall: {
        if (!prefix.contains(m.var) || prefix.quant(m.var) != Quant::Forall)
          throw Error("assign-forall: " + phi.var_name(m.var) + " is not universal");
        if (cur.defined(m.var)) throw Error("assign-forall: " + phi.var_name(m.var) + " is already set");
        if (!prefix.all_precede(cur.domain(), m.var))
          throw Error("assign-forall: the current domain does not precede " + phi.var_name(m.var));
        r.prover_result = cur.with(m.var, m.value);
        unsigned want = score;
        resp = strat.best_semicompletion(r.prover_result, [want](unsigned s) { return s == want; });
        if (!resp) throw Error("forall-branching: no semicompletion of equal score");
        break;
      }
      case ProverMove::Kind::Select: {
        if (!prefix.contains(m.var)) throw Error("select: " + phi.var_name(m.var) + " is not quantified");
        if (cur.defined(m.var)) throw Error("select: " + phi.var_name(m.var) + " is already set");
        std::optional<std::size_t> opt[2];
        for (int b = 0; b < 2; ++b) opt[b] = strat.best_semicompletion(cur.with(m.var, b == 1));
        std::optional<int> set_by_delayer;
        for (int b = 0; b < 2 && !set_by_delayer; ++b)
          if (opt[b] && strat.scores()[*opt[b]] <= score) set_by_delayer = b;
        bool value;
        if (set_by_delayer) {
          value = *set_by_delayer == 1;
        } else {
          value = prover.choose(phi, cur, m.var);
          r.choice_given = true;
          claimed.push_back(m.var);
        }
        r.prover_result = cur.with(m.var, value);
        resp = opt[value ? 1 : 0];
        if (!resp) throw Error("double-branching: no semicompletion after setting " + phi.var_name(m.var));
        break;
      }
    }
    r.response = strat.members()[*resp];
    if (!is_semicompletion(prefix, r.prover_result, r.response))
      throw Error("delayer response is not a semicompletion");
    score = strat.scores()[*resp];
    r.score = score;
    cur = r.response;
    t.rounds.push_back(std::move(r));
  }
  t.final_assignment = cur;
  t.reached_axiom = in_h(cur);
  t.points = score;
  for (Var v : claimed)
    if (cur.defined(v) && std::find(t.claimed_vars.begin(), t.claimed_vars.end(), v) == t.claimed_vars.end())
      t.claimed_vars.push_back(v);
  return t;
}

}  // namespace qures
