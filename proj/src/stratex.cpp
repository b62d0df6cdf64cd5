#include "qures/stratex.hpp"

#include <algorithm>

#include "qures/error.hpp"
#include "qures/relax.hpp"

namespace qures {

const StrategyCircuit* CircuitStrategy::part_for(Var y) const {
  for (const auto& p : parts)
    if (p.var == y) return &p;
  return nullptr;
}

void validate_strategy(const Qbc& phi, const CircuitStrategy& strat) {
  const auto& prefix = phi.prefix;
  for (const auto& p : strat.parts) {
    if (!prefix.contains(p.var) || prefix.quant(p.var) != strat.side)
      throw Error("strategy part for " + phi.var_name(p.var) + ", which belongs to the other side");
    if (std::count_if(strat.parts.begin(), strat.parts.end(), [&](const StrategyCircuit& q) { return q.var == p.var; }) > 1)
      throw Error("two strategy parts for " + phi.var_name(p.var));
    if (p.inputs != strategy_inputs(prefix, p.var))
      throw Error("inputs of C_" + phi.var_name(p.var) + " are not the opposing variables before it");
    if (!p.circuit.has_output()) throw Error("C_" + phi.var_name(p.var) + " has no output");
    for (Var v : p.circuit.support())
      if (std::find(p.inputs.begin(), p.inputs.end(), v) == p.inputs.end())
        throw Error("C_" + phi.var_name(p.var) + " reads " + phi.var_name(v) + ", which is not one of its inputs");
  }
  for (Var y : prefix.vars_of(strat.side))
    if (!strat.part_for(y)) throw Error("no strategy part for " + phi.var_name(y));
}

CircuitStrategy compile_strategy(const Qbc& phi, const Strategy& s) {
  CircuitStrategy out;
  out.side = s.side;
  for (Var y : phi.prefix.vars_of(s.side)) {
    const StrategyTable* t = s.table_for(y);
    if (!t) throw Error("no table for " + phi.var_name(y));
    StrategyCircuit p;
    p.var = y;
    p.inputs = t->inputs;
    Circuit& c = p.circuit;
    std::vector<GateId> in, neg;
    for (Var v : t->inputs) in.push_back(c.add_input(v));
    for (GateId g : in) neg.push_back(c.add_not(g));
    std::vector<GateId> terms;
    for (std::size_t row = 0; row < t->values.size(); ++row) {
      if (!t->values[row]) continue;
      if (in.empty()) {
        terms.push_back(c.add_const(true));
        continue;
      }
      std::vector<GateId> lits;
      for (std::size_t i = 0; i < in.size(); ++i) lits.push_back(row >> i & 1 ? in[i] : neg[i]);
      terms.push_back(c.add_and(std::move(lits)));
    }
    c.set_output(terms.empty() ? c.add_const(false) : c.add_or(std::move(terms)));
    out.parts.push_back(std::move(p));
  }
  return out;
}

Strategy tabulate(const Qbc& phi, const CircuitStrategy& strat) {
  validate_strategy(phi, strat);
  Strategy s;
  s.side = strat.side;
  for (Var y : phi.prefix.vars_of(strat.side)) {
    const StrategyCircuit& p = *strat.part_for(y);
    if (p.inputs.size() > kStrategyInputCap) throw ResourceError("C_" + phi.var_name(y) + " has too many inputs to tabulate");
    StrategyTable t;
    t.var = y;
    t.inputs = p.inputs;
    t.values.resize(std::size_t{1} << p.inputs.size());
    PartialAssignment f(phi.num_vars());
    for (std::size_t row = 0; row < t.values.size(); ++row) {
      for (std::size_t i = 0; i < p.inputs.size(); ++i) f.set(p.inputs[i], row >> i & 1);
      t.values[row] = p.circuit.eval(f);
    }
    s.tables.push_back(std::move(t));
  }
  return s;
}

CircuitStrategy mod3_circuit_strategy(unsigned n) {
  CircuitStrategy out;
  for (unsigned i = 1; i <= n; ++i) {
    StrategyCircuit p;
    p.var = 2 * (i - 1) + 1;
    GateId last = 0;
    for (unsigned j = 1; j <= i; ++j) {
      p.inputs.push_back(2 * (j - 1));
      last = p.circuit.add_input(2 * (j - 1));
    }
    p.circuit.set_output(p.circuit.add_not(last));
    out.parts.push_back(std::move(p));
  }
  return out;
}

CircuitStrategy constant_strategy(const Qbc& phi, bool value) {
  CircuitStrategy out;
  for (Var y : phi.prefix.vars_of(Quant::Forall)) {
    StrategyCircuit p;
    p.var = y;
    p.inputs = strategy_inputs(phi.prefix, y);
    for (Var v : p.inputs) p.circuit.add_input(v);
    p.circuit.set_output(p.circuit.add_const(value));
    out.parts.push_back(std::move(p));
  }
  return out;
}

PartialAssignment play(const Qbc& phi, const CircuitStrategy& strat, const PartialAssignment& opposing) {
  PartialAssignment out(phi.num_vars());
  for (const auto& e : phi.prefix.entries()) {
    if (e.quant != strat.side) {
      if (!opposing.defined(e.var)) throw Error("assignment leaves " + phi.var_name(e.var) + " unset");
      out.set(e.var, opposing.value(e.var));
    } else {
      const StrategyCircuit* p = strat.part_for(e.var);
      if (!p) throw Error("no strategy part for " + phi.var_name(e.var));
      out.set(e.var, p->circuit.eval(out));
    }
  }
  return out;
}

namespace {

PartialAssignment sigma_of(const std::vector<Var>& xs, std::size_t nv, std::uint64_t bits) {
  PartialAssignment s(nv);
  for (std::size_t i = 0; i < xs.size(); ++i) s.set(xs[i], bits >> i & 1);
  return s;
}

template <class Fn>
bool for_each_sub(const Qbc& phi, const PartialAssignment& full, Fn&& fn) {
  auto order = phi.prefix.vars();
  if (order.size() > 30) throw ResourceError("sub-assignment sweep over too many variables");
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << order.size()); ++mask) {
    PartialAssignment a(phi.num_vars());
    for (std::size_t i = 0; i < order.size(); ++i)
      if (mask >> i & 1) a.set(order[i], full.value(order[i]));
    if (fn(a)) return true;
  }
  return false;
}

}  // namespace

Verdict verify_stratex(unsigned k, const Qbc& phi, const CircuitStrategy& strat, std::size_t cap_vars,
                       StratexReport* report) {
  if (strat.side != Quant::Forall) throw Error("stratex verification takes a universal strategy");
  validate_strategy(phi, strat);
  auto xs = phi.prefix.vars_of(Quant::Exists);
  if (phi.prefix.vars().size() > cap_vars || xs.size() > 63)
    throw ResourceError("strategy verification needs at most " + std::to_string(cap_vars) + " variables");
  AxiomSetOracle oracle(phi, cap_vars);
  StratexReport local;
  StratexReport& rep = report ? *report : local;
  const unsigned level = k + 2;
  const auto order = phi.prefix.vars();
  auto query = [&](const PartialAssignment& a) {
    ++rep.in_h_queries;
    return oracle.in_H(a, level);
  };

  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << xs.size()); ++bits) {
    ++rep.sigmas;
    PartialAssignment full = play(phi, strat, sigma_of(xs, phi.num_vars(), bits));
    std::optional<PartialAssignment> hit;
    // prefixes of ⟨τ,σ⟩ in variable order, smallest first; the last one is the full clause
    PartialAssignment a(phi.num_vars());
    if (query(a)) hit = a;
    for (std::size_t i = 0; !hit && i < order.size(); ++i) {
      a.set(order[i], full.value(order[i]));
      if (query(a)) hit = a;
    }
    for (std::size_t i = 0; !hit && i < order.size(); ++i) {
      PartialAssignment b = full;
      b.unset(order[i]);
      if (query(b)) hit = b;
    }
    if (!hit) {
      ++rep.sweeps;
      for_each_sub(phi, full, [&](const PartialAssignment& s) {
        if (query(s)) hit = s;
        return hit.has_value();
      });
    }
    if (!hit) {
      rep.counterexample = full;
      return Verdict::Reject;
    }
    rep.witnesses.push_back(*hit);
  }
  return Verdict::Accept;
}

bool stratex_brute_force(unsigned k, const Qbc& phi, const CircuitStrategy& strat, std::size_t cap_vars) {
  if (strat.side != Quant::Forall) throw Error("stratex verification takes a universal strategy");
  validate_strategy(phi, strat);
  auto xs = phi.prefix.vars_of(Quant::Exists);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << xs.size()); ++bits) {
    PartialAssignment full = play(phi, strat, sigma_of(xs, phi.num_vars(), bits));
    bool hit = for_each_sub(phi, full, [&](const PartialAssignment& s) { return in_H_exhaustive(phi, s, k + 2, cap_vars); });
    if (!hit) return false;
  }
  return true;
}

}  // namespace qures
