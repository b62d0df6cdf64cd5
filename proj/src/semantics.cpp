#include "qures/semantics.hpp"

#include <algorithm>

namespace qures {

ConjunctIndex::ConjunctIndex(const Qbc& phi) : circuit_(&phi.matrix) {
  const auto& prefix = phi.prefix;
  std::size_t m = prefix.size();
  roots_ = phi.matrix.conjuncts();
  closing_.assign(m, {});
  in_support_.assign(phi.num_vars(), 0);
  std::vector<std::vector<std::size_t>> positions(roots_.size());
  for (std::size_t c = 0; c < roots_.size(); ++c) {
    cones_.push_back(phi.matrix.cone(roots_[c]));
    std::size_t last = 0;
    bool any = false;
    for (GateId g : cones_[c]) {
      const Gate& gate = phi.matrix.gate(g);
      if (gate.kind != GateKind::Input) continue;
      if (!prefix.contains(gate.var)) throw Error("matrix variable " + phi.var_name(gate.var) + " is not quantified");
      std::size_t p = prefix.position(gate.var);
      positions[c].push_back(p);
      in_support_[gate.var] = 1;
      last = any ? std::max(last, p) : p;
      any = true;
    }
    last_pos_.push_back(any ? last : 0);
    if (any)
      closing_[last].push_back(c);
    else
      initial_.push_back(c);
  }
  relevant_.assign(m + 1, {});
  for (std::size_t p = 0; p <= m; ++p) {
    std::vector<char> mark(m, 0);
    for (std::size_t c = 0; c < roots_.size(); ++c) {
      if (positions[c].empty() || last_pos_[c] < p) continue;
      for (std::size_t q : positions[c])
        if (q < p) mark[q] = 1;
    }
    for (std::size_t q = 0; q < p; ++q)
      if (mark[q]) relevant_[p].push_back(prefix[q].var);
  }
  scratch_.assign(phi.matrix.size(), 0);
}

bool ConjunctIndex::holds(std::size_t c, const PartialAssignment& f) const {
  auto& val = scratch_;
  for (GateId i : cones_[c]) {
    const Gate& g = circuit_->gate(i);
    switch (g.kind) {
      case GateKind::Const: val[i] = g.value; break;
      case GateKind::Input:
        if (!f.defined(g.var)) throw Error("assignment leaves variable " + std::to_string(g.var + 1) + " unset");
        val[i] = f.value(g.var);
        break;
      case GateKind::And: {
        char r = 1;
        for (GateId in : g.inputs) r &= val[in];
        val[i] = r;
        break;
      }
      case GateKind::Or: {
        char r = 0;
        for (GateId in : g.inputs) r |= val[in];
        val[i] = r;
        break;
      }
      case GateKind::Not: val[i] = !val[g.inputs[0]]; break;
    }
  }
  return val[roots_[c]];
}

GameEvaluator::GameEvaluator(const Qbc& phi, std::size_t cap_vars) : phi_(&phi), index_(phi) {
  if (phi.prefix.size() > cap_vars || phi.prefix.size() > 63)
    throw ResourceError("QBC has " + std::to_string(phi.prefix.size()) + " quantified variables, cap is " +
                        std::to_string(std::min<std::size_t>(cap_vars, 63)));
  memo_.resize(phi.prefix.size() + 1);
}

std::size_t GameEvaluator::memo_entries() const {
  std::size_t n = 0;
  for (const auto& m : memo_) n += m.size();
  return n;
}

bool GameEvaluator::closes_ok(std::size_t pos, const PartialAssignment& cur) const {
  for (std::size_t c : index_.closed_initially())
    if (!index_.holds(c, cur)) return false;
  for (std::size_t p = 0; p < pos; ++p)
    for (std::size_t c : index_.closing_at(p))
      if (!index_.holds(c, cur)) return false;
  return true;
}

bool GameEvaluator::decide() {
  PartialAssignment cur(phi_->num_vars());
  return value_from(0, cur);
}

bool GameEvaluator::value_from(std::size_t pos, PartialAssignment& current) {
  if (!closes_ok(pos, current)) return false;
  return rec(pos, current);
}

bool GameEvaluator::rec(std::size_t pos, PartialAssignment& cur) {
  const auto& prefix = phi_->prefix;
  std::size_t m = prefix.size();
  while (pos < m && !index_.in_support(prefix[pos].var)) ++pos;
  if (pos == m) return true;

  std::uint64_t key = 0;
  const auto& rel = index_.relevant_before(pos);
  for (std::size_t i = 0; i < rel.size(); ++i)
    if (cur.value(rel[i])) key |= std::uint64_t{1} << i;
  auto& memo = memo_[pos];
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  Var v = prefix[pos].var;
  bool exists = prefix[pos].quant == Quant::Exists;
  bool result = !exists;
  for (int b = 0; b < 2; ++b) {
    cur.set(v, b == 1);
    bool ok = true;
    for (std::size_t c : index_.closing_at(pos))
      if (!index_.holds(c, cur)) {
        ok = false;
        break;
      }
    bool val = ok && rec(pos + 1, cur);
    if (val == exists) {
      result = exists;
      break;
    }
  }
  cur.unset(v);
  memo.emplace(key, result);
  return result;
}

bool decide(const Qbc& phi, std::size_t cap_vars) {
  GameEvaluator ev(phi, cap_vars);
  return ev.decide();
}

bool StrategyTable::lookup(const PartialAssignment& f) const {
  std::size_t row = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!f.defined(inputs[i]))
      throw Error("strategy input variable " + std::to_string(inputs[i] + 1) + " is unset");
    if (f.value(inputs[i])) row |= std::size_t{1} << i;
  }
  return values[row] != 0;
}

const StrategyTable* Strategy::table_for(Var v) const {
  for (const auto& t : tables)
    if (t.var == v) return &t;
  return nullptr;
}

std::vector<Var> strategy_inputs(const QuantifierPrefix& prefix, Var v) {
  std::vector<Var> out;
  Quant q = prefix.quant(v);
  std::size_t pv = prefix.position(v);
  for (std::size_t i = 0; i < pv; ++i)
    if (prefix[i].quant != q) out.push_back(prefix[i].var);
  return out;
}

namespace {

struct Extractor {
  const Qbc& phi;
  GameEvaluator& ev;
  Quant side;
  std::vector<StrategyTable>& tables;
  std::vector<std::size_t> table_of;  // by prefix position

  void walk(std::size_t pos, PartialAssignment& cur) {
    const auto& prefix = phi.prefix;
    if (pos == prefix.size()) return;
    Var v = prefix[pos].var;
    if (prefix[pos].quant == side) {
      // winning for `side` means true for ∃, false for ∀
      bool want = side == Quant::Exists;
      cur.set(v, false);
      bool choice = false;
      if (ev.value_from(pos + 1, cur) != want) {
        cur.set(v, true);
        choice = true;
      }
      auto& t = tables[table_of[pos]];
      std::size_t row = 0;
      for (std::size_t i = 0; i < t.inputs.size(); ++i)
        if (cur.value(t.inputs[i])) row |= std::size_t{1} << i;
      t.values[row] = choice ? 1 : 0;
      walk(pos + 1, cur);
    } else {
      for (int b = 0; b < 2; ++b) {
        cur.set(v, b == 1);
        walk(pos + 1, cur);
      }
    }
    cur.unset(v);
  }
};

}  // namespace

Strategy extract_strategy(const Qbc& phi, std::size_t cap_vars) {
  GameEvaluator ev(phi, cap_vars);
  Strategy s;
  s.side = ev.decide() ? Quant::Exists : Quant::Forall;
  const auto& prefix = phi.prefix;
  std::vector<std::size_t> table_of(prefix.size(), 0);
  for (std::size_t p = 0; p < prefix.size(); ++p) {
    if (prefix[p].quant != s.side) continue;
    StrategyTable t;
    t.var = prefix[p].var;
    t.inputs = strategy_inputs(prefix, t.var);
    if (t.inputs.size() > kStrategyInputCap)
      throw ResourceError("strategy table for " + phi.var_name(t.var) + " has " + std::to_string(t.inputs.size()) +
                          " inputs, cap is " + std::to_string(kStrategyInputCap));
    t.values.assign(std::size_t{1} << t.inputs.size(), 0);
    table_of[p] = s.tables.size();
    s.tables.push_back(std::move(t));
  }
  Extractor ex{phi, ev, s.side, s.tables, table_of};
  PartialAssignment cur(phi.num_vars());
  ex.walk(0, cur);
  return s;
}

PartialAssignment play(const Qbc& phi, const Strategy& s, const PartialAssignment& opposing) {
  const auto& prefix = phi.prefix;
  for (Var v = 0; v < opposing.num_vars(); ++v) {
    if (!opposing.defined(v)) continue;
    if (!prefix.contains(v) || prefix.quant(v) == s.side)
      throw Error("opposing assignment sets " + phi.var_name(v) + ", which is not an opposing variable");
  }
  PartialAssignment out(phi.num_vars());
  for (const auto& e : prefix.entries()) {
    if (e.quant == s.side) {
      const StrategyTable* t = s.table_for(e.var);
      if (!t) throw Error("strategy has no table for " + phi.var_name(e.var));
      out.set(e.var, t->lookup(out));
    } else {
      if (e.var >= opposing.num_vars() || !opposing.defined(e.var))
        throw Error("opposing assignment leaves " + phi.var_name(e.var) + " unset");
      out.set(e.var, opposing.value(e.var));
    }
  }
  return out;
}

namespace {

struct Verifier {
  const Qbc& phi;
  const Strategy& s;
  const ConjunctIndex& idx;
  std::vector<const StrategyTable*> table_at;

  // true iff every continuation is won by the strategy side
  bool walk(std::size_t pos, PartialAssignment& cur) {
    const auto& prefix = phi.prefix;
    bool exists = s.side == Quant::Exists;
    if (pos == prefix.size()) return exists;
    Var v = prefix[pos].var;
    bool ok = true;
    if (prefix[pos].quant == s.side) {
      cur.set(v, table_at[pos]->lookup(cur));
      ok = step(pos, cur);
    } else {
      for (int b = 0; b < 2 && ok; ++b) {
        cur.set(v, b == 1);
        ok = step(pos, cur);
      }
    }
    cur.unset(v);
    return ok;
  }

  bool step(std::size_t pos, PartialAssignment& cur) {
    for (std::size_t c : idx.closing_at(pos))
      if (!idx.holds(c, cur)) return s.side == Quant::Forall;
    return walk(pos + 1, cur);
  }
};

}  // namespace

bool verify_strategy(const Qbc& phi, const Strategy& s, std::size_t cap_vars) {
  const auto& prefix = phi.prefix;
  std::size_t opposing = 0;
  for (const auto& e : prefix.entries())
    if (e.quant != s.side) ++opposing;
  if (opposing > cap_vars)
    throw ResourceError("strategy verification over " + std::to_string(opposing) + " opposing variables exceeds cap " +
                        std::to_string(cap_vars));
  ConjunctIndex idx(phi);
  std::vector<const StrategyTable*> table_at(prefix.size(), nullptr);
  for (std::size_t p = 0; p < prefix.size(); ++p) {
    if (prefix[p].quant != s.side) continue;
    table_at[p] = s.table_for(prefix[p].var);
    if (!table_at[p]) throw Error("strategy has no table for " + phi.var_name(prefix[p].var));
    auto expect = strategy_inputs(prefix, prefix[p].var);
    std::vector<Var> got = table_at[p]->inputs;
    std::sort(expect.begin(), expect.end());
    std::sort(got.begin(), got.end());
    if (got != expect) throw Error("strategy table for " + phi.var_name(prefix[p].var) + " has the wrong inputs");
    if (table_at[p]->values.size() != (std::size_t{1} << table_at[p]->inputs.size()))
      throw Error("strategy table for " + phi.var_name(prefix[p].var) + " is incomplete");
  }
  for (std::size_t c : idx.closed_initially()) {
    PartialAssignment empty(phi.num_vars());
    if (!idx.holds(c, empty)) return s.side == Quant::Forall;
  }
  Verifier v{phi, s, idx, table_at};
  PartialAssignment cur(phi.num_vars());
  return v.walk(0, cur);
}

}  // namespace qures
