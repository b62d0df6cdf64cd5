#include "qures/families.hpp"

#include <algorithm>

namespace qures {

Var SeparationInstance::x(unsigned i, unsigned j, unsigned k) const {
  if (i == 0) return 2 * j + k;
  return 4 + 9 * (i - 1) + 5 + 2 * j + k;
}

Var SeparationInstance::xp(unsigned i, unsigned j, unsigned k) const { return 4 + 9 * (i - 1) + 2 * j + k; }

Var SeparationInstance::y(unsigned i) const { return 4 + 9 * (i - 1) + 4; }

unsigned SeparationInstance::level_of(Var v) const { return v < 4 ? 0 : (v - 4) / 9 + 1; }

SeparationInstance gen_separation(unsigned n) {
  if (n < 1) throw Error("separation family needs n >= 1");
  SeparationInstance inst;
  inst.n = n;
  std::size_t nv = 4 + 9 * static_cast<std::size_t>(n);
  std::vector<std::string> names(nv);
  std::vector<PrefixEntry> entries;
  auto name3 = [](const char* p, unsigned i, unsigned j, unsigned k) {
    return std::string(p) + "_" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(k);
  };
  for (unsigned j = 0; j < 2; ++j)
    for (unsigned k = 0; k < 2; ++k) {
      entries.push_back({Quant::Exists, inst.x(0, j, k)});
      names[inst.x(0, j, k)] = name3("x", 0, j, k);
    }
  for (unsigned i = 1; i <= n; ++i) {
    for (unsigned j = 0; j < 2; ++j)
      for (unsigned k = 0; k < 2; ++k) {
        entries.push_back({Quant::Exists, inst.xp(i, j, k)});
        names[inst.xp(i, j, k)] = name3("xp", i, j, k);
      }
    entries.push_back({Quant::Forall, inst.y(i)});
    names[inst.y(i)] = "y_" + std::to_string(i);
    for (unsigned j = 0; j < 2; ++j)
      for (unsigned k = 0; k < 2; ++k) {
        entries.push_back({Quant::Exists, inst.x(i, j, k)});
        names[inst.x(i, j, k)] = name3("x", i, j, k);
      }
  }
  auto pos = [](Var v) { return Literal{v, true}; };
  auto neg = [](Var v) { return Literal{v, false}; };
  std::vector<Clause> cls;
  for (unsigned j = 0; j < 2; ++j)
    for (unsigned k = 0; k < 2; ++k) cls.push_back(Clause::from_literals({neg(inst.x(0, j, k))}));
  for (unsigned j = 0; j < 2; ++j) cls.push_back(Clause::from_literals({pos(inst.x(n, j, 0)), pos(inst.x(n, j, 1))}));
  for (unsigned i = 1; i <= n; ++i) {
    for (unsigned j = 0; j < 2; ++j)
      for (unsigned k = 0; k < 2; ++k)
        for (unsigned l = 0; l < 2; ++l)
          cls.push_back(Clause::from_literals(
              {neg(inst.xp(i, 0, k)), neg(inst.xp(i, 1, l)), pos(inst.x(i - 1, j, 0)), pos(inst.x(i - 1, j, 1))}));
    for (unsigned k = 0; k < 2; ++k)
      cls.push_back(Clause::from_literals({neg(inst.x(i, 0, k)), pos(inst.y(i)), pos(inst.xp(i, 0, k))}));
    for (unsigned k = 0; k < 2; ++k)
      cls.push_back(Clause::from_literals({neg(inst.x(i, 1, k)), neg(inst.y(i)), pos(inst.xp(i, 1, k))}));
  }
  std::size_t ncl = cls.size();
  inst.qbc = Qbc::clausal(QuantifierPrefix(nv, std::move(entries)), std::move(cls), std::move(names));
  inst.qbc.comments = {"family separation", "n " + std::to_string(n), "clauses " + std::to_string(ncl)};
  return inst;
}

Proof gen_separation_proof(const SeparationInstance& inst) {
  const unsigned n = inst.n;
  auto pos = [](Var v) { return Literal{v, true}; };
  auto neg = [](Var v) { return Literal{v, false}; };
  ProofBuilder b;
  // D[j] holds the line deriving x_{c,j,0} ∨ x_{c,j,1} for the current level c.
  std::size_t D[2];
  for (unsigned j = 0; j < 2; ++j)
    D[j] = b.axiom(Clause::from_literals({pos(inst.x(n, j, 0)), pos(inst.x(n, j, 1))}));
  for (unsigned i = n; i >= 1; --i) {
    Var y = inst.y(i);
    std::size_t E[2];
    for (unsigned j = 0; j < 2; ++j) {
      Literal ylit = j == 0 ? pos(y) : neg(y);
      std::size_t cur = D[j];
      for (unsigned k = 0; k < 2; ++k) {
        std::size_t t = b.axiom(Clause::from_literals({neg(inst.x(i, j, k)), ylit, pos(inst.xp(i, j, k))}));
        cur = b.resolve(cur, t, inst.x(i, j, k));
      }
      E[j] = b.forall_elim(cur, ylit);
    }
    std::size_t next[2];
    for (unsigned j = 0; j < 2; ++j) {
      std::size_t partial[2];
      for (unsigned k = 0; k < 2; ++k) {
        std::size_t cur = E[1];
        for (unsigned l = 0; l < 2; ++l) {
          std::size_t h = b.axiom(Clause::from_literals(
              {neg(inst.xp(i, 0, k)), neg(inst.xp(i, 1, l)), pos(inst.x(i - 1, j, 0)), pos(inst.x(i - 1, j, 1))}));
          cur = b.resolve(cur, h, inst.xp(i, 1, l));
        }
        partial[k] = cur;
      }
      std::size_t cur = E[0];
      for (unsigned k = 0; k < 2; ++k) cur = b.resolve(cur, partial[k], inst.xp(i, 0, k));
      next[j] = cur;
    }
    D[0] = next[0];
    D[1] = next[1];
  }
  std::size_t cur = D[0];
  for (unsigned k = 0; k < 2; ++k) {
    std::size_t u = b.axiom(Clause::from_literals({neg(inst.x(0, 0, k))}));
    cur = b.resolve(cur, u, inst.x(0, 0, k));
  }
  return b.take();
}

namespace {

int val(const PartialAssignment& f, Var v) { return f.raw(v); }

bool level_defined(const SeparationInstance& inst, const PartialAssignment& f, unsigned i) {
  if (!f.defined(inst.y(i))) return false;
  for (unsigned j = 0; j < 2; ++j)
    for (unsigned k = 0; k < 2; ++k)
      if (!f.defined(inst.x(i, j, k)) || !f.defined(inst.xp(i, j, k))) return false;
  return true;
}

bool x0_zero(const SeparationInstance& inst, const PartialAssignment& f) {
  for (unsigned j = 0; j < 2; ++j)
    for (unsigned k = 0; k < 2; ++k)
      if (val(f, inst.x(0, j, k)) != 0) return false;
  return true;
}

// Largest level carrying a defined ∃-variable (0 when there is none).
unsigned top_level(const SeparationInstance& inst, const PartialAssignment& f) {
  for (unsigned i = inst.n; i >= 1; --i)
    for (unsigned j = 0; j < 2; ++j)
      for (unsigned k = 0; k < 2; ++k)
        if (f.defined(inst.x(i, j, k)) || f.defined(inst.xp(i, j, k))) return i;
  return 0;
}

bool half_defined(const SeparationInstance& inst, const PartialAssignment& f, unsigned l) {
  int sum = 0;
  for (unsigned j = 0; j < 2; ++j)
    for (unsigned k = 0; k < 2; ++k) {
      if (f.defined(inst.x(l, j, k))) return false;
      if (!f.defined(inst.xp(l, j, k))) return false;
      sum += val(f, inst.xp(l, j, k));
    }
  return sum == 1;
}

}  // namespace

bool is_normal_realization(const SeparationInstance& inst, const PartialAssignment& f, unsigned i) {
  if (!level_defined(inst, f, i)) return false;
  unsigned b = f.value(inst.y(i)) ? 1 : 0;
  unsigned nb = 1 - b;
  for (unsigned k = 0; k < 2; ++k)
    if (val(f, inst.x(i, b, k)) != 0 || val(f, inst.xp(i, b, k)) != 0) return false;
  return val(f, inst.x(i, nb, 0)) == val(f, inst.xp(i, nb, 0)) && val(f, inst.x(i, nb, 1)) == val(f, inst.xp(i, nb, 1)) &&
         val(f, inst.x(i, nb, 0)) != val(f, inst.x(i, nb, 1));
}

bool is_funny_realization(const SeparationInstance& inst, const PartialAssignment& f, unsigned i) {
  if (!level_defined(inst, f, i)) return false;
  unsigned b = f.value(inst.y(i)) ? 1 : 0;
  unsigned nb = 1 - b;
  bool first = val(f, inst.x(i, b, 0)) == val(f, inst.xp(i, b, 0)) &&
               val(f, inst.x(i, b, 1)) == val(f, inst.xp(i, b, 1)) && val(f, inst.x(i, b, 0)) != val(f, inst.x(i, b, 1));
  bool second = val(f, inst.xp(i, nb, 0)) == 0 && val(f, inst.xp(i, nb, 1)) == 0;
  bool third = val(f, inst.x(i, nb, 0)) != val(f, inst.x(i, nb, 1));
  return first && second && third;
}

bool is_normal_assignment(const SeparationInstance& inst, const PartialAssignment& f, unsigned* score) {
  if (!x0_zero(inst, f)) return false;
  unsigned l = top_level(inst, f);
  for (unsigned i = 1; i + 1 <= l; ++i)
    if (!is_normal_realization(inst, f, i)) return false;
  if (l >= 1 && !is_normal_realization(inst, f, l) && !half_defined(inst, f, l)) return false;
  if (score) *score = l;
  return true;
}

bool is_funny_assignment(const SeparationInstance& inst, const PartialAssignment& f, unsigned* score) {
  if (!x0_zero(inst, f)) return false;
  unsigned l = top_level(inst, f);
  for (unsigned m = 1; m <= l; ++m) {
    bool ok = true;
    for (unsigned i = 1; i < m && ok; ++i) ok = is_normal_realization(inst, f, i);
    if (!ok || !is_funny_realization(inst, f, m)) continue;
    for (unsigned i = m + 1; i <= l && ok; ++i)
      for (unsigned j = 0; j < 2 && ok; ++j) {
        Var group[4] = {inst.x(i, j, 0), inst.xp(i, j, 0), inst.x(i, j, 1), inst.xp(i, j, 1)};
        bool any = std::any_of(group, group + 4, [&](Var v) { return f.defined(v); });
        if (!any) continue;
        bool all = std::all_of(group, group + 4, [&](Var v) { return f.defined(v); });
        ok = all && val(f, group[0]) == val(f, group[1]) && val(f, group[2]) == val(f, group[3]) &&
             val(f, group[0]) != val(f, group[2]);
      }
    if (ok) {
      if (score) *score = m;
      return true;
    }
  }
  return false;
}

AssignmentClass classify_assignment(const SeparationInstance& inst, const PartialAssignment& f) {
  unsigned s = 0;
  AssignmentClass c;
  bool normal = is_normal_assignment(inst, f, &s);
  if (normal) {
    c.kind = AssignmentClass::Kind::Normal;
    c.level = s;
  }
  if (is_funny_assignment(inst, f, &s)) {
    if (normal) throw Error("assignment classified as both normal and funny");
    c.kind = AssignmentClass::Kind::Funny;
    c.level = s;
  }
  return c;
}

unsigned separation_points(unsigned n, unsigned d) {
  long p = static_cast<long>(n) - static_cast<long>((d + 1) / 2) + 1;
  return p < 0 ? 0 : static_cast<unsigned>(p);
}

DelayerStrategy delayer_strategy(const SeparationInstance& inst, unsigned d) {
  DelayerStrategy s;
  s.points = separation_points(inst.n, d);
  s.score = [inst](const PartialAssignment& f) -> std::optional<unsigned> {
    auto c = classify_assignment(inst, f);
    if (c.kind == AssignmentClass::Kind::Neither) return std::nullopt;
    return c.score();
  };
  return s;
}

Mod3Instance gen_mod3(unsigned n, unsigned j) {
  if (n < 1) throw Error("mod-3 family needs n >= 1");
  if (j > 2) throw Error("mod-3 offset must be 0, 1 or 2");
  Mod3Instance inst;
  inst.n = n;
  inst.j = j;
  std::size_t nv = 2 * static_cast<std::size_t>(n);
  std::vector<std::string> names(nv);
  std::vector<PrefixEntry> entries;
  for (unsigned i = 1; i <= n; ++i) {
    entries.push_back({Quant::Exists, inst.x(i)});
    entries.push_back({Quant::Forall, inst.y(i)});
    names[inst.x(i)] = "x" + std::to_string(i);
    names[inst.y(i)] = "y" + std::to_string(i);
  }
  Circuit c;
  // one-hot state: state[r] is true iff the running sum is r mod 3
  GateId state[3];
  for (unsigned r = 0; r < 3; ++r) state[r] = c.add_const(r == j);
  for (Var v = 0; v < nv; ++v) {
    GateId in = c.add_input(v);
    GateId not_in = c.add_not(in);
    GateId next[3];
    for (unsigned r = 0; r < 3; ++r) {
      GateId stay = c.add_and({state[r], not_in});
      GateId step = c.add_and({state[(r + 2) % 3], in});
      next[r] = c.add_or({stay, step});
    }
    std::copy(next, next + 3, state);
  }
  c.set_output(c.add_not(state[n % 3]));
  inst.qbc.prefix = QuantifierPrefix(nv, std::move(entries));
  inst.qbc.matrix = std::move(c);
  inst.qbc.names = std::move(names);
  inst.qbc.comments = {"family mod3", "n " + std::to_string(n), "j " + std::to_string(j)};
  inst.qbc.validate();
  return inst;
}

bool mod3_predicate(unsigned n, unsigned j, const PartialAssignment& f) {
  unsigned sum = j;
  for (Var v = 0; v < 2 * n; ++v) {
    if (!f.defined(v)) throw Error("mod-3 predicate needs a total assignment");
    sum += f.value(v) ? 1 : 0;
  }
  return sum % 3 != n % 3;
}

Strategy mod3_forall_strategy(unsigned n) {
  if (n > kStrategyInputCap)
    throw ResourceError("mod-3 strategy table for y" + std::to_string(n) + " exceeds the input cap");
  Strategy s;
  s.side = Quant::Forall;
  for (unsigned i = 1; i <= n; ++i) {
    StrategyTable t;
    t.var = 2 * (i - 1) + 1;
    for (unsigned a = 1; a <= i; ++a) t.inputs.push_back(2 * (a - 1));
    t.values.resize(std::size_t{1} << i);
    for (std::size_t row = 0; row < t.values.size(); ++row) t.values[row] = ((row >> (i - 1)) & 1) ? 0 : 1;
    s.tables.push_back(std::move(t));
  }
  return s;
}

}  // namespace qures
