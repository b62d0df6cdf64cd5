#include "qures/core.hpp"

#include <algorithm>
#include <sstream>

namespace qures {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Clause Clause::from_literals(std::vector<Literal> lits) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t i = 1; i < lits.size(); ++i) {
    if (lits[i].var == lits[i - 1].var)
      throw Error("clause contains complementary literals on variable " + std::to_string(lits[i].var + 1));
  }
  Clause c;
  c.lits_ = std::move(lits);
  return c;
}

std::vector<Var> Clause::vars() const {
  std::vector<Var> out;
  out.reserve(lits_.size());
  for (const auto& l : lits_) out.push_back(l.var);
  return out;
}

std::optional<Literal> Clause::literal_on(Var v) const {
  auto it = std::lower_bound(lits_.begin(), lits_.end(), Literal{v, false});
  if (it != lits_.end() && it->var == v) return *it;
  return std::nullopt;
}

bool Clause::contains(Literal l) const { return std::binary_search(lits_.begin(), lits_.end(), l); }

Clause Clause::without(Var v) const {
  Clause c;
  for (const auto& l : lits_)
    if (l.var != v) c.lits_.push_back(l);
  return c;
}

bool Clause::subsumes(const Clause& other) const {
  return std::includes(other.lits_.begin(), other.lits_.end(), lits_.begin(), lits_.end());
}

std::size_t ClauseHash::operator()(const Clause& c) const noexcept {
  std::size_t h = c.size();
  for (const auto& l : c.literals()) h = mix(h, (static_cast<std::size_t>(l.var) << 1) | (l.positive ? 1 : 0));
  return h;
}

std::vector<Var> PartialAssignment::domain() const {
  std::vector<Var> out;
  for (std::size_t v = 0; v < values_.size(); ++v)
    if (values_[v] >= 0) out.push_back(static_cast<Var>(v));
  return out;
}

std::size_t PartialAssignment::domain_size() const {
  return static_cast<std::size_t>(std::count_if(values_.begin(), values_.end(), [](std::int8_t x) { return x >= 0; }));
}

PartialAssignment PartialAssignment::restricted(std::span<const Var> keep) const {
  PartialAssignment r(values_.size());
  for (Var v : keep)
    if (v < values_.size()) r.values_[v] = values_[v];
  return r;
}

bool PartialAssignment::extends(const PartialAssignment& other) const {
  for (std::size_t v = 0; v < other.values_.size(); ++v) {
    if (other.values_[v] < 0) continue;
    if (v >= values_.size() || values_[v] != other.values_[v]) return false;
  }
  return true;
}

bool PartialAssignment::agrees(const PartialAssignment& other) const {
  std::size_t n = std::min(values_.size(), other.values_.size());
  for (std::size_t v = 0; v < n; ++v)
    if (values_[v] >= 0 && other.values_[v] >= 0 && values_[v] != other.values_[v]) return false;
  return true;
}

std::size_t AssignmentHash::operator()(const PartialAssignment& a) const noexcept {
  std::size_t h = a.num_vars();
  for (auto x : a.values()) h = mix(h, static_cast<std::size_t>(x + 1));
  return h;
}

PartialAssignment to_assignment(const Clause& c, std::size_t num_vars) {
  PartialAssignment a(num_vars);
  for (const auto& l : c.literals()) {
    if (l.var >= num_vars) throw Error("clause variable " + std::to_string(l.var + 1) + " outside universe");
    a.set(l.var, !l.positive);
  }
  return a;
}

Clause to_clause(const PartialAssignment& f) {
  std::vector<Literal> lits;
  for (Var v : f.domain()) lits.push_back({v, !f.value(v)});
  return Clause::from_literals(std::move(lits));
}

Clause resolvent(const Clause& c1, const Clause& c2, Var v) {
  auto l1 = c1.literal_on(v);
  auto l2 = c2.literal_on(v);
  if (!l1 || !l2 || l1->positive == l2->positive)
    throw Error("variable " + std::to_string(v + 1) + " is not complementary across the premises");
  std::vector<Literal> lits;
  for (const auto& l : c1.literals())
    if (l.var != v) lits.push_back(l);
  for (const auto& l : c2.literals())
    if (l.var != v) lits.push_back(l);
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t i = 1; i < lits.size(); ++i)
    if (lits[i].var == lits[i - 1].var)
      throw Error("resolvent is tautological on variable " + std::to_string(lits[i].var + 1));
  return Clause::from_literals(std::move(lits));
}

QuantifierPrefix::QuantifierPrefix(std::size_t num_vars, std::vector<PrefixEntry> entries)
    : entries_(std::move(entries)), position_(num_vars, -1), block_(num_vars, 0) {
  std::size_t blk = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    Var v = entries_[i].var;
    if (v >= num_vars) throw Error("prefix variable " + std::to_string(v + 1) + " outside universe");
    if (position_[v] >= 0) throw Error("repeated variable " + std::to_string(v + 1) + " in prefix");
    if (i > 0 && entries_[i].quant != entries_[i - 1].quant) ++blk;
    position_[v] = static_cast<std::int32_t>(i);
    block_[v] = static_cast<std::uint32_t>(blk);
  }
  num_blocks_ = entries_.empty() ? 0 : blk + 1;
}

std::size_t QuantifierPrefix::position(Var v) const {
  if (!contains(v)) throw Error("variable " + std::to_string(v + 1) + " does not occur in the prefix");
  return static_cast<std::size_t>(position_[v]);
}

std::size_t QuantifierPrefix::block(Var v) const {
  if (!contains(v)) throw Error("variable " + std::to_string(v + 1) + " does not occur in the prefix");
  return block_[v];
}

Quant QuantifierPrefix::quant(Var v) const { return entries_[position(v)].quant; }

Order QuantifierPrefix::order(Var u, Var v) const {
  std::size_t bu = block(u), bv = block(v);
  if (bu == bv) return Order::SameBlock;
  return bu < bv ? Order::StrictlyBefore : Order::StrictlyAfter;
}

bool QuantifierPrefix::all_precede(std::span<const Var> us, Var v) const {
  std::size_t bv = block(v);
  return std::all_of(us.begin(), us.end(), [&](Var u) { return block(u) <= bv; });
}

std::vector<QuantifierBlock> QuantifierPrefix::blocks() const {
  std::vector<QuantifierBlock> out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i == 0 || entries_[i].quant != entries_[i - 1].quant) out.push_back({entries_[i].quant, {}});
    out.back().vars.push_back(entries_[i].var);
  }
  return out;
}

PrefixClass QuantifierPrefix::prefix_class() const {
  if (entries_.empty()) return {0, 0};
  auto b = static_cast<unsigned>(num_blocks_);
  if (entries_.front().quant == Quant::Forall) return {b, b + 1};
  return {b + 1, b};
}

std::optional<Var> QuantifierPrefix::last(std::span<const Var> vars) const {
  std::optional<Var> best;
  for (Var v : vars)
    if (!best || position(v) > position(*best)) best = v;
  return best;
}

std::vector<Var> QuantifierPrefix::vars() const {
  std::vector<Var> out;
  for (const auto& e : entries_) out.push_back(e.var);
  return out;
}

std::vector<Var> QuantifierPrefix::vars_of(Quant q) const {
  std::vector<Var> out;
  for (const auto& e : entries_)
    if (e.quant == q) out.push_back(e.var);
  return out;
}

GateId Circuit::push(Gate g) {
  for (GateId in : g.inputs)
    if (in >= gates_.size()) throw Error("gate input " + std::to_string(in) + " is not an earlier gate");
  gates_.push_back(std::move(g));
  return static_cast<GateId>(gates_.size() - 1);
}

GateId Circuit::add_const(bool b) {
  Gate g;
  g.kind = GateKind::Const;
  g.value = b;
  return push(std::move(g));
}

GateId Circuit::add_input(Var v) {
  Gate g;
  g.kind = GateKind::Input;
  g.var = v;
  return push(std::move(g));
}

GateId Circuit::add_and(std::vector<GateId> in) {
  if (in.empty()) throw Error("and gate needs at least one input");
  Gate g;
  g.kind = GateKind::And;
  g.inputs = std::move(in);
  return push(std::move(g));
}

GateId Circuit::add_or(std::vector<GateId> in) {
  if (in.empty()) throw Error("or gate needs at least one input");
  Gate g;
  g.kind = GateKind::Or;
  g.inputs = std::move(in);
  return push(std::move(g));
}

GateId Circuit::add_not(GateId in) {
  Gate g;
  g.kind = GateKind::Not;
  g.inputs = {in};
  return push(std::move(g));
}

void Circuit::set_output(GateId g) {
  if (g >= gates_.size()) throw Error("output gate " + std::to_string(g) + " does not exist");
  output_ = g;
}

GateId Circuit::output() const {
  if (!output_) throw Error("circuit has no output gate");
  return *output_;
}

bool Circuit::eval(const PartialAssignment& f) const {
  GateId out = output();
  std::vector<char> val(out + 1, 0);
  for (GateId i = 0; i <= out; ++i) {
    const Gate& g = gates_[i];
    switch (g.kind) {
      case GateKind::Const: val[i] = g.value; break;
      case GateKind::Input:
        if (g.var >= f.num_vars() || !f.defined(g.var))
          throw Error("assignment leaves variable " + std::to_string(g.var + 1) + " unset");
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
  return val[out];
}

std::vector<Var> Circuit::support_of(GateId g) const {
  std::vector<Var> out;
  for (GateId i : cone(g))
    if (gates_[i].kind == GateKind::Input) out.push_back(gates_[i].var);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Var> Circuit::support() const {
  if (!output_) return {};
  return support_of(*output_);
}

Circuit Circuit::substitute(const PartialAssignment& a) const {
  Circuit c = *this;
  for (auto& g : c.gates_) {
    if (g.kind == GateKind::Input && g.var < a.num_vars() && a.defined(g.var)) {
      g.kind = GateKind::Const;
      g.value = a.value(g.var);
      g.var = 0;
    }
  }
  return c;
}

std::vector<GateId> Circuit::conjuncts() const {
  std::vector<GateId> out;
  if (!output_) return out;
  std::vector<GateId> stack{*output_};
  while (!stack.empty()) {
    GateId g = stack.back();
    stack.pop_back();
    if (gates_[g].kind == GateKind::And) {
      for (auto it = gates_[g].inputs.rbegin(); it != gates_[g].inputs.rend(); ++it) stack.push_back(*it);
    } else {
      out.push_back(g);
    }
  }
  return out;
}

std::vector<GateId> Circuit::cone(GateId g) const {
  std::vector<char> mark(g + 1, 0);
  mark[g] = 1;
  for (GateId i = g + 1; i-- > 0;) {
    if (!mark[i]) continue;
    for (GateId in : gates_[i].inputs) mark[in] = 1;
  }
  std::vector<GateId> out;
  for (GateId i = 0; i <= g; ++i)
    if (mark[i]) out.push_back(i);
  return out;
}

std::string Qbc::var_name(Var v) const {
  if (v < names.size() && !names[v].empty()) return names[v];
  return "v" + std::to_string(v + 1);
}

std::optional<Var> Qbc::find_var(const std::string& name) const {
  for (std::size_t v = 0; v < num_vars(); ++v)
    if (var_name(static_cast<Var>(v)) == name) return static_cast<Var>(v);
  return std::nullopt;
}

void Qbc::validate() const {
  if (!matrix.has_output()) throw Error("matrix has no output gate");
  for (const auto& g : matrix.gates()) {
    if (g.kind != GateKind::Input) continue;
    if (!prefix.contains(g.var)) throw Error("matrix variable " + var_name(g.var) + " is not quantified");
  }
  if (clauses) {
    for (const auto& c : *clauses)
      for (const auto& l : c.literals())
        if (!prefix.contains(l.var)) throw Error("clause variable " + var_name(l.var) + " is not quantified");
  }
  if (!names.empty()) {
    std::vector<std::string> sorted;
    for (const auto& s : names)
      if (!s.empty()) sorted.push_back(s);
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) throw Error("duplicate variable name " + *dup);
  }
}

Qbc Qbc::clausal(QuantifierPrefix prefix, std::vector<Clause> clauses, std::vector<std::string> names) {
  Qbc q;
  Circuit& c = q.matrix;
  std::vector<std::optional<GateId>> pos(prefix.num_vars()), neg(prefix.num_vars());
  auto lit_gate = [&](Literal l) {
    auto& slot = pos[l.var];
    if (!slot) slot = c.add_input(l.var);
    if (l.positive) return *slot;
    auto& nslot = neg[l.var];
    if (!nslot) nslot = c.add_not(*slot);
    return *nslot;
  };
  std::vector<GateId> conj;
  for (const auto& cl : clauses) {
    if (cl.empty()) {
      conj.push_back(c.add_const(false));
      continue;
    }
    std::vector<GateId> in;
    for (const auto& l : cl.literals()) in.push_back(lit_gate(l));
    conj.push_back(c.add_or(std::move(in)));
  }
  c.set_output(conj.empty() ? c.add_const(true) : c.add_and(std::move(conj)));
  q.prefix = std::move(prefix);
  q.clauses = std::move(clauses);
  q.names = std::move(names);
  q.validate();
  return q;
}

QuantifierPrefix instantiate_prefix(const QuantifierPrefix& prefix, const PartialAssignment& a) {
  auto dom = a.domain();
  auto last = prefix.last(dom);
  std::vector<PrefixEntry> out;
  for (const auto& e : prefix.entries()) {
    if (e.var < a.num_vars() && a.defined(e.var)) continue;
    PrefixEntry ne = e;
    if (last && prefix.block(e.var) < prefix.block(*last)) ne.quant = Quant::Exists;
    out.push_back(ne);
  }
  return QuantifierPrefix(prefix.num_vars(), std::move(out));
}

Qbc instantiate(const Qbc& phi, const PartialAssignment& a) {
  Qbc r;
  r.prefix = instantiate_prefix(phi.prefix, a);
  r.matrix = phi.matrix.substitute(a);
  r.names = phi.names;
  if (phi.clauses) {
    std::vector<Clause> cls;
    for (const auto& c : *phi.clauses) {
      bool sat = false;
      std::vector<Literal> rest;
      for (const auto& l : c.literals()) {
        if (l.var < a.num_vars() && a.defined(l.var)) {
          if (a.value(l.var) == l.positive) sat = true;
        } else {
          rest.push_back(l);
        }
      }
      if (!sat) cls.push_back(Clause::from_literals(std::move(rest)));
    }
    r.clauses = std::move(cls);
  }
  return r;
}

bool is_semicompletion(const QuantifierPrefix& prefix, const PartialAssignment& f, const PartialAssignment& g) {
  if (!g.extends(f)) return false;
  // Blocks of the last defined variable of f and g; the prefix is scanned in
  // order, so the last hit is the largest block.
  std::size_t fmax = 0, gmax = 0;
  bool fany = false, gany = false;
  for (const auto& e : prefix.entries()) {
    if (f.defined(e.var)) fmax = prefix.block(e.var), fany = true;
    if (g.defined(e.var)) gmax = prefix.block(e.var), gany = true;
  }
  for (const auto& e : prefix.entries()) {
    if (e.quant != Quant::Forall || f.defined(e.var)) continue;
    std::size_t b = prefix.block(e.var);
    if (fany && fmax > b) continue;
    if (g.defined(e.var)) return false;
    if (gany && gmax > b) return false;
  }
  return true;
}

std::string format_assignment(const Qbc& phi, const PartialAssignment& a) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (Var v : a.domain()) {
    if (!first) os << ", ";
    first = false;
    os << phi.var_name(v) << '=' << (a.value(v) ? 1 : 0);
  }
  os << '}';
  return os.str();
}

std::string format_clause(const Qbc& phi, const Clause& c) {
  if (c.empty()) return "[]";
  std::ostringstream os;
  bool first = true;
  for (const auto& l : c.literals()) {
    if (!first) os << " | ";
    first = false;
    if (!l.positive) os << '~';
    os << phi.var_name(l.var);
  }
  return os.str();
}

}  // namespace qures
