#include "qures/search.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_map>

#include "qures/relax.hpp"

namespace qures {

namespace {

std::uint64_t pack(const PartialAssignment& a) {
  std::uint64_t key = 0;
  for (std::size_t v = 0; v < a.num_vars(); ++v)
    if (a.defined(static_cast<Var>(v))) key |= std::uint64_t{a.value(static_cast<Var>(v)) ? 3u : 1u} << (2 * v);
  return key;
}

bool is_sub(const PartialAssignment& small, const PartialAssignment& big) { return big.extends(small); }

// Minimum tree size T'(a) of a derivation of some subclause of clause(a).
class TreeSearch {
 public:
  TreeSearch(const Qbc& phi, AxiomOracle& oracle, const SearchOptions& opt)
      : phi_(phi), oracle_(oracle), opt_(opt), vars_(phi.prefix.vars()) {
    if (phi.num_vars() > 32) throw ResourceError("tree search packs assignments into 64 bits (at most 32 variables)");
    std::mt19937_64 rng(opt.seed);
    if (opt.seed != 0) std::shuffle(vars_.begin(), vars_.end(), rng);
  }

  std::optional<std::size_t> run(std::size_t cap) {
    PartialAssignment empty(phi_.num_vars());
    for (std::size_t b = 1; b <= cap; ++b)
      if (auto r = solve(empty, b)) return r;
    return std::nullopt;
  }

  Proof build() {
    ProofBuilder b;
    PartialAssignment empty(phi_.num_vars());
    emit(b, empty);
    return b.take();
  }

  std::size_t expansions = 0;
  std::size_t queries = 0;

 private:
  enum class Kind { None, Axiom, Forall, Resolve };
  struct Entry {
    std::size_t failed = 0;  // T'(a) > failed
    std::optional<std::size_t> exact;
    Kind kind = Kind::None;
    Var var = 0;
    bool value = false;
    PartialAssignment child;  // Forall
  };

  std::optional<Clause> covered(const PartialAssignment& a) {
    std::uint64_t key = pack(a);
    if (auto it = cover_.find(key); it != cover_.end()) return it->second;
    std::optional<Clause> r;
    if (oracle_.kind() != AxiomOracle::Kind::RelaxingH) {
      r = oracle_.member_falsified_by(a);
    } else {
      ++queries;
      if (oracle_.contains(to_clause(a))) {
        r = to_clause(a);
      } else {
        for (Var v : a.domain()) {
          PartialAssignment sub = a;
          sub.unset(v);
          if ((r = covered(sub))) break;
        }
      }
    }
    cover_.emplace(key, r);
    return r;
  }

  std::optional<std::size_t> solve(const PartialAssignment& a, std::size_t budget) {
    if (budget == 0) return std::nullopt;
    std::uint64_t key = pack(a);
    {
      Entry& e = memo_[key];
      if (e.exact) return *e.exact <= budget ? e.exact : std::nullopt;
      if (budget <= e.failed) return std::nullopt;
    }
    if (++expansions > opt_.node_limit) throw ResourceError("tree search exceeded its node limit");
    if (covered(a)) {
      Entry& e = memo_[key];
      e.exact = 1;
      e.kind = Kind::Axiom;
      return e.exact;
    }
    const auto& prefix = phi_.prefix;
    std::optional<std::size_t> best;
    Entry pick;
    std::size_t bound = budget;
    for (Var y : vars_) {
      if (prefix.quant(y) != Quant::Forall || bound < 2) continue;
      std::size_t by = prefix.block(y);
      PartialAssignment r(phi_.num_vars());
      for (Var v : a.domain())
        if (v != y && prefix.block(v) <= by) r.set(v, a.value(v));
      for (int b = 0; b < 2 && bound >= 2; ++b) {
        if (a.defined(y) && a.value(y) == (b == 1)) continue;
        PartialAssignment child = r.with(y, b == 1);
        if (auto t = solve(child, bound - 1)) {
          best = 1 + *t;
          bound = *best - 1;
          pick.kind = Kind::Forall;
          pick.var = y;
          pick.value = b == 1;
          pick.child = child;
        }
      }
    }
    for (Var v : vars_) {
      if (a.defined(v) || bound < 3) continue;
      auto t0 = solve(a.with(v, false), bound - 2);
      if (!t0) continue;
      auto t1 = solve(a.with(v, true), bound - 1 - *t0);
      if (!t1) continue;
      best = 1 + *t0 + *t1;
      bound = *best - 1;
      pick.kind = Kind::Resolve;
      pick.var = v;
    }
    Entry& e = memo_[key];
    if (best) {
      pick.exact = best;
      e = std::move(pick);
    } else {
      e.failed = std::max(e.failed, budget);
    }
    return best;
  }

  std::size_t emit(ProofBuilder& b, const PartialAssignment& a) {
    const Entry& e = memo_.at(pack(a));
    switch (e.kind) {
      case Kind::Axiom: return b.axiom(*covered(a));
      case Kind::Forall: {
        Var y = e.var;
        PartialAssignment child = e.child;
        std::size_t line = emit(b, child);
        Literal lit{y, !e.value};
        if (b.clause(line).contains(lit)) line = b.forall_elim(line, lit);
        return line;
      }
      case Kind::Resolve: {
        Var v = e.var;
        std::size_t l0 = emit(b, a.with(v, false));
        if (!b.clause(l0).literal_on(v)) return l0;
        std::size_t l1 = emit(b, a.with(v, true));
        if (!b.clause(l1).literal_on(v)) return l1;
        return b.resolve(l0, l1, v);
      }
      case Kind::None: break;
    }
    throw Error("tree search has no derivation recorded for " + format_assignment(phi_, a));
  }

  const Qbc& phi_;
  AxiomOracle& oracle_;
  const SearchOptions& opt_;
  std::vector<Var> vars_;
  std::unordered_map<std::uint64_t, Entry> memo_;
  std::unordered_map<std::uint64_t, std::optional<Clause>> cover_;
};

struct DagLine {
  Clause clause;
  Rule rule = Rule::Axiom;
  std::size_t left = 0, right = 0;
  Var pivot = 0;
  Literal lit;
};

// Entries kept in the dag transposition table before it is flushed.
constexpr std::size_t kMaxTableEntries = 2'000'000;

// Forward iterative deepening over derived clause sets.
class DagSearch {
 public:
  DagSearch(const Qbc& phi, std::vector<Clause> pool, const SearchOptions& opt)
      : phi_(phi), pool_(std::move(pool)), opt_(opt) {
    std::stable_sort(pool_.begin(), pool_.end(), [](const Clause& a, const Clause& b) { return a.size() < b.size(); });
  }

  std::optional<std::size_t> run(std::size_t cap) {
    for (std::size_t s = 1; s <= cap; ++s) {
      tt_.clear();
      lines_.clear();
      uses_.clear();
      if (dfs(s)) return s;
    }
    return std::nullopt;
  }

  Proof proof() const {
    Proof p;
    for (const auto& l : found_) {
      ProofLine pl;
      pl.clause = l.clause;
      pl.rule = l.rule;
      pl.left = l.left;
      pl.right = l.right;
      pl.pivot = l.pivot;
      pl.eliminated = l.lit;
      p.lines.push_back(std::move(pl));
    }
    return p;
  }

  std::size_t expansions = 0;

 private:
  std::size_t dangling_count() const {
    return static_cast<std::size_t>(std::count(uses_.begin(), uses_.end(), 0));
  }

  std::size_t dangling_vars(const Clause* extra) const {
    std::vector<Var> vs;
    for (std::size_t i = 0; i < lines_.size(); ++i)
      if (uses_[i] == 0)
        for (const auto& l : lines_[i].clause.literals()) vs.push_back(l.var);
    if (extra)
      for (const auto& l : extra->literals()) vs.push_back(l.var);
    std::sort(vs.begin(), vs.end());
    return static_cast<std::size_t>(std::unique(vs.begin(), vs.end()) - vs.begin());
  }

  bool subsumed(const Clause& c) const {
    return std::any_of(lines_.begin(), lines_.end(), [&](const DagLine& l) { return l.clause.subsumes(c); });
  }

  std::string key() const {
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      std::string s(uses_[i] == 0 ? "d" : "u");
      for (const auto& l : lines_[i].clause.literals()) {
        s += std::to_string(l.var);
        s += l.positive ? '+' : '-';
      }
      parts.push_back(std::move(s));
    }
    std::sort(parts.begin(), parts.end());
    std::string k;
    for (const auto& p : parts) k += p + "|";
    return k;
  }

  bool push(DagLine l, std::size_t r) {
    std::size_t undo_a = SIZE_MAX, undo_b = SIZE_MAX;
    if (l.rule != Rule::Axiom) {
      undo_a = l.left;
      ++uses_[l.left];
    }
    if (l.rule == Rule::Resolve) {
      undo_b = l.right;
      ++uses_[l.right];
    }
    lines_.push_back(std::move(l));
    uses_.push_back(0);
    bool ok = dfs(r);
    lines_.pop_back();
    uses_.pop_back();
    if (undo_a != SIZE_MAX) --uses_[undo_a];
    if (undo_b != SIZE_MAX) --uses_[undo_b];
    return ok;
  }

  bool dfs(std::size_t r) {
    if (!lines_.empty() && lines_.back().clause.empty() && dangling_count() == 1) {
      found_ = lines_;
      return true;
    }
    if (r == 0) return false;
    std::size_t u = dangling_count();
    std::size_t lb = std::max<std::size_t>({1, u == 0 ? 0 : u - 1, dangling_vars(nullptr)});
    if (lb > r) return false;
    std::string k = key();
    if (auto it = tt_.find(k); it != tt_.end() && it->second >= r) return false;
    if (++expansions > opt_.node_limit) throw ResourceError("dag search exceeded its node limit");
    const auto& prefix = phi_.prefix;

    // A move is useful only if the resulting state can still meet the bound.
    auto feasible = [&](std::size_t consumed_dangling) { return r - 1 >= u - consumed_dangling; };

    std::size_t n = lines_.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const Clause& a = lines_[i].clause;
        const Clause& b = lines_[j].clause;
        std::optional<Var> pivot;
        bool taut = false;
        for (const auto& l : a.literals()) {
          auto m = b.literal_on(l.var);
          if (m && m->positive != l.positive) {
            if (pivot) taut = true;
            pivot = l.var;
          }
        }
        if (!pivot || taut) continue;
        Clause c = resolvent(a, b, *pivot);
        if (subsumed(c)) continue;
        std::size_t consumed = (uses_[i] == 0) + (uses_[j] == 0);
        if (!feasible(consumed)) continue;
        DagLine l{c, Rule::Resolve, i, j, *pivot, {}};
        if (push(std::move(l), r - 1)) return true;
      }
    for (std::size_t i = 0; i < n; ++i) {
      const Clause& a = lines_[i].clause;
      for (const auto& lit : a.literals()) {
        if (prefix.quant(lit.var) != Quant::Forall || !forall_elim_allowed(prefix, a, lit)) continue;
        Clause c = a.without(lit.var);
        if (subsumed(c)) continue;
        if (!feasible(uses_[i] == 0)) continue;
        DagLine l{c, Rule::ForallElim, i, 0, 0, lit};
        if (push(std::move(l), r - 1)) return true;
      }
    }
    for (const auto& c : pool_) {
      if (subsumed(c)) continue;
      if (dangling_vars(&c) > r - 1 && !(c.empty() && u == 0)) continue;
      if (!feasible(0)) continue;
      DagLine l{c, Rule::Axiom, 0, 0, 0, {}};
      if (push(std::move(l), r - 1)) return true;
    }
    if (tt_.size() >= kMaxTableEntries) tt_.clear();
    tt_[k] = std::max(tt_[k], r);
    return false;
  }

  const Qbc& phi_;
  std::vector<Clause> pool_;
  const SearchOptions& opt_;
  std::vector<DagLine> lines_;
  std::vector<std::size_t> uses_;
  std::vector<DagLine> found_;
  std::unordered_map<std::string, std::size_t> tt_;
};

}  // namespace

std::vector<Clause> minimal_axioms(const Qbc& phi, AxiomOracle& oracle, std::size_t max_width) {
  std::vector<Clause> out;
  if (oracle.kind() != AxiomOracle::Kind::RelaxingH) {
    const auto& all = oracle.members();
    for (const auto& c : all) {
      if (c.size() > max_width) continue;
      bool minimal = std::none_of(all.begin(), all.end(), [&](const Clause& d) { return d != c && d.subsumes(c); });
      if (minimal && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    return out;
  }
  const auto vars = phi.prefix.vars();
  std::vector<PartialAssignment> found;
  std::size_t w_max = std::min(max_width, vars.size());
  for (std::size_t w = 0; w <= w_max; ++w) {
    std::vector<std::size_t> idx(w);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      for (std::uint32_t vals = 0; vals < (1u << w); ++vals) {
        PartialAssignment a(phi.num_vars());
        for (std::size_t t = 0; t < w; ++t) a.set(vars[idx[t]], vals >> t & 1);
        if (std::any_of(found.begin(), found.end(), [&](const PartialAssignment& m) { return is_sub(m, a); })) continue;
        if (oracle.contains(to_clause(a))) {
          found.push_back(a);
          out.push_back(to_clause(a));
        }
      }
      // next combination
      std::size_t t = w;
      while (t > 0 && idx[t - 1] == vars.size() - w + t - 1) --t;
      if (t == 0) break;
      ++idx[t - 1];
      for (std::size_t q = t; q < w; ++q) idx[q] = idx[q - 1] + 1;
    }
  }
  return out;
}

SearchResult min_proof_size(const Qbc& phi, AxiomOracle& oracle, const SearchOptions& opt) {
  SearchResult res;
  if (opt.mode == SearchMode::Tree) {
    TreeSearch ts(phi, oracle, opt);
    res.size = ts.run(opt.cap);
    if (res.size) res.proof = ts.build();
    res.expansions = ts.expansions;
    res.oracle_queries = ts.queries;
    return res;
  }
  std::size_t width = opt.cap == 0 ? 0 : opt.cap - 1;
  auto pool = minimal_axioms(phi, oracle, width);
  res.axiom_pool = pool.size();
  res.oracle_queries = oracle.oracle_calls();
  DagSearch ds(phi, std::move(pool), opt);
  res.size = ds.run(opt.cap);
  if (res.size) res.proof = ds.proof();
  res.expansions = ds.expansions;
  return res;
}

SearchResult min_proof_size(const Qbc& phi, unsigned k, const SearchOptions& opt) {
  AxiomOracle o = AxiomOracle::relaxing(phi, k + 2, opt.cap_vars);
  return min_proof_size(phi, o, opt);
}

SinkAudit audit_mod3_sink_labels(const Mod3Instance& inst, const std::vector<PartialAssignment>& sinks, unsigned t) {
  const unsigned n = inst.n;
  if (t < 2) throw Error("sink audit needs t >= 2");
  unsigned h = (t + 1) / 2;
  if (n < h) throw Error("sink audit needs n >= ceil(t/2)");
  const auto& prefix = inst.qbc.prefix;
  SinkAudit rep;
  rep.sinks = sinks.size();
  int e = static_cast<int>(n) - static_cast<int>(h) - 1;
  rep.bound = e <= 0 ? 1 : (std::size_t{1} << e);
  rep.bound_ok = rep.sinks >= rep.bound;
  if (!rep.bound_ok)
    rep.violations.push_back("sink count " + std::to_string(rep.sinks) + " below bound " + std::to_string(rep.bound));

  unsigned free_x = n - h;
  for (std::uint32_t f = 0; f < (1u << free_x); ++f) {
    PartialAssignment fa(inst.qbc.num_vars());
    for (unsigned i = 1; i <= free_x; ++i) fa.set(inst.x(i), f >> (i - 1) & 1);
    bool hit = std::any_of(sinks.begin(), sinks.end(), [&](const PartialAssignment& s) { return s.agrees(fa); });
    if (!hit) {
      rep.agrees_ok = false;
      rep.violations.push_back("no sink agrees with " + format_assignment(inst.qbc, fa));
    }
  }

  AxiomSetOracle oracle(inst.qbc);
  for (const auto& s : sinks) {
    bool tail = false;
    for (unsigned i = n - h + 1; i <= n; ++i)
      if (s.defined(inst.x(i)) || s.defined(inst.y(i))) tail = true;
    if (!tail) {
      rep.tail_ok = false;
      rep.violations.push_back("sink " + format_assignment(inst.qbc, s) + " misses the last levels");
    }
    std::size_t nh = s.empty() ? 0 : holes(prefix, s).size();
    if (nh > 1) {
      rep.holes_ok = false;
      rep.violations.push_back("sink " + format_assignment(inst.qbc, s) + " has " + std::to_string(nh) + " holes");
      if (!oracle.in_H(s, t)) ++rep.reflagged;
    }
  }
  return rep;
}

SinkAudit audit_mod3_sinks(const Mod3Instance& inst, const Proof& proof, unsigned t) {
  if (t < 2) throw Error("sink audit needs t >= 2");
  if (relaxing_check(t - 2, inst.qbc, proof) != Verdict::Accept)
    throw Error("proof is not accepted from H(Phi, Pi_" + std::to_string(t) + ")");
  auto g = build_graph(inst.qbc, proof);
  std::vector<PartialAssignment> sinks;
  for (const auto& node : g.nodes)
    if (node.children.empty()) sinks.push_back(node.label);
  return audit_mod3_sink_labels(inst, sinks, t);
}

}  // namespace qures
