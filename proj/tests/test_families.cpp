#include <doctest.h>

#include <algorithm>
#include <set>

#include "qures/families.hpp"
#include "qures/game.hpp"
#include "qures/proof.hpp"
#include "qures/relax.hpp"
#include "qures/semantics.hpp"
#include "support/corpus.hpp"

using namespace qures;
using namespace qures::testing;

namespace {

using Lits = std::vector<std::pair<Var, bool>>;

Lits key(const Clause& c) {
  Lits out;
  for (const auto& l : c.literals()) out.push_back({l.var, l.positive});
  std::sort(out.begin(), out.end());
  return out;
}

// The three clause schemas, written out from their definitions.
std::set<Lits> reference_clauses(const SeparationInstance& s) {
  std::set<Lits> out;
  auto add = [&](std::vector<Literal> lits) { out.insert(key(Clause::from_literals(lits))); };
  for (unsigned j = 0; j < 2; ++j)
    for (unsigned k = 0; k < 2; ++k) add({{s.x(0, j, k), false}});
  for (unsigned j = 0; j < 2; ++j) add({{s.x(s.n, j, 0), true}, {s.x(s.n, j, 1), true}});
  for (unsigned i = 1; i <= s.n; ++i) {
    for (unsigned j = 0; j < 2; ++j)
      for (unsigned k = 0; k < 2; ++k)
        for (unsigned l = 0; l < 2; ++l)
          add({{s.xp(i, 0, k), false}, {s.xp(i, 1, l), false}, {s.x(i - 1, j, 0), true}, {s.x(i - 1, j, 1), true}});
    for (unsigned k = 0; k < 2; ++k) {
      add({{s.x(i, 0, k), false}, {s.y(i), true}, {s.xp(i, 0, k), true}});
      add({{s.x(i, 1, k), false}, {s.y(i), false}, {s.xp(i, 1, k), true}});
    }
  }
  return out;
}

// Normal/funny classification transcribed from the definitions, kept apart
// from the library's implementation.
struct RefClassifier {
  const SeparationInstance& s;
  const PartialAssignment& f;

  int val(Var v) const { return f.raw(v); }

  bool level_defined(unsigned i) const {
    for (unsigned j = 0; j < 2; ++j)
      for (unsigned k = 0; k < 2; ++k)
        if (val(s.x(i, j, k)) < 0 || val(s.xp(i, j, k)) < 0) return false;
    return val(s.y(i)) >= 0;
  }
  bool pair_split(unsigned i, unsigned j) const {
    return val(s.x(i, j, 0)) == val(s.xp(i, j, 0)) && val(s.x(i, j, 1)) == val(s.xp(i, j, 1)) &&
           val(s.x(i, j, 0)) != val(s.x(i, j, 1));
  }
  bool normal_real(unsigned i) const {
    if (!level_defined(i)) return false;
    unsigned b = val(s.y(i));
    for (unsigned k = 0; k < 2; ++k)
      if (val(s.x(i, b, k)) != 0 || val(s.xp(i, b, k)) != 0) return false;
    return pair_split(i, 1 - b);
  }
  bool funny_real(unsigned i) const {
    if (!level_defined(i)) return false;
    unsigned b = val(s.y(i));
    return pair_split(i, b) && val(s.xp(i, 1 - b, 0)) == 0 && val(s.xp(i, 1 - b, 1)) == 0 &&
           val(s.x(i, 1 - b, 0)) != val(s.x(i, 1 - b, 1));
  }
  unsigned top() const {
    unsigned l = 0;
    for (unsigned i = 1; i <= s.n; ++i)
      for (unsigned j = 0; j < 2; ++j)
        for (unsigned k = 0; k < 2; ++k)
          if (val(s.x(i, j, k)) >= 0 || val(s.xp(i, j, k)) >= 0) l = i;
    return l;
  }
  bool x0_zero() const {
    for (unsigned j = 0; j < 2; ++j)
      for (unsigned k = 0; k < 2; ++k)
        if (val(s.x(0, j, k)) != 0) return false;
    return true;
  }
  std::optional<unsigned> normal() const {
    if (!x0_zero()) return std::nullopt;
    unsigned l = top();
    for (unsigned i = 1; i < l; ++i)
      if (!normal_real(i)) return std::nullopt;
    if (l == 0 || normal_real(l)) return l;
    int sum = 0;
    for (unsigned j = 0; j < 2; ++j)
      for (unsigned k = 0; k < 2; ++k) {
        if (val(s.x(l, j, k)) >= 0 || val(s.xp(l, j, k)) < 0) return std::nullopt;
        sum += val(s.xp(l, j, k));
      }
    if (sum != 1) return std::nullopt;
    return l;
  }
  std::vector<unsigned> funny_witnesses() const {
    std::vector<unsigned> out;
    if (!x0_zero()) return out;
    unsigned l = top();
    for (unsigned m = 1; m <= l; ++m) {
      bool ok = funny_real(m);
      for (unsigned i = 1; i < m && ok; ++i) ok = normal_real(i);
      for (unsigned i = m + 1; i <= l && ok; ++i)
        for (unsigned j = 0; j < 2 && ok; ++j) {
          bool any = false;
          for (unsigned k = 0; k < 2; ++k) any |= val(s.x(i, j, k)) >= 0 || val(s.xp(i, j, k)) >= 0;
          if (any) ok = pair_split(i, j) && val(s.x(i, j, 0)) >= 0 && val(s.x(i, j, 1)) >= 0;
        }
      if (ok) out.push_back(m);
    }
    return out;
  }
};

// Calls visit on every partial assignment over nv variables, in base-3 order.
template <class F>
void for_each_partial(std::size_t nv, F visit) {
  PartialAssignment a(nv);
  while (true) {
    visit(a);
    std::size_t v = 0;
    for (; v < nv; ++v) {
      if (!a.defined(Var(v))) {
        a.set(Var(v), false);
        break;
      }
      if (!a.value(Var(v))) {
        a.set(Var(v), true);
        break;
      }
      a.unset(Var(v));
    }
    if (v == nv) return;
  }
}

PartialAssignment x0_zeros(const SeparationInstance& s) {
  PartialAssignment f(s.qbc.num_vars());
  for (unsigned j = 0; j < 2; ++j)
    for (unsigned k = 0; k < 2; ++k) f.set(s.x(0, j, k), false);
  return f;
}

// Level-1 funny realization with y1 = 0.
PartialAssignment funny_level_one(const SeparationInstance& s) {
  PartialAssignment f = x0_zeros(s);
  f.set(s.y(1), false);
  f.set(s.x(1, 0, 0), true);
  f.set(s.xp(1, 0, 0), true);
  f.set(s.x(1, 0, 1), false);
  f.set(s.xp(1, 0, 1), false);
  f.set(s.xp(1, 1, 0), false);
  f.set(s.xp(1, 1, 1), false);
  f.set(s.x(1, 1, 0), true);
  f.set(s.x(1, 1, 1), false);
  return f;
}

}  // namespace

TEST_CASE("separation family matches the clause schemas") {
  for (unsigned n = 1; n <= 8; ++n) {
    auto s = gen_separation(n);
    REQUIRE(s.qbc.clauses);
    CHECK(s.qbc.clauses->size() == 6 + 12 * n);
    CHECK(s.qbc.num_vars() == 4 + 9 * n);
    std::set<Lits> got;
    for (const auto& c : *s.qbc.clauses) got.insert(key(c));
    CHECK(got == reference_clauses(s));
  }
  auto one = gen_separation(1);
  CHECK(one.qbc.num_vars() == 13);
  CHECK(one.qbc.clauses->size() == 18);
}

TEST_CASE("separation prefix and layout") {
  auto s = gen_separation(2);
  const auto& p = s.qbc.prefix;
  for (unsigned i = 1; i <= 2; ++i) {
    CHECK(p.quant(s.y(i)) == Quant::Forall);
    CHECK(s.level_of(s.y(i)) == i);
    for (unsigned j = 0; j < 2; ++j)
      for (unsigned k = 0; k < 2; ++k) {
        CHECK(p.order(s.xp(i, j, k), s.y(i)) == Order::StrictlyBefore);
        CHECK(p.order(s.y(i), s.x(i, j, k)) == Order::StrictlyBefore);
        CHECK(p.order(s.x(i - 1, j, k), s.xp(i, j, k)) == Order::SameBlock);
        CHECK(s.level_of(s.x(i, j, k)) == i);
      }
  }
  CHECK(s.level_of(s.x(0, 1, 1)) == 0);
  CHECK(p.vars_of(Quant::Forall).size() == 2);
}

TEST_CASE("separation family is false") {
  CHECK_FALSE(decide(gen_separation(1).qbc));
  CHECK_FALSE(decide(gen_separation(2).qbc));
}

TEST_CASE("linear separation proofs") {
  std::vector<std::size_t> sizes;
  for (unsigned n = 1; n <= 12; ++n) {
    auto s = gen_separation(n);
    Proof pr = gen_separation_proof(s);
    AxiomOracle o = AxiomOracle::matrix_clauses(s.qbc);
    ProofReport r = check_proof(s.qbc, pr, o);
    INFO("n=", n, " ", r.error_reason);
    CHECK(r.valid);
    CHECK(r.falsity_proof);
    CHECK(pr.lines.size() == separation_proof_size(n));
    CHECK_FALSE(proof_stats(pr).tree_like);
    sizes.push_back(pr.lines.size());
  }
  for (std::size_t i = 2; i < sizes.size(); ++i) CHECK(sizes[i] - sizes[i - 1] == sizes[1] - sizes[0]);
}

TEST_CASE("classification examples") {
  auto s = gen_separation(1);
  auto z = classify_assignment(s, x0_zeros(s));
  CHECK(z.kind == AssignmentClass::Kind::Normal);
  CHECK(z.score() == 0);

  auto f = classify_assignment(s, funny_level_one(s));
  CHECK(f.kind == AssignmentClass::Kind::Funny);
  CHECK(f.score() == 1);
  CHECK(is_funny_realization(s, funny_level_one(s), 1));
  CHECK_FALSE(is_normal_realization(s, funny_level_one(s), 1));

  PartialAssignment bad = x0_zeros(s);
  bad.set(s.x(0, 0, 0), true);
  CHECK(classify_assignment(s, bad).kind == AssignmentClass::Kind::Neither);
  CHECK(classify_assignment(s, PartialAssignment(13)).kind == AssignmentClass::Kind::Neither);

  // half-defined level 1: exactly one x' set
  PartialAssignment half = x0_zeros(s);
  for (unsigned j = 0; j < 2; ++j)
    for (unsigned k = 0; k < 2; ++k) half.set(s.xp(1, j, k), j == 1 && k == 0);
  CHECK(classify_assignment(s, half).kind == AssignmentClass::Kind::Normal);
  CHECK(classify_assignment(s, half).score() == 1);
  half.set(s.xp(1, 0, 0), true);
  CHECK(classify_assignment(s, half).kind == AssignmentClass::Kind::Neither);
}

TEST_CASE("classification agrees with a reference transcription on all 3^13 assignments at n=1") {
  auto s = gen_separation(1);
  std::size_t normal = 0, funny = 0, total = 0;
  for_each_partial(s.qbc.num_vars(), [&](const PartialAssignment& f) {
    ++total;
    RefClassifier ref{s, f};
    auto rn = ref.normal();
    auto rf = ref.funny_witnesses();
    unsigned ns = 0, fs = 0;
    bool ln = is_normal_assignment(s, f, &ns);
    bool lf = is_funny_assignment(s, f, &fs);
    auto c = classify_assignment(s, f);
    bool ok = ln == rn.has_value() && lf == !rf.empty() && !(ln && lf) && rf.size() <= 1;
    if (ln) ok = ok && ns == *rn && c.kind == AssignmentClass::Kind::Normal && c.score() == ns;
    if (lf) ok = ok && fs == rf[0] && c.kind == AssignmentClass::Kind::Funny && c.score() == fs;
    if (!ln && !lf) ok = ok && c.kind == AssignmentClass::Kind::Neither;
    if (!ok) {
      INFO(format_assignment(s.qbc, f));
      CHECK(ok);
    }
    normal += ln;
    funny += lf;
  });
  CHECK(total == 1594323);
  CHECK(normal > 0);
  CHECK(funny > 0);
}

TEST_CASE("classification agrees with the reference on sampled assignments at n=2") {
  auto s = gen_separation(2);
  std::mt19937_64 rng(3);
  std::size_t hits = 0;
  for (int t = 0; t < 200000; ++t) {
    PartialAssignment f = x0_zeros(s);
    // bias towards realizations so both classes occur
    for (Var v = 4; v < s.qbc.num_vars(); ++v) {
      auto r = rng() % 5;
      if (r < 2) f.set(v, false);
      else if (r < 4) f.set(v, true);
    }
    RefClassifier ref{s, f};
    auto c = classify_assignment(s, f);
    auto rn = ref.normal();
    auto rf = ref.funny_witnesses();
    CHECK(rf.size() <= 1);
    if (rn) {
      CHECK(c.kind == AssignmentClass::Kind::Normal);
      CHECK(c.score() == *rn);
    } else if (!rf.empty()) {
      CHECK(c.kind == AssignmentClass::Kind::Funny);
      CHECK(c.score() == rf[0]);
    } else {
      CHECK(c.kind == AssignmentClass::Kind::Neither);
    }
    hits += c.kind != AssignmentClass::Kind::Neither;
  }
  CHECK(hits > 0);
}

TEST_CASE("realizations satisfy T and are never both normal and funny") {
  auto s = gen_separation(1);
  std::vector<Var> level;
  for (Var v = 4; v < 13; ++v) level.push_back(v);
  for (std::uint32_t code = 0; code < (1u << 9); ++code) {
    PartialAssignment r(13);
    for (std::size_t b = 0; b < 9; ++b) r.set(level[b], code >> b & 1);
    bool nr = is_normal_realization(s, r, 1), fr = is_funny_realization(s, r, 1);
    CHECK_FALSE((nr && fr));
    if (!nr && !fr) continue;
    for (const auto& c : *s.qbc.clauses) {
      if (!c.literal_on(s.y(1))) continue;
      bool sat = false;
      for (const auto& l : c.literals()) sat |= r.value(l.var) == l.positive;
      CHECK(sat);
    }
  }
}

TEST_CASE("funny assignments extend to full funny assignments that satisfy the matrix") {
  auto s = gen_separation(1);
  const auto exists = s.qbc.prefix.vars_of(Quant::Exists);
  std::size_t full = 0;
  for_each_partial(13, [&](const PartialAssignment& f) {
    unsigned m = 0;
    if (!is_funny_assignment(s, f, &m)) return;
    bool all = std::all_of(exists.begin(), exists.end(), [&](Var v) { return f.defined(v); });
    if (all) {
      ++full;
      for (int yv = 0; yv < 2; ++yv) {
        if (f.defined(s.y(1)) && f.value(s.y(1)) != bool(yv)) continue;
        PartialAssignment g = f.with(s.y(1), yv);
        CHECK(s.qbc.matrix.eval(g));
      }
      return;
    }
  });
  CHECK(full > 0);
}

TEST_CASE("partial funny assignments extend to full ones with the same score") {
  auto s = gen_separation(2);
  const auto exists = s.qbc.prefix.vars_of(Quant::Exists);
  std::mt19937_64 rng(17);
  std::size_t sampled = 0;
  for (int t = 0; t < 4000 && sampled < 300; ++t) {
    PartialAssignment f = funny_level_one(s);
    if (rng() & 1) {
      // flip to the y1 = 1 mirror image
      PartialAssignment g = x0_zeros(s);
      g.set(s.y(1), true);
      for (unsigned j = 0; j < 2; ++j)
        for (unsigned k = 0; k < 2; ++k) {
          g.set(s.x(1, j, k), f.value(s.x(1, 1 - j, k)));
          g.set(s.xp(1, j, k), f.value(s.xp(1, 1 - j, k)));
        }
      f = g;
    }
    for (Var v = 0; v < s.qbc.num_vars(); ++v)
      if (s.level_of(v) == 2 && rng() % 3 != 0) f.set(v, rng() & 1);
    for (Var v : exists)
      if (rng() % 4 == 0) f.unset(v);
    unsigned m = 0;
    if (!is_funny_assignment(s, f, &m)) continue;
    std::vector<Var> open;
    for (Var v : exists)
      if (!f.defined(v)) open.push_back(v);
    if (open.size() > 12) continue;
    ++sampled;
    bool found = false;
    for (std::uint32_t code = 0; code < (1u << open.size()) && !found; ++code) {
      PartialAssignment g = f;
      for (std::size_t b = 0; b < open.size(); ++b) g.set(open[b], code >> b & 1);
      unsigned gm = 0;
      found = is_funny_assignment(s, g, &gm) && gm == m;
    }
    INFO(format_assignment(s.qbc, f));
    CHECK(found);
  }
  CHECK(sampled > 0);
}
TEST_CASE("members of F in H(Pi_2) score at least the claimed points") {
  auto s = gen_separation(1);
  CHECK(separation_points(1, 2) == 1);
  CHECK(separation_points(3, 2) == 3);
  CHECK(separation_points(3, 5) == 1);
  DelayerStrategy strat = delayer_strategy(s, 2);
  CHECK(strat.points == 1);
  MaterializedStrategy mat(s.qbc, strat);
  AxiomSetOracle h(s.qbc);
  std::size_t in_h = 0;
  for (std::size_t i = 0; i < mat.members().size(); ++i) {
    if (!h.in_H(mat.members()[i], 2)) continue;
    ++in_h;
    CHECK(mat.scores()[i] >= 1);
  }
  CHECK(in_h > 0);
  auto root = strat.score(x0_zeros(s));
  REQUIRE(root);
  CHECK(*root == 0);
}

TEST_CASE("mod-3 matrix equals the arithmetic predicate") {
  for (unsigned n = 1; n <= 6; ++n)
    for (unsigned j = 0; j < 3; ++j) {
      auto inst = gen_mod3(n, j);
      CHECK(inst.qbc.prefix.prefix_class().pi == 2 * n + 1);
      std::size_t nv = 2 * n;
      for (std::uint32_t code = 0; code < (1u << nv); ++code) {
        PartialAssignment f(nv);
        unsigned sum = j;
        for (Var v = 0; v < nv; ++v) {
          f.set(v, code >> v & 1);
          sum += code >> v & 1;
        }
        bool expect = sum % 3 != n % 3;
        CHECK(inst.qbc.matrix.eval(f) == expect);
        CHECK(mod3_predicate(n, j, f) == expect);
      }
    }
}

TEST_CASE("mod-3 examples") {
  auto one = gen_mod3(1);
  CHECK(one.qbc.matrix.eval(assignment(2, {-1, -2})));
  Strategy s1 = mod3_forall_strategy(1);
  CHECK(play(one.qbc, s1, assignment(2, {-1})).value(one.y(1)));

  auto two = gen_mod3(2);
  Strategy s2 = mod3_forall_strategy(2);
  CHECK(verify_strategy(two.qbc, s2));
  PartialAssignment out = play(two.qbc, s2, assignment(4, {-1, -3}));
  CHECK_FALSE(two.qbc.matrix.eval(out));
  for (const auto& t : s2.tables) CHECK(t.inputs.size() <= 2);
}

TEST_CASE("fixing the first round of a mod-3 sentence gives a smaller mod-3 sentence") {
  for (unsigned n = 2; n <= 5; ++n)
    for (unsigned j = 0; j < 3; ++j) {
      auto inst = gen_mod3(n, j);
      for (int xv = 0; xv < 2; ++xv)
        for (int yv = 0; yv < 2; ++yv) {
          PartialAssignment f(2 * n);
          f.set(inst.x(1), xv);
          f.set(inst.y(1), yv);
          unsigned j2 = (j + xv + yv + 2) % 3;
          CHECK(decide(instantiate(inst.qbc, f)) == decide(gen_mod3(n - 1, j2).qbc));
        }
    }
}

TEST_CASE("mod-3 circuits grow by a constant per round") {
  std::size_t step = gen_mod3(2).qbc.matrix.size() - gen_mod3(1).qbc.matrix.size();
  for (unsigned n = 2; n <= 12; ++n)
    CHECK(gen_mod3(n + 1).qbc.matrix.size() - gen_mod3(n).qbc.matrix.size() == step);
}
