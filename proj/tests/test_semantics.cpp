#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "qures/families.hpp"
#include "qures/relax.hpp"
#include "qures/semantics.hpp"
#include "support/corpus.hpp"

using namespace qures;
using namespace qures::testing;

TEST_CASE("decide on small examples") {
  CHECK(decide(clausal("e", {{1}})));
  CHECK_FALSE(decide(clausal("e", {{1}, {-1}})));
  CHECK_FALSE(decide(gen_mod3(1).qbc));
  CHECK_FALSE(decide(gen_separation(1).qbc));
}

TEST_CASE("decide refuses instances over the cap") {
  Qbc big = gen_separation(2).qbc;  // 22 variables
  CHECK_THROWS_AS(decide(big, 20), ResourceError);
  CHECK_FALSE(decide(big));
}

TEST_CASE("decide matches truth-table minimax on the structured corpus") {
  std::size_t n = 0;
  for (const auto& e : structured_corpus()) {
    INFO(e.label);
    CHECK(decide(e.qbc) == minimax(e.qbc));
    ++n;
  }
  CHECK(n == 2 * 4 + 4 * 16 + 8 * 256 + 16 * 64);
}

TEST_CASE("decide matches minimax on random 5-variable circuits") {
  for (const auto& e : random_circuits(1000)) {
    INFO(e.label);
    CHECK(decide(e.qbc) == minimax(e.qbc));
  }
}

TEST_CASE("extracted strategies") {
  Qbc x = clausal("e", {{1}});
  Strategy s = extract_strategy(x);
  REQUIRE(s.side == Quant::Exists);
  REQUIRE(s.tables.size() == 1);
  CHECK(s.tables[0].values == std::vector<std::uint8_t>{1});
  CHECK(play(x, s, PartialAssignment(1)) == assignment(1, {1}));

  Qbc yx = clausal("ae", {{1, 2}, {-1, -2}});
  Strategy t = extract_strategy(yx);
  REQUIRE(t.side == Quant::Exists);
  const StrategyTable* tx = t.table_for(1);
  REQUIRE(tx);
  CHECK(tx->inputs == std::vector<Var>{0});
  CHECK(tx->values == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("strategy verification examples") {
  Qbc x = clausal("e", {{1}});
  Strategy one{Quant::Exists, {{0, {}, {1}}}};
  Strategy zero{Quant::Exists, {{0, {}, {0}}}};
  CHECK(verify_strategy(x, one));
  CHECK_FALSE(verify_strategy(x, zero));
}

TEST_CASE("the mod-3 strategy plays the negated x") {
  auto inst = gen_mod3(2);
  Strategy s = mod3_forall_strategy(2);
  PartialAssignment sigma(inst.qbc.num_vars());
  sigma.set(inst.x(1), false);
  sigma.set(inst.x(2), true);
  PartialAssignment out = play(inst.qbc, s, sigma);
  CHECK(out.value(inst.y(1)));
  CHECK_FALSE(out.value(inst.y(2)));
  CHECK(out.domain_size() == 4);
  CHECK_THROWS_AS(play(inst.qbc, s, PartialAssignment(inst.qbc.num_vars())), Error);
}

TEST_CASE("mod-3 family: false, and both the stated and the extracted strategy win") {
  for (unsigned n = 1; n <= 6; ++n) {
    auto inst = gen_mod3(n);
    CHECK_FALSE(decide(inst.qbc));
    CHECK(verify_strategy(inst.qbc, mod3_forall_strategy(n)));
    Strategy s = extract_strategy(inst.qbc);
    CHECK(s.side == Quant::Forall);
    CHECK(verify_strategy(inst.qbc, s));
  }
}

TEST_CASE("extract_strategy wins for the winning side on the corpus") {
  for (const auto& e : structured_corpus()) {
    INFO(e.label);
    bool v = decide(e.qbc);
    Strategy s = extract_strategy(e.qbc);
    CHECK((s.side == Quant::Exists) == v);
    CHECK(verify_strategy(e.qbc, s));
  }
}

TEST_CASE("swapping adjacent same-quantifier entries keeps the value") {
  for (const auto& e : random_circuits(300)) {
    const auto& es = e.qbc.prefix.entries();
    for (std::size_t i = 0; i + 1 < es.size(); ++i) {
      if (es[i].quant != es[i + 1].quant) continue;
      auto swapped = es;
      std::swap(swapped[i], swapped[i + 1]);
      Qbc q = e.qbc;
      q.prefix = QuantifierPrefix(q.num_vars(), swapped);
      CHECK(decide(q) == decide(e.qbc));
    }
  }
}

TEST_CASE("a false relaxation certifies a false original") {
  std::size_t checked = 0;
  for (const auto& e : random_circuits(150)) {
    const auto& es = e.qbc.prefix.entries();
    std::vector<std::size_t> perm(es.size());
    std::iota(perm.begin(), perm.end(), 0);
    bool orig = minimax(e.qbc);
    do {
      std::vector<PrefixEntry> re;
      for (std::size_t i : perm) re.push_back(es[i]);
      QuantifierPrefix rp(e.qbc.num_vars(), re);
      if (!is_relaxation(rp, e.qbc.prefix)) continue;
      Qbc r = e.qbc;
      r.prefix = rp;
      if (!decide(r)) CHECK_FALSE(orig);
      ++checked;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  CHECK(checked > 150);
}

TEST_CASE("strategy inputs are the earlier opposing variables") {
  CHECK(strategy_inputs(prefix_of("eaea"), 3) == std::vector<Var>{0, 2});
  CHECK(strategy_inputs(prefix_of("eaea"), 2) == std::vector<Var>{1});
}
