// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "qures/families.hpp"
#include "qures/game.hpp"
#include "qures/io.hpp"
#include "qures/relax.hpp"
#include "qures/search.hpp"
#include "qures/semantics.hpp"
#include "qures/stratex.hpp"
#include "support/corpus.hpp"

using namespace qures;
using namespace qures::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (cond) return;
    if (ok) detail << "first failure: " << what << "; ";
    ok = false;
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail << "exception: " << e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.ok = false;
    o.detail << "over the " << budget_s << " s budget; ";
  }
  if (!o.ok) ++failures;
  std::printf("%s [%d] %s: %s(%.2f s)\n", o.ok ? "PASS" : "FAIL", id, name.c_str(), o.detail.str().c_str(), secs);
  std::fflush(stdout);
}

std::vector<CorpusEntry> acceptance_corpus() {
  auto c = structured_corpus();
  for (auto& e : random_circuits(1000)) c.push_back(std::move(e));
  return c;
}

std::vector<Clause> h_pool(const Qbc& phi, unsigned level, std::mt19937_64& rng) {
  AxiomSetOracle o(phi);
  std::vector<Clause> pool;
  for (const auto& a : all_partial(phi))
    if (o.in_H(a, level) || rng() % 8 == 0) pool.push_back(to_clause(a));
  return pool;
}

Proof empty_axiom() {
  ProofBuilder b;
  b.axiom(Clause());
  return b.take();
}

unsigned alternations(const Qbc& phi) {
  auto b = phi.prefix.blocks().size();
  return b == 0 ? 0 : static_cast<unsigned>(b - 1);
}

}  // namespace

int main() {
  const auto corpus = acceptance_corpus();

  criterion(1, "decide matches truth-table minimax", 60, [&](Outcome& o) {
    std::size_t mismatches = 0;
    for (const auto& e : corpus)
      if (decide(e.qbc) != minimax(e.qbc)) {
        ++mismatches;
        o.require(false, e.label);
      }
    o.detail << corpus.size() << " instances, " << mismatches << " mismatches ";
  });

  criterion(2, "relaxing check soundness and falsity-proof completeness", 600, [&](Outcome& o) {
    std::mt19937_64 rng(3);
    std::size_t accepted = 0, generated = 0, violations = 0;
    for (const auto& e : corpus) {
      bool truth = decide(e.qbc);
      for (unsigned k = 0; k <= 1; ++k) {
        std::vector<Proof> candidates{empty_axiom()};
        auto pool = h_pool(e.qbc, k + 2, rng);
        if (!pool.empty())
          for (int t = 0; t < 2; ++t) candidates.push_back(random_derivation(rng, e.qbc, pool, 12));
        if (!truth) {
          AxiomOracle h = AxiomOracle::relaxing(e.qbc, k + 2);
          candidates.push_back(generate_falsity_proof(e.qbc, h));
          ++generated;
          if (relaxing_check(k, e.qbc, candidates.back()) != Verdict::Accept) {
            ++violations;
            o.require(false, "generated proof rejected on " + e.label);
          }
        }
        for (const auto& p : candidates) {
          if (relaxing_check(k, e.qbc, p) != Verdict::Accept) continue;
          ++accepted;
          if (truth) {
            ++violations;
            o.require(false, "accepted a proof of true " + e.label);
          }
        }
      }
    }
    o.detail << accepted << " accepted proofs, " << generated << " generated proofs, " << violations
             << " violations ";
  });

  criterion(3, "separation family shape, falsity and linear proofs", 120, [&](Outcome& o) {
    for (unsigned n = 1; n <= 8; ++n)
      o.require(gen_separation(n).qbc.clauses->size() == 6 + 12 * n, "clause count at n=" + std::to_string(n));
    o.require(!decide(gen_separation(1).qbc), "Phi_1 true");
    o.require(!decide(gen_separation(2).qbc), "Phi_2 true");
    std::vector<std::size_t> size(1001, 0);
    for (unsigned n = 1; n <= 1000; ++n) {
      bool heavy = n == 1 || n == 10 || n == 100 || n == 1000;
      if (!heavy && n > 50) continue;
      auto s = gen_separation(n);
      Proof p = gen_separation_proof(s);
      size[n] = p.size();
      if (heavy) {
        AxiomOracle m = AxiomOracle::matrix_clauses(s.qbc);
        o.require(check_proof(s.qbc, p, m).falsity_proof, "proof rejected at n=" + std::to_string(n));
      }
    }
    std::size_t d = size[2] - size[1];
    for (unsigned n = 3; n <= 50; ++n) o.require(size[n] - size[n - 1] == d, "size step at n=" + std::to_string(n));
    for (unsigned n : {10u, 100u, 1000u}) o.require(size[n] == size[1] + (n - 1) * d, "size at n=" + std::to_string(n));
    o.detail << "size(n) = " << d << "n + " << size[1] - d << ", size(1000) = " << size[1000] << " ";
  });

  criterion(4, "relaxing check accepts the n=1 separation proof at k=0", 300, [&](Outcome& o) {
    auto s = gen_separation(1);
    ProofReport r;
    Verdict v = relaxing_check(0, s.qbc, gen_separation_proof(s), kDefaultVarCap, &r);
    o.require(v == Verdict::Accept, std::string("verdict ") + to_string(v));
    o.detail << r.size << " lines ";
  });

  criterion(5, "delayer strategy conditions at n=1, d=2", 1800, [&](Outcome& o) {
    auto s = gen_separation(1);
    MaterializedStrategy ms(s.qbc, delayer_strategy(s, 2));
    o.require(ms.scanned() == 1594323, "scanned " + std::to_string(ms.scanned()));
    AxiomSetOracle h(s.qbc);
    auto rep = check_conditions(ms, [&](const PartialAssignment& a) { return h.in_H(a, 2); });
    for (const auto& c : rep.conditions) o.require(c.passed, c.name + ": " + c.counterexample);
    std::size_t in_h = 0;
    for (std::size_t i = 0; i < ms.members().size(); ++i) {
      if (!h.in_H(ms.members()[i], 2)) continue;
      ++in_h;
      o.require(ms.scores()[i] >= 1, "member in H with score 0: " + format_assignment(s.qbc, ms.members()[i]));
    }
    o.require(in_h > 0, "no member of F in H");
    o.detail << ms.members().size() << " members of F, " << in_h << " in H, all five conditions checked ";
  });

  criterion(6, "leaf bound on searched tree-like refutations", 600, [&](Outcome& o) {
    auto s = gen_separation(1);
    MaterializedStrategy ms(s.qbc, delayer_strategy(s, 2));
    std::size_t found = 0, min_leaves = SIZE_MAX;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      SearchOptions opt;
      opt.mode = SearchMode::Tree;
      opt.cap = 40;
      opt.seed = seed;
      auto r = min_proof_size(s.qbc, 0, opt);
      if (!r.size) continue;
      ++found;
      o.require(relaxing_check(0, s.qbc, r.proof) == Verdict::Accept, "search proof rejected");
      LeafAudit a = leaf_bound_audit(r.proof, ms);
      o.require(a.bound_ok && a.leaves >= 2, "leaves " + std::to_string(a.leaves));
      o.require(a.witness_ok, a.witness_failure);
      min_leaves = std::min(min_leaves, a.leaves);
    }
    o.require(found > 0, "no tree-like refutation within cap 40");
    o.detail << found << " proofs, fewest leaves " << min_leaves << " ";
  });

  criterion(7, "mod-3 family", 600, [&](Outcome& o) {
    for (unsigned n = 1; n <= 6; ++n) {
      auto inst = gen_mod3(n);
      o.require(!decide(inst.qbc), "Phi_" + std::to_string(n) + " true");
      o.require(verify_strategy(inst.qbc, mod3_forall_strategy(n)), "strategy loses at n=" + std::to_string(n));
    }
    auto m3 = gen_mod3(3);
    o.require(relaxing_check(0, m3.qbc, empty_axiom()) == Verdict::Reject, "empty clause accepted at k=0");
    for (unsigned k = 0; k + 2 < 7; ++k)
      o.require(relaxing_check(k, m3.qbc, empty_axiom()) == Verdict::Reject, "empty clause accepted early");
    o.require(relaxing_check(5, m3.qbc, empty_axiom()) == Verdict::Accept, "empty clause rejected at k=5");
    o.require(relaxing_check(6, m3.qbc, empty_axiom()) == Verdict::Accept, "empty clause rejected at k=6");
    for (unsigned n = 2; n <= 3; ++n) {
      auto inst = gen_mod3(n);
      SearchOptions opt;
      opt.mode = n == 2 ? SearchMode::Dag : SearchMode::Tree;
      opt.cap = 40;
      auto r = min_proof_size(inst.qbc, 0, opt);
      o.require(r.size.has_value(), "no proof found at n=" + std::to_string(n));
      if (!r.size) continue;
      SinkAudit a = audit_mod3_sinks(inst, r.proof, 2);
      for (const auto& v : a.violations) o.require(false, v);
      o.detail << "n=" << n << ": " << *r.size << " lines, " << a.sinks << " sinks >= " << a.bound << "; ";
    }
  });

  criterion(8, "H hierarchy properties", 600, [&](Outcome& o) {
    std::size_t violations = 0, checked = 0;
    for (const auto& e : structured_corpus()) {
      AxiomSetOracle h(e.qbc);
      auto all = all_partial(e.qbc);
      for (const auto& f : all) {
        for (unsigned k = 2; k <= 4; ++k) {
          ++checked;
          if (h.in_H(f, k) && !h.in_H(f, k + 1)) {
            ++violations;
            o.require(false, "monotonicity on " + e.label);
          }
        }
        for (unsigned m = 2; m <= 3; ++m) {
          if (!h.in_H(f, m)) continue;
          for (const auto& g : all) {
            if (!is_semicompletion(e.qbc.prefix, f, g)) continue;
            ++checked;
            if (!h.in_H(g, m)) {
              ++violations;
              o.require(false, "semicompletion closure on " + e.label);
            }
          }
        }
      }
    }
    Qbc x = clausal("ea", {{1, 2}, {-1, -2}}, {"x", "y"});
    AxiomSetOracle hx(x);
    o.require(!decide(x), "xor witness true");
    o.require(!hx.in_H(Clause(), 2), "empty clause in H(Pi_2)");
    o.require(hx.in_H(Clause(), 3), "empty clause not in H(Pi_3)");
    Qbc relaxed = x;
    relaxed.prefix = canonical_pi2(x.prefix);
    o.require(decide(relaxed), "Pi_2 relaxation false");
    o.detail << checked << " checks, " << violations << " violations ";
  });

  criterion(9, "circuit strategies against H", 600, [&](Outcome& o) {
    std::size_t extracted = 0, compared = 0;
    for (const auto& e : structured_corpus()) {
      if (minimax(e.qbc)) continue;
      CircuitStrategy c = compile_strategy(e.qbc, extract_strategy(e.qbc));
      ++extracted;
      o.require(verify_stratex(alternations(e.qbc), e.qbc, c) == Verdict::Accept, "extracted strategy on " + e.label);
    }
    auto m2 = gen_mod3(2);
    o.require(verify_stratex(3, m2.qbc, mod3_circuit_strategy(2)) == Verdict::Accept, "negated-x strategy at k=3");
    std::size_t rejected = 0;
    for (const auto& e : structured_corpus()) {
      if (e.qbc.prefix.vars_of(Quant::Forall).empty()) continue;
      CircuitStrategy c = constant_strategy(e.qbc, false);
      for (unsigned k = 0; k <= 1; ++k) {
        bool got = verify_stratex(k, e.qbc, c) == Verdict::Accept;
        ++compared;
        rejected += !got;
        o.require(got == stratex_brute_force(k, e.qbc, c), "constant-0 verdict on " + e.label);
      }
    }
    o.detail << extracted << " extracted strategies accepted, " << compared << " constant-0 verdicts ("
             << rejected << " rejections) match brute force ";
  });

  criterion(10, "format round trips", 60, [&](Outcome& o) {
    auto files = round_trip_corpus();
    o.require(files.size() == 50, "corpus size " + std::to_string(files.size()));
    for (const auto& f : files) {
      Qbc q = parse_instance(f.text);
      std::string again = f.name.ends_with(".qcl") ? write_qcl(q) : write_qdimacs(q);
      o.require(again == f.text, f.name);
    }
    std::size_t proofs = 0;
    for (unsigned n = 1; n <= 8; ++n) {
      std::string t = write_proof(gen_separation_proof(gen_separation(n)));
      o.require(write_proof(parse_proof(t)) == t, "separation proof n=" + std::to_string(n));
      ++proofs;
    }
    o.detail << files.size() << " instance files and " << proofs << " proofs byte-stable ";
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
