#pragma once

// Prefix relaxations, Πk block-assignment enumeration, and the axiom-set
// oracle H(Φ,Πk).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qures/core.hpp"
#include "qures/semantics.hpp"

namespace qures {

bool is_relaxation(const QuantifierPrefix& relaxed, const QuantifierPrefix& original);

QuantifierPrefix canonical_pi2(const QuantifierPrefix& prefix);

// Block index in [1..k] per prefix variable; 0 for variables outside the prefix.
struct BlockAssignment {
  unsigned k = 0;
  std::vector<unsigned> block;

  // Variables sorted by block, original order within a block.
  QuantifierPrefix to_prefix(const QuantifierPrefix& original) const;
  bool operator==(const BlockAssignment&) const = default;
};

// Calls `visit` on every parity- and constraint-respecting block assignment,
// ∀-variables tried late-first. Stops when `visit` returns false.
void for_each_pik(const QuantifierPrefix& prefix, unsigned k, const std::function<bool(const BlockAssignment&)>& visit);
std::vector<BlockAssignment> enumerate_pik(const QuantifierPrefix& prefix, unsigned k);

// Like for_each_pik, but every ∃-variable sits in the earliest block its
// constraints allow. Moving an ∃-variable earlier can only make the sentence
// false-er, so these assignments decide "some Πk-relaxation is false".
void for_each_pik_dominant(const QuantifierPrefix& prefix, unsigned k,
                           const std::function<bool(const BlockAssignment&)>& visit);

// {v | v ⪯ last(a)} \ dom(a)
std::vector<Var> holes(const QuantifierPrefix& prefix, const PartialAssignment& a);

// H(Φ,Πk) membership with a per-instance cache.
class AxiomSetOracle {
 public:
  explicit AxiomSetOracle(Qbc phi, std::size_t cap_vars = kDefaultVarCap);

  bool in_H(const PartialAssignment& a, unsigned k);
  bool in_H(const Clause& c, unsigned k) { return in_H(to_assignment(c, phi_.num_vars()), k); }

  const Qbc& qbc() const { return phi_; }
  std::size_t decide_calls() const { return decide_calls_; }
  std::size_t cache_hits() const { return cache_hits_; }
  std::size_t cache_size() const { return cache_.size(); }

 private:
  Qbc phi_;
  std::size_t cap_vars_;
  std::unordered_map<std::string, bool> cache_;
  std::size_t decide_calls_ = 0;
  std::size_t cache_hits_ = 0;
};

// Uncached reference: exhaustive over all block assignments.
bool in_H_exhaustive(const Qbc& phi, const PartialAssignment& a, unsigned k, std::size_t cap_vars = kDefaultVarCap);

}  // namespace qures
