#pragma once

// The two formula families: the separation family with its linear proofs and
// delayer strategy, and the mod-3 family with its winning ∀-strategy.

#include <cstddef>
#include <optional>
#include <vector>

#include "qures/core.hpp"
#include "qures/game.hpp"
#include "qures/proof.hpp"
#include "qures/semantics.hpp"

namespace qures {

// Variable layout: X0 occupies ids 0..3; level i ≥ 1 starts at
// base = 4 + 9(i-1) with x'_{i,j,k} at base+2j+k, y_i at base+4 and
// x_{i,j,k} at base+5+2j+k.
struct SeparationInstance {
  unsigned n = 0;
  Qbc qbc;

  Var x(unsigned i, unsigned j, unsigned k) const;
  Var xp(unsigned i, unsigned j, unsigned k) const;
  Var y(unsigned i) const;
  // 0 for X0; i for the level-i variables.
  unsigned level_of(Var v) const;
};

SeparationInstance gen_separation(unsigned n);

Proof gen_separation_proof(const SeparationInstance& inst);
inline std::size_t separation_proof_size(unsigned n) { return 30 * static_cast<std::size_t>(n) + 6; }

bool is_normal_realization(const SeparationInstance& inst, const PartialAssignment& f, unsigned level);
bool is_funny_realization(const SeparationInstance& inst, const PartialAssignment& f, unsigned level);

struct AssignmentClass {
  enum class Kind { Normal, Funny, Neither };
  Kind kind = Kind::Neither;
  unsigned level = 0;  // ℓ for Normal, m for Funny
  unsigned score() const { return level; }
};

// Funny/normal tests evaluated independently of each other.
bool is_normal_assignment(const SeparationInstance& inst, const PartialAssignment& f, unsigned* score = nullptr);
bool is_funny_assignment(const SeparationInstance& inst, const PartialAssignment& f, unsigned* score = nullptr);
AssignmentClass classify_assignment(const SeparationInstance& inst, const PartialAssignment& f);

// p = n - ⌈d/2⌉ + 1
unsigned separation_points(unsigned n, unsigned d);
DelayerStrategy delayer_strategy(const SeparationInstance& inst, unsigned d);

// Variable layout: x_i at 2(i-1), y_i at 2(i-1)+1.
struct Mod3Instance {
  unsigned n = 0;
  unsigned j = 0;
  Qbc qbc;

  Var x(unsigned i) const { return 2 * (i - 1); }
  Var y(unsigned i) const { return 2 * (i - 1) + 1; }
};

Mod3Instance gen_mod3(unsigned n, unsigned j = 0);
// j + Σ(x_i + y_i) ≢ n (mod 3) on a total assignment.
bool mod3_predicate(unsigned n, unsigned j, const PartialAssignment& f);

Strategy mod3_forall_strategy(unsigned n);

}  // namespace qures
