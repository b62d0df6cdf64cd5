#pragma once

// Circuit ∀-strategies and their verification against H(Φ,Π_{k+2}).

#include <cstddef>
#include <optional>
#include <vector>

#include "qures/core.hpp"
#include "qures/proof.hpp"
#include "qures/semantics.hpp"

namespace qures {

// C_v over the Input gates `inputs`, which must be exactly the opposite-side
// variables before v, in prefix order (X_{<y} for a universal y).
struct StrategyCircuit {
  Var var = 0;
  std::vector<Var> inputs;
  Circuit circuit;
  bool operator==(const StrategyCircuit&) const = default;
};

struct CircuitStrategy {
  Quant side = Quant::Forall;
  std::vector<StrategyCircuit> parts;

  const StrategyCircuit* part_for(Var y) const;
  bool operator==(const CircuitStrategy&) const = default;
};

// Throws Error unless every variable of the strategy's side has exactly one
// part with the right inputs.
void validate_strategy(const Qbc& phi, const CircuitStrategy& strat);

// Minterm circuits for a table strategy.
CircuitStrategy compile_strategy(const Qbc& phi, const Strategy& s);
// Back to truth tables (at most kStrategyInputCap inputs per part).
Strategy tabulate(const Qbc& phi, const CircuitStrategy& strat);

// C_{y_i} = Not(x_i) over inputs x_1..x_i.
CircuitStrategy mod3_circuit_strategy(unsigned n);
// Every C_y constant 0.
CircuitStrategy constant_strategy(const Qbc& phi, bool value);

// Fills the strategy side's variables in prefix order from `opposing`.
PartialAssignment play(const Qbc& phi, const CircuitStrategy& strat, const PartialAssignment& opposing);

struct StratexReport {
  std::size_t sigmas = 0;
  std::size_t in_h_queries = 0;
  std::size_t sweeps = 0;  // σ needing the full sub-assignment sweep
  std::optional<PartialAssignment> counterexample;  // ⟨τ,σ⟩ with no H-member below it
  std::vector<PartialAssignment> witnesses;         // per σ, in enumeration order
};

// Universal strategies only. Accept iff every ⟨τ,σ⟩ extends some a with in_H(a, k+2).
Verdict verify_stratex(unsigned k, const Qbc& phi, const CircuitStrategy& strat,
                       std::size_t cap_vars = kDefaultVarCap, StratexReport* report = nullptr);

// Reference: tests every sub-assignment of every ⟨τ,σ⟩ without shortcuts.
bool stratex_brute_force(unsigned k, const Qbc& phi, const CircuitStrategy& strat,
                         std::size_t cap_vars = kDefaultVarCap);

}  // namespace qures
