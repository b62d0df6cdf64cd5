#pragma once

// Exhaustive truth evaluation of QBCs and explicit strategy tables.

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "qures/core.hpp"

namespace qures {

inline constexpr std::size_t kDefaultVarCap = 26;
inline constexpr std::size_t kStrategyInputCap = 20;

// Top-level conjuncts of a matrix with their supports, positioned against a
// prefix. A conjunct is decided once the last of its variables is assigned.
class ConjunctIndex {
 public:
  ConjunctIndex(const Qbc& phi);

  // Conjuncts whose last variable sits at prefix position p.
  const std::vector<std::size_t>& closing_at(std::size_t p) const { return closing_[p]; }
  // Conjuncts with no prefix variable at all.
  const std::vector<std::size_t>& closed_initially() const { return initial_; }
  std::size_t last_position(std::size_t c) const { return last_pos_[c]; }
  std::size_t size() const { return roots_.size(); }

  bool holds(std::size_t c, const PartialAssignment& f) const;
  bool in_support(Var v) const { return v < in_support_.size() && in_support_[v]; }
  // Assigned variables (position < p) that share a conjunct with a variable
  // at position ≥ p.
  const std::vector<Var>& relevant_before(std::size_t p) const { return relevant_[p]; }

 private:
  const Circuit* circuit_;
  std::vector<GateId> roots_;
  std::vector<std::vector<GateId>> cones_;
  std::vector<std::size_t> last_pos_;
  std::vector<std::vector<std::size_t>> closing_;
  std::vector<std::size_t> initial_;
  std::vector<char> in_support_;
  std::vector<std::vector<Var>> relevant_;
  mutable std::vector<char> scratch_;
};

// Memoized game-tree minimax over the prefix.
class GameEvaluator {
 public:
  explicit GameEvaluator(const Qbc& phi, std::size_t cap_vars = kDefaultVarCap);

  bool decide();
  // Value of the game from prefix position `pos` onward, with every variable
  // at an earlier position set in `current`.
  bool value_from(std::size_t pos, PartialAssignment& current);

  const Qbc& qbc() const { return *phi_; }
  std::size_t memo_entries() const;

 private:
  bool rec(std::size_t pos, PartialAssignment& cur);
  bool closes_ok(std::size_t pos, const PartialAssignment& cur) const;

  const Qbc* phi_;
  ConjunctIndex index_;
  std::vector<std::unordered_map<std::uint64_t, bool>> memo_;
};

bool decide(const Qbc& phi, std::size_t cap_vars = kDefaultVarCap);

// σ_x (or τ_y) as a truth table; bit i of the row index is the value of
// inputs[i].
struct StrategyTable {
  Var var = 0;
  std::vector<Var> inputs;
  std::vector<std::uint8_t> values;

  bool lookup(const PartialAssignment& f) const;
  bool operator==(const StrategyTable&) const = default;
};

// Side = Exists for an ∃-strategy, Forall for a ∀-strategy.
struct Strategy {
  Quant side = Quant::Exists;
  std::vector<StrategyTable> tables;

  const StrategyTable* table_for(Var v) const;
  bool operator==(const Strategy&) const = default;
};

// Opposite-side variables preceding v in the prefix, in prefix order.
std::vector<Var> strategy_inputs(const QuantifierPrefix& prefix, Var v);

Strategy extract_strategy(const Qbc& phi, std::size_t cap_vars = kDefaultVarCap);

// ⟨σ,τ⟩: fills the strategy side's variables in prefix order.
PartialAssignment play(const Qbc& phi, const Strategy& s, const PartialAssignment& opposing);

bool verify_strategy(const Qbc& phi, const Strategy& s, std::size_t cap_vars = kDefaultVarCap);

}  // namespace qures
