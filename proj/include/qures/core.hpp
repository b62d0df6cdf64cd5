#pragma once

// Syntax layer: variables, quantifier prefixes, clauses and partial
// assignments, gate-level circuits, and quantified Boolean circuits (QBCs).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qures/error.hpp"

namespace qures {

using Var = std::uint32_t;

enum class Quant : std::uint8_t { Forall, Exists };

inline Quant flip(Quant q) { return q == Quant::Forall ? Quant::Exists : Quant::Forall; }

struct Literal {
  Var var = 0;
  bool positive = true;

  Literal negated() const { return {var, !positive}; }
  auto operator<=>(const Literal&) const = default;
};

// A set of literals with at most one literal per variable, kept sorted by
// variable. Equality is set equality.
class Clause {
 public:
  Clause() = default;

  // Duplicate literals collapse; a complementary pair throws.
  static Clause from_literals(std::vector<Literal> lits);

  const std::vector<Literal>& literals() const { return lits_; }
  bool empty() const { return lits_.empty(); }
  std::size_t size() const { return lits_.size(); }
  std::vector<Var> vars() const;

  std::optional<Literal> literal_on(Var v) const;
  bool contains(Literal l) const;
  Clause without(Var v) const;

  // this ⊆ other
  bool subsumes(const Clause& other) const;

  auto operator<=>(const Clause&) const = default;
  bool operator==(const Clause&) const = default;

 private:
  std::vector<Literal> lits_;
};

struct ClauseHash {
  std::size_t operator()(const Clause& c) const noexcept;
};

// Map from variables to {0,1}, stored as an array keyed by variable id
// (-1 marks "unset").
class PartialAssignment {
 public:
  PartialAssignment() = default;
  explicit PartialAssignment(std::size_t num_vars) : values_(num_vars, -1) {}

  std::size_t num_vars() const { return values_.size(); }
  bool defined(Var v) const { return values_[v] >= 0; }
  bool value(Var v) const { return values_[v] == 1; }
  std::optional<bool> get(Var v) const {
    if (values_[v] < 0) return std::nullopt;
    return values_[v] == 1;
  }
  std::int8_t raw(Var v) const { return values_[v]; }

  void set(Var v, bool b) { values_[v] = b ? 1 : 0; }
  void unset(Var v) { values_[v] = -1; }
  PartialAssignment with(Var v, bool b) const {
    PartialAssignment r = *this;
    r.set(v, b);
    return r;
  }

  std::vector<Var> domain() const;
  std::size_t domain_size() const;
  bool empty() const { return domain_size() == 0; }

  PartialAssignment restricted(std::span<const Var> keep) const;
  // other ⊆ this (as functions)
  bool extends(const PartialAssignment& other) const;
  bool agrees(const PartialAssignment& other) const;

  std::span<const std::int8_t> values() const { return values_; }

  bool operator==(const PartialAssignment&) const = default;

 private:
  std::vector<std::int8_t> values_;
};

struct AssignmentHash {
  std::size_t operator()(const PartialAssignment& a) const noexcept;
};

// assign(C): the unique assignment on vars(C) falsifying C.
PartialAssignment to_assignment(const Clause& c, std::size_t num_vars);
// clause(f): the unique clause on dom(f) falsified by f.
Clause to_clause(const PartialAssignment& f);

// (c1 \ {L}) ∪ (c2 \ {¬L}) where L is on v. Throws when v is not
// complementary across the two clauses or the union is tautological.
Clause resolvent(const Clause& c1, const Clause& c2, Var v);

enum class Order { StrictlyBefore, SameBlock, StrictlyAfter };

struct PrefixEntry {
  Quant quant = Quant::Exists;
  Var var = 0;
  bool operator==(const PrefixEntry&) const = default;
};

struct QuantifierBlock {
  Quant quant;
  std::vector<Var> vars;
  bool operator==(const QuantifierBlock&) const = default;
};

struct PrefixClass {
  unsigned pi = 0;
  unsigned sigma = 0;
  bool operator==(const PrefixClass&) const = default;
};

// Ordered quantifier prefix over a universe of `num_vars` variable ids.
// Variables of the universe need not all occur.
class QuantifierPrefix {
 public:
  QuantifierPrefix() = default;
  QuantifierPrefix(std::size_t num_vars, std::vector<PrefixEntry> entries);

  std::size_t num_vars() const { return position_.size(); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<PrefixEntry>& entries() const { return entries_; }
  const PrefixEntry& operator[](std::size_t i) const { return entries_[i]; }

  bool contains(Var v) const { return v < position_.size() && position_[v] >= 0; }
  std::size_t position(Var v) const;
  std::size_t block(Var v) const;
  Quant quant(Var v) const;
  std::size_t num_blocks() const { return num_blocks_; }

  Order order(Var u, Var v) const;
  // u ⪯ v
  bool precedes(Var u, Var v) const { return block(u) <= block(v); }
  // U ⪯ v
  bool all_precede(std::span<const Var> us, Var v) const;

  std::vector<QuantifierBlock> blocks() const;
  PrefixClass prefix_class() const;
  bool is_pi(unsigned i) const { return i >= prefix_class().pi; }
  bool is_sigma(unsigned i) const { return i >= prefix_class().sigma; }

  // Variable of `vars` appearing last in the prefix.
  std::optional<Var> last(std::span<const Var> vars) const;

  std::vector<Var> vars() const;
  std::vector<Var> vars_of(Quant q) const;

  bool operator==(const QuantifierPrefix& o) const { return entries_ == o.entries_ && num_vars() == o.num_vars(); }

 private:
  std::vector<PrefixEntry> entries_;
  std::vector<std::int32_t> position_;
  std::vector<std::uint32_t> block_;
  std::size_t num_blocks_ = 0;
};

enum class GateKind : std::uint8_t { Const, Input, And, Or, Not };

using GateId = std::uint32_t;

struct Gate {
  GateKind kind = GateKind::Const;
  Var var = 0;         // Input
  bool value = false;  // Const
  std::vector<GateId> inputs;
  bool operator==(const Gate&) const = default;
};

// Topologically ordered gate list: every gate input refers to an earlier gate.
class Circuit {
 public:
  GateId add_const(bool b);
  GateId add_input(Var v);
  GateId add_and(std::vector<GateId> in);
  GateId add_or(std::vector<GateId> in);
  GateId add_not(GateId in);
  void set_output(GateId g);

  const std::vector<Gate>& gates() const { return gates_; }
  const Gate& gate(GateId g) const { return gates_[g]; }
  bool has_output() const { return output_.has_value(); }
  GateId output() const;
  std::size_t size() const { return gates_.size(); }

  // Single bottom-up pass; throws naming the first referenced variable that
  // `f` leaves unset.
  bool eval(const PartialAssignment& f) const;

  std::vector<Var> support() const;
  std::vector<Var> support_of(GateId g) const;
  // Replaces inputs on dom(a) by constants; gate numbering is preserved.
  Circuit substitute(const PartialAssignment& a) const;
  // Children of nested top-level AND gates, or the output alone.
  std::vector<GateId> conjuncts() const;
  // Gates in the cone of g, in topological order.
  std::vector<GateId> cone(GateId g) const;

  bool operator==(const Circuit&) const = default;

 private:
  GateId push(Gate g);

  std::vector<Gate> gates_;
  std::optional<GateId> output_;
};

// Quantified Boolean circuit Φ = P : φ.
struct Qbc {
  QuantifierPrefix prefix;
  Circuit matrix;
  // Present iff the matrix is a conjunction of exactly these clauses.
  std::optional<std::vector<Clause>> clauses;
  // Display names; empty entries fall back to "v<id+1>".
  std::vector<std::string> names;
  // Free-form metadata carried through the text formats.
  std::vector<std::string> comments;

  std::size_t num_vars() const { return prefix.num_vars(); }
  std::string var_name(Var v) const;
  std::optional<Var> find_var(const std::string& name) const;

  // Throws Error on a broken invariant.
  void validate() const;

  static Qbc clausal(QuantifierPrefix prefix, std::vector<Clause> clauses, std::vector<std::string> names = {});
};

// Φ[a]: drop dom(a) from the prefix, turn every quantifier of v ⪵ last(a)
// existential, and substitute a into the matrix.
QuantifierPrefix instantiate_prefix(const QuantifierPrefix& prefix, const PartialAssignment& a);
Qbc instantiate(const Qbc& phi, const PartialAssignment& a);

bool is_semicompletion(const QuantifierPrefix& prefix, const PartialAssignment& f, const PartialAssignment& g);

std::string format_assignment(const Qbc& phi, const PartialAssignment& a);
std::string format_clause(const Qbc& phi, const Clause& c);

}  // namespace qures
