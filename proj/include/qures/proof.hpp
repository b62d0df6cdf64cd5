#pragma once

// QU-resolution proofs: line objects, axiom oracles, the checker, the
// relaxing ensemble check, the graph view G(π), and proof generation.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "qures/core.hpp"
#include "qures/relax.hpp"

namespace qures {

enum class Rule : std::uint8_t { Axiom, Resolve, ForallElim };

// Line references are 0-based here; the text format is 1-based.
struct ProofLine {
  Clause clause;
  Rule rule = Rule::Axiom;
  std::size_t left = 0;   // Resolve, ForallElim
  std::size_t right = 0;  // Resolve
  Var pivot = 0;          // Resolve
  Literal eliminated;     // ForallElim
  bool operator==(const ProofLine&) const = default;
};

struct Proof {
  std::vector<ProofLine> lines;
  std::size_t size() const { return lines.size(); }
  bool operator==(const Proof&) const = default;
};

class ProofBuilder {
 public:
  std::size_t axiom(Clause c);
  std::size_t resolve(std::size_t i, std::size_t j, Var pivot);
  std::size_t forall_elim(std::size_t i, Literal lit);
  // Repeated ∀-elimination: strips trailing ∀-literals while the rule applies,
  // latest prefix position first.
  std::size_t forall_reduce(std::size_t i, const QuantifierPrefix& prefix);

  const Clause& clause(std::size_t i) const { return proof_.lines[i].clause; }
  std::size_t size() const { return proof_.size(); }
  Proof take() { return std::move(proof_); }

 private:
  Proof proof_;
};

bool forall_elim_allowed(const QuantifierPrefix& prefix, const Clause& from, Literal lit);

// Pluggable axiom membership.
class AxiomOracle {
 public:
  enum class Kind { ExplicitSet, MatrixClauses, RelaxingH };

  static AxiomOracle explicit_set(std::vector<Clause> clauses);
  static AxiomOracle matrix_clauses(const Qbc& phi);
  // H(Φ,Π_level)
  static AxiomOracle relaxing(const Qbc& phi, unsigned level, std::size_t cap_vars = kDefaultVarCap);

  Kind kind() const { return kind_; }
  unsigned level() const { return level_; }

  bool contains(const Clause& c);
  // Some member falsified by a (assign(C) ⊆ a). For RelaxingH only clause(a)
  // itself is tried.
  std::optional<Clause> member_falsified_by(const PartialAssignment& a);

  std::size_t oracle_calls() const;
  // Explicit members (empty for RelaxingH).
  const std::vector<Clause>& members() const { return members_; }
  AxiomSetOracle* relax_oracle() { return relax_.get(); }

 private:
  Kind kind_ = Kind::ExplicitSet;
  unsigned level_ = 0;
  std::vector<Clause> members_;
  std::unordered_set<Clause, ClauseHash> set_;
  std::size_t num_vars_ = 0;
  std::shared_ptr<AxiomSetOracle> relax_;
};

struct ProofReport {
  bool valid = false;
  bool falsity_proof = false;
  std::size_t size = 0;
  std::optional<std::size_t> error_line;  // 0-based
  std::string error_reason;
  // decide() calls spent on each line's oracle check
  std::vector<std::size_t> oracle_cost;
};

ProofReport check_proof(const Qbc& phi, const Proof& proof, AxiomOracle& oracle);

enum class Verdict { Accept, Reject, OracleOverflow };
const char* to_string(Verdict v);

// Accepts iff π is a falsity proof of Φ from H(Φ,Π_{k+2}).
Verdict relaxing_check(unsigned k, const Qbc& phi, const Proof& proof, std::size_t cap_vars = kDefaultVarCap,
                       ProofReport* report = nullptr);

struct DagNode {
  PartialAssignment label;
  std::vector<std::size_t> children;  // out-edges: derived → premise
};

struct GraphViolation {
  std::size_t node;
  std::string property;  // "alpha", "beta", "gamma", "degree"
  std::string reason;
};

struct ProofDag {
  std::vector<DagNode> nodes;
  std::vector<GraphViolation> violations;

  std::vector<std::size_t> in_degree() const;
};

// Structural (β)(γ) checks always; (α) when an oracle is given.
ProofDag build_graph(const Qbc& phi, const Proof& proof, AxiomOracle* oracle = nullptr);
std::vector<GraphViolation> check_graph(const Qbc& phi, const ProofDag& g, AxiomOracle* oracle = nullptr);
Proof graph_to_proof(const Qbc& phi, const ProofDag& g);

struct ProofStats {
  std::size_t size = 0;
  bool tree_like = false;
  std::size_t sinks = 0;
  // Leaves of the tree obtained by unfolding G(π) from the last line;
  // saturates at SIZE_MAX.
  std::size_t leaves = 0;
};

ProofStats proof_stats(const Proof& proof);

// Drops lines the last line does not depend on, keeping relative order.
Proof prune_unreachable(const Proof& proof);

// Tree-like falsity proof by descent over the prefix.
Proof generate_falsity_proof(const Qbc& phi, AxiomOracle& oracle, std::size_t cap_vars = kDefaultVarCap);

}  // namespace qures
