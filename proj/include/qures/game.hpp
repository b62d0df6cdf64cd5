#pragma once

// Prover-delayer game: delayer strategies, the five strategy conditions, the
// 2^p leaf audit for tree-like proofs, and a game referee.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qures/core.hpp"
#include "qures/proof.hpp"

namespace qures {

// F and s together: score(f) is nullopt exactly when f ∉ F.
struct DelayerStrategy {
  std::function<std::optional<unsigned>(const PartialAssignment&)> score;
  unsigned points = 1;
};

using AxiomMembership = std::function<bool(const PartialAssignment&)>;

inline constexpr std::size_t kMaterializeCap = 15;

// F listed explicitly by scanning every partial assignment of the prefix
// variables (3^N of them).
class MaterializedStrategy {
 public:
  MaterializedStrategy(const Qbc& phi, const DelayerStrategy& strat, std::size_t cap = kMaterializeCap);

  const Qbc& qbc() const { return *phi_; }
  unsigned points() const { return points_; }
  std::size_t scanned() const { return scanned_; }
  const std::vector<PartialAssignment>& members() const { return members_; }
  const std::vector<unsigned>& scores() const { return scores_; }

  // Index of a member of least score that is a semicompletion of h, among
  // those whose score satisfies `accept` (all members when empty).
  std::optional<std::size_t> best_semicompletion(const PartialAssignment& h,
                                                 const std::function<bool(unsigned)>& accept = {}) const;
  std::optional<unsigned> min_semicompletion_score(const PartialAssignment& h) const;

  // Overrides one member's score (mutation tests).
  void set_score(std::size_t member, unsigned s) { scores_[member] = s; }
  std::optional<std::size_t> find(const PartialAssignment& f) const;

 private:
  const Qbc* phi_;
  unsigned points_;
  std::size_t scanned_ = 0;
  std::vector<PartialAssignment> members_;
  std::vector<unsigned> scores_;
};

struct ConditionResult {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::string counterexample;
};

struct ConditionReport {
  std::vector<ConditionResult> conditions;  // fixed order, see condition_names()
  bool all_passed() const;
  const ConditionResult& get(const std::string& name) const;
};

const std::vector<std::string>& condition_names();

ConditionReport check_conditions(const MaterializedStrategy& strat, const AxiomMembership& in_h);

struct DescentStep {
  std::size_t line;  // 0-based proof line
  PartialAssignment semicompletion;
  unsigned score;
  std::string how;
};

struct LeafAudit {
  std::size_t leaves = 0;
  std::size_t bound = 1;  // 2^p, saturating
  bool bound_ok = false;
  bool witness_ok = false;
  std::string witness_failure;
  std::vector<DescentStep> witness;
};

// Throws on a proof that is not tree-like.
LeafAudit leaf_bound_audit(const Proof& proof, const MaterializedStrategy& strat);

struct ProverMove {
  enum class Kind { Restrict, AssignForall, Select };
  Kind kind = Kind::Select;
  std::vector<Var> keep;  // Restrict
  Var var = 0;            // AssignForall, Select
  bool value = false;     // AssignForall
};

class ProverPolicy {
 public:
  virtual ~ProverPolicy() = default;
  virtual ProverMove next(const Qbc& phi, const PartialAssignment& current) = 0;
  // Value picked when the delayer gives a choice on v.
  virtual bool choose(const Qbc& phi, const PartialAssignment& current, Var v) = 0;
};

class RandomProver : public ProverPolicy {
 public:
  explicit RandomProver(std::uint64_t seed) : rng_(seed) {}
  ProverMove next(const Qbc& phi, const PartialAssignment& current) override;
  bool choose(const Qbc& phi, const PartialAssignment& current, Var v) override;

 private:
  std::mt19937_64 rng_;
};

struct GameRound {
  ProverMove move;
  PartialAssignment prover_result;
  PartialAssignment response;
  unsigned score = 0;
  bool choice_given = false;
};

struct GameTranscript {
  PartialAssignment start;
  std::vector<GameRound> rounds;
  PartialAssignment final_assignment;
  bool reached_axiom = false;
  // Points are the score of the final response; claimed_vars lists the
  // variables on which the delayer gave a choice, still set at the end.
  unsigned points = 0;
  std::vector<Var> claimed_vars;
};

// Referee for the informal game; the strategy conditions are the normative
// object. Throws on an illegal prover move, naming the rule.
GameTranscript play_game(const MaterializedStrategy& strat, const AxiomMembership& in_h, ProverPolicy& prover,
                         std::size_t max_rounds);

}  // namespace qures
