#pragma once

// Exhaustive minimum-size proof search and the mod-3 sink audit.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qures/core.hpp"
#include "qures/families.hpp"
#include "qures/proof.hpp"

namespace qures {

enum class SearchMode { Dag, Tree };

struct SearchOptions {
  SearchMode mode = SearchMode::Dag;
  std::size_t cap = 20;             // largest proof size tried
  std::uint64_t seed = 0;           // pivot order shuffle (tree mode)
  std::size_t node_limit = 50'000'000;  // expansions before a ResourceError
  std::size_t cap_vars = kDefaultVarCap;
};

struct SearchResult {
  std::optional<std::size_t> size;  // nullopt: none within cap
  Proof proof;
  std::size_t expansions = 0;
  std::size_t axiom_pool = 0;  // dag mode
  std::size_t oracle_queries = 0;
};

// Uses H(Φ,Π_{k+2}).
SearchResult min_proof_size(const Qbc& phi, unsigned k, const SearchOptions& opt);
// Same search over an arbitrary axiom oracle.
SearchResult min_proof_size(const Qbc& phi, AxiomOracle& oracle, const SearchOptions& opt);

// Subset-minimal members of the oracle with at most `max_width` variables.
std::vector<Clause> minimal_axioms(const Qbc& phi, AxiomOracle& oracle, std::size_t max_width);

struct SinkAudit {
  std::size_t sinks = 0;
  std::size_t bound = 1;  // 2^{n-⌈t/2⌉-1}, at least 1
  bool agrees_ok = true;      // every f on x_1..x_{n-⌈t/2⌉} agrees with a sink
  bool tail_ok = true;        // every sink touches the last ⌈t/2⌉ levels
  bool holes_ok = true;       // every sink has at most one hole
  bool bound_ok = true;
  std::vector<std::string> violations;
  // Sinks with two or more holes whose clause in_H rejects.
  std::size_t reflagged = 0;

  bool ok() const { return agrees_ok && tail_ok && holes_ok && bound_ok; }
};

// Throws unless relaxing_check(t-2) accepts the proof.
SinkAudit audit_mod3_sinks(const Mod3Instance& inst, const Proof& proof, unsigned t);
// The same checks on explicit sink labels, no acceptance precondition.
SinkAudit audit_mod3_sink_labels(const Mod3Instance& inst, const std::vector<PartialAssignment>& sinks, unsigned t);

}  // namespace qures
