#pragma once

// Text formats (QDIMACS, qcl circuits, proofs, circuit strategies) and the
// JSON run report.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qures/core.hpp"
#include "qures/proof.hpp"
#include "qures/stratex.hpp"

namespace qures {

// Variable i of the file is id i-1. Comment lines are kept in Qbc::comments.
Qbc parse_qdimacs(std::string_view text);
std::string write_qdimacs(const Qbc& phi);

// #qcl 1
// q e|a <name>...
// g <id> = and|or|not(<arg>, ...)      args: gate ids, variable names, 0, 1
// output <arg>
Qbc parse_qcl(std::string_view text);
std::string write_qcl(const Qbc& phi);

// Fills Qbc::clauses when the matrix is an AND of clauses over inputs.
void detect_clauses(Qbc& phi);

// <id>: <lit>... 0 ax | res <i> <j> <var> | ae <i> <lit>
Proof parse_proof(std::string_view text);
std::string write_proof(const Proof& proof);

// #qcs 1
// side a|e
// part <var> [<input>...]      followed by the part's g/output lines
CircuitStrategy parse_strategy(std::string_view text, const Qbc& phi);
std::string write_strategy(const Qbc& phi, const CircuitStrategy& strat);

// Reads qcl when the text starts with "#qcl", QDIMACS otherwise.
Qbc parse_instance(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view text);

std::string sha256_hex(std::string_view data);

class Report {
 public:
  explicit Report(std::string command);

  void add_input(const std::string& path, std::string_view content);
  nlohmann::json& parameters() { return doc_["parameters"]; }
  nlohmann::json& outcome() { return doc_["outcome"]; }
  void add_counterexample(nlohmann::json c) { doc_["counterexamples"].push_back(std::move(c)); }
  void set_timing(const std::string& key, double seconds) { doc_["timings"][key] = seconds; }

  // Timings are written last so the rest compares byte for byte.
  std::string dump() const;
  const nlohmann::json& doc() const { return doc_; }

 private:
  nlohmann::json doc_;
};

}  // namespace qures
