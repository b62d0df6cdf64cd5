#include "qures/io.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "qures/error.hpp"

namespace qures {

namespace {

struct Line {
  std::size_t no;
  std::string text;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t no = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++no;
    std::string t = trim(text.substr(start, end - start));
    if (!t.empty()) out.push_back({no, std::move(t)});
    start = end + 1;
  }
  return out;
}

bool is_comment(const std::string& t) { return t == "c" || t.rfind("c ", 0) == 0 || t.rfind("c\t", 0) == 0; }
std::string comment_body(const std::string& t) { return t.size() > 2 ? t.substr(2) : std::string(); }

std::vector<std::string> words(const std::string& t) {
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

long long to_int(const std::string& w, std::size_t line) {
  long long v = 0;
  auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (ec != std::errc() || p != w.data() + w.size()) throw ParseError(line, "expected an integer, got '" + w + "'");
  return v;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  for (char ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '\'' && ch != '.') return false;
  return true;
}

std::string lit_text(Literal l) { return (l.positive ? "" : "-") + std::to_string(l.var + 1); }

Literal parse_lit(const std::string& w, std::size_t line) {
  long long v = to_int(w, line);
  if (v == 0) throw ParseError(line, "0 is not a literal");
  return Literal{static_cast<Var>((v < 0 ? -v : v) - 1), v > 0};
}

// Shared gate-line reader for qcl bodies and strategy parts.
class GateReader {
 public:
  using Resolve = std::function<std::optional<Var>(const std::string&)>;
  explicit GateReader(Resolve resolve) : resolve_(std::move(resolve)) {}

  void gate(const std::string& t, std::size_t line) {
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(line, "gate line needs '='");
    auto lhs = words(t.substr(0, eq));
    if (lhs.size() != 2) throw ParseError(line, "expected 'g <id> = ...'");
    long long id = to_int(lhs[1], line);
    if (id < 2) throw ParseError(line, "gate ids start at 2; 0 and 1 denote constants");
    if (ids_.count(id)) throw ParseError(line, "gate " + lhs[1] + " defined twice");
    std::string rhs = trim(t.substr(eq + 1));
    std::size_t open = rhs.find('(');
    if (open == std::string::npos || rhs.back() != ')') throw ParseError(line, "expected op(args)");
    std::string op = trim(rhs.substr(0, open));
    std::string inner = trim(rhs.substr(open + 1, rhs.size() - open - 2));
    std::vector<GateId> args;
    if (!inner.empty()) {
      std::size_t s = 0;
      while (true) {
        std::size_t c = inner.find(',', s);
        std::string a = trim(inner.substr(s, c == std::string::npos ? std::string::npos : c - s));
        args.push_back(arg(a, line));
        if (c == std::string::npos) break;
        s = c + 1;
      }
    }
    GateId g;
    if (op == "and" || op == "or") {
      if (args.empty()) throw ParseError(line, op + "() needs at least one argument");
      g = op == "and" ? circuit.add_and(std::move(args)) : circuit.add_or(std::move(args));
    } else if (op == "not") {
      if (args.size() != 1) throw ParseError(line, "not() takes one argument");
      g = circuit.add_not(args[0]);
    } else {
      throw ParseError(line, "unknown gate '" + op + "'");
    }
    ids_[id] = g;
  }

  void declare_input(Var v) { inputs_.emplace(v, circuit.add_input(v)); }

  void output(const std::string& a, std::size_t line) {
    if (circuit.has_output()) throw ParseError(line, "second output line");
    circuit.set_output(arg(a, line));
  }

  Circuit circuit;

 private:
  GateId arg(const std::string& a, std::size_t line) {
    if (a.empty()) throw ParseError(line, "empty gate argument");
    if (a == "0" || a == "1") {
      auto& slot = consts_[a == "1"];
      if (!slot) slot = circuit.add_const(a == "1");
      return *slot;
    }
    if (std::isdigit(static_cast<unsigned char>(a[0]))) {
      auto it = ids_.find(to_int(a, line));
      if (it == ids_.end()) throw ParseError(line, "gate " + a + " used before its definition");
      return it->second;
    }
    auto v = resolve_(a);
    if (!v) throw ParseError(line, "unknown variable '" + a + "'");
    auto [it, fresh] = inputs_.emplace(*v, 0);
    if (fresh) it->second = circuit.add_input(*v);
    return it->second;
  }

  Resolve resolve_;
  std::map<long long, GateId> ids_;
  std::map<Var, GateId> inputs_;
  std::optional<GateId> consts_[2];
};

// Gate lines for c in topological order; Input and Const gates are inlined.
void write_gates(std::ostringstream& out, const Circuit& c, const std::function<std::string(Var)>& name) {
  std::vector<std::string> ref(c.size());
  std::size_t next = 2;
  for (GateId g = 0; g < c.size(); ++g) {
    const Gate& gt = c.gate(g);
    switch (gt.kind) {
      case GateKind::Const: ref[g] = gt.value ? "1" : "0"; continue;
      case GateKind::Input: ref[g] = name(gt.var); continue;
      default: break;
    }
    ref[g] = std::to_string(next++);
    out << "g " << ref[g] << " = " << (gt.kind == GateKind::And ? "and" : gt.kind == GateKind::Or ? "or" : "not") << "(";
    for (std::size_t i = 0; i < gt.inputs.size(); ++i) out << (i ? ", " : "") << ref[gt.inputs[i]];
    out << ")\n";
  }
  out << "output " << ref[c.output()] << "\n";
}

}  // namespace

Qbc parse_qdimacs(std::string_view text) {
  std::vector<std::string> comments;
  std::optional<std::size_t> nv, nc;
  std::vector<PrefixEntry> entries;
  std::vector<char> seen;
  std::vector<Clause> clauses;
  std::size_t last_line = 0;
  for (const auto& [no, t] : split_lines(text)) {
    last_line = no;
    if (is_comment(t)) {
      comments.push_back(comment_body(t));
      continue;
    }
    auto w = words(t);
    if (w[0] == "p") {
      if (nv) throw ParseError(no, "second problem line");
      if (w.size() != 4 || w[1] != "cnf") throw ParseError(no, "expected 'p cnf <vars> <clauses>'");
      long long v = to_int(w[2], no), c = to_int(w[3], no);
      if (v < 0 || c < 0) throw ParseError(no, "negative count in problem line");
      nv = static_cast<std::size_t>(v);
      nc = static_cast<std::size_t>(c);
      seen.assign(*nv, 0);
      continue;
    }
    if (!nv) throw ParseError(no, "missing problem line");
    if (w.back() != "0") throw ParseError(no, "line is not terminated by 0");
    if (w[0] == "a" || w[0] == "e") {
      if (!clauses.empty()) throw ParseError(no, "quantifier line after the first clause");
      Quant q = w[0] == "a" ? Quant::Forall : Quant::Exists;
      for (std::size_t i = 1; i + 1 < w.size(); ++i) {
        long long v = to_int(w[i], no);
        if (v <= 0 || static_cast<std::size_t>(v) > *nv) throw ParseError(no, "variable " + w[i] + " out of range");
        if (seen[v - 1]) throw ParseError(no, "variable " + w[i] + " quantified twice");
        seen[v - 1] = 1;
        entries.push_back({q, static_cast<Var>(v - 1)});
      }
      continue;
    }
    std::vector<Literal> lits;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      Literal l = parse_lit(w[i], no);
      if (l.var >= *nv) throw ParseError(no, "variable " + std::to_string(l.var + 1) + " out of range");
      if (!seen[l.var]) throw ParseError(no, "literal on unquantified variable " + std::to_string(l.var + 1));
      lits.push_back(l);
    }
    try {
      clauses.push_back(Clause::from_literals(std::move(lits)));
    } catch (const Error& e) {
      throw ParseError(no, e.what());
    }
  }
  if (!nv) throw ParseError(last_line, "missing problem line");
  if (clauses.size() != *nc)
    throw ParseError(last_line, "problem line announces " + std::to_string(*nc) + " clauses, found " +
                                    std::to_string(clauses.size()));
  Qbc q = Qbc::clausal(QuantifierPrefix(*nv, std::move(entries)), std::move(clauses));
  q.comments = std::move(comments);
  return q;
}

std::string write_qdimacs(const Qbc& phi) {
  if (!phi.clauses) throw Error("QDIMACS needs a clausal matrix");
  std::ostringstream out;
  for (const auto& c : phi.comments) out << "c " << c << "\n";
  out << "p cnf " << phi.num_vars() << " " << phi.clauses->size() << "\n";
  const auto& es = phi.prefix.entries();
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i == 0 || es[i].quant != es[i - 1].quant) out << (es[i].quant == Quant::Forall ? "a" : "e");
    out << " " << es[i].var + 1;
    if (i + 1 == es.size() || es[i + 1].quant != es[i].quant) out << " 0\n";
  }
  for (const auto& c : *phi.clauses) {
    for (const auto& l : c.literals()) out << lit_text(l) << " ";
    out << "0\n";
  }
  return out.str();
}

void detect_clauses(Qbc& phi) {
  const Circuit& c = phi.matrix;
  std::vector<Clause> out;
  auto lit_of = [&](GateId g) -> std::optional<Literal> {
    const Gate& gt = c.gate(g);
    if (gt.kind == GateKind::Input) return Literal{gt.var, true};
    if (gt.kind == GateKind::Not && c.gate(gt.inputs[0]).kind == GateKind::Input)
      return Literal{c.gate(gt.inputs[0]).var, false};
    return std::nullopt;
  };
  phi.clauses.reset();
  for (GateId g : c.conjuncts()) {
    const Gate& gt = c.gate(g);
    std::vector<Literal> lits;
    if (gt.kind == GateKind::Const) {
      if (gt.value) continue;
    } else if (auto l = lit_of(g)) {
      lits.push_back(*l);
    } else if (gt.kind == GateKind::Or) {
      for (GateId in : gt.inputs) {
        auto l = lit_of(in);
        if (!l) return;
        lits.push_back(*l);
      }
    } else {
      return;
    }
    try {
      out.push_back(Clause::from_literals(std::move(lits)));
    } catch (const Error&) {
      return;
    }
  }
  phi.clauses = std::move(out);
}

Qbc parse_qcl(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty() || lines[0].text != "#qcl 1") throw ParseError(lines.empty() ? 1 : lines[0].no, "missing '#qcl 1' header");
  std::vector<std::string> names, comments;
  std::map<std::string, Var> by_name;
  std::vector<PrefixEntry> entries;
  std::vector<std::pair<std::size_t, std::string>> body;
  bool in_body = false;
  std::size_t out_line = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [no, t] = lines[i];
    if (is_comment(t)) {
      comments.push_back(comment_body(t));
      continue;
    }
    auto w = words(t);
    if (w[0] == "q") {
      if (in_body) throw ParseError(no, "quantifier line after the first gate");
      if (w.size() < 2 || (w[1] != "e" && w[1] != "a")) throw ParseError(no, "expected 'q e|a <names>'");
      for (std::size_t k = 2; k < w.size(); ++k) {
        if (!is_identifier(w[k])) throw ParseError(no, "bad variable name '" + w[k] + "'");
        if (by_name.count(w[k])) throw ParseError(no, "variable " + w[k] + " quantified twice");
        Var v = static_cast<Var>(names.size());
        by_name[w[k]] = v;
        names.push_back(w[k]);
        entries.push_back({w[1] == "a" ? Quant::Forall : Quant::Exists, v});
      }
    } else if (w[0] == "g" || w[0] == "output") {
      if (out_line) throw ParseError(no, "line after the output line");
      in_body = true;
      if (w[0] == "output") out_line = no;
      body.emplace_back(no, t);
    } else {
      throw ParseError(no, "unknown line '" + w[0] + "'");
    }
  }
  GateReader r([&](const std::string& s) -> std::optional<Var> {
    auto it = by_name.find(s);
    if (it == by_name.end()) return std::nullopt;
    return it->second;
  });
  for (const auto& [no, t] : body) {
    if (t.rfind("output", 0) == 0) {
      auto w = words(t);
      if (w.size() != 2) throw ParseError(no, "expected 'output <gate>'");
      r.output(w[1], no);
    } else {
      r.gate(t, no);
    }
  }
  if (!out_line) throw ParseError(lines.back().no, "missing output line");
  Qbc q;
  q.prefix = QuantifierPrefix(names.size(), std::move(entries));
  q.matrix = std::move(r.circuit);
  q.names = std::move(names);
  q.comments = std::move(comments);
  detect_clauses(q);
  q.validate();
  return q;
}

std::string write_qcl(const Qbc& phi) {
  std::ostringstream out;
  out << "#qcl 1\n";
  for (const auto& c : phi.comments) out << "c " << c << "\n";
  const auto& es = phi.prefix.entries();
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i == 0 || es[i].quant != es[i - 1].quant) out << "q " << (es[i].quant == Quant::Forall ? "a" : "e");
    out << " " << phi.var_name(es[i].var);
    if (i + 1 == es.size() || es[i + 1].quant != es[i].quant) out << "\n";
  }
  write_gates(out, phi.matrix, [&](Var v) { return phi.var_name(v); });
  return out.str();
}

Proof parse_proof(std::string_view text) {
  Proof p;
  for (const auto& [no, t] : split_lines(text)) {
    if (is_comment(t)) continue;
    std::size_t colon = t.find(':');
    if (colon == std::string::npos) throw ParseError(no, "expected '<id>: ...'");
    long long id = to_int(trim(t.substr(0, colon)), no);
    if (id != static_cast<long long>(p.lines.size()) + 1)
      throw ParseError(no, "line id " + std::to_string(id) + " out of sequence, expected " + std::to_string(p.lines.size() + 1));
    auto w = words(t.substr(colon + 1));
    std::size_t i = 0;
    std::vector<Literal> lits;
    for (; i < w.size() && w[i] != "0"; ++i) lits.push_back(parse_lit(w[i], no));
    if (i == w.size()) throw ParseError(no, "clause is not terminated by 0");
    ++i;
    ProofLine line;
    try {
      line.clause = Clause::from_literals(std::move(lits));
    } catch (const Error& e) {
      throw ParseError(no, e.what());
    }
    auto ref = [&](const std::string& s) {
      long long r = to_int(s, no);
      if (r < 1 || r >= id) throw ParseError(no, "reference " + s + " does not point to an earlier line");
      return static_cast<std::size_t>(r - 1);
    };
    std::size_t rest = w.size() - i;
    if (rest >= 1 && w[i] == "ax" && rest == 1) {
      line.rule = Rule::Axiom;
    } else if (rest == 4 && w[i] == "res") {
      line.rule = Rule::Resolve;
      line.left = ref(w[i + 1]);
      line.right = ref(w[i + 2]);
      long long v = to_int(w[i + 3], no);
      if (v <= 0) throw ParseError(no, "pivot must be a positive variable number");
      line.pivot = static_cast<Var>(v - 1);
    } else if (rest == 3 && w[i] == "ae") {
      line.rule = Rule::ForallElim;
      line.left = ref(w[i + 1]);
      line.eliminated = parse_lit(w[i + 2], no);
    } else {
      throw ParseError(no, "expected 'ax', 'res <i> <j> <var>' or 'ae <i> <lit>'");
    }
    p.lines.push_back(std::move(line));
  }
  return p;
}

std::string write_proof(const Proof& proof) {
  std::ostringstream out;
  for (std::size_t i = 0; i < proof.lines.size(); ++i) {
    const auto& l = proof.lines[i];
    out << i + 1 << ":";
    for (const auto& lit : l.clause.literals()) out << " " << lit_text(lit);
    out << " 0";
    switch (l.rule) {
      case Rule::Axiom: out << " ax"; break;
      case Rule::Resolve: out << " res " << l.left + 1 << " " << l.right + 1 << " " << l.pivot + 1; break;
      case Rule::ForallElim: out << " ae " << l.left + 1 << " " << lit_text(l.eliminated); break;
    }
    out << "\n";
  }
  return out.str();
}

CircuitStrategy parse_strategy(std::string_view text, const Qbc& phi) {
  auto lines = split_lines(text);
  if (lines.empty() || lines[0].text != "#qcs 1") throw ParseError(lines.empty() ? 1 : lines[0].no, "missing '#qcs 1' header");
  CircuitStrategy s;
  bool have_side = false;
  auto resolve = [&](const std::string& n) { return phi.find_var(n); };
  std::optional<GateReader> reader;
  std::optional<StrategyCircuit> part;
  std::size_t part_line = 0;
  auto finish = [&]() {
    if (!part) return;
    if (!reader->circuit.has_output()) throw ParseError(part_line, "part has no output line");
    part->circuit = std::move(reader->circuit);
    s.parts.push_back(std::move(*part));
    part.reset();
    reader.reset();
  };
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [no, t] = lines[i];
    if (is_comment(t)) continue;
    auto w = words(t);
    if (w[0] == "side") {
      if (have_side || !s.parts.empty() || part) throw ParseError(no, "side line must come once, before the parts");
      if (w.size() != 2 || (w[1] != "a" && w[1] != "e")) throw ParseError(no, "expected 'side a|e'");
      s.side = w[1] == "a" ? Quant::Forall : Quant::Exists;
      have_side = true;
    } else if (w[0] == "part") {
      finish();
      if (w.size() < 2) throw ParseError(no, "expected 'part <var> <inputs>'");
      part.emplace();
      part_line = no;
      auto v = resolve(w[1]);
      if (!v) throw ParseError(no, "unknown variable '" + w[1] + "'");
      part->var = *v;
      for (std::size_t k = 2; k < w.size(); ++k) {
        auto in = resolve(w[k]);
        if (!in) throw ParseError(no, "unknown variable '" + w[k] + "'");
        part->inputs.push_back(*in);
      }
      reader.emplace(resolve);
      // inputs get their Input gates in declaration order
      for (Var in : part->inputs) reader->declare_input(in);
    } else if (w[0] == "g" || w[0] == "output") {
      if (!part) throw ParseError(no, "gate line outside a part");
      if (reader->circuit.has_output()) throw ParseError(no, "line after the part's output");
      if (w[0] == "output") {
        if (w.size() != 2) throw ParseError(no, "expected 'output <gate>'");
        reader->output(w[1], no);
      } else {
        reader->gate(t, no);
      }
    } else {
      throw ParseError(no, "unknown line '" + w[0] + "'");
    }
  }
  finish();
  if (!have_side) throw ParseError(lines.empty() ? 1 : lines.back().no, "missing side line");
  return s;
}

std::string write_strategy(const Qbc& phi, const CircuitStrategy& strat) {
  std::ostringstream out;
  out << "#qcs 1\nside " << (strat.side == Quant::Forall ? "a" : "e") << "\n";
  for (const auto& p : strat.parts) {
    out << "part " << phi.var_name(p.var);
    for (Var v : p.inputs) out << " " << phi.var_name(v);
    out << "\n";
    write_gates(out, p.circuit, [&](Var v) { return phi.var_name(v); });
  }
  return out.str();
}

Qbc parse_instance(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (text.substr(i).rfind("#qcl", 0) == 0) return parse_qcl(text);
  return parse_qdimacs(text);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr)) throw Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

Report::Report(std::string command) {
  doc_["command"] = std::move(command);
  doc_["inputs"] = nlohmann::json::array();
  doc_["parameters"] = nlohmann::json::object();
  doc_["outcome"] = nlohmann::json::object();
  doc_["counterexamples"] = nlohmann::json::array();
  doc_["timings"] = nlohmann::json::object();
}

void Report::add_input(const std::string& path, std::string_view content) {
  doc_["inputs"].push_back({{"path", path}, {"sha256", sha256_hex(content)}});
}

// nlohmann::json keeps keys sorted, and "timings" sorts last.
std::string Report::dump() const { return doc_.dump(2) + "\n"; }

}  // namespace qures
