#include "qures/relax.hpp"

#include <algorithm>
#include <numeric>

namespace qures {

bool is_relaxation(const QuantifierPrefix& relaxed, const QuantifierPrefix& original) {
  if (relaxed.size() != original.size()) return false;
  for (const auto& e : original.entries()) {
    if (!relaxed.contains(e.var) || relaxed.quant(e.var) != e.quant) return false;
  }
  for (const auto& ey : original.entries()) {
    if (ey.quant != Quant::Forall) continue;
    for (const auto& ex : original.entries()) {
      if (ex.quant != Quant::Exists) continue;
      if (original.precedes(ey.var, ex.var) && !relaxed.precedes(ey.var, ex.var)) return false;
    }
  }
  return true;
}

QuantifierPrefix canonical_pi2(const QuantifierPrefix& prefix) {
  std::vector<PrefixEntry> out;
  for (const auto& e : prefix.entries())
    if (e.quant == Quant::Forall) out.push_back(e);
  for (const auto& e : prefix.entries())
    if (e.quant == Quant::Exists) out.push_back(e);
  return QuantifierPrefix(prefix.num_vars(), std::move(out));
}

QuantifierPrefix BlockAssignment::to_prefix(const QuantifierPrefix& original) const {
  std::vector<PrefixEntry> out = original.entries();
  std::stable_sort(out.begin(), out.end(),
                   [&](const PrefixEntry& a, const PrefixEntry& b) { return block[a.var] < block[b.var]; });
  return QuantifierPrefix(original.num_vars(), std::move(out));
}

namespace {

struct Enumerator {
  const QuantifierPrefix& prefix;
  unsigned k;
  bool dominant;
  const std::function<bool(const BlockAssignment&)>& visit;
  BlockAssignment cur;

  // max_forall: largest block given to a ∀-variable at an earlier position
  bool rec(std::size_t pos, unsigned max_forall) {
    if (pos == prefix.size()) return visit(cur);
    const auto& e = prefix[pos];
    if (e.quant == Quant::Forall) {
      unsigned top = k % 2 == 1 ? k : k - 1;
      for (unsigned b = top; b >= 1; b -= 2) {
        cur.block[e.var] = b;
        if (!rec(pos + 1, std::max(max_forall, b))) return false;
        if (b < 2) break;
      }
    } else {
      unsigned lo = max_forall + 1;
      if (lo % 2 == 1) ++lo;
      for (unsigned b = lo; b <= k; b += 2) {
        cur.block[e.var] = b;
        if (!rec(pos + 1, max_forall)) return false;
        if (dominant) break;
      }
    }
    cur.block[e.var] = 0;
    return true;
  }
};

void run(const QuantifierPrefix& prefix, unsigned k, bool dominant,
         const std::function<bool(const BlockAssignment&)>& visit) {
  if (k < 1) throw Error("relaxation level k must be at least 1");
  Enumerator en{prefix, k, dominant, visit, {k, std::vector<unsigned>(prefix.num_vars(), 0)}};
  en.rec(0, 0);
}

}  // namespace

void for_each_pik(const QuantifierPrefix& prefix, unsigned k, const std::function<bool(const BlockAssignment&)>& visit) {
  run(prefix, k, false, visit);
}

void for_each_pik_dominant(const QuantifierPrefix& prefix, unsigned k,
                           const std::function<bool(const BlockAssignment&)>& visit) {
  run(prefix, k, true, visit);
}

std::vector<BlockAssignment> enumerate_pik(const QuantifierPrefix& prefix, unsigned k) {
  std::vector<BlockAssignment> out;
  for_each_pik(prefix, k, [&](const BlockAssignment& b) {
    out.push_back(b);
    return true;
  });
  return out;
}

std::vector<Var> holes(const QuantifierPrefix& prefix, const PartialAssignment& a) {
  auto dom = a.domain();
  auto last = prefix.last(dom);
  if (!last) throw Error("holes are undefined for the empty assignment");
  std::size_t lb = prefix.block(*last);
  std::vector<Var> out;
  for (const auto& e : prefix.entries())
    if (prefix.block(e.var) <= lb && !a.defined(e.var)) out.push_back(e.var);
  return out;
}

namespace {

bool some_false_relaxation(const Qbc& phi, const PartialAssignment& a, unsigned k, bool dominant,
                           std::size_t cap_vars, std::size_t* calls) {
  Qbc inst = instantiate(phi, a);
  bool found = false;
  auto probe = [&](const BlockAssignment& b) {
    Qbc r;
    r.prefix = b.to_prefix(inst.prefix);
    r.matrix = inst.matrix;
    if (calls) ++*calls;
    if (!decide(r, cap_vars)) {
      found = true;
      return false;
    }
    return true;
  };
  if (dominant)
    for_each_pik_dominant(inst.prefix, k, probe);
  else
    for_each_pik(inst.prefix, k, probe);
  return found;
}

}  // namespace

AxiomSetOracle::AxiomSetOracle(Qbc phi, std::size_t cap_vars) : phi_(std::move(phi)), cap_vars_(cap_vars) {}

bool AxiomSetOracle::in_H(const PartialAssignment& a, unsigned k) {
  std::string key(reinterpret_cast<const char*>(a.values().data()), a.values().size());
  key.push_back(static_cast<char>(k));
  key.push_back(static_cast<char>(k >> 8));
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++cache_hits_;
    return it->second;
  }
  bool r = some_false_relaxation(phi_, a, k, true, cap_vars_, &decide_calls_);
  cache_.emplace(std::move(key), r);
  return r;
}

bool in_H_exhaustive(const Qbc& phi, const PartialAssignment& a, unsigned k, std::size_t cap_vars) {
  return some_false_relaxation(phi, a, k, false, cap_vars, nullptr);
}

}  // namespace qures
