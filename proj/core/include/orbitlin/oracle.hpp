#pragma once

#include "orbitlin/solve.hpp"

namespace ofl {

enum class SolveMode { General, Finitary };

/// One-sided evidence about an instance: a verified witness forces YES, a
/// failed finite restriction forces NO, and otherwise the sandwich is open.
struct Sandwich {
  bool sufficient_yes = false;
  bool necessary_yes = true;
  std::optional<bool> forced;
};

struct PoolSearchResult {
  std::optional<SymVector> witness;
  std::vector<std::pair<Pattern, RingElem>> combo;
};

/// Searches for solutions built from columns instantiated over a bounded atom
/// pool (all support atoms plus fresh ones up to the requested size); any hit
/// is verified before being reported. Finding nothing proves nothing.
PoolSearchResult pool_search(const Ring& ring, const SymMatrix& a, const SymVector& t,
                             SolveMode mode, int pool_size);

/// Necessary conditions only: local solvability of the derived instance plus
/// solvability of its renaming-invariant zero-arity part. A failure here
/// refutes solvability; success proves nothing.
bool necessary_check(const Ring& ring, const SymMatrix& a, const SymVector& t, SolveMode mode);

Sandwich run_sandwich(const Ring& ring, const SymMatrix& a, const SymVector& t, SolveMode mode,
                      int pool_size);

/// Default pool: all support atoms plus three fresh atoms per arity unit.
int default_pool_size(const SymMatrix& a, const SymVector& t);

}  // namespace ofl
