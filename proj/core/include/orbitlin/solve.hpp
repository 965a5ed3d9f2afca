#pragma once

#include "orbitlin/finsolve.hpp"

namespace ofl {

/// Outcome of the well-definedness test for a matrix-vector pair. A reported
/// violation instantiates to concrete indices (b, c) with nonzero entries on
/// both sides and an atom of c outside sup(b) and the joint support.
struct ExactnessReport {
  bool exact = true;
  std::optional<ExactnessViolation> violation;
};

/// Pattern-level exactness test, cross-checked by grounding any violation.
ExactnessReport is_exact(const Ring& ring, const SymMatrix& a, const SymVector& x);

/// One admitted column of the extended matrix: a tight-orbit characteristic
/// vector with a well-defined product, and that product.
struct TildeColumn {
  Pattern tight;        // tight-orbit pattern over the column set
  SymVector indicator;  // its characteristic vector
  SymVector column;     // a * indicator
};

/// Per support-orbit of the column set, the tight-orbit family representatives
/// whose product with the matrix is well-defined. Finitary combinations of
/// these columns span exactly what the matrix spans.
std::vector<TildeColumn> build_tilde_columns(const Ring& ring, const SymMatrix& a);

struct TildeInstance {
  Instance inst;
  std::vector<TildeColumn> columns;  // parallel to inst.reps
};
TildeInstance tilde_instance(const Ring& ring, const SymMatrix& a, const SymVector& t);

struct SolveResult {
  bool solvable = false;
  std::optional<SymVector> witness;  // finite combination of tight-orbit vectors
  std::vector<std::pair<Pattern, RingElem>> combo;
  std::vector<StepTrace> trace;
};

/// General solvability of a*x = t over finitely-supported x; any affirmative
/// answer carries a witness that has been re-verified symbolically.
SolveResult solve(const Ring& ring, const SymMatrix& a, const SymVector& t);

/// True iff the product a*x is well-defined and equals t.
bool verify(const Ring& ring, const SymMatrix& a, const SymVector& x, const SymVector& t);

}  // namespace ofl
