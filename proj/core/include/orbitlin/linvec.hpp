#pragma once

#include <optional>

#include "orbitlin/orbits.hpp"
#include "orbitlin/ring.hpp"

namespace ofl {

/// A finitary vector: finitely many nonzero entries, indexed by elements.
class FinVector {
 public:
  FinVector() = default;
  explicit FinVector(OrbitSet domain) : domain_(std::move(domain)) {}

  const OrbitSet& domain() const { return domain_; }
  const std::map<Element, RingElem>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }

  RingElem at(const Element& e) const;
  void set(const Element& e, const RingElem& v);
  void accumulate(const Ring& ring, const Element& e, const RingElem& v);

  AtomSet atoms() const;
  auto operator<=>(const FinVector&) const = default;

 private:
  OrbitSet domain_;
  std::map<Element, RingElem> entries_;
};

FinVector apply(const FsPerm& p, const FinVector& v);

/// A finitely-supported vector: a finite map from canonical patterns over the
/// declared support to nonzero ring values. Patterns absent from the map
/// denote zero; the declared support is a support, not necessarily the least
/// one.
class SymVector {
 public:
  SymVector() = default;
  SymVector(OrbitSet domain, AtomSet support)
      : domain_(std::move(domain)), support_(std::move(support)) {}

  const OrbitSet& domain() const { return domain_; }
  const AtomSet& support() const { return support_; }
  const std::map<Pattern, RingElem>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }

  /// Canonicalizes, checks the pattern against domain and support, and stores
  /// (dropping zeros). `accumulate` adds to any existing value.
  void set(const Pattern& p, const RingElem& v);
  void accumulate(const Ring& ring, const Pattern& p, const RingElem& v);

  RingElem value_of(const Pattern& p) const;
  AtomSet atoms() const;  // support plus everything mentioned

  auto operator<=>(const SymVector&) const = default;

 private:
  OrbitSet domain_;
  AtomSet support_;
  std::map<Pattern, RingElem> entries_;
};

RingElem eval(const SymVector& v, const Element& e);
SymVector refine(const Ring& ring, const SymVector& v, const AtomSet& support);
SymVector add(const Ring& ring, const SymVector& v, const SymVector& w);
SymVector scale(const Ring& ring, const RingElem& c, const SymVector& v);
bool sym_equal(const Ring& ring, const SymVector& v, const SymVector& w);
SymVector apply(const FsPerm& p, const SymVector& v);
SymVector sym_from_fin(const FinVector& v);

/// A finitely-supported matrix over rows x columns, as canonical product
/// patterns with nonzero coefficients.
class SymMatrix {
 public:
  SymMatrix() = default;
  SymMatrix(OrbitSet rows, OrbitSet cols, AtomSet support)
      : rows_(std::move(rows)), cols_(std::move(cols)), support_(std::move(support)) {}

  const OrbitSet& rows() const { return rows_; }
  const OrbitSet& cols() const { return cols_; }
  const AtomSet& support() const { return support_; }
  const std::map<ProductPattern, RingElem>& entries() const { return entries_; }

  void set(const ProductPattern& pp, const RingElem& v);
  /// Error on conflicting duplicates; identical duplicates are idempotent.
  void set_checked(const Ring& ring, const ProductPattern& pp, const RingElem& v);

  AtomSet atoms() const;
  auto operator<=>(const SymMatrix&) const = default;

 private:
  OrbitSet rows_, cols_;
  AtomSet support_;
  std::map<ProductPattern, RingElem> entries_;
};

RingElem eval_matrix(const SymMatrix& a, const Element& row, const Element& col);

/// The row vector a(b, _), supported by sup(a) and the atoms of b.
SymVector row_vector(const SymMatrix& a, const Element& b);
/// The column vector a(_, c).
SymVector column_vector(const SymMatrix& a, const Element& c);

/// Inner product; nullopt when the common domain is infinite.
std::optional<RingElem> inner(const Ring& ring, const SymVector& x, const SymVector& y);

/// Pattern-level exactness core: a product a*x is well-defined iff no unifier
/// of a column pattern of `a` with a pattern of `x` has a merged variable
/// class free of row variables (such a class names a column atom outside the
/// row's support and the joint support).
struct ExactnessViolation {
  ProductPattern matrix_pattern;
  Pattern vector_pattern;
  RawUnifier unifier;
  int class_id = 0;
};
std::optional<ExactnessViolation> find_exactness_violation(const SymMatrix& a,
                                                           const SymVector& x);

/// a*x by grounding a representative of every joint-support row orbit;
/// nullopt when (a, x) is not exact. Constancy on each orbit is spot-checked
/// on a second representative.
std::optional<SymVector> mat_vec(const Ring& ring, const SymMatrix& a, const SymVector& x);

}  // namespace ofl
