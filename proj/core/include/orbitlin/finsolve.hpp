#pragma once

#include "orbitlin/basis.hpp"

namespace ofl {

/// One component of a canonical-form space: finitary vectors from
/// non-repeating arity-tuples into ring^width.
struct Component {
  int arity = 0;
  int width = 1;
  auto operator<=>(const Component&) const = default;
};

/// Entry address inside an instance space.
struct InstKey {
  int comp = 0;
  Tuple tuple;
  int coord = 0;
  auto operator<=>(const InstKey&) const = default;
};

/// A finitary vector of a canonical-form space; zero entries never stored.
class InstVector {
 public:
  const std::map<InstKey, RingElem>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  RingElem at(const InstKey& k) const;
  void set(const InstKey& k, const RingElem& v);
  void accumulate(const Ring& ring, const InstKey& k, const RingElem& v);
  AtomSet atoms() const;
  /// Entries of one component only.
  InstVector component_part(int comp) const;
  auto operator<=>(const InstVector&) const = default;

 private:
  std::map<InstKey, RingElem> entries_;
};

InstVector apply(const FsPerm& p, const InstVector& v);
InstVector add(const Ring& ring, const InstVector& v, const InstVector& w);
InstVector scale(const Ring& ring, const RingElem& c, const InstVector& v);

/// A finitary-solvability instance in canonical form: pairwise-distinct
/// component arities (descending, the main component first), an orbit-finite
/// set P given as the union of the equivariant orbits of the representative
/// vectors, and a target.
struct Instance {
  std::vector<Component> components;
  std::vector<InstVector> reps;
  InstVector target;
  Ring ring = Ring::rationals();

  int max_arity() const { return components.empty() ? 0 : components.front().arity; }
  int main_width() const { return components.empty() ? 0 : components.front().width; }
  AtomSet atoms() const;
  void validate() const;
};

/// Keeps the entries whose tuples use only atoms of `a` (main component).
InstVector restrict_main(const InstVector& v, const AtomSet& a);

/// The alternating renaming sum over all subsets of sigma's domain: each
/// subset replaces exactly those atoms by their images, with sign by parity.
InstVector alternating_sigma_sum(const Ring& ring, const InstVector& v,
                                 const std::map<Atom, Atom>& sigma);

/// Cog of a main-component vector whose domain lies in the orderings of the
/// atoms of sigma's domain.
InstVector cog(const Ring& ring, const InstVector& w, const std::map<Atom, Atom>& sigma);

/// Sum of cogs over the k-subsets of w's domain atoms, each mapped onto
/// `s` by the order-preserving bijection induced by `ord`.
InstVector delta(const Ring& ring, const InstVector& w, const std::vector<Atom>& s,
                 const std::vector<Atom>& ord);

/// One unknown of a restriction system: a renamed representative.
struct LocalTerm {
  int rep = 0;
  FsPerm perm;
  RingElem coef;
};

/// Solves the restriction of the instance to the orderings of the atom set
/// `a` (main component): target restriction as a combination of restricted
/// renamed representatives. nullopt when unsolvable.
std::optional<std::vector<LocalTerm>> local_restriction_solve(const Instance& inst,
                                                              const AtomSet& a);

/// Every restriction system solvable; a necessary condition for solvability.
bool locally_solvable(const Instance& inst);

/// Provenance of one reduction step.
struct ReduceStep {
  Instance next;
  std::vector<Atom> s;                 // atoms eliminated from the main component
  std::vector<Atom> target_order;      // order used for the target correction
  // Per rep of `next`: source rep in the parent instance and the order used.
  std::vector<std::pair<int, std::vector<Atom>>> rep_source;
};

/// Strictly reduces the main-component arity while preserving solvability;
/// requires a locally solvable instance of positive arity.
ReduceStep reduce_dimension(const Instance& inst, AtomSource& fresh);

/// Exact combination certificate: target = sum of coef * perm(rep).
struct ComboTerm {
  int rep = 0;
  FsPerm perm;
  RingElem coef;
};

struct StepTrace {
  int arity = 0;
  std::vector<Component> components;
  std::size_t rep_count = 0;
  bool locally_solvable = false;
  std::vector<Atom> s;
  std::size_t order_count = 0;  // dedup'd reduced vectors
};

struct FinSolveOutcome {
  bool solvable = false;
  std::optional<std::vector<ComboTerm>> combo;  // over the input instance's reps
  std::vector<StepTrace> trace;
};

/// The full driver: alternates local-solvability checks and dimension
/// reductions down to a finite system, then pulls the solution back as an
/// exact combination of renamed representatives.
FinSolveOutcome finsolve_instance(const Instance& inst);
FinSolveOutcome finsolve_instance(const Instance& inst, AtomSource& fresh);

/// Conversion of a symbolic system to an instance. Columns are grounded per
/// support-orbit of the column set; every vector is rewritten in the
/// tight-orbit basis, straightened to trivial groups, and the matrix-support
/// atoms are absorbed into the component structure.
struct InstanceBuild {
  Instance inst;
  // Parallel to inst.reps: the source column index.
  std::vector<int> column_of_rep;
};
InstanceBuild instance_from_columns(const Ring& ring, const OrbitSet& row_set,
                                    const std::vector<SymVector>& columns, const SymVector& t,
                                    const AtomSet& pinned);

struct ToInstance {
  Instance inst;
  std::vector<Element> column_elements;  // ground column per rep
};
ToInstance to_instance(const Ring& ring, const SymMatrix& a, const SymVector& t);

struct FinSolveResult {
  bool solvable = false;
  std::optional<FinVector> witness;  // finitary solution over the column set
  std::vector<StepTrace> trace;
};

/// Finitary solvability of a*x = t with witness extraction and verification.
FinSolveResult finsolve(const Ring& ring, const SymMatrix& a, const SymVector& t);

}  // namespace ofl
