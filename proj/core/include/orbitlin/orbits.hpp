#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orbitlin/atoms.hpp"

namespace ofl {

/// One orbit declaration: non-repeating k-tuples of atoms modulo the
/// coordinate permutations of a subgroup of S_k.
struct OrbitDecl {
  std::string id;
  int arity = 0;
  PermGroup group;

  auto operator<=>(const OrbitDecl&) const = default;
};

/// A finite disjoint union of orbit declarations with distinct ids.
class OrbitSet {
 public:
  OrbitSet() = default;
  explicit OrbitSet(std::vector<OrbitDecl> orbits);

  const std::vector<OrbitDecl>& orbits() const { return orbits_; }
  const OrbitDecl& find(const std::string& id) const;
  bool has(const std::string& id) const;

  auto operator<=>(const OrbitSet&) const = default;

 private:
  std::vector<OrbitDecl> orbits_;
};

/// An element of an orbit: the canonical (lexicographically minimal under the
/// group action) representative of its equivalence class.
struct Element {
  std::string orbit_id;
  Tuple tuple;

  auto operator<=>(const Element&) const = default;
};

Element make_element(const OrbitDecl& decl, Tuple t);
Element apply(const FsPerm& p, const OrbitDecl& decl, const Element& e);

/// Pattern entry: a concrete atom or a named variable. Concrete entries
/// compare below variables; this ordering drives all canonical forms.
struct PatEntry {
  std::int32_t var = -1;  // -1 = concrete
  Atom atom{};

  bool is_var() const { return var >= 0; }
  static PatEntry concrete(Atom a) { return PatEntry{-1, a}; }
  static PatEntry variable(std::int32_t v) { return PatEntry{v, Atom{}}; }
  auto operator<=>(const PatEntry&) const = default;
};

/// An equality type: a k-tuple of concrete atoms and pairwise-distinct
/// variables, stored canonically (minimal over the group action, variables
/// renumbered by first occurrence). Relative to an ambient support S it
/// denotes the S-orbit obtained by assigning distinct atoms outside S to the
/// variables.
struct Pattern {
  std::string orbit_id;
  std::vector<PatEntry> entries;

  auto operator<=>(const Pattern&) const = default;
};

Pattern canonicalize(const OrbitDecl& decl, std::vector<PatEntry> entries);
Pattern apply(const FsPerm& p, const OrbitDecl& decl, const Pattern& pat);

int pattern_dim(const Pattern& p);              // number of variables
AtomSet pattern_concretes(const Pattern& p);
std::vector<std::int32_t> pattern_vars(const Pattern& p);
bool is_ground(const Pattern& p);
Element pattern_as_element(const OrbitDecl& decl, const Pattern& p);
Pattern element_as_pattern(const Element& e);

/// Instantiates the variables with fresh atoms (in variable order).
Element ground_pattern(const OrbitDecl& decl, const Pattern& p, AtomSource& fresh);

std::string to_string(const Pattern& p);
std::string to_string(const Element& e);

/// All S-orbits of the declared orbit, as canonical patterns over S. Every
/// element of the orbit matches exactly one of them.
std::vector<Pattern> enumerate_s_orbits(const OrbitDecl& decl, const AtomSet& s);

/// The unique assignment (if any) sending the pattern to the element, with
/// all variable images pairwise distinct and outside S.
std::optional<std::map<std::int32_t, Atom>> match(const OrbitDecl& decl, const Pattern& p,
                                                  const AtomSet& s, const Element& e);

/// S-orbits contained in both denotations, where the variables of p avoid
/// s_p, those of q avoid s_q, and the results are patterns over s_out
/// (s_out must contain s_p and s_q). Empty iff the denotations are disjoint.
std::vector<Pattern> unify(const OrbitDecl& decl, const Pattern& p, const AtomSet& s_p,
                           const Pattern& q, const AtomSet& s_q, const AtomSet& s_out);

/// Spec-facing form: each side's variables avoid only its own concrete atoms.
std::vector<Pattern> unify(const OrbitDecl& decl, const Pattern& p, const Pattern& q,
                           const AtomSet& s);

/// Raw unifier of p (left) and q (right): one union-find pass, exposing which
/// side's variables each merged class contains. Used by the exactness test.
struct RawUnifier {
  std::vector<PatEntry> entries;  // proto pattern, vars = class ids
  // Per class id: member variables from each side.
  std::vector<std::vector<std::int32_t>> left_vars, right_vars;
};
std::vector<RawUnifier> raw_unifiers(const OrbitDecl& decl, const Pattern& p, const AtomSet& s_p,
                                     const Pattern& q, const AtomSet& s_q);

/// Expands p (variables avoiding `from`) into the complete list of patterns
/// over the larger support `to`; the results partition p's denotation.
std::vector<Pattern> refine_pattern(const OrbitDecl& decl, const Pattern& p,
                                    const AtomSet& from, const AtomSet& to);

/// A pair of row/column patterns with a shared variable namespace: equal
/// indices denote the same atom, distinct indices distinct atoms, including
/// across the two tuples.
struct ProductPattern {
  std::string row_orbit, col_orbit;
  std::vector<PatEntry> row, col;

  auto operator<=>(const ProductPattern&) const = default;
};

ProductPattern canonicalize_product(const OrbitDecl& row_decl, const OrbitDecl& col_decl,
                                    std::vector<PatEntry> row, std::vector<PatEntry> col);
ProductPattern apply(const FsPerm& p, const OrbitDecl& row_decl, const OrbitDecl& col_decl,
                     const ProductPattern& pp);
AtomSet product_concretes(const ProductPattern& pp);
std::string to_string(const ProductPattern& pp);

std::optional<std::map<std::int32_t, Atom>> match_product(const OrbitDecl& row_decl,
                                                          const OrbitDecl& col_decl,
                                                          const ProductPattern& pp,
                                                          const AtomSet& s, const Element& row_e,
                                                          const Element& col_e);

/// A tight orbit: a pattern whose concrete-atom set is exactly its defining
/// support, so that support is contained in the support of every element.
struct TightOrbit {
  Pattern pattern;

  AtomSet defining_support() const { return pattern_concretes(pattern); }
  auto operator<=>(const TightOrbit&) const = default;
};

/// One orbit-shaped family of tight orbits: the substitutions of a fixed
/// class of variable subsets of a base pattern by distinct atom tuples.
struct TightFamily {
  std::string source_orbit;
  Pattern base;                        // pattern the family refines
  std::vector<std::int32_t> var_subset;  // sorted variable ids made concrete
  OrbitDecl decl;                      // the family as an orbit declaration
};

struct TightFamilySet {
  OrbitSet families;
  std::vector<TightFamily> info;

  const TightFamily& family(const std::string& id) const;
};

/// Families of all tight orbits of the declared orbit (base = all-fresh).
TightFamilySet tight_families(const OrbitDecl& decl);
/// Families of tight orbits inside the denotation of `base` (a pattern over
/// some ambient support, e.g. a T-orbit of the declared orbit).
TightFamilySet tight_families_within(const OrbitDecl& decl, const Pattern& base,
                                     const std::string& id_prefix);
/// Union over all orbits of the set; family ids are prefixed per source orbit.
TightFamilySet tight_families_of_set(const OrbitSet& set);

/// The bijection between family elements and tight orbits.
TightOrbit tight_orbit_of(const OrbitDecl& source_decl, const TightFamily& fam,
                          const Element& e);
std::pair<std::string, Element> locate_tight_orbit(const OrbitSet& source,
                                                   const TightFamilySet& fams,
                                                   const Pattern& tight_pattern);

/// Non-repeating k-tuples over a pool, in deterministic order.
std::vector<Tuple> nonrepeating_tuples(const std::vector<Atom>& pool, int k);

}  // namespace ofl
