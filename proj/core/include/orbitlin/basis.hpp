#pragma once

#include "orbitlin/linvec.hpp"

namespace ofl {

/// Coordinates of a vector in the tight-orbit basis: a finitary vector over
/// the family set indexing all tight orbits of the domain.
struct BasisCoords {
  TightFamilySet basis;
  FinVector coords;
};

/// Per-orbit split of a domain. Each declaration is handled independently and
/// embedded back by extending with zero; equivariant declarations are already
/// tight, so no further tightening is recorded.
struct DomainDecomposition {
  std::vector<OrbitSet> components;
};
DomainDecomposition normalize_domain(const OrbitSet& b);

/// The characteristic vector of a tight orbit, represented over the larger
/// support s: all patterns obtained by substituting variables with distinct
/// atoms of s outside the defining support, each with coefficient 1.
SymVector expand_tight(const Ring& ring, const OrbitSet& domain, const TightOrbit& t,
                       const AtomSet& s);

/// Basis representation: repeatedly strips a maximal-dimension orbit of the
/// vector into a tight orbit coordinate until nothing remains. Exact inverse
/// of recombine.
BasisCoords decompose(const Ring& ring, const SymVector& v);

SymVector recombine(const Ring& ring, const OrbitSet& domain, const BasisCoords& c);

}  // namespace ofl
