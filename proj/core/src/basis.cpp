#include "orbitlin/basis.hpp"

namespace ofl {

DomainDecomposition normalize_domain(const OrbitSet& b) {
  DomainDecomposition out;
  for (const OrbitDecl& d : b.orbits()) out.components.push_back(OrbitSet({d}));
  return out;
}

SymVector expand_tight(const Ring& ring, const OrbitSet& domain, const TightOrbit& t,
                       const AtomSet& s) {
  const OrbitDecl& decl = domain.find(t.pattern.orbit_id);
  AtomSet defining = t.defining_support();
  for (Atom a : defining)
    if (!s.count(a)) throw Error("expand_tight: support misses a defining atom");
  SymVector out(domain, s);
  for (const Pattern& p : refine_pattern(decl, t.pattern, defining, s)) out.set(p, ring.one());
  return out;
}

namespace {

// One round: the nonzero pattern of maximal dimension, smallest first among
// ties, restricted to the given orbit.
std::optional<Pattern> pick_pattern(const SymVector& v, const std::string& orbit_id) {
  std::optional<Pattern> best;
  int best_dim = -1;
  for (const auto& [p, val] : v.entries()) {
    if (p.orbit_id != orbit_id) continue;
    int d = pattern_dim(p);
    if (d > best_dim) {
      best = p;
      best_dim = d;
    }
  }
  return best;
}

}  // namespace

BasisCoords decompose(const Ring& ring, const SymVector& v) {
  BasisCoords out;
  out.basis = tight_families_of_set(v.domain());
  out.coords = FinVector(out.basis.families);
  for (const OrbitDecl& decl : v.domain().orbits()) {
    SymVector work = v;
    for (;;) {
      std::optional<Pattern> o = pick_pattern(work, decl.id);
      if (!o) break;
      RingElem val = work.value_of(*o);
      TightOrbit tight{*o};
      auto [fam_id, elem] = locate_tight_orbit(v.domain(), out.basis, tight.pattern);
      out.coords.accumulate(ring, elem, val);
      work = add(ring, work, scale(ring, ring.neg(val), expand_tight(ring, v.domain(), tight,
                                                                     work.support())));
      OFL_CHECK(work.value_of(*o).is_zero(), "stripped orbit must vanish");
    }
  }
  return out;
}

SymVector recombine(const Ring& ring, const OrbitSet& domain, const BasisCoords& c) {
  AtomSet s;
  std::vector<std::pair<TightOrbit, RingElem>> parts;
  for (const auto& [e, val] : c.coords.entries()) {
    const TightFamily& fam = c.basis.family(e.orbit_id);
    TightOrbit t = tight_orbit_of(domain.find(fam.source_orbit), fam, e);
    AtomSet d = t.defining_support();
    s.insert(d.begin(), d.end());
    parts.emplace_back(std::move(t), val);
  }
  SymVector out(domain, s);
  for (const auto& [t, val] : parts)
    out = add(ring, out, scale(ring, val, expand_tight(ring, domain, t, s)));
  return out;
}

}  // namespace ofl
