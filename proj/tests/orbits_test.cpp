#include <doctest.h>

#include <random>

#include "orbitlin/orbits.hpp"

using namespace ofl;

namespace {

OrbitDecl pairs_decl() { return OrbitDecl{"C", 2, PermGroup::trivial(2)}; }
OrbitDecl upairs_decl() { return OrbitDecl{"B", 2, PermGroup::symmetric(2)}; }
OrbitDecl cyc3_decl() { return OrbitDecl{"T", 3, PermGroup::closure(3, {{1, 2, 0}})}; }

PatEntry C(std::int64_t a) { return PatEntry::concrete(Atom(a)); }
PatEntry V(std::int32_t v) { return PatEntry::variable(v); }

AtomSet atoms(std::initializer_list<std::int64_t> ids) {
  AtomSet s;
  for (auto i : ids) s.insert(Atom(i));
  return s;
}

Tuple tup(std::initializer_list<std::int64_t> ids) {
  Tuple t;
  for (auto i : ids) t.push_back(Atom(i));
  return t;
}

// Oracle: two ground tuples name the same S-orbit element class iff some
// group permutation plus an S-fixing atom bijection maps one to the other.
bool same_s_orbit(const OrbitDecl& decl, const AtomSet& s, const Tuple& x, const Tuple& y) {
  for (const PosPerm& g : decl.group.elements()) {
    Tuple t = act_tuple(x, g);
    std::map<Atom, Atom> m;
    bool ok = true;
    for (std::size_t i = 0; i < t.size() && ok; ++i) {
      auto [it, fresh] = m.emplace(t[i], y[i]);
      if (!fresh && it->second != y[i]) ok = false;
      if (s.count(t[i]) != s.count(y[i])) ok = false;
      if (s.count(t[i]) && t[i] != y[i]) ok = false;
    }
    if (!ok) continue;
    AtomSet images;
    for (const auto& [k, v] : m)
      if (!images.insert(v).second) ok = false;
    if (ok) return true;
  }
  return false;
}

std::vector<Atom> pool_atoms(int n) {
  std::vector<Atom> out;
  for (int i = 1; i <= n; ++i) out.push_back(Atom(i));
  return out;
}

}  // namespace

TEST_CASE("pattern canonicalization") {
  OrbitDecl up = upairs_decl();
  CHECK(canonicalize(up, {V(7), C(3)}).entries == std::vector<PatEntry>{C(3), V(0)});

  OrbitDecl pr = pairs_decl();
  CHECK(canonicalize(pr, {V(2), V(5)}).entries == std::vector<PatEntry>{V(0), V(1)});

  OrbitDecl cy = cyc3_decl();
  CHECK(canonicalize(cy, {V(0), C(1), V(1)}).entries == std::vector<PatEntry>{C(1), V(0), V(1)});
}

TEST_CASE("canonicalization is idempotent and rejects repeats") {
  OrbitDecl cy = cyc3_decl();
  Pattern p = canonicalize(cy, {V(3), C(2), V(9)});
  CHECK(canonicalize(cy, p.entries) == p);
  CHECK_THROWS_AS(canonicalize(cy, {C(1), C(1), V(0)}), Error);
  CHECK_THROWS_AS(canonicalize(cy, {V(0), V(0), C(1)}), Error);
}

TEST_CASE("equal canonical forms exactly capture equal S-orbits") {
  for (const OrbitDecl& decl : {pairs_decl(), upairs_decl(), cyc3_decl()}) {
    AtomSet s = atoms({1, 2});
    std::vector<Pattern> pats = enumerate_s_orbits(decl, s);
    for (const Pattern& p : pats) {
      for (const Pattern& q : pats) {
        AtomSource f1 = AtomSource::beyond(atoms({1, 2, 3, 4, 5}));
        Element e1 = ground_pattern(decl, p, f1);
        Element e2 = ground_pattern(decl, q, f1);
        bool oracle = same_s_orbit(decl, s, e1.tuple, e2.tuple);
        CHECK(oracle == (p == q));
      }
    }
  }
}

TEST_CASE("S-orbit enumeration matches the worked examples") {
  OrbitDecl pr = pairs_decl();
  auto one = enumerate_s_orbits(pr, atoms({1}));
  REQUIRE(one.size() == 3);
  CHECK(one[0].entries == std::vector<PatEntry>{C(1), V(0)});
  CHECK(one[1].entries == std::vector<PatEntry>{V(0), C(1)});
  CHECK(one[2].entries == std::vector<PatEntry>{V(0), V(1)});

  CHECK(enumerate_s_orbits(pr, {}).size() == 1);
  CHECK(enumerate_s_orbits(pr, atoms({1, 2})).size() == 7);
}

TEST_CASE("S-orbit patterns partition every ground element") {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> ssize(0, 4);
  std::vector<OrbitDecl> decls{pairs_decl(), upairs_decl(), cyc3_decl(),
                               OrbitDecl{"A1", 1, PermGroup::trivial(1)}};
  for (int it = 0; it < 60; ++it) {
    const OrbitDecl& decl = decls[it % decls.size()];
    AtomSet s;
    int n = ssize(rng);
    for (int i = 1; i <= n; ++i) s.insert(Atom(i));
    std::vector<Pattern> pats = enumerate_s_orbits(decl, s);
    for (const Tuple& t : nonrepeating_tuples(pool_atoms(n + decl.arity + 2), decl.arity)) {
      Element e = make_element(decl, t);
      int hits = 0;
      for (const Pattern& p : pats)
        if (match(decl, p, s, e)) ++hits;
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("orbit size dichotomy") {
  OrbitDecl pr = pairs_decl();
  for (const Pattern& p : enumerate_s_orbits(pr, atoms({1, 2}))) {
    AtomSource f = AtomSource::beyond(atoms({1, 2}));
    Element e1 = ground_pattern(pr, p, f);
    Element e2 = ground_pattern(pr, p, f);
    if (pattern_dim(p) == 0)
      CHECK(e1 == e2);
    else
      CHECK(e1 != e2);  // two fresh instantiations are distinct elements
  }
}

TEST_CASE("matching") {
  OrbitDecl pr = pairs_decl();
  Pattern p = canonicalize(pr, {C(1), V(0)});
  auto m1 = match(pr, p, atoms({1}), make_element(pr, tup({1, 7})));
  REQUIRE(m1.has_value());
  CHECK(m1->at(0) == Atom(7));
  CHECK_FALSE(match(pr, p, atoms({1}), make_element(pr, tup({7, 1}))).has_value());

  OrbitDecl up = upairs_decl();
  Pattern q = canonicalize(up, {C(1), V(0)});
  auto m2 = match(up, q, atoms({1}), make_element(up, tup({7, 1})));
  REQUIRE(m2.has_value());
  CHECK(m2->at(0) == Atom(7));
}

TEST_CASE("match refuses images inside the ambient support") {
  OrbitDecl pr = pairs_decl();
  Pattern p = canonicalize(pr, {C(1), V(0)});
  CHECK_FALSE(match(pr, p, atoms({1, 2}), make_element(pr, tup({1, 2}))).has_value());
}

TEST_CASE("unification examples") {
  OrbitDecl pr = pairs_decl();
  Pattern p = canonicalize(pr, {C(1), V(0)});
  Pattern q = canonicalize(pr, {V(0), C(2)});
  auto u1 = unify(pr, p, q, atoms({1, 2}));
  REQUIRE(u1.size() == 1);
  CHECK(u1[0].entries == std::vector<PatEntry>{C(1), C(2)});

  Pattern q2 = canonicalize(pr, {C(2), V(0)});
  CHECK(unify(pr, p, q2, atoms({1, 2})).empty());

  Pattern all = canonicalize(pr, {V(0), V(1)});
  auto u3 = unify(pr, all, all, {});
  REQUIRE(u3.size() == 1);
  CHECK(u3[0].entries == std::vector<PatEntry>{V(0), V(1)});

  // A variable-only unifier refines over the ambient support.
  auto u4 = unify(pr, p, all, atoms({1, 2}));
  REQUIRE(u4.size() == 2);
  CHECK(u4[0].entries == std::vector<PatEntry>{C(1), C(2)});
  CHECK(u4[1].entries == std::vector<PatEntry>{C(1), V(0)});
}

TEST_CASE("unifiers exactly cover the denotation intersection") {
  for (const OrbitDecl& decl : {pairs_decl(), upairs_decl()}) {
    AtomSet s = atoms({1, 2});
    std::vector<Pattern> pats = enumerate_s_orbits(decl, s);
    std::vector<Atom> pool = pool_atoms(6);  // 1,2 plus four outside atoms
    for (const Pattern& p : pats) {
      for (const Pattern& q : pats) {
        AtomSet sp = pattern_concretes(p), sq = pattern_concretes(q);
        std::set<Element> universe;
        for (const Tuple& t : nonrepeating_tuples(pool, decl.arity))
          universe.insert(make_element(decl, t));
        std::set<Element> denote_p, denote_q, unified;
        for (const Element& e : universe) {
          if (match(decl, p, sp, e)) denote_p.insert(e);
          if (match(decl, q, sq, e)) denote_q.insert(e);
        }
        std::set<Element> expect;
        std::set_intersection(denote_p.begin(), denote_p.end(), denote_q.begin(), denote_q.end(),
                              std::inserter(expect, expect.begin()));
        for (const Pattern& u : unify(decl, p, q, s)) {
          for (const Element& e : universe)
            if (match(decl, u, s, e)) CHECK(unified.insert(e).second);  // patterns disjoint
        }
        CHECK(unified == expect);
      }
    }
  }
}

TEST_CASE("tight orbit families") {
  TightFamilySet pairs = tight_families(pairs_decl());
  CHECK(pairs.info.size() == 4);

  OrbitDecl single{"S", 0, PermGroup::trivial(0)};
  CHECK(tight_families(single).info.size() == 1);

  TightFamilySet up = tight_families(upairs_decl());
  REQUIRE(up.info.size() == 3);
  CHECK(up.info[0].decl.arity == 0);
  CHECK(up.info[1].decl.arity == 1);
  CHECK(up.info[2].decl.arity == 2);
  CHECK(up.info[2].decl.group.size() == 2);  // unordered concrete pairs
}

TEST_CASE("every tight pattern locates in exactly one family") {
  for (const OrbitDecl& decl : {pairs_decl(), upairs_decl(), cyc3_decl()}) {
    OrbitSet set({decl});
    TightFamilySet fams = tight_families_of_set(set);
    // Tight orbits are patterns whose concrete set is their defining support.
    for (const Pattern& p : enumerate_s_orbits(decl, atoms({1, 2, 3}))) {
      auto [fid, elem] = locate_tight_orbit(set, fams, p);
      const TightFamily& fam = fams.family(fid);
      TightOrbit back = tight_orbit_of(decl, fam, elem);
      CHECK(back.pattern == p);
    }
  }
}

TEST_CASE("fresh renaming never changes the matched pattern") {
  OrbitDecl cy = cyc3_decl();
  AtomSet s = atoms({1, 2});
  for (const Pattern& p : enumerate_s_orbits(cy, s)) {
    AtomSource f = AtomSource::beyond(atoms({1, 2, 3, 4, 5, 6}));
    Element e = ground_pattern(cy, p, f);
    FsPerm rho = FsPerm::transposition(Atom(7), Atom(8));
    Element e2 = apply(rho, cy, e);
    for (const Pattern& q : enumerate_s_orbits(cy, s)) {
      bool m1 = match(cy, q, s, e).has_value();
      bool m2 = match(cy, q, s, e2).has_value();
      CHECK(m1 == m2);
    }
  }
}

TEST_CASE("product patterns identify row-group alignments") {
  OrbitDecl rows = upairs_decl();
  OrbitDecl cols = pairs_decl();
  ProductPattern p1 = canonicalize_product(rows, cols, {V(0), V(1)}, {V(0), V(1)});
  ProductPattern p2 = canonicalize_product(rows, cols, {V(0), V(1)}, {V(1), V(0)});
  CHECK(p1 == p2);  // an unordered row pins no alignment with its column

  // With a trivial row group the two alignments stay distinct.
  OrbitDecl rows2{"B2", 2, PermGroup::trivial(2)};
  ProductPattern q1 = canonicalize_product(rows2, cols, {V(0), V(1)}, {V(0), V(1)});
  ProductPattern q2 = canonicalize_product(rows2, cols, {V(0), V(1)}, {V(1), V(0)});
  CHECK(q1 != q2);
}

TEST_CASE("product matching shares the variable namespace") {
  OrbitDecl rows{"B", 1, PermGroup::trivial(1)};
  OrbitDecl cols = pairs_decl();
  ProductPattern pp = canonicalize_product(rows, cols, {V(0)}, {V(0), V(1)});
  Element b = make_element(rows, tup({4}));
  CHECK(match_product(rows, cols, pp, {}, b, make_element(cols, tup({4, 9}))).has_value());
  CHECK_FALSE(match_product(rows, cols, pp, {}, b, make_element(cols, tup({9, 4}))).has_value());
  CHECK_FALSE(match_product(rows, cols, pp, {}, b, make_element(cols, tup({9, 5}))).has_value());
}

TEST_CASE("refinement partitions a pattern over a larger support") {
  OrbitDecl pr = pairs_decl();
  Pattern all = canonicalize(pr, {V(0), V(1)});
  auto refined = refine_pattern(pr, all, {}, atoms({1}));
  REQUIRE(refined.size() == 3);
  std::vector<Atom> pool = pool_atoms(4);
  for (const Tuple& t : nonrepeating_tuples(pool, 2)) {
    Element e = make_element(pr, t);
    int hits = 0;
    for (const Pattern& q : refined)
      if (match(pr, q, atoms({1}), e)) ++hits;
    CHECK(hits == 1);
  }
}
