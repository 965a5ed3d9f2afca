#include <doctest.h>

#include "examples.hpp"
#include "orbitlin/finsolve.hpp"
#include "random_gen.hpp"

using namespace ofl;
using namespace exsys;

namespace {

const Ring Q = Ring::rationals();
const Ring Z = Ring::integers();

InstKey key(std::initializer_list<std::int64_t> ids, int coord = 0, int comp = 0) {
  return InstKey{comp, tup(ids), coord};
}

std::map<Atom, Atom> sigma(std::initializer_list<std::pair<std::int64_t, std::int64_t>> pairs) {
  std::map<Atom, Atom> m;
  for (auto [a, b] : pairs) m.emplace(Atom(a), Atom(b));
  return m;
}

InstVector vec(std::initializer_list<std::pair<InstKey, int>> entries) {
  InstVector v;
  for (const auto& [k, c] : entries) v.set(k, RingElem{c});
  return v;
}

}  // namespace

TEST_CASE("cog reproduces the worked alternating sum") {
  InstVector w = vec({{key({1, 2}), 1}, {key({2, 1}), 2}});
  InstVector c = cog(Q, w, sigma({{1, 3}, {2, 4}}));
  CHECK(c.at(key({1, 2})) == RingElem{1});
  CHECK(c.at(key({2, 1})) == RingElem{2});
  CHECK(c.at(key({3, 2})) == RingElem{-1});
  CHECK(c.at(key({2, 3})) == RingElem{-2});
  CHECK(c.at(key({1, 4})) == RingElem{-1});
  CHECK(c.at(key({4, 1})) == RingElem{-2});
  CHECK(c.at(key({3, 4})) == RingElem{1});
  CHECK(c.at(key({4, 3})) == RingElem{2});
  CHECK(c.entries().size() == 8);
}

TEST_CASE("cog of zero and the restriction identity") {
  CHECK(cog(Q, InstVector{}, sigma({{1, 3}, {2, 4}})).is_zero());

  std::mt19937_64 rng(201);
  for (int it = 0; it < 300; ++it) {
    int k = 1 + static_cast<int>(rng() % 3);
    std::vector<Atom> a, s;
    for (int i = 0; i < k; ++i) a.push_back(Atom(i + 1));
    for (int i = 0; i < k; ++i) s.push_back(Atom(i + 1 + k));
    std::map<Atom, Atom> sg;
    for (int i = 0; i < k; ++i) sg.emplace(a[i], s[i]);
    InstVector w;
    for (const Tuple& t : nonrepeating_tuples(a, k))
      if (rng() % 2) w.set(InstKey{0, t, 0}, gen::random_coef(rng, Q));
    AtomSet aset(a.begin(), a.end());
    CHECK(restrict_main(cog(Q, w, sg), aset) == w);
  }
}

TEST_CASE("alternating sum vanishes off the full atom count") {
  // Entries whose tuples carry fewer than |sigma| atoms of A and S cancel.
  std::mt19937_64 rng(203);
  for (int it = 0; it < 300; ++it) {
    int k = 1 + static_cast<int>(rng() % 3);
    AtomSet a_and_s;
    std::map<Atom, Atom> sg;
    for (int i = 0; i < k; ++i) {
      sg.emplace(Atom(i + 1), Atom(i + 1 + k));
      a_and_s.insert(Atom(i + 1));
      a_and_s.insert(Atom(i + 1 + k));
    }
    // Random vector over a mix of A-atoms and unrelated atoms.
    std::vector<Atom> pool;
    for (int i = 0; i < k; ++i) pool.push_back(Atom(i + 1));
    pool.push_back(Atom(2 * k + 1));
    pool.push_back(Atom(2 * k + 2));
    int arity = 1 + static_cast<int>(rng() % std::min<std::size_t>(3, pool.size()));
    InstVector w;
    for (const Tuple& t : nonrepeating_tuples(pool, arity))
      if (rng() % 2) w.set(InstKey{0, t, 0}, gen::random_coef(rng, Q));
    InstVector summed = alternating_sigma_sum(Q, w, sg);
    for (const auto& [kk, val] : summed.entries()) {
      int hits = 0;
      for (Atom x : kk.tuple)
        if (a_and_s.count(x)) ++hits;
      CHECK(hits >= k);
    }
  }
}

TEST_CASE("delta over the worked examples") {
  InstVector w = vec({{key({1, 2}), 1}});
  InstVector d = delta(Q, w, {Atom(5), Atom(6)}, {Atom(1), Atom(2)});
  CHECK(d == vec({{key({1, 2}), 1}, {key({5, 2}), -1}, {key({1, 6}), -1}, {key({5, 6}), 1}}));

  CHECK(delta(Q, InstVector{}, {Atom(5)}, {}).is_zero());

  InstVector w1 = vec({{key({1}), 1}, {key({2}), 1}});
  InstVector d1 = delta(Q, w1, {Atom(3)}, {Atom(1), Atom(2)});
  CHECK(d1 == vec({{key({1}), 1}, {key({2}), 1}, {key({3}), -2}}));
}

TEST_CASE("the correction map is linear per order") {
  std::mt19937_64 rng(207);
  std::vector<Atom> dom{Atom(1), Atom(2), Atom(3)};
  std::vector<Atom> s{Atom(7), Atom(8)};
  std::vector<Atom> ord = dom;
  for (int it = 0; it < 100; ++it) {
    InstVector v, w;
    for (const Tuple& t : nonrepeating_tuples(dom, 2)) {
      if (rng() % 2) v.set(InstKey{0, t, 0}, gen::random_coef(rng, Q));
      if (rng() % 2) w.set(InstKey{0, t, 0}, gen::random_coef(rng, Q));
    }
    RingElem c = gen::random_coef(rng, Q);
    InstVector left = delta(Q, add(Q, v, w), s, ord);
    InstVector right = add(Q, delta(Q, v, s, ord), delta(Q, w, s, ord));
    CHECK(left == right);
    CHECK(delta(Q, scale(Q, c, v), s, ord) == scale(Q, c, delta(Q, v, s, ord)));
  }
}

namespace {

// The two hand-derived single-arity instances.
Instance unit_block_instance(const Ring& ring, int rep_scale) {
  Instance inst;
  inst.ring = ring;
  inst.components = {Component{1, 1}};
  inst.reps.push_back(vec({{key({1}), rep_scale}}));
  return inst;
}

}  // namespace

TEST_CASE("local solvability of the worked instances") {
  Instance a = unit_block_instance(Q, 1);
  a.target = vec({{key({1}), 1}, {key({2}), 1}});
  CHECK(locally_solvable(a));

  Instance b = unit_block_instance(Z, 2);
  b.target = vec({{key({1}), 1}});
  CHECK_FALSE(locally_solvable(b));
  Instance bq = b;
  bq.ring = Q;
  CHECK(locally_solvable(bq));

  Instance c = unit_block_instance(Z, 1);
  CHECK(locally_solvable(c));  // zero target
}

TEST_CASE("dimension reduction reproduces the worked reductions") {
  Instance a = unit_block_instance(Z, 1);
  a.target = vec({{key({1}), 1}, {key({2}), 1}});
  AtomSource fresh = AtomSource::beyond(a.atoms());
  ReduceStep step = reduce_dimension(a, fresh);
  CHECK(step.s == std::vector<Atom>{Atom(3)});
  REQUIRE(step.next.components.size() == 1);
  CHECK(step.next.components[0] == Component{0, 1});
  CHECK(step.next.target == vec({{key({}), 2}}));
  REQUIRE(step.next.reps.size() == 1);
  CHECK(step.next.reps[0] == vec({{key({}), 1}}));
  CHECK(finsolve_instance(step.next).solvable);
  Instance aq = step.next;
  aq.ring = Q;
  CHECK(finsolve_instance(aq).solvable);

  Instance b = unit_block_instance(Z, 2);
  b.target = vec({{key({1}), 1}});
  // Contractually requires local solvability, which holds over Q.
  Instance bq = b;
  bq.ring = Q;
  AtomSource fresh2 = AtomSource::beyond(bq.atoms());
  ReduceStep step2 = reduce_dimension(bq, fresh2);
  CHECK(step2.next.target == vec({{key({}), 1}}));
  REQUIRE(step2.next.reps.size() == 1);
  CHECK(step2.next.reps[0] == vec({{key({}), 2}}));
  CHECK(finsolve_instance(step2.next).solvable);  // 2q = 1 over Q
  Instance bz = step2.next;
  bz.ring = Z;
  CHECK_FALSE(finsolve_instance(bz).solvable);  // but not over Z
}

TEST_CASE("reduction strictly decreases the arity") {
  std::mt19937_64 rng(211);
  for (int it = 0; it < 60; ++it) {
    Instance inst;
    inst.ring = Q;
    int k = 1 + static_cast<int>(rng() % 2);
    inst.components = {Component{k, 1}};
    if (k == 2) inst.components.push_back(Component{1, 1});
    std::vector<Atom> pool{Atom(1), Atom(2), Atom(3)};
    auto rand_vec = [&] {
      InstVector v;
      for (std::size_t c = 0; c < inst.components.size(); ++c)
        for (const Tuple& t : nonrepeating_tuples(pool, inst.components[c].arity))
          if (rng() % 3 == 0)
            v.set(InstKey{static_cast<int>(c), t, 0}, gen::random_coef(rng, Q));
      return v;
    };
    for (int r = 0; r < 2; ++r) inst.reps.push_back(rand_vec());
    inst.target = rand_vec();
    if (!locally_solvable(inst)) continue;
    AtomSource fresh = AtomSource::beyond(inst.atoms());
    ReduceStep step = reduce_dimension(inst, fresh);
    CHECK(step.next.max_arity() < inst.max_arity());
  }
}

TEST_CASE("to_instance on the pair-sum system") {
  System s41 = pair_sum_system(Q);
  ToInstance ti = to_instance(Q, s41.a, s41.t);
  REQUIRE(ti.inst.components.size() == 3);
  CHECK(ti.inst.components[0] == Component{2, 1});
  CHECK(ti.inst.components[1] == Component{1, 1});
  CHECK(ti.inst.components[2] == Component{0, 1});
  REQUIRE(ti.inst.reps.size() == 1);
  // The column becomes the two orderings of its ground pair.
  const InstVector& rep = ti.inst.reps[0];
  REQUIRE(rep.entries().size() == 2);
  Tuple t0 = rep.entries().begin()->first.tuple;
  Tuple rev{t0[1], t0[0]};
  CHECK(rep.at(InstKey{0, t0, 0}) == Q.one());
  CHECK(rep.at(InstKey{0, rev, 0}) == Q.one());
  // The target is the unit on the whole-orbit coordinate.
  CHECK(ti.inst.target == vec({{key({}, 0, 2), 1}}));
}

TEST_CASE("to_instance of trivial systems") {
  OrbitSet rows({OrbitDecl{"B", 1, PermGroup::trivial(1)}});
  OrbitSet cols({OrbitDecl{"C", 1, PermGroup::trivial(1)}});
  SymMatrix zero(rows, cols, {});
  SymVector zt(rows, {});
  ToInstance ti = to_instance(Q, zero, zt);
  CHECK(ti.inst.target.is_zero());
  CHECK(finsolve_instance(ti.inst).solvable);
}

TEST_CASE("finsolve decides the worked systems") {
  CHECK_FALSE(finsolve(Q, pair_sum_system(Q).a, pair_sum_system(Q).t).solvable);
  CHECK_FALSE(finsolve(Z, pair_sum_system(Z).a, pair_sum_system(Z).t).solvable);
  CHECK_FALSE(finsolve(Z, row_sum_system(Z).a, row_sum_system(Z).t).solvable);
}

TEST_CASE("finsolve finds and verifies a trivial combination") {
  // Target = one concrete column of the matrix.
  System s = pair_sum_system(Q);
  const OrbitDecl& c = s.a.cols().find("C");
  Element c0 = make_element(c, tup({1, 2}));
  SymVector t = column_vector(s.a, c0);
  FinSolveResult r = finsolve(Q, s.a, t);
  REQUIRE(r.solvable);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->entries().size() == 1);
  CHECK(r.witness->entries().begin()->second == Q.one());
}

TEST_CASE("finsolve is complete on constructed combinations") {
  // Build targets as known finitary combinations of renamed columns; the
  // solver must accept every one of them, in both rings.
  std::mt19937_64 rng(223);
  for (int it = 0; it < 25; ++it) {
    const Ring& ring = it % 2 ? Z : Q;
    System s = it % 3 == 0 ? row_sum_system(ring)
                           : (it % 3 == 1 ? pair_sum_system(ring) : set_sum_system(ring));
    const OrbitDecl& cd = s.a.cols().find("C");
    std::vector<Atom> pool{Atom(1), Atom(2), Atom(3), Atom(4)};
    SymVector t(s.a.rows(), {});
    bool first = true;
    std::set<Element> used;
    for (const Tuple& tu : nonrepeating_tuples(pool, 2)) {
      if (rng() % 3) continue;
      Element c = make_element(cd, tu);
      if (!used.insert(c).second) continue;
      RingElem q = gen::random_coef(rng, ring);
      SymVector col = scale(ring, q, column_vector(s.a, c));
      t = first ? col : add(ring, t, col);
      first = false;
    }
    if (first) t = SymVector(s.a.rows(), {});
    FinSolveResult r = finsolve(ring, s.a, t);
    CHECK(r.solvable);
    CHECK(r.witness.has_value());
  }
}

TEST_CASE("instance driver certificates reproduce the target exactly") {
  std::mt19937_64 rng(227);
  for (int it = 0; it < 40; ++it) {
    const Ring& ring = it % 2 ? Z : Q;
    Instance inst;
    inst.ring = ring;
    inst.components = {Component{1, 2}};
    std::vector<Atom> pool{Atom(1), Atom(2), Atom(3)};
    auto rand_vec = [&] {
      InstVector v;
      for (const Tuple& t : nonrepeating_tuples(pool, 1))
        for (int j = 0; j < 2; ++j)
          if (rng() % 2) v.set(InstKey{0, t, j}, gen::random_coef(rng, ring));
      return v;
    };
    for (int r = 0; r < 2; ++r) inst.reps.push_back(rand_vec());
    // Target: a known combination, possibly renamed.
    InstVector t = scale(ring, ring.from_int(2), apply(FsPerm::transposition(Atom(1), Atom(9)),
                                                       inst.reps[0]));
    t = add(ring, t, inst.reps[1]);
    inst.target = t;
    FinSolveOutcome out = finsolve_instance(inst);
    CHECK(out.solvable);  // the combination exists by construction
    REQUIRE(out.combo.has_value());
    InstVector sum;
    for (const ComboTerm& term : *out.combo)
      sum = add(ring, sum, scale(ring, term.coef, apply(term.perm, inst.reps[term.rep])));
    CHECK(sum == inst.target);
  }
}
