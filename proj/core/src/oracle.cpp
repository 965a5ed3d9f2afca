#include "orbitlin/oracle.hpp"

namespace ofl {

int default_pool_size(const SymMatrix& a, const SymVector& t) {
  AtomSet used = a.atoms();
  AtomSet ta = t.atoms();
  used.insert(ta.begin(), ta.end());
  int max_arity = 0;
  for (const OrbitDecl& d : a.rows().orbits()) max_arity = std::max(max_arity, d.arity);
  for (const OrbitDecl& d : a.cols().orbits()) max_arity = std::max(max_arity, d.arity);
  return static_cast<int>(used.size()) + 3 * max_arity;
}

namespace {

struct Candidate {
  Pattern pattern;      // ground element or tight orbit
  SymVector indicator;  // over the column set, its own support
  SymVector column;     // a * indicator
};

std::vector<Element> pool_elements(const OrbitDecl& decl, const std::vector<Atom>& pool) {
  std::set<Element> seen;
  std::vector<Element> out;
  for (const Tuple& t : nonrepeating_tuples(pool, decl.arity)) {
    Element e = make_element(decl, t);
    if (seen.insert(e).second) out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

PoolSearchResult pool_search(const Ring& ring, const SymMatrix& a, const SymVector& t,
                             SolveMode mode, int pool_size) {
  PoolSearchResult result;
  AtomSet used = a.atoms();
  {
    AtomSet ta = t.atoms();
    used.insert(ta.begin(), ta.end());
  }
  AtomSet pool_set = used;
  AtomSource fresh = AtomSource::beyond(used);
  while (static_cast<int>(pool_set.size()) < pool_size) pool_set.insert(fresh.fresh());
  std::vector<Atom> pool(pool_set.begin(), pool_set.end());

  // Candidate columns over the pool.
  std::vector<Candidate> candidates;
  for (const OrbitDecl& decl : a.cols().orbits()) {
    if (mode == SolveMode::Finitary) {
      for (const Element& c : pool_elements(decl, pool)) {
        Pattern p = element_as_pattern(c);
        SymVector ind(a.cols(), pattern_concretes(p));
        ind.set(p, ring.one());
        candidates.push_back(Candidate{p, ind, column_vector(a, c)});
      }
    } else {
      for (const Pattern& p : enumerate_s_orbits(decl, pool_set)) {
        SymVector ind(a.cols(), pattern_concretes(p));
        ind.set(p, ring.one());
        if (find_exactness_violation(a, ind)) continue;
        std::optional<SymVector> col = mat_vec(ring, a, ind);
        OFL_CHECK(col.has_value(), "exact candidate must have a defined product");
        candidates.push_back(Candidate{p, std::move(ind), std::move(*col)});
      }
    }
  }

  // Equations: rows over the pool plus enough generic atoms to stand for any
  // atoms outside it.
  int max_row_arity = 0;
  for (const OrbitDecl& d : a.rows().orbits()) max_row_arity = std::max(max_row_arity, d.arity);
  std::vector<Atom> row_pool = pool;
  for (Atom x : fresh.take(max_row_arity)) row_pool.push_back(x);

  Matrix m;
  Row rhs;
  for (const OrbitDecl& decl : a.rows().orbits()) {
    for (const Element& b : pool_elements(decl, row_pool)) {
      Row row;
      row.reserve(candidates.size());
      for (const Candidate& c : candidates) row.push_back(eval(c.column, b));
      m.push_back(std::move(row));
      rhs.push_back(eval(t, b));
    }
  }
  auto sol = solve_finite(ring, m, rhs);
  if (!sol) return result;

  AtomSet sx = a.support();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if ((*sol)[i].is_zero()) continue;
    AtomSet conc = pattern_concretes(candidates[i].pattern);
    sx.insert(conc.begin(), conc.end());
  }
  SymVector x(a.cols(), sx);
  std::vector<std::pair<Pattern, RingElem>> combo;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const RingElem& q = (*sol)[i];
    if (q.is_zero()) continue;
    combo.emplace_back(candidates[i].pattern, q);
    const OrbitDecl& decl = a.cols().find(candidates[i].pattern.orbit_id);
    for (const Pattern& r :
         refine_pattern(decl, candidates[i].pattern, candidates[i].indicator.support(), sx))
      x.accumulate(ring, r, q);
  }
  if (!verify(ring, a, x, t))
    throw InternalError("pool search produced a combination that fails verification");
  result.witness = std::move(x);
  result.combo = std::move(combo);
  return result;
}

namespace {

// The zero-arity coordinates of a vector are untouched by renamings, so the
// target's zero-arity part must already be spanned by the representatives'.
bool arity_zero_part_solvable(const Instance& inst) {
  int comp = -1;
  for (std::size_t i = 0; i < inst.components.size(); ++i)
    if (inst.components[i].arity == 0) comp = static_cast<int>(i);
  if (comp < 0) return true;
  const int width = inst.components[comp].width;
  Matrix m;
  Row rhs;
  for (int j = 0; j < width; ++j) {
    InstKey key{comp, {}, j};
    Row row;
    for (const InstVector& r : inst.reps) row.push_back(r.at(key));
    m.push_back(std::move(row));
    rhs.push_back(inst.target.at(key));
  }
  return solve_finite(inst.ring, m, rhs).has_value();
}

}  // namespace

bool necessary_check(const Ring& ring, const SymMatrix& a, const SymVector& t, SolveMode mode) {
  Instance inst = mode == SolveMode::Finitary ? to_instance(ring, a, t).inst
                                              : tilde_instance(ring, a, t).inst;
  return locally_solvable(inst) && arity_zero_part_solvable(inst);
}

Sandwich run_sandwich(const Ring& ring, const SymMatrix& a, const SymVector& t, SolveMode mode,
                      int pool_size) {
  Sandwich s;
  s.sufficient_yes = pool_search(ring, a, t, mode, pool_size).witness.has_value();
  s.necessary_yes = necessary_check(ring, a, t, mode);
  if (s.sufficient_yes && !s.necessary_yes)
    throw InternalError("sandwich sides contradict each other");
  if (s.sufficient_yes)
    s.forced = true;
  else if (!s.necessary_yes)
    s.forced = false;
  return s;
}

}  // namespace ofl
