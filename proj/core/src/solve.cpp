#include "orbitlin/solve.hpp"

namespace ofl {

namespace {

// Instantiates the violating unifier into concrete (b, c) and checks the
// three conditions that make it a genuine failure of well-definedness.
void ground_check_violation(const Ring& ring, const SymMatrix& a, const SymVector& x,
                            const ExactnessViolation& v) {
  AtomSet used = a.atoms();
  {
    AtomSet xa = x.atoms();
    used.insert(xa.begin(), xa.end());
  }
  AtomSource fresh = AtomSource::beyond(used);

  // Atoms for the unifier's variable classes.
  std::map<std::int32_t, Atom> class_atom;
  for (const PatEntry& e : v.unifier.entries)
    if (e.is_var() && !class_atom.count(e.var)) class_atom.emplace(e.var, fresh.fresh());

  // Column tuple straight from the unifier.
  Tuple col_tuple;
  for (const PatEntry& e : v.unifier.entries)
    col_tuple.push_back(e.is_var() ? class_atom.at(e.var) : e.atom);

  // Row tuple: matrix-pattern variables shared with a class take that class's
  // atom; everything else is fresh.
  std::map<std::int32_t, std::int32_t> var_class;
  for (std::size_t cid = 0; cid < v.unifier.left_vars.size(); ++cid)
    for (std::int32_t mv : v.unifier.left_vars[cid]) var_class.emplace(mv, static_cast<std::int32_t>(cid));
  std::map<std::int32_t, Atom> row_assign;
  Tuple row_tuple;
  for (const PatEntry& e : v.matrix_pattern.row) {
    if (!e.is_var()) {
      row_tuple.push_back(e.atom);
      continue;
    }
    auto it = row_assign.find(e.var);
    if (it == row_assign.end()) {
      Atom val = var_class.count(e.var) ? class_atom.at(var_class.at(e.var)) : fresh.fresh();
      it = row_assign.emplace(e.var, val).first;
    }
    row_tuple.push_back(it->second);
  }

  Element b = make_element(a.rows().find(v.matrix_pattern.row_orbit), row_tuple);
  Element c = make_element(a.cols().find(v.matrix_pattern.col_orbit), col_tuple);
  OFL_CHECK(!eval_matrix(a, b, c).is_zero(), "violation must hit a nonzero matrix entry");
  OFL_CHECK(!eval(x, c).is_zero(), "violation must hit a nonzero vector entry");
  AtomSet allowed = support_of(b.tuple);
  allowed.insert(a.support().begin(), a.support().end());
  allowed.insert(x.support().begin(), x.support().end());
  bool outside = false;
  for (Atom atom : c.tuple)
    if (!allowed.count(atom)) outside = true;
  OFL_CHECK(outside, "violation must name a column atom outside the row and joint supports");
}

}  // namespace

ExactnessReport is_exact(const Ring& ring, const SymMatrix& a, const SymVector& x) {
  ExactnessReport report;
  std::optional<ExactnessViolation> v = find_exactness_violation(a, x);
  if (v) {
    ground_check_violation(ring, a, x, *v);
    report.exact = false;
    report.violation = std::move(v);
  }
  return report;
}

std::vector<TildeColumn> build_tilde_columns(const Ring& ring, const SymMatrix& a) {
  const AtomSet t = a.support();
  AtomSource fresh = AtomSource::beyond(a.atoms());
  std::vector<TildeColumn> out;
  for (const OrbitDecl& decl : a.cols().orbits()) {
    std::vector<Pattern> t_orbits = enumerate_s_orbits(decl, t);
    for (std::size_t pi = 0; pi < t_orbits.size(); ++pi) {
      const Pattern& base = t_orbits[pi];
      TightFamilySet fams =
          tight_families_within(decl, base, decl.id + "@" + std::to_string(pi));
      for (const TightFamily& fam : fams.info) {
        // Ground the family representative: distinct fresh atoms for the
        // concretized variables.
        std::map<std::int32_t, Atom> sub;
        for (std::int32_t w : fam.var_subset) sub.emplace(w, fresh.fresh());
        std::vector<PatEntry> entries = base.entries;
        for (PatEntry& e : entries)
          if (e.is_var() && sub.count(e.var)) e = PatEntry::concrete(sub.at(e.var));
        Pattern tight = canonicalize(decl, std::move(entries));

        AtomSet support = t;
        {
          AtomSet conc = pattern_concretes(tight);
          support.insert(conc.begin(), conc.end());
        }
        SymVector indicator(a.cols(), support);
        indicator.set(tight, ring.one());

        if (find_exactness_violation(a, indicator)) continue;
        std::optional<SymVector> column = mat_vec(ring, a, indicator);
        OFL_CHECK(column.has_value(), "exact indicator must have a defined product");
        out.push_back(TildeColumn{std::move(tight), std::move(indicator), std::move(*column)});
      }
    }
  }
  return out;
}

TildeInstance tilde_instance(const Ring& ring, const SymMatrix& a, const SymVector& t) {
  TildeInstance out;
  out.columns = build_tilde_columns(ring, a);
  std::vector<SymVector> cols;
  cols.reserve(out.columns.size());
  for (const TildeColumn& c : out.columns) cols.push_back(c.column);
  InstanceBuild build = instance_from_columns(ring, a.rows(), cols, t, a.support());
  out.inst = std::move(build.inst);
  return out;
}

bool verify(const Ring& ring, const SymMatrix& a, const SymVector& x, const SymVector& t) {
  if (find_exactness_violation(a, x)) return false;
  std::optional<SymVector> product = mat_vec(ring, a, x);
  if (!product) return false;
  return sym_equal(ring, *product, t);
}

SolveResult solve(const Ring& ring, const SymMatrix& a, const SymVector& t) {
  if (t.domain() != a.rows()) throw Error("target domain differs from the matrix rows");
  TildeInstance ti = tilde_instance(ring, a, t);

  AtomSet used = a.atoms();
  {
    AtomSet ta = t.atoms();
    used.insert(ta.begin(), ta.end());
    AtomSet ia = ti.inst.atoms();
    used.insert(ia.begin(), ia.end());
    for (const TildeColumn& c : ti.columns) {
      AtomSet ca = c.indicator.atoms();
      used.insert(ca.begin(), ca.end());
    }
  }
  AtomSource fresh = AtomSource::beyond(used);
  FinSolveOutcome outcome = finsolve_instance(ti.inst, fresh);

  SolveResult result;
  result.trace = std::move(outcome.trace);
  result.solvable = outcome.solvable;
  if (!outcome.solvable) return result;
  OFL_CHECK(outcome.combo.has_value(), "affirmative answers must carry a combination");

  // Pull the combination back onto renamed tight-orbit vectors.
  std::map<Pattern, RingElem> merged;
  for (const ComboTerm& term : *outcome.combo) {
    OFL_CHECK(term.perm.fixes(a.support()), "witness renaming must fix the matrix support");
    const TildeColumn& col = ti.columns[term.rep];
    const OrbitDecl& decl = a.cols().find(col.tight.orbit_id);
    Pattern moved = apply(term.perm, decl, col.tight);
    auto [it, inserted] = merged.emplace(moved, term.coef);
    if (!inserted) it->second = ring.add(it->second, term.coef);
  }

  AtomSet sx = a.support();
  for (const auto& [p, coef] : merged) {
    AtomSet conc = pattern_concretes(p);
    sx.insert(conc.begin(), conc.end());
  }
  SymVector x(a.cols(), sx);
  for (const auto& [p, coef] : merged) {
    if (coef.is_zero()) continue;
    result.combo.emplace_back(p, coef);
    const OrbitDecl& decl = a.cols().find(p.orbit_id);
    AtomSet own = a.support();
    {
      AtomSet conc = pattern_concretes(p);
      own.insert(conc.begin(), conc.end());
    }
    for (const Pattern& q : refine_pattern(decl, p, own, sx)) x.accumulate(ring, q, coef);
  }

  if (!verify(ring, a, x, t))
    throw InternalError("reconstructed witness failed verification");
  result.witness = std::move(x);
  return result;
}

}  // namespace ofl
