#include "orbitlin/linvec.hpp"

#include <algorithm>

namespace ofl {

RingElem FinVector::at(const Element& e) const {
  auto it = entries_.find(e);
  return it == entries_.end() ? RingElem{0} : it->second;
}

void FinVector::set(const Element& e, const RingElem& v) {
  if (!domain_.has(e.orbit_id)) throw Error("element outside vector domain");
  if (v.is_zero())
    entries_.erase(e);
  else
    entries_[e] = v;
}

void FinVector::accumulate(const Ring& ring, const Element& e, const RingElem& v) {
  set(e, ring.add(at(e), v));
}

AtomSet FinVector::atoms() const {
  AtomSet s;
  for (const auto& [e, v] : entries_) s.insert(e.tuple.begin(), e.tuple.end());
  return s;
}

FinVector apply(const FsPerm& p, const FinVector& v) {
  FinVector out(v.domain());
  for (const auto& [e, val] : v.entries())
    out.set(apply(p, v.domain().find(e.orbit_id), e), val);
  return out;
}

void SymVector::set(const Pattern& p, const RingElem& v) {
  const OrbitDecl& decl = domain_.find(p.orbit_id);
  Pattern canon = canonicalize(decl, p.entries);
  for (Atom a : pattern_concretes(canon))
    if (!support_.count(a)) throw Error("pattern atom outside declared support");
  if (v.is_zero())
    entries_.erase(canon);
  else
    entries_[canon] = v;
}

void SymVector::accumulate(const Ring& ring, const Pattern& p, const RingElem& v) {
  const OrbitDecl& decl = domain_.find(p.orbit_id);
  Pattern canon = canonicalize(decl, p.entries);
  set(canon, ring.add(value_of(canon), v));
}

RingElem SymVector::value_of(const Pattern& p) const {
  auto it = entries_.find(p);
  return it == entries_.end() ? RingElem{0} : it->second;
}

AtomSet SymVector::atoms() const {
  AtomSet s = support_;
  for (const auto& [p, v] : entries_)
    for (const PatEntry& e : p.entries)
      if (!e.is_var()) s.insert(e.atom);
  return s;
}

RingElem eval(const SymVector& v, const Element& e) {
  const OrbitDecl& decl = v.domain().find(e.orbit_id);
  for (const auto& [p, val] : v.entries()) {
    if (p.orbit_id != e.orbit_id) continue;
    if (match(decl, p, v.support(), e)) return val;
  }
  return RingElem{0};
}

SymVector refine(const Ring& ring, const SymVector& v, const AtomSet& support) {
  for (Atom a : v.support())
    if (!support.count(a)) throw Error("refinement must grow the support");
  SymVector out(v.domain(), support);
  for (const auto& [p, val] : v.entries()) {
    const OrbitDecl& decl = v.domain().find(p.orbit_id);
    for (const Pattern& q : refine_pattern(decl, p, v.support(), support))
      out.set(q, val);
  }
  return out;
}

SymVector add(const Ring& ring, const SymVector& v, const SymVector& w) {
  if (v.domain() != w.domain()) throw Error("vector domain mismatch");
  AtomSet s = v.support();
  s.insert(w.support().begin(), w.support().end());
  SymVector a = refine(ring, v, s);
  SymVector b = refine(ring, w, s);
  for (const auto& [p, val] : b.entries()) a.accumulate(ring, p, val);
  return a;
}

SymVector scale(const Ring& ring, const RingElem& c, const SymVector& v) {
  SymVector out(v.domain(), v.support());
  if (c.is_zero()) return out;
  for (const auto& [p, val] : v.entries()) out.set(p, ring.mul(c, val));
  return out;
}

bool sym_equal(const Ring& ring, const SymVector& v, const SymVector& w) {
  if (v.domain() != w.domain()) throw Error("vector domain mismatch");
  AtomSet s = v.support();
  s.insert(w.support().begin(), w.support().end());
  return refine(ring, v, s).entries() == refine(ring, w, s).entries();
}

SymVector apply(const FsPerm& p, const SymVector& v) {
  SymVector out(v.domain(), p(v.support()));
  for (const auto& [pat, val] : v.entries())
    out.set(apply(p, v.domain().find(pat.orbit_id), pat), val);
  return out;
}

SymVector sym_from_fin(const FinVector& v) {
  SymVector out(v.domain(), v.atoms());
  for (const auto& [e, val] : v.entries()) out.set(element_as_pattern(e), val);
  return out;
}

void SymMatrix::set(const ProductPattern& pp, const RingElem& v) {
  ProductPattern canon =
      canonicalize_product(rows_.find(pp.row_orbit), cols_.find(pp.col_orbit), pp.row, pp.col);
  for (Atom a : product_concretes(canon))
    if (!support_.count(a)) throw Error("matrix pattern atom outside declared support");
  if (v.is_zero())
    entries_.erase(canon);
  else
    entries_[canon] = v;
}

void SymMatrix::set_checked(const Ring& ring, const ProductPattern& pp, const RingElem& v) {
  ProductPattern canon =
      canonicalize_product(rows_.find(pp.row_orbit), cols_.find(pp.col_orbit), pp.row, pp.col);
  auto it = entries_.find(canon);
  if (it != entries_.end() && !ring.eq(it->second, v))
    throw Error("conflicting coefficient for product pattern " + to_string(canon));
  set(canon, v);
}

AtomSet SymMatrix::atoms() const {
  AtomSet s = support_;
  for (const auto& [pp, v] : entries_) {
    AtomSet c = product_concretes(pp);
    s.insert(c.begin(), c.end());
  }
  return s;
}

RingElem eval_matrix(const SymMatrix& a, const Element& row, const Element& col) {
  const OrbitDecl& rd = a.rows().find(row.orbit_id);
  const OrbitDecl& cd = a.cols().find(col.orbit_id);
  for (const auto& [pp, val] : a.entries()) {
    if (pp.row_orbit != row.orbit_id || pp.col_orbit != col.orbit_id) continue;
    if (match_product(rd, cd, pp, a.support(), row, col)) return val;
  }
  return RingElem{0};
}

namespace {

// All assignments of the row-side pattern onto the element b, with variable
// images outside the matrix support.
std::vector<std::map<std::int32_t, Atom>> side_matches(const OrbitDecl& decl,
                                                       const std::vector<PatEntry>& side,
                                                       const AtomSet& support, const Element& b) {
  std::vector<std::map<std::int32_t, Atom>> out;
  std::set<std::map<std::int32_t, Atom>> seen;
  for (const PosPerm& g : decl.group.elements()) {
    Tuple target = act_tuple(b.tuple, g);
    std::map<std::int32_t, Atom> assign;
    bool ok = true;
    for (std::size_t i = 0; i < target.size() && ok; ++i) {
      if (side[i].is_var()) {
        if (support.count(target[i])) {
          ok = false;
          break;
        }
        auto [it, fresh] = assign.emplace(side[i].var, target[i]);
        if (!fresh && it->second != target[i]) ok = false;
      } else if (side[i].atom != target[i]) {
        ok = false;
      }
    }
    if (ok && seen.insert(assign).second) out.push_back(assign);
  }
  return out;
}

SymVector slice(const SymMatrix& a, const Element& b, bool by_row) {
  const OrbitSet& fixed_set = by_row ? a.rows() : a.cols();
  const OrbitSet& free_set = by_row ? a.cols() : a.rows();
  const OrbitDecl& fixed_decl = fixed_set.find(b.orbit_id);
  AtomSet support = a.support();
  support.insert(b.tuple.begin(), b.tuple.end());
  SymVector out(free_set, support);
  for (const auto& [pp, coef] : a.entries()) {
    const std::string& fixed_orbit = by_row ? pp.row_orbit : pp.col_orbit;
    if (fixed_orbit != b.orbit_id) continue;
    const std::vector<PatEntry>& fixed_side = by_row ? pp.row : pp.col;
    const std::vector<PatEntry>& free_side = by_row ? pp.col : pp.row;
    const OrbitDecl& free_decl = free_set.find(by_row ? pp.col_orbit : pp.row_orbit);
    std::set<Pattern> emitted;
    for (const auto& assign : side_matches(fixed_decl, fixed_side, a.support(), b)) {
      std::vector<PatEntry> entries = free_side;
      for (PatEntry& e : entries) {
        if (!e.is_var()) continue;
        auto it = assign.find(e.var);
        if (it != assign.end()) e = PatEntry::concrete(it->second);
      }
      emitted.insert(canonicalize(free_decl, std::move(entries)));
    }
    for (const Pattern& p : emitted) {
      OFL_CHECK(out.value_of(p).is_zero(), "overlapping slice patterns");
      out.set(p, coef);
    }
  }
  return out;
}

}  // namespace

SymVector row_vector(const SymMatrix& a, const Element& b) { return slice(a, b, true); }

SymVector column_vector(const SymMatrix& a, const Element& c) { return slice(a, c, false); }

std::optional<RingElem> inner(const Ring& ring, const SymVector& x, const SymVector& y) {
  if (x.domain() != y.domain()) throw Error("inner: domain mismatch");
  for (const auto& [p, vx] : x.entries()) {
    for (const auto& [q, vy] : y.entries()) {
      if (p.orbit_id != q.orbit_id) continue;
      const OrbitDecl& decl = x.domain().find(p.orbit_id);
      for (const RawUnifier& u : raw_unifiers(decl, p, x.support(), q, y.support())) {
        if (!u.left_vars.empty()) return std::nullopt;  // infinite common domain
      }
    }
  }
  // Finite common domain: every shared element uses only joint-support atoms.
  AtomSet joint = x.support();
  joint.insert(y.support().begin(), y.support().end());
  std::vector<Atom> pool(joint.begin(), joint.end());
  RingElem sum{0};
  for (const OrbitDecl& decl : x.domain().orbits()) {
    std::set<Element> seen;
    for (const Tuple& t : nonrepeating_tuples(pool, decl.arity)) {
      Element e = make_element(decl, t);
      if (!seen.insert(e).second) continue;
      RingElem vx = eval(x, e);
      if (vx.is_zero()) continue;
      RingElem vy = eval(y, e);
      if (vy.is_zero()) continue;
      sum = ring.add(sum, ring.mul(vx, vy));
    }
  }
  return sum;
}

std::optional<ExactnessViolation> find_exactness_violation(const SymMatrix& a,
                                                           const SymVector& x) {
  if (a.cols() != x.domain()) throw Error("exactness: column set mismatch");
  for (const auto& [pp, coef] : a.entries()) {
    const OrbitDecl& col_decl = a.cols().find(pp.col_orbit);
    std::set<std::int32_t> row_vars;
    for (const PatEntry& e : pp.row)
      if (e.is_var()) row_vars.insert(e.var);
    Pattern col_pattern{pp.col_orbit, pp.col};
    for (const auto& [p, val] : x.entries()) {
      if (p.orbit_id != pp.col_orbit) continue;
      for (const RawUnifier& u : raw_unifiers(col_decl, col_pattern, a.support(), p, x.support())) {
        for (std::size_t cid = 0; cid < u.left_vars.size(); ++cid) {
          OFL_CHECK(!u.left_vars[cid].empty() && !u.right_vars[cid].empty(),
                    "unifier class missing a side");
          bool tied_to_row = false;
          for (std::int32_t v : u.left_vars[cid])
            if (row_vars.count(v)) tied_to_row = true;
          if (!tied_to_row)
            return ExactnessViolation{pp, p, u, static_cast<int>(cid)};
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<SymVector> mat_vec(const Ring& ring, const SymMatrix& a, const SymVector& x) {
  if (a.cols() != x.domain()) throw Error("mat_vec: column set mismatch");
  if (find_exactness_violation(a, x)) return std::nullopt;
  AtomSet s = a.support();
  s.insert(x.support().begin(), x.support().end());
  AtomSet everything = a.atoms();
  {
    AtomSet xa = x.atoms();
    everything.insert(xa.begin(), xa.end());
  }
  SymVector out(a.rows(), s);
  for (const OrbitDecl& decl : a.rows().orbits()) {
    for (const Pattern& p : enumerate_s_orbits(decl, s)) {
      AtomSource fresh = AtomSource::beyond(everything);
      Element b1 = ground_pattern(decl, p, fresh);
      Element b2 = ground_pattern(decl, p, fresh);
      std::optional<RingElem> v1 = inner(ring, row_vector(a, b1), x);
      OFL_CHECK(v1.has_value(), "row inner product must be finite after exactness");
      if (pattern_dim(p) > 0) {
        std::optional<RingElem> v2 = inner(ring, row_vector(a, b2), x);
        OFL_CHECK(v2 && ring.eq(*v1, *v2), "value not constant on row orbit");
      }
      if (!v1->is_zero()) out.set(p, *v1);
    }
  }
  return out;
}

}  // namespace ofl
