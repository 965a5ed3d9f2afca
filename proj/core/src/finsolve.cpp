#include "orbitlin/finsolve.hpp"

#include <algorithm>

namespace ofl {

RingElem InstVector::at(const InstKey& k) const {
  auto it = entries_.find(k);
  return it == entries_.end() ? RingElem{0} : it->second;
}

void InstVector::set(const InstKey& k, const RingElem& v) {
  if (v.is_zero())
    entries_.erase(k);
  else
    entries_[k] = v;
}

void InstVector::accumulate(const Ring& ring, const InstKey& k, const RingElem& v) {
  set(k, ring.add(at(k), v));
}

AtomSet InstVector::atoms() const {
  AtomSet s;
  for (const auto& [k, v] : entries_) s.insert(k.tuple.begin(), k.tuple.end());
  return s;
}

InstVector InstVector::component_part(int comp) const {
  InstVector out;
  for (const auto& [k, v] : entries_)
    if (k.comp == comp) out.set(k, v);
  return out;
}

InstVector apply(const FsPerm& p, const InstVector& v) {
  InstVector out;
  for (const auto& [k, val] : v.entries()) {
    Tuple t = p(k.tuple);
    OFL_CHECK(tuple_distinct(t), "renaming must keep tuples non-repeating");
    out.set(InstKey{k.comp, std::move(t), k.coord}, val);
  }
  return out;
}

InstVector add(const Ring& ring, const InstVector& v, const InstVector& w) {
  InstVector out = v;
  for (const auto& [k, val] : w.entries()) out.accumulate(ring, k, val);
  return out;
}

InstVector scale(const Ring& ring, const RingElem& c, const InstVector& v) {
  InstVector out;
  if (c.is_zero()) return out;
  for (const auto& [k, val] : v.entries()) out.set(k, ring.mul(c, val));
  return out;
}

namespace {
InstVector sub(const Ring& ring, const InstVector& v, const InstVector& w) {
  return add(ring, v, scale(ring, ring.from_int(-1), w));
}
}  // namespace

AtomSet Instance::atoms() const {
  AtomSet s = target.atoms();
  for (const InstVector& r : reps) {
    AtomSet a = r.atoms();
    s.insert(a.begin(), a.end());
  }
  return s;
}

void Instance::validate() const {
  std::set<int> arities;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const Component& c = components[i];
    if (c.arity < 0 || c.width < 1) throw Error("bad component");
    if (!arities.insert(c.arity).second) throw Error("duplicate component arity");
    if (i > 0 && components[i - 1].arity <= c.arity)
      throw Error("components must be sorted by decreasing arity");
  }
  auto check_vec = [&](const InstVector& v) {
    for (const auto& [k, val] : v.entries()) {
      if (k.comp < 0 || k.comp >= static_cast<int>(components.size()))
        throw Error("entry component out of range");
      const Component& c = components[k.comp];
      if (static_cast<int>(k.tuple.size()) != c.arity) throw Error("entry arity mismatch");
      if (!tuple_distinct(k.tuple)) throw Error("entry tuple repeats an atom");
      for (Atom a : k.tuple)
        if (a.id < 1) throw Error("bad atom in entry");
      if (k.coord < 0 || k.coord >= c.width) throw Error("entry coordinate out of range");
      if (val.is_zero()) throw Error("stored zero entry");
    }
  };
  check_vec(target);
  for (const InstVector& r : reps) check_vec(r);
}

InstVector restrict_main(const InstVector& v, const AtomSet& a) {
  InstVector out;
  for (const auto& [k, val] : v.entries()) {
    if (k.comp != 0) continue;
    bool inside = true;
    for (Atom x : k.tuple)
      if (!a.count(x)) {
        inside = false;
        break;
      }
    if (inside) out.set(k, val);
  }
  return out;
}

InstVector alternating_sigma_sum(const Ring& ring, const InstVector& v,
                                 const std::map<Atom, Atom>& sigma) {
  std::vector<std::pair<Atom, Atom>> moves(sigma.begin(), sigma.end());
  const int n = static_cast<int>(moves.size());
  InstVector out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    int bits = __builtin_popcount(mask);
    RingElem sign = ring.from_int(bits % 2 == 0 ? 1 : -1);
    for (const auto& [k, val] : v.entries()) {
      Tuple t = k.tuple;
      for (Atom& a : t)
        for (int i = 0; i < n; ++i)
          if ((mask & (1u << i)) && a == moves[i].first) a = moves[i].second;
      if (!tuple_distinct(t)) throw Error("alternating sum: image atom collides inside a tuple");
      out.accumulate(ring, InstKey{k.comp, std::move(t), k.coord}, ring.mul(sign, val));
    }
  }
  return out;
}

InstVector cog(const Ring& ring, const InstVector& w, const std::map<Atom, Atom>& sigma) {
  AtomSet a;
  AtomSet s;
  for (const auto& [x, y] : sigma) {
    a.insert(x);
    s.insert(y);
  }
  if (s.size() != sigma.size()) throw Error("cog: sigma is not injective");
  for (Atom x : a)
    if (s.count(x)) throw Error("cog: source and image sets must be disjoint");
  for (const auto& [k, val] : w.entries()) {
    if (k.comp != 0) throw Error("cog: main-component vectors only");
    if (k.tuple.size() != sigma.size()) throw Error("cog: tuple arity differs from |A|");
    for (Atom x : k.tuple)
      if (!a.count(x)) throw Error("cog: domain exceeds the orderings of A");
  }
  return alternating_sigma_sum(ring, w, sigma);
}

namespace {

std::map<Atom, Atom> order_preserving_bijection(const AtomSet& a, const std::vector<Atom>& s,
                                                const std::vector<Atom>& ord) {
  std::map<Atom, std::size_t> rank;
  for (std::size_t i = 0; i < ord.size(); ++i) rank.emplace(ord[i], i);
  std::vector<Atom> av(a.begin(), a.end());
  for (Atom x : av)
    if (!rank.count(x)) throw Error("order does not cover a domain atom");
  std::sort(av.begin(), av.end(), [&](Atom l, Atom r) { return rank.at(l) < rank.at(r); });
  if (av.size() != s.size()) throw Error("subset size differs from |S|");
  std::map<Atom, Atom> sigma;
  for (std::size_t i = 0; i < av.size(); ++i) sigma.emplace(av[i], s[i]);
  return sigma;
}

std::set<AtomSet> domain_atom_sets(const InstVector& main) {
  std::set<AtomSet> out;
  for (const auto& [k, v] : main.entries()) out.insert(support_of(k.tuple));
  return out;
}

}  // namespace

InstVector delta(const Ring& ring, const InstVector& w, const std::vector<Atom>& s,
                 const std::vector<Atom>& ord) {
  AtomSet watoms = w.atoms();
  for (Atom x : s)
    if (watoms.count(x)) throw Error("delta: S must avoid the domain atoms");
  InstVector out;
  for (const AtomSet& a : domain_atom_sets(w)) {
    std::map<Atom, Atom> sigma = order_preserving_bijection(a, s, ord);
    out = add(ring, out, cog(ring, restrict_main(w, a), sigma));
  }
  return out;
}

namespace {

struct LocalColumns {
  std::vector<InstVector> cols;           // distinct nonzero restrictions
  std::vector<std::pair<int, FsPerm>> provenance;  // rep index and renaming
};

// All distinct main-component restrictions of renamed representatives: each
// rep's atoms go injectively into A or to generic outside atoms.
LocalColumns restriction_columns(const Instance& inst, const AtomSet& a, AtomSource& fresh) {
  LocalColumns out;
  std::map<InstVector, std::size_t> seen;
  std::vector<Atom> avec(a.begin(), a.end());
  for (std::size_t r = 0; r < inst.reps.size(); ++r) {
    AtomSet datoms = inst.reps[r].atoms();
    std::vector<Atom> d(datoms.begin(), datoms.end());
    std::vector<Atom> outside = fresh.take(static_cast<int>(d.size()));
    const int nd = static_cast<int>(d.size());
    for (std::uint32_t mask = 0; mask < (1u << nd); ++mask) {
      std::vector<Atom> chosen;
      for (int i = 0; i < nd; ++i)
        if (mask & (1u << i)) chosen.push_back(d[i]);
      if (chosen.size() > avec.size()) continue;
      std::vector<std::vector<Atom>> images;
      {
        // injective assignments of chosen into a
        std::vector<Atom> cur;
        std::vector<bool> used(avec.size(), false);
        std::function<void()> rec = [&] {
          if (cur.size() == chosen.size()) {
            images.push_back(cur);
            return;
          }
          for (std::size_t i = 0; i < avec.size(); ++i) {
            if (used[i]) continue;
            used[i] = true;
            cur.push_back(avec[i]);
            rec();
            cur.pop_back();
            used[i] = false;
          }
        };
        rec();
      }
      for (const std::vector<Atom>& img : images) {
        std::vector<Atom> full_img;
        std::size_t ci = 0, oi = 0;
        for (int i = 0; i < nd; ++i) {
          if (mask & (1u << i))
            full_img.push_back(img[ci++]);
          else
            full_img.push_back(outside[oi++]);
        }
        FsPerm perm = FsPerm::from_injection(d, full_img);
        InstVector col = restrict_main(apply(perm, inst.reps[r]), a);
        if (col.is_zero()) continue;
        if (seen.emplace(col, out.cols.size()).second) {
          out.cols.push_back(std::move(col));
          out.provenance.emplace_back(static_cast<int>(r), std::move(perm));
        }
      }
    }
  }
  return out;
}

std::optional<std::vector<LocalTerm>> local_solve_impl(const Instance& inst, const AtomSet& a,
                                                       AtomSource& fresh) {
  const int k = inst.max_arity();
  if (static_cast<int>(a.size()) != k) throw Error("restriction set size must equal the arity");
  const int width = inst.main_width();
  LocalColumns lc = restriction_columns(inst, a, fresh);
  std::vector<Atom> avec(a.begin(), a.end());
  std::vector<Tuple> tuples = nonrepeating_tuples(avec, k);
  Matrix m;
  Row rhs;
  for (const Tuple& t : tuples) {
    for (int j = 0; j < width; ++j) {
      InstKey key{0, t, j};
      Row row;
      row.reserve(lc.cols.size());
      for (const InstVector& col : lc.cols) row.push_back(col.at(key));
      m.push_back(std::move(row));
      rhs.push_back(inst.target.at(key));
    }
  }
  auto sol = solve_finite(inst.ring, m, rhs);
  if (!sol) return std::nullopt;
  std::vector<LocalTerm> terms;
  for (std::size_t i = 0; i < lc.cols.size(); ++i) {
    if ((*sol)[i].is_zero()) continue;
    terms.push_back(LocalTerm{lc.provenance[i].first, lc.provenance[i].second, (*sol)[i]});
  }
  return terms;
}

}  // namespace

std::optional<std::vector<LocalTerm>> local_restriction_solve(const Instance& inst,
                                                              const AtomSet& a) {
  AtomSet all = inst.atoms();
  all.insert(a.begin(), a.end());
  AtomSource fresh = AtomSource::beyond(all);
  return local_solve_impl(inst, a, fresh);
}

bool locally_solvable(const Instance& inst) {
  const int k = inst.max_arity();
  // Restriction sets are classified modulo renamings fixing the target: the
  // representatives' own atoms are not distinguished, since each orbit is
  // closed under renaming.
  AtomSet t = inst.target.atoms();
  std::vector<Atom> tvec(t.begin(), t.end());
  AtomSource fresh = AtomSource::beyond(inst.atoms());
  std::vector<Atom> generic = fresh.take(k);
  const int nt = static_cast<int>(tvec.size());
  // Subsets of the known atoms of size at most k, completed by generic atoms.
  std::vector<std::vector<int>> subsets{{}};
  for (int sz = 1; sz <= std::min(k, nt); ++sz) {
    std::vector<int> idx(sz);
    std::function<void(int, int)> rec = [&](int start, int depth) {
      if (depth == sz) {
        subsets.push_back(idx);
        return;
      }
      for (int i = start; i < nt; ++i) {
        idx[depth] = i;
        rec(i + 1, depth + 1);
      }
    };
    rec(0, 0);
  }
  for (const std::vector<int>& sel : subsets) {
    AtomSet a;
    for (int i : sel) a.insert(tvec[i]);
    for (std::size_t i = a.size(); i < static_cast<std::size_t>(k); ++i)
      a.insert(generic[i]);
    AtomSource scratch = AtomSource::beyond([&] {
      AtomSet u = inst.atoms();
      u.insert(a.begin(), a.end());
      u.insert(generic.begin(), generic.end());
      return u;
    }());
    if (!local_solve_impl(inst, a, scratch)) return false;
  }
  return true;
}

namespace {

// Injective partial maps from tuple positions into the strip set, identifying
// the refined component an entry belongs to after atom absorption.
using TauType = std::vector<std::pair<int, Atom>>;

TauType tau_of(const Tuple& t, const AtomSet& strip) {
  TauType tau;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (strip.count(t[i])) tau.emplace_back(static_cast<int>(i), t[i]);
  return tau;
}

Tuple residual_of(const Tuple& t, const AtomSet& strip) {
  Tuple out;
  for (Atom a : t)
    if (!strip.count(a)) out.push_back(a);
  return out;
}

struct StripTable {
  std::vector<Component> components;
  std::map<std::tuple<int, TauType, int>, std::pair<int, int>> slot;  // -> (comp, coord)
};

enum class TauFilter { Any, EmptyOnly, NonEmptyOnly };

StripTable build_strip_table(const std::vector<Component>& comps, const AtomSet& strip,
                             const std::vector<TauFilter>& filter) {
  std::vector<Atom> pool(strip.begin(), strip.end());
  // Slots ordered by (old component, tau, coordinate) inside each new arity.
  std::map<int, std::vector<std::tuple<int, TauType, int>>, std::greater<int>> by_arity;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const int k = comps[i].arity;
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      std::vector<int> positions;
      for (int p = 0; p < k; ++p)
        if (mask & (1u << p)) positions.push_back(p);
      if (positions.size() > pool.size()) continue;
      if (filter[i] == TauFilter::EmptyOnly && !positions.empty()) continue;
      if (filter[i] == TauFilter::NonEmptyOnly && positions.empty()) continue;
      std::vector<Atom> cur;
      std::vector<bool> used(pool.size(), false);
      std::function<void()> rec = [&] {
        if (cur.size() == positions.size()) {
          TauType tau;
          for (std::size_t j = 0; j < positions.size(); ++j) tau.emplace_back(positions[j], cur[j]);
          int r = k - static_cast<int>(positions.size());
          for (int coord = 0; coord < comps[i].width; ++coord)
            by_arity[r].emplace_back(static_cast<int>(i), tau, coord);
          return;
        }
        for (std::size_t j = 0; j < pool.size(); ++j) {
          if (used[j]) continue;
          used[j] = true;
          cur.push_back(pool[j]);
          rec();
          cur.pop_back();
          used[j] = false;
        }
      };
      rec();
    }
  }
  StripTable out;
  for (auto& [arity, slots] : by_arity) {
    std::sort(slots.begin(), slots.end());
    int comp_idx = static_cast<int>(out.components.size());
    out.components.push_back(Component{arity, static_cast<int>(slots.size())});
    for (std::size_t c = 0; c < slots.size(); ++c)
      out.slot.emplace(slots[c], std::make_pair(comp_idx, static_cast<int>(c)));
  }
  return out;
}

InstVector strip_vector(const StripTable& table, const AtomSet& strip, const InstVector& v) {
  InstVector out;
  for (const auto& [k, val] : v.entries()) {
    TauType tau = tau_of(k.tuple, strip);
    auto it = table.slot.find(std::make_tuple(k.comp, tau, k.coord));
    OFL_CHECK(it != table.slot.end(), "entry outside the strip table");
    out.set(InstKey{it->second.first, residual_of(k.tuple, strip), it->second.second}, val);
  }
  return out;
}

}  // namespace

ReduceStep reduce_dimension(const Instance& inst, AtomSource& fresh) {
  inst.validate();
  const int k = inst.max_arity();
  if (k == 0) throw Error("reduce_dimension: arity is already zero");
  const Ring& ring = inst.ring;
  {
    AtomSet all = inst.atoms();
    fresh.absorb(all);
  }
  std::vector<Atom> s = fresh.take(k);
  AtomSet sset(s.begin(), s.end());

  ReduceStep step;
  step.s = s;

  InstVector t_main = inst.target.component_part(0);
  {
    AtomSet ta = t_main.atoms();
    step.target_order.assign(ta.begin(), ta.end());
  }
  InstVector tbar =
      t_main.is_zero() ? inst.target : sub(ring, inst.target, delta(ring, t_main, s, step.target_order));

  std::vector<InstVector> reduced;
  std::set<InstVector> seen;
  for (std::size_t r = 0; r < inst.reps.size(); ++r) {
    InstVector main = inst.reps[r].component_part(0);
    if (main.is_zero()) {
      if (seen.insert(inst.reps[r]).second) {
        reduced.push_back(inst.reps[r]);
        step.rep_source.emplace_back(static_cast<int>(r), std::vector<Atom>{});
      }
      continue;
    }
    AtomSet da = main.atoms();
    std::vector<Atom> ord(da.begin(), da.end());
    std::sort(ord.begin(), ord.end());
    do {
      InstVector cand = sub(ring, inst.reps[r], delta(ring, main, s, ord));
      if (seen.insert(cand).second) {
        reduced.push_back(cand);
        step.rep_source.emplace_back(static_cast<int>(r), ord);
      }
    } while (std::next_permutation(ord.begin(), ord.end()));
  }

  std::vector<TauFilter> filter(inst.components.size(), TauFilter::EmptyOnly);
  if (!filter.empty()) filter[0] = TauFilter::NonEmptyOnly;
  StripTable table = build_strip_table(inst.components, sset, filter);
  step.next.components = table.components;
  step.next.ring = ring;
  step.next.target = strip_vector(table, sset, tbar);
  for (const InstVector& v : reduced) step.next.reps.push_back(strip_vector(table, sset, v));
  step.next.validate();
  return step;
}

namespace {

FsPerm restrict_perm(const FsPerm& p, const AtomSet& relevant) {
  std::vector<Atom> dom(relevant.begin(), relevant.end());
  std::vector<Atom> img;
  img.reserve(dom.size());
  for (Atom a : dom) img.push_back(p(a));
  return FsPerm::from_injection(dom, img);
}

std::vector<ComboTerm> merge_terms(const Ring& ring, const Instance& inst,
                                   const std::vector<ComboTerm>& terms) {
  std::map<std::pair<int, FsPerm>, RingElem> merged;
  for (const ComboTerm& t : terms) {
    FsPerm key = restrict_perm(t.perm, inst.reps[t.rep].atoms());
    auto [it, fresh] = merged.emplace(std::make_pair(t.rep, key), t.coef);
    if (!fresh) it->second = ring.add(it->second, t.coef);
  }
  std::vector<ComboTerm> out;
  for (const auto& [key, coef] : merged)
    if (!coef.is_zero()) out.push_back(ComboTerm{key.first, key.second, coef});
  return out;
}

InstVector combo_sum(const Ring& ring, const Instance& inst, const std::vector<ComboTerm>& terms) {
  InstVector sum;
  for (const ComboTerm& t : terms)
    sum = add(ring, sum, scale(ring, t.coef, apply(t.perm, inst.reps[t.rep])));
  return sum;
}

// Transposition product sending exactly the atoms of i to their sigma images.
FsPerm subset_swap(const std::map<Atom, Atom>& sigma, const std::vector<Atom>& i) {
  std::map<Atom, Atom> m;
  for (Atom a : i) {
    Atom b = sigma.at(a);
    m.emplace(a, b);
    m.emplace(b, a);
  }
  return FsPerm::from_map(std::move(m));
}

// Rewrites a combination over the reduced instance as one over its parent.
std::vector<ComboTerm> pull_back(const Instance& prev, const ReduceStep& step,
                                 const std::vector<ComboTerm>& combo, AtomSource& fresh) {
  const Ring& ring = prev.ring;
  AtomSet sset(step.s.begin(), step.s.end());
  std::vector<ComboTerm> out;

  auto expand_cog = [&](const RingElem& outer_coef, const FsPerm& outer_perm, int rep,
                        const FsPerm& inner_perm, const AtomSet& a,
                        const std::map<Atom, Atom>& sigma) {
    std::vector<Atom> avec(a.begin(), a.end());
    const int n = static_cast<int>(avec.size());
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<Atom> chosen;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) chosen.push_back(avec[i]);
      RingElem sign = ring.from_int(chosen.size() % 2 == 0 ? 1 : -1);
      FsPerm rho = subset_swap(sigma, chosen);
      out.push_back(ComboTerm{rep, compose(outer_perm, compose(rho, inner_perm)),
                              ring.mul(outer_coef, sign)});
    }
  };

  for (const ComboTerm& term : combo) {
    OFL_CHECK(term.perm.fixes(sset), "combination renaming must fix the eliminated atoms");
    const auto& [src, ord] = step.rep_source[term.rep];
    out.push_back(ComboTerm{src, term.perm, term.coef});
    InstVector main = prev.reps[src].component_part(0);
    RingElem neg = ring.neg(term.coef);
    for (const AtomSet& a : domain_atom_sets(main)) {
      std::map<Atom, Atom> sigma = order_preserving_bijection(a, step.s, ord);
      expand_cog(neg, term.perm, src, FsPerm::identity(), a, sigma);
    }
  }

  InstVector t_main = prev.target.component_part(0);
  for (const AtomSet& a : domain_atom_sets(t_main)) {
    auto local = local_solve_impl(prev, a, fresh);
    OFL_CHECK(local.has_value(), "restriction of a locally solvable instance must solve");
    std::map<Atom, Atom> sigma = order_preserving_bijection(a, step.s, step.target_order);
    for (const LocalTerm& lt : *local)
      expand_cog(lt.coef, FsPerm::identity(), lt.rep, lt.perm, a, sigma);
  }

  return merge_terms(ring, prev, out);
}

}  // namespace

FinSolveOutcome finsolve_instance(const Instance& inst) {
  AtomSource fresh = AtomSource::beyond(inst.atoms());
  return finsolve_instance(inst, fresh);
}

FinSolveOutcome finsolve_instance(const Instance& inst, AtomSource& fresh) {
  inst.validate();
  fresh.absorb(inst.atoms());
  const Ring& ring = inst.ring;
  std::vector<Instance> levels{inst};
  std::vector<ReduceStep> steps;
  FinSolveOutcome out;

  for (;;) {
    const Instance& cur = levels.back();
    StepTrace tr;
    tr.arity = cur.max_arity();
    tr.components = cur.components;
    tr.rep_count = cur.reps.size();
    tr.locally_solvable = locally_solvable(cur);
    if (!tr.locally_solvable) {
      out.trace.push_back(tr);
      out.solvable = false;
      return out;
    }
    if (cur.max_arity() == 0) {
      out.trace.push_back(tr);
      break;
    }
    ReduceStep step = reduce_dimension(cur, fresh);
    tr.s = step.s;
    tr.order_count = step.rep_source.size();
    out.trace.push_back(tr);
    levels.push_back(step.next);
    steps.push_back(std::move(step));
  }

  // Finite system at atom dimension zero.
  const Instance& last = levels.back();
  const int width = last.main_width();
  Matrix m;
  Row rhs;
  for (int j = 0; j < width; ++j) {
    InstKey key{0, {}, j};
    Row row;
    for (const InstVector& r : last.reps) row.push_back(r.at(key));
    m.push_back(std::move(row));
    rhs.push_back(last.target.at(key));
  }
  auto sol = solve_finite(ring, m, rhs);
  if (!sol) {
    out.solvable = false;
    return out;
  }
  out.solvable = true;

  std::vector<ComboTerm> combo;
  for (std::size_t r = 0; r < last.reps.size(); ++r)
    if (!(*sol)[r].is_zero()) combo.push_back(ComboTerm{static_cast<int>(r), FsPerm(), (*sol)[r]});

  for (std::size_t i = steps.size(); i-- > 0;) {
    combo = pull_back(levels[i], steps[i], combo, fresh);
    OFL_CHECK(combo_sum(ring, levels[i], combo) == levels[i].target,
              "pulled-back combination must reproduce the target");
  }
  out.combo = std::move(combo);
  return out;
}

InstanceBuild instance_from_columns(const Ring& ring, const OrbitSet& row_set,
                                    const std::vector<SymVector>& columns, const SymVector& t,
                                    const AtomSet& pinned) {
  if (t.domain() != row_set) throw Error("target domain differs from the row set");
  for (const SymVector& c : columns)
    if (c.domain() != row_set) throw Error("column domain differs from the row set");

  TightFamilySet fams = tight_families_of_set(row_set);
  std::map<std::string, std::size_t> fam_index;
  for (std::size_t i = 0; i < fams.info.size(); ++i)
    fam_index.emplace(fams.families.orbits()[i].id, i);

  // Group families by arity (descending) into pre-strip components.
  std::map<int, std::vector<std::size_t>, std::greater<int>> by_arity;
  for (std::size_t i = 0; i < fams.info.size(); ++i)
    by_arity[fams.info[i].decl.arity].push_back(i);
  std::vector<Component> pre;
  std::map<std::size_t, std::pair<int, int>> fam_slot;  // family -> (comp, coord)
  for (const auto& [arity, members] : by_arity) {
    int comp = static_cast<int>(pre.size());
    pre.push_back(Component{arity, static_cast<int>(members.size())});
    for (std::size_t c = 0; c < members.size(); ++c)
      fam_slot.emplace(members[c], std::make_pair(comp, static_cast<int>(c)));
  }

  // Basis coordinates, straightened onto ordered tuples.
  auto straighten = [&](const SymVector& v) {
    BasisCoords bc = decompose(ring, v);
    InstVector out;
    for (const auto& [e, val] : bc.coords.entries()) {
      std::size_t fi = fam_index.at(e.orbit_id);
      auto [comp, coord] = fam_slot.at(fi);
      for (const PosPerm& g : fams.info[fi].decl.group.elements()) {
        InstKey key{comp, act_tuple(e.tuple, g), coord};
        OFL_CHECK(out.at(key).is_zero(), "straightening must hit each tuple once");
        out.set(key, val);
      }
    }
    return out;
  };

  std::vector<TauFilter> filter(pre.size(), TauFilter::Any);
  StripTable table = build_strip_table(pre, pinned, filter);

  InstanceBuild build;
  build.inst.ring = ring;
  build.inst.components = table.components;
  build.inst.target = strip_vector(table, pinned, straighten(t));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    build.inst.reps.push_back(strip_vector(table, pinned, straighten(columns[i])));
    build.column_of_rep.push_back(static_cast<int>(i));
  }
  build.inst.validate();
  return build;
}

ToInstance to_instance(const Ring& ring, const SymMatrix& a, const SymVector& t) {
  if (t.domain() != a.rows()) throw Error("target domain differs from the matrix rows");
  const AtomSet pinned = a.support();
  AtomSet used = a.atoms();
  {
    AtomSet ta = t.atoms();
    used.insert(ta.begin(), ta.end());
  }
  AtomSource fresh = AtomSource::beyond(used);

  std::vector<SymVector> cols;
  std::vector<Element> elems;
  for (const OrbitDecl& decl : a.cols().orbits()) {
    for (const Pattern& p : enumerate_s_orbits(decl, pinned)) {
      Element c = ground_pattern(decl, p, fresh);
      cols.push_back(column_vector(a, c));
      elems.push_back(std::move(c));
    }
  }
  InstanceBuild build = instance_from_columns(ring, a.rows(), cols, t, pinned);
  return ToInstance{std::move(build.inst), std::move(elems)};
}

FinSolveResult finsolve(const Ring& ring, const SymMatrix& a, const SymVector& t) {
  ToInstance ti = to_instance(ring, a, t);
  AtomSet used = a.atoms();
  {
    AtomSet ta = t.atoms();
    used.insert(ta.begin(), ta.end());
    AtomSet ia = ti.inst.atoms();
    used.insert(ia.begin(), ia.end());
    for (const Element& e : ti.column_elements) used.insert(e.tuple.begin(), e.tuple.end());
  }
  AtomSource fresh = AtomSource::beyond(used);
  FinSolveOutcome outcome = finsolve_instance(ti.inst, fresh);

  FinSolveResult result;
  result.solvable = outcome.solvable;
  result.trace = std::move(outcome.trace);
  if (!outcome.solvable || !outcome.combo) return result;

  FinVector witness(a.cols());
  for (const ComboTerm& term : *outcome.combo) {
    OFL_CHECK(term.perm.fixes(a.support()), "witness renaming must fix the matrix support");
    const Element& base = ti.column_elements[term.rep];
    Element moved = apply(term.perm, a.cols().find(base.orbit_id), base);
    witness.accumulate(ring, moved, term.coef);
  }
  // A found combination must be an actual solution.
  SymVector x = sym_from_fin(witness);
  std::optional<SymVector> product = mat_vec(ring, a, x);
  OFL_CHECK(product.has_value(), "finitary witness product must be defined");
  OFL_CHECK(sym_equal(ring, *product, t), "finitary witness must reproduce the target");
  result.witness = std::move(witness);
  return result;
}

}  // namespace ofl
