#include "orbitlin/orbits.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace ofl {

namespace {

void validate_entries(const std::vector<PatEntry>& entries) {
  AtomSet concretes;
  std::set<std::int32_t> vars;
  for (const PatEntry& e : entries) {
    if (e.is_var()) {
      if (!vars.insert(e.var).second) throw Error("repeated variable in pattern");
    } else {
      if (e.atom.id < 1) throw Error("bad concrete atom in pattern");
      if (!concretes.insert(e.atom).second) throw Error("repeated concrete atom in pattern");
    }
  }
}

std::vector<PatEntry> renumber(const std::vector<PatEntry>& entries) {
  std::map<std::int32_t, std::int32_t> seen;
  std::vector<PatEntry> out;
  out.reserve(entries.size());
  for (const PatEntry& e : entries) {
    if (!e.is_var()) {
      out.push_back(e);
      continue;
    }
    auto [it, fresh] = seen.emplace(e.var, static_cast<std::int32_t>(seen.size()));
    out.push_back(PatEntry::variable(it->second));
  }
  return out;
}

// Enumerates injective assignments of `slots` targets drawn from `atoms`.
void injective_assignments(const std::vector<Atom>& atoms, int slots,
                           const std::function<void(const std::vector<Atom>&)>& emit) {
  std::vector<Atom> cur;
  std::vector<bool> used(atoms.size(), false);
  std::function<void()> rec = [&] {
    if (static_cast<int>(cur.size()) == slots) {
      emit(cur);
      return;
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      cur.push_back(atoms[i]);
      rec();
      cur.pop_back();
      used[i] = false;
    }
  };
  rec();
}

}  // namespace

OrbitSet::OrbitSet(std::vector<OrbitDecl> orbits) : orbits_(std::move(orbits)) {
  std::set<std::string> ids;
  for (const OrbitDecl& d : orbits_) {
    if (d.arity != d.group.degree()) throw Error("orbit arity and group degree differ");
    if (!ids.insert(d.id).second) throw Error("duplicate orbit id: " + d.id);
  }
}

const OrbitDecl& OrbitSet::find(const std::string& id) const {
  for (const OrbitDecl& d : orbits_)
    if (d.id == id) return d;
  throw Error("unknown orbit: " + id);
}

bool OrbitSet::has(const std::string& id) const {
  for (const OrbitDecl& d : orbits_)
    if (d.id == id) return true;
  return false;
}

Element make_element(const OrbitDecl& decl, Tuple t) {
  if (static_cast<int>(t.size()) != decl.arity) throw Error("element arity mismatch");
  if (!tuple_distinct(t)) throw Error("element tuple repeats an atom");
  for (Atom a : t)
    if (a.id < 1) throw Error("bad atom in element");
  Tuple best = t;
  for (const PosPerm& g : decl.group.elements()) {
    Tuple cand = act_tuple(t, g);
    if (cand < best) best = cand;
  }
  return Element{decl.id, std::move(best)};
}

Element apply(const FsPerm& p, const OrbitDecl& decl, const Element& e) {
  return make_element(decl, p(e.tuple));
}

Pattern canonicalize(const OrbitDecl& decl, std::vector<PatEntry> entries) {
  if (static_cast<int>(entries.size()) != decl.arity) throw Error("pattern arity mismatch");
  validate_entries(entries);
  std::vector<PatEntry> best;
  bool first = true;
  for (const PosPerm& g : decl.group.elements()) {
    std::vector<PatEntry> cand = renumber(act_tuple(entries, g));
    if (first || cand < best) {
      best = std::move(cand);
      first = false;
    }
  }
  return Pattern{decl.id, std::move(best)};
}

Pattern apply(const FsPerm& p, const OrbitDecl& decl, const Pattern& pat) {
  std::vector<PatEntry> entries = pat.entries;
  for (PatEntry& e : entries)
    if (!e.is_var()) e.atom = p(e.atom);
  return canonicalize(decl, std::move(entries));
}

int pattern_dim(const Pattern& p) {
  int n = 0;
  for (const PatEntry& e : p.entries) n += e.is_var();
  return n;
}

AtomSet pattern_concretes(const Pattern& p) {
  AtomSet s;
  for (const PatEntry& e : p.entries)
    if (!e.is_var()) s.insert(e.atom);
  return s;
}

std::vector<std::int32_t> pattern_vars(const Pattern& p) {
  std::vector<std::int32_t> vs;
  for (const PatEntry& e : p.entries)
    if (e.is_var()) vs.push_back(e.var);
  std::sort(vs.begin(), vs.end());
  return vs;
}

bool is_ground(const Pattern& p) { return pattern_dim(p) == 0; }

Element pattern_as_element(const OrbitDecl& decl, const Pattern& p) {
  if (!is_ground(p)) throw Error("pattern is not ground");
  Tuple t;
  for (const PatEntry& e : p.entries) t.push_back(e.atom);
  return make_element(decl, std::move(t));
}

Pattern element_as_pattern(const Element& e) {
  std::vector<PatEntry> entries;
  for (Atom a : e.tuple) entries.push_back(PatEntry::concrete(a));
  return Pattern{e.orbit_id, std::move(entries)};  // ground: already canonical
}

Element ground_pattern(const OrbitDecl& decl, const Pattern& p, AtomSource& fresh) {
  std::map<std::int32_t, Atom> assign;
  for (const PatEntry& e : p.entries)
    if (e.is_var()) assign.emplace(e.var, Atom{});
  for (auto& [v, a] : assign) a = fresh.fresh();
  Tuple t;
  for (const PatEntry& e : p.entries) t.push_back(e.is_var() ? assign[e.var] : e.atom);
  return make_element(decl, std::move(t));
}

std::string to_string(const Pattern& p) {
  static const char* names[] = {"x", "y", "z"};
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.entries.size(); ++i) {
    if (i) os << ',';
    const PatEntry& e = p.entries[i];
    if (e.is_var()) {
      if (e.var < 3)
        os << names[e.var];
      else
        os << 'v' << e.var;
    } else {
      os << e.atom.id;
    }
  }
  os << ')';
  return os.str();
}

std::string to_string(const Element& e) { return e.orbit_id + to_string(e.tuple); }

std::vector<Pattern> enumerate_s_orbits(const OrbitDecl& decl, const AtomSet& s) {
  const int k = decl.arity;
  std::vector<Atom> pool(s.begin(), s.end());
  std::set<Pattern> out;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    std::vector<int> chosen;
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) chosen.push_back(i);
    if (chosen.size() > pool.size()) continue;
    injective_assignments(pool, static_cast<int>(chosen.size()), [&](const std::vector<Atom>& img) {
      std::vector<PatEntry> entries(k);
      int var = 0;
      std::size_t ci = 0;
      for (int i = 0; i < k; ++i) {
        if (ci < chosen.size() && chosen[ci] == i) {
          entries[i] = PatEntry::concrete(img[ci]);
          ++ci;
        } else {
          entries[i] = PatEntry::variable(var++);
        }
      }
      out.insert(canonicalize(decl, std::move(entries)));
    });
  }
  return std::vector<Pattern>(out.begin(), out.end());
}

std::optional<std::map<std::int32_t, Atom>> match(const OrbitDecl& decl, const Pattern& p,
                                                  const AtomSet& s, const Element& e) {
  if (p.orbit_id != e.orbit_id) throw Error("match: orbit mismatch");
  for (const PosPerm& g : decl.group.elements()) {
    Tuple target = act_tuple(e.tuple, g);
    std::map<std::int32_t, Atom> assign;
    bool ok = true;
    for (std::size_t i = 0; i < target.size() && ok; ++i) {
      const PatEntry& pe = p.entries[i];
      if (pe.is_var()) {
        if (s.count(target[i])) {
          ok = false;
          break;
        }
        auto [it, fresh] = assign.emplace(pe.var, target[i]);
        if (!fresh && it->second != target[i]) ok = false;
      } else if (pe.atom != target[i]) {
        ok = false;
      }
    }
    if (ok) return assign;
  }
  return std::nullopt;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct UnifyPass {
  bool ok = false;
  std::vector<PatEntry> entries;                       // vars = class ids
  std::vector<std::vector<std::int32_t>> left_vars;    // per class id
  std::vector<std::vector<std::int32_t>> right_vars;
};

// One positional unification of p against q_entries (q already permuted),
// honoring the support constraints of both sides.
UnifyPass unify_pass(const Pattern& p, const AtomSet& s_p, const std::vector<PatEntry>& q_entries,
                     const AtomSet& s_q) {
  UnifyPass out;
  const int k = static_cast<int>(p.entries.size());
  std::map<std::int32_t, int> lidx, ridx;
  for (const PatEntry& e : p.entries)
    if (e.is_var()) lidx.emplace(e.var, static_cast<int>(lidx.size()));
  for (const PatEntry& e : q_entries)
    if (e.is_var()) ridx.emplace(e.var, static_cast<int>(ridx.size()));
  const int nl = static_cast<int>(lidx.size());
  const int nr = static_cast<int>(ridx.size());
  UnionFind uf(nl + nr);
  std::map<int, Atom> class_atom;

  auto bind_atom = [&](int node, Atom a) -> bool {
    int r = uf.find(node);
    auto [it, fresh] = class_atom.emplace(r, a);
    return fresh || it->second == a;
  };

  for (int i = 0; i < k; ++i) {
    const PatEntry& pe = p.entries[i];
    const PatEntry& qe = q_entries[i];
    if (!pe.is_var() && !qe.is_var()) {
      if (pe.atom != qe.atom) return out;
    } else if (pe.is_var() && qe.is_var()) {
      int a = lidx[pe.var], b = nl + ridx[qe.var];
      int ra = uf.find(a), rb = uf.find(b);
      if (ra != rb) {
        std::optional<Atom> merged;
        if (auto ia = class_atom.find(ra); ia != class_atom.end()) merged = ia->second;
        if (auto ib = class_atom.find(rb); ib != class_atom.end()) {
          if (merged && *merged != ib->second) return out;
          merged = ib->second;
        }
        class_atom.erase(ra);
        class_atom.erase(rb);
        uf.unite(ra, rb);
        if (merged) class_atom.emplace(uf.find(ra), *merged);
      }
    } else if (pe.is_var()) {
      if (!bind_atom(lidx[pe.var], qe.atom)) return out;
    } else {
      if (!bind_atom(nl + ridx[qe.var], pe.atom)) return out;
    }
  }

  // Support constraints: a class bound to an atom may not contain a variable
  // whose side's support includes that atom.
  std::map<int, std::vector<std::int32_t>> lmembers, rmembers;
  for (const auto& [v, i] : lidx) lmembers[uf.find(i)].push_back(v);
  for (const auto& [v, i] : ridx) rmembers[uf.find(nl + i)].push_back(v);
  for (const auto& [root, a] : class_atom) {
    if (lmembers.count(root) && s_p.count(a)) return out;
    if (rmembers.count(root) && s_q.count(a)) return out;
  }

  std::map<int, int> class_id;  // root -> class number, by first occurrence
  out.entries.resize(k);
  for (int i = 0; i < k; ++i) {
    const PatEntry& pe = p.entries[i];
    const PatEntry& qe = q_entries[i];
    if (!pe.is_var()) {
      out.entries[i] = PatEntry::concrete(pe.atom);
      continue;
    }
    if (!qe.is_var()) {
      out.entries[i] = PatEntry::concrete(qe.atom);
      continue;
    }
    int root = uf.find(lidx[pe.var]);
    auto ca = class_atom.find(root);
    if (ca != class_atom.end()) {
      out.entries[i] = PatEntry::concrete(ca->second);
    } else {
      auto [it, fresh] = class_id.emplace(root, static_cast<int>(class_id.size()));
      out.entries[i] = PatEntry::variable(it->second);
    }
  }
  out.left_vars.resize(class_id.size());
  out.right_vars.resize(class_id.size());
  for (const auto& [root, cid] : class_id) {
    if (lmembers.count(root)) out.left_vars[cid] = lmembers[root];
    if (rmembers.count(root)) out.right_vars[cid] = rmembers[root];
  }
  out.ok = true;
  return out;
}

}  // namespace

std::vector<RawUnifier> raw_unifiers(const OrbitDecl& decl, const Pattern& p, const AtomSet& s_p,
                                     const Pattern& q, const AtomSet& s_q) {
  if (p.orbit_id != q.orbit_id) throw Error("unify: orbit mismatch");
  std::vector<RawUnifier> out;
  for (const PosPerm& g : decl.group.elements()) {
    UnifyPass pass = unify_pass(p, s_p, act_tuple(q.entries, g), s_q);
    if (!pass.ok) continue;
    out.push_back(RawUnifier{std::move(pass.entries), std::move(pass.left_vars),
                             std::move(pass.right_vars)});
  }
  return out;
}

std::vector<Pattern> unify(const OrbitDecl& decl, const Pattern& p, const AtomSet& s_p,
                           const Pattern& q, const AtomSet& s_q, const AtomSet& s_out) {
  if (p.orbit_id != q.orbit_id) throw Error("unify: orbit mismatch");
  AtomSet blocked = s_p;
  blocked.insert(s_q.begin(), s_q.end());
  std::vector<Atom> refinable;
  for (Atom a : s_out)
    if (!blocked.count(a)) refinable.push_back(a);

  std::set<Pattern> out;
  for (const PosPerm& g : decl.group.elements()) {
    UnifyPass pass = unify_pass(p, s_p, act_tuple(q.entries, g), s_q);
    if (!pass.ok) continue;
    std::vector<std::int32_t> vars;
    for (const PatEntry& e : pass.entries)
      if (e.is_var()) vars.push_back(e.var);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    const int nv = static_cast<int>(vars.size());
    for (std::uint32_t mask = 0; mask < (1u << nv); ++mask) {
      std::vector<std::int32_t> chosen;
      for (int i = 0; i < nv; ++i)
        if (mask & (1u << i)) chosen.push_back(vars[i]);
      if (chosen.size() > refinable.size()) continue;
      injective_assignments(refinable, static_cast<int>(chosen.size()),
                            [&](const std::vector<Atom>& img) {
                              std::vector<PatEntry> entries = pass.entries;
                              for (PatEntry& e : entries) {
                                if (!e.is_var()) continue;
                                auto it = std::find(chosen.begin(), chosen.end(), e.var);
                                if (it != chosen.end())
                                  e = PatEntry::concrete(img[it - chosen.begin()]);
                              }
                              out.insert(canonicalize(decl, std::move(entries)));
                            });
    }
  }
  return std::vector<Pattern>(out.begin(), out.end());
}

std::vector<Pattern> unify(const OrbitDecl& decl, const Pattern& p, const Pattern& q,
                           const AtomSet& s) {
  return unify(decl, p, pattern_concretes(p), q, pattern_concretes(q), s);
}

std::vector<Pattern> refine_pattern(const OrbitDecl& decl, const Pattern& p,
                                    const AtomSet& from, const AtomSet& to) {
  std::vector<Atom> added;
  for (Atom a : to)
    if (!from.count(a)) added.push_back(a);
  std::vector<std::int32_t> vars = pattern_vars(p);
  const int nv = static_cast<int>(vars.size());
  std::set<Pattern> out;
  for (std::uint32_t mask = 0; mask < (1u << nv); ++mask) {
    std::vector<std::int32_t> chosen;
    for (int i = 0; i < nv; ++i)
      if (mask & (1u << i)) chosen.push_back(vars[i]);
    if (chosen.size() > added.size()) continue;
    injective_assignments(added, static_cast<int>(chosen.size()),
                          [&](const std::vector<Atom>& img) {
                            std::vector<PatEntry> entries = p.entries;
                            for (PatEntry& e : entries) {
                              if (!e.is_var()) continue;
                              auto it = std::find(chosen.begin(), chosen.end(), e.var);
                              if (it != chosen.end())
                                e = PatEntry::concrete(img[it - chosen.begin()]);
                            }
                            out.insert(canonicalize(decl, std::move(entries)));
                          });
  }
  return std::vector<Pattern>(out.begin(), out.end());
}

ProductPattern canonicalize_product(const OrbitDecl& row_decl, const OrbitDecl& col_decl,
                                    std::vector<PatEntry> row, std::vector<PatEntry> col) {
  if (static_cast<int>(row.size()) != row_decl.arity ||
      static_cast<int>(col.size()) != col_decl.arity)
    throw Error("product pattern arity mismatch");
  validate_entries(row);
  validate_entries(col);
  bool first = true;
  std::vector<PatEntry> best_row, best_col;
  for (const PosPerm& gb : row_decl.group.elements()) {
    for (const PosPerm& gc : col_decl.group.elements()) {
      std::vector<PatEntry> r = act_tuple(row, gb);
      std::vector<PatEntry> c = act_tuple(col, gc);
      std::vector<PatEntry> joint = r;
      joint.insert(joint.end(), c.begin(), c.end());
      joint = renumber(joint);
      std::vector<PatEntry> nr(joint.begin(), joint.begin() + r.size());
      std::vector<PatEntry> nc(joint.begin() + r.size(), joint.end());
      if (first || std::tie(nr, nc) < std::tie(best_row, best_col)) {
        best_row = std::move(nr);
        best_col = std::move(nc);
        first = false;
      }
    }
  }
  return ProductPattern{row_decl.id, col_decl.id, std::move(best_row), std::move(best_col)};
}

ProductPattern apply(const FsPerm& p, const OrbitDecl& row_decl, const OrbitDecl& col_decl,
                     const ProductPattern& pp) {
  std::vector<PatEntry> row = pp.row, col = pp.col;
  for (PatEntry& e : row)
    if (!e.is_var()) e.atom = p(e.atom);
  for (PatEntry& e : col)
    if (!e.is_var()) e.atom = p(e.atom);
  return canonicalize_product(row_decl, col_decl, std::move(row), std::move(col));
}

AtomSet product_concretes(const ProductPattern& pp) {
  AtomSet s;
  for (const PatEntry& e : pp.row)
    if (!e.is_var()) s.insert(e.atom);
  for (const PatEntry& e : pp.col)
    if (!e.is_var()) s.insert(e.atom);
  return s;
}

std::string to_string(const ProductPattern& pp) {
  Pattern r{pp.row_orbit, pp.row}, c{pp.col_orbit, pp.col};
  return to_string(r) + "x" + to_string(c);
}

std::optional<std::map<std::int32_t, Atom>> match_product(const OrbitDecl& row_decl,
                                                          const OrbitDecl& col_decl,
                                                          const ProductPattern& pp,
                                                          const AtomSet& s, const Element& row_e,
                                                          const Element& col_e) {
  for (const PosPerm& gb : row_decl.group.elements()) {
    Tuple tb = act_tuple(row_e.tuple, gb);
    for (const PosPerm& gc : col_decl.group.elements()) {
      Tuple tc = act_tuple(col_e.tuple, gc);
      std::map<std::int32_t, Atom> assign;
      bool ok = true;
      auto walk = [&](const std::vector<PatEntry>& pat, const Tuple& t) {
        for (std::size_t i = 0; i < pat.size() && ok; ++i) {
          if (pat[i].is_var()) {
            if (s.count(t[i])) {
              ok = false;
              return;
            }
            auto [it, fresh] = assign.emplace(pat[i].var, t[i]);
            if (!fresh && it->second != t[i]) ok = false;
          } else if (pat[i].atom != t[i]) {
            ok = false;
          }
        }
      };
      walk(pp.row, tb);
      if (ok) walk(pp.col, tc);
      if (!ok) continue;
      AtomSet values;
      for (const auto& [v, a] : assign)
        if (!values.insert(a).second) ok = false;  // distinct variables, distinct atoms
      if (ok) return assign;
    }
  }
  return std::nullopt;
}

namespace {

// Variable permutations of `base` induced by the orbit group.
std::vector<std::map<std::int32_t, std::int32_t>> pattern_automorphisms(const OrbitDecl& decl,
                                                                        const Pattern& base) {
  std::vector<std::map<std::int32_t, std::int32_t>> out;
  std::set<std::map<std::int32_t, std::int32_t>> seen;
  for (const PosPerm& g : decl.group.elements()) {
    std::vector<PatEntry> permuted = act_tuple(base.entries, g);
    bool ok = true;
    std::map<std::int32_t, std::int32_t> pi;
    for (std::size_t i = 0; i < permuted.size() && ok; ++i) {
      const PatEntry& from = permuted[i];
      const PatEntry& to = base.entries[i];
      if (from.is_var() != to.is_var()) {
        ok = false;
      } else if (!from.is_var()) {
        if (from.atom != to.atom) ok = false;
      } else {
        auto [it, fresh] = pi.emplace(from.var, to.var);
        if (!fresh && it->second != to.var) ok = false;
      }
    }
    if (ok && seen.insert(pi).second) out.push_back(std::move(pi));
  }
  return out;
}

}  // namespace

TightFamilySet tight_families_within(const OrbitDecl& decl, const Pattern& base,
                                     const std::string& id_prefix) {
  auto auts = pattern_automorphisms(decl, base);
  std::vector<std::int32_t> vars = pattern_vars(base);
  const int nv = static_cast<int>(vars.size());

  auto image = [&](const std::vector<std::int32_t>& w,
                   const std::map<std::int32_t, std::int32_t>& pi) {
    std::vector<std::int32_t> img;
    img.reserve(w.size());
    for (std::int32_t v : w) img.push_back(pi.at(v));
    std::sort(img.begin(), img.end());
    return img;
  };

  std::set<std::vector<std::int32_t>> reps;
  std::vector<std::vector<std::int32_t>> ordered_reps;
  for (std::uint32_t mask = 0; mask < (1u << nv); ++mask) {
    std::vector<std::int32_t> w;
    for (int i = 0; i < nv; ++i)
      if (mask & (1u << i)) w.push_back(vars[i]);
    std::vector<std::int32_t> rep = w;
    for (const auto& pi : auts) rep = std::min(rep, image(w, pi));
    if (reps.insert(rep).second) ordered_reps.push_back(rep);
  }
  std::sort(ordered_reps.begin(), ordered_reps.end(),
            [](const auto& a, const auto& b) {
              return std::make_pair(a.size(), a) < std::make_pair(b.size(), b);
            });

  TightFamilySet out;
  std::vector<OrbitDecl> decls;
  int idx = 0;
  for (const auto& w : ordered_reps) {
    const int j = static_cast<int>(w.size());
    std::map<std::int32_t, int> slot;
    for (int i = 0; i < j; ++i) slot.emplace(w[i], i);
    std::vector<PosPerm> induced;
    for (const auto& pi : auts) {
      bool stabilizes = true;
      for (std::int32_t v : w)
        if (!slot.count(pi.at(v))) {
          stabilizes = false;
          break;
        }
      if (!stabilizes) continue;
      std::map<std::int32_t, std::int32_t> inv;
      for (const auto& [a, b] : pi) inv.emplace(b, a);
      PosPerm g(j);
      for (int i = 0; i < j; ++i) g[i] = slot.at(inv.at(w[i]));
      induced.push_back(std::move(g));
    }
    std::string fid = id_prefix + "#t" + std::to_string(idx++);
    OrbitDecl fdecl{fid, j, PermGroup::closure(j, induced, std::max(j, PermGroup::kDefaultDegreeCap))};
    decls.push_back(fdecl);
    out.info.push_back(TightFamily{decl.id, base, w, fdecl});
  }
  out.families = OrbitSet(std::move(decls));
  return out;
}

TightFamilySet tight_families(const OrbitDecl& decl) {
  std::vector<PatEntry> entries;
  for (int i = 0; i < decl.arity; ++i) entries.push_back(PatEntry::variable(i));
  return tight_families_within(decl, canonicalize(decl, std::move(entries)), decl.id);
}

TightFamilySet tight_families_of_set(const OrbitSet& set) {
  TightFamilySet out;
  std::vector<OrbitDecl> decls;
  for (const OrbitDecl& d : set.orbits()) {
    TightFamilySet one = tight_families(d);
    for (std::size_t i = 0; i < one.info.size(); ++i) {
      decls.push_back(one.families.orbits()[i]);
      out.info.push_back(one.info[i]);
    }
  }
  out.families = OrbitSet(std::move(decls));
  return out;
}

const TightFamily& TightFamilySet::family(const std::string& id) const {
  for (std::size_t i = 0; i < info.size(); ++i)
    if (families.orbits()[i].id == id) return info[i];
  throw Error("unknown tight family: " + id);
}

TightOrbit tight_orbit_of(const OrbitDecl& source_decl, const TightFamily& fam,
                          const Element& e) {
  if (e.orbit_id != fam.decl.id) throw Error("element is not in this family");
  std::map<std::int32_t, Atom> sub;
  for (std::size_t i = 0; i < fam.var_subset.size(); ++i) sub.emplace(fam.var_subset[i], e.tuple[i]);
  std::vector<PatEntry> entries = fam.base.entries;
  for (PatEntry& pe : entries)
    if (pe.is_var()) {
      auto it = sub.find(pe.var);
      if (it != sub.end()) pe = PatEntry::concrete(it->second);
    }
  return TightOrbit{canonicalize(source_decl, std::move(entries))};
}

std::pair<std::string, Element> locate_tight_orbit(const OrbitSet& source,
                                                   const TightFamilySet& fams,
                                                   const Pattern& tight_pattern) {
  std::optional<std::pair<std::string, Element>> found;
  for (std::size_t fi = 0; fi < fams.info.size(); ++fi) {
    const TightFamily& fam = fams.info[fi];
    if (fam.source_orbit != tight_pattern.orbit_id) continue;
    const OrbitDecl& sdecl = source.find(fam.source_orbit);
    std::map<std::int32_t, int> slot;
    for (std::size_t i = 0; i < fam.var_subset.size(); ++i)
      slot.emplace(fam.var_subset[i], static_cast<int>(i));
    for (const PosPerm& g : sdecl.group.elements()) {
      std::vector<PatEntry> qs = act_tuple(tight_pattern.entries, g);
      Tuple atoms(fam.var_subset.size());
      bool ok = true;
      for (std::size_t i = 0; i < qs.size() && ok; ++i) {
        const PatEntry& be = fam.base.entries[i];
        const PatEntry& qe = qs[i];
        if (!be.is_var()) {
          if (qe.is_var() || qe.atom != be.atom) ok = false;
        } else if (slot.count(be.var)) {
          if (qe.is_var())
            ok = false;
          else
            atoms[slot.at(be.var)] = qe.atom;
        } else {
          if (!qe.is_var()) ok = false;
        }
      }
      if (!ok) continue;
      Element e = make_element(fam.decl, atoms);
      std::pair<std::string, Element> hit{fam.decl.id, std::move(e)};
      if (found && *found != hit) throw InternalError("ambiguous tight orbit location");
      found = std::move(hit);
    }
  }
  if (!found) throw Error("pattern is not a tight orbit of this set: " + to_string(tight_pattern));
  return *found;
}

std::vector<Tuple> nonrepeating_tuples(const std::vector<Atom>& pool, int k) {
  std::vector<Tuple> out;
  Tuple cur;
  std::vector<bool> used(pool.size(), false);
  std::function<void()> rec = [&] {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      cur.push_back(pool[i]);
      rec();
      cur.pop_back();
      used[i] = false;
    }
  };
  rec();
  return out;
}

}  // namespace ofl
