#include "orbitlin/atoms.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ofl {

AtomSet support_of(const Tuple& t) { return AtomSet(t.begin(), t.end()); }

bool tuple_distinct(const Tuple& t) {
  AtomSet seen;
  for (Atom a : t)
    if (!seen.insert(a).second) return false;
  return true;
}

void FsPerm::prune() {
  for (auto it = moved_.begin(); it != moved_.end();) {
    if (it->first == it->second)
      it = moved_.erase(it);
    else
      ++it;
  }
}

FsPerm FsPerm::from_map(std::map<Atom, Atom> moved) {
  FsPerm p;
  p.moved_ = std::move(moved);
  p.prune();
  AtomSet keys, vals;
  for (const auto& [k, v] : p.moved_) {
    keys.insert(k);
    if (!vals.insert(v).second) throw Error("permutation map is not injective");
  }
  if (keys != vals) throw Error("permutation image must equal its key set");
  return p;
}

FsPerm FsPerm::transposition(Atom a, Atom b) {
  if (a == b) return FsPerm();
  return from_map({{a, b}, {b, a}});
}

FsPerm FsPerm::from_injection(const std::vector<Atom>& dom, const std::vector<Atom>& img) {
  if (dom.size() != img.size()) throw Error("injection arity mismatch");
  std::map<Atom, Atom> m;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (!m.emplace(dom[i], img[i]).second) throw Error("injection domain repeats");
  }
  // Close into a permutation: unmatched image atoms are sent back onto the
  // unmatched domain atoms in sorted order.
  AtomSet doms(dom.begin(), dom.end()), imgs(img.begin(), img.end());
  if (imgs.size() != img.size()) throw Error("injection image repeats");
  std::vector<Atom> left, right;
  for (Atom a : imgs)
    if (!doms.count(a)) left.push_back(a);  // needs an outgoing edge
  for (Atom a : doms)
    if (!imgs.count(a)) right.push_back(a);  // needs an incoming edge
  for (std::size_t i = 0; i < left.size(); ++i) m.emplace(left[i], right[i]);
  return from_map(std::move(m));
}

Tuple FsPerm::operator()(const Tuple& t) const {
  Tuple out;
  out.reserve(t.size());
  for (Atom a : t) out.push_back((*this)(a));
  return out;
}

AtomSet FsPerm::operator()(const AtomSet& s) const {
  AtomSet out;
  for (Atom a : s) out.insert((*this)(a));
  return out;
}

FsPerm FsPerm::inverse() const {
  std::map<Atom, Atom> inv;
  for (const auto& [k, v] : moved_) inv.emplace(v, k);
  FsPerm p;
  p.moved_ = std::move(inv);
  return p;
}

bool FsPerm::fixes(const AtomSet& s) const {
  for (Atom a : s)
    if ((*this)(a) != a) return false;
  return true;
}

FsPerm compose(const FsPerm& p, const FsPerm& q) {
  std::map<Atom, Atom> m;
  AtomSet keys;
  for (const auto& [k, v] : q.moved()) keys.insert(k);
  for (const auto& [k, v] : p.moved()) keys.insert(k);
  for (Atom k : keys) {
    Atom v = p(q(k));
    if (v != k) m.emplace(k, v);
  }
  FsPerm r;
  r = FsPerm::from_map(std::move(m));
  return r;
}

PosPerm pos_identity(int k) {
  PosPerm p(k);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

bool is_pos_perm(const PosPerm& p, int k) {
  if (static_cast<int>(p.size()) != k) return false;
  std::vector<bool> seen(k, false);
  for (int v : p) {
    if (v < 0 || v >= k || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

PosPerm pos_compose(const PosPerm& p, const PosPerm& q) {
  PosPerm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = p[q[i]];
  return r;
}

PosPerm pos_inverse(const PosPerm& p) {
  PosPerm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<int>(i);
  return r;
}

PermGroup PermGroup::closure(int degree, const std::vector<PosPerm>& generators,
                             int degree_cap) {
  if (degree < 0) throw Error("negative group degree");
  if (degree > degree_cap) throw Error("group degree exceeds cap");
  for (const PosPerm& g : generators)
    if (!is_pos_perm(g, degree)) throw Error("generator is not a permutation of {1..k}");

  std::set<PosPerm> elems;
  elems.insert(pos_identity(degree));
  std::vector<PosPerm> frontier(elems.begin(), elems.end());
  while (!frontier.empty()) {
    std::vector<PosPerm> next;
    for (const PosPerm& e : frontier) {
      for (const PosPerm& g : generators) {
        PosPerm c = pos_compose(g, e);
        if (elems.insert(c).second) next.push_back(c);
      }
    }
    frontier = std::move(next);
  }
  PermGroup gr;
  gr.degree_ = degree;
  gr.elements_.assign(elems.begin(), elems.end());
  return gr;
}

PermGroup PermGroup::trivial(int degree) { return closure(degree, {}, std::max(degree, kDefaultDegreeCap)); }

PermGroup PermGroup::symmetric(int degree, int degree_cap) {
  std::vector<PosPerm> gens;
  if (degree >= 2) {
    PosPerm swap01 = pos_identity(degree);
    std::swap(swap01[0], swap01[1]);
    gens.push_back(swap01);
    PosPerm cycle(degree);
    for (int i = 0; i < degree; ++i) cycle[i] = (i + 1) % degree;
    gens.push_back(cycle);
  }
  return closure(degree, gens, degree_cap);
}

bool PermGroup::contains(const PosPerm& p) const {
  return std::binary_search(elements_.begin(), elements_.end(), p);
}

AtomSource AtomSource::beyond(const AtomSet& used) {
  std::int64_t next = 1;
  if (!used.empty()) next = used.rbegin()->id + 1;
  return AtomSource(next);
}

void AtomSource::absorb(const AtomSet& used) {
  if (!used.empty() && used.rbegin()->id + 1 > next_) next_ = used.rbegin()->id + 1;
}

std::vector<Atom> AtomSource::take(int n) {
  std::vector<Atom> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(fresh());
  return out;
}

std::string to_string(Atom a) { return std::to_string(a.id); }

std::string to_string(const Tuple& t) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) os << ',';
    os << t[i].id;
  }
  os << ')';
  return os.str();
}

}  // namespace ofl
