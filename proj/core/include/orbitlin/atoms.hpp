#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ofl {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an internal consistency check fails; callers treat it as a bug,
// never as a normal result.
struct InternalError : std::runtime_error {
  explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

#define OFL_CHECK(cond, msg) \
  do {                       \
    if (!(cond)) throw ::ofl::InternalError(std::string("internal check failed: ") + (msg)); \
  } while (0)

/// An atom: a positive integer id. Equality is the only structure algorithms
/// may consult; numeric order is used solely for canonicalization.
struct Atom {
  std::int64_t id = 0;

  Atom() = default;
  explicit Atom(std::int64_t i) : id(i) {
    if (i < 1) throw Error("atom ids are positive");
  }
  auto operator<=>(const Atom&) const = default;
};

using Tuple = std::vector<Atom>;
using AtomSet = std::set<Atom>;

AtomSet support_of(const Tuple& t);
bool tuple_distinct(const Tuple& t);

/// A finite-support permutation of atoms: a finite injective map whose image
/// equals its key set, extended by identity everywhere else.
class FsPerm {
 public:
  FsPerm() = default;
  static FsPerm identity() { return FsPerm(); }
  static FsPerm from_map(std::map<Atom, Atom> moved);
  static FsPerm transposition(Atom a, Atom b);
  // Maps dom[i] -> img[i], img[i] -> dom[i]'s leftover partner; entries of
  // dom and img are paired so the result is a genuine permutation.
  static FsPerm from_injection(const std::vector<Atom>& dom, const std::vector<Atom>& img);

  Atom operator()(Atom a) const {
    auto it = moved_.find(a);
    return it == moved_.end() ? a : it->second;
  }
  Tuple operator()(const Tuple& t) const;
  AtomSet operator()(const AtomSet& s) const;

  FsPerm inverse() const;
  bool is_identity() const { return moved_.empty(); }
  const std::map<Atom, Atom>& moved() const { return moved_; }

  /// True when every atom of s is fixed.
  bool fixes(const AtomSet& s) const;

  auto operator<=>(const FsPerm&) const = default;

 private:
  std::map<Atom, Atom> moved_;
  void prune();
};

/// compose(p, q): first q, then p.
FsPerm compose(const FsPerm& p, const FsPerm& q);

/// A permutation of tuple positions {0..k-1}; img[i] is the image of i.
using PosPerm = std::vector<int>;

PosPerm pos_identity(int k);
bool is_pos_perm(const PosPerm& p, int k);
PosPerm pos_compose(const PosPerm& p, const PosPerm& q);  // p after q
PosPerm pos_inverse(const PosPerm& p);

/// Acts on the right: result[i] = t[sigma[i]].
template <typename T>
std::vector<T> act_tuple(const std::vector<T>& t, const PosPerm& sigma) {
  std::vector<T> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[sigma[i]];
  return out;
}

/// A subgroup of the symmetric group on {1..k}, with its elements
/// materialized. Element order is deterministic (sorted).
class PermGroup {
 public:
  static constexpr int kDefaultDegreeCap = 8;

  static PermGroup closure(int degree, const std::vector<PosPerm>& generators,
                           int degree_cap = kDefaultDegreeCap);
  static PermGroup trivial(int degree);
  static PermGroup symmetric(int degree, int degree_cap = kDefaultDegreeCap);

  int degree() const { return degree_; }
  const std::vector<PosPerm>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool contains(const PosPerm& p) const;

  auto operator<=>(const PermGroup&) const = default;

 private:
  int degree_ = 0;
  std::vector<PosPerm> elements_;
};

/// Deterministic source of fresh atoms; always starts above every atom
/// mentioned so far and is threaded explicitly through algorithms.
class AtomSource {
 public:
  explicit AtomSource(std::int64_t first = 1) : next_(first < 1 ? 1 : first) {}
  static AtomSource beyond(const AtomSet& used);
  void absorb(const AtomSet& used);

  Atom fresh() { return Atom(next_++); }
  std::vector<Atom> take(int n);

 private:
  std::int64_t next_;
};

std::string to_string(Atom a);
std::string to_string(const Tuple& t);

}  // namespace ofl
