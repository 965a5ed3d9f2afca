#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "orbitlin/atoms.hpp"

namespace ofl {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

enum class RingKind { Q, Z, ZMod };

/// A ring element: an exact value tagged by the ring it lives in. Rationals
/// are kept normalized by cpp_rational; residues are reduced into [0, m).
struct RingElem {
  BigRat v;

  bool is_zero() const { return v == 0; }
  bool operator==(const RingElem& o) const { return v == o.v; }
  std::strong_ordering operator<=>(const RingElem& o) const {
    if (v < o.v) return std::strong_ordering::less;
    if (o.v < v) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
};

using Row = std::vector<RingElem>;
using Matrix = std::vector<Row>;

/// An effective commutative ring: exact carrier operations plus a decision
/// procedure for finite linear systems. Backends: Q, Z, Z/m.
class Ring {
 public:
  static Ring rationals() { return Ring(RingKind::Q, 0); }
  static Ring integers() { return Ring(RingKind::Z, 0); }
  static Ring integers_mod(const BigInt& m);

  RingKind kind() const { return kind_; }
  const BigInt& modulus() const { return modulus_; }

  RingElem zero() const { return RingElem{0}; }
  RingElem one() const { return normalize(RingElem{1}); }
  RingElem from_int(std::int64_t n) const { return normalize(RingElem{n}); }
  /// Parses "p", "-p" or "p/q"; fractions are rejected outside Q.
  RingElem from_string(const std::string& s) const;

  RingElem add(const RingElem& a, const RingElem& b) const { return normalize(RingElem{a.v + b.v}); }
  RingElem sub(const RingElem& a, const RingElem& b) const { return normalize(RingElem{a.v - b.v}); }
  RingElem neg(const RingElem& a) const { return normalize(RingElem{-a.v}); }
  RingElem mul(const RingElem& a, const RingElem& b) const { return normalize(RingElem{a.v * b.v}); }
  bool eq(const RingElem& a, const RingElem& b) const { return a.v == b.v; }

  RingElem normalize(RingElem e) const;
  std::string to_string(const RingElem& e) const;
  std::string name() const;

  bool operator==(const Ring&) const = default;

 private:
  Ring(RingKind k, BigInt m) : kind_(k), modulus_(std::move(m)) {}
  RingKind kind_;
  BigInt modulus_;
};

struct SmithDecomposition {
  std::vector<std::vector<BigInt>> u, d, v;  // u*m*v = d, u and v unimodular
};

/// Smith normal form with a deterministic pivoting rule (absolute-value
/// minimal pivot, first in row-major order among ties).
SmithDecomposition smith_normal_form(const std::vector<std::vector<BigInt>>& m);

/// Decides M*x = b in the given ring; returns a witness when solvable.
/// Q: exact Gaussian elimination. Z: Smith normal form with the divisibility
/// criterion. Z/m: lift to Z with congruence columns.
std::optional<Row> solve_finite(const Ring& ring, const Matrix& m, const Row& b);

namespace telemetry {
/// Deterministic work counter: accumulated matrix cells across solve_finite
/// calls since the last reset.
std::uint64_t finite_solve_count();
void reset_finite_solve_count();
}  // namespace telemetry

}  // namespace ofl
