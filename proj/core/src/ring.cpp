#include "orbitlin/ring.hpp"

#include <atomic>

namespace ofl {

namespace telemetry {
namespace {
std::atomic<std::uint64_t> g_finite_solves{0};
}
std::uint64_t finite_solve_count() { return g_finite_solves.load(); }
void reset_finite_solve_count() { g_finite_solves.store(0); }
}  // namespace telemetry

Ring Ring::integers_mod(const BigInt& m) {
  if (m < 1) throw Error("modulus must be positive");
  return Ring(RingKind::ZMod, m);
}

RingElem Ring::normalize(RingElem e) const {
  switch (kind_) {
    case RingKind::Q:
      return e;
    case RingKind::Z:
      if (boost::multiprecision::denominator(e.v) != 1) throw Error("non-integer value in Z");
      return e;
    case RingKind::ZMod: {
      if (boost::multiprecision::denominator(e.v) != 1) throw Error("non-integer value in Z/m");
      BigInt n = boost::multiprecision::numerator(e.v);
      BigInt r = n % modulus_;
      if (r < 0) r += modulus_;
      return RingElem{BigRat(r)};
    }
  }
  throw Error("bad ring kind");
}

RingElem Ring::from_string(const std::string& s) const {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return normalize(RingElem{BigRat(BigInt(s))});
    if (kind_ != RingKind::Q) throw Error("fraction literal outside Q: " + s);
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw Error("zero denominator: " + s);
    return RingElem{BigRat(num, den)};
  } catch (const std::exception& e) {
    throw Error(std::string("bad ring literal '") + s + "': " + e.what());
  }
}

std::string Ring::to_string(const RingElem& e) const {
  const BigInt num = boost::multiprecision::numerator(e.v);
  const BigInt den = boost::multiprecision::denominator(e.v);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string Ring::name() const {
  switch (kind_) {
    case RingKind::Q: return "Q";
    case RingKind::Z: return "Z";
    case RingKind::ZMod: return "Zmod " + modulus_.str();
  }
  return "?";
}

namespace {

using IntMat = std::vector<std::vector<BigInt>>;

IntMat int_identity(std::size_t n) {
  IntMat id(n, std::vector<BigInt>(n, 0));
  for (std::size_t i = 0; i < n; ++i) id[i][i] = 1;
  return id;
}

IntMat int_mul(const IntMat& a, const IntMat& b) {
  std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  IntMat c(n, std::vector<BigInt>(m, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

std::optional<Row> solve_rational(const Matrix& m, const Row& b) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows == 0 ? 0 : m[0].size();
  // Augmented elimination on exact rationals; pivot = first nonzero entry in
  // row-major order.
  std::vector<std::vector<BigRat>> a(rows, std::vector<BigRat>(cols + 1));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) a[i][j] = m[i][j].v;
    a[i][cols] = b[i].v;
  }
  std::vector<std::ptrdiff_t> pivot_of_col(cols, -1);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      BigRat f = a[i][c] / a[r][c];
      for (std::size_t j = c; j <= cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_of_col[c] = static_cast<std::ptrdiff_t>(r);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (a[i][cols] != 0) return std::nullopt;
  Row x(cols, RingElem{0});
  for (std::size_t c = 0; c < cols; ++c) {
    if (pivot_of_col[c] < 0) continue;  // free unknown, left at zero
    const auto pr = static_cast<std::size_t>(pivot_of_col[c]);
    x[c] = RingElem{a[pr][cols] / a[pr][c]};
  }
  return x;
}

std::optional<std::vector<BigInt>> solve_integer(const IntMat& m, const std::vector<BigInt>& b) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows == 0 ? 0 : m[0].size();
  if (rows == 0) return std::vector<BigInt>(cols, 0);
  SmithDecomposition snf = smith_normal_form(m);
  // u*m*v = d; solve d*z = u*b, then x = v*z.
  std::vector<BigInt> ub(rows, 0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < rows; ++j) ub[i] += snf.u[i][j] * b[j];
  std::vector<BigInt> z(cols, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    BigInt di = i < cols ? snf.d[i][i] : BigInt(0);
    if (di == 0) {
      if (ub[i] != 0) return std::nullopt;
    } else {
      if (ub[i] % di != 0) return std::nullopt;
      z[i] = ub[i] / di;
    }
  }
  std::vector<BigInt> x(cols, 0);
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (snf.v[i][j] != 0 && z[j] != 0) x[i] += snf.v[i][j] * z[j];
  return x;
}

}  // namespace

SmithDecomposition smith_normal_form(const std::vector<std::vector<BigInt>>& m_in) {
  const std::size_t rows = m_in.size();
  const std::size_t cols = rows == 0 ? 0 : m_in[0].size();
  IntMat d = m_in;
  IntMat u = int_identity(rows);
  IntMat v = int_identity(cols);

  auto swap_rows = [&](std::size_t a, std::size_t b) {
    std::swap(d[a], d[b]);
    std::swap(u[a], u[b]);
  };
  auto swap_cols = [&](std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < rows; ++i) std::swap(d[i][a], d[i][b]);
    for (std::size_t i = 0; i < cols; ++i) std::swap(v[i][a], v[i][b]);
  };
  auto add_row = [&](std::size_t dst, std::size_t src, const BigInt& f) {
    for (std::size_t j = 0; j < cols; ++j) d[dst][j] += f * d[src][j];
    for (std::size_t j = 0; j < rows; ++j) u[dst][j] += f * u[src][j];
  };
  auto add_col = [&](std::size_t dst, std::size_t src, const BigInt& f) {
    for (std::size_t i = 0; i < rows; ++i) d[i][dst] += f * d[i][src];
    for (std::size_t i = 0; i < cols; ++i) v[i][dst] += f * v[i][src];
  };
  auto negate_row = [&](std::size_t r) {
    for (std::size_t j = 0; j < cols; ++j) d[r][j] = -d[r][j];
    for (std::size_t j = 0; j < rows; ++j) u[r][j] = -u[r][j];
  };

  const std::size_t steps = std::min(rows, cols);
  for (std::size_t t = 0; t < steps; ++t) {
    for (;;) {
      // Minimal-|.|_ nonzero pivot in the trailing submatrix, row-major first.
      std::ptrdiff_t pi = -1, pj = -1;
      BigInt best = 0;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j) {
          if (d[i][j] == 0) continue;
          BigInt a = abs(d[i][j]);
          if (pi < 0 || a < best) {
            best = a;
            pi = static_cast<std::ptrdiff_t>(i);
            pj = static_cast<std::ptrdiff_t>(j);
          }
        }
      if (pi < 0) { pi = -2; break; }  // trailing submatrix is zero
      if (static_cast<std::size_t>(pi) != t) swap_rows(t, static_cast<std::size_t>(pi));
      if (static_cast<std::size_t>(pj) != t) swap_cols(t, static_cast<std::size_t>(pj));

      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (d[i][t] == 0) continue;
        BigInt q = d[i][t] / d[t][t];
        if (q != 0) add_row(i, t, -q);
        if (d[i][t] != 0) clean = false;
      }
      if (!clean) continue;
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (d[t][j] == 0) continue;
        BigInt q = d[t][j] / d[t][t];
        if (q != 0) add_col(j, t, -q);
        if (d[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // Pivot must divide the rest of the submatrix for the chain d_i | d_{i+1}.
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols && divides; ++j)
          if (d[i][j] % d[t][t] != 0) {
            add_row(t, i, 1);
            divides = false;
          }
      if (divides) break;
    }
    if (d[t][t] < 0) negate_row(t);
  }
  SmithDecomposition out;
  out.u = std::move(u);
  out.d = std::move(d);
  out.v = std::move(v);
  return out;
}

std::optional<Row> solve_finite(const Ring& ring, const Matrix& m, const Row& b) {
  const std::size_t rows = m.size();
  if (b.size() != rows) throw Error("solve_finite: dimension mismatch");
  const std::size_t cols = rows == 0 ? 0 : m[0].size();
  telemetry::g_finite_solves.fetch_add(1 + rows * cols);
  for (const Row& r : m)
    if (r.size() != cols) throw Error("solve_finite: ragged matrix");

  switch (ring.kind()) {
    case RingKind::Q:
      return solve_rational(m, b);
    case RingKind::Z: {
      IntMat mi(rows, std::vector<BigInt>(cols));
      std::vector<BigInt> bi(rows);
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) mi[i][j] = boost::multiprecision::numerator(m[i][j].v);
        bi[i] = boost::multiprecision::numerator(b[i].v);
      }
      auto x = solve_integer(mi, bi);
      if (!x) return std::nullopt;
      Row out(cols);
      for (std::size_t j = 0; j < cols; ++j) out[j] = RingElem{BigRat((*x)[j])};
      return out;
    }
    case RingKind::ZMod: {
      // Append m*I congruence columns and solve over Z.
      IntMat mi(rows, std::vector<BigInt>(cols + rows, 0));
      std::vector<BigInt> bi(rows);
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) mi[i][j] = boost::multiprecision::numerator(m[i][j].v);
        mi[i][cols + i] = ring.modulus();
        bi[i] = boost::multiprecision::numerator(b[i].v);
      }
      auto x = solve_integer(mi, bi);
      if (!x) return std::nullopt;
      Row out(cols);
      for (std::size_t j = 0; j < cols; ++j) out[j] = ring.normalize(RingElem{BigRat((*x)[j])});
      return out;
    }
  }
  throw Error("bad ring kind");
}

}  // namespace ofl
