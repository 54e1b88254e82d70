#include "bds/ktheory.hpp"

#include <algorithm>

namespace bds {

BigMatrix BigMatrix::identity(std::size_t n) {
  BigMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

BigMatrix big_mul(const BigMatrix& a, const BigMatrix& b) {
  if (a.cols != b.rows) throw std::logic_error("big_mul: shape mismatch");
  BigMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      if (a.at(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j)
        out.at(i, j) += a.at(i, k) * b.at(k, j);
    }
  return out;
}

mpz_class big_det(BigMatrix m) {
  if (m.rows != m.cols) throw std::logic_error("big_det: square required");
  const std::size_t n = m.rows;
  if (n == 0) return 1;
  // Bareiss fraction-free elimination; divisions are exact.
  mpz_class sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m.at(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m.at(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
        mpz_class q;
        mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
        m.at(i, j) = q;
      }
    prev = m.at(k, k);
  }
  return sign * m.at(n - 1, n - 1);
}

std::vector<mpz_class> SnfResult::diagonal() const {
  std::vector<mpz_class> out;
  for (std::size_t i = 0; i < std::min(d.rows, d.cols); ++i) out.push_back(d.at(i, i));
  return out;
}

std::size_t SnfResult::rank() const {
  std::size_t r = 0;
  for (const auto& x : diagonal())
    if (x != 0) ++r;
  return r;
}

namespace {

struct SnfWorker {
  BigMatrix d, u, v;

  void row_swap(std::size_t a, std::size_t b) {
    for (std::size_t j = 0; j < d.cols; ++j) std::swap(d.at(a, j), d.at(b, j));
    for (std::size_t j = 0; j < u.cols; ++j) std::swap(u.at(a, j), u.at(b, j));
  }
  void col_swap(std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < d.rows; ++i) std::swap(d.at(i, a), d.at(i, b));
    for (std::size_t i = 0; i < v.rows; ++i) std::swap(v.at(i, a), v.at(i, b));
  }
  void row_add(std::size_t dst, std::size_t src, const mpz_class& q) {
    for (std::size_t j = 0; j < d.cols; ++j) d.at(dst, j) += q * d.at(src, j);
    for (std::size_t j = 0; j < u.cols; ++j) u.at(dst, j) += q * u.at(src, j);
  }
  void col_add(std::size_t dst, std::size_t src, const mpz_class& q) {
    for (std::size_t i = 0; i < d.rows; ++i) d.at(i, dst) += q * d.at(i, src);
    for (std::size_t i = 0; i < v.rows; ++i) v.at(i, dst) += q * v.at(i, src);
  }
  void row_negate(std::size_t r) {
    for (std::size_t j = 0; j < d.cols; ++j) d.at(r, j) = -d.at(r, j);
    for (std::size_t j = 0; j < u.cols; ++j) u.at(r, j) = -u.at(r, j);
  }

  bool find_pivot(std::size_t t, std::size_t& pr, std::size_t& pc) const {
    bool found = false;
    mpz_class best;
    for (std::size_t i = t; i < d.rows; ++i)
      for (std::size_t j = t; j < d.cols; ++j) {
        if (d.at(i, j) == 0) continue;
        mpz_class a = abs(d.at(i, j));
        if (!found || a < best) {
          best = a;
          pr = i;
          pc = j;
          found = true;
        }
      }
    return found;
  }

  void run() {
    const std::size_t n = std::min(d.rows, d.cols);
    for (std::size_t t = 0; t < n; ++t) {
      std::size_t pr = t, pc = t;
      if (!find_pivot(t, pr, pc)) break;
      row_swap(t, pr);
      col_swap(t, pc);
      for (;;) {
        bool dirty = false;
        for (std::size_t i = t + 1; i < d.rows; ++i) {
          if (d.at(i, t) == 0) continue;
          mpz_class q;
          mpz_fdiv_q(q.get_mpz_t(), d.at(i, t).get_mpz_t(), d.at(t, t).get_mpz_t());
          row_add(i, t, -q);
          if (d.at(i, t) != 0) {
            // Remainder became the smaller pivot candidate.
            row_swap(t, i);
            dirty = true;
          }
        }
        for (std::size_t j = t + 1; j < d.cols; ++j) {
          if (d.at(t, j) == 0) continue;
          mpz_class q;
          mpz_fdiv_q(q.get_mpz_t(), d.at(t, j).get_mpz_t(), d.at(t, t).get_mpz_t());
          col_add(j, t, -q);
          if (d.at(t, j) != 0) {
            col_swap(t, j);
            dirty = true;
          }
        }
        if (!dirty) break;
      }
      if (d.at(t, t) < 0) row_negate(t);
      // Enforce divisibility of the remaining block by the pivot.
      for (;;) {
        bool fixed = true;
        for (std::size_t i = t + 1; i < d.rows && fixed; ++i)
          for (std::size_t j = t + 1; j < d.cols && fixed; ++j)
            if (d.at(i, j) % d.at(t, t) != 0) {
              row_add(t, i, 1);
              fixed = false;
            }
        if (fixed) break;
        for (;;) {
          bool dirty = false;
          for (std::size_t j = t + 1; j < d.cols; ++j) {
            if (d.at(t, j) == 0) continue;
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), d.at(t, j).get_mpz_t(), d.at(t, t).get_mpz_t());
            col_add(j, t, -q);
            if (d.at(t, j) != 0) {
              col_swap(t, j);
              dirty = true;
            }
          }
          for (std::size_t i = t + 1; i < d.rows; ++i) {
            if (d.at(i, t) == 0) continue;
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), d.at(i, t).get_mpz_t(), d.at(t, t).get_mpz_t());
            row_add(i, t, -q);
            if (d.at(i, t) != 0) {
              row_swap(t, i);
              dirty = true;
            }
          }
          if (!dirty) break;
        }
        if (d.at(t, t) < 0) row_negate(t);
      }
    }
  }
};

}  // namespace

SnfResult smith_normal_form(const IntMatrix& m) {
  SnfWorker w;
  w.d = BigMatrix(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) w.d.at(i, j) = static_cast<long>(m.at(i, j));
  w.u = BigMatrix::identity(m.rows);
  w.v = BigMatrix::identity(m.cols);
  w.run();

  SnfResult res{w.u, w.d, w.v};
  BigMatrix orig(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) orig.at(i, j) = static_cast<long>(m.at(i, j));
  if (!(big_mul(big_mul(res.u, orig), res.v) == res.d))
    throw std::logic_error("smith_normal_form: U*M*V != D");
  if (abs(big_det(res.u)) != 1 || abs(big_det(res.v)) != 1)
    throw std::logic_error("smith_normal_form: transform not unimodular");
  auto diag = res.diagonal();
  for (std::size_t i = 0; i + 1 < diag.size(); ++i)
    if (diag[i + 1] != 0 && (diag[i] == 0 || diag[i + 1] % diag[i] != 0))
      throw std::logic_error("smith_normal_form: divisibility chain broken");
  return res;
}

IntMatrix stable_matrix(const System& sys) {
  if (sys.algebra.kind() != Algebra::Kind::FiniteAtoms)
    throw UnsupportedBackend(
        "stable_matrix: cofinite systems must be quotiented to a finite system first");
  const Algebra& alg = sys.algebra;
  std::vector<std::size_t> regular;
  for (std::size_t i = 0; i < alg.atom_count(); ++i)
    if (is_regular(sys, alg.atom(i))) regular.push_back(i);

  IntMatrix m(alg.atom_count(), regular.size());
  m.row_names = alg.atom_names();
  for (std::size_t c = 0; c < regular.size(); ++c) {
    std::size_t a = regular[c];
    m.col_names.push_back(alg.atom_names()[a]);
    m.at(a, c) += 1;
    for (std::size_t l = 0; l < sys.labels.size(); ++l) {
      BoolElem img = sys.actions[l].atom_images[a];
      for (auto b : alg.atoms_under(img)) m.at(b, c) -= 1;
    }
  }
  return m;
}

KGroups k_groups_of_matrix(const IntMatrix& m, std::size_t atom_count) {
  SnfResult snf = smith_normal_form(m);
  KGroups k;
  std::size_t r = snf.rank();
  k.k0.rank = atom_count - r;
  for (const auto& d : snf.diagonal())
    if (d > 1) k.k0.torsion.push_back(static_cast<unsigned long long>(d.get_ui()));
  k.k1.rank = m.cols - r;
  return k;
}

KGroups k_groups(const System& sys) { return k_groups_of_matrix(stable_matrix(sys), sys.algebra.atom_count()); }

std::string format_kgroups(const KGroups& k) {
  auto part = [](const KGroups::Part& p) {
    std::string s;
    if (p.rank == 0 && p.torsion.empty()) return std::string("0");
    if (p.rank == 1) s = "Z";
    if (p.rank > 1) s = "Z^" + std::to_string(p.rank);
    for (auto d : p.torsion) {
      if (!s.empty()) s += " + ";
      s += "Z/" + std::to_string(d);
    }
    return s;
  };
  return "K0 = " + part(k.k0) + ", K1 = " + part(k.k1);
}

}  // namespace bds
