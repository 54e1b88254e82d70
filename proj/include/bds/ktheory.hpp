#ifndef BDS_KTHEORY_HPP
#define BDS_KTHEORY_HPP

#include <gmpxx.h>

#include <string>
#include <vector>

#include "bds/dynamics.hpp"

namespace bds {

class UnsupportedBackend : public std::runtime_error {
public:
  explicit UnsupportedBackend(const std::string& what) : std::runtime_error(what) {}
};

/// Matrix of Id - [pi_r] on the atom basis: rows indexed by all atoms in
/// canonical order, columns by the regular atoms.
struct IntMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<long long> entries;  // row-major
  std::vector<std::string> row_names;
  std::vector<std::string> col_names;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, 0) {}
  long long& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
  long long at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
};

struct BigMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<mpz_class> entries;

  BigMatrix() = default;
  BigMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, 0) {}
  static BigMatrix identity(std::size_t n);
  mpz_class& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
  const mpz_class& at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }
  bool operator==(const BigMatrix&) const = default;
};

BigMatrix big_mul(const BigMatrix& a, const BigMatrix& b);
mpz_class big_det(BigMatrix m);  // exact, Bareiss elimination

/// U * M * V = D with D diagonal, nonnegative, divisibility chain d1 | d2 | ...
/// U, V unimodular.  The identity and |det| = 1 are recomputed and asserted on
/// every call.
struct SnfResult {
  BigMatrix u, d, v;
  std::vector<mpz_class> diagonal() const;
  std::size_t rank() const;
};

SnfResult smith_normal_form(const IntMatrix& m);

IntMatrix stable_matrix(const System& sys);

struct KGroups {
  struct Part {
    std::size_t rank = 0;
    std::vector<unsigned long long> torsion;  // invariant factors > 1, ascending
    bool operator==(const Part&) const = default;
  };
  Part k0, k1;
  bool operator==(const KGroups&) const = default;
};

KGroups k_groups(const System& sys);
/// K-groups of a stable matrix with `atom_count` row basis vectors.
KGroups k_groups_of_matrix(const IntMatrix& m, std::size_t atom_count);

std::string format_kgroups(const KGroups& k);

}  // namespace bds

#endif
