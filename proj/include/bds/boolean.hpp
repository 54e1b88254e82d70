#ifndef BDS_BOOLEAN_HPP
#define BDS_BOOLEAN_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bds {

/// Thrown when an element is used with an algebra it does not belong to.
class BackendMismatch : public std::runtime_error {
public:
  explicit BackendMismatch(const std::string& what) : std::runtime_error(what) {}
};

class NotAnIdeal : public std::runtime_error {
public:
  explicit NotAnIdeal(const std::string& what) : std::runtime_error(what) {}
};

class UnsupportedQuotient : public std::runtime_error {
public:
  explicit UnsupportedQuotient(const std::string& what) : std::runtime_error(what) {}
};

enum class Universe : std::uint8_t { Naturals, Integers };

/// An element of a Boolean algebra of sets, in canonical form.
///
/// Finite-atoms backend: a bitmask over the algebra's atom list.
/// Finite/cofinite backend: a finite set of indices, or the complement of one.
/// Equality is structural; canonical form makes it decide algebra equality.
class BoolElem {
public:
  enum class Repr : std::uint8_t { Atoms, Finite, Cofinite };

  BoolElem() = default;

  static BoolElem atoms(std::uint64_t mask);
  static BoolElem finite(std::vector<std::int64_t> indices);
  static BoolElem cofinite(std::vector<std::int64_t> exceptions);

  Repr repr() const { return repr_; }
  std::uint64_t mask() const { return mask_; }
  const std::vector<std::int64_t>& exceptions() const { return exc_; }

  bool operator==(const BoolElem&) const = default;
  /// Canonical total order (used for deterministic output only).
  bool operator<(const BoolElem& o) const;

private:
  Repr repr_ = Repr::Atoms;
  std::uint64_t mask_ = 0;
  std::vector<std::int64_t> exc_;
};

struct Ultrafilter {
  enum class Kind : std::uint8_t { Atom, Index, Infinity };
  Kind kind = Kind::Atom;
  std::uint32_t atom = 0;   // finite backend principal
  std::int64_t index = 0;   // cofinite backend principal

  static Ultrafilter at_atom(std::uint32_t a) { return {Kind::Atom, a, 0}; }
  static Ultrafilter at_index(std::int64_t i) { return {Kind::Index, 0, i}; }
  static Ultrafilter at_infinity() { return {Kind::Infinity, 0, 0}; }

  bool operator==(const Ultrafilter&) const = default;
};

/// A field of sets with decidable operations: either the powerset of a finite
/// ordered atom list, or the finite/cofinite algebra over a countable index
/// universe.  All elements are immutable values; every operation is pure.
class Algebra {
public:
  enum class Kind : std::uint8_t { FiniteAtoms, FiniteCofinite };

  static Algebra finite_atoms(std::vector<std::string> atom_names);
  static Algebra finite_cofinite(Universe u);

  Kind kind() const { return kind_; }
  Universe universe() const { return uni_; }
  std::size_t atom_count() const { return atoms_.size(); }
  const std::vector<std::string>& atom_names() const { return atoms_; }
  /// Index of a named atom, -1 when absent.
  int atom_index(std::string_view name) const;

  bool operator==(const Algebra&) const = default;

  BoolElem empty_elem() const;
  BoolElem top() const;
  BoolElem atom(std::size_t i) const;
  BoolElem of_mask(std::uint64_t mask) const;
  BoolElem of_atom_names(const std::vector<std::string>& names) const;
  BoolElem singleton(std::int64_t index) const;
  BoolElem finite_set(std::vector<std::int64_t> indices) const;
  BoolElem cofinite_set(std::vector<std::int64_t> exceptions) const;

  /// Throws BackendMismatch unless `e` is a value of this algebra.
  void check(const BoolElem& e) const;

  BoolElem meet(const BoolElem& a, const BoolElem& b) const;
  BoolElem join(const BoolElem& a, const BoolElem& b) const;
  BoolElem diff(const BoolElem& a, const BoolElem& b) const;
  BoolElem complement(const BoolElem& a) const;
  bool leq(const BoolElem& a, const BoolElem& b) const;

  bool is_empty(const BoolElem& a) const;
  bool is_top(const BoolElem& a) const;
  /// True when `a` denotes a finite set.
  bool is_finite_set(const BoolElem& a) const;

  /// Finite-atoms backend: indices of the atoms below `a`.
  std::vector<std::size_t> atoms_under(const BoolElem& a) const;

  /// All ultrafilters.  The cofinite backend's principal stream is cut at
  /// `principal_limit` entries; AtInfinity is always appended last.
  std::vector<Ultrafilter> ultrafilters(std::size_t principal_limit = 16) const;

  /// Restartable stream of principal ultrafilters in canonical enumeration
  /// order (atoms in name order; N: 0,1,2,...; Z: 0,-1,1,-2,2,...).
  class PrincipalStream {
  public:
    explicit PrincipalStream(const Algebra& a) : alg_(&a) {}
    /// False when the finite backend is exhausted; the cofinite stream never is.
    bool next(Ultrafilter& out);
    void reset() { pos_ = 0; }

  private:
    const Algebra* alg_;
    std::uint64_t pos_ = 0;
  };
  PrincipalStream principal_stream() const { return PrincipalStream(*this); }
  bool has_infinity_point() const { return kind_ == Kind::FiniteCofinite; }

  bool uf_contains(const Ultrafilter& xi, const BoolElem& a) const;

  std::string format(const BoolElem& a) const;
  std::string format(const Ultrafilter& xi) const;

private:
  Kind kind_ = Kind::FiniteAtoms;
  Universe uni_ = Universe::Naturals;
  std::vector<std::string> atoms_;
};

/// Description of an ideal.  On the finite backend every ideal is principal
/// (height Full).  On the cofinite backend the definable ideals are the
/// principal ones (Full) and the finite-subsets-of-a-support ones (FiniteOnly).
/// Canonical form: FiniteOnly with a finite support collapses to Full.
struct IdealDesc {
  enum class Height : std::uint8_t { Full, FiniteOnly };
  BoolElem support;
  Height height = Height::Full;

  bool operator==(const IdealDesc&) const = default;
  bool operator<(const IdealDesc& o) const;
};

IdealDesc make_principal_ideal(const Algebra& alg, const BoolElem& generator);
IdealDesc make_definable_ideal(const Algebra& alg, const BoolElem& support,
                               IdealDesc::Height height);

bool ideal_contains(const Algebra& alg, const IdealDesc& ideal, const BoolElem& a);
/// Subset relation between two ideals of the same algebra.
bool ideal_leq(const Algebra& alg, const IdealDesc& a, const IdealDesc& b);
bool ideal_is_trivial(const Algebra& alg, const IdealDesc& a);
bool ideal_is_everything(const Algebra& alg, const IdealDesc& a);
/// Spot check of the ideal laws (downward closure, join closure) on the
/// canonical witnesses of the description; throws NotAnIdeal on failure.
void validate_ideal(const Algebra& alg, const IdealDesc& ideal);

std::string format_ideal(const Algebra& alg, const IdealDesc& ideal);

/// The quotient of an algebra by a definable ideal, together with the class
/// map sending an element to the canonical representative of its class.
struct QuotientMap {
  enum class Mode : std::uint8_t {
    FiniteRestrict,      // finite backend / principal
    CofiniteDropFinite,  // cofinite / principal with finite generator
    CofiniteToAtoms,     // cofinite / principal with cofinite generator
    CofiniteCollapse,    // cofinite / finite-subsets-of-support ideal
  };

  Algebra source;
  Algebra target;
  IdealDesc ideal;
  Mode mode = Mode::FiniteRestrict;

  std::vector<int> atom_target;           // FiniteRestrict: source atom -> target atom or -1
  std::vector<std::int64_t> index_atoms;  // source indices that became target atoms
  std::vector<int> index_atom_target;     // parallel: target atom index
  int tail_atom = -1;                     // target atom of the cofinite tail class, or -1

  /// class_map: canonical representative of [a] in the target algebra.
  BoolElem map(const BoolElem& a) const;
};

QuotientMap make_quotient(const Algebra& alg, const IdealDesc& ideal);

}  // namespace bds

#endif
