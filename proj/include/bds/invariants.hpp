#ifndef BDS_INVARIANTS_HPP
#define BDS_INVARIANTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "bds/dynamics.hpp"

namespace bds {

class NotHereditary : public std::runtime_error {
public:
  BoolElem member;
  LabelId label;
  BoolElem image;
  NotHereditary(const std::string& what, BoolElem m, LabelId l, BoolElem img)
      : std::runtime_error(what), member(std::move(m)), label(l), image(std::move(img)) {}
};

class UnsupportedEnumeration : public std::runtime_error {
public:
  explicit UnsupportedEnumeration(const std::string& what) : std::runtime_error(what) {}
};

bool is_hereditary(const System& sys, const IdealDesc& ideal);
bool is_saturated(const System& sys, const IdealDesc& ideal);

struct HSReport {
  IdealDesc ideal;
  bool hereditary = false;
  bool saturated = false;
};
HSReport hs_report(const System& sys, const IdealDesc& ideal);

/// Hereditary closure H(seed): the smallest hereditary ideal containing seed.
/// Shares the iteration contract of hs_closure on the cofinite backend.
struct ClosureResult {
  IdealDesc ideal;        // the closure, or the partial ideal on bound exhaustion
  bool complete = true;   // false = ClosureBoundExceeded(partial)
  std::size_t bound_used = 0;
};
ClosureResult hereditary_closure(const System& sys, const BoolElem& seed);

/// Smallest hereditary and saturated ideal containing seed.
ClosureResult hs_closure(const System& sys, const BoolElem& seed);
/// Same closure, started from an ideal instead of a single element.
ClosureResult hs_close_ideal(const System& sys, const IdealDesc& start);

struct HSLattice {
  std::vector<IdealDesc> ideals;  // canonical order, trivial first
  bool possibly_incomplete = false;
};
/// Finite backend: every principal ideal tested (exhaustive).  Cofinite
/// backend: the sublattice generated by the closures of the exceptional-window
/// atoms and tail representatives; throws UnsupportedEnumeration when a
/// closure fails to stabilize within its bound.
HSLattice enumerate_hs_ideals(const System& sys);

struct CycleWitness {
  Word word;
  BoolElem base;                 // an atom
  std::vector<BoolElem> trace;   // visited elements, trace[0] = base
};

class SearchBoundExceeded : public std::runtime_error {
public:
  explicit SearchBoundExceeded(const std::string& what) : std::runtime_error(what) {}
};

std::optional<CycleWitness> find_cycle_no_exit(const System& sys);
bool condition_LB(const System& sys);

bool is_cofinal(const System& sys);

struct Condition2Result {
  enum class Status : std::uint8_t { Verified, Counterexample, Inconclusive };
  Status status = Status::Inconclusive;
  BoolElem witness_c;  // Verified: the regular C
  Word word;           // Counterexample: a forced continuation avoiding H(A)
  int depth_used = 0;
};
Condition2Result check_condition2(const System& sys, const BoolElem& a,
                                  const BoolElem& b, int depth);

struct SimplicityReport {
  bool simple = false;
  bool lb = false;          // condition (L_B)
  bool hs_trivial = false;  // only trivial hereditary+saturated ideals
  std::optional<CycleWitness> cycle;   // witness when lb fails
  std::optional<IdealDesc> ideal;      // witness when hs_trivial fails
};
SimplicityReport is_simple(const System& sys);

struct QuotientSystem {
  System system;
  QuotientMap map;
};
/// Quotient dynamical system by a hereditary ideal; throws NotHereditary with
/// a witness when the ideal is not hereditary.
QuotientSystem quotient_system(const System& sys, const IdealDesc& ideal);

}  // namespace bds

#endif
