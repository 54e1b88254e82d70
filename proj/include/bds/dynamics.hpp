#ifndef BDS_DYNAMICS_HPP
#define BDS_DYNAMICS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bds/boolean.hpp"

namespace bds {

class EmptyArgument : public std::runtime_error {
public:
  explicit EmptyArgument(const std::string& what) : std::runtime_error(what) {}
};

using LabelId = int;
using Word = std::vector<LabelId>;

/// One action theta_alpha: atom images on the finite backend, or sparse
/// exceptional images plus a uniform tail rule on the cofinite backend.
/// Invariant: images of distinct atoms are pairwise disjoint.
struct ActionSpec {
  enum class Tail : std::uint8_t { Shift, Kill };

  std::vector<BoolElem> atom_images;            // finite backend
  std::map<std::int64_t, BoolElem> exceptions;  // cofinite backend
  Tail tail = Tail::Kill;
  std::int64_t shift = 0;

  static ActionSpec finite(std::vector<BoolElem> images);
  static ActionSpec shift_tail(std::int64_t t,
                               std::map<std::int64_t, BoolElem> exc = {});
  static ActionSpec kill_tail(std::map<std::int64_t, BoolElem> exc = {});
};

struct System {
  Algebra algebra;
  std::vector<std::string> labels;  // sorted, distinct
  std::vector<ActionSpec> actions;  // parallel to labels
  std::vector<BoolElem> domains;    // D_alpha = join of atoms with nonempty image
  std::vector<BoolElem> ranges;     // R_alpha = theta_alpha(D_alpha)

  LabelId label_index(std::string_view name) const;
  std::size_t label_count() const { return labels.size(); }
};

/// Sorts labels (actions follow), computes D_alpha and R_alpha.
/// Throws std::invalid_argument on malformed shape (duplicate labels,
/// action/label count mismatch); semantic violations go to validate_system.
System make_system(Algebra algebra, std::vector<std::string> labels,
                   std::vector<ActionSpec> actions);

struct Violation {
  std::string rule;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate_system(const System& sys);

/// Image of the atom with index `i` on the cofinite backend.
BoolElem cof_atom_image(const ActionSpec& spec, std::int64_t i);

BoolElem apply_action(const System& sys, const ActionSpec& spec, const BoolElem& a);
BoolElem apply_label(const System& sys, LabelId l, const BoolElem& a);
/// theta_{alpha_n} o ... o theta_{alpha_1}: leftmost letter applied first.
BoolElem apply_word(const System& sys, const Word& w, const BoolElem& a);

/// Composite of two actions (first, then second), normalized to an ActionSpec.
ActionSpec compose_specs(const System& sys, const ActionSpec& first,
                         const ActionSpec& second);

/// Words alpha of length n with theta_alpha(A) nonempty.  Throws EmptyArgument
/// on A = empty.
std::vector<Word> delta(const System& sys, const BoolElem& a, int n = 1);
std::size_t lambda(const System& sys, const BoolElem& a);

bool is_regular(const System& sys, const BoolElem& a);

struct RegularReport {
  struct AtomInfo {
    std::string name;  // atom identifier, or index rendered as text
    BoolElem elem;
    std::size_t lambda = 0;
    bool regular = false;
  };
  std::vector<AtomInfo> atoms;  // all atoms (finite) / window atoms (cofinite)
  bool has_tail = false;        // cofinite backend only
  std::size_t tail_lambda = 0;
  bool tail_regular = false;
};

RegularReport regular_atoms(const System& sys);

bool is_locally_finite(const System& sys);

/// Hull radius of everything index-addressed in the system: exception keys,
/// shifts and the supports of exceptional images.  Elements beyond the hull
/// behave uniformly under every action.
std::int64_t window_radius(const System& sys);
/// Hull covering the system and the given extra elements.
std::int64_t window_radius(const System& sys, const std::vector<BoolElem>& extra);

/// Iteration cap: the BDS_BOUND environment variable when set to a positive
/// integer, otherwise `fallback`.
std::size_t configured_bound(std::size_t fallback);

// Word order helpers (prefix order of §-words).
bool word_is_prefix(const Word& a, const Word& b);  // a <= b
Word word_remainder(const Word& prefix, const Word& b);  // b \ prefix
std::string format_word(const System& sys, const Word& w);

}  // namespace bds

#endif
