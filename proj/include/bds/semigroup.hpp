#ifndef BDS_SEMIGROUP_HPP
#define BDS_SEMIGROUP_HPP

#include <optional>
#include <string>
#include <vector>

#include "bds/dynamics.hpp"

namespace bds {

class NotRegular : public std::runtime_error {
public:
  BoolElem witness;
  NotRegular(const std::string& what, BoolElem w)
      : std::runtime_error(what), witness(std::move(w)) {}
};

class NotInDomain : public std::runtime_error {
public:
  explicit NotInDomain(const std::string& what) : std::runtime_error(what) {}
};

class DepthExhausted : public std::runtime_error {
public:
  explicit DepthExhausted(const std::string& what) : std::runtime_error(what) {}
};

enum class Tri : std::uint8_t { False, True, Unknown };

/// Element s_alpha p_A s_beta* of the inverse semigroup, or zero.
///
/// Canonical form: A is intersected with R_alpha & R_beta (zero when empty),
/// and common trailing letters are rolled up whenever the relation
/// p_B = s_l p_{theta_l(B)} s_l* pins a unique preimage B.  Equality of
/// canonical forms decides equality in the semigroup.
struct SemiElem {
  bool zero = true;
  Word alpha;
  BoolElem a;
  Word beta;

  static SemiElem zero_elem() { return SemiElem{}; }
  bool is_zero() const { return zero; }
  bool idempotent() const { return zero || alpha == beta; }
  bool operator==(const SemiElem&) const = default;
  bool operator<(const SemiElem& o) const;
};

/// Normalized constructor; returns Zero when A falls outside R_alpha & R_beta.
SemiElem make_elem(const System& sys, Word alpha, BoolElem a, Word beta);
/// The generator s_alpha (= s_alpha p_{R_alpha} s_empty*).
SemiElem make_s(const System& sys, const Word& alpha);
/// The projection p_A.
SemiElem make_p(const System& sys, const BoolElem& a);

/// Unique B with theta_l(B) = c, B regular and Delta_B = {l}, when it exists.
std::optional<BoolElem> forced_preimage(const System& sys, LabelId l, const BoolElem& c);

SemiElem mul(const System& sys, const SemiElem& s, const SemiElem& t);
SemiElem star(const SemiElem& s);
/// Natural partial order: s = t(s*s) and s = (ss*)t.
bool leq(const System& sys, const SemiElem& s, const SemiElem& t);
bool orthogonal(const System& sys, const SemiElem& e, const SemiElem& f);
/// The idempotent-order characterization by cases (word-prefix case and the
/// forced-expansion case), used to cross-check leq.
bool leq_by_cases(const System& sys, const SemiElem& e, const SemiElem& f);

std::string format_elem(const System& sys, const SemiElem& s);

/// Depth-k complete expansion of a regular A: k rounds of replacing each word
/// by its one-letter continuations.  Throws NotRegular with the first singular
/// witness when an intermediate image is not regular.
std::vector<Word> complete_expansion(const System& sys, const BoolElem& a, int depth);

struct RefineOutcome {
  enum class Kind : std::uint8_t { Cover, NotACover, Inconclusive };
  Kind kind = Kind::Inconclusive;
  std::vector<SemiElem> cover;  // pairwise orthogonal refinement
  SemiElem witness;             // nonzero idempotent below x orthogonal to Z
  std::size_t bound_used = 0;
};

/// Decides whether Z covers the idempotent x by constructive refinement.
RefineOutcome refine_cover(const System& sys, const SemiElem& x,
                           const std::vector<SemiElem>& z,
                           std::size_t node_budget = 0);

/// A filter of idempotents presented as a path: word, terminal atom, and how
/// the chain extends past the word.
struct PathFilter {
  enum class Ext : std::uint8_t { Closed, Periodic, Truncated };
  Word word;
  std::uint32_t terminal = 0;  // atom at depth |word| (finite backend)
  Ext ext = Ext::Truncated;
  Word period;  // Periodic only

  bool operator==(const PathFilter&) const = default;
};

/// Validates the chain (each backward step has its unique source atom;
/// periodic loops must close) and canonicalizes the periodic form.
PathFilter make_path_filter(const System& sys, Word word, std::uint32_t terminal,
                            PathFilter::Ext ext, Word period = {});

/// The idempotent chain element at depth k (finite backend).
SemiElem filter_chain_elem(const System& sys, const PathFilter& f, std::size_t k);
/// Membership of an idempotent in the filter; Unknown only for Truncated.
Tri filter_contains(const System& sys, const PathFilter& f, const SemiElem& e);

/// beta_s: rewrites the filter's word by replacing the s*s prefix with the
/// alpha part of s.  Throws NotInDomain / DepthExhausted.
PathFilter beta_act(const System& sys, const SemiElem& s, const PathFilter& f);

struct Germ {
  SemiElem elem;
  PathFilter at;
};

/// Germ equality at a common filter; Unknown when a Truncated filter runs out
/// of depth before a separating idempotent is found.
Tri germ_eq(const System& sys, const Germ& g1, const Germ& g2);

/// Expression parser for the CLI surface: `s(ab) p{u,v} s(c)*` products,
/// `0`, whitespace-insensitive.  Errors carry a column.
class ExprError : public std::runtime_error {
public:
  std::size_t column;
  ExprError(const std::string& what, std::size_t col)
      : std::runtime_error(what), column(col) {}
};

SemiElem parse_semi_expr(const System& sys, const std::string& text);

}  // namespace bds

#endif
