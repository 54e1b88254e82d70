#include "bds/semigroup.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace bds {

bool SemiElem::operator<(const SemiElem& o) const {
  if (zero != o.zero) return zero && !o.zero;
  if (alpha != o.alpha) return alpha < o.alpha;
  if (beta != o.beta) return beta < o.beta;
  return a < o.a;
}

namespace {

BoolElem word_range(const System& sys, const Word& w) {
  return apply_word(sys, w, sys.algebra.top());
}

std::size_t tail_shift_count(const System& sys) {
  std::size_t n = 0;
  for (const auto& spec : sys.actions)
    if (spec.tail == ActionSpec::Tail::Shift) ++n;
  return n;
}

std::int64_t max_shift(const System& sys) {
  std::int64_t m = 1;
  for (const auto& spec : sys.actions)
    m = std::max<std::int64_t>(m, spec.shift < 0 ? -spec.shift : spec.shift);
  return m;
}

/// First singular atom below a non-regular element (canonical order).
BoolElem singular_witness(const System& sys, const BoolElem& x) {
  const Algebra& alg = sys.algebra;
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    for (auto i : alg.atoms_under(x)) {
      BoolElem a = alg.atom(i);
      if (lambda(sys, a) == 0) return a;
    }
  } else {
    std::int64_t h = window_radius(sys, {x}) + max_shift(sys) + 1;
    std::int64_t lo = alg.universe() == Universe::Naturals ? 0 : -h;
    for (std::int64_t i = lo; i <= h; ++i) {
      if (!alg.uf_contains(Ultrafilter::at_index(i), x)) continue;
      BoolElem a = alg.singleton(i);
      if (lambda(sys, a) == 0) return a;
    }
    if (x.repr() == BoolElem::Repr::Cofinite && tail_shift_count(sys) == 0)
      return alg.singleton(h + 1);
  }
  throw std::logic_error("singular_witness: element is regular");
}

}  // namespace

std::optional<BoolElem> forced_preimage(const System& sys, LabelId l,
                                        const BoolElem& c) {
  const Algebra& alg = sys.algebra;
  if (alg.is_empty(c)) return std::nullopt;
  auto qualifies_finite = [&](std::size_t i) {
    const BoolElem& img = sys.actions[l].atom_images[i];
    if (alg.is_empty(img) || !alg.leq(img, c)) return false;
    for (std::size_t m = 0; m < sys.labels.size(); ++m)
      if (m != static_cast<std::size_t>(l) &&
          !alg.is_empty(sys.actions[m].atom_images[i]))
        return false;
    return true;
  };
  BoolElem cand = alg.empty_elem();
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    for (std::size_t i = 0; i < alg.atom_count(); ++i)
      if (qualifies_finite(i)) cand = alg.join(cand, alg.atom(i));
  } else {
    auto qualifies = [&](std::int64_t i) {
      BoolElem img = cof_atom_image(sys.actions[l], i);
      if (alg.is_empty(img) || !alg.leq(img, c)) return false;
      for (std::size_t m = 0; m < sys.labels.size(); ++m)
        if (m != static_cast<std::size_t>(l) &&
            !alg.is_empty(cof_atom_image(sys.actions[m], i)))
          return false;
      return true;
    };
    std::int64_t h = window_radius(sys, {c}) + max_shift(sys) + 1;
    std::vector<std::int64_t> probe;
    std::int64_t lo = alg.universe() == Universe::Naturals ? 0 : -h;
    for (std::int64_t i = lo; i <= h; ++i) probe.push_back(i);
    const ActionSpec& spec = sys.actions[l];
    for (auto j : c.exceptions()) {
      std::int64_t i = j - spec.shift;
      if (alg.universe() == Universe::Naturals && i < 0) continue;
      probe.push_back(i);
    }
    std::sort(probe.begin(), probe.end());
    probe.erase(std::unique(probe.begin(), probe.end()), probe.end());
    for (auto i : probe)
      if (qualifies(i)) cand = alg.join(cand, alg.singleton(i));
    // Far atoms qualify only when l is the unique Shift tail; then the
    // shifted-back tail of a cofinite c contributes a cofinite block.
    bool l_shift = spec.tail == ActionSpec::Tail::Shift;
    if (l_shift && tail_shift_count(sys) == 1 &&
        c.repr() == BoolElem::Repr::Cofinite) {
      std::vector<std::int64_t> holes;
      for (auto j : c.exceptions()) holes.push_back(j - spec.shift);
      for (std::int64_t i = lo; i <= h; ++i) holes.push_back(i);
      if (alg.universe() == Universe::Naturals)
        holes.erase(std::remove_if(holes.begin(), holes.end(),
                                   [](std::int64_t v) { return v < 0; }),
                    holes.end());
      cand = alg.join(cand, alg.cofinite_set(std::move(holes)));
    }
  }
  if (alg.is_empty(cand)) return std::nullopt;
  if (!(apply_label(sys, l, cand) == c)) return std::nullopt;
  return cand;
}

SemiElem make_elem(const System& sys, Word alpha, BoolElem a, Word beta) {
  const Algebra& alg = sys.algebra;
  alg.check(a);
  BoolElem cut = alg.meet(a, alg.meet(word_range(sys, alpha), word_range(sys, beta)));
  if (alg.is_empty(cut)) return SemiElem::zero_elem();
  // Roll up common trailing letters while the forced preimage pins a unique
  // shorter representative of the same element.
  while (!alpha.empty() && !beta.empty() && alpha.back() == beta.back()) {
    auto pre = forced_preimage(sys, alpha.back(), cut);
    if (!pre) break;
    alpha.pop_back();
    beta.pop_back();
    cut = *pre;
  }
  SemiElem e;
  e.zero = false;
  e.alpha = std::move(alpha);
  e.a = std::move(cut);
  e.beta = std::move(beta);
  return e;
}

SemiElem make_s(const System& sys, const Word& alpha) {
  return make_elem(sys, alpha, sys.algebra.top(), {});
}

SemiElem make_p(const System& sys, const BoolElem& a) {
  return make_elem(sys, {}, a, {});
}

SemiElem mul(const System& sys, const SemiElem& s, const SemiElem& t) {
  if (s.is_zero() || t.is_zero()) return SemiElem::zero_elem();
  const Algebra& alg = sys.algebra;
  if (word_is_prefix(s.beta, t.alpha)) {
    Word gp = word_remainder(s.beta, t.alpha);
    Word w = s.alpha;
    w.insert(w.end(), gp.begin(), gp.end());
    return make_elem(sys, std::move(w), alg.meet(apply_word(sys, gp, s.a), t.a),
                     t.beta);
  }
  if (word_is_prefix(t.alpha, s.beta)) {
    Word bp = word_remainder(t.alpha, s.beta);
    Word w = t.beta;
    w.insert(w.end(), bp.begin(), bp.end());
    return make_elem(sys, s.alpha, alg.meet(s.a, apply_word(sys, bp, t.a)),
                     std::move(w));
  }
  return SemiElem::zero_elem();
}

SemiElem star(const SemiElem& s) {
  if (s.is_zero()) return s;
  SemiElem out = s;
  std::swap(out.alpha, out.beta);
  return out;
}

bool leq(const System& sys, const SemiElem& s, const SemiElem& t) {
  SemiElem left = mul(sys, t, mul(sys, star(s), s));
  SemiElem right = mul(sys, mul(sys, s, star(s)), t);
  return left == s && right == s;
}

bool orthogonal(const System& sys, const SemiElem& e, const SemiElem& f) {
  return mul(sys, e, f).is_zero();
}

bool leq_by_cases(const System& sys, const SemiElem& e, const SemiElem& f) {
  if (e.is_zero()) return true;
  if (f.is_zero()) return false;
  if (!e.idempotent() || !f.idempotent())
    throw std::invalid_argument("leq_by_cases: idempotents required");
  const Algebra& alg = sys.algebra;
  if (word_is_prefix(f.alpha, e.alpha)) {
    Word rest = word_remainder(f.alpha, e.alpha);
    return alg.leq(e.a, apply_word(sys, rest, f.a));
  }
  if (e.alpha.empty() && !f.alpha.empty()) {
    // Forced-expansion case: the chain from A must follow f's word exactly.
    BoolElem x = e.a;
    for (LabelId l : f.alpha) {
      if (!is_regular(sys, x)) return false;
      std::size_t branches = 0;
      for (std::size_t m = 0; m < sys.labels.size(); ++m)
        if (!alg.is_empty(apply_label(sys, static_cast<LabelId>(m), x))) ++branches;
      if (branches != 1 || alg.is_empty(apply_label(sys, l, x))) return false;
      x = apply_label(sys, l, x);
    }
    return alg.leq(x, f.a);
  }
  return false;
}

std::string format_elem(const System& sys, const SemiElem& s) {
  if (s.is_zero()) return "0";
  std::string out;
  if (!s.alpha.empty()) out += "s(" + format_word(sys, s.alpha) + ") ";
  out += "p" + sys.algebra.format(s.a);
  if (!s.beta.empty()) out += " s(" + format_word(sys, s.beta) + ")*";
  return out;
}

std::vector<Word> complete_expansion(const System& sys, const BoolElem& a, int depth) {
  const Algebra& alg = sys.algebra;
  alg.check(a);
  if (alg.is_empty(a)) return {};
  std::vector<Word> words = {Word{}};
  for (int r = 0; r < depth; ++r) {
    std::vector<Word> next;
    for (const auto& w : words) {
      BoolElem x = apply_word(sys, w, a);
      if (!is_regular(sys, x))
        throw NotRegular("complete_expansion: intermediate image not regular",
                         singular_witness(sys, x));
      for (std::size_t l = 0; l < sys.labels.size(); ++l) {
        if (alg.is_empty(apply_label(sys, static_cast<LabelId>(l), x))) continue;
        Word w2 = w;
        w2.push_back(static_cast<LabelId>(l));
        next.push_back(std::move(w2));
      }
    }
    words = std::move(next);
  }
  return words;
}

namespace {

struct RefineCtx {
  const System& sys;
  std::vector<SemiElem> zbase;  // conjugated members, base form (gamma, C, gamma)
  long long budget;

  RefineOutcome solve(const Word& w, const BoolElem& s) {
    const Algebra& alg = sys.algebra;
    if (--budget < 0)
      return RefineOutcome{RefineOutcome::Kind::Inconclusive, {}, {}, 0};
    RefineOutcome out;
    out.kind = RefineOutcome::Kind::Cover;
    BoolElem rest = s;
    bool has_extension = false;
    for (const auto& z : zbase) {
      if (word_is_prefix(z.alpha, w)) {
        if (alg.is_empty(rest)) continue;
        Word mid = word_remainder(z.alpha, w);
        BoolElem part = alg.meet(rest, apply_word(sys, mid, z.a));
        if (!alg.is_empty(part)) {
          out.cover.push_back(make_elem(sys, w, part, w));
          rest = alg.diff(rest, part);
        }
      } else if (word_is_prefix(w, z.alpha)) {
        has_extension = true;
      }
    }
    if (alg.is_empty(rest)) return out;
    if (!has_extension) {
      return RefineOutcome{RefineOutcome::Kind::NotACover, {},
                           make_elem(sys, w, rest, w), 0};
    }
    if (!is_regular(sys, rest)) {
      return RefineOutcome{RefineOutcome::Kind::NotACover, {},
                           make_elem(sys, w, singular_witness(sys, rest), w), 0};
    }
    for (std::size_t l = 0; l < sys.labels.size(); ++l) {
      BoolElem img = apply_label(sys, static_cast<LabelId>(l), rest);
      if (alg.is_empty(img)) continue;
      Word w2 = w;
      w2.push_back(static_cast<LabelId>(l));
      RefineOutcome child = solve(w2, img);
      if (child.kind != RefineOutcome::Kind::Cover) return child;
      out.cover.insert(out.cover.end(), child.cover.begin(), child.cover.end());
    }
    return out;
  }
};

}  // namespace

RefineOutcome refine_cover(const System& sys, const SemiElem& x,
                           const std::vector<SemiElem>& z,
                           std::size_t node_budget) {
  const Algebra& alg = sys.algebra;
  if (!x.idempotent()) throw std::invalid_argument("refine_cover: x must be idempotent");
  if (node_budget == 0)
    node_budget = configured_bound(
        2000 + 200 * sys.labels.size() * std::max<std::size_t>(alg.atom_count(), 4));
  if (x.is_zero()) return RefineOutcome{RefineOutcome::Kind::Cover, {}, {}, 0};

  std::vector<SemiElem> zin;
  for (const auto& e : z) {
    if (!e.idempotent())
      throw std::invalid_argument("refine_cover: cover members must be idempotent");
    SemiElem cut = mul(sys, x, e);
    if (!cut.is_zero()) zin.push_back(cut);
  }
  if (zin.empty())
    return RefineOutcome{RefineOutcome::Kind::NotACover, {}, x, 0};

  // Conjugate to base form below a plain projection (covers transport along
  // s_mu both ways).
  SemiElem smu = make_s(sys, x.alpha);
  SemiElem xhat = mul(sys, mul(sys, star(smu), x), smu);
  RefineCtx ctx{sys, {}, static_cast<long long>(node_budget)};
  for (const auto& e : zin) {
    SemiElem ehat = mul(sys, mul(sys, star(smu), e), smu);
    if (!ehat.is_zero()) ctx.zbase.push_back(ehat);
  }
  std::sort(ctx.zbase.begin(), ctx.zbase.end());

  RefineOutcome res = ctx.solve(Word{}, xhat.a);
  res.bound_used = node_budget;
  auto back = [&](const SemiElem& e) { return mul(sys, mul(sys, smu, e), star(smu)); };
  if (res.kind == RefineOutcome::Kind::NotACover) {
    res.witness = back(res.witness);
    if (res.witness.is_zero() || !leq(sys, res.witness, x))
      throw std::logic_error("refine_cover: witness verification failed");
    for (const auto& e : z)
      if (!orthogonal(sys, res.witness, e))
        throw std::logic_error("refine_cover: witness not orthogonal to cover");
    return res;
  }
  if (res.kind == RefineOutcome::Kind::Cover) {
    for (auto& e : res.cover) e = back(e);
    std::sort(res.cover.begin(), res.cover.end());
    for (std::size_t i = 0; i < res.cover.size(); ++i) {
      bool below = false;
      for (const auto& e : z)
        if (leq(sys, res.cover[i], e)) {
          below = true;
          break;
        }
      if (!below || !leq(sys, res.cover[i], x))
        throw std::logic_error("refine_cover: refinement member misplaced");
      for (std::size_t j = i + 1; j < res.cover.size(); ++j)
        if (!orthogonal(sys, res.cover[i], res.cover[j]))
          throw std::logic_error("refine_cover: refinement not orthogonal");
    }
  }
  return res;
}

namespace {

/// Unique atom whose l-image contains atom b; finite backend.
std::uint32_t source_atom(const System& sys, LabelId l, std::uint32_t b) {
  const Algebra& alg = sys.algebra;
  for (std::size_t i = 0; i < alg.atom_count(); ++i) {
    const BoolElem& img = sys.actions[l].atom_images[i];
    if (img.mask() >> b & 1) return static_cast<std::uint32_t>(i);
  }
  throw std::invalid_argument("path filter: atom not in the label's range");
}

void require_finite_backend(const System& sys, const char* who) {
  if (sys.algebra.kind() != Algebra::Kind::FiniteAtoms)
    throw BackendMismatch(std::string(who) + ": finite backend only");
}

/// Atoms along the chain, positions 0..|word|, derived backward from the
/// terminal.
std::vector<std::uint32_t> chain_atoms(const System& sys, const Word& w,
                                       std::uint32_t terminal) {
  std::vector<std::uint32_t> atoms(w.size() + 1);
  atoms[w.size()] = terminal;
  for (std::size_t k = w.size(); k > 0; --k)
    atoms[k - 1] = source_atom(sys, w[k - 1], atoms[k]);
  return atoms;
}

std::uint32_t atom_at(const System& sys, const PathFilter& f, std::size_t pos) {
  if (pos <= f.word.size()) return chain_atoms(sys, f.word, f.terminal)[pos];
  if (f.ext != PathFilter::Ext::Periodic)
    throw std::logic_error("atom_at: position beyond a non-periodic filter");
  // Loop atoms, backward across one period from the anchor.
  std::vector<std::uint32_t> loop(f.period.size() + 1);
  loop[f.period.size()] = f.terminal;
  for (std::size_t k = f.period.size(); k > 0; --k)
    loop[k - 1] = source_atom(sys, f.period[k - 1], loop[k]);
  std::size_t off = (pos - f.word.size()) % f.period.size();
  return loop[off];
}

Word word_prefix_of(const PathFilter& f, std::size_t k) {
  Word w(f.word.begin(),
         f.word.begin() + static_cast<std::ptrdiff_t>(std::min(k, f.word.size())));
  while (w.size() < k) {
    if (f.ext != PathFilter::Ext::Periodic)
      throw std::logic_error("word_prefix_of: depth beyond a non-periodic filter");
    w.push_back(f.period[(w.size() - f.word.size()) % f.period.size()]);
  }
  return w;
}

std::size_t filter_depth_cap(const System& sys, const PathFilter& f,
                             std::size_t extra = 0) {
  if (f.ext == PathFilter::Ext::Periodic)
    return std::max(f.word.size(), extra) +
           f.period.size() * (sys.algebra.atom_count() + 2);
  return f.word.size();
}

}  // namespace

PathFilter make_path_filter(const System& sys, Word word, std::uint32_t terminal,
                            PathFilter::Ext ext, Word period) {
  require_finite_backend(sys, "make_path_filter");
  const Algebra& alg = sys.algebra;
  if (terminal >= alg.atom_count())
    throw std::invalid_argument("make_path_filter: bad terminal atom");
  chain_atoms(sys, word, terminal);  // validates the backward chain
  PathFilter f;
  f.word = std::move(word);
  f.terminal = terminal;
  f.ext = ext;
  if (ext == PathFilter::Ext::Periodic) {
    if (period.empty())
      throw std::invalid_argument("make_path_filter: empty period");
    // The backward chain around the loop must close up at the anchor.
    std::uint32_t t = terminal;
    std::vector<std::uint32_t> loop(period.size() + 1);
    loop[period.size()] = terminal;
    for (std::size_t k = period.size(); k > 0; --k) {
      t = source_atom(sys, period[k - 1], t);
      loop[k - 1] = t;
    }
    if (t != terminal)
      throw std::invalid_argument("make_path_filter: period does not close");
    // Primitive period: collapse a repeated block whose sub-loop also closes.
    for (std::size_t d = 1; d < period.size(); ++d) {
      if (period.size() % d != 0 || loop[d] != terminal) continue;
      bool repeats = true;
      for (std::size_t k = 0; k < period.size() && repeats; ++k)
        if (period[k] != period[k % d]) repeats = false;
      if (repeats) {
        period.resize(d);
        break;
      }
    }
    f.period = std::move(period);
    // Minimal prefix: trailing word letters matching the period's tail fold
    // into the loop.
    while (!f.word.empty() && f.word.back() == f.period.back()) {
      f.terminal = source_atom(sys, f.word.back(), f.terminal);
      f.word.pop_back();
      std::rotate(f.period.begin(), f.period.end() - 1, f.period.end());
    }
  } else if (ext == PathFilter::Ext::Closed) {
    if (lambda(sys, alg.atom(terminal)) != 0)
      throw std::invalid_argument(
          "make_path_filter: a closed path must end at a singular atom");
  }
  return f;
}

SemiElem filter_chain_elem(const System& sys, const PathFilter& f, std::size_t k) {
  require_finite_backend(sys, "filter_chain_elem");
  Word w = word_prefix_of(f, k);
  BoolElem a = sys.algebra.atom(atom_at(sys, f, k));
  return make_elem(sys, w, a, w);
}

Tri filter_contains(const System& sys, const PathFilter& f, const SemiElem& e) {
  require_finite_backend(sys, "filter_contains");
  if (e.is_zero()) return Tri::False;
  if (!e.idempotent())
    throw std::invalid_argument("filter_contains: idempotent expected");
  std::size_t cap = filter_depth_cap(sys, f, e.beta.size());
  for (std::size_t k = 0; k <= cap; ++k) {
    if (leq(sys, filter_chain_elem(sys, f, k), e)) return Tri::True;
    if (f.ext != PathFilter::Ext::Periodic && k == f.word.size()) break;
  }
  return f.ext == PathFilter::Ext::Truncated ? Tri::Unknown : Tri::False;
}

PathFilter beta_act(const System& sys, const SemiElem& s, const PathFilter& f) {
  require_finite_backend(sys, "beta_act");
  if (s.is_zero()) throw NotInDomain("beta_act: zero element");
  SemiElem dom = mul(sys, star(s), s);
  Tri in = filter_contains(sys, f, dom);
  if (in == Tri::False) throw NotInDomain("beta_act: source idempotent not in filter");
  if (in == Tri::Unknown)
    throw DepthExhausted("beta_act: truncated filter undecided");

  PathFilter eff = f;
  while (eff.word.size() < s.beta.size()) {
    if (eff.ext != PathFilter::Ext::Periodic)
      throw DepthExhausted("beta_act: filter shorter than the element's source word");
    eff.word.insert(eff.word.end(), eff.period.begin(), eff.period.end());
  }
  if (!word_is_prefix(s.beta, eff.word))
    throw NotInDomain("beta_act: filter does not pass through the source word");
  Word rest = word_remainder(s.beta, eff.word);
  Word nw = s.alpha;
  nw.insert(nw.end(), rest.begin(), rest.end());
  return make_path_filter(sys, std::move(nw), eff.terminal, eff.ext, eff.period);
}

Tri germ_eq(const System& sys, const Germ& g1, const Germ& g2) {
  require_finite_backend(sys, "germ_eq");
  if (!(g1.at == g2.at)) return Tri::False;
  const PathFilter& f = g1.at;
  std::size_t cap =
      filter_depth_cap(sys, f, std::max(g1.elem.beta.size(), g2.elem.beta.size()));
  for (std::size_t k = 0; k <= cap; ++k) {
    SemiElem e = filter_chain_elem(sys, f, k);
    if (mul(sys, g1.elem, e) == mul(sys, g2.elem, e)) return Tri::True;
    if (f.ext != PathFilter::Ext::Periodic && k == f.word.size()) break;
  }
  return f.ext == PathFilter::Ext::Truncated ? Tri::Unknown : Tri::False;
}

namespace {

struct ExprParser {
  const System& sys;
  const std::string& text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg, std::size_t at) {
    throw ExprError(msg, at + 1);
  }
  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_' || text[pos] == '-' || text[pos] == '[' ||
            text[pos] == ']'))
      ++pos;
    if (pos == start) fail("identifier expected", pos);
    return text.substr(start, pos - start);
  }

  Word parse_word_body(std::size_t open_at) {
    Word w;
    skip_ws();
    if (peek() == ')') return w;
    std::vector<std::string> parts;
    for (;;) {
      parts.push_back(ident());
      skip_ws();
      if (peek() == ',') {
        ++pos;
        continue;
      }
      if (peek() == ')') break;
      if (peek() == '\0') fail("unterminated word", open_at);
      // Space-separated continuation.
    }
    for (const auto& part : parts) {
      LabelId l = sys.label_index(part);
      if (l >= 0) {
        w.push_back(l);
        continue;
      }
      // Single-character decomposition for compact words like "ab".
      for (char c : part) {
        LabelId cl = sys.label_index(std::string(1, c));
        if (cl < 0) fail("unknown label '" + part + "'", open_at);
        w.push_back(cl);
      }
    }
    return w;
  }

  SemiElem parse_term() {
    skip_ws();
    std::size_t start = pos;
    if (peek() == '0') {
      ++pos;
      return SemiElem::zero_elem();
    }
    SemiElem acc = make_p(sys, sys.algebra.top());
    bool any = false;
    for (;;) {
      skip_ws();
      if (pos >= text.size()) break;
      char c = text[pos];
      if (c == 's') {
        std::size_t at = pos;
        ++pos;
        if (!eat('(')) fail("'(' expected after s", pos);
        Word w = parse_word_body(at);
        if (!eat(')')) fail("')' expected", pos);
        bool dagger = pos < text.size() && text[pos] == '*';  // no space: adjoint
        if (dagger) ++pos;
        SemiElem sw = make_s(sys, w);
        acc = mul(sys, acc, dagger ? star(sw) : sw);
        any = true;
      } else if (c == 'p') {
        std::size_t at = pos;
        ++pos;
        bool cof = pos < text.size() && text[pos] == '~';
        if (cof) ++pos;
        if (!eat('{')) fail("'{' expected after p", pos);
        std::vector<std::string> names;
        skip_ws();
        while (peek() != '}') {
          if (peek() == '\0') fail("unterminated set", at);
          names.push_back(ident());
          skip_ws();
          if (peek() == ',') ++pos;
        }
        ++pos;  // consume '}'
        BoolElem a;
        if (sys.algebra.kind() == Algebra::Kind::FiniteAtoms) {
          if (cof) fail("cofinite sets need the cofinite backend", at);
          try {
            a = sys.algebra.of_atom_names(names);
          } catch (const BackendMismatch& e) {
            fail(e.what(), at);
          }
        } else {
          std::vector<std::int64_t> idx;
          for (const auto& n : names) {
            try {
              idx.push_back(std::stoll(n));
            } catch (...) {
              fail("integer index expected, got '" + n + "'", at);
            }
          }
          a = cof ? sys.algebra.cofinite_set(idx) : sys.algebra.finite_set(idx);
        }
        acc = mul(sys, acc, make_p(sys, a));
        any = true;
      } else {
        break;
      }
    }
    if (!any) fail("term expected", start);
    return acc;
  }

  SemiElem parse_expr() {
    SemiElem acc = parse_term();
    for (;;) {
      skip_ws();
      if (pos >= text.size()) break;
      if (text[pos] == '*') {
        ++pos;
        SemiElem rhs = parse_term();
        acc = mul(sys, acc, rhs);
        continue;
      }
      fail("unexpected character '" + std::string(1, text[pos]) + "'", pos);
    }
    return acc;
  }
};

}  // namespace

SemiElem parse_semi_expr(const System& sys, const std::string& text) {
  ExprParser p{sys, text};
  SemiElem e = p.parse_expr();
  return e;
}

}  // namespace bds
