#include "bds/dynamics.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace bds {

ActionSpec ActionSpec::finite(std::vector<BoolElem> images) {
  ActionSpec s;
  s.atom_images = std::move(images);
  return s;
}

ActionSpec ActionSpec::shift_tail(std::int64_t t, std::map<std::int64_t, BoolElem> exc) {
  ActionSpec s;
  s.tail = Tail::Shift;
  s.shift = t;
  s.exceptions = std::move(exc);
  return s;
}

ActionSpec ActionSpec::kill_tail(std::map<std::int64_t, BoolElem> exc) {
  ActionSpec s;
  s.tail = Tail::Kill;
  s.exceptions = std::move(exc);
  return s;
}

LabelId System::label_index(std::string_view name) const {
  auto it = std::lower_bound(labels.begin(), labels.end(), name);
  if (it == labels.end() || *it != name) return -1;
  return static_cast<LabelId>(it - labels.begin());
}

namespace {

BoolElem spec_domain(const System& sys, const ActionSpec& spec) {
  const Algebra& alg = sys.algebra;
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    BoolElem d = alg.empty_elem();
    for (std::size_t i = 0; i < spec.atom_images.size(); ++i)
      if (!alg.is_empty(spec.atom_images[i])) d = alg.join(d, alg.atom(i));
    return d;
  }
  if (spec.tail == ActionSpec::Tail::Shift) {
    std::vector<std::int64_t> dead;
    for (const auto& [i, img] : spec.exceptions)
      if (alg.is_empty(img)) dead.push_back(i);
    return alg.cofinite_set(std::move(dead));
  }
  std::vector<std::int64_t> alive;
  for (const auto& [i, img] : spec.exceptions)
    if (!alg.is_empty(img)) alive.push_back(i);
  return alg.finite_set(std::move(alive));
}

}  // namespace

System make_system(Algebra algebra, std::vector<std::string> labels,
                   std::vector<ActionSpec> actions) {
  if (labels.size() != actions.size())
    throw std::invalid_argument("make_system: one action per label required");
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  System sys;
  sys.algebra = std::move(algebra);
  for (auto i : order) {
    sys.labels.push_back(std::move(labels[i]));
    sys.actions.push_back(std::move(actions[i]));
  }
  if (std::adjacent_find(sys.labels.begin(), sys.labels.end()) != sys.labels.end())
    throw std::invalid_argument("make_system: duplicate label");
  if (sys.algebra.kind() == Algebra::Kind::FiniteAtoms)
    for (auto& a : sys.actions)
      if (a.atom_images.size() != sys.algebra.atom_count())
        throw std::invalid_argument("make_system: one image per atom required");
  for (const auto& a : sys.actions) {
    sys.domains.push_back(spec_domain(sys, a));
    sys.ranges.push_back(apply_action(sys, a, sys.algebra.top()));
  }
  return sys;
}

BoolElem cof_atom_image(const ActionSpec& spec, std::int64_t i) {
  auto it = spec.exceptions.find(i);
  if (it != spec.exceptions.end()) return it->second;
  if (spec.tail == ActionSpec::Tail::Shift) return BoolElem::finite({i + spec.shift});
  return BoolElem::finite({});
}

namespace {

/// Complement of the tail image set: shifted exception keys, clipped to the
/// universe (a Naturals tail never produces negative indices; the boundary is
/// covered by exceptional overrides, which validation enforces).
BoolElem tail_range(const Algebra& alg, const ActionSpec& spec) {
  if (spec.tail != ActionSpec::Tail::Shift) return alg.empty_elem();
  std::vector<std::int64_t> holes;
  for (const auto& [i, img] : spec.exceptions) {
    std::int64_t j = i + spec.shift;
    if (alg.universe() == Universe::Naturals && j < 0) continue;
    holes.push_back(j);
  }
  if (alg.universe() == Universe::Naturals && spec.shift > 0)
    for (std::int64_t j = 0; j < spec.shift; ++j) holes.push_back(j);
  return alg.cofinite_set(std::move(holes));
}

}  // namespace

BoolElem apply_action(const System& sys, const ActionSpec& spec, const BoolElem& a) {
  const Algebra& alg = sys.algebra;
  alg.check(a);
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    BoolElem out = alg.empty_elem();
    for (std::size_t i = 0; i < spec.atom_images.size(); ++i)
      if (a.mask() >> i & 1) out = alg.join(out, spec.atom_images[i]);
    return out;
  }
  if (a.repr() == BoolElem::Repr::Finite) {
    BoolElem out = alg.empty_elem();
    for (auto i : a.exceptions()) out = alg.join(out, cof_atom_image(spec, i));
    return out;
  }
  // theta(top \ F) = theta(top) \ theta(F), images of distinct atoms disjoint.
  BoolElem full = tail_range(alg, spec);
  for (const auto& [i, img] : spec.exceptions) full = alg.join(full, img);
  BoolElem dropped = alg.empty_elem();
  for (auto i : a.exceptions()) dropped = alg.join(dropped, cof_atom_image(spec, i));
  return alg.diff(full, dropped);
}

BoolElem apply_label(const System& sys, LabelId l, const BoolElem& a) {
  return apply_action(sys, sys.actions.at(l), a);
}

BoolElem apply_word(const System& sys, const Word& w, const BoolElem& a) {
  BoolElem cur = a;
  for (LabelId l : w) cur = apply_label(sys, l, cur);
  return cur;
}

ActionSpec compose_specs(const System& sys, const ActionSpec& first,
                         const ActionSpec& second) {
  const Algebra& alg = sys.algebra;
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    std::vector<BoolElem> images;
    images.reserve(first.atom_images.size());
    for (const auto& img : first.atom_images)
      images.push_back(apply_action(sys, second, img));
    return ActionSpec::finite(std::move(images));
  }
  ActionSpec out;
  const bool both_shift = first.tail == ActionSpec::Tail::Shift &&
                          second.tail == ActionSpec::Tail::Shift;
  out.tail = both_shift ? ActionSpec::Tail::Shift : ActionSpec::Tail::Kill;
  out.shift = both_shift ? first.shift + second.shift : 0;
  std::vector<std::int64_t> candidates;
  for (const auto& [i, img] : first.exceptions) candidates.push_back(i);
  if (first.tail == ActionSpec::Tail::Shift)
    for (const auto& [k, img] : second.exceptions) candidates.push_back(k - first.shift);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (auto i : candidates) {
    BoolElem img = apply_action(sys, second, cof_atom_image(first, i));
    BoolElem tail_img = out.tail == ActionSpec::Tail::Shift
                            ? BoolElem::finite({i + out.shift})
                            : BoolElem::finite({});
    if (!(img == tail_img)) out.exceptions.emplace(i, std::move(img));
  }
  return out;
}

std::int64_t window_radius(const System& sys) { return window_radius(sys, {}); }

std::int64_t window_radius(const System& sys, const std::vector<BoolElem>& extra) {
  std::int64_t r = 1;
  auto widen = [&](std::int64_t i) {
    r = std::max<std::int64_t>(r, (i < 0 ? -i : i) + 1);
  };
  for (const auto& spec : sys.actions) {
    widen(spec.shift);
    for (const auto& [i, img] : spec.exceptions) {
      widen(i);
      for (auto j : img.exceptions()) widen(j);
    }
  }
  for (const auto& e : extra)
    if (e.repr() != BoolElem::Repr::Atoms)
      for (auto j : e.exceptions()) widen(j);
  return r;
}

namespace {

std::size_t cof_atom_lambda(const System& sys, std::int64_t i) {
  std::size_t n = 0;
  for (const auto& spec : sys.actions)
    if (!sys.algebra.is_empty(cof_atom_image(spec, i))) ++n;
  return n;
}

std::size_t tail_lambda_count(const System& sys) {
  std::size_t n = 0;
  for (const auto& spec : sys.actions)
    if (spec.tail == ActionSpec::Tail::Shift) ++n;
  return n;
}

}  // namespace

std::vector<Word> delta(const System& sys, const BoolElem& a, int n) {
  if (sys.algebra.is_empty(a)) throw EmptyArgument("delta: empty argument");
  std::vector<Word> out;
  Word w;
  auto rec = [&](auto&& self, const BoolElem& cur) -> void {
    if (static_cast<int>(w.size()) == n) {
      if (!sys.algebra.is_empty(cur)) out.push_back(w);
      return;
    }
    for (LabelId l = 0; l < static_cast<LabelId>(sys.labels.size()); ++l) {
      BoolElem next = apply_label(sys, l, cur);
      if (sys.algebra.is_empty(next)) continue;  // extensions stay empty
      w.push_back(l);
      self(self, next);
      w.pop_back();
    }
  };
  rec(rec, a);
  return out;
}

std::size_t lambda(const System& sys, const BoolElem& a) {
  if (sys.algebra.is_empty(a)) throw EmptyArgument("lambda: empty argument");
  std::size_t n = 0;
  for (std::size_t l = 0; l < sys.labels.size(); ++l)
    if (!sys.algebra.is_empty(apply_label(sys, static_cast<LabelId>(l), a))) ++n;
  return n;
}

bool is_regular(const System& sys, const BoolElem& a) {
  const Algebra& alg = sys.algebra;
  alg.check(a);
  if (alg.is_empty(a)) return true;  // empty counts as regular by convention
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    for (auto i : alg.atoms_under(a)) {
      bool alive = false;
      for (const auto& spec : sys.actions)
        if (!alg.is_empty(spec.atom_images[i])) {
          alive = true;
          break;
        }
      if (!alive) return false;
    }
    return true;
  }
  if (a.repr() == BoolElem::Repr::Finite) {
    for (auto i : a.exceptions())
      if (cof_atom_lambda(sys, i) == 0) return false;
    return true;
  }
  if (tail_lambda_count(sys) == 0) return false;
  std::int64_t r = window_radius(sys, {a});
  for (std::int64_t i = -r; i <= r; ++i) {
    if (sys.algebra.universe() == Universe::Naturals && i < 0) continue;
    if (!alg.uf_contains(Ultrafilter::at_index(i), a)) continue;
    if (cof_atom_lambda(sys, i) == 0) return false;
  }
  return true;
}

RegularReport regular_atoms(const System& sys) {
  RegularReport rep;
  const Algebra& alg = sys.algebra;
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    for (std::size_t i = 0; i < alg.atom_count(); ++i) {
      BoolElem a = alg.atom(i);
      std::size_t lam = lambda(sys, a);
      rep.atoms.push_back({alg.atom_names()[i], a, lam, lam >= 1});
    }
    return rep;
  }
  std::int64_t r = window_radius(sys);
  for (std::int64_t i = -r; i <= r; ++i) {
    if (alg.universe() == Universe::Naturals && i < 0) continue;
    std::size_t lam = cof_atom_lambda(sys, i);
    rep.atoms.push_back({std::to_string(i), alg.singleton(i), lam, lam >= 1});
  }
  rep.has_tail = true;
  rep.tail_lambda = tail_lambda_count(sys);
  rep.tail_regular = rep.tail_lambda >= 1;
  return rep;
}

bool is_locally_finite(const System&) {
  // Finite label sets are the only supported case, and they force it.
  return true;
}

ValidationReport validate_system(const System& sys) {
  ValidationReport rep;
  const Algebra& alg = sys.algebra;
  auto violate = [&](std::string rule, std::string detail) {
    rep.violations.push_back({std::move(rule), std::move(detail)});
  };

  for (std::size_t l = 0; l < sys.labels.size(); ++l) {
    const ActionSpec& spec = sys.actions[l];
    const std::string& name = sys.labels[l];
    if (alg.kind() == Algebra::Kind::FiniteAtoms) {
      for (std::size_t i = 0; i < spec.atom_images.size(); ++i) {
        try {
          alg.check(spec.atom_images[i]);
        } catch (const BackendMismatch& e) {
          violate("image-backend", "label " + name + ", atom " + alg.atom_names()[i] +
                                       ": " + e.what());
          continue;
        }
        for (std::size_t j = i + 1; j < spec.atom_images.size(); ++j)
          if (!alg.is_empty(alg.meet(spec.atom_images[i], spec.atom_images[j])))
            violate("disjoint-atom-images",
                    "label " + name + ": images of " + alg.atom_names()[i] + " and " +
                        alg.atom_names()[j] + " intersect");
      }
    } else {
      std::vector<std::pair<std::int64_t, BoolElem>> exc(spec.exceptions.begin(),
                                                         spec.exceptions.end());
      BoolElem tails = tail_range(alg, spec);
      for (std::size_t i = 0; i < exc.size(); ++i) {
        if (alg.universe() == Universe::Naturals && exc[i].first < 0) {
          violate("exception-key", "label " + name + ": index " +
                                       std::to_string(exc[i].first) +
                                       " outside the naturals universe");
          continue;
        }
        try {
          alg.check(exc[i].second);
        } catch (const BackendMismatch& e) {
          violate("image-backend", "label " + name + ", index " +
                                       std::to_string(exc[i].first) + ": " + e.what());
          continue;
        }
        if (!alg.is_empty(alg.meet(exc[i].second, tails)))
          violate("disjoint-atom-images",
                  "label " + name + ": exceptional image at " +
                      std::to_string(exc[i].first) + " meets the tail images");
        for (std::size_t j = i + 1; j < exc.size(); ++j)
          if (!alg.is_empty(alg.meet(exc[i].second, exc[j].second)))
            violate("disjoint-atom-images",
                    "label " + name + ": exceptional images at " +
                        std::to_string(exc[i].first) + " and " +
                        std::to_string(exc[j].first) + " intersect");
      }
      if (alg.universe() == Universe::Naturals &&
          spec.tail == ActionSpec::Tail::Shift && spec.shift < 0) {
        for (std::int64_t i = 0; i < -spec.shift; ++i)
          if (!spec.exceptions.count(i))
            violate("tail-range",
                    "label " + name + ": tail shifts index " + std::to_string(i) +
                        " below zero without an exceptional override");
      }
    }
    BoolElem r_again = apply_action(sys, spec, sys.domains[l]);
    if (!(r_again == sys.ranges[l]))
      violate("range-domain", "label " + name + ": theta(D) != R");
  }

  if (alg.kind() == Algebra::Kind::FiniteCofinite) {
    // Composites must normalize back into window+tail form; exercise every
    // ordered pair and re-check disjointness of the composite's images.
    for (std::size_t a = 0; a < sys.actions.size(); ++a)
      for (std::size_t b = 0; b < sys.actions.size(); ++b) {
        ActionSpec comp = compose_specs(sys, sys.actions[a], sys.actions[b]);
        std::vector<std::pair<std::int64_t, BoolElem>> exc(comp.exceptions.begin(),
                                                           comp.exceptions.end());
        for (std::size_t i = 0; i < exc.size(); ++i)
          for (std::size_t j = i + 1; j < exc.size(); ++j)
            if (!alg.is_empty(alg.meet(exc[i].second, exc[j].second)))
              violate("composition-closure",
                      "composite " + sys.labels[a] + ";" + sys.labels[b] +
                          ": images at " + std::to_string(exc[i].first) + " and " +
                          std::to_string(exc[j].first) + " intersect");
      }
  }
  return rep;
}

std::string ValidationReport::summary() const {
  if (violations.empty()) return "valid";
  std::string s;
  for (const auto& v : violations) {
    if (!s.empty()) s += "; ";
    s += v.rule + ": " + v.detail;
  }
  return s;
}

std::size_t configured_bound(std::size_t fallback) {
  const char* env = std::getenv("BDS_BOUND");
  if (!env) return fallback;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) return fallback;
  return static_cast<std::size_t>(v);
}

bool word_is_prefix(const Word& a, const Word& b) {
  if (a.size() > b.size()) return false;
  return std::equal(a.begin(), a.end(), b.begin());
}

Word word_remainder(const Word& prefix, const Word& b) {
  return Word(b.begin() + static_cast<std::ptrdiff_t>(prefix.size()), b.end());
}

std::string format_word(const System& sys, const Word& w) {
  if (w.empty()) return "()";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ".";
    s += sys.labels.at(w[i]);
  }
  return s;
}

}  // namespace bds
