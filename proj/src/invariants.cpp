#include "bds/invariants.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace bds {

namespace {

std::int64_t max_shift(const System& sys) {
  std::int64_t m = 1;
  for (const auto& spec : sys.actions)
    m = std::max<std::int64_t>(m, spec.shift < 0 ? -spec.shift : spec.shift);
  return m;
}

/// Window atoms: beyond this radius every action follows its tail rule and the
/// given elements have no exceptions.
std::int64_t horizon(const System& sys, const std::vector<BoolElem>& extra) {
  return window_radius(sys, extra) + max_shift(sys) + 1;
}

template <typename Fn>
void for_window_atoms(const System& sys, std::int64_t h, Fn&& fn) {
  std::int64_t lo = sys.algebra.universe() == Universe::Naturals ? 0 : -h;
  for (std::int64_t i = lo; i <= h; ++i) fn(i);
}

std::size_t cof_atom_lambda(const System& sys, std::int64_t i) {
  std::size_t n = 0;
  for (const auto& spec : sys.actions)
    if (!sys.algebra.is_empty(cof_atom_image(spec, i))) ++n;
  return n;
}

std::size_t default_cof_bound(const System& sys) {
  auto b = static_cast<std::size_t>(10 * (window_radius(sys) + max_shift(sys)));
  return configured_bound(std::max<std::size_t>(b, 20));
}

}  // namespace

bool is_hereditary(const System& sys, const IdealDesc& ideal) {
  const Algebra& alg = sys.algebra;
  if (ideal.height == IdealDesc::Height::Full) {
    // Monotonicity reduces the check to the generator.
    for (std::size_t l = 0; l < sys.labels.size(); ++l)
      if (!ideal_contains(alg, ideal, apply_label(sys, static_cast<LabelId>(l),
                                                  ideal.support)))
        return false;
    return true;
  }
  // Finite subsets of a cofinite support: atom images must be finite and stay
  // inside the support.  Beyond the horizon a Shift tail maps far atoms of S
  // to far atoms of S and Kill maps them to the empty set.
  std::int64_t h = horizon(sys, {ideal.support});
  bool ok = true;
  for_window_atoms(sys, h, [&](std::int64_t i) {
    if (!ok) return;
    BoolElem a = alg.singleton(i);
    if (!ideal_contains(alg, ideal, a)) return;
    for (const auto& spec : sys.actions)
      if (!ideal_contains(alg, ideal, cof_atom_image(spec, i))) {
        ok = false;
        return;
      }
  });
  return ok;
}

bool is_saturated(const System& sys, const IdealDesc& ideal) {
  const Algebra& alg = sys.algebra;
  // Atom-level check: a regular element with all images in the ideal contains
  // an atom outside the ideal with the same property, and conversely.  On the
  // cofinite backend far atoms never witness a failure: with a Shift tail
  // their image is a far singleton outside any Full(finite) ideal, inside any
  // cofinite-support ideal; with Kill-only tails they are singular.
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    for (std::size_t i = 0; i < alg.atom_count(); ++i) {
      BoolElem a = alg.atom(i);
      if (ideal_contains(alg, ideal, a)) continue;
      std::size_t lam = lambda(sys, a);
      if (lam == 0) continue;  // singular atom, not regular
      bool all_in = true;
      for (std::size_t l = 0; l < sys.labels.size() && all_in; ++l) {
        BoolElem img = apply_label(sys, static_cast<LabelId>(l), a);
        if (!alg.is_empty(img) && !ideal_contains(alg, ideal, img)) all_in = false;
      }
      if (all_in) return false;
    }
    return true;
  }
  std::int64_t h = horizon(sys, {ideal.support});
  bool ok = true;
  for_window_atoms(sys, h, [&](std::int64_t i) {
    if (!ok) return;
    BoolElem a = alg.singleton(i);
    if (ideal_contains(alg, ideal, a)) return;
    if (cof_atom_lambda(sys, i) == 0) return;
    for (const auto& spec : sys.actions) {
      BoolElem img = cof_atom_image(spec, i);
      if (!alg.is_empty(img) && !ideal_contains(alg, ideal, img)) return;
    }
    ok = false;
  });
  return ok;
}

HSReport hs_report(const System& sys, const IdealDesc& ideal) {
  return HSReport{ideal, is_hereditary(sys, ideal), is_saturated(sys, ideal)};
}

namespace {

/// Closure engine over ideal descriptions.  States are canonical IdealDescs:
/// Full(G), or FiniteOnly(S) with S cofinite.  The mixed "Full(F) or finite
/// subset of S" family collapses back into this vocabulary (F finite gives
/// FiniteOnly(F|S); F cofinite gives Full(F|(S\F))).
struct ClosureEngine {
  const System& sys;
  bool saturate;

  ClosureResult run(IdealDesc state) {
    const Algebra& alg = sys.algebra;
    if (alg.kind() == Algebra::Kind::FiniteAtoms) return run_finite(state.support);
    return run_cofinite(state);
  }

  ClosureResult run_finite(BoolElem g) {
    const Algebra& alg = sys.algebra;
    std::size_t steps = 0;
    const std::size_t cap = (std::size_t{1} << alg.atom_count()) + alg.atom_count() + 4;
    for (;;) {
      if (++steps > cap) throw std::logic_error("finite closure failed to stabilize");
      BoolElem g2 = g;
      for (std::size_t l = 0; l < sys.labels.size(); ++l)
        g2 = alg.join(g2, apply_label(sys, static_cast<LabelId>(l), g));
      if (!(g2 == g)) {
        g = g2;
        continue;
      }
      if (saturate) {
        BoolElem added = saturation_round(make_principal_ideal(alg, g));
        if (!alg.is_empty(added)) {
          g = alg.join(g, added);
          continue;
        }
      }
      return {make_principal_ideal(alg, g), true, steps};
    }
  }

  ClosureResult run_cofinite(IdealDesc state) {
    const Algebra& alg = sys.algebra;
    const std::size_t bound = default_cof_bound(sys);
    bool ts_applied = false;
    std::size_t steps = 0;
    for (;;) {
      if (steps++ > bound * 2 + 4) return {state, false, steps};
      if (state.height == IdealDesc::Height::Full) {
        BoolElem g = state.support;
        std::size_t inner = 0;
        for (;;) {
          if (inner++ > bound) {
            if (!ts_applied && alg.is_finite_set(g) && tail_stabilizes(g)) {
              // Every singleton is forced into the closure; restart from the
              // ideal of all finite sets.
              ts_applied = true;
              state = make_definable_ideal(alg, alg.top(), IdealDesc::Height::FiniteOnly);
              break;
            }
            return {make_principal_ideal(alg, g), false, steps + inner};
          }
          BoolElem g2 = g;
          for (std::size_t l = 0; l < sys.labels.size(); ++l)
            g2 = alg.join(g2, apply_label(sys, static_cast<LabelId>(l), g));
          if (!(g2 == g)) {
            g = g2;
            continue;
          }
          if (saturate) {
            BoolElem added = saturation_round(make_principal_ideal(alg, g));
            if (!alg.is_empty(added)) {
              g = alg.join(g, added);
              continue;
            }
          }
          return {make_principal_ideal(alg, g), true, steps + inner};
        }
        continue;
      }
      // FiniteOnly(S), S cofinite.  A cofinite atom image joins a Full part
      // and collapses the state back to a principal ideal.
      BoolElem s = state.support;
      bool collapsed = false;
      std::int64_t h = horizon(sys, {s});
      for_window_atoms(sys, h, [&](std::int64_t i) {
        if (collapsed) return;
        if (!alg.uf_contains(Ultrafilter::at_index(i), s)) return;
        for (const auto& spec : sys.actions) {
          BoolElem img = cof_atom_image(spec, i);
          if (!alg.is_finite_set(img)) {
            state = make_principal_ideal(alg, alg.join(img, alg.diff(s, img)));
            collapsed = true;
            return;
          }
        }
      });
      if (collapsed) continue;
      BoolElem s2 = s;
      for (std::size_t l = 0; l < sys.labels.size(); ++l)
        s2 = alg.join(s2, apply_label(sys, static_cast<LabelId>(l), s));
      if (!(s2 == s)) {
        state = make_definable_ideal(alg, s2, IdealDesc::Height::FiniteOnly);
        continue;
      }
      if (saturate) {
        BoolElem added = saturation_round(state);
        if (!alg.is_empty(added)) {
          state = make_definable_ideal(alg, alg.join(s, added),
                                       IdealDesc::Height::FiniteOnly);
          continue;
        }
      }
      return {state, true, steps};
    }
  }

  /// Join of the atoms forced in by one saturation round (window scan; far
  /// atoms cannot witness, see is_saturated).
  BoolElem saturation_round(const IdealDesc& ideal) {
    const Algebra& alg = sys.algebra;
    BoolElem added = alg.empty_elem();
    if (alg.kind() == Algebra::Kind::FiniteAtoms) {
      for (std::size_t i = 0; i < alg.atom_count(); ++i) {
        BoolElem a = alg.atom(i);
        if (ideal_contains(alg, ideal, a)) continue;
        bool alive = false, all_in = true;
        for (std::size_t l = 0; l < sys.labels.size(); ++l) {
          BoolElem img = apply_label(sys, static_cast<LabelId>(l), a);
          if (alg.is_empty(img)) continue;
          alive = true;
          if (!ideal_contains(alg, ideal, img)) all_in = false;
        }
        if (alive && all_in) added = alg.join(added, a);
      }
      return added;
    }
    std::int64_t h = horizon(sys, {ideal.support});
    for_window_atoms(sys, h, [&](std::int64_t i) {
      BoolElem a = alg.singleton(i);
      if (ideal_contains(alg, ideal, a)) return;
      bool alive = false, all_in = true;
      for (const auto& spec : sys.actions) {
        BoolElem img = cof_atom_image(spec, i);
        if (alg.is_empty(img)) continue;
        alive = true;
        if (!ideal_contains(alg, ideal, img)) all_in = false;
      }
      if (alive && all_in) added = alg.join(added, a);
    });
    return added;
  }

  /// True when the grown finite generator certifies that free shifts reach
  /// every index: shifts of both signs exist and g covers the whole
  /// non-uniform region with margin, so any far singleton is hit by a
  /// far-staying shift path and every near one is already present.
  bool tail_stabilizes(const BoolElem& g) {
    std::int64_t tp = 0, tm = 0;
    for (const auto& spec : sys.actions) {
      if (spec.tail != ActionSpec::Tail::Shift) continue;
      if (spec.shift > 0) tp = std::max(tp, spec.shift);
      if (spec.shift < 0) tm = std::min(tm, spec.shift);
    }
    if (tp == 0 || tm == 0) return false;
    const Algebra& alg = sys.algebra;
    std::int64_t reach = window_radius(sys) + 2 * max_shift(sys);
    std::int64_t lo = alg.universe() == Universe::Naturals ? 0 : -reach;
    for (std::int64_t i = lo; i <= reach; ++i)
      if (!alg.uf_contains(Ultrafilter::at_index(i), g)) return false;
    return true;
  }
};

}  // namespace

ClosureResult hereditary_closure(const System& sys, const BoolElem& seed) {
  sys.algebra.check(seed);
  ClosureEngine e{sys, false};
  return e.run(make_principal_ideal(sys.algebra, seed));
}

ClosureResult hs_closure(const System& sys, const BoolElem& seed) {
  sys.algebra.check(seed);
  ClosureEngine e{sys, true};
  return e.run(make_principal_ideal(sys.algebra, seed));
}

ClosureResult hs_close_ideal(const System& sys, const IdealDesc& start) {
  ClosureEngine e{sys, true};
  return e.run(start);
}

namespace {

IdealDesc ideal_join_start(const Algebra& alg, const IdealDesc& a, const IdealDesc& b) {
  using H = IdealDesc::Height;
  if (a.height == H::Full && b.height == H::Full)
    return make_principal_ideal(alg, alg.join(a.support, b.support));
  if (a.height == H::FiniteOnly && b.height == H::FiniteOnly)
    return make_definable_ideal(alg, alg.join(a.support, b.support), H::FiniteOnly);
  const IdealDesc& full = a.height == H::Full ? a : b;
  const IdealDesc& fin = a.height == H::Full ? b : a;
  if (alg.is_finite_set(full.support))
    return make_definable_ideal(alg, alg.join(full.support, fin.support),
                                H::FiniteOnly);
  return make_principal_ideal(
      alg, alg.join(full.support, alg.diff(fin.support, full.support)));
}

IdealDesc ideal_meet(const Algebra& alg, const IdealDesc& a, const IdealDesc& b) {
  using H = IdealDesc::Height;
  BoolElem m = alg.meet(a.support, b.support);
  H h = (a.height == H::FiniteOnly || b.height == H::FiniteOnly) ? H::FiniteOnly
                                                                 : H::Full;
  return make_definable_ideal(alg, m, h);
}

int ideal_rank(const Algebra& alg, const IdealDesc& i) {
  if (ideal_is_trivial(alg, i)) return 0;
  if (ideal_is_everything(alg, i)) return 2;
  return 1;
}

}  // namespace

HSLattice enumerate_hs_ideals(const System& sys) {
  const Algebra& alg = sys.algebra;
  HSLattice out;
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    if (alg.atom_count() == 0) {
      out.ideals.push_back(make_principal_ideal(alg, alg.empty_elem()));
      return out;
    }
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << alg.atom_count()); ++m) {
      IdealDesc cand = make_principal_ideal(alg, alg.of_mask(m));
      if (is_hereditary(sys, cand) && is_saturated(sys, cand))
        out.ideals.push_back(cand);
    }
    return out;
  }

  std::set<IdealDesc> cands;
  cands.insert(make_principal_ideal(alg, alg.empty_elem()));
  cands.insert(make_principal_ideal(alg, alg.top()));

  std::int64_t h = horizon(sys, {});
  std::vector<std::int64_t> seeds;
  std::int64_t lo = alg.universe() == Universe::Naturals ? 0 : -h;
  for (std::int64_t i = lo; i <= h; ++i) seeds.push_back(i);
  std::vector<std::int64_t> tail_reps = {h + 1, h + 2};
  if (alg.universe() == Universe::Integers) {
    tail_reps.push_back(-h - 1);
    tail_reps.push_back(-h - 2);
  }

  auto close_seed = [&](std::int64_t i) {
    ClosureResult r = hs_closure(sys, alg.singleton(i));
    if (!r.complete)
      throw UnsupportedEnumeration(
          "hs closure of atom " + std::to_string(i) + " did not stabilize");
    return r.ideal;
  };

  for (auto i : seeds) cands.insert(close_seed(i));
  std::vector<IdealDesc> tail_closures;
  for (auto i : tail_reps) tail_closures.push_back(close_seed(i));
  for (const auto& t : tail_closures) cands.insert(t);
  for (std::size_t i = 1; i < tail_closures.size(); ++i)
    if (!(tail_closures[i] == tail_closures[0])) out.possibly_incomplete = true;

  // Close the candidate set under join and meet.
  for (;;) {
    std::set<IdealDesc> next = cands;
    for (const auto& a : cands)
      for (const auto& b : cands) {
        ClosureResult j = hs_close_ideal(sys, ideal_join_start(alg, a, b));
        if (j.complete)
          next.insert(j.ideal);
        else
          out.possibly_incomplete = true;
        IdealDesc m = ideal_meet(alg, a, b);
        if (is_hereditary(sys, m) && is_saturated(sys, m)) next.insert(m);
      }
    if (next == cands) break;
    cands = std::move(next);
  }

  out.ideals.assign(cands.begin(), cands.end());
  std::sort(out.ideals.begin(), out.ideals.end(),
            [&](const IdealDesc& a, const IdealDesc& b) {
              int ra = ideal_rank(alg, a), rb = ideal_rank(alg, b);
              if (ra != rb) return ra < rb;
              return a < b;
            });
  return out;
}

namespace {

std::optional<CycleWitness> forced_path_from(const System& sys, const BoolElem& base,
                                             std::size_t bound, bool cofinite) {
  const Algebra& alg = sys.algebra;
  std::int64_t h = window_radius(sys);
  BoolElem cur = base;
  Word word;
  std::vector<BoolElem> trace = {base};
  std::set<BoolElem> visited = {base};
  for (std::size_t step = 0;; ++step) {
    if (cofinite && step > bound)
      throw SearchBoundExceeded("forced path did not settle within " +
                                std::to_string(bound) + " steps");
    if (!is_regular(sys, cur)) return std::nullopt;
    LabelId forced = -1;
    std::size_t branches = 0;
    for (std::size_t l = 0; l < sys.labels.size(); ++l)
      if (!alg.is_empty(apply_label(sys, static_cast<LabelId>(l), cur))) {
        ++branches;
        forced = static_cast<LabelId>(l);
      }
    if (branches != 1) return std::nullopt;
    cur = apply_label(sys, forced, cur);
    word.push_back(forced);
    trace.push_back(cur);
    if (cur == base) return CycleWitness{word, base, trace};
    if (cofinite && cur.repr() == BoolElem::Repr::Finite &&
        cur.exceptions().size() == 1) {
      // A far singleton drifting away from the window never returns.
      std::int64_t i = cur.exceptions()[0];
      const ActionSpec& spec = sys.actions[forced];
      if (i > h && spec.tail == ActionSpec::Tail::Shift && spec.shift > 0)
        return std::nullopt;
      if (i < -h && spec.tail == ActionSpec::Tail::Shift && spec.shift < 0)
        return std::nullopt;
    }
    if (visited.count(cur)) return std::nullopt;
    visited.insert(cur);
  }
}

}  // namespace

std::optional<CycleWitness> find_cycle_no_exit(const System& sys) {
  const Algebra& alg = sys.algebra;
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    for (std::size_t i = 0; i < alg.atom_count(); ++i)
      if (auto w = forced_path_from(sys, alg.atom(i), 0, false)) return w;
    return std::nullopt;
  }
  std::size_t bound = default_cof_bound(sys);
  std::int64_t h = horizon(sys, {});
  std::vector<std::int64_t> starts;
  std::int64_t lo = alg.universe() == Universe::Naturals ? 0 : -h;
  for (std::int64_t i = lo; i <= h; ++i) starts.push_back(i);
  starts.push_back(h + 1);
  if (alg.universe() == Universe::Integers) starts.push_back(-h - 1);
  for (auto i : starts)
    if (auto w = forced_path_from(sys, alg.singleton(i), bound, true)) return w;
  return std::nullopt;
}

bool condition_LB(const System& sys) { return !find_cycle_no_exit(sys).has_value(); }

bool is_cofinal(const System& sys) {
  HSLattice lat = enumerate_hs_ideals(sys);
  for (const auto& i : lat.ideals)
    if (!ideal_is_trivial(sys.algebra, i) && !ideal_is_everything(sys.algebra, i))
      return false;
  return true;
}

Condition2Result check_condition2(const System& sys, const BoolElem& a,
                                  const BoolElem& b, int depth) {
  const Algebra& alg = sys.algebra;
  if (alg.is_empty(a) || alg.is_empty(b))
    throw EmptyArgument("check_condition2: A and B must be nonempty");
  ClosureResult ha = hereditary_closure(sys, a);
  if (!ha.complete) return {Condition2Result::Status::Inconclusive, {}, {}, 0};
  auto in_ha = [&](const BoolElem& x) { return ideal_contains(alg, ha.ideal, x); };

  std::vector<BoolElem> candidates;
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << alg.atom_count()); ++m)
      candidates.push_back(alg.of_mask(m));
  } else {
    candidates.push_back(alg.empty_elem());
    candidates.push_back(alg.diff(b, alg.meet(b, ha.ideal.support)));
    candidates.push_back(b);
  }

  // For each candidate C: (a) B \ C in H(A); (b) every label path from C
  // enters H(A).  A path returning to an element on the current chain is an
  // infinite continuation avoiding H(A); "dies" and "cycles" verdicts are
  // budget-free facts and may be memoized, depth exhaustion may not.
  enum Verdict { kDies, kCycles, kDeep };
  struct Search {
    const System& sys;
    const std::function<bool(const BoolElem&)>& in_ha;
    std::set<BoolElem> on_stack;
    std::map<BoolElem, Verdict> settled;
    Word path;
    Word cycle_word;

    Verdict run(const BoolElem& x, int remaining) {
      auto memo = settled.find(x);
      if (memo != settled.end()) return memo->second;
      if (remaining <= 0) return kDeep;
      on_stack.insert(x);
      Verdict verdict = kDies;
      for (std::size_t l = 0; l < sys.labels.size(); ++l) {
        BoolElem img = apply_label(sys, static_cast<LabelId>(l), x);
        if (sys.algebra.is_empty(img) || in_ha(img)) continue;
        path.push_back(static_cast<LabelId>(l));
        if (on_stack.count(img)) {
          cycle_word = path;
          path.pop_back();
          verdict = kCycles;
          break;
        }
        Verdict child = run(img, remaining - 1);
        path.pop_back();
        if (child == kCycles) {
          verdict = kCycles;
          break;
        }
        if (child == kDeep) verdict = kDeep;
      }
      on_stack.erase(x);
      if (verdict != kDeep) settled.emplace(x, verdict);
      return verdict;
    }
  };

  bool saw_deep = false;
  std::optional<Word> first_cycle;
  std::function<bool(const BoolElem&)> member = in_ha;
  for (const auto& c : candidates) {
    if (!alg.is_empty(c) && !is_regular(sys, c)) continue;
    if (!in_ha(alg.diff(b, c))) continue;
    if (alg.is_empty(c) || in_ha(c))
      return {Condition2Result::Status::Verified, c, {}, 0};
    Search search{sys, member, {}, {}, {}, {}};
    switch (search.run(c, depth)) {
      case kDies:
        return {Condition2Result::Status::Verified, c, {}, depth};
      case kCycles:
        if (!first_cycle) first_cycle = search.cycle_word;
        break;
      case kDeep:
        saw_deep = true;
        break;
    }
  }
  if (saw_deep) return {Condition2Result::Status::Inconclusive, {}, {}, depth};
  return {Condition2Result::Status::Counterexample, {},
          first_cycle.value_or(Word{}), depth};
}

SimplicityReport is_simple(const System& sys) {
  SimplicityReport rep;
  rep.cycle = find_cycle_no_exit(sys);
  rep.lb = !rep.cycle.has_value();
  HSLattice lat = enumerate_hs_ideals(sys);
  rep.hs_trivial = true;
  for (const auto& i : lat.ideals)
    if (!ideal_is_trivial(sys.algebra, i) && !ideal_is_everything(sys.algebra, i)) {
      rep.hs_trivial = false;
      rep.ideal = i;
      break;
    }
  rep.simple = rep.lb && rep.hs_trivial;
  return rep;
}

QuotientSystem quotient_system(const System& sys, const IdealDesc& ideal) {
  const Algebra& alg = sys.algebra;
  // Witness search doubles as the hereditarity precondition check.
  if (ideal.height == IdealDesc::Height::Full) {
    for (std::size_t l = 0; l < sys.labels.size(); ++l) {
      BoolElem img = apply_label(sys, static_cast<LabelId>(l), ideal.support);
      if (!ideal_contains(alg, ideal, img))
        throw NotHereditary("quotient_system: ideal is not hereditary (label " +
                                sys.labels[l] + ")",
                            ideal.support, static_cast<LabelId>(l), img);
    }
  } else {
    std::int64_t h = horizon(sys, {ideal.support});
    std::optional<NotHereditary> err;
    for_window_atoms(sys, h, [&](std::int64_t i) {
      if (err) return;
      BoolElem a = alg.singleton(i);
      if (!ideal_contains(alg, ideal, a)) return;
      for (std::size_t l = 0; l < sys.labels.size(); ++l) {
        BoolElem img = cof_atom_image(sys.actions[l], i);
        if (!ideal_contains(alg, ideal, img)) {
          err.emplace("quotient_system: ideal is not hereditary (label " +
                          sys.labels[l] + ")",
                      a, static_cast<LabelId>(l), img);
          return;
        }
      }
    });
    if (err) throw *err;
  }

  QuotientMap q = make_quotient(alg, ideal);
  std::vector<ActionSpec> actions;
  if (q.target.kind() == Algebra::Kind::FiniteAtoms) {
    // Representative of each target atom's class in the source algebra.
    std::vector<BoolElem> reps(q.target.atom_count(), alg.empty_elem());
    switch (q.mode) {
      case QuotientMap::Mode::FiniteRestrict:
        for (std::size_t i = 0; i < alg.atom_count(); ++i)
          if (q.atom_target[i] >= 0) reps[q.atom_target[i]] = alg.atom(i);
        break;
      case QuotientMap::Mode::CofiniteToAtoms:
      case QuotientMap::Mode::CofiniteCollapse:
        for (std::size_t k = 0; k < q.index_atoms.size(); ++k)
          reps[q.index_atom_target[k]] = alg.singleton(q.index_atoms[k]);
        if (q.tail_atom >= 0) reps[q.tail_atom] = ideal.support;
        break;
      default:
        break;
    }
    for (std::size_t l = 0; l < sys.labels.size(); ++l) {
      std::vector<BoolElem> images;
      images.reserve(reps.size());
      for (const auto& rep : reps)
        images.push_back(q.map(apply_label(sys, static_cast<LabelId>(l), rep)));
      actions.push_back(ActionSpec::finite(std::move(images)));
    }
  } else {
    // CofiniteDropFinite: same backend, representatives avoid the generator.
    // Atoms inside the generator stay as dead atoms of the encoding.
    std::int64_t h = horizon(sys, {ideal.support});
    for (std::size_t l = 0; l < sys.labels.size(); ++l) {
      const ActionSpec& spec = sys.actions[l];
      ActionSpec out = spec.tail == ActionSpec::Tail::Shift
                           ? ActionSpec::shift_tail(spec.shift)
                           : ActionSpec::kill_tail();
      for_window_atoms(sys, h, [&](std::int64_t i) {
        BoolElem img;
        if (alg.uf_contains(Ultrafilter::at_index(i), ideal.support))
          img = alg.empty_elem();
        else
          img = q.map(cof_atom_image(spec, i));
        BoolElem tail_img = out.tail == ActionSpec::Tail::Shift
                                ? BoolElem::finite({i + out.shift})
                                : BoolElem::finite({});
        if (!(img == tail_img)) out.exceptions.emplace(i, std::move(img));
      });
      actions.push_back(std::move(out));
    }
  }
  System qsys = make_system(q.target, sys.labels, std::move(actions));
  ValidationReport check = validate_system(qsys);
  if (!check.ok())
    throw std::logic_error("quotient_system produced an invalid system: " +
                           check.summary());
  return QuotientSystem{std::move(qsys), std::move(q)};
}

}  // namespace bds
