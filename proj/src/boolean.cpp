#include "bds/boolean.hpp"

#include <algorithm>
#include <set>

namespace bds {

namespace {

std::vector<std::int64_t> sorted_unique(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<std::int64_t> vec_union(const std::vector<std::int64_t>& a,
                                    const std::vector<std::int64_t>& b) {
  std::vector<std::int64_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::int64_t> vec_inter(const std::vector<std::int64_t>& a,
                                    const std::vector<std::int64_t>& b) {
  std::vector<std::int64_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::int64_t> vec_diff(const std::vector<std::int64_t>& a,
                                   const std::vector<std::int64_t>& b) {
  std::vector<std::int64_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool vec_member(const std::vector<std::int64_t>& a, std::int64_t x) {
  return std::binary_search(a.begin(), a.end(), x);
}

}  // namespace

BoolElem BoolElem::atoms(std::uint64_t mask) {
  BoolElem e;
  e.repr_ = Repr::Atoms;
  e.mask_ = mask;
  return e;
}

BoolElem BoolElem::finite(std::vector<std::int64_t> indices) {
  BoolElem e;
  e.repr_ = Repr::Finite;
  e.exc_ = sorted_unique(std::move(indices));
  return e;
}

BoolElem BoolElem::cofinite(std::vector<std::int64_t> exceptions) {
  BoolElem e;
  e.repr_ = Repr::Cofinite;
  e.exc_ = sorted_unique(std::move(exceptions));
  return e;
}

bool BoolElem::operator<(const BoolElem& o) const {
  if (repr_ != o.repr_) return repr_ < o.repr_;
  if (repr_ == Repr::Atoms) return mask_ < o.mask_;
  return exc_ < o.exc_;
}

Algebra Algebra::finite_atoms(std::vector<std::string> atom_names) {
  std::sort(atom_names.begin(), atom_names.end());
  if (std::adjacent_find(atom_names.begin(), atom_names.end()) != atom_names.end())
    throw std::invalid_argument("finite_atoms: duplicate atom identifier");
  if (atom_names.size() > 64)
    throw std::invalid_argument("finite_atoms: more than 64 atoms not supported");
  Algebra a;
  a.kind_ = Kind::FiniteAtoms;
  a.atoms_ = std::move(atom_names);
  return a;
}

Algebra Algebra::finite_cofinite(Universe u) {
  Algebra a;
  a.kind_ = Kind::FiniteCofinite;
  a.uni_ = u;
  return a;
}

int Algebra::atom_index(std::string_view name) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), name);
  if (it == atoms_.end() || *it != name) return -1;
  return static_cast<int>(it - atoms_.begin());
}

BoolElem Algebra::empty_elem() const {
  return kind_ == Kind::FiniteAtoms ? BoolElem::atoms(0) : BoolElem::finite({});
}

BoolElem Algebra::top() const {
  if (kind_ == Kind::FiniteAtoms) {
    std::uint64_t m = atoms_.empty() ? 0 : (~std::uint64_t{0} >> (64 - atoms_.size()));
    return BoolElem::atoms(m);
  }
  return BoolElem::cofinite({});
}

BoolElem Algebra::atom(std::size_t i) const {
  if (kind_ != Kind::FiniteAtoms || i >= atoms_.size())
    throw BackendMismatch("atom: bad atom index");
  return BoolElem::atoms(std::uint64_t{1} << i);
}

BoolElem Algebra::of_mask(std::uint64_t mask) const {
  BoolElem e = BoolElem::atoms(mask);
  check(e);
  return e;
}

BoolElem Algebra::of_atom_names(const std::vector<std::string>& names) const {
  std::uint64_t m = 0;
  for (const auto& n : names) {
    int i = atom_index(n);
    if (i < 0) throw BackendMismatch("of_atom_names: unknown atom '" + n + "'");
    m |= std::uint64_t{1} << i;
  }
  return BoolElem::atoms(m);
}

BoolElem Algebra::singleton(std::int64_t index) const {
  BoolElem e = BoolElem::finite({index});
  check(e);
  return e;
}

BoolElem Algebra::finite_set(std::vector<std::int64_t> indices) const {
  BoolElem e = BoolElem::finite(std::move(indices));
  check(e);
  return e;
}

BoolElem Algebra::cofinite_set(std::vector<std::int64_t> exceptions) const {
  BoolElem e = BoolElem::cofinite(std::move(exceptions));
  check(e);
  return e;
}

void Algebra::check(const BoolElem& e) const {
  if (kind_ == Kind::FiniteAtoms) {
    if (e.repr() != BoolElem::Repr::Atoms)
      throw BackendMismatch("element belongs to the finite/cofinite backend");
    std::uint64_t allowed =
        atoms_.empty() ? 0 : (~std::uint64_t{0} >> (64 - atoms_.size()));
    if (e.mask() & ~allowed) throw BackendMismatch("element mask exceeds atom set");
  } else {
    if (e.repr() == BoolElem::Repr::Atoms)
      throw BackendMismatch("element belongs to the finite-atoms backend");
    if (uni_ == Universe::Naturals)
      for (auto i : e.exceptions())
        if (i < 0) throw BackendMismatch("negative index in a naturals universe");
  }
}

BoolElem Algebra::meet(const BoolElem& a, const BoolElem& b) const {
  check(a);
  check(b);
  if (kind_ == Kind::FiniteAtoms) return BoolElem::atoms(a.mask() & b.mask());
  const bool ca = a.repr() == BoolElem::Repr::Cofinite;
  const bool cb = b.repr() == BoolElem::Repr::Cofinite;
  if (!ca && !cb) return BoolElem::finite(vec_inter(a.exceptions(), b.exceptions()));
  if (ca && cb) return BoolElem::cofinite(vec_union(a.exceptions(), b.exceptions()));
  const BoolElem& fin = ca ? b : a;
  const BoolElem& cof = ca ? a : b;
  return BoolElem::finite(vec_diff(fin.exceptions(), cof.exceptions()));
}

BoolElem Algebra::join(const BoolElem& a, const BoolElem& b) const {
  check(a);
  check(b);
  if (kind_ == Kind::FiniteAtoms) return BoolElem::atoms(a.mask() | b.mask());
  const bool ca = a.repr() == BoolElem::Repr::Cofinite;
  const bool cb = b.repr() == BoolElem::Repr::Cofinite;
  if (!ca && !cb) return BoolElem::finite(vec_union(a.exceptions(), b.exceptions()));
  if (ca && cb) return BoolElem::cofinite(vec_inter(a.exceptions(), b.exceptions()));
  const BoolElem& fin = ca ? b : a;
  const BoolElem& cof = ca ? a : b;
  return BoolElem::cofinite(vec_diff(cof.exceptions(), fin.exceptions()));
}

BoolElem Algebra::complement(const BoolElem& a) const {
  check(a);
  if (kind_ == Kind::FiniteAtoms) return diff(top(), a);
  if (a.repr() == BoolElem::Repr::Finite) return BoolElem::cofinite(a.exceptions());
  return BoolElem::finite(a.exceptions());
}

BoolElem Algebra::diff(const BoolElem& a, const BoolElem& b) const {
  if (kind_ == Kind::FiniteAtoms) {
    check(a);
    check(b);
    return BoolElem::atoms(a.mask() & ~b.mask());
  }
  return meet(a, complement(b));
}

bool Algebra::leq(const BoolElem& a, const BoolElem& b) const { return meet(a, b) == a; }

bool Algebra::is_empty(const BoolElem& a) const {
  check(a);
  if (kind_ == Kind::FiniteAtoms) return a.mask() == 0;
  return a.repr() == BoolElem::Repr::Finite && a.exceptions().empty();
}

bool Algebra::is_top(const BoolElem& a) const { return a == top(); }

bool Algebra::is_finite_set(const BoolElem& a) const {
  check(a);
  if (kind_ == Kind::FiniteAtoms) return true;
  return a.repr() == BoolElem::Repr::Finite;
}

std::vector<std::size_t> Algebra::atoms_under(const BoolElem& a) const {
  if (kind_ != Kind::FiniteAtoms) throw BackendMismatch("atoms_under: finite backend only");
  check(a);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (a.mask() >> i & 1) out.push_back(i);
  return out;
}

std::vector<Ultrafilter> Algebra::ultrafilters(std::size_t principal_limit) const {
  std::vector<Ultrafilter> out;
  if (kind_ == Kind::FiniteAtoms) {
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      out.push_back(Ultrafilter::at_atom(static_cast<std::uint32_t>(i)));
    return out;
  }
  if (uni_ == Universe::Naturals) {
    for (std::size_t i = 0; i < principal_limit; ++i)
      out.push_back(Ultrafilter::at_index(static_cast<std::int64_t>(i)));
  } else {
    auto r = static_cast<std::int64_t>(principal_limit / 2);
    for (std::int64_t i = -r; i <= r; ++i) out.push_back(Ultrafilter::at_index(i));
  }
  out.push_back(Ultrafilter::at_infinity());
  return out;
}

bool Algebra::PrincipalStream::next(Ultrafilter& out) {
  if (alg_->kind() == Kind::FiniteAtoms) {
    if (pos_ >= alg_->atom_count()) return false;
    out = Ultrafilter::at_atom(static_cast<std::uint32_t>(pos_++));
    return true;
  }
  if (alg_->universe() == Universe::Naturals) {
    out = Ultrafilter::at_index(static_cast<std::int64_t>(pos_++));
    return true;
  }
  // Z enumerated 0, -1, 1, -2, 2, ... so every index is eventually reached.
  auto n = static_cast<std::int64_t>(pos_++);
  out = Ultrafilter::at_index(n % 2 == 0 ? n / 2 : -(n + 1) / 2);
  return true;
}

bool Algebra::uf_contains(const Ultrafilter& xi, const BoolElem& a) const {
  check(a);
  switch (xi.kind) {
    case Ultrafilter::Kind::Atom:
      if (kind_ != Kind::FiniteAtoms || xi.atom >= atoms_.size())
        throw BackendMismatch("uf_contains: foreign ultrafilter");
      return (a.mask() >> xi.atom & 1) != 0;
    case Ultrafilter::Kind::Index: {
      if (kind_ != Kind::FiniteCofinite)
        throw BackendMismatch("uf_contains: foreign ultrafilter");
      bool listed = vec_member(a.exceptions(), xi.index);
      return a.repr() == BoolElem::Repr::Finite ? listed : !listed;
    }
    case Ultrafilter::Kind::Infinity:
      if (kind_ != Kind::FiniteCofinite)
        throw BackendMismatch("uf_contains: foreign ultrafilter");
      return a.repr() == BoolElem::Repr::Cofinite;
  }
  return false;
}

std::string Algebra::format(const BoolElem& a) const {
  check(a);
  std::string s;
  if (kind_ == Kind::FiniteAtoms) {
    s = "{";
    bool first = true;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (a.mask() >> i & 1) {
        if (!first) s += ",";
        s += atoms_[i];
        first = false;
      }
    return s + "}";
  }
  s = a.repr() == BoolElem::Repr::Cofinite ? "~{" : "{";
  bool first = true;
  for (auto i : a.exceptions()) {
    if (!first) s += ",";
    s += std::to_string(i);
    first = false;
  }
  return s + "}";
}

std::string Algebra::format(const Ultrafilter& xi) const {
  switch (xi.kind) {
    case Ultrafilter::Kind::Atom:
      return "<" + atoms_.at(xi.atom) + ">";
    case Ultrafilter::Kind::Index:
      return "<" + std::to_string(xi.index) + ">";
    case Ultrafilter::Kind::Infinity:
      return "<inf>";
  }
  return "<?>";
}

bool IdealDesc::operator<(const IdealDesc& o) const {
  if (height != o.height) return height < o.height;
  return support < o.support;
}

IdealDesc make_principal_ideal(const Algebra& alg, const BoolElem& generator) {
  alg.check(generator);
  return IdealDesc{generator, IdealDesc::Height::Full};
}

IdealDesc make_definable_ideal(const Algebra& alg, const BoolElem& support,
                               IdealDesc::Height height) {
  alg.check(support);
  if (alg.kind() == Algebra::Kind::FiniteAtoms) height = IdealDesc::Height::Full;
  // A finite support admits finite subsets only, so FiniteOnly collapses.
  if (height == IdealDesc::Height::FiniteOnly && alg.is_finite_set(support))
    height = IdealDesc::Height::Full;
  return IdealDesc{support, height};
}

bool ideal_contains(const Algebra& alg, const IdealDesc& ideal, const BoolElem& a) {
  if (ideal.height == IdealDesc::Height::FiniteOnly && !alg.is_finite_set(a)) return false;
  return alg.leq(a, ideal.support);
}

bool ideal_leq(const Algebra& alg, const IdealDesc& a, const IdealDesc& b) {
  if (b.height == IdealDesc::Height::FiniteOnly &&
      a.height == IdealDesc::Height::Full && !alg.is_finite_set(a.support))
    return false;
  return alg.leq(a.support, b.support);
}

bool ideal_is_trivial(const Algebra& alg, const IdealDesc& a) {
  return alg.is_empty(a.support);
}

bool ideal_is_everything(const Algebra& alg, const IdealDesc& a) {
  return a.height == IdealDesc::Height::Full && alg.is_top(a.support);
}

void validate_ideal(const Algebra& alg, const IdealDesc& ideal) {
  alg.check(ideal.support);
  if (alg.kind() == Algebra::Kind::FiniteAtoms &&
      ideal.height != IdealDesc::Height::Full)
    throw NotAnIdeal("finite-backend ideals are principal");
  // Downward and join closure spot checks on the canonical witnesses.
  if (!ideal_contains(alg, ideal, alg.empty_elem()))
    throw NotAnIdeal("ideal does not contain the empty element");
  BoolElem s = ideal.support;
  if (ideal.height == IdealDesc::Height::Full) {
    if (!ideal_contains(alg, ideal, s)) throw NotAnIdeal("generator not a member");
  } else if (alg.kind() == Algebra::Kind::FiniteCofinite) {
    for (auto i : s.exceptions())
      if (ideal_contains(alg, ideal, alg.singleton(i)))
        throw NotAnIdeal("support exception listed as member");
  }
}

std::string format_ideal(const Algebra& alg, const IdealDesc& ideal) {
  std::string s = alg.format(ideal.support);
  if (ideal.height == IdealDesc::Height::FiniteOnly) return "fin(" + s + ")";
  return "I(" + s + ")";
}

BoolElem QuotientMap::map(const BoolElem& a) const {
  source.check(a);
  switch (mode) {
    case Mode::FiniteRestrict: {
      std::uint64_t m = 0;
      for (std::size_t i = 0; i < atom_target.size(); ++i)
        if ((a.mask() >> i & 1) && atom_target[i] >= 0)
          m |= std::uint64_t{1} << atom_target[i];
      return BoolElem::atoms(m);
    }
    case Mode::CofiniteDropFinite:
      return source.diff(a, ideal.support);
    case Mode::CofiniteToAtoms:
    case Mode::CofiniteCollapse: {
      std::uint64_t m = 0;
      for (std::size_t k = 0; k < index_atoms.size(); ++k) {
        if (source.uf_contains(Ultrafilter::at_index(index_atoms[k]), a))
          m |= std::uint64_t{1} << index_atom_target[k];
      }
      if (tail_atom >= 0 && a.repr() == BoolElem::Repr::Cofinite)
        m |= std::uint64_t{1} << tail_atom;
      return BoolElem::atoms(m);
    }
  }
  return target.empty_elem();
}

QuotientMap make_quotient(const Algebra& alg, const IdealDesc& ideal) {
  validate_ideal(alg, ideal);
  QuotientMap q;
  q.source = alg;
  q.ideal = ideal;
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    q.mode = QuotientMap::Mode::FiniteRestrict;
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < alg.atom_count(); ++i)
      if (!(ideal.support.mask() >> i & 1)) kept.push_back("[" + alg.atom_names()[i] + "]");
    q.target = Algebra::finite_atoms(kept);
    q.atom_target.assign(alg.atom_count(), -1);
    for (std::size_t i = 0; i < alg.atom_count(); ++i)
      if (!(ideal.support.mask() >> i & 1))
        q.atom_target[i] = q.target.atom_index("[" + alg.atom_names()[i] + "]");
    return q;
  }

  const BoolElem& s = ideal.support;
  const std::string tail_name = alg.universe() == Universe::Integers ? "[Z]" : "[N]";
  auto build_atoms = [&](const std::vector<std::int64_t>& idxs, bool with_tail) {
    std::vector<std::string> names;
    names.reserve(idxs.size() + 1);
    for (auto i : idxs) names.push_back("[" + std::to_string(i) + "]");
    if (with_tail) names.push_back(tail_name);
    q.target = Algebra::finite_atoms(names);
    q.index_atoms = idxs;
    q.index_atom_target.clear();
    for (auto i : idxs)
      q.index_atom_target.push_back(q.target.atom_index("[" + std::to_string(i) + "]"));
    q.tail_atom = with_tail ? q.target.atom_index(tail_name) : -1;
  };

  if (ideal.height == IdealDesc::Height::Full) {
    if (alg.is_finite_set(s)) {
      // B / I_S with S finite: representatives simply avoid S.
      q.mode = QuotientMap::Mode::CofiniteDropFinite;
      q.target = alg;
      return q;
    }
    // B / I_S with S cofinite: classes are the subsets of the finite complement.
    q.mode = QuotientMap::Mode::CofiniteToAtoms;
    build_atoms(s.exceptions(), false);
    return q;
  }

  // Finite subsets of a cofinite S: one atom per missing index plus the class
  // of the cofinite tail.
  q.mode = QuotientMap::Mode::CofiniteCollapse;
  build_atoms(s.exceptions(), true);
  return q;
}

}  // namespace bds
