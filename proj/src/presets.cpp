#include "bds/presets.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace bds {

System from_directed_graph(const DirectedGraphInput& in) {
  Algebra alg = Algebra::finite_atoms(in.vertices);
  std::vector<std::string> labels;
  std::vector<ActionSpec> actions;
  std::set<std::string> ids;
  for (const auto& e : in.edges) {
    if (!ids.insert(e.id).second)
      throw std::invalid_argument("from_directed_graph: duplicate edge id " + e.id);
    int s = alg.atom_index(e.source), t = alg.atom_index(e.target);
    if (s < 0 || t < 0)
      throw std::invalid_argument("from_directed_graph: unknown endpoint on edge " +
                                  e.id);
    std::vector<BoolElem> images(alg.atom_count(), alg.empty_elem());
    images[s] = alg.atom(t);
    labels.push_back(e.id);
    actions.push_back(ActionSpec::finite(std::move(images)));
  }
  return make_system(std::move(alg), std::move(labels), std::move(actions));
}

namespace {

using VertexSet = std::set<std::string>;

VertexSet relative_range(const LabelledGraphInput& in, const VertexSet& a,
                         const std::string& label) {
  VertexSet out;
  for (const auto& e : in.edges)
    if (e.label == label && a.count(e.source)) out.insert(e.target);
  return out;
}

}  // namespace

System from_labelled_graph(const LabelledGraphInput& in) {
  std::set<std::string> labels;
  for (const auto& e : in.edges) labels.insert(e.label);

  // Close the generators under the relative range maps; the generated field of
  // sets is atomized by membership profile.
  std::set<VertexSet> gens;
  for (const auto& g : in.generators) gens.insert(VertexSet(g.begin(), g.end()));
  for (const auto& l : labels)
    gens.insert(relative_range(in, VertexSet(in.vertices.begin(), in.vertices.end()),
                               l));
  for (bool grew = true; grew;) {
    grew = false;
    std::set<VertexSet> next = gens;
    for (const auto& g : gens)
      for (const auto& l : labels)
        if (next.insert(relative_range(in, g, l)).second) grew = true;
    gens = std::move(next);
  }

  std::map<std::vector<bool>, VertexSet> profile_atoms;
  for (const auto& v : in.vertices) {
    std::vector<bool> profile;
    for (const auto& g : gens) profile.push_back(g.count(v) > 0);
    profile_atoms[profile].insert(v);
  }
  std::vector<VertexSet> atom_sets;
  for (auto& [p, vs] : profile_atoms) atom_sets.push_back(vs);

  // Weak left-resolving on the generated field = disjointness of the atoms'
  // relative ranges, label by label.
  for (const auto& l : labels)
    for (std::size_t i = 0; i < atom_sets.size(); ++i)
      for (std::size_t j = i + 1; j < atom_sets.size(); ++j) {
        VertexSet ri = relative_range(in, atom_sets[i], l);
        VertexSet rj = relative_range(in, atom_sets[j], l);
        std::vector<std::string> common;
        std::set_intersection(ri.begin(), ri.end(), rj.begin(), rj.end(),
                              std::back_inserter(common));
        if (!common.empty())
          throw NotWeaklyLeftResolving(
              "relative ranges of disjoint sets intersect on label " + l,
              {atom_sets[i].begin(), atom_sets[i].end()},
              {atom_sets[j].begin(), atom_sets[j].end()}, l);
      }

  std::vector<std::string> atom_names;
  std::map<std::string, std::size_t> vertex_atom;
  for (std::size_t i = 0; i < atom_sets.size(); ++i) {
    atom_names.push_back("[" + *atom_sets[i].begin() + "]");
    for (const auto& v : atom_sets[i]) vertex_atom[v] = i;
  }
  Algebra alg = Algebra::finite_atoms(atom_names);
  auto set_to_elem = [&](const VertexSet& s) {
    BoolElem out = alg.empty_elem();
    std::set<std::size_t> touched;
    for (const auto& v : s) touched.insert(vertex_atom[v]);
    for (auto i : touched) {
      // The field is atomized, so every closed set is a union of atoms.
      for (const auto& v : atom_sets[i])
        if (!s.count(v))
          throw std::logic_error("from_labelled_graph: range not atom-aligned");
      out = alg.join(out, alg.atom(alg.atom_index("[" + *atom_sets[i].begin() + "]")));
    }
    return out;
  };

  std::vector<std::string> label_list(labels.begin(), labels.end());
  std::vector<ActionSpec> actions;
  for (const auto& l : label_list) {
    std::vector<BoolElem> images(alg.atom_count(), alg.empty_elem());
    for (std::size_t i = 0; i < atom_sets.size(); ++i) {
      int idx = alg.atom_index("[" + *atom_sets[i].begin() + "]");
      images[idx] = set_to_elem(relative_range(in, atom_sets[i], l));
    }
    actions.push_back(ActionSpec::finite(std::move(images)));
  }
  return make_system(std::move(alg), std::move(label_list), std::move(actions));
}

namespace {

struct SftModel {
  std::vector<char> symbols;          // single characters, sorted
  std::vector<std::string> forbidden;
  std::size_t maxf = 1;

  bool factor_free(const std::string& w) const {
    for (const auto& f : forbidden)
      if (w.find(f) != std::string::npos) return false;
    return true;
  }

  /// True when w extends to an infinite factor-free word.
  bool live(const std::string& w) const {
    std::string state = w.size() >= maxf - 1 ? w.substr(w.size() - (maxf - 1)) : w;
    // Memoized DFS over suffix states: live iff some child is live or a cycle
    // closes on the current path.
    struct Rec {
      const SftModel& m;
      std::set<std::string> alive, dead;
      bool run(const std::string& s, std::set<std::string>& path) {
        if (alive.count(s)) return true;
        if (dead.count(s)) return false;
        if (path.count(s)) {  // cycle
          alive.insert(s);
          return true;
        }
        path.insert(s);
        bool ok = false;
        for (char c : m.symbols) {
          std::string w2 = s + c;
          bool clean = true;
          for (const auto& f : m.forbidden)
            if (w2.size() >= f.size() && w2.compare(w2.size() - f.size(), f.size(), f) == 0) {
              clean = false;
              break;
            }
          if (!clean) continue;
          std::string s2 = w2.size() >= m.maxf - 1 && m.maxf > 1
                               ? w2.substr(w2.size() - (m.maxf - 1))
                               : (m.maxf <= 1 ? std::string() : w2);
          if (run(s2, path)) {
            ok = true;
            break;
          }
        }
        path.erase(s);
        (ok ? alive : dead).insert(s);
        return ok;
      }
    };
    Rec rec{*this, {}, {}};
    std::set<std::string> path;
    return rec.run(state, path);
  }

  void valid_prefixes(std::size_t len, std::string& cur,
                      std::vector<std::string>& out) const {
    if (cur.size() == len) {
      if (live(cur)) out.push_back(cur);
      return;
    }
    for (char c : symbols) {
      cur.push_back(c);
      if (factor_free(cur)) valid_prefixes(len, cur, out);
      cur.pop_back();
    }
  }

  /// Predecessor words z (1 <= |z| <= depth) with z+w factor free.
  std::set<std::string> preds(const std::string& w, int depth) const {
    std::set<std::string> out;
    std::string z;
    auto rec = [&](auto&& self) -> void {
      if (!z.empty() && factor_free(z + w)) out.insert(z);
      if (static_cast<int>(z.size()) == depth) return;
      for (char c : symbols) {
        z.insert(z.begin(), c);
        if (factor_free(z)) self(self);
        z.erase(z.begin());
      }
    };
    rec(rec);
    return out;
  }
};

}  // namespace

System from_sft(const SftInput& in) {
  SftModel m;
  if (in.alphabet.empty()) throw std::invalid_argument("from_sft: empty alphabet");
  for (const auto& s : in.alphabet) {
    if (s.size() != 1)
      throw std::invalid_argument("from_sft: alphabet symbols must be single characters");
    m.symbols.push_back(s[0]);
  }
  std::sort(m.symbols.begin(), m.symbols.end());
  if (std::adjacent_find(m.symbols.begin(), m.symbols.end()) != m.symbols.end())
    throw std::invalid_argument("from_sft: duplicate alphabet symbol");
  for (const auto& f : in.forbidden) {
    if (f.empty()) throw std::invalid_argument("from_sft: empty forbidden word");
    for (char c : f)
      if (!std::binary_search(m.symbols.begin(), m.symbols.end(), c))
        throw std::invalid_argument("from_sft: forbidden word '" + f +
                                    "' uses a symbol outside the alphabet");
    m.forbidden.push_back(f);
    m.maxf = std::max(m.maxf, f.size());
  }
  if (in.memory < 0) throw std::invalid_argument("from_sft: negative memory");
  const int l = in.memory;
  if (static_cast<std::size_t>(l + 1) + m.maxf > 16)
    throw std::invalid_argument("from_sft: memory/forbidden length too large");

  // Prefixes long enough to settle (l+1)-past membership; classes are the
  // distinct predecessor sets at depth l.
  const std::size_t plen = static_cast<std::size_t>(l + 1) + m.maxf;
  std::vector<std::string> prefixes;
  std::string cur;
  m.valid_prefixes(plen, cur, prefixes);
  if (prefixes.empty()) throw std::invalid_argument("from_sft: empty subshift");

  std::map<std::set<std::string>, std::vector<std::string>> classes;
  for (const auto& w : prefixes) classes[m.preds(w, l)].push_back(w);

  // Stabilization: refining to l+1 must not split any class.
  for (const auto& [p, ws] : classes) {
    std::set<std::string> refined = m.preds(ws.front(), l + 1);
    for (const auto& w : ws)
      if (m.preds(w, l + 1) != refined)
        throw MemoryTooSmall("past classes refine at depth " + std::to_string(l + 1));
  }

  std::vector<std::set<std::string>> class_preds;
  std::vector<std::string> atom_names;
  std::map<std::string, std::size_t> prefix_class;
  for (const auto& [p, ws] : classes) {
    class_preds.push_back(p);
    atom_names.push_back("[" + *std::min_element(ws.begin(), ws.end()) + "]");
    for (const auto& w : ws) prefix_class[w] = class_preds.size() - 1;
  }
  Algebra alg = Algebra::finite_atoms(atom_names);
  std::vector<int> class_atom(class_preds.size());
  {
    std::size_t k = 0;
    for (const auto& [p, ws] : classes)
      class_atom[k++] = alg.atom_index("[" + *std::min_element(ws.begin(), ws.end()) + "]");
  }

  // theta_c(K) = { y : c.y in X and c.y in K }, computed on prefixes and
  // checked to be constant on classes.
  std::vector<std::string> label_names;
  for (char c : m.symbols) label_names.push_back(std::string(1, c));
  std::vector<ActionSpec> actions;
  for (char c : m.symbols) {
    std::vector<BoolElem> images(alg.atom_count(), alg.empty_elem());
    std::vector<std::vector<int>> verdicts(class_preds.size());
    for (const auto& w : prefixes) {
      std::string cw = std::string(1, c) + w;
      int target = -1;
      if (m.factor_free(cw)) {
        std::string cw_trunc = cw.substr(0, plen);
        auto it = prefix_class.find(cw_trunc);
        if (it == prefix_class.end())
          throw std::logic_error("from_sft: extended prefix escaped enumeration");
        target = static_cast<int>(it->second);
      }
      verdicts[prefix_class[w]].push_back(target);
    }
    for (std::size_t k = 0; k < class_preds.size(); ++k) {
      for (std::size_t i = 1; i < verdicts[k].size(); ++i)
        if (verdicts[k][i] != verdicts[k][0])
          throw MemoryTooSmall("action image not constant on a past class");
      if (!verdicts[k].empty() && verdicts[k][0] >= 0) {
        int img_class = verdicts[k][0];
        int src_atom = class_atom[img_class];
        images[src_atom] =
            alg.join(images[src_atom], alg.atom(class_atom[k]));
      }
    }
    actions.push_back(ActionSpec::finite(std::move(images)));
  }
  System sys = make_system(std::move(alg), std::move(label_names), std::move(actions));
  // Subshift systems are everywhere regular; the unit decomposes over the
  // one-letter isometries.
  for (std::size_t i = 0; i < sys.algebra.atom_count(); ++i)
    if (lambda(sys, sys.algebra.atom(i)) == 0)
      throw std::logic_error("from_sft: singular past class");
  return sys;
}

System from_partial_homeo(const PartialHomeoInput& in) {
  Algebra alg = Algebra::finite_atoms(in.atoms);
  BoolElem y = alg.of_atom_names(in.y);
  BoolElem z = alg.of_atom_names(in.z);
  std::set<std::string> yset(in.y.begin(), in.y.end());
  std::set<std::string> zset(in.z.begin(), in.z.end());
  if (in.phi.size() != yset.size())
    throw NotBijective("from_partial_homeo: phi must be defined on exactly Y");
  std::map<std::string, std::string> inverse;
  for (const auto& [from, to] : in.phi) {
    if (!yset.count(from))
      throw NotBijective("from_partial_homeo: phi defined outside Y at " + from);
    if (!zset.count(to))
      throw NotBijective("from_partial_homeo: phi lands outside Z at " + to);
    if (!inverse.emplace(to, from).second)
      throw NotBijective("from_partial_homeo: phi not injective at " + to);
  }
  if (inverse.size() != zset.size())
    throw NotBijective("from_partial_homeo: phi not onto Z");

  std::vector<BoolElem> images(alg.atom_count(), alg.empty_elem());
  for (const auto& [to, from] : inverse) {
    int a = alg.atom_index(to), b = alg.atom_index(from);
    images[a] = alg.atom(b);
  }
  System sys = make_system(std::move(alg), {"a"}, {ActionSpec::finite(std::move(images))});
  if (!(sys.ranges[0] == y))
    throw NotBijective("from_partial_homeo: range of the action is not Y");
  return sys;
}

}  // namespace bds
