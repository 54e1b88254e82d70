#include "bds/topograph.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace bds {

std::string vertex_class_name(VertexClass c) {
  switch (c) {
    case VertexClass::Sce: return "sce";
    case VertexClass::FinNotRg: return "fin\\rg";
    case VertexClass::Rg: return "rg";
    case VertexClass::Sg: return "sg";
  }
  return "?";
}

int TopoGraph::vertex_index(const Ultrafilter& xi) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == xi) return static_cast<int>(i);
  return -1;
}

namespace {

std::int64_t max_shift(const System& sys) {
  std::int64_t m = 1;
  for (const auto& spec : sys.actions)
    m = std::max<std::int64_t>(m, spec.shift < 0 ? -spec.shift : spec.shift);
  return m;
}

std::size_t tail_shift_count(const System& sys) {
  std::size_t n = 0;
  for (const auto& spec : sys.actions)
    if (spec.tail == ActionSpec::Tail::Shift) ++n;
  return n;
}

}  // namespace

TopoGraph build_graph(const System& sys) {
  const Algebra& alg = sys.algebra;
  TopoGraph g;
  g.labels = sys.labels;
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    for (std::size_t i = 0; i < alg.atom_count(); ++i) {
      g.vertices.push_back(Ultrafilter::at_atom(static_cast<std::uint32_t>(i)));
      g.vertex_names.push_back(alg.atom_names()[i]);
    }
    for (std::size_t l = 0; l < sys.labels.size(); ++l) {
      for (std::size_t b = 0; b < alg.atom_count(); ++b) {
        if (!alg.leq(alg.atom(b), sys.ranges[l])) continue;
        int dst = -1;
        for (std::size_t a = 0; a < alg.atom_count(); ++a)
          if (sys.actions[l].atom_images[a].mask() >> b & 1) {
            dst = static_cast<int>(a);
            break;
          }
        if (dst < 0) throw std::logic_error("build_graph: range atom has no source");
        g.edges.push_back({static_cast<LabelId>(l), static_cast<int>(b), dst});
      }
    }
    return g;
  }

  // Window view of the infinite graph: all special behavior plus a margin is
  // materialized; edges are emitted for sources in the inner window so every
  // pullback target is present.
  std::int64_t we = window_radius(sys) + max_shift(sys) + 1;
  std::int64_t wv = we + max_shift(sys);
  std::int64_t lo = alg.universe() == Universe::Naturals ? 0 : -wv;
  for (std::int64_t i = lo; i <= wv; ++i) {
    g.vertices.push_back(Ultrafilter::at_index(i));
    g.vertex_names.push_back(std::to_string(i));
  }
  g.vertices.push_back(Ultrafilter::at_infinity());
  g.vertex_names.push_back("inf");
  const int inf_idx = static_cast<int>(g.vertices.size()) - 1;
  auto principal_idx = [&](std::int64_t i) {
    return static_cast<int>(i - lo);
  };

  for (std::size_t l = 0; l < sys.labels.size(); ++l) {
    const ActionSpec& spec = sys.actions[l];
    std::int64_t src_lo = alg.universe() == Universe::Naturals ? 0 : -we;
    for (std::int64_t i = src_lo; i <= we; ++i) {
      if (!alg.uf_contains(Ultrafilter::at_index(i), sys.ranges[l])) continue;
      std::int64_t j = 0;
      bool found = false;
      for (const auto& [k, img] : spec.exceptions)
        if (alg.uf_contains(Ultrafilter::at_index(i), img)) {
          j = k;
          found = true;
          break;
        }
      if (!found && spec.tail == ActionSpec::Tail::Shift &&
          !spec.exceptions.count(i - spec.shift)) {
        j = i - spec.shift;
        found = true;
      }
      if (!found) throw std::logic_error("build_graph: range index has no source");
      g.edges.push_back({static_cast<LabelId>(l), principal_idx(i), principal_idx(j)});
    }
    if (sys.ranges[l].repr() == BoolElem::Repr::Cofinite) {
      // Edge at infinity; its pullback is the atom with cofinite image when
      // one exists, and infinity itself under a Shift tail.
      int dst = -1;
      for (const auto& [k, img] : spec.exceptions)
        if (img.repr() == BoolElem::Repr::Cofinite) {
          dst = principal_idx(k);
          break;
        }
      if (dst < 0) {
        if (spec.tail != ActionSpec::Tail::Shift)
          throw std::logic_error("build_graph: cofinite range without a source");
        dst = inf_idx;
      }
      g.edges.push_back({static_cast<LabelId>(l), inf_idx, dst});
    }
  }
  return g;
}

std::vector<VertexClass> classify_vertices(const System& sys, const TopoGraph& g) {
  const Algebra& alg = sys.algebra;
  std::vector<VertexClass> out;
  out.reserve(g.vertices.size());
  for (const auto& v : g.vertices) {
    std::size_t lam = 0;
    switch (v.kind) {
      case Ultrafilter::Kind::Atom:
        lam = lambda(sys, alg.atom(v.atom));
        break;
      case Ultrafilter::Kind::Index:
        lam = lambda(sys, alg.singleton(v.index));
        break;
      case Ultrafilter::Kind::Infinity:
        lam = tail_shift_count(sys);
        break;
    }
    // Finite label sets leave no room between sce and rg for these vertices.
    out.push_back(lam == 0 ? VertexClass::Sce : VertexClass::Rg);
  }
  return out;
}

namespace {

struct ContGraph {
  // continuation edges (label, next atom) per atom, canonical order
  std::vector<std::vector<std::pair<LabelId, std::uint32_t>>> next;
};

ContGraph continuation_graph(const System& sys) {
  const Algebra& alg = sys.algebra;
  ContGraph g;
  g.next.resize(alg.atom_count());
  for (std::size_t a = 0; a < alg.atom_count(); ++a)
    for (std::size_t l = 0; l < sys.labels.size(); ++l) {
      BoolElem img = sys.actions[l].atom_images[a];
      for (auto b : alg.atoms_under(img))
        g.next[a].push_back({static_cast<LabelId>(l), static_cast<std::uint32_t>(b)});
    }
  return g;
}

}  // namespace

BoundaryPathResult boundary_paths(const System& sys, std::size_t cap) {
  if (sys.algebra.kind() != Algebra::Kind::FiniteAtoms)
    throw BackendMismatch("boundary_paths: finite backend only");
  const std::size_t n = sys.algebra.atom_count();
  ContGraph g = continuation_graph(sys);

  // reach[a] = atoms reachable from a in >= 1 step
  std::vector<std::uint64_t> reach(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (const auto& [l, b] : g.next[a]) reach[a] |= std::uint64_t{1} << b;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t a = 0; a < n; ++a) {
      std::uint64_t acc = reach[a];
      for (std::size_t b = 0; b < n; ++b)
        if (reach[a] >> b & 1) acc |= reach[b];
      if (acc != reach[a]) {
        reach[a] = acc;
        changed = true;
      }
    }
  }

  // The path space is infinite exactly when a branching atom is reachable
  // from a cycle (the cycle pumps arbitrarily many distinct prefixes).
  BoundaryPathResult res;
  for (std::size_t a = 0; a < n; ++a) {
    if (!(reach[a] >> a & 1)) continue;  // not on a cycle
    std::uint64_t scope = reach[a] | (std::uint64_t{1} << a);
    for (std::size_t v = 0; v < n; ++v)
      if ((scope >> v & 1) && g.next[v].size() >= 2) {
        res.infinite = true;
        return res;
      }
  }

  // Enumerate by depth-first extension; a repeated atom closes a forced loop.
  struct Frame {
    std::vector<std::uint32_t> atoms;
    Word word;
  };
  for (std::uint32_t a0 = 0; a0 < n; ++a0) {
    std::vector<Frame> stack = {{{a0}, {}}};
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      std::uint32_t end = f.atoms.back();
      if (g.next[end].empty()) {
        res.paths.push_back({BoundaryPath::Kind::Finite, f.word, {},
                             static_cast<int>(end), -1});
        if (res.paths.size() > cap) {
          res = BoundaryPathResult{true, {}};
          return res;
        }
        continue;
      }
      for (auto it = g.next[end].rbegin(); it != g.next[end].rend(); ++it) {
        auto [l, b] = *it;
        auto seen = std::find(f.atoms.begin(), f.atoms.end(), b);
        if (seen != f.atoms.end()) {
          std::size_t at = static_cast<std::size_t>(seen - f.atoms.begin());
          BoundaryPath p;
          p.kind = BoundaryPath::Kind::EventuallyPeriodic;
          p.prefix = Word(f.word.begin(), f.word.begin() + at);
          p.period = Word(f.word.begin() + at, f.word.end());
          p.period.push_back(l);
          p.anchor = static_cast<int>(b);
          res.paths.push_back(std::move(p));
          if (res.paths.size() > cap) {
            res = BoundaryPathResult{true, {}};
            return res;
          }
          continue;
        }
        Frame f2 = f;
        f2.atoms.push_back(b);
        f2.word.push_back(l);
        stack.push_back(std::move(f2));
      }
    }
  }
  std::sort(res.paths.begin(), res.paths.end(),
            [](const BoundaryPath& a, const BoundaryPath& b) {
              if (a.kind != b.kind) return a.kind < b.kind;
              if (a.prefix != b.prefix) return a.prefix < b.prefix;
              if (a.period != b.period) return a.period < b.period;
              return std::tie(a.terminal, a.anchor) < std::tie(b.terminal, b.anchor);
            });
  return res;
}

namespace {

// Elementary integer diagonalization, deliberately separate from the Smith
// normal form module (the two K-theory routes must not share code).
struct OracleMatrix {
  std::size_t rows, cols;
  std::vector<long long> e;
  long long& at(std::size_t r, std::size_t c) { return e[r * cols + c]; }
};

std::vector<long long> oracle_diagonalize(OracleMatrix m) {
  std::vector<long long> diag;
  std::size_t t = 0;
  while (t < m.rows && t < m.cols) {
    std::size_t pr = t, pc = t;
    long long best = 0;
    for (std::size_t i = t; i < m.rows; ++i)
      for (std::size_t j = t; j < m.cols; ++j) {
        long long v = m.at(i, j) < 0 ? -m.at(i, j) : m.at(i, j);
        if (v != 0 && (best == 0 || v < best)) {
          best = v;
          pr = i;
          pc = j;
        }
      }
    if (best == 0) break;
    for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(t, j), m.at(pr, j));
    for (std::size_t i = 0; i < m.rows; ++i) std::swap(m.at(i, t), m.at(i, pc));
    bool clean = false;
    while (!clean) {
      clean = true;
      for (std::size_t i = t + 1; i < m.rows; ++i) {
        if (m.at(i, t) == 0) continue;
        long long q = m.at(i, t) / m.at(t, t);
        for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) -= q * m.at(t, j);
        if (m.at(i, t) != 0) {
          for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(t, j), m.at(i, j));
          clean = false;
        }
      }
      for (std::size_t j = t + 1; j < m.cols; ++j) {
        if (m.at(t, j) == 0) continue;
        long long q = m.at(t, j) / m.at(t, t);
        for (std::size_t i = 0; i < m.rows; ++i) m.at(i, j) -= q * m.at(i, t);
        if (m.at(t, j) != 0) {
          for (std::size_t i = 0; i < m.rows; ++i) std::swap(m.at(i, t), m.at(i, j));
          clean = false;
        }
      }
    }
    long long d = m.at(t, t);
    diag.push_back(d < 0 ? -d : d);
    ++t;
  }
  return diag;
}

long long llgcd(long long a, long long b) {
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

}  // namespace

KGroups graph_ktheory_oracle(const TopoGraph& g) {
  for (const auto& v : g.vertices)
    if (v.kind == Ultrafilter::Kind::Infinity)
      throw std::invalid_argument("graph_ktheory_oracle: finite graph required");
  const std::size_t n = g.vertices.size();
  std::vector<int> regular;
  {
    std::vector<bool> has_in(n, false);
    for (const auto& e : g.edges) has_in[e.dst] = true;
    for (std::size_t v = 0; v < n; ++v)
      if (has_in[v]) regular.push_back(static_cast<int>(v));
  }
  OracleMatrix m{n, regular.size(), std::vector<long long>(n * regular.size(), 0)};
  for (std::size_t c = 0; c < regular.size(); ++c) {
    m.at(regular[c], c) += 1;
    for (const auto& e : g.edges)
      if (e.dst == regular[c]) m.at(e.src, c) -= 1;
  }
  std::vector<long long> diag = oracle_diagonalize(std::move(m));

  // Normalize the diagonal into invariant factors with gcd/lcm exchanges.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i + 1 < diag.size(); ++i) {
      if (diag[i + 1] % diag[i] == 0) continue;
      long long gcd = llgcd(diag[i], diag[i + 1]);
      long long lcm = diag[i] / gcd * diag[i + 1];
      diag[i] = gcd;
      diag[i + 1] = lcm;
      changed = true;
    }
  }
  KGroups k;
  k.k0.rank = n - diag.size();
  for (auto d : diag)
    if (d > 1) k.k0.torsion.push_back(static_cast<unsigned long long>(d));
  std::sort(k.k0.torsion.begin(), k.k0.torsion.end());
  k.k1.rank = regular.size() - diag.size();
  return k;
}

std::string to_dot(const TopoGraph& g, const std::vector<VertexClass>& classes) {
  std::string out = "digraph bds {\n";
  auto shape = [](VertexClass c) {
    switch (c) {
      case VertexClass::Sce: return "box";
      case VertexClass::FinNotRg: return "diamond";
      case VertexClass::Rg: return "ellipse";
      case VertexClass::Sg: return "octagon";
    }
    return "ellipse";
  };
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    out += "  v" + std::to_string(v) + " [label=\"" + g.vertex_names[v] +
           "\", shape=" + shape(classes.at(v)) + "];\n";
  }
  for (const auto& e : g.edges) {
    out += "  v" + std::to_string(e.src) + " -> v" + std::to_string(e.dst) +
           " [label=\"" + g.labels.at(e.label) + "\"];\n";
  }
  out += "}\n";
  return out;
}

std::string to_dot(const System& sys) {
  TopoGraph g = build_graph(sys);
  return to_dot(g, classify_vertices(sys, g));
}

}  // namespace bds
