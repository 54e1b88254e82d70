#ifndef BDS_PRESETS_HPP
#define BDS_PRESETS_HPP

#include <map>
#include <string>
#include <vector>

#include "bds/dynamics.hpp"

namespace bds {

struct DirectedGraphInput {
  struct Edge {
    std::string source, target, id;
  };
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
};

/// Atoms = vertices, labels = edge ids, theta_e(A) = {target} if source in A.
System from_directed_graph(const DirectedGraphInput& in);

class NotWeaklyLeftResolving : public std::runtime_error {
public:
  std::vector<std::string> set_a, set_b;
  std::string label;
  NotWeaklyLeftResolving(const std::string& what, std::vector<std::string> a,
                         std::vector<std::string> b, std::string l)
      : std::runtime_error(what), set_a(std::move(a)), set_b(std::move(b)),
        label(std::move(l)) {}
};

struct LabelledGraphInput {
  struct Edge {
    std::string source, target, label;
  };
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::vector<std::vector<std::string>> generators;  // accommodating vertex sets
};

/// Boolean algebra generated by the given vertex sets and all relative ranges,
/// actions theta_l = r(-, l).  Throws NotWeaklyLeftResolving with a witness
/// pair when the intersection law fails.
System from_labelled_graph(const LabelledGraphInput& in);

class MemoryTooSmall : public std::runtime_error {
public:
  explicit MemoryTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct SftInput {
  std::vector<std::string> alphabet;  // single-character symbols
  std::vector<std::string> forbidden;
  int memory = 0;  // past-equivalence depth l
};

/// One-sided subshift of finite type: atoms are the l-past equivalence
/// classes, actions extend theta_a(C(w)) = C(wa).  Throws MemoryTooSmall when
/// the classes refine at depth l+1.
System from_sft(const SftInput& in);

class NotBijective : public std::runtime_error {
public:
  explicit NotBijective(const std::string& what) : std::runtime_error(what) {}
};

struct PartialHomeoInput {
  std::vector<std::string> atoms;
  std::vector<std::string> y, z;           // atom sets, phi : Y -> Z
  std::map<std::string, std::string> phi;  // atom bijection
};

/// Single label with theta(A) = phi^{-1}(A & Z); R = Y, D = Z.
System from_partial_homeo(const PartialHomeoInput& in);

}  // namespace bds

#endif
