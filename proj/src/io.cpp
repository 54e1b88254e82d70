#include "bds/io.hpp"

#include <algorithm>

#include "bds/invariants.hpp"
#include "bds/ktheory.hpp"
#include "bds/presets.hpp"
#include "bds/semigroup.hpp"
#include "bds/topograph.hpp"

namespace bds {

namespace {

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

const Json& need(const Json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) schema_fail(path, "missing key '" + key + "'");
  return j.at(key);
}

std::vector<std::string> string_list(const Json& j, const std::string& path) {
  if (!j.is_array()) schema_fail(path, "array of strings expected");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) schema_fail(path, "string expected");
    out.push_back(e.get<std::string>());
  }
  return out;
}

BoolElem parse_cof_elem(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_fail(path, "{\"finite\": [...]} or {\"cofinite\": [...]} expected");
  bool fin = j.contains("finite");
  bool cof = j.contains("cofinite");
  if (fin == cof) schema_fail(path, "exactly one of 'finite'/'cofinite' expected");
  const Json& arr = fin ? j.at("finite") : j.at("cofinite");
  if (!arr.is_array()) schema_fail(path, "array of integers expected");
  std::vector<std::int64_t> idx;
  for (const auto& e : arr) {
    if (!e.is_number_integer()) schema_fail(path, "integer index expected");
    idx.push_back(e.get<std::int64_t>());
  }
  return fin ? BoolElem::finite(std::move(idx)) : BoolElem::cofinite(std::move(idx));
}

System parse_preset(const Json& p) {
  if (!p.is_object() || p.size() != 1)
    schema_fail("preset", "exactly one preset kind expected");
  const std::string kind = p.begin().key();
  const Json& body = p.begin().value();
  if (kind == "graph") {
    DirectedGraphInput in;
    in.vertices = string_list(need(body, "vertices", "preset.graph"), "preset.graph.vertices");
    for (const auto& e : need(body, "edges", "preset.graph")) {
      if (!e.is_array() || e.size() != 3)
        schema_fail("preset.graph.edges", "[source, target, id] triples expected");
      in.edges.push_back({e[0].get<std::string>(), e[1].get<std::string>(),
                          e[2].get<std::string>()});
    }
    return from_directed_graph(in);
  }
  if (kind == "labelled-graph") {
    LabelledGraphInput in;
    in.vertices = string_list(need(body, "vertices", "preset.labelled-graph"),
                              "preset.labelled-graph.vertices");
    for (const auto& e : need(body, "edges", "preset.labelled-graph")) {
      if (!e.is_array() || e.size() != 3)
        schema_fail("preset.labelled-graph.edges",
                    "[source, target, label] triples expected");
      in.edges.push_back({e[0].get<std::string>(), e[1].get<std::string>(),
                          e[2].get<std::string>()});
    }
    if (body.contains("generators"))
      for (const auto& g : body.at("generators"))
        in.generators.push_back(string_list(g, "preset.labelled-graph.generators"));
    return from_labelled_graph(in);
  }
  if (kind == "sft") {
    SftInput in;
    in.alphabet = string_list(need(body, "alphabet", "preset.sft"), "preset.sft.alphabet");
    in.forbidden = string_list(need(body, "forbidden", "preset.sft"), "preset.sft.forbidden");
    const Json& mem = need(body, "memory", "preset.sft");
    if (!mem.is_number_integer()) schema_fail("preset.sft.memory", "integer expected");
    in.memory = mem.get<int>();
    return from_sft(in);
  }
  if (kind == "partial-homeo") {
    PartialHomeoInput in;
    in.atoms = string_list(need(body, "atoms", "preset.partial-homeo"),
                           "preset.partial-homeo.atoms");
    in.y = string_list(need(body, "y", "preset.partial-homeo"), "preset.partial-homeo.y");
    in.z = string_list(need(body, "z", "preset.partial-homeo"), "preset.partial-homeo.z");
    const Json& phi = need(body, "phi", "preset.partial-homeo");
    if (!phi.is_object()) schema_fail("preset.partial-homeo.phi", "object expected");
    for (auto it = phi.begin(); it != phi.end(); ++it)
      in.phi[it.key()] = it.value().get<std::string>();
    return from_partial_homeo(in);
  }
  schema_fail("preset", "unknown preset kind '" + kind + "'");
}

}  // namespace

System parse_system(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("document: ") + e.what());
  }
  if (!doc.is_object()) schema_fail("document", "object expected");

  System sys = [&] {
    if (doc.contains("preset")) return parse_preset(doc.at("preset"));

    const std::string backend = need(doc, "backend", "document").get<std::string>();
    std::vector<std::string> labels =
        string_list(need(doc, "labels", "document"), "labels");
    const Json& actions = need(doc, "actions", "document");
    if (!actions.is_object()) schema_fail("actions", "object expected");
    for (const auto& l : labels)
      if (!actions.contains(l)) schema_fail("actions", "no action for label '" + l + "'");
    if (actions.size() != labels.size())
      schema_fail("actions", "action for an undeclared label present");

    if (backend == "finite") {
      Algebra alg = Algebra::finite_atoms(
          string_list(need(doc, "atoms", "document"), "atoms"));
      std::vector<ActionSpec> specs;
      for (const auto& l : labels) {
        const Json& a = actions.at(l);
        if (!a.is_object()) schema_fail("actions." + l, "atom-to-set map expected");
        std::vector<BoolElem> images(alg.atom_count(), alg.empty_elem());
        for (auto it = a.begin(); it != a.end(); ++it) {
          int idx = alg.atom_index(it.key());
          if (idx < 0) schema_fail("actions." + l, "unknown atom '" + it.key() + "'");
          try {
            images[idx] = alg.of_atom_names(string_list(it.value(), "actions." + l));
          } catch (const BackendMismatch& e) {
            schema_fail("actions." + l + "." + it.key(), e.what());
          }
        }
        specs.push_back(ActionSpec::finite(std::move(images)));
      }
      return make_system(std::move(alg), std::move(labels), std::move(specs));
    }
    if (backend == "cofinite") {
      const Json& window = need(doc, "window", "document");
      std::string uni = need(window, "universe", "window").get<std::string>();
      if (uni != "N" && uni != "Z") schema_fail("window.universe", "'N' or 'Z' expected");
      Algebra alg = Algebra::finite_cofinite(uni == "N" ? Universe::Naturals
                                                        : Universe::Integers);
      std::vector<ActionSpec> specs;
      for (const auto& l : labels) {
        const Json& a = actions.at(l);
        const Json& tail = need(a, "tail", "actions." + l);
        ActionSpec spec;
        if (tail.is_string() && tail.get<std::string>() == "kill") {
          spec = ActionSpec::kill_tail();
        } else if (tail.is_object() && tail.contains("shift")) {
          spec = ActionSpec::shift_tail(tail.at("shift").get<std::int64_t>());
        } else {
          schema_fail("actions." + l + ".tail", "\"kill\" or {\"shift\": t} expected");
        }
        if (a.contains("exceptions")) {
          const Json& exc = a.at("exceptions");
          if (!exc.is_object()) schema_fail("actions." + l + ".exceptions", "object expected");
          for (auto it = exc.begin(); it != exc.end(); ++it) {
            std::int64_t key = 0;
            try {
              key = std::stoll(it.key());
            } catch (...) {
              schema_fail("actions." + l + ".exceptions", "integer key expected");
            }
            spec.exceptions[key] =
                parse_cof_elem(it.value(), "actions." + l + ".exceptions." + it.key());
          }
        }
        specs.push_back(std::move(spec));
      }
      return make_system(std::move(alg), std::move(labels), std::move(specs));
    }
    schema_fail("backend", "'finite' or 'cofinite' expected");
  }();

  ValidationReport rep = validate_system(sys);
  if (!rep.ok()) throw ValidationError("system fails validation: " + rep.summary(), rep);
  return sys;
}

namespace {

Json cof_elem_json(const BoolElem& e) {
  Json arr = Json::array();
  for (auto i : e.exceptions()) arr.push_back(i);
  Json out = Json::object();
  out[e.repr() == BoolElem::Repr::Cofinite ? "cofinite" : "finite"] = arr;
  return out;
}

}  // namespace

Json serialize_system(const System& sys) {
  const Algebra& alg = sys.algebra;
  Json doc = Json::object();
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    doc["backend"] = "finite";
    doc["atoms"] = alg.atom_names();
    doc["labels"] = sys.labels;
    Json actions = Json::object();
    for (std::size_t l = 0; l < sys.labels.size(); ++l) {
      Json a = Json::object();
      for (std::size_t i = 0; i < alg.atom_count(); ++i) {
        Json targets = Json::array();
        for (auto b : alg.atoms_under(sys.actions[l].atom_images[i]))
          targets.push_back(alg.atom_names()[b]);
        a[alg.atom_names()[i]] = targets;
      }
      actions[sys.labels[l]] = a;
    }
    doc["actions"] = actions;
    return doc;
  }
  doc["backend"] = "cofinite";
  doc["window"] = Json{{"universe", alg.universe() == Universe::Naturals ? "N" : "Z"}};
  doc["labels"] = sys.labels;
  Json actions = Json::object();
  for (std::size_t l = 0; l < sys.labels.size(); ++l) {
    const ActionSpec& spec = sys.actions[l];
    Json a = Json::object();
    Json exc = Json::object();
    for (const auto& [i, img] : spec.exceptions)
      exc[std::to_string(i)] = cof_elem_json(img);
    a["exceptions"] = exc;
    if (spec.tail == ActionSpec::Tail::Shift)
      a["tail"] = Json{{"shift", spec.shift}};
    else
      a["tail"] = "kill";
    actions[sys.labels[l]] = a;
  }
  doc["actions"] = actions;
  return doc;
}

std::string system_digest(const System& sys) {
  std::string bytes = serialize_system(sys).dump();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

BoolElem parse_elem_text(const System& sys, const std::string& text) {
  const Algebra& alg = sys.algebra;
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t == "top") return alg.top();
  bool cof = false;
  if (!t.empty() && t[0] == '~') {
    cof = true;
    t = t.substr(1);
  }
  if (t.size() >= 2 && t.front() == '{' && t.back() == '}') t = t.substr(1, t.size() - 2);
  std::vector<std::string> parts;
  std::string cur;
  for (char c : t) {
    if (c == ',') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  if (alg.kind() == Algebra::Kind::FiniteAtoms) {
    if (cof) throw SchemaError("element: '~' needs the cofinite backend");
    return alg.of_atom_names(parts);
  }
  std::vector<std::int64_t> idx;
  for (const auto& p : parts) {
    try {
      idx.push_back(std::stoll(p));
    } catch (...) {
      throw SchemaError("element: integer index expected, got '" + p + "'");
    }
  }
  return cof ? alg.cofinite_set(std::move(idx)) : alg.finite_set(std::move(idx));
}

Json Report::to_json() const {
  Json j = Json::object();
  j["command"] = command;
  j["digest"] = digest;
  j["result"] = result;
  Json d = Json::array();
  for (const auto& s : diagnostics) d.push_back(s);
  j["diagnostics"] = d;
  return j;
}

std::string Report::to_text() const {
  std::string out;
  out += "command   " + command + "\n";
  out += "digest    " + digest + "\n";
  out += "result    " + result.dump(2) + "\n";
  for (const auto& d : diagnostics) out += "note      " + d + "\n";
  return out;
}

const std::vector<std::string>& command_list() {
  static const std::vector<std::string> cmds = {
      "validate",   "spectrum",  "graph",          "classify",
      "regular",    "ideals",    "cycles",         "simplicity",
      "cofinal",    "ktheory",   "quotient",       "semigroup-eval",
      "cover-check", "boundary-paths"};
  return cmds;
}

namespace {

Json word_json(const System& sys, const Word& w) {
  Json arr = Json::array();
  for (auto l : w) arr.push_back(sys.labels.at(l));
  return arr;
}

Json kgroups_json(const KGroups& k) {
  auto part = [](const KGroups::Part& p) {
    Json torsion = Json::array();
    for (auto d : p.torsion) torsion.push_back(d);
    return Json{{"rank", p.rank}, {"torsion", torsion}};
  };
  return Json{{"k0", part(k.k0)}, {"k1", part(k.k1)}};
}

Json cycle_json(const System& sys, const CycleWitness& w) {
  Json trace = Json::array();
  for (const auto& e : w.trace) trace.push_back(sys.algebra.format(e));
  return Json{{"word", word_json(sys, w.word)},
              {"base", sys.algebra.format(w.base)},
              {"trace", trace}};
}

}  // namespace

Report run(const std::string& command, const System& sys, const RunFlags& flags) {
  Report rep;
  rep.command = command;
  rep.digest = system_digest(sys);
  const Algebra& alg = sys.algebra;

  if (command == "validate") {
    ValidationReport v = validate_system(sys);
    Json viol = Json::array();
    for (const auto& x : v.violations)
      viol.push_back(Json{{"rule", x.rule}, {"detail", x.detail}});
    rep.result = Json{{"valid", v.ok()}, {"violations", viol}};
    return rep;
  }
  if (command == "spectrum") {
    Json pts = Json::array();
    for (const auto& xi : alg.ultrafilters(flags.spectrum_limit))
      pts.push_back(alg.format(xi));
    rep.result = Json{{"points", pts},
                      {"includes_infinity", alg.has_infinity_point()},
                      {"principal_limit_applied",
                       alg.kind() == Algebra::Kind::FiniteCofinite}};
    return rep;
  }
  if (command == "graph") {
    TopoGraph g = build_graph(sys);
    Json verts = Json::array();
    for (const auto& n : g.vertex_names) verts.push_back(n);
    Json edges = Json::array();
    for (const auto& e : g.edges)
      edges.push_back(Json{{"label", g.labels.at(e.label)},
                           {"d", g.vertex_names.at(e.src)},
                           {"r", g.vertex_names.at(e.dst)}});
    rep.result = Json{{"vertices", verts}, {"edges", edges}};
    return rep;
  }
  if (command == "classify") {
    TopoGraph g = build_graph(sys);
    auto classes = classify_vertices(sys, g);
    Json arr = Json::array();
    for (std::size_t v = 0; v < g.vertices.size(); ++v)
      arr.push_back(Json{{"vertex", g.vertex_names[v]},
                         {"class", vertex_class_name(classes[v])}});
    rep.result = Json{{"vertices", arr}};
    return rep;
  }
  if (command == "regular") {
    RegularReport r = regular_atoms(sys);
    Json arr = Json::array();
    for (const auto& a : r.atoms)
      arr.push_back(Json{{"atom", a.name}, {"lambda", a.lambda}, {"regular", a.regular}});
    rep.result = Json{{"atoms", arr}};
    if (r.has_tail)
      rep.result["tail"] = Json{{"lambda", r.tail_lambda}, {"regular", r.tail_regular}};
    return rep;
  }
  if (command == "ideals") {
    try {
      HSLattice lat = enumerate_hs_ideals(sys);
      Json arr = Json::array();
      for (const auto& i : lat.ideals) arr.push_back(format_ideal(alg, i));
      rep.result = Json{{"ideals", arr}, {"possibly_incomplete", lat.possibly_incomplete}};
      if (lat.possibly_incomplete) rep.exit_code = 2;
    } catch (const UnsupportedEnumeration& e) {
      rep.result = Json{{"unsupported", e.what()}};
      rep.exit_code = 2;
    }
    return rep;
  }
  if (command == "cycles") {
    try {
      auto w = find_cycle_no_exit(sys);
      rep.result = Json{{"condition_LB", !w.has_value()}};
      rep.result["witness"] = w ? cycle_json(sys, *w) : Json(nullptr);
    } catch (const SearchBoundExceeded& e) {
      rep.result = Json{{"inconclusive", e.what()}};
      rep.exit_code = 2;
    }
    return rep;
  }
  if (command == "simplicity") {
    try {
      SimplicityReport s = is_simple(sys);
      rep.result = Json{{"simple", s.simple},
                        {"condition_LB", s.lb},
                        {"hs_trivial", s.hs_trivial}};
      if (s.cycle) rep.result["witness"] = cycle_json(sys, *s.cycle);
      if (s.ideal) rep.result["witness"] = format_ideal(alg, *s.ideal);
    } catch (const UnsupportedEnumeration& e) {
      rep.result = Json{{"unsupported", e.what()}};
      rep.exit_code = 2;
    } catch (const SearchBoundExceeded& e) {
      rep.result = Json{{"inconclusive", e.what()}};
      rep.exit_code = 2;
    }
    return rep;
  }
  if (command == "cofinal") {
    try {
      rep.result = Json{{"cofinal", is_cofinal(sys)}};
      if (!flags.elem_a.empty() && !flags.elem_b.empty()) {
        Condition2Result c = check_condition2(sys, parse_elem_text(sys, flags.elem_a),
                                              parse_elem_text(sys, flags.elem_b),
                                              flags.depth);
        switch (c.status) {
          case Condition2Result::Status::Verified:
            rep.result["condition2"] =
                Json{{"status", "verified"}, {"c", alg.format(c.witness_c)}};
            break;
          case Condition2Result::Status::Counterexample:
            rep.result["condition2"] = Json{{"status", "counterexample"},
                                            {"word", word_json(sys, c.word)}};
            break;
          case Condition2Result::Status::Inconclusive:
            rep.result["condition2"] = Json{{"status", "inconclusive"}};
            rep.exit_code = 2;
            break;
        }
      }
    } catch (const UnsupportedEnumeration& e) {
      rep.result = Json{{"unsupported", e.what()}};
      rep.exit_code = 2;
    }
    return rep;
  }
  if (command == "ktheory") {
    try {
      rep.result = kgroups_json(k_groups(sys));
    } catch (const UnsupportedBackend& e) {
      rep.result = Json{{"unsupported", e.what()}};
      rep.exit_code = 2;
    }
    return rep;
  }
  if (command == "quotient") {
    if (flags.ideal_seed.empty()) {
      rep.result = Json{{"error", "--ideal <element> required"}};
      rep.exit_code = 1;
      return rep;
    }
    BoolElem seed = parse_elem_text(sys, flags.ideal_seed);
    ClosureResult c = hs_closure(sys, seed);
    if (!c.complete) {
      rep.result = Json{{"inconclusive", "hs closure bound exceeded"},
                        {"partial", format_ideal(alg, c.ideal)}};
      rep.exit_code = 2;
      return rep;
    }
    QuotientSystem q = quotient_system(sys, c.ideal);
    rep.result = Json{{"ideal", format_ideal(alg, c.ideal)},
                      {"system", serialize_system(q.system)},
                      {"digest", system_digest(q.system)}};
    return rep;
  }
  if (command == "semigroup-eval") {
    try {
      SemiElem e = parse_semi_expr(sys, flags.expr);
      rep.result = Json{{"element", format_elem(sys, e)}};
    } catch (const ExprError& e) {
      rep.result = Json{{"error", e.what()}, {"column", e.column}};
      rep.exit_code = 1;
    }
    return rep;
  }
  if (command == "cover-check") {
    try {
      SemiElem x = parse_semi_expr(sys, flags.expr_x);
      std::vector<SemiElem> z;
      for (const auto& t : flags.expr_z) z.push_back(parse_semi_expr(sys, t));
      RefineOutcome out = refine_cover(sys, x, z);
      switch (out.kind) {
        case RefineOutcome::Kind::Cover: {
          Json arr = Json::array();
          for (const auto& e : out.cover) arr.push_back(format_elem(sys, e));
          rep.result = Json{{"outcome", "cover"}, {"refinement", arr}};
          break;
        }
        case RefineOutcome::Kind::NotACover:
          rep.result = Json{{"outcome", "not-a-cover"},
                            {"witness", format_elem(sys, out.witness)}};
          break;
        case RefineOutcome::Kind::Inconclusive:
          rep.result = Json{{"outcome", "inconclusive"}, {"bound", out.bound_used}};
          rep.exit_code = 2;
          break;
      }
    } catch (const ExprError& e) {
      rep.result = Json{{"error", e.what()}, {"column", e.column}};
      rep.exit_code = 1;
    }
    return rep;
  }
  if (command == "boundary-paths") {
    BoundaryPathResult r = boundary_paths(sys, flags.cap);
    if (r.infinite) {
      rep.result = Json{{"infinite_path_space", true}};
      return rep;
    }
    Json arr = Json::array();
    TopoGraph g = build_graph(sys);
    for (const auto& p : r.paths) {
      if (p.kind == BoundaryPath::Kind::Finite)
        arr.push_back(Json{{"kind", "finite"},
                           {"word", word_json(sys, p.prefix)},
                           {"terminal", g.vertex_names.at(p.terminal)}});
      else
        arr.push_back(Json{{"kind", "eventually-periodic"},
                           {"prefix", word_json(sys, p.prefix)},
                           {"period", word_json(sys, p.period)},
                           {"anchor", g.vertex_names.at(p.anchor)}});
    }
    rep.result = Json{{"infinite_path_space", false}, {"paths", arr}};
    return rep;
  }
  rep.result = Json{{"error", "unknown command '" + command + "'"}};
  rep.exit_code = 1;
  return rep;
}

}  // namespace bds
