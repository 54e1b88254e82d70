#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bds/io.hpp"
#include "bds/topograph.hpp"

namespace {

std::string read_document(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact invariants of Boolean dynamical systems"};
  app.require_subcommand(1);

  std::string doc_path;
  bds::RunFlags flags;
  std::string command;

  for (const auto& name : bds::command_list()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("document", doc_path, "system document (JSON), '-' for stdin")
        ->required();
    sub->add_flag("--json", flags.json, "machine-readable report");
    if (name == "graph") sub->add_flag("--dot", flags.dot, "emit DOT text");
    if (name == "quotient")
      sub->add_option("--ideal", flags.ideal_seed,
                      "seed element; its hs-closure is divided out")
          ->required();
    if (name == "semigroup-eval")
      sub->add_option("expr", flags.expr, "semigroup expression")->required();
    if (name == "cover-check") {
      sub->add_option("--x", flags.expr_x, "idempotent to cover")->required();
      sub->add_option("--z", flags.expr_z, "cover member (repeatable)")->required();
    }
    if (name == "cofinal") {
      sub->add_option("--check-a", flags.elem_a, "condition-2 probe: element A");
      sub->add_option("--check-b", flags.elem_b, "condition-2 probe: element B");
      sub->add_option("--depth", flags.depth, "condition-2 search depth");
    }
    if (name == "boundary-paths")
      sub->add_option("--cap", flags.cap, "maximum number of paths listed");
    if (name == "spectrum")
      sub->add_option("--limit", flags.spectrum_limit,
                      "principal ultrafilters listed on the cofinite backend");
    sub->callback([&command, name] { command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    bds::System sys = bds::parse_system(read_document(doc_path));
    if (command == "graph" && flags.dot) {
      std::cout << bds::to_dot(sys);
      return 0;
    }
    bds::Report rep = bds::run(command, sys, flags);
    if (flags.json)
      std::cout << rep.to_json().dump(2) << "\n";
    else
      std::cout << rep.to_text();
    return rep.exit_code;
  } catch (const bds::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 1;
  } catch (const bds::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
