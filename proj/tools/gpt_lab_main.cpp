// Command-line front end. Parsing only; the command layer does the work.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gptlab/cli.hpp"

namespace {

int dispatch(int argc, char** argv) {
  CLI::App app{"gpt-lab: exact convex-operational state spaces, composites, and protocols"};
  app.require_subcommand(1);

  gptlab::cli::Options o;
  o.echo.assign(argv, argv + argc);
  auto* scalar_opt = app.add_option("--scalar", o.scalar, "scalar mode: exact rationals or doubles")
                         ->check(CLI::IsMember({"exact", "float"}));
  app.add_option("--eps", o.eps, "floating-mode comparison tolerance");
  app.add_option("--seed", o.seed, "seed for sampled runs");
  app.add_option("--budget", o.budget, "search budget; 0 = command default");
  app.add_option("--out", o.out, "write the artifact here instead of stdout");
  app.add_flag("--timing", o.timing, "embed wall-clock timing (breaks byte determinism)");

  std::string kind, param;
  auto* sp = app.add_subcommand("space", "build a state space and write its JSON file");
  sp->add_option("kind", kind, "classical | polygon | custom-json")->required();
  sp->add_option("param", param, "size n, or a JSON file for custom-json")->required();

  std::string ta, tb, tkind;
  auto* tn = app.add_subcommand("tensor", "compose two spaces and write the composite file");
  tn->add_option("a", ta)->required();
  tn->add_option("b", tb)->required();
  tn->add_option("kind", tkind, "min | max")->required();

  std::string d_space;
  std::vector<std::string> d_verts;
  auto* di = app.add_subcommand("distinguish", "can one observable tell these vertices apart?");
  di->add_option("space", d_space)->required();
  di->add_option("vertices", d_verts, "vertex names v0 v1 ...")->required()->expected(-1);

  std::string b_space;
  std::vector<std::string> b_verts;
  auto* br = app.add_subcommand("broadcast", "can some map broadcast these vertices?");
  br->add_option("space", b_space)->required();
  br->add_option("vertices", b_verts, "vertex names v0 v1 ...")->required()->expected(-1);

  std::string n_space, n_map;
  auto* nd = app.add_subcommand("nondisturb", "nondisturbing maps of a space, optionally classifying one");
  nd->add_option("space", n_space)->required();
  nd->add_option("--map", n_map, "JSON file with a matrix to classify");

  std::string c_space, c_n, c_csv;
  int c_runs = 0, c_hiding = 4;
  auto* bc = app.add_subcommand("bitcommit", "bit commitment from a doubly decomposable state");
  bc->add_option("space", c_space)->required();
  bc->add_option("--n", c_n, "binding series range, e.g. 1..10");
  bc->add_option("--runs", c_runs, "sampled honest rounds per bit");
  bc->add_option("--hiding", c_hiding, "check hiding up to this many copies");
  bc->add_option("--csv", c_csv, "write the binding series CSV here instead of stdout");

  std::string t_space, t_group;
  bool t_necessity = false, t_conclusive = false;
  auto* tp = app.add_subcommand("teleport", "build or probe teleportation schemes");
  tp->add_option("space", t_space)->required();
  tp->add_option("--group", t_group, "deterministic scheme from this symmetry group (Z<n> or S<n>)");
  tp->add_flag("--necessity", t_necessity, "exhaustive conclusive-scheme search through a copy of the space");
  tp->add_flag("--conclusive", t_conclusive, "conclusive scheme from a self-duality of the space");

  std::string v_file;
  auto* vf = app.add_subcommand("verify", "re-check every certificate in an emitted artifact");
  vf->add_option("file", v_file)->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? gptlab::cli::kOk : gptlab::cli::kUsage;
  }
  o.scalar_explicit = scalar_opt->count() > 0;

  if (sp->parsed()) return gptlab::cli::cmd_space(o, kind, param);
  if (tn->parsed()) return gptlab::cli::cmd_tensor(o, ta, tb, tkind);
  if (di->parsed()) return gptlab::cli::cmd_distinguish(o, d_space, d_verts);
  if (br->parsed()) return gptlab::cli::cmd_broadcast(o, b_space, b_verts);
  if (nd->parsed()) return gptlab::cli::cmd_nondisturb(o, n_space, n_map);
  if (bc->parsed()) {
    o.csv = c_csv;
    return gptlab::cli::cmd_bitcommit(o, c_space, c_n, c_runs, c_hiding);
  }
  if (tp->parsed()) return gptlab::cli::cmd_teleport(o, t_space, t_group, t_necessity, t_conclusive);
  if (vf->parsed()) return gptlab::cli::cmd_verify(o, v_file);
  return gptlab::cli::kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const gptlab::SearchBudgetExceededError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return gptlab::cli::kBudget;
  } catch (const gptlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gptlab::cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gptlab::cli::kUsage;
  }
}
