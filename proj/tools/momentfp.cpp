#include <CLI11.hpp>
#include <iostream>

#include "momentfp/checks.hpp"
#include "momentfp/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Moment relaxations of stochastic optimal control and transport problems"};
  app.require_subcommand(1);

  std::string config;
  mfp::SolveOptions solve_opts;
  std::string output;
  auto* solve = app.add_subcommand("solve", "scale, assemble, solve and export a scenario config");
  solve->add_option("config", config, "JSON scenario config")->required();
  solve->add_option("-o,--output", output, "output directory (overrides output.prefix)");
  solve->add_flag("-q,--quiet", solve_opts.quiet, "suppress warnings");

  mfp::FitOptions fit;
  double epsilon = -1.0;
  auto* fitc = app.add_subcommand("fit-christoffel", "fit a Christoffel polynomial to CSV samples");
  fitc->add_option("csv", fit.csv, "CSV file with a header row")->required();
  fitc->add_option("-c,--columns", fit.columns, "columns to use, in variable order")->required()->delimiter(',');
  fitc->add_option("-d,--degree", fit.degree, "Christoffel degree")->capture_default_str();
  fitc->add_option("-e,--epsilon", epsilon, "regularization (default 1e-8 trace(M)/side)");
  fitc->add_option("-o,--out", fit.out_dir, "output directory")->required();
  fitc->add_option("--grid", fit.grid, "grid points per axis (1-D and 2-D only)")->capture_default_str();

  mfp::CheckCommandOptions check;
  double tol = -1.0;
  auto* checkc = app.add_subcommand("check", "run the built-in oracle suite");
  checkc->add_option("-f,--filter", check.filter, "comma-separated check names or prefixes");
  checkc->add_option("--tol", tol, "solver tolerance");
  bool list = false;
  checkc->add_flag("--list", list, "list check names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*solve) {
    if (!output.empty()) solve_opts.output_prefix = output;
    return mfp::cmd_solve(config, solve_opts, std::cout, std::cerr);
  }
  if (*fitc) {
    if (fitc->count("--epsilon")) fit.epsilon = epsilon;
    return mfp::cmd_fit_christoffel(fit, std::cout, std::cerr);
  }
  if (list) {
    for (const auto& n : mfp::check_names()) std::cout << n << "\n";
    return 0;
  }
  if (checkc->count("--tol")) check.tol = tol;
  return mfp::cmd_check(check, std::cout, std::cerr);
}
