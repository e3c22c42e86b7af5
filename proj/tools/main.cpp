#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using stratree::cli::Format;
  stratree::cli::RunConfig config;
  std::string format = "json";
  std::string out_path;
  std::string levels;

  CLI::App app{"Laplacian spectra of balanced symmetric trees"};
  app.require_subcommand(1, 1);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--children", config.children, "children per level, e.g. 3,2,2");
    cmd->add_option("--spec", config.spec_path, "JSON spec file");
    cmd->add_option("--levels", levels, "cycle the children pattern to this many levels (bench: comma list)");
    cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--tol", config.tol, "spectrum comparison / clustering tolerance");
    cmd->add_option("--oracle-cap", config.oracle_cap, "largest dense oracle dimension");
    cmd->add_option("--basis-cap", config.basis_cap, "largest tree for eigenbasis construction");
    cmd->add_option("--jobs", config.jobs, "worker threads for the tridiagonal solves");
    cmd->add_option("--seed", config.seed, "seed for random recombination trials");
    cmd->add_option("--out", out_path, "output path (default stdout)");
  };
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues with multiplicities");
  add_common(spectrum);
  spectrum->add_option("--mtx", config.mtx_path, "also write the Laplacian in Matrix Market format");
  for (const char* name : {"eigvecs", "nodal", "verify", "bench"}) {
    static const std::map<std::string, std::string> help{
        {"eigvecs", "complete eigenbasis with residuals"},
        {"nodal", "sign-graph counts against the Courant-type bounds"},
        {"verify", "compare against the dense oracle and run all checks"},
        {"bench", "time the decomposition against the dense oracle"}};
    add_common(app.add_subcommand(name, help.at(name)));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : stratree::cli::kInputError;
  }
  config.command = app.get_subcommands().front()->get_name();
  config.format = format == "csv" ? Format::csv : Format::json;

  if (!levels.empty()) {
    std::stringstream ss(levels);
    std::string token;
    try {
      while (std::getline(ss, token, ',')) config.levels.push_back(std::stoi(token));
    } catch (const std::exception&) {
      std::cerr << "--levels must be a comma list of integers\n";
      return stratree::cli::kInputError;
    }
  }

  if (out_path.empty()) return stratree::cli::run(config, std::cout, std::cerr);
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot open " << out_path << '\n';
    return stratree::cli::kInputError;
  }
  return stratree::cli::run(config, out, std::cerr);
}
