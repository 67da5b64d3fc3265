// Synthetic scene rendering and binarized-RMSE scoring.
//
//   bench render --spec scene.txt --out-dir scene/
//   bench eval --pairs-dir pairs/ > report.tsv

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "papertab/bench.hpp"

using namespace papertab;

int main(int argc, char** argv) {
  CLI::App app{"Synthetic desk scenes and RMSE evaluation"};
  app.require_subcommand(1);

  std::string spec_path, out_dir, pairs_dir;
  auto* render = app.add_subcommand("render", "Render a scene spec to PNM files");
  render->add_option("--spec", spec_path, "key = value scene file")->required();
  render->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* eval = app.add_subcommand("eval", "Score <name>_o.pgm / <name>_d.pgm pairs");
  eval->add_option("--pairs-dir", pairs_dir, "Directory of pairs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*render) {
      std::ifstream in(spec_path);
      if (!in) throw Error(ErrorCode::IoError, "cannot open " + spec_path);
      bench::render_to_dir(bench::parse_spec(in), out_dir);
    } else {
      bench::eval_dir(pairs_dir, std::cout);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return e.code() == ErrorCode::IoError ? 3 : 2;
  }
}
