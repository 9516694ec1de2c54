#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fractool/commands.hpp"

int main(int argc, char** argv) {
  using namespace fractool;
  CLI::App app{"fractool - fractal curve systems with multiple generators"};
  app.require_subcommand(1);
  cli::Streams io{std::cout, std::cerr};
  int status = cli::kOk;

  std::string path;
  double tolerance = kDefaultClosureTolerance;
  auto* validate = app.add_subcommand("validate", "parse and validate a .fcs document");
  validate->add_option("file", path, "input document")->required();
  validate->add_option("--tolerance", tolerance, "closure tolerance (relative)")->check(CLI::PositiveNumber);
  validate->callback([&] { status = cli::cmd_validate(path, tolerance, io); });

  bool json = false;
  std::uint64_t census_kmax = 3;
  auto* analyze = app.add_subcommand("analyze", "substitution matrix, PF data and similarity dimension");
  analyze->add_option("file", path, "input document")->required();
  analyze->add_flag("--json", json, "emit the analysis document as JSON");
  analyze->add_option("--census", census_kmax, "include the segment census for k = 0..K");
  analyze->callback([&] { status = cli::cmd_analyze(path, json, census_kmax, io); });

  cli::RenderRequest render_req;
  std::optional<std::uint64_t> max_segments;
  auto* render = app.add_subcommand("render", "write iteration k as SVG");
  render->add_option("file", path, "input document")->required();
  render->add_option("--iterations,-k", render_req.iterations, "iteration count")->required();
  render->add_option("--out,-o", render_req.out_path, "output SVG file")->required();
  render->add_flag("--orientation", render_req.style.show_orientation, "draw orientation markers");
  render->add_option("--max-segments", max_segments, "segment cap (overrides FRACTOOL_MAX_SEGMENTS)");
  render->add_option("--stroke-width", render_req.style.stroke_width, "stroke width as a fraction of the diagonal")
      ->check(CLI::PositiveNumber);
  render->add_option("--margin", render_req.style.margin, "margin as a fraction of the bounding box")
      ->check(CLI::NonNegativeNumber);
  render->callback([&] {
    render_req.max_segments = max_segments;
    status = cli::cmd_render(path, render_req, io);
  });

  cli::RenderRequest csv_req;
  csv_req.csv = true;
  auto* csv = app.add_subcommand("csv", "write iteration k as CSV segment rows");
  csv->add_option("file", path, "input document")->required();
  csv->add_option("--iterations,-k", csv_req.iterations, "iteration count")->required();
  csv->add_option("--out,-o", csv_req.out_path, "output CSV file")->required();
  csv->add_option("--max-segments", max_segments, "segment cap (overrides FRACTOOL_MAX_SEGMENTS)");
  csv->callback([&] {
    csv_req.max_segments = max_segments;
    status = cli::cmd_render(path, csv_req, io);
  });

  std::uint64_t kmax = 20;
  auto* freq = app.add_subcommand("freq", "convergence of segment frequencies towards the PF eigenvector");
  freq->add_option("file", path, "input document")->required();
  freq->add_option("--kmax", kmax, "last iteration")->check(CLI::PositiveNumber);
  freq->callback([&] { status = cli::cmd_freq(path, kmax, io); });

  std::uint64_t box_iterations = 8;
  int scales = 6;
  auto* boxdim = app.add_subcommand("boxdim", "box-counting estimate of the curve's dimension");
  boxdim->add_option("file", path, "input document")->required();
  boxdim->add_option("--iterations,-k", box_iterations, "iteration count");
  boxdim->add_option("--scales", scales, "number of dyadic box sizes (>= 4)");
  boxdim->callback([&] { status = cli::cmd_boxdim(path, box_iterations, scales, io); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kIoError;
  }
  return status;
}
