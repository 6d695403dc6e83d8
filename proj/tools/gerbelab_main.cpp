#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gerbelab/cli/manifest.hpp"

namespace fs = std::filesystem;
using namespace gerbelab;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// bundle name or a path
fs::path resolve_suite(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  const char* env = std::getenv("GERBELAB_MANIFEST_DIR");
  fs::path dir = env && *env ? fs::path(env) : fs::path(GERBELAB_MANIFESTS);
  fs::path p = dir / (arg + ".json");
  if (!fs::exists(p)) throw Error(ErrorCode::InvalidArgument, "no bundled suite named \"" + arg + "\"");
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gerbelab: run manifest-driven gerbe and loop-space checks"};
  app.require_subcommand(1);

  std::string manifest, format = "json";
  std::optional<double> tol, eps;
  std::optional<int> samples, degree;
  bool timings = false;

  for (const std::string& c : cli::commands()) {
    std::string help = c == "suite" ? "run every task of a bundled manifest (name or path)"
                                    : "run the " + c + " tasks of a manifest";
    CLI::App* sub = app.add_subcommand(c, help);
    sub->add_option("manifest", manifest, c == "suite" ? "suite name or manifest path" : "manifest path")->required();
    sub->add_option("--tol", tol, "tolerance for every task");
    sub->add_option("--eps", eps, "finite-difference step");
    sub->add_option("--samples", samples, "sample count N for generated loops");
    sub->add_option("--degree", degree, "polynomial degree bound for hom spaces");
    sub->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "text"}));
    sub->add_flag("--timings", timings, "include per-task wall time (not deterministic)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  cli::Report report;
  try {
    fs::path path = command == "suite" ? resolve_suite(manifest) : fs::path(manifest);
    cli::Manifest m = cli::parse_manifest(read_file(path));
    cli::RunOptions opt;
    opt.tol = tol;
    opt.eps = eps;
    opt.samples = samples;
    opt.degree = degree;
    opt.seed = cli::seed_from_env();
    if (samples && (*samples < 16 || *samples % 2)) throw Error(ErrorCode::InvalidArgument, "--samples must be even and >= 16");
    if (command != "suite") opt.only_command = command;
    report = cli::run(m, opt);
  } catch (const Error& e) {
    std::cerr << "gerbelab: " << e.what() << "\n";
    return 2;
  }
  std::cout << cli::emit_report(report, format == "text" ? cli::Format::Text : cli::Format::Json, timings);
  return report.all_pass() ? 0 : 1;
}
