#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mfns/driver.hpp"
#include "mfns/errors.hpp"
#include "mfns/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string output_dir;
  int threads = 0;  // 0: keep the config's value
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Path to the JSON run configuration")
      ->required();
  cmd->add_option("--output", args.output_dir, "Output directory (overrides the config)");
  cmd->add_option("--threads", args.threads, "Worker threads for study member runs");
}

int dispatch(const std::string& name, const CommonArgs& args, bool assert_mode) {
  mfns::RunConfig config = mfns::parse_config_file(args.config_path);
  if (!args.output_dir.empty()) config.output_dir = args.output_dir;
  if (args.threads > 0) config.threads = args.threads;
  if (config.homog) config.homog->assert_mode = assert_mode;

  const std::filesystem::path outdir = config.output_dir;
  if (name == "ns") return mfns::driver::run_ns(config, outdir, std::cout);
  if (name == "mf") return mfns::driver::run_mf(config, outdir, std::cout);
  if (name == "homog") return mfns::driver::run_homog(config, outdir, std::cout);
  return mfns::driver::run_equiv(config, outdir, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mfns: 1D compressible Navier-Stokes with density-dependent viscosity, "
      "one-velocity multifluid relaxation system, and homogenization studies"};
  app.set_version_flag("--version", std::string(mfns::kVersion));
  app.require_subcommand(1);

  CommonArgs ns_args, mf_args, homog_args, equiv_args;
  add_common(app.add_subcommand("ns", "Run the fine-scale solver"), ns_args);
  add_common(app.add_subcommand("mf", "Run the multifluid solver"), mf_args);
  CLI::App* homog = app.add_subcommand("homog", "Run a homogenization convergence study");
  add_common(homog, homog_args);
  bool report_only = false;
  homog->add_flag("--report-only,!--assert", report_only,
                  "Report errors without asserting monotone decrease");
  add_common(app.add_subcommand("equiv", "Check the WKB/Young-measure equivalence"),
             equiv_args);

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  const CommonArgs& args = name == "ns"      ? ns_args
                           : name == "mf"    ? mf_args
                           : name == "homog" ? homog_args
                                             : equiv_args;
  try {
    return dispatch(name, args, !report_only);
  } catch (const mfns::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return mfns::driver::kExitConfig;
  } catch (const mfns::SolverError& err) {
    std::cerr << "solver error: " << err.what() << "\n";
    return mfns::driver::kExitSolver;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return mfns::driver::kExitConfig;
  }
}
