#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/experiment.hpp"
#include "wiretap/version.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::uint64_t seed = 0;
  long long samples = 0;
  double rtol = 0.0;
  double budget = 0.0;
  std::string out;
  std::string format = "csv";
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* config = cmd->add_option("--config", args.config, "experiment config file");
  if (config_required) config->required();
  cmd->add_option("--seed", args.seed, "sampling seed override");
  cmd->add_option("--samples", args.samples, "Monte Carlo draw count override");
  cmd->add_option("--rtol", args.rtol, "budget residual tolerance override");
  cmd->add_option("--budget", args.budget, "average power budget override");
  cmd->add_option("--out", args.out, "output file (default: stdout)");
  cmd->add_option("--format", args.format, "output format")
      ->check(CLI::IsMember({"csv"}));
  cmd->add_option("--workers", args.workers, "worker threads for sweep points");
}

wiretap::ExperimentConfig resolve(const CLI::App* cmd, const CommonArgs& args) {
  wiretap::ExperimentConfig config;
  if (!args.config.empty()) config = wiretap::load_experiment_config(args.config);
  if (cmd->count("--seed") > 0) config.seed = args.seed;
  if (cmd->count("--samples") > 0) config.mc_samples = args.samples;
  if (cmd->count("--rtol") > 0) config.rtol = args.rtol;
  if (cmd->count("--budget") > 0) config.budget = args.budget;
  if (cmd->count("--out") > 0) config.out = args.out;
  if (cmd->count("--workers") > 0) config.workers = args.workers;
  return config;
}

std::string sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

int cmd_sweep(const CLI::App* cmd, const CommonArgs& args) {
  const wiretap::ExperimentConfig config = resolve(cmd, args);
  const std::vector<wiretap::CurveRow> rows = wiretap::run_capacity_sweep(config);
  if (config.out.empty()) {
    std::fputs(wiretap::curve_csv(rows).c_str(), stdout);
  } else {
    std::printf("wrote %zu rows to %s\n", rows.size(), config.out.c_str());
  }
  return 0;
}

int cmd_surface(const CLI::App* cmd, const CommonArgs& args) {
  const wiretap::ExperimentConfig config = resolve(cmd, args);
  const std::vector<wiretap::SurfaceRow> rows = wiretap::run_allocation_surface(config);
  if (config.out.empty()) {
    std::fputs(wiretap::surface_csv(rows).c_str(), stdout);
  } else {
    std::printf("wrote %zu rows to %s\n", rows.size(), config.out.c_str());
  }
  return 0;
}

int cmd_allocate(const CLI::App* cmd, const CommonArgs& args) {
  const wiretap::ExperimentConfig config = resolve(cmd, args);
  const wiretap::AllocationReport report = wiretap::run_allocation_table(config);
  if (report.no_secrecy) {
    std::printf("no-secrecy: the transmission set has zero mass; allocation is all zero\n");
  } else {
    std::printf("lambda = %s\n", sig(report.lambda.lambda).c_str());
    std::printf("avg_power = %s (residual %s, %d iterations)\n",
                sig(report.lambda.achieved_avg_power).c_str(),
                sig(report.lambda.residual).c_str(), report.lambda.iterations);
    std::printf("rate_bits_per_use = %s (error bound %s)\n", sig(report.rate.rate).c_str(),
                sig(report.rate.error).c_str());
  }
  if (config.out.empty()) {
    std::printf("\n%s", wiretap::allocation_csv(report.rows).c_str());
  } else {
    std::printf("wrote %zu rows to %s\n", report.rows.size(), config.out.c_str());
  }
  return 0;
}

struct DmcArgs {
  std::string path;
  std::string mode = "parallel";
  int u_card = 0;
  int grid = 16;
  double tol = 1e-9;
  std::string out;
};

const char* tag_name(wiretap::DegradedTag tag) {
  switch (tag) {
    case wiretap::DegradedTag::kForward:
      return "forward-degraded";
    case wiretap::DegradedTag::kReverse:
      return "reverse-degraded";
    default:
      return "general";
  }
}

int cmd_dmc(const DmcArgs& args) {
  const std::vector<wiretap::DmcWiretap> channels = wiretap::parse_dmc_channels(args.path);
  wiretap::DmcAnalysisOptions options;
  options.mode = args.mode;
  options.u_card = args.u_card;
  options.grid = args.grid;
  options.tol = args.tol;
  const wiretap::DmcAnalysis analysis = wiretap::run_dmc_analysis(channels, options);

  std::string text;
  for (std::size_t i = 0; i < analysis.subreports.size(); ++i) {
    const wiretap::DmcSubreport& sub = analysis.subreports[i];
    text += "channel " + std::to_string(i + 1) + ": " + tag_name(sub.tag) +
            " (residual forward " + sig(sub.forward_residual) + ", reverse " +
            sig(sub.reverse_residual) + ")\n";
    if (sub.tag == wiretap::DegradedTag::kReverse && args.mode == "parallel") {
      text += "  secrecy capacity = 0 (eavesdropper at least as strong everywhere)\n";
      continue;
    }
    text += std::string("  ") + (sub.is_lower_bound ? "secrecy capacity lower bound = "
                                                    : "secrecy capacity = ") +
            sig(sub.value) + " bits/use\n";
    if (sub.input.pux.size() > 0) {
      text += "  argmax p(x) = [";
      const Eigen::VectorXd px = sub.input.px();
      for (Eigen::Index x = 0; x < px.size(); ++x) {
        text += (x > 0 ? ", " : "") + sig(px[x]);
      }
      text += "]\n";
    }
  }
  text += std::string("total ") +
          (analysis.total_is_lower_bound ? "secrecy capacity lower bound = "
                                         : "secrecy capacity = ") +
          sig(analysis.total) + " bits/use\n";

  if (args.out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::FILE* f = std::fopen(args.out.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + args.out);
    std::fputs(text.c_str(), f);
    std::fclose(f);
    std::printf("wrote report to %s\n", args.out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secrecy-capacity toolkit for fading and discrete wiretap channels"};
  app.set_version_flag("--version", wiretap::kVersion);
  app.require_subcommand(1);

  CommonArgs sweep_args, surface_args, allocate_args;
  DmcArgs dmc_args;

  CLI::App* sweep = app.add_subcommand("sweep", "ergodic secrecy-rate curves versus SNR");
  add_common(sweep, sweep_args, true);

  CLI::App* surface =
      app.add_subcommand("surface", "optimal power allocation over a (g1, g2) grid");
  add_common(surface, surface_args, false);

  CLI::App* allocate =
      app.add_subcommand("allocate", "budget multiplier and per-state allocation table");
  add_common(allocate, allocate_args, false);

  CLI::App* dmc =
      app.add_subcommand("dmc", "discrete wiretap channel analysis from matrix files");
  dmc->add_option("matrices", dmc_args.path, "file of paired (legitimate, eavesdropper) matrices")
      ->required();
  dmc->add_option("--mode", dmc_args.mode, "degraded | general | parallel")
      ->check(CLI::IsMember({"degraded", "general", "parallel"}));
  dmc->add_option("--u-card", dmc_args.u_card,
                  "auxiliary alphabet size for the general scanner (0: input size)");
  dmc->add_option("--grid", dmc_args.grid, "general-scanner simplex resolution");
  dmc->add_option("--tol", dmc_args.tol, "degradedness residual tolerance");
  dmc->add_option("--out", dmc_args.out, "report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sweep->parsed()) return cmd_sweep(sweep, sweep_args);
    if (surface->parsed()) return cmd_surface(surface, surface_args);
    if (allocate->parsed()) return cmd_allocate(allocate, allocate_args);
    return cmd_dmc(dmc_args);
  } catch (const wiretap::ConvergenceFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
