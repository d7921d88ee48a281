#include <CLI11.hpp>
#include <iostream>

#include "config.hpp"
#include "driver.hpp"
#include "errors.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  int ranks = 0;
  std::string backend;
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "parameter file")->required();
  cmd->add_option("--ranks", args.ranks, "override worker count");
  cmd->add_option("--backend", args.backend, "inproc or proc");
  cmd->add_option("--out", args.out, "output directory");
}

sdg::RunConfig load(const CommonArgs& args) {
  sdg::RunConfig cfg = sdg::RunConfig::from_file(args.config_path);
  if (args.ranks > 0) cfg.ranks = args.ranks;
  if (!args.backend.empty()) cfg.backend = sdg::backend_from_string(args.backend);
  if (!args.out.empty()) cfg.out_dir = args.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slidedg: discontinuous Galerkin solver with sliding mesh interfaces"};
  app.require_subcommand(1);

  CommonArgs run_args, conv_args, scale_args, audit_args;
  bool audit_inject = false;

  CLI::App* run = app.add_subcommand("run", "run one case and report error norms");
  add_common(run, run_args);
  CLI::App* conv = app.add_subcommand("converge", "refinement study over degrees");
  add_common(conv, conv_args);
  CLI::App* scale = app.add_subcommand("scale", "PID and efficiency over rank counts");
  add_common(scale, scale_args);
  CLI::App* audit = app.add_subcommand("audit", "instrumented run with communication audit");
  add_common(audit, audit_args);
  audit->add_flag("--inject-collective", audit_inject,
                  "deliberately violate the protocol (the audit must fail)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const sdg::RunConfig cfg = load(run_args);
      const sdg::CaseReport rep = sdg::run_case(cfg);
      std::cout << "t_end " << rep.t_end << "  steps " << rep.n_steps << "  ranks "
                << rep.n_ranks << "\n";
      std::cout << "L2(rho) " << rep.norms.l2[0] << "  Linf(rho) " << rep.norms.linf[0]
                << "\n";
      std::cout << "mass drift " << rep.mass_drift << "  energy drift " << rep.energy_drift
                << "\n";
      std::cout << "wall " << rep.wall << " s  PID " << rep.pid << " s/DOF/stage\n";
      std::cout << "report written to " << cfg.out_dir << "/report.csv\n";
    } else if (conv->parsed()) {
      const sdg::RunConfig cfg = load(conv_args);
      sdg::convergence_study(cfg);
      std::cout << "table written to " << cfg.out_dir << "/convergence.csv\n";
    } else if (scale->parsed()) {
      const sdg::RunConfig cfg = load(scale_args);
      sdg::scaling_study(cfg);
      std::cout << "tables written to " << cfg.out_dir << "/scaling.csv and overhead.csv\n";
    } else if (audit->parsed()) {
      const sdg::RunConfig cfg = load(audit_args);
      const sdg::AuditOutcome outcome = sdg::audit_case(cfg, audit_inject);
      std::cout << "audit " << (outcome.report.passed ? "PASS" : "FAIL") << ", trace at "
                << outcome.trace_path << "\n";
      for (const auto& v : outcome.report.violations) std::cout << "  violation: " << v << "\n";
      if (!outcome.report.passed) return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
