#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "config.h"
#include "errors.h"
#include "pipeline.h"

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale machine unlearning for undersampled MRI reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string workdir = "work";
  bool force = false;
  app.add_option("--config", config_path, "JSON config file (built-in defaults when omitted)");
  app.add_option("--workdir", workdir, "root directory for all outputs")
      ->capture_default_str();
  app.add_flag("--force", force, "overwrite existing outputs");

  CLI::App* gen = app.add_subcommand("gen-data", "generate the four dataset splits");

  CLI::App* train = app.add_subcommand("train", "train the original or oracle model");
  std::string role;
  train->add_option("--role", role, "original (retain+forget) or oracle (retain only)")
      ->required()
      ->check(CLI::IsMember({"original", "oracle"}));

  CLI::App* unlearn = app.add_subcommand("unlearn", "apply an unlearning method to the original model");
  std::string method;
  double retain_fraction = 0.0;
  double budget = 0.0;
  unlearn->add_option("--method", method, "ft, full_ft, ga_l1, nl, ga_l1_ft, or nl_ft")
      ->required();
  CLI::Option* frac_opt =
      unlearn->add_option("--retain-fraction", retain_fraction, "share of the retain split used");
  CLI::Option* budget_opt =
      unlearn->add_option("--budget", budget, "epoch budget as a fraction of training epochs");

  CLI::App* ablate = app.add_subcommand("ablate", "run the method × retain-fraction grid");
  size_t jobs = 1;
  ablate->add_option("--jobs", jobs, "concurrent grid cells")->capture_default_str();

  CLI::App* eval = app.add_subcommand("eval", "evaluate checkpoints on the test and forget splits");
  CLI::App* report = app.add_subcommand("report", "assemble report files from prior stages");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    urec::Config cfg =
        config_path.empty() ? urec::Config{} : urec::load_config(config_path);
    cfg.master_seed = urec::apply_seed_env(cfg.master_seed);
    urec::PipelineOptions opt;
    opt.workdir = workdir;
    opt.force = force;
    opt.jobs = jobs;

    if (gen->parsed()) {
      urec::cmd_gen_data(cfg, opt);
    } else if (train->parsed()) {
      urec::cmd_train(cfg, opt, role);
    } else if (unlearn->parsed()) {
      urec::cmd_unlearn(cfg, opt, urec::method_from_name(method),
                        frac_opt->count() ? std::optional<double>(retain_fraction) : std::nullopt,
                        budget_opt->count() ? std::optional<double>(budget) : std::nullopt);
    } else if (ablate->parsed()) {
      urec::cmd_ablate(cfg, opt);
    } else if (eval->parsed()) {
      urec::cmd_eval(cfg, opt);
    } else if (report->parsed()) {
      urec::cmd_report(cfg, opt);
    }
    return 0;
  } catch (const urec::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const urec::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const urec::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
