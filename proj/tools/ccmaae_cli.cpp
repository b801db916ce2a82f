#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ccmaae/experiment.hpp"
#include "ccmaae/rng.hpp"

// Experiment runner. Subcommands: train | eval | sample | traverse | project.
// Exit codes: 0 success, 1 runtime failure, 2 configuration/usage error.

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::string task;
  std::uint64_t master_seed = 0;
  bool have_seed = false;
  int kappa = 0;
  ccmaae::Index latent_dim = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Path to a JSON config file");
  cmd->add_option("--out", f.out_dir, "Output directory (default: .)");
  cmd->add_option("--seed", f.master_seed,
                  "Master seed; derives all named seeds, overriding the config file")
      ->each([&](const std::string&) { f.have_seed = true; });
  cmd->add_option("--kappa", f.kappa, "Curvature sign, +1 or -1")
      ->check(CLI::IsMember({1, -1}));
  cmd->add_option("--latent-dim", f.latent_dim, "Manifold dimension d");
  cmd->add_option("--task", f.task, "Dataset task")->check(CLI::IsMember({"mnist", "synthetic"}));
}

// File values first, then flag overrides.
ccmaae::ExperimentConfig merge_config(const CommonFlags& f) {
  ccmaae::ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = ccmaae::load_config(f.config_path);
  if (!f.task.empty()) cfg.task = f.task;
  if (f.kappa != 0) cfg.kappa = f.kappa;
  if (f.latent_dim != 0) cfg.latent_dim = f.latent_dim;
  if (f.have_seed) {
    cfg.seeds.split = ccmaae::mix_seed(f.master_seed, 1);
    cfg.seeds.init = ccmaae::mix_seed(f.master_seed, 2);
    cfg.seeds.shuffle = ccmaae::mix_seed(f.master_seed, 3);
    cfg.seeds.binarise = ccmaae::mix_seed(f.master_seed, 4);
    cfg.seeds.prior = ccmaae::mix_seed(f.master_seed, 5);
    cfg.seeds.labels = ccmaae::mix_seed(f.master_seed, 6);
  }
  ccmaae::resolve_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CCM adversarial autoencoder experiment runner"};
  app.require_subcommand(1);

  CommonFlags train_f, eval_f, sample_f, traverse_f, project_f;
  std::string checkpoint;
  ccmaae::Index sample_n = 64;
  ccmaae::Index n_steps = 64;
  std::string mode = "equator";
  std::string chart = "aitoff";

  CLI::App* train_cmd = app.add_subcommand("train", "Train a CCM-AAE and write a checkpoint");
  add_common(train_cmd, train_f);

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Semi-supervised K-NN accuracy of a trained checkpoint");
  add_common(eval_cmd, eval_f);
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();

  CLI::App* sample_cmd = app.add_subcommand("sample", "Decode prior samples from a checkpoint");
  add_common(sample_cmd, sample_f);
  sample_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  sample_cmd->add_option("--n", sample_n, "Number of samples (default 64)");

  CLI::App* traverse_cmd =
      app.add_subcommand("traverse", "Decode a latent traversal (equator or geodesic)");
  add_common(traverse_cmd, traverse_f);
  traverse_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  traverse_cmd->add_option("--mode", mode, "equator | geodesic")
      ->check(CLI::IsMember({"equator", "geodesic"}));
  traverse_cmd->add_option("--steps", n_steps, "Number of traversal steps (default 64)");

  CLI::App* project_cmd =
      app.add_subcommand("project", "Export a 2-D chart (poincare or aitoff) of test embeddings");
  add_common(project_cmd, project_f);
  project_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  project_cmd->add_option("--chart", chart, "poincare | aitoff")
      ->check(CLI::IsMember({"poincare", "aitoff"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // any parse failure is a usage error
  }

  try {
    if (train_cmd->parsed()) {
      ccmaae::cmd_train(merge_config(train_f), train_f.out_dir);
    } else if (eval_cmd->parsed()) {
      ccmaae::cmd_eval(checkpoint, merge_config(eval_f), eval_f.out_dir);
    } else if (sample_cmd->parsed()) {
      ccmaae::cmd_sample(checkpoint, merge_config(sample_f), sample_n, sample_f.out_dir);
    } else if (traverse_cmd->parsed()) {
      ccmaae::cmd_traverse(checkpoint, merge_config(traverse_f), mode, n_steps,
                           traverse_f.out_dir);
    } else if (project_cmd->parsed()) {
      ccmaae::cmd_project(checkpoint, merge_config(project_f), chart, project_f.out_dir);
    }
  } catch (const ccmaae::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
