#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ccmaae/aae.hpp"
#include "ccmaae/data.hpp"
#include "ccmaae/types.hpp"

// Experiment configuration and the five CLI commands. A configuration is a
// single JSON file plus flag overrides (flags win); the merged result is
// echoed into the output directory so every run is reproducible from its
// echo. Configuration problems throw ConfigError, which the CLI maps to
// exit code 2; other failures map to exit code 1.

namespace ccmaae {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string task = "synthetic";  // "mnist" or "synthetic"
  int kappa = 1;
  Index latent_dim = 2;

  Index batch_size = 1024;
  double learning_rate = 0.001;
  Index critic_hidden = 64;
  double leaky_alpha = 0.3;
  double l2 = 0.01;
  double sigma_m = 5.0;
  Index max_epochs = 300;
  Index patience = 50;
  bool project_before_decode = false;

  struct Seeds {
    std::uint64_t split = 1;
    std::uint64_t init = 2;
    std::uint64_t shuffle = 3;
    std::uint64_t binarise = 4;
    std::uint64_t prior = 5;
    std::uint64_t labels = 6;
  } seeds;

  struct Data {
    std::string root;  // defaults to $CCMAAE_DATA_ROOT, then "."
    std::string train_images = "train-images-idx3-ubyte";
    std::string train_labels = "train-labels-idx1-ubyte";
    std::string test_images = "t10k-images-idx3-ubyte";
    std::string test_labels = "t10k-labels-idx1-ubyte";
    Index n = 6000;  // synthetic task parameters
    Index input_dim = 10;
    Index classes = 3;
    double spread = 0.1;
  } data;

  struct Split {
    Index train = 0;  // 0 = task default (mnist 55000/10000/5000,
    Index test = 0;   //                   synthetic 2/3, 1/6, 1/6)
    Index validation = 0;
  } split;

  struct Eval {
    int k = 5;
    std::vector<Index> labelled_per_class = {100, 600, 1000};
    Index repetitions = 10;
  } eval;

  TrainConfig train_config() const;
};

/// Parse a config JSON file. Unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);

/// Validate ranges and fill task-dependent split defaults.
void resolve_config(ExperimentConfig& cfg);

std::string config_to_json(const ExperimentConfig& cfg);

/// Corpus for the configured task (MNIST train+test files concatenated, or
/// the synthetic clusters), already split with the configured seed.
DataSplits load_task_data(const ExperimentConfig& cfg);

struct EvalRow {
  Index labelled_per_class;
  double mean_accuracy;
  double std_accuracy;
  Index repetitions;
};

// Command implementations. Each writes its outputs plus a config echo into
// out_dir and throws on failure.
void cmd_train(const ExperimentConfig& cfg, const std::string& out_dir);
std::vector<EvalRow> cmd_eval(const std::string& checkpoint_path, const ExperimentConfig& cfg,
                              const std::string& out_dir);
void cmd_sample(const std::string& checkpoint_path, const ExperimentConfig& cfg, Index n,
                const std::string& out_dir);
void cmd_traverse(const std::string& checkpoint_path, const ExperimentConfig& cfg,
                  const std::string& mode, Index n_steps, const std::string& out_dir);
void cmd_project(const std::string& checkpoint_path, const ExperimentConfig& cfg,
                 const std::string& chart, const std::string& out_dir);

}  // namespace ccmaae
