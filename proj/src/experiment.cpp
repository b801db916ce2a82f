#include "ccmaae/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "ccmaae/checkpoint.hpp"
#include "ccmaae/evaltasks.hpp"
#include "ccmaae/geometry.hpp"
#include "ccmaae/io.hpp"
#include "ccmaae/priors.hpp"
#include "ccmaae/rng.hpp"

namespace ccmaae {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end())
      throw ConfigError("config: unknown key '" + where + key + "'");
  }
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config: bad value for '") + key + "'");
    }
  }
}

std::string data_root(const ExperimentConfig& cfg) {
  if (!cfg.data.root.empty()) return cfg.data.root;
  if (const char* env = std::getenv("CCMAAE_DATA_ROOT")) return env;
  return ".";
}

void require_readable(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: data file not readable: " + path);
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + out_dir + ": " + ec.message());
}

void write_echo(const ExperimentConfig& cfg, const std::string& out_dir) {
  write_text_file(out_dir + "/config_echo.json", config_to_json(cfg));
}

CcmAae load_model_for(const ExperimentConfig& cfg, const std::string& checkpoint_path) {
  CcmAae model = load_checkpoint(checkpoint_path).model;
  if (model.latent_dim() != cfg.latent_dim)
    throw ConfigError("checkpoint latent dim " + std::to_string(model.latent_dim()) +
                      " does not match configured latent_dim " + std::to_string(cfg.latent_dim));
  if (model.curvature.kappa() != cfg.kappa)
    throw ConfigError("checkpoint kappa " + std::to_string(model.curvature.kappa()) +
                      " does not match configured kappa " + std::to_string(cfg.kappa));
  return model;
}

}  // namespace

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig tc;
  tc.batch_size = batch_size;
  tc.learning_rate = learning_rate;
  tc.critic_hidden = critic_hidden;
  tc.leaky_alpha = leaky_alpha;
  tc.l2 = l2;
  tc.sigma_m = sigma_m;
  tc.latent_dim = latent_dim;
  tc.kappa = kappa;
  tc.max_epochs = max_epochs;
  tc.patience = patience;
  tc.seeds = TrainSeeds{seeds.init, seeds.shuffle, seeds.binarise, seeds.prior, seeds.labels};
  return tc;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }

  reject_unknown_keys(j,
                      {"task", "kappa", "latent_dim", "batch_size", "learning_rate",
                       "critic_hidden", "leaky_alpha", "l2", "sigma_m", "max_epochs", "patience",
                       "project_before_decode", "seeds", "data", "split", "eval"},
                      "");

  ExperimentConfig cfg;
  get_if_present(j, "task", cfg.task);
  get_if_present(j, "kappa", cfg.kappa);
  get_if_present(j, "latent_dim", cfg.latent_dim);
  get_if_present(j, "batch_size", cfg.batch_size);
  get_if_present(j, "learning_rate", cfg.learning_rate);
  get_if_present(j, "critic_hidden", cfg.critic_hidden);
  get_if_present(j, "leaky_alpha", cfg.leaky_alpha);
  get_if_present(j, "l2", cfg.l2);
  get_if_present(j, "sigma_m", cfg.sigma_m);
  get_if_present(j, "max_epochs", cfg.max_epochs);
  get_if_present(j, "patience", cfg.patience);
  get_if_present(j, "project_before_decode", cfg.project_before_decode);

  if (j.contains("seeds")) {
    const json& s = j["seeds"];
    reject_unknown_keys(s, {"split", "init", "shuffle", "binarise", "prior", "labels"}, "seeds.");
    get_if_present(s, "split", cfg.seeds.split);
    get_if_present(s, "init", cfg.seeds.init);
    get_if_present(s, "shuffle", cfg.seeds.shuffle);
    get_if_present(s, "binarise", cfg.seeds.binarise);
    get_if_present(s, "prior", cfg.seeds.prior);
    get_if_present(s, "labels", cfg.seeds.labels);
  }
  if (j.contains("data")) {
    const json& d = j["data"];
    reject_unknown_keys(d,
                        {"root", "train_images", "train_labels", "test_images", "test_labels",
                         "n", "input_dim", "classes", "spread"},
                        "data.");
    get_if_present(d, "root", cfg.data.root);
    get_if_present(d, "train_images", cfg.data.train_images);
    get_if_present(d, "train_labels", cfg.data.train_labels);
    get_if_present(d, "test_images", cfg.data.test_images);
    get_if_present(d, "test_labels", cfg.data.test_labels);
    get_if_present(d, "n", cfg.data.n);
    get_if_present(d, "input_dim", cfg.data.input_dim);
    get_if_present(d, "classes", cfg.data.classes);
    get_if_present(d, "spread", cfg.data.spread);
  }
  if (j.contains("split")) {
    const json& s = j["split"];
    reject_unknown_keys(s, {"train", "test", "validation"}, "split.");
    get_if_present(s, "train", cfg.split.train);
    get_if_present(s, "test", cfg.split.test);
    get_if_present(s, "validation", cfg.split.validation);
  }
  if (j.contains("eval")) {
    const json& e = j["eval"];
    reject_unknown_keys(e, {"k", "labelled_per_class", "repetitions"}, "eval.");
    get_if_present(e, "k", cfg.eval.k);
    get_if_present(e, "labelled_per_class", cfg.eval.labelled_per_class);
    get_if_present(e, "repetitions", cfg.eval.repetitions);
  }
  return cfg;
}

void resolve_config(ExperimentConfig& cfg) {
  if (cfg.task != "mnist" && cfg.task != "synthetic")
    throw ConfigError("config: task must be 'mnist' or 'synthetic', got '" + cfg.task + "'");
  if (cfg.kappa != 1 && cfg.kappa != -1) throw ConfigError("config: kappa must be +1 or -1");
  if (cfg.latent_dim < 1) throw ConfigError("config: latent_dim must be >= 1");
  if (cfg.batch_size < 1 || cfg.max_epochs < 1 || cfg.patience < 1)
    throw ConfigError("config: batch_size, max_epochs and patience must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("config: learning_rate must be positive");
  if (!(cfg.sigma_m > 0.0)) throw ConfigError("config: sigma_m must be positive");
  if (cfg.l2 < 0.0) throw ConfigError("config: l2 must be nonnegative");
  if (cfg.critic_hidden < 1) throw ConfigError("config: critic_hidden must be >= 1");
  if (cfg.eval.k < 1) throw ConfigError("config: eval.k must be >= 1");
  if (cfg.eval.repetitions < 1) throw ConfigError("config: eval.repetitions must be >= 1");
  for (Index l : cfg.eval.labelled_per_class)
    if (l < 1) throw ConfigError("config: eval.labelled_per_class entries must be >= 1");

  if (cfg.split.train == 0 && cfg.split.test == 0 && cfg.split.validation == 0) {
    if (cfg.task == "mnist") {
      cfg.split = {55000, 10000, 5000};
    } else {
      const Index test = cfg.data.n / 6;
      cfg.split = {cfg.data.n - 2 * test, test, test};
    }
  }
  if (cfg.split.train < 1 || cfg.split.test < 1 || cfg.split.validation < 1)
    throw ConfigError("config: split counts must be positive");
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j = {{"task", cfg.task},
            {"kappa", cfg.kappa},
            {"latent_dim", cfg.latent_dim},
            {"batch_size", cfg.batch_size},
            {"learning_rate", cfg.learning_rate},
            {"critic_hidden", cfg.critic_hidden},
            {"leaky_alpha", cfg.leaky_alpha},
            {"l2", cfg.l2},
            {"sigma_m", cfg.sigma_m},
            {"max_epochs", cfg.max_epochs},
            {"patience", cfg.patience},
            {"project_before_decode", cfg.project_before_decode},
            {"seeds",
             {{"split", cfg.seeds.split},
              {"init", cfg.seeds.init},
              {"shuffle", cfg.seeds.shuffle},
              {"binarise", cfg.seeds.binarise},
              {"prior", cfg.seeds.prior},
              {"labels", cfg.seeds.labels}}},
            {"split",
             {{"train", cfg.split.train},
              {"test", cfg.split.test},
              {"validation", cfg.split.validation}}},
            {"eval",
             {{"k", cfg.eval.k},
              {"labelled_per_class", cfg.eval.labelled_per_class},
              {"repetitions", cfg.eval.repetitions}}}};
  if (cfg.task == "mnist") {
    j["data"] = {{"root", data_root(cfg)},
                 {"train_images", cfg.data.train_images},
                 {"train_labels", cfg.data.train_labels},
                 {"test_images", cfg.data.test_images},
                 {"test_labels", cfg.data.test_labels}};
  } else {
    j["data"] = {{"n", cfg.data.n},
                 {"input_dim", cfg.data.input_dim},
                 {"classes", cfg.data.classes},
                 {"spread", cfg.data.spread}};
  }
  return j.dump(1) + "\n";
}

DataSplits load_task_data(const ExperimentConfig& cfg) {
  ImageDataset corpus;
  if (cfg.task == "mnist") {
    const std::string root = data_root(cfg);
    const std::string paths[4] = {root + "/" + cfg.data.train_images,
                                  root + "/" + cfg.data.train_labels,
                                  root + "/" + cfg.data.test_images,
                                  root + "/" + cfg.data.test_labels};
    for (const std::string& p : paths) require_readable(p);
    const ImageDataset train_part = load_idx(paths[0], paths[1]);
    const ImageDataset test_part = load_idx(paths[2], paths[3]);
    if (train_part.width() != test_part.width())
      throw ConfigError("mnist: train/test image widths differ");
    corpus.pixels = Matrix(train_part.size() + test_part.size(), train_part.width());
    corpus.pixels << train_part.pixels, test_part.pixels;
    corpus.labels = IntVector(train_part.size() + test_part.size());
    corpus.labels << train_part.labels, test_part.labels;
  } else {
    // Distinct sub-streams of the split seed: one for generating the
    // clusters, one for the shuffle inside split().
    corpus = synthetic_clusters(cfg.data.n, cfg.data.input_dim, cfg.data.classes,
                                cfg.data.spread, mix_seed(cfg.seeds.split, 1));
  }

  SplitSpec spec{cfg.split.train, cfg.split.test, cfg.split.validation,
                 mix_seed(cfg.seeds.split, 2)};
  try {
    return split(corpus, spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void cmd_train(const ExperimentConfig& cfg, const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const DataSplits splits = load_task_data(cfg);

  Rng init_rng(cfg.seeds.init);
  CcmAae model = make_ccm_aae(splits.train.width(), cfg.latent_dim, Curvature(cfg.kappa),
                              cfg.sigma_m, cfg.critic_hidden, cfg.leaky_alpha, cfg.l2, init_rng);
  model.project_before_decode = cfg.project_before_decode;

  const TrainHistory history = train(model, splits.train.pixels, splits.validation.pixels,
                                     cfg.train_config());

  save_checkpoint(out_dir + "/checkpoint.json", model);
  write_text_file(out_dir + "/history.csv", history_to_csv(history));
  write_echo(cfg, out_dir);
  std::cout << "trained " << history.epochs.size() << " epochs, best epoch "
            << history.best_epoch << ", best validation loss "
            << format_double(history.epochs[static_cast<size_t>(history.best_epoch)].validation_loss)
            << "\n";
}

std::vector<EvalRow> cmd_eval(const std::string& checkpoint_path, const ExperimentConfig& cfg,
                              const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const CcmAae model = load_model_for(cfg, checkpoint_path);
  const DataSplits splits = load_task_data(cfg);
  if (splits.train.width() != model.input_dim())
    throw ConfigError("checkpoint input dim " + std::to_string(model.input_dim()) +
                      " does not match dataset width " + std::to_string(splits.train.width()));

  std::vector<EvalRow> rows;
  std::string report = "l,mean_accuracy,std_accuracy,repetitions\n";
  for (Index l : cfg.eval.labelled_per_class) {
    std::vector<double> accs;
    for (Index rep = 0; rep < cfg.eval.repetitions; ++rep) {
      KnnConfig knn{cfg.eval.k, l, mix_seed(cfg.seeds.labels, static_cast<std::uint64_t>(rep))};
      accs.push_back(semi_supervised_accuracy(model, splits.train, splits.test, knn));
    }
    const double mean = std::accumulate(accs.begin(), accs.end(), 0.0) /
                        static_cast<double>(accs.size());
    double var = 0.0;
    for (double a : accs) var += (a - mean) * (a - mean);
    const double stddev = accs.size() > 1 ? std::sqrt(var / static_cast<double>(accs.size() - 1))
                                          : 0.0;
    rows.push_back({l, mean, stddev, cfg.eval.repetitions});
    report += std::to_string(l) + ',' + format_double(mean) + ',' + format_double(stddev) + ',' +
              std::to_string(cfg.eval.repetitions) + '\n';
    std::cout << "l=" << l << ": accuracy " << format_double(mean) << " +- "
              << format_double(stddev) << " over " << cfg.eval.repetitions << " runs\n";
  }
  write_text_file(out_dir + "/report.csv", report);
  write_echo(cfg, out_dir);
  return rows;
}

void cmd_sample(const std::string& checkpoint_path, const ExperimentConfig& cfg, Index n,
                const std::string& out_dir) {
  if (n < 0) throw ConfigError("sample: n must be >= 0");
  ensure_out_dir(out_dir);
  CcmAae model = load_model_for(cfg, checkpoint_path);
  model.project_before_decode = true;  // generation always projects
  const Matrix prior = sample_prior(PriorSpec{model.curvature, model.latent_dim(),
                                              cfg.seeds.prior}, n);
  const Matrix decoded = n > 0 ? decode(model, prior) : Matrix(0, model.input_dim());
  write_text_file(out_dir + "/samples.csv", pixel_rows_to_csv("sample", decoded));
  write_echo(cfg, out_dir);
}

void cmd_traverse(const std::string& checkpoint_path, const ExperimentConfig& cfg,
                  const std::string& mode, Index n_steps, const std::string& out_dir) {
  ensure_out_dir(out_dir);
  CcmAae model = load_model_for(cfg, checkpoint_path);
  model.project_before_decode = true;

  Traversal t;
  if (mode == "equator") {
    if (!model.curvature.is_spherical())
      throw ConfigError("traverse: equator mode requires kappa = +1");
    t = equator_traversal(model, n_steps, cfg.seeds.prior);
  } else if (mode == "geodesic") {
    Rng rng(cfg.seeds.prior);
    const Matrix endpoints = sample_prior(model.curvature, model.latent_dim(), 2, rng);
    t = geodesic_traversal(model, endpoints.row(0).transpose(), endpoints.row(1).transpose(),
                           n_steps);
  } else {
    throw ConfigError("traverse: mode must be 'equator' or 'geodesic'");
  }
  write_text_file(out_dir + "/traversal.csv", pixel_rows_to_csv("step", t.decoded));
  write_echo(cfg, out_dir);
}

void cmd_project(const std::string& checkpoint_path, const ExperimentConfig& cfg,
                 const std::string& chart, const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const CcmAae model = load_model_for(cfg, checkpoint_path);
  if (model.latent_dim() != 2) throw ConfigError("project: charts require latent_dim = 2");
  if (chart == "poincare" && model.curvature.is_spherical())
    throw ConfigError("project: poincare chart requires kappa = -1");
  if (chart == "aitoff" && !model.curvature.is_spherical())
    throw ConfigError("project: aitoff chart requires kappa = +1");
  if (chart != "poincare" && chart != "aitoff")
    throw ConfigError("project: chart must be 'poincare' or 'aitoff'");

  const DataSplits splits = load_task_data(cfg);
  const Matrix emb = project_embeddings(encode(model, splits.test.pixels), model.curvature);
  write_text_file(out_dir + "/chart.csv", chart_to_csv(chart_rows(emb, model.curvature),
                                                       splits.test.labels));
  write_echo(cfg, out_dir);
}

}  // namespace ccmaae
