#include "ccmaae/data.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ccmaae/rng.hpp"

namespace ccmaae {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;  // 2051
constexpr std::uint32_t kLabelsMagic = 0x00000801;  // 2049

std::uint32_t read_be_u32(std::istream& in, const std::string& path, const char* field) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error("load_idx: " + path + ": truncated while reading " + field);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

std::ifstream open_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_idx: cannot open " + path);
  return in;
}

}  // namespace

ImageDataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img = open_binary(images_path);
  const std::uint32_t img_magic = read_be_u32(img, images_path, "images magic");
  if (img_magic != kImagesMagic)
    throw std::runtime_error("load_idx: " + images_path + ": bad images magic " +
                             std::to_string(img_magic) + ", expected 2051");
  const std::uint32_t n = read_be_u32(img, images_path, "image count");
  const std::uint32_t rows = read_be_u32(img, images_path, "image rows");
  const std::uint32_t cols = read_be_u32(img, images_path, "image cols");
  if (rows == 0 || cols == 0)
    throw std::runtime_error("load_idx: " + images_path + ": zero image dimensions");

  std::ifstream lab = open_binary(labels_path);
  const std::uint32_t lab_magic = read_be_u32(lab, labels_path, "labels magic");
  if (lab_magic != kLabelsMagic)
    throw std::runtime_error("load_idx: " + labels_path + ": bad labels magic " +
                             std::to_string(lab_magic) + ", expected 2049");
  const std::uint32_t n_labels = read_be_u32(lab, labels_path, "label count");
  if (n_labels != n)
    throw std::runtime_error("load_idx: image count " + std::to_string(n) +
                             " does not match label count " + std::to_string(n_labels));

  const Index width = static_cast<Index>(rows) * static_cast<Index>(cols);
  ImageDataset ds;
  ds.pixels = Matrix(static_cast<Index>(n), width);
  ds.labels = IntVector(static_cast<Index>(n));

  std::vector<unsigned char> buf(static_cast<size_t>(width));
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!img.read(reinterpret_cast<char*>(buf.data()), width))
      throw std::runtime_error("load_idx: " + images_path + ": truncated pixel payload at image " +
                               std::to_string(i));
    for (Index j = 0; j < width; ++j)
      ds.pixels(static_cast<Index>(i), j) = static_cast<double>(buf[static_cast<size_t>(j)]) / 255.0;
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    unsigned char b;
    if (!lab.read(reinterpret_cast<char*>(&b), 1))
      throw std::runtime_error("load_idx: " + labels_path + ": truncated label payload at index " +
                               std::to_string(i));
    if (b > 9)
      throw std::runtime_error("load_idx: " + labels_path + ": label value " +
                               std::to_string(int(b)) + " out of range 0..9 at index " +
                               std::to_string(i));
    ds.labels[static_cast<Index>(i)] = b;
  }
  return ds;
}

Matrix dynamic_binarise(const Matrix& batch, std::uint64_t seed, std::uint64_t epoch) {
  if ((batch.array() < 0.0).any() || (batch.array() > 1.0).any())
    throw std::domain_error("dynamic_binarise: pixel values must lie in [0, 1]");
  Rng rng(mix_seed(seed, epoch));
  Matrix out(batch.rows(), batch.cols());
  for (Index i = 0; i < batch.rows(); ++i)
    for (Index j = 0; j < batch.cols(); ++j)
      out(i, j) = rng.uniform() < batch(i, j) ? 1.0 : 0.0;
  return out;
}

DataSplits split(const ImageDataset& dataset, const SplitSpec& spec) {
  const Index total = spec.train_count + spec.test_count + spec.validation_count;
  if (spec.train_count < 0 || spec.test_count < 0 || spec.validation_count < 0 ||
      total != dataset.size())
    throw std::invalid_argument("split: counts must sum to the corpus size " +
                                std::to_string(dataset.size()) + ", got " + std::to_string(total));

  std::vector<Index> order(static_cast<size_t>(dataset.size()));
  std::iota(order.begin(), order.end(), Index(0));
  Rng rng(spec.seed);
  rng.shuffle(order);

  auto take = [&](Index begin, Index count) {
    ImageDataset part;
    part.pixels = Matrix(count, dataset.width());
    part.labels = IntVector(count);
    for (Index i = 0; i < count; ++i) {
      part.pixels.row(i) = dataset.pixels.row(order[static_cast<size_t>(begin + i)]);
      part.labels[i] = dataset.labels[order[static_cast<size_t>(begin + i)]];
    }
    return part;
  };

  DataSplits out;
  out.train = take(0, spec.train_count);
  out.test = take(spec.train_count, spec.test_count);
  out.validation = take(spec.train_count + spec.test_count, spec.validation_count);
  return out;
}

ImageDataset synthetic_clusters(Index n, Index input_dim, Index n_classes, double spread,
                                std::uint64_t seed) {
  if (n_classes < 2) throw std::invalid_argument("synthetic_clusters: n_classes must be >= 2");
  if (n < n_classes || input_dim < 1)
    throw std::invalid_argument("synthetic_clusters: need n >= n_classes and input_dim >= 1");
  if (spread < 0.0) throw std::invalid_argument("synthetic_clusters: spread must be >= 0");

  Rng rng(seed);
  Matrix patterns(n_classes, input_dim);
  for (Index c = 0; c < n_classes; ++c) {
    bool fresh = false;
    while (!fresh) {
      for (Index j = 0; j < input_dim; ++j)
        patterns(c, j) = rng.uniform() < 0.5 ? 0.05 : 0.95;
      fresh = true;
      for (Index prev = 0; prev < c; ++prev)
        if ((patterns.row(c) - patterns.row(prev)).cwiseAbs().maxCoeff() == 0.0) fresh = false;
    }
  }

  ImageDataset ds;
  ds.pixels = Matrix(n, input_dim);
  ds.labels = IntVector(n);
  for (Index i = 0; i < n; ++i) {
    const Index c = i % n_classes;
    ds.labels[i] = static_cast<int>(c);
    for (Index j = 0; j < input_dim; ++j) {
      const double v = patterns(c, j) + spread * rng.gaussian();
      ds.pixels(i, j) = std::clamp(v, 0.0, 1.0);
    }
  }
  return ds;
}

}  // namespace ccmaae
