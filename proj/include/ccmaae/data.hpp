#pragma once

#include <cstdint>
#include <string>

#include "ccmaae/types.hpp"

// Dataset ingestion and preparation: MNIST IDX files, dynamic binarisation,
// deterministic splits, and the synthetic desk-scale cluster task. Loaded
// datasets are immutable values and freely shared.

namespace ccmaae {

struct ImageDataset {
  Matrix pixels;     // n x width, values in [0, 1]
  IntVector labels;  // n, values in 0..9

  Index size() const { return pixels.rows(); }
  Index width() const { return pixels.cols(); }
};

/// Big-endian IDX decoding: magic 0x00000803 with dims n x r x c for images,
/// 0x00000801 for labels. Pixels are scaled by 1/255, so the byte is
/// recoverable as round(pixel * 255).
ImageDataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Bernoulli(p = pixel) draw for every entry. The epoch enters the stream
/// seed, so each epoch sees a fresh binarisation of the same intensities.
Matrix dynamic_binarise(const Matrix& batch, std::uint64_t seed, std::uint64_t epoch);

struct SplitSpec {
  Index train_count = 55000;
  Index test_count = 10000;
  Index validation_count = 5000;
  std::uint64_t seed = 0;
};

struct DataSplits {
  ImageDataset train, test, validation;
};

/// Seeded shuffle of the corpus followed by a contiguous partition into
/// train / test / validation. Counts must sum to the corpus size.
DataSplits split(const ImageDataset& dataset, const SplitSpec& spec);

/// Gaussian blobs around per-class patterns. Each class draws a pattern
/// vector with coordinates in {0.05, 0.95} (distinct across classes),
/// samples are pattern + N(0, spread^2) clamped to [0, 1], labels cycle
/// through the classes.
ImageDataset synthetic_clusters(Index n, Index input_dim, Index n_classes, double spread,
                                std::uint64_t seed);

}  // namespace ccmaae
