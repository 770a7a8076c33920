#pragma once

#include <utility>

#include "gesturepipe/cnn.hpp"

namespace gp::cnn {

// On-disk layout: <dir>/manifest.txt lists class names in label order, one
// per line; <dir>/<class>/ holds 64x64 P5 netpbm samples.
LabeledDataset load_dataset(const std::string& dir);

/// Seeded per-class holdout: first val_per_class shuffled samples of every
/// class go to the validation split.
std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& dataset,
                                                        int val_per_class,
                                                        std::uint64_t seed);

}  // namespace gp::cnn
