#include "gesturepipe/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "gesturepipe/rng.hpp"

namespace fs = std::filesystem;

namespace gp::cnn {

LabeledDataset load_dataset(const std::string& dir) {
    const fs::path root(dir);
    const fs::path manifest = root / "manifest.txt";
    std::ifstream in(manifest);
    if (!in) throw IoError("cannot open dataset manifest " + manifest.string());

    LabeledDataset ds;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) ds.class_names.push_back(line);
    }
    if (ds.class_names.size() < 2)
        throw ConfigError("dataset manifest must list at least 2 classes");

    for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
        const fs::path cls_dir = root / ds.class_names[c];
        if (!fs::is_directory(cls_dir))
            throw ConfigError("missing class directory " + cls_dir.string());
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(cls_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".pgm")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const fs::path& f : files) {
            BinaryMask m = load_mask(f.string());
            if (m.width != kInputSide || m.height != kInputSide)
                throw ConfigError("sample is not 64x64: " + f.string());
            ds.masks.push_back(std::move(m));
            ds.labels.push_back(static_cast<int>(c));
        }
    }
    if (ds.masks.empty()) throw ConfigError("dataset has no samples: " + dir);
    return ds;
}

std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& dataset,
                                                        int val_per_class,
                                                        std::uint64_t seed) {
    const std::size_t classes = dataset.class_names.empty()
                                    ? static_cast<std::size_t>(*std::max_element(
                                          dataset.labels.begin(), dataset.labels.end())) + 1
                                    : dataset.class_names.size();

    std::vector<std::vector<std::size_t>> by_class(classes);
    for (std::size_t i = 0; i < dataset.size(); ++i)
        by_class[dataset.labels[i]].push_back(i);

    rng::Rng rng(seed);
    LabeledDataset train, val;
    train.class_names = dataset.class_names;
    val.class_names = dataset.class_names;
    for (auto& idx : by_class) {
        if (static_cast<int>(idx.size()) <= val_per_class)
            throw ConfigError("val_per_class leaves no training samples for some class");
        rng.shuffle(idx);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            LabeledDataset& dst = static_cast<int>(k) < val_per_class ? val : train;
            dst.masks.push_back(dataset.masks[idx[k]]);
            dst.labels.push_back(dataset.labels[idx[k]]);
        }
    }
    return {std::move(train), std::move(val)};
}

}  // namespace gp::cnn
