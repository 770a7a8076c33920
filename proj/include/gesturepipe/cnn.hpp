#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gesturepipe/image.hpp"

namespace gp::cnn {

// LeNet-style topology on a 64x64 binary canvas, valid convolutions:
//   conv 8@5x5 -> relu -> maxpool 2x2  => 8@30x30
//   conv 16@5x5x8 -> relu -> maxpool   => 16@13x13
//   fc 2704->128 -> relu ; fc 128->C -> softmax
inline constexpr int kInputSide = 64;
inline constexpr int kKernel = 5;
inline constexpr int kConv1Ch = 8;
inline constexpr int kConv1Side = kInputSide - kKernel + 1;   // 60
inline constexpr int kPool1Side = kConv1Side / 2;             // 30
inline constexpr int kConv2Ch = 16;
inline constexpr int kConv2Side = kPool1Side - kKernel + 1;   // 26
inline constexpr int kPool2Side = kConv2Side / 2;             // 13
inline constexpr int kFlat = kConv2Ch * kPool2Side * kPool2Side;  // 2704
inline constexpr int kFc1 = 128;
inline constexpr int kDefaultClasses = 16;

/// Parameter set; also reused as the gradient/velocity layout.
template <typename T>
struct ModelT {
    int num_classes = kDefaultClasses;
    std::vector<T> conv1_w, conv1_b;  // [8][5][5], [8]
    std::vector<T> conv2_w, conv2_b;  // [16][8][5][5], [16]
    std::vector<T> fc1_w, fc1_b;      // [128][2704], [128]
    std::vector<T> fc2_w, fc2_b;      // [C][128], [C]

    void resize(int classes) {
        num_classes = classes;
        conv1_w.assign(kConv1Ch * kKernel * kKernel, T{});
        conv1_b.assign(kConv1Ch, T{});
        conv2_w.assign(kConv2Ch * kConv1Ch * kKernel * kKernel, T{});
        conv2_b.assign(kConv2Ch, T{});
        fc1_w.assign(static_cast<std::size_t>(kFc1) * kFlat, T{});
        fc1_b.assign(kFc1, T{});
        fc2_w.assign(static_cast<std::size_t>(classes) * kFc1, T{});
        fc2_b.assign(classes, T{});
    }

    std::vector<std::vector<T>*> tensors() {
        return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc1_w, &fc1_b, &fc2_w, &fc2_b};
    }
    std::vector<const std::vector<T>*> tensors() const {
        return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc1_w, &fc1_b, &fc2_w, &fc2_b};
    }
    bool operator==(const ModelT&) const = default;
};

using CnnModel = ModelT<float>;
using Gradients = ModelT<float>;

/// Layer activations of one forward pass, kept for backprop and for the
/// direct-convolution comparisons in tests.
template <typename T>
struct ActivationsT {
    std::vector<T> input;                 // 64*64
    std::vector<T> conv1_z;               // 8*60*60 (pre-activation)
    std::vector<T> pool1;                 // 8*30*30
    std::vector<std::uint8_t> pool1_idx;  // 2-bit argmax code per cell
    std::vector<T> conv2_z;               // 16*26*26
    std::vector<T> pool2;                 // 2704
    std::vector<std::uint8_t> pool2_idx;
    std::vector<T> fc1_z;                 // 128 (pre-activation)
    std::vector<T> logits;                // C
    std::vector<T> probs;                 // C
};

using Activations = ActivationsT<float>;

/// He-style uniform fan-in init, biases zero (or small uniform when
/// random_bias is set, used by the gradient checks to stay off ReLU kinks).
template <typename T>
ModelT<T> init_model(int num_classes, std::uint64_t seed, bool random_bias = false);

template <typename T>
void forward_pass(const ModelT<T>& model, const T* input, ActivationsT<T>& act);

/// Exact reverse-mode gradients for one sample; grads are overwritten.
template <typename T>
void backward_pass(const ModelT<T>& model, const ActivationsT<T>& act, int label,
                   ModelT<T>& grads);

/// Loss plus a hash of every ReLU sign and pool argmax decision made during
/// the evaluation; finite-difference checks use matching hashes at theta+h
/// and theta-h to detect kink crossings. The *_tail variants resume from a
/// cached intermediate stage.
template <typename T>
struct TailEval {
    T loss;
    std::uint64_t pattern;
};

template <typename T>
TailEval<T> eval_loss(const ModelT<T>& model, const T* input, int label);
template <typename T>
TailEval<T> eval_loss_from_pool1(const ModelT<T>& model, const T* pool1, int label);
template <typename T>
TailEval<T> eval_loss_from_flat(const ModelT<T>& model, const T* flat, int label);

struct GestureScores {
    std::vector<float> probabilities;
    int label = 0;  // argmax
};

struct TrainConfig {
    double alpha = 1e-4;  // base learning rate
    double mu = 0.9;      // momentum
    int batch_size = 32;
    int epochs = 30;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = pick from hardware, capped at 4
};

struct LabeledDataset {
    std::vector<std::string> class_names;
    std::vector<BinaryMask> masks;  // each kInputSide x kInputSide
    std::vector<int> labels;

    std::size_t size() const { return masks.size(); }
};

std::vector<float> input_from_mask(const BinaryMask& canvas);

GestureScores forward(const CnnModel& model, const BinaryMask& canvas);
float loss(const GestureScores& scores, int label);
Gradients backward(const CnnModel& model, const BinaryMask& canvas, int label);

/// v <- mu*v - alpha*grad; theta <- theta + v.
void sgd_step(CnnModel& model, const Gradients& grads, CnnModel& velocity,
              const TrainConfig& cfg);

struct TrainResult {
    CnnModel model;
    std::vector<double> epoch_loss;    // mean training loss per epoch
    std::vector<double> val_accuracy;  // held-out accuracy per epoch
};

TrainResult train(const LabeledDataset& train_set, const LabeledDataset& val_set,
                  const TrainConfig& cfg);

struct EvalResult {
    double accuracy = 0.0;
    std::vector<std::vector<int>> confusion;  // [true][predicted]
};

EvalResult evaluate(const CnnModel& model, const LabeledDataset& dataset);

/// Model file: "GPCNN" magic, u16 LE format version, one text descriptor
/// line, then tensors as little-endian f32 in declaration order.
class ModelFormatError : public std::runtime_error {
public:
    enum class Kind { Magic, Version, Descriptor, Truncated, Shape };
    ModelFormatError(Kind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

void save_model(const CnnModel& model, const std::string& path);
CnnModel load_model(const std::string& path);

}  // namespace gp::cnn
