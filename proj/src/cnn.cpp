#include "gesturepipe/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <thread>

#include "gesturepipe/rng.hpp"

namespace gp::cnn {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

struct PatternHash {
    std::uint64_t h = kFnvOffset;
    void mix(std::uint64_t v) { h = (h ^ v) * kFnvPrime; }
};

template <typename T>
void conv1_forward(const ModelT<T>& m, const T* in, T* z) {
    for (int f = 0; f < kConv1Ch; ++f) {
        const T* w = &m.conv1_w[static_cast<std::size_t>(f) * kKernel * kKernel];
        const T bias = m.conv1_b[f];
        T* zf = z + static_cast<std::size_t>(f) * kConv1Side * kConv1Side;
        for (int y = 0; y < kConv1Side; ++y)
            for (int x = 0; x < kConv1Side; ++x) {
                T acc = bias;
                for (int ky = 0; ky < kKernel; ++ky) {
                    const T* row = in + (y + ky) * kInputSide + x;
                    const T* wr = w + ky * kKernel;
                    for (int kx = 0; kx < kKernel; ++kx) acc += wr[kx] * row[kx];
                }
                zf[y * kConv1Side + x] = acc;
            }
    }
}

// Max-pool 2x2 stride 2 over relu(z); idx stores the winning cell as dy*2+dx,
// first maximum in scan order on ties.
template <typename T>
void pool_forward(const T* z, int ch, int in_side, T* out, std::uint8_t* idx) {
    const int out_side = in_side / 2;
    for (int c = 0; c < ch; ++c) {
        const T* zc = z + static_cast<std::size_t>(c) * in_side * in_side;
        T* oc = out + static_cast<std::size_t>(c) * out_side * out_side;
        std::uint8_t* ic = idx + static_cast<std::size_t>(c) * out_side * out_side;
        for (int y = 0; y < out_side; ++y)
            for (int x = 0; x < out_side; ++x) {
                T best = T{};
                std::uint8_t code = 0;
                bool first = true;
                for (int dy = 0; dy < 2; ++dy)
                    for (int dx = 0; dx < 2; ++dx) {
                        T a = zc[(2 * y + dy) * in_side + (2 * x + dx)];
                        if (a < T{}) a = T{};
                        if (first || a > best) {
                            best = a;
                            code = static_cast<std::uint8_t>(dy * 2 + dx);
                            first = false;
                        }
                    }
                oc[y * out_side + x] = best;
                ic[y * out_side + x] = code;
            }
    }
}

template <typename T>
void conv2_forward(const ModelT<T>& m, const T* p1, T* z2) {
    for (int g = 0; g < kConv2Ch; ++g) {
        T* zg = z2 + static_cast<std::size_t>(g) * kConv2Side * kConv2Side;
        std::fill(zg, zg + kConv2Side * kConv2Side, m.conv2_b[g]);
        for (int c = 0; c < kConv1Ch; ++c) {
            const T* w = &m.conv2_w[(static_cast<std::size_t>(g) * kConv1Ch + c) * kKernel * kKernel];
            const T* pc = p1 + static_cast<std::size_t>(c) * kPool1Side * kPool1Side;
            for (int y = 0; y < kConv2Side; ++y)
                for (int x = 0; x < kConv2Side; ++x) {
                    T acc = T{};
                    for (int ky = 0; ky < kKernel; ++ky) {
                        const T* row = pc + (y + ky) * kPool1Side + x;
                        const T* wr = w + ky * kKernel;
                        for (int kx = 0; kx < kKernel; ++kx) acc += wr[kx] * row[kx];
                    }
                    zg[y * kConv2Side + x] += acc;
                }
        }
    }
}

template <typename T>
void fc_head(const ModelT<T>& m, const T* flat, T* fc1_z, T* logits) {
    for (int j = 0; j < kFc1; ++j) {
        const T* w = &m.fc1_w[static_cast<std::size_t>(j) * kFlat];
        T acc = m.fc1_b[j];
        for (int i = 0; i < kFlat; ++i) acc += w[i] * flat[i];
        fc1_z[j] = acc;
    }
    for (int c = 0; c < m.num_classes; ++c) {
        const T* w = &m.fc2_w[static_cast<std::size_t>(c) * kFc1];
        T acc = m.fc2_b[c];
        for (int j = 0; j < kFc1; ++j) acc += w[j] * std::max(fc1_z[j], T{});
        logits[c] = acc;
    }
}

template <typename T>
void softmax(const T* logits, int n, T* probs) {
    T mx = logits[0];
    for (int i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
    T sum = T{};
    for (int i = 0; i < n; ++i) {
        probs[i] = std::exp(logits[i] - mx);
        sum += probs[i];
    }
    for (int i = 0; i < n; ++i) probs[i] /= sum;
}

template <typename T>
T nll(const T* probs, int label) {
    const T p = std::max(probs[label], static_cast<T>(1e-12));
    return -std::log(p);
}

}  // namespace

template <typename T>
void forward_pass(const ModelT<T>& m, const T* input, ActivationsT<T>& act) {
    act.input.assign(input, input + kInputSide * kInputSide);
    act.conv1_z.resize(static_cast<std::size_t>(kConv1Ch) * kConv1Side * kConv1Side);
    act.pool1.resize(static_cast<std::size_t>(kConv1Ch) * kPool1Side * kPool1Side);
    act.pool1_idx.resize(act.pool1.size());
    act.conv2_z.resize(static_cast<std::size_t>(kConv2Ch) * kConv2Side * kConv2Side);
    act.pool2.resize(kFlat);
    act.pool2_idx.resize(kFlat);
    act.fc1_z.resize(kFc1);
    act.logits.resize(m.num_classes);
    act.probs.resize(m.num_classes);

    conv1_forward(m, input, act.conv1_z.data());
    pool_forward(act.conv1_z.data(), kConv1Ch, kConv1Side, act.pool1.data(), act.pool1_idx.data());
    conv2_forward(m, act.pool1.data(), act.conv2_z.data());
    pool_forward(act.conv2_z.data(), kConv2Ch, kConv2Side, act.pool2.data(), act.pool2_idx.data());
    fc_head(m, act.pool2.data(), act.fc1_z.data(), act.logits.data());
    softmax(act.logits.data(), m.num_classes, act.probs.data());
}

template <typename T>
void backward_pass(const ModelT<T>& m, const ActivationsT<T>& act, int label, ModelT<T>& g) {
    const int C = m.num_classes;
    if (label < 0 || label >= C) throw std::invalid_argument("label out of range");
    g.resize(C);

    // Softmax + cross-entropy: dlogits = p - onehot(label).
    std::vector<T> dlog(act.probs);
    dlog[label] -= T{1};

    std::vector<T> a1(kFc1);
    for (int j = 0; j < kFc1; ++j) a1[j] = std::max(act.fc1_z[j], T{});

    std::vector<T> da1(kFc1, T{});
    for (int c = 0; c < C; ++c) {
        g.fc2_b[c] = dlog[c];
        const T d = dlog[c];
        T* gw = &g.fc2_w[static_cast<std::size_t>(c) * kFc1];
        const T* w = &m.fc2_w[static_cast<std::size_t>(c) * kFc1];
        for (int j = 0; j < kFc1; ++j) {
            gw[j] = d * a1[j];
            da1[j] += d * w[j];
        }
    }

    std::vector<T> dflat(kFlat, T{});
    for (int j = 0; j < kFc1; ++j) {
        const T dz = act.fc1_z[j] > T{} ? da1[j] : T{};
        g.fc1_b[j] = dz;
        T* gw = &g.fc1_w[static_cast<std::size_t>(j) * kFlat];
        const T* w = &m.fc1_w[static_cast<std::size_t>(j) * kFlat];
        const T* flat = act.pool2.data();
        if (dz == T{}) {
            std::fill(gw, gw + kFlat, T{});
            continue;
        }
        for (int i = 0; i < kFlat; ++i) {
            gw[i] = dz * flat[i];
            dflat[i] += dz * w[i];
        }
    }

    // Pool2 + relu backward into conv2 pre-activations.
    std::vector<T> dz2(static_cast<std::size_t>(kConv2Ch) * kConv2Side * kConv2Side, T{});
    for (int c = 0; c < kConv2Ch; ++c)
        for (int y = 0; y < kPool2Side; ++y)
            for (int x = 0; x < kPool2Side; ++x) {
                const std::size_t cell = (static_cast<std::size_t>(c) * kPool2Side + y) * kPool2Side + x;
                const std::uint8_t code = act.pool2_idx[cell];
                const int sy = 2 * y + code / 2, sx = 2 * x + code % 2;
                const std::size_t src = (static_cast<std::size_t>(c) * kConv2Side + sy) * kConv2Side + sx;
                if (act.conv2_z[src] > T{}) dz2[src] = dflat[cell];
            }

    std::vector<T> dp1(static_cast<std::size_t>(kConv1Ch) * kPool1Side * kPool1Side, T{});
    for (int gch = 0; gch < kConv2Ch; ++gch) {
        const T* dzg = &dz2[static_cast<std::size_t>(gch) * kConv2Side * kConv2Side];
        T bacc = T{};
        for (int i = 0; i < kConv2Side * kConv2Side; ++i) bacc += dzg[i];
        g.conv2_b[gch] = bacc;
        for (int c = 0; c < kConv1Ch; ++c) {
            T* gw = &g.conv2_w[(static_cast<std::size_t>(gch) * kConv1Ch + c) * kKernel * kKernel];
            const T* w = &m.conv2_w[(static_cast<std::size_t>(gch) * kConv1Ch + c) * kKernel * kKernel];
            const T* pc = &act.pool1[static_cast<std::size_t>(c) * kPool1Side * kPool1Side];
            T* dpc = &dp1[static_cast<std::size_t>(c) * kPool1Side * kPool1Side];
            for (int y = 0; y < kConv2Side; ++y)
                for (int x = 0; x < kConv2Side; ++x) {
                    const T d = dzg[y * kConv2Side + x];
                    if (d == T{}) continue;
                    for (int ky = 0; ky < kKernel; ++ky) {
                        const T* prow = pc + (y + ky) * kPool1Side + x;
                        T* dprow = dpc + (y + ky) * kPool1Side + x;
                        T* gwr = gw + ky * kKernel;
                        const T* wr = w + ky * kKernel;
                        for (int kx = 0; kx < kKernel; ++kx) {
                            gwr[kx] += d * prow[kx];
                            dprow[kx] += d * wr[kx];
                        }
                    }
                }
        }
    }

    // Pool1 + relu backward into conv1 pre-activations.
    std::vector<T> dz1(static_cast<std::size_t>(kConv1Ch) * kConv1Side * kConv1Side, T{});
    for (int c = 0; c < kConv1Ch; ++c)
        for (int y = 0; y < kPool1Side; ++y)
            for (int x = 0; x < kPool1Side; ++x) {
                const std::size_t cell = (static_cast<std::size_t>(c) * kPool1Side + y) * kPool1Side + x;
                const std::uint8_t code = act.pool1_idx[cell];
                const int sy = 2 * y + code / 2, sx = 2 * x + code % 2;
                const std::size_t src = (static_cast<std::size_t>(c) * kConv1Side + sy) * kConv1Side + sx;
                if (act.conv1_z[src] > T{}) dz1[src] = dp1[cell];
            }

    for (int f = 0; f < kConv1Ch; ++f) {
        const T* dzf = &dz1[static_cast<std::size_t>(f) * kConv1Side * kConv1Side];
        T bacc = T{};
        for (int i = 0; i < kConv1Side * kConv1Side; ++i) bacc += dzf[i];
        g.conv1_b[f] = bacc;
        T* gw = &g.conv1_w[static_cast<std::size_t>(f) * kKernel * kKernel];
        for (int y = 0; y < kConv1Side; ++y)
            for (int x = 0; x < kConv1Side; ++x) {
                const T d = dzf[y * kConv1Side + x];
                if (d == T{}) continue;
                for (int ky = 0; ky < kKernel; ++ky) {
                    const T* row = act.input.data() + (y + ky) * kInputSide + x;
                    T* gwr = gw + ky * kKernel;
                    for (int kx = 0; kx < kKernel; ++kx) gwr[kx] += d * row[kx];
                }
            }
    }
}

namespace {

template <typename T>
void hash_relu(PatternHash& ph, const T* z, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) ph.mix(z[i] > T{} ? 1 : 0);
}

inline void hash_codes(PatternHash& ph, const std::uint8_t* idx, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) ph.mix(idx[i]);
}

template <typename T>
struct TailScratch {
    std::vector<T> conv1_z, pool1, conv2_z, pool2, fc1_z, logits, probs;
    std::vector<std::uint8_t> pool1_idx, pool2_idx;
    TailScratch() {
        conv1_z.resize(static_cast<std::size_t>(kConv1Ch) * kConv1Side * kConv1Side);
        pool1.resize(static_cast<std::size_t>(kConv1Ch) * kPool1Side * kPool1Side);
        pool1_idx.resize(pool1.size());
        conv2_z.resize(static_cast<std::size_t>(kConv2Ch) * kConv2Side * kConv2Side);
        pool2.resize(kFlat);
        pool2_idx.resize(kFlat);
        fc1_z.resize(kFc1);
    }
};

template <typename T>
TailEval<T> tail_from_flat(const ModelT<T>& m, const T* flat, int label, TailScratch<T>& s,
                           PatternHash ph) {
    s.logits.resize(m.num_classes);
    s.probs.resize(m.num_classes);
    fc_head(m, flat, s.fc1_z.data(), s.logits.data());
    hash_relu(ph, s.fc1_z.data(), kFc1);
    softmax(s.logits.data(), m.num_classes, s.probs.data());
    return {nll(s.probs.data(), label), ph.h};
}

template <typename T>
TailEval<T> tail_from_pool1(const ModelT<T>& m, const T* p1, int label, TailScratch<T>& s,
                            PatternHash ph) {
    conv2_forward(m, p1, s.conv2_z.data());
    pool_forward(s.conv2_z.data(), kConv2Ch, kConv2Side, s.pool2.data(), s.pool2_idx.data());
    hash_relu(ph, s.conv2_z.data(), s.conv2_z.size());
    hash_codes(ph, s.pool2_idx.data(), s.pool2_idx.size());
    return tail_from_flat(m, s.pool2.data(), label, s, ph);
}

}  // namespace

template <typename T>
TailEval<T> eval_loss(const ModelT<T>& m, const T* input, int label) {
    thread_local TailScratch<T> s;
    PatternHash ph;
    conv1_forward(m, input, s.conv1_z.data());
    pool_forward(s.conv1_z.data(), kConv1Ch, kConv1Side, s.pool1.data(), s.pool1_idx.data());
    hash_relu(ph, s.conv1_z.data(), s.conv1_z.size());
    hash_codes(ph, s.pool1_idx.data(), s.pool1_idx.size());
    return tail_from_pool1(m, s.pool1.data(), label, s, ph);
}

template <typename T>
TailEval<T> eval_loss_from_pool1(const ModelT<T>& m, const T* pool1, int label) {
    thread_local TailScratch<T> s;
    return tail_from_pool1(m, pool1, label, s, PatternHash{});
}

template <typename T>
TailEval<T> eval_loss_from_flat(const ModelT<T>& m, const T* flat, int label) {
    thread_local TailScratch<T> s;
    return tail_from_flat(m, flat, label, s, PatternHash{});
}

template <typename T>
ModelT<T> init_model(int num_classes, std::uint64_t seed, bool random_bias) {
    if (num_classes < 2) throw std::invalid_argument("need at least 2 classes");
    ModelT<T> m;
    m.resize(num_classes);
    rng::Rng r(seed);
    const auto fill = [&r](std::vector<T>& w, int fan_in) {
        const double limit = std::sqrt(6.0 / fan_in);
        for (T& v : w) v = static_cast<T>(r.uniform(-limit, limit));
    };
    fill(m.conv1_w, kKernel * kKernel);
    fill(m.conv2_w, kConv1Ch * kKernel * kKernel);
    fill(m.fc1_w, kFlat);
    fill(m.fc2_w, kFc1);
    if (random_bias) {
        for (std::vector<T>* b : {&m.conv1_b, &m.conv2_b, &m.fc1_b, &m.fc2_b})
            for (T& v : *b) v = static_cast<T>(r.uniform(-0.1, 0.1));
    }
    return m;
}

std::vector<float> input_from_mask(const BinaryMask& canvas) {
    if (canvas.width != kInputSide || canvas.height != kInputSide)
        throw std::invalid_argument("canvas must be 64x64");
    std::vector<float> in(canvas.bits.size());
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = canvas.bits[i] ? 1.0f : 0.0f;
    return in;
}

GestureScores forward(const CnnModel& model, const BinaryMask& canvas) {
    const std::vector<float> in = input_from_mask(canvas);
    thread_local Activations act;
    forward_pass(model, in.data(), act);
    GestureScores scores;
    scores.probabilities = act.probs;
    scores.label = static_cast<int>(std::max_element(act.probs.begin(), act.probs.end()) -
                                    act.probs.begin());
    return scores;
}

float loss(const GestureScores& scores, int label) {
    if (label < 0 || label >= static_cast<int>(scores.probabilities.size()))
        throw std::invalid_argument("label out of range");
    return nll(scores.probabilities.data(), label);
}

Gradients backward(const CnnModel& model, const BinaryMask& canvas, int label) {
    const std::vector<float> in = input_from_mask(canvas);
    Activations act;
    forward_pass(model, in.data(), act);
    Gradients g;
    backward_pass(model, act, label, g);
    return g;
}

void sgd_step(CnnModel& model, const Gradients& grads, CnnModel& velocity,
              const TrainConfig& cfg) {
    if (velocity.fc2_w.size() != model.fc2_w.size()) velocity.resize(model.num_classes);
    if (grads.fc2_w.size() != model.fc2_w.size())
        throw std::invalid_argument("gradient shape mismatch");
    const float mu = static_cast<float>(cfg.mu);
    const float alpha = static_cast<float>(cfg.alpha);
    auto mt = model.tensors();
    auto gt = grads.tensors();
    auto vt = velocity.tensors();
    for (std::size_t t = 0; t < mt.size(); ++t) {
        float* th = mt[t]->data();
        const float* g = gt[t]->data();
        float* v = vt[t]->data();
        const std::size_t n = mt[t]->size();
        for (std::size_t k = 0; k < n; ++k) {
            v[k] = mu * v[k] - alpha * g[k];
            th[k] += v[k];
        }
    }
}

namespace {

int dataset_classes(const LabeledDataset& ds) {
    if (!ds.class_names.empty()) return static_cast<int>(ds.class_names.size());
    int mx = -1;
    for (int l : ds.labels) mx = std::max(mx, l);
    return mx + 1;
}

void check_dataset(const LabeledDataset& ds, int num_classes) {
    if (ds.masks.size() != ds.labels.size())
        throw std::invalid_argument("dataset masks/labels size mismatch");
    for (const BinaryMask& m : ds.masks)
        if (m.width != kInputSide || m.height != kInputSide)
            throw std::invalid_argument("dataset masks must be 64x64");
    for (int l : ds.labels)
        if (l < 0 || l >= num_classes) throw std::invalid_argument("dataset label out of range");
}

}  // namespace

TrainResult train(const LabeledDataset& train_set, const LabeledDataset& val_set,
                  const TrainConfig& cfg) {
    if (train_set.size() == 0) throw std::invalid_argument("empty training set");
    const int C = dataset_classes(train_set);
    if (C < 2) throw std::invalid_argument("need at least 2 classes");
    {
        std::vector<std::uint8_t> seen(C, 0);
        for (int l : train_set.labels) seen[l] = 1;
        if (std::count(seen.begin(), seen.end(), std::uint8_t{1}) < 2)
            throw std::invalid_argument("training set must contain at least 2 classes");
    }
    check_dataset(train_set, C);
    check_dataset(val_set, C);

    const std::size_t n = train_set.size();
    std::vector<std::vector<float>> inputs(n);
    for (std::size_t i = 0; i < n; ++i) inputs[i] = input_from_mask(train_set.masks[i]);

    TrainResult result;
    result.model = init_model<float>(C, cfg.seed);
    CnnModel velocity;
    velocity.resize(C);

    int threads = cfg.threads;
    if (threads <= 0)
        threads = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, 4);

    // Per-thread double accumulators keep the batch reduction deterministic:
    // chunks are contiguous and merged in thread order.
    std::vector<ModelT<double>> accum(threads);
    for (auto& a : accum) a.resize(C);
    std::vector<double> thread_loss(threads, 0.0);

    rng::Rng shuffler(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    Gradients batch_grads;
    batch_grads.resize(C);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffler.shuffle(perm);
        double epoch_loss = 0.0;

        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t end = std::min(n, start + cfg.batch_size);
            const std::size_t count = end - start;
            const std::size_t chunk = (count + threads - 1) / threads;

            auto worker = [&](int t) {
                const std::size_t lo = start + t * chunk;
                const std::size_t hi = std::min(end, lo + chunk);
                ModelT<double>& acc = accum[t];
                for (auto* v : acc.tensors()) std::fill(v->begin(), v->end(), 0.0);
                thread_loss[t] = 0.0;
                Activations act;
                Gradients g;
                for (std::size_t s = lo; s < hi; ++s) {
                    const std::size_t i = perm[s];
                    forward_pass(result.model, inputs[i].data(), act);
                    thread_loss[t] += nll(act.probs.data(), train_set.labels[i]);
                    backward_pass(result.model, act, train_set.labels[i], g);
                    auto at = acc.tensors();
                    auto gt = g.tensors();
                    for (std::size_t k = 0; k < at.size(); ++k) {
                        double* a = at[k]->data();
                        const float* gv = gt[k]->data();
                        const std::size_t len = at[k]->size();
                        for (std::size_t e = 0; e < len; ++e) a[e] += gv[e];
                    }
                }
            };

            if (threads == 1) {
                worker(0);
            } else {
                std::vector<std::thread> pool;
                pool.reserve(threads);
                for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
                for (auto& th : pool) th.join();
            }

            auto bt = batch_grads.tensors();
            for (std::size_t k = 0; k < bt.size(); ++k) {
                float* out = bt[k]->data();
                const std::size_t len = bt[k]->size();
                std::vector<const double*> parts(threads);
                for (int t = 0; t < threads; ++t) parts[t] = accum[t].tensors()[k]->data();
                for (std::size_t e = 0; e < len; ++e) {
                    double sum = 0.0;
                    for (int t = 0; t < threads; ++t) sum += parts[t][e];
                    out[e] = static_cast<float>(sum / static_cast<double>(count));
                }
            }
            for (int t = 0; t < threads; ++t) epoch_loss += thread_loss[t];

            sgd_step(result.model, batch_grads, velocity, cfg);
        }

        result.epoch_loss.push_back(epoch_loss / static_cast<double>(n));
        result.val_accuracy.push_back(val_set.size() == 0
                                          ? 0.0
                                          : evaluate(result.model, val_set).accuracy);
    }
    return result;
}

EvalResult evaluate(const CnnModel& model, const LabeledDataset& dataset) {
    const int C = model.num_classes;
    check_dataset(dataset, C);
    EvalResult r;
    r.confusion.assign(C, std::vector<int>(C, 0));
    if (dataset.size() == 0) return r;

    thread_local Activations act;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const std::vector<float> in = input_from_mask(dataset.masks[i]);
        forward_pass(model, in.data(), act);
        const int pred = static_cast<int>(
            std::max_element(act.probs.begin(), act.probs.end()) - act.probs.begin());
        r.confusion[dataset.labels[i]][pred]++;
        if (pred == dataset.labels[i]) ++correct;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
    return r;
}

namespace {

constexpr char kMagic[5] = {'G', 'P', 'C', 'N', 'N'};
constexpr std::uint16_t kFormatVersion = 1;

void write_u16(std::ostream& out, std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    out.write(b, 2);
}

void write_floats(std::ostream& out, const std::vector<float>& v) {
    std::vector<char> buf(v.size() * 4);
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::uint32_t bits;
        std::memcpy(&bits, &v[i], 4);
        buf[i * 4 + 0] = static_cast<char>(bits & 0xff);
        buf[i * 4 + 1] = static_cast<char>((bits >> 8) & 0xff);
        buf[i * 4 + 2] = static_cast<char>((bits >> 16) & 0xff);
        buf[i * 4 + 3] = static_cast<char>((bits >> 24) & 0xff);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

bool read_floats(std::istream& in, std::vector<float>& v) {
    std::vector<char> buf(v.size() * 4);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::uint32_t bits = (static_cast<std::uint32_t>(static_cast<unsigned char>(buf[i * 4 + 0]))) |
                                   (static_cast<std::uint32_t>(static_cast<unsigned char>(buf[i * 4 + 1])) << 8) |
                                   (static_cast<std::uint32_t>(static_cast<unsigned char>(buf[i * 4 + 2])) << 16) |
                                   (static_cast<std::uint32_t>(static_cast<unsigned char>(buf[i * 4 + 3])) << 24);
        std::memcpy(&v[i], &bits, 4);
    }
    return true;
}

}  // namespace

void save_model(const CnnModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(kMagic, 5);
    write_u16(out, kFormatVersion);
    out << "conv1:" << kConv1Ch << "x1x" << kKernel << "x" << kKernel
        << " conv2:" << kConv2Ch << "x" << kConv1Ch << "x" << kKernel << "x" << kKernel
        << " fc1:" << kFc1 << "x" << kFlat
        << " fc2:" << model.num_classes << "x" << kFc1 << "\n";
    for (const auto* t : model.tensors()) write_floats(out, *t);
    if (!out) throw IoError("write failed for " + path);
}

CnnModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    char magic[5] = {};
    in.read(magic, 5);
    if (in.gcount() != 5 || std::memcmp(magic, kMagic, 5) != 0)
        throw ModelFormatError(ModelFormatError::Kind::Magic, "bad model magic in " + path);

    char vb[2] = {};
    in.read(vb, 2);
    if (in.gcount() != 2)
        throw ModelFormatError(ModelFormatError::Kind::Truncated, "truncated header in " + path);
    const std::uint16_t version = static_cast<std::uint16_t>(
        static_cast<unsigned char>(vb[0]) | (static_cast<unsigned char>(vb[1]) << 8));
    if (version != kFormatVersion)
        throw ModelFormatError(ModelFormatError::Kind::Version,
                               "unsupported model format version " + std::to_string(version));

    std::string descriptor;
    if (!std::getline(in, descriptor))
        throw ModelFormatError(ModelFormatError::Kind::Truncated, "missing descriptor in " + path);

    int c1, c1in, k1a, k1b, c2, c2in, k2a, k2b, f1o, f1i, f2o, f2i;
    if (std::sscanf(descriptor.c_str(),
                    "conv1:%dx%dx%dx%d conv2:%dx%dx%dx%d fc1:%dx%d fc2:%dx%d",
                    &c1, &c1in, &k1a, &k1b, &c2, &c2in, &k2a, &k2b, &f1o, &f1i, &f2o,
                    &f2i) != 12)
        throw ModelFormatError(ModelFormatError::Kind::Descriptor,
                               "unparseable descriptor: " + descriptor);
    if (c1 != kConv1Ch || c1in != 1 || k1a != kKernel || k1b != kKernel || c2 != kConv2Ch ||
        c2in != kConv1Ch || k2a != kKernel || k2b != kKernel || f1o != kFc1 || f1i != kFlat ||
        f2i != kFc1 || f2o < 2)
        throw ModelFormatError(ModelFormatError::Kind::Shape,
                               "descriptor does not match this architecture: " + descriptor);

    CnnModel model;
    model.resize(f2o);
    for (auto* t : model.tensors())
        if (!read_floats(in, *t))
            throw ModelFormatError(ModelFormatError::Kind::Shape,
                                   "payload shorter than descriptor shapes in " + path);
    if (in.peek() != EOF)
        throw ModelFormatError(ModelFormatError::Kind::Shape,
                               "trailing bytes beyond descriptor shapes in " + path);
    return model;
}

template struct ModelT<float>;
template struct ModelT<double>;
template ModelT<float> init_model<float>(int, std::uint64_t, bool);
template ModelT<double> init_model<double>(int, std::uint64_t, bool);
template void forward_pass<float>(const ModelT<float>&, const float*, ActivationsT<float>&);
template void forward_pass<double>(const ModelT<double>&, const double*, ActivationsT<double>&);
template void backward_pass<float>(const ModelT<float>&, const ActivationsT<float>&, int,
                                   ModelT<float>&);
template void backward_pass<double>(const ModelT<double>&, const ActivationsT<double>&, int,
                                    ModelT<double>&);
template TailEval<float> eval_loss<float>(const ModelT<float>&, const float*, int);
template TailEval<double> eval_loss<double>(const ModelT<double>&, const double*, int);
template TailEval<float> eval_loss_from_pool1<float>(const ModelT<float>&, const float*, int);
template TailEval<double> eval_loss_from_pool1<double>(const ModelT<double>&, const double*, int);
template TailEval<float> eval_loss_from_flat<float>(const ModelT<float>&, const float*, int);
template TailEval<double> eval_loss_from_flat<double>(const ModelT<double>&, const double*, int);

}  // namespace gp::cnn
