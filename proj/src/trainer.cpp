#include "cgfam/trainer.hpp"

#include "cgfam/common.hpp"
#include "cgfam/supcon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cgfam {

using nn::Checkpoint;
using nn::Encoder;
using nn::EncoderConfig;
using nn::LinearHead;

void SupConConfig::check() const {
    if (!(temperature > 0.0)) throw UsageError("temperature must be positive");
    if (!(learning_rate > 0.0)) throw UsageError("learning rate must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw UsageError("momentum must lie in [0,1)");
    if (!(weight_decay >= 0.0)) throw UsageError("weight decay must be non-negative");
    if (batch_size == 0) throw UsageError("batch size must be positive");
}

std::uint64_t SupConConfig::digest() const {
    Digest d;
    d.f64(temperature).f64(learning_rate).f64(momentum).f64(weight_decay).u64(batch_size).u64(epochs).u64(seed);
    return d.value();
}

std::string TrainLog::csv() const {
    std::ostringstream os;
    os.precision(10);
    os << "epoch,loss\n";
    for (std::size_t e = 0; e < epoch_loss.size(); ++e) os << e + 1 << ',' << epoch_loss[e] << '\n';
    return os.str();
}

void Sgd::step(std::size_t slot, std::vector<float>& param, std::span<const float> grad) {
    if (velocity_.size() <= slot) velocity_.resize(slot + 1);
    auto& v = velocity_[slot];
    if (v.empty()) v.assign(param.size(), 0.0f);
    const float lr = static_cast<float>(lr_), m = static_cast<float>(momentum_), wd = static_cast<float>(wd_);
    for (std::size_t i = 0; i < param.size(); ++i) {
        const float g = grad[i] + wd * param[i];
        v[i] = m * v[i] + g;
        param[i] -= lr * v[i];
    }
}

std::vector<float> to_input(std::span<const double> pixels) {
    std::vector<float> out(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) out[i] = static_cast<float>(pixels[i] / 255.0);
    return out;
}

std::vector<float> embed(const Encoder<float>& enc, std::span<const float> input, std::size_t count,
                         std::size_t jobs) {
    const std::size_t px = enc.config().input_side * enc.config().input_side;
    const std::size_t dim = enc.config().embed_dim;
    if (input.size() != count * px) throw std::invalid_argument("embed: input size mismatch");
    constexpr std::size_t kChunk = 128;
    const std::size_t chunks = (count + kChunk - 1) / kChunk;
    std::vector<float> out(count * dim);
    parallel_for(chunks, jobs, [&](std::size_t c) {
        const std::size_t lo = c * kChunk, n = std::min(kChunk, count - lo);
        auto cache = enc.forward_eval(input.subspan(lo * px, n * px), n);
        auto unit = nn::normalize_embeddings<float>(cache.embeddings, n, dim);
        std::copy(unit.begin(), unit.end(), out.begin() + static_cast<std::ptrdiff_t>(lo * dim));
    });
    return out;
}

namespace {

void require_trainable(const LabeledDataset& ds, const EncoderConfig& enc) {
    validate(ds);
    if (ds.size() == 0) throw UsageError("training set is empty");
    if (ds.families.size() < 2) throw UsageError("training needs at least 2 families");
    if (ds.samples.front().image.layout.side != enc.input_side)
        throw FormatError("image side " + std::to_string(ds.samples.front().image.layout.side) +
                          " does not match encoder input side " + std::to_string(enc.input_side));
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n, std::size_t batch, Rng& rng) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    shuffle(order, rng);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t lo = 0; lo < n; lo += batch)
        out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(lo),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n, lo + batch)));
    return out;
}

void apply_encoder_step(Sgd& opt, Encoder<float>& enc, const nn::Gradients<float>& g) {
    auto& params = enc.mutable_params();
    for (std::size_t p = 0; p < params.size(); ++p) opt.step(p, params[p].value, g.params[p]);
}

std::vector<float> gather_input(const LabeledDataset& ds, const std::vector<std::size_t>& idx) {
    std::vector<double> px;
    for (auto i : idx) px.insert(px.end(), ds.samples[i].image.pixels.begin(), ds.samples[i].image.pixels.end());
    return to_input(px);
}

// Softmax cross-entropy over a batch of unit embeddings. Returns the mean
// loss; fills head gradients and d(loss)/d(unit embeddings).
double cross_entropy(const LinearHead& head, std::span<const float> unit, std::span<const std::uint32_t> labels,
                     std::vector<float>& grad_w, std::vector<float>& grad_b, std::vector<float>* grad_unit) {
    const std::size_t B = labels.size(), C = head.classes, D = head.dim;
    grad_w.assign(C * D, 0.0f);
    grad_b.assign(C, 0.0f);
    if (grad_unit) grad_unit->assign(B * D, 0.0f);
    double loss = 0.0;
    std::vector<double> p(C);
    for (std::size_t b = 0; b < B; ++b) {
        auto u = unit.subspan(b * D, D);
        auto s = head.scores(u);
        const double mx = *std::max_element(s.begin(), s.end());
        double z = 0.0;
        for (std::size_t c = 0; c < C; ++c) z += (p[c] = std::exp(static_cast<double>(s[c]) - mx));
        for (std::size_t c = 0; c < C; ++c) p[c] /= z;
        loss -= std::log(std::max(p[labels[b]], 1e-300));
        for (std::size_t c = 0; c < C; ++c) {
            const float d = static_cast<float>((p[c] - (c == labels[b] ? 1.0 : 0.0)) / static_cast<double>(B));
            grad_b[c] += d;
            float* gw = grad_w.data() + c * D;
            const float* w = head.weight.data() + c * D;
            for (std::size_t k = 0; k < D; ++k) gw[k] += d * u[k];
            if (grad_unit) {
                float* gu = grad_unit->data() + b * D;
                for (std::size_t k = 0; k < D; ++k) gu[k] += d * w[k];
            }
        }
    }
    return loss / static_cast<double>(B);
}

LinearHead init_head(std::size_t classes, std::size_t dim, std::uint64_t seed) {
    LinearHead h(classes, dim);
    Rng rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
    for (auto& w : h.weight) w = static_cast<float>(uniform(rng, -bound, bound));
    for (auto& b : h.bias) b = static_cast<float>(uniform(rng, -bound, bound));
    return h;
}

void check_finite(double loss, std::size_t epoch, std::size_t step, const char* what) {
    if (!std::isfinite(loss))
        throw NumericError(std::string(what) + " loss became non-finite at epoch " + std::to_string(epoch + 1) +
                           ", step " + std::to_string(step + 1) + " (value " + std::to_string(loss) + ")");
}

}  // namespace

Checkpoint train_encoder(const LabeledDataset& ds, const SupConConfig& cfg, const AugmentationPolicy& policy,
                         const EncoderConfig& enc_cfg, TrainLog* log, const ApiRegistry* registry,
                         const EpochCallback& on_epoch) {
    cfg.check();
    policy.check();
    require_trainable(ds, enc_cfg);
    if (registry && registry->content_hash() != ds.registry_hash)
        throw HashMismatchError("augmentation registry differs from the dataset registry");

    Checkpoint ck(enc_cfg, mix_seed(cfg.seed, 1), ds.registry_hash);
    auto& enc = ck.encoder;
    Sgd opt(cfg.learning_rate, cfg.momentum, cfg.weight_decay);
    Rng order_rng(mix_seed(cfg.seed, 2)), aug_rng(mix_seed(cfg.seed, 3));
    const std::size_t dim = enc_cfg.embed_dim;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double total = 0.0;
        const auto batches = epoch_batches(ds.size(), cfg.batch_size, order_rng);
        for (std::size_t step = 0; step < batches.size(); ++step) {
            auto views = make_views(ds, batches[step], policy, aug_rng, registry);
            const auto input = to_input(views.pixels);
            const std::size_t rows = views.labels.size();
            auto cache = enc.forward(input, rows, nn::Mode::train);
            auto unit = nn::normalize_embeddings<float>(cache.embeddings, rows, dim);
            auto r = supcon_loss<float>(unit, rows, dim, views.labels, cfg.temperature);
            const double scale = r.anchors ? 1.0 / static_cast<double>(r.anchors) : 0.0;
            const double loss = r.loss * scale;
            check_finite(loss, epoch, step, "contrastive");
            std::vector<float> g(r.grad.size());
            for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<float>(r.grad[i] * scale);
            auto ge = nn::normalize_backward<float>(cache.embeddings, g, rows, dim);
            apply_encoder_step(opt, enc, enc.backward(cache, ge));
            total += loss;
        }
        const double mean = batches.empty() ? 0.0 : total / static_cast<double>(batches.size());
        if (log) log->epoch_loss.push_back(mean);
        if (on_epoch) on_epoch(epoch, mean);
    }
    return ck;
}

Checkpoint train_classifier(Checkpoint ck, const LabeledDataset& ds, const SupConConfig& cfg, TrainLog* log,
                            std::size_t jobs) {
    cfg.check();
    require_trainable(ds, ck.encoder.config());
    if (ck.registry_hash != ds.registry_hash)
        throw HashMismatchError("encoder checkpoint registry " + hex64(ck.registry_hash) + " differs from dataset " +
                                hex64(ds.registry_hash));
    const std::size_t dim = ck.encoder.config().embed_dim;
    std::vector<std::size_t> all(ds.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const auto unit = embed(ck.encoder, gather_input(ds, all), ds.size(), jobs);
    const auto labels = ds.labels();

    ck.head = train_head(unit, dim, labels, ds.families.size(), cfg, log);
    ck.labels = ds.families;
    return ck;
}

LinearHead train_head(std::span<const float> unit, std::size_t dim, std::span<const std::uint32_t> labels,
                      std::size_t classes, const SupConConfig& cfg, TrainLog* log) {
    cfg.check();
    if (classes < 2) throw UsageError("classifier training needs at least 2 families");
    if (unit.size() != labels.size() * dim) throw std::invalid_argument("train_head: embedding size mismatch");
    for (auto l : labels)
        if (l >= classes) throw FormatError("label " + std::to_string(l) + " outside the family list");
    const std::size_t n = labels.size();
    LinearHead head = init_head(classes, dim, mix_seed(cfg.seed, 4));
    Sgd opt(cfg.learning_rate, cfg.momentum, cfg.weight_decay);
    Rng order_rng(mix_seed(cfg.seed, 5));
    std::vector<float> gw, gb, bu;
    std::vector<std::uint32_t> bl;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double total = 0.0;
        const auto batches = epoch_batches(n, cfg.batch_size, order_rng);
        for (std::size_t step = 0; step < batches.size(); ++step) {
            bu.clear();
            bl.clear();
            for (auto i : batches[step]) {
                bu.insert(bu.end(), unit.begin() + static_cast<std::ptrdiff_t>(i * dim),
                          unit.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
                bl.push_back(labels[i]);
            }
            const double loss = cross_entropy(head, bu, bl, gw, gb, nullptr);
            check_finite(loss, epoch, step, "classifier");
            opt.step(0, head.weight, gw);
            opt.step(1, head.bias, gb);
            total += loss;
        }
        if (log) log->epoch_loss.push_back(batches.empty() ? 0.0 : total / static_cast<double>(batches.size()));
    }
    return head;
}
Checkpoint train_joint(const LabeledDataset& ds, const SupConConfig& cfg, const EncoderConfig& enc_cfg,
                       TrainLog* log, const EpochCallback& on_epoch) {
    cfg.check();
    require_trainable(ds, enc_cfg);
    Checkpoint ck(enc_cfg, mix_seed(cfg.seed, 1), ds.registry_hash);
    auto& enc = ck.encoder;
    const std::size_t dim = enc_cfg.embed_dim;
    LinearHead head = init_head(ds.families.size(), dim, mix_seed(cfg.seed, 4));
    Sgd opt(cfg.learning_rate, cfg.momentum, cfg.weight_decay);
    const std::size_t head_slot = enc.params().size();
    Rng order_rng(mix_seed(cfg.seed, 2));
    const auto labels = ds.labels();
    std::vector<float> gw, gb, gu;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double total = 0.0;
        const auto batches = epoch_batches(ds.size(), cfg.batch_size, order_rng);
        for (std::size_t step = 0; step < batches.size(); ++step) {
            const auto& idx = batches[step];
            std::vector<std::uint32_t> bl;
            for (auto i : idx) bl.push_back(labels[i]);
            auto cache = enc.forward(gather_input(ds, idx), idx.size(), nn::Mode::train);
            auto unit = nn::normalize_embeddings<float>(cache.embeddings, idx.size(), dim);
            const double loss = cross_entropy(head, unit, bl, gw, gb, &gu);
            check_finite(loss, epoch, step, "cross-entropy");
            auto ge = nn::normalize_backward<float>(cache.embeddings, gu, idx.size(), dim);
            apply_encoder_step(opt, enc, enc.backward(cache, ge));
            opt.step(head_slot, head.weight, gw);
            opt.step(head_slot + 1, head.bias, gb);
            total += loss;
        }
        const double mean = batches.empty() ? 0.0 : total / static_cast<double>(batches.size());
        if (log) log->epoch_loss.push_back(mean);
        if (on_epoch) on_epoch(epoch, mean);
    }
    ck.head = std::move(head);
    ck.labels = ds.families;
    return ck;
}

std::uint32_t argmax(std::span<const float> scores) {
    if (scores.empty()) throw std::invalid_argument("argmax of an empty score vector");
    std::uint32_t best = 0;
    for (std::uint32_t c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best]) best = c;
    return best;
}

namespace {

void check_image(const Checkpoint& ck, const FeatureImage& img) {
    if (!ck.head) throw UsageError("checkpoint has no classifier head; run train-classifier first");
    if (img.registry_hash != ck.registry_hash)
        throw HashMismatchError("image registry " + hex64(img.registry_hash) + " differs from checkpoint registry " +
                                hex64(ck.registry_hash));
    if (img.layout.side != ck.encoder.config().input_side)
        throw FormatError("image side " + std::to_string(img.layout.side) + " does not match the encoder input side " +
                          std::to_string(ck.encoder.config().input_side));
}

}  // namespace

std::vector<Prediction> classify_many(const Checkpoint& ck, const std::vector<const FeatureImage*>& images,
                                      std::size_t jobs) {
    std::vector<double> px;
    for (const auto* img : images) {
        check_image(ck, *img);
        px.insert(px.end(), img->pixels.begin(), img->pixels.end());
    }
    const std::size_t dim = ck.encoder.config().embed_dim;
    const auto unit = embed(ck.encoder, to_input(px), images.size(), jobs);
    std::vector<Prediction> out(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        out[i].scores = ck.head->scores(std::span<const float>(unit).subspan(i * dim, dim));
        out[i].label = argmax(out[i].scores);
    }
    return out;
}

Prediction classify(const Checkpoint& ck, const FeatureImage& img) { return classify_many(ck, {&img}).front(); }

Metrics evaluate(const Checkpoint& ck, const LabeledDataset& ds, std::size_t jobs) {
    validate(ds);
    std::vector<std::uint32_t> truth;
    for (const auto& s : ds.samples) {
        const auto& name = ds.families[s.label];
        auto it = std::find(ck.labels.begin(), ck.labels.end(), name);
        if (it == ck.labels.end()) throw FormatError("dataset family '" + name + "' is unknown to the checkpoint");
        truth.push_back(static_cast<std::uint32_t>(it - ck.labels.begin()));
    }
    std::vector<const FeatureImage*> images;
    for (const auto& s : ds.samples) images.push_back(&s.image);
    std::vector<std::uint32_t> pred;
    for (const auto& p : classify_many(ck, images, jobs)) pred.push_back(p.label);
    return compute_metrics(ck.labels, truth, pred);
}

}  // namespace cgfam
