#include "cgfam/nnet/encoder.hpp"

#include "cgfam/common.hpp"

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace cgfam::nn {

namespace {

template <typename T>
using MatR = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Map = Eigen::Map<MatR<T>>;
template <typename T>
using CMap = Eigen::Map<const MatR<T>>;

std::size_t conv_out(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t pad) {
    return (in + 2 * pad - kernel) / stride + 1;
}

template <typename T>
void im2col(const Activation<T>& x, std::size_t k, std::size_t stride, std::size_t pad, std::size_t ho,
            std::size_t wo, std::vector<T>& col) {
    const std::size_t P = x.batch * ho * wo;
    col.assign(x.channels * k * k * P, T(0));
    for (std::size_t c = 0; c < x.channels; ++c)
        for (std::size_t ki = 0; ki < k; ++ki)
            for (std::size_t kj = 0; kj < k; ++kj) {
                T* row = col.data() + ((c * k + ki) * k + kj) * P;
                for (std::size_t b = 0; b < x.batch; ++b) {
                    const T* src = x.data.data() + (c * x.batch + b) * x.plane();
                    for (std::size_t oh = 0; oh < ho; ++oh) {
                        const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * stride + ki) -
                                                  static_cast<std::ptrdiff_t>(pad);
                        if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(x.height)) continue;
                        T* dst = row + (b * ho + oh) * wo;
                        for (std::size_t ow = 0; ow < wo; ++ow) {
                            const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow * stride + kj) -
                                                      static_cast<std::ptrdiff_t>(pad);
                            if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(x.width)) continue;
                            dst[ow] = src[static_cast<std::size_t>(ih) * x.width + static_cast<std::size_t>(iw)];
                        }
                    }
                }
            }
}

template <typename T>
void col2im(const std::vector<T>& col, std::size_t k, std::size_t stride, std::size_t pad, std::size_t ho,
            std::size_t wo, Activation<T>& dx) {
    const std::size_t P = dx.batch * ho * wo;
    for (std::size_t c = 0; c < dx.channels; ++c)
        for (std::size_t ki = 0; ki < k; ++ki)
            for (std::size_t kj = 0; kj < k; ++kj) {
                const T* row = col.data() + ((c * k + ki) * k + kj) * P;
                for (std::size_t b = 0; b < dx.batch; ++b) {
                    T* dst = dx.data.data() + (c * dx.batch + b) * dx.plane();
                    for (std::size_t oh = 0; oh < ho; ++oh) {
                        const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * stride + ki) -
                                                  static_cast<std::ptrdiff_t>(pad);
                        if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(dx.height)) continue;
                        const T* src = row + (b * ho + oh) * wo;
                        for (std::size_t ow = 0; ow < wo; ++ow) {
                            const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow * stride + kj) -
                                                      static_cast<std::ptrdiff_t>(pad);
                            if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(dx.width)) continue;
                            dst[static_cast<std::size_t>(ih) * dx.width + static_cast<std::size_t>(iw)] += src[ow];
                        }
                    }
                }
            }
}

template <typename T>
Activation<T> conv_forward(const Activation<T>& x, const std::vector<T>& weight, std::size_t out_ch, std::size_t k,
                           std::size_t stride, std::size_t pad) {
    Activation<T> y;
    y.channels = out_ch;
    y.batch = x.batch;
    y.height = conv_out(x.height, k, stride, pad);
    y.width = conv_out(x.width, k, stride, pad);
    y.data.resize(out_ch * y.per_channel());
    const std::size_t K = x.channels * k * k;
    const std::size_t P = y.per_channel();
    std::vector<T> col;
    im2col(x, k, stride, pad, y.height, y.width, col);
    Map<T>(y.data.data(), out_ch, P).noalias() = CMap<T>(weight.data(), out_ch, K) * CMap<T>(col.data(), K, P);
    return y;
}

// Accumulates dW; returns dx when requested.
template <typename T>
Activation<T> conv_backward(const Activation<T>& x, const std::vector<T>& weight, const Activation<T>& dy,
                            std::size_t k, std::size_t stride, std::size_t pad, std::vector<T>& dweight,
                            bool need_dx) {
    const std::size_t K = x.channels * k * k;
    const std::size_t P = dy.per_channel();
    std::vector<T> col;
    im2col(x, k, stride, pad, dy.height, dy.width, col);
    CMap<T> dym(dy.data.data(), dy.channels, P);
    Map<T>(dweight.data(), dy.channels, K).noalias() += dym * CMap<T>(col.data(), K, P).transpose();
    Activation<T> dx;
    if (!need_dx) return dx;
    dx.channels = x.channels;
    dx.batch = x.batch;
    dx.height = x.height;
    dx.width = x.width;
    dx.data.assign(x.data.size(), T(0));
    Map<T>(col.data(), K, P).noalias() = CMap<T>(weight.data(), dy.channels, K).transpose() * dym;
    col2im(col, k, stride, pad, dy.height, dy.width, dx);
    return dx;
}

// Batch norm over channel-major data; `n` elements per channel.
template <typename T>
void bn_forward(std::vector<T>& data, std::size_t channels, std::size_t n, const std::vector<T>& gamma,
                const std::vector<T>& beta, const std::vector<T>& run_mean, const std::vector<T>& run_var,
                Mode mode, double eps, BatchNormCache<T>& cache, std::vector<T>* new_mean,
                std::vector<T>* new_var, double momentum) {
    cache.xhat.resize(data.size());
    cache.inv_std.resize(channels);
    for (std::size_t c = 0; c < channels; ++c) {
        T* x = data.data() + c * n;
        T mean, var;
        if (mode == Mode::train) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += x[i];
            const double m = s / static_cast<double>(n);
            double v = 0.0;
            for (std::size_t i = 0; i < n; ++i) v += (x[i] - m) * (x[i] - m);
            v /= static_cast<double>(n);
            mean = static_cast<T>(m);
            var = static_cast<T>(v);
            if (new_mean) {
                const double unbiased = n > 1 ? v * static_cast<double>(n) / static_cast<double>(n - 1) : v;
                (*new_mean)[c] = static_cast<T>((1.0 - momentum) * run_mean[c] + momentum * m);
                (*new_var)[c] = static_cast<T>((1.0 - momentum) * run_var[c] + momentum * unbiased);
            }
        } else {
            mean = run_mean[c];
            var = run_var[c];
        }
        const T inv = T(1) / std::sqrt(var + static_cast<T>(eps));
        cache.inv_std[c] = inv;
        T* xh = cache.xhat.data() + c * n;
        for (std::size_t i = 0; i < n; ++i) {
            xh[i] = (x[i] - mean) * inv;
            x[i] = gamma[c] * xh[i] + beta[c];
        }
    }
}

template <typename T>
void bn_backward(std::vector<T>& dy, std::size_t channels, std::size_t n, const std::vector<T>& gamma,
                 const BatchNormCache<T>& cache, Mode mode, std::vector<T>& dgamma, std::vector<T>& dbeta) {
    for (std::size_t c = 0; c < channels; ++c) {
        T* g = dy.data() + c * n;
        const T* xh = cache.xhat.data() + c * n;
        T sg = 0, sgx = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sg += g[i];
            sgx += g[i] * xh[i];
        }
        dgamma[c] += sgx;
        dbeta[c] += sg;
        const T scale = gamma[c] * cache.inv_std[c];
        if (mode == Mode::train) {
            const T inv_n = T(1) / static_cast<T>(n);
            for (std::size_t i = 0; i < n; ++i) g[i] = scale * (g[i] - inv_n * sg - xh[i] * inv_n * sgx);
        } else {
            for (std::size_t i = 0; i < n; ++i) g[i] *= scale;
        }
    }
}

template <typename T>
void relu_inplace(std::vector<T>& v) {
    for (T& x : v) x = x > T(0) ? x : T(0);
}

template <typename T>
void relu_mask(std::vector<T>& grad, const std::vector<T>& out) {
    for (std::size_t i = 0; i < grad.size(); ++i)
        if (!(out[i] > T(0))) grad[i] = T(0);
}

}  // namespace

EncoderConfig EncoderConfig::standard(std::size_t side) {
    EncoderConfig c;
    c.input_side = side;
    return c;
}

EncoderConfig EncoderConfig::tiny(std::size_t side) {
    EncoderConfig c;
    c.input_side = side;
    c.stem_channels = 2;
    c.stages = {{1, 2, 1}, {1, 3, 2}, {1, 4, 2}};
    c.embed_dim = 8;
    return c;
}

std::size_t EncoderConfig::block_count() const {
    std::size_t n = 0;
    for (const auto& s : stages) n += s.blocks;
    return n;
}

std::size_t EncoderConfig::feature_side() const {
    std::size_t s = input_side;
    for (const auto& st : stages)
        if (st.blocks > 0) s = conv_out(s, 3, st.stride, 1);
    return s;
}

std::uint64_t EncoderConfig::digest() const {
    Digest d;
    d.u64(input_side).u64(stem_channels).u64(stages.size());
    for (const auto& s : stages) d.u64(s.blocks).u64(s.channels).u64(s.stride);
    d.u64(embed_dim).f64(bn_eps).f64(bn_momentum);
    return d.value();
}

template <typename T>
typename Encoder<T>::ConvSpec Encoder<T>::add_conv(const std::string& name, std::size_t in, std::size_t out,
                                                   std::size_t kernel, std::size_t stride, std::uint64_t seed) {
    ConvSpec s{in, out, kernel, stride, kernel / 2, params_.size()};
    Param<T> p{name + ".weight", {out, in, kernel, kernel}, std::vector<T>(out * in * kernel * kernel)};
    // He-uniform: bound sqrt(6 / fan_in).
    const double bound = std::sqrt(6.0 / static_cast<double>(in * kernel * kernel));
    Rng rng(mix_seed(seed, params_.size()));
    for (T& w : p.value) w = static_cast<T>(uniform(rng, -bound, bound));
    params_.push_back(std::move(p));
    return s;
}

template <typename T>
typename Encoder<T>::BnSpec Encoder<T>::add_bn(const std::string& name, std::size_t channels) {
    BnSpec s;
    s.channels = channels;
    s.gamma = params_.size();
    params_.push_back({name + ".gamma", {channels}, std::vector<T>(channels, T(1))});
    s.beta = params_.size();
    params_.push_back({name + ".beta", {channels}, std::vector<T>(channels, T(0))});
    s.run_mean = buffers_.size();
    buffers_.push_back({name + ".running_mean", {channels}, std::vector<T>(channels, T(0))});
    s.run_var = buffers_.size();
    buffers_.push_back({name + ".running_var", {channels}, std::vector<T>(channels, T(1))});
    return s;
}

template <typename T>
Encoder<T>::Encoder(EncoderConfig config, std::uint64_t seed) : config_(std::move(config)), seed_(seed) {
    if (config_.input_side < 2 || config_.stem_channels == 0 || config_.embed_dim == 0)
        throw std::invalid_argument("invalid encoder configuration");
    stem_ = add_conv("stem.conv", 1, config_.stem_channels, 3, 1, seed);
    stem_bn_ = add_bn("stem.bn", config_.stem_channels);
    std::size_t in = config_.stem_channels;
    for (std::size_t si = 0; si < config_.stages.size(); ++si) {
        const auto& st = config_.stages[si];
        for (std::size_t bi = 0; bi < st.blocks; ++bi) {
            const std::string name = "stage" + std::to_string(si + 1) + ".block" + std::to_string(bi);
            const std::size_t stride = bi == 0 ? st.stride : 1;
            BlockSpec b;
            b.conv1 = add_conv(name + ".conv1", in, st.channels, 3, stride, seed);
            b.bn1 = add_bn(name + ".bn1", st.channels);
            b.conv2 = add_conv(name + ".conv2", st.channels, st.channels, 3, 1, seed);
            b.bn2 = add_bn(name + ".bn2", st.channels);
            b.projection = stride != 1 || in != st.channels;
            if (b.projection) {
                b.shortcut = add_conv(name + ".shortcut", in, st.channels, 1, stride, seed);
                b.shortcut_bn = add_bn(name + ".shortcut_bn", st.channels);
            }
            blocks_.push_back(b);
            in = st.channels;
        }
    }
    const std::size_t feat = config_.feature_channels();
    const std::size_t dim = config_.embed_dim;
    fc_weight_ = params_.size();
    {
        Param<T> p{"head.fc.weight", {dim, feat}, std::vector<T>(dim * feat)};
        const double bound = 1.0 / std::sqrt(static_cast<double>(feat));
        Rng rng(mix_seed(seed, params_.size()));
        for (T& w : p.value) w = static_cast<T>(uniform(rng, -bound, bound));
        params_.push_back(std::move(p));
    }
    fc_bias_ = params_.size();
    params_.push_back({"head.fc.bias", {dim}, std::vector<T>(dim, T(0))});
    head_bn_ = add_bn("head.bn", dim);
}

template <typename T>
std::size_t Encoder<T>::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
}

template <typename T>
ForwardCache<T> Encoder<T>::forward(std::span<const T> input, std::size_t batch, Mode mode) {
    return run(input, batch, mode, mode == Mode::train ? &buffers_ : nullptr);
}

template <typename T>
ForwardCache<T> Encoder<T>::forward_eval(std::span<const T> input, std::size_t batch) const {
    return run(input, batch, Mode::eval, nullptr);
}

template <typename T>
ForwardCache<T> Encoder<T>::run(std::span<const T> input, std::size_t batch, Mode mode,
                                std::vector<Param<T>>* stats) const {
    const std::size_t side = config_.input_side;
    if (batch == 0 || input.size() != batch * side * side)
        throw std::invalid_argument("encoder input has " + std::to_string(input.size()) + " values, expected " +
                                    std::to_string(batch) + "x" + std::to_string(side) + "x" + std::to_string(side));
    const double eps = config_.bn_eps, mom = config_.bn_momentum;
    ForwardCache<T> cache;
    cache.owner = this;
    cache.version = version_;
    cache.mode = mode;
    cache.batch = batch;

    auto bn = [&](std::vector<T>& data, std::size_t channels, std::size_t n, const BnSpec& s,
                  BatchNormCache<T>& bc) {
        std::vector<T>* nm = stats ? &(*stats)[s.run_mean].value : nullptr;
        std::vector<T>* nv = stats ? &(*stats)[s.run_var].value : nullptr;
        bn_forward(data, channels, n, params_[s.gamma].value, params_[s.beta].value, buffers_[s.run_mean].value,
                   buffers_[s.run_var].value, mode, eps, bc, nm, nv, mom);
    };

    cache.input = {1, batch, side, side, std::vector<T>(input.begin(), input.end())};
    Activation<T> x = conv_forward(cache.input, params_[stem_.weight].value, stem_.out, 3, 1, 1);
    bn(x.data, x.channels, x.per_channel(), stem_bn_, cache.stem_bn);
    relu_inplace(x.data);
    cache.stem_out = x;

    cache.blocks.resize(blocks_.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const BlockSpec& b = blocks_[i];
        BlockCache<T>& bc = cache.blocks[i];
        bc.input = std::move(x);
        Activation<T> h = conv_forward(bc.input, params_[b.conv1.weight].value, b.conv1.out, 3, b.conv1.stride, 1);
        bn(h.data, h.channels, h.per_channel(), b.bn1, bc.bn1);
        relu_inplace(h.data);
        bc.h1 = h;
        Activation<T> y = conv_forward(bc.h1, params_[b.conv2.weight].value, b.conv2.out, 3, 1, 1);
        bn(y.data, y.channels, y.per_channel(), b.bn2, bc.bn2);
        if (b.projection) {
            Activation<T> s = conv_forward(bc.input, params_[b.shortcut.weight].value, b.shortcut.out, 1,
                                           b.shortcut.stride, 0);
            bn(s.data, s.channels, s.per_channel(), b.shortcut_bn, bc.shortcut_bn);
            for (std::size_t j = 0; j < y.data.size(); ++j) y.data[j] += s.data[j];
        } else {
            for (std::size_t j = 0; j < y.data.size(); ++j) y.data[j] += bc.input.data[j];
        }
        relu_inplace(y.data);
        bc.out = y;
        x = std::move(y);
    }

    const Activation<T>& feat = cache.features();
    const std::size_t C = feat.channels, plane = feat.plane(), D = config_.embed_dim;
    cache.pooled.assign(C * batch, T(0));  // channel-major C x B
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t b = 0; b < batch; ++b) {
            const T* src = feat.data.data() + (c * batch + b) * plane;
            T s = 0;
            for (std::size_t j = 0; j < plane; ++j) s += src[j];
            cache.pooled[c * batch + b] = s / static_cast<T>(plane);
        }
    std::vector<T> z(D * batch);  // D x B
    Map<T> zm(z.data(), D, batch);
    zm.noalias() = CMap<T>(params_[fc_weight_].value.data(), D, C) * CMap<T>(cache.pooled.data(), C, batch);
    for (std::size_t d = 0; d < D; ++d) zm.row(d).array() += params_[fc_bias_].value[d];
    bn(z, D, batch, head_bn_, cache.head_bn);
    cache.embeddings.resize(batch * D);
    Map<T>(cache.embeddings.data(), batch, D) = zm.transpose();
    for (T v : cache.embeddings)
        if (!std::isfinite(static_cast<double>(v))) throw NumericError("non-finite embedding in encoder forward");
    return cache;
}

template <typename T>
Gradients<T> Encoder<T>::backward(const ForwardCache<T>& cache, std::span<const T> grad_embeddings) const {
    if (cache.owner != this || cache.version != version_)
        throw std::logic_error("backward called with a stale or foreign forward cache");
    const std::size_t batch = cache.batch, D = config_.embed_dim;
    if (grad_embeddings.size() != batch * D) throw std::invalid_argument("embedding gradient has wrong shape");
    const Mode mode = cache.mode;

    Gradients<T> g;
    g.params.resize(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) g.params[i].assign(params_[i].value.size(), T(0));
    auto bn_back = [&](std::vector<T>& d, std::size_t channels, std::size_t n, const BnSpec& s,
                       const BatchNormCache<T>& bc) {
        bn_backward(d, channels, n, params_[s.gamma].value, bc, mode, g.params[s.gamma], g.params[s.beta]);
    };

    // Head: embedding BN, affine map, global average pool.
    std::vector<T> dz(D * batch);
    Map<T>(dz.data(), D, batch) = CMap<T>(grad_embeddings.data(), batch, D).transpose();
    bn_back(dz, D, batch, head_bn_, cache.head_bn);

    const Activation<T>& feat = cache.features();
    const std::size_t C = feat.channels, plane = feat.plane();
    CMap<T> dzm(dz.data(), D, batch);
    Map<T>(g.params[fc_weight_].data(), D, C).noalias() += dzm * CMap<T>(cache.pooled.data(), C, batch).transpose();
    for (std::size_t d = 0; d < D; ++d) {
        // plain loop: Eigen's vectorised sum peels by address, which breaks reproducibility
        T acc = 0;
        for (std::size_t b = 0; b < batch; ++b) acc += dz[d * batch + b];
        g.params[fc_bias_][d] += acc;
    }
    std::vector<T> dpooled(C * batch);
    Map<T>(dpooled.data(), C, batch).noalias() = CMap<T>(params_[fc_weight_].value.data(), D, C).transpose() * dzm;

    Activation<T> dx{C, batch, feat.height, feat.width, std::vector<T>(feat.data.size())};
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t b = 0; b < batch; ++b) {
            const T v = dpooled[c * batch + b] / static_cast<T>(plane);
            T* dst = dx.data.data() + (c * batch + b) * plane;
            for (std::size_t j = 0; j < plane; ++j) dst[j] = v;
        }
    g.features = dx;

    for (std::size_t i = blocks_.size(); i-- > 0;) {
        const BlockSpec& b = blocks_[i];
        const BlockCache<T>& bc = cache.blocks[i];
        relu_mask(dx.data, bc.out.data);
        // Main branch.
        Activation<T> dmain = dx;
        bn_back(dmain.data, dmain.channels, dmain.per_channel(), b.bn2, bc.bn2);
        Activation<T> dh1 = conv_backward(bc.h1, params_[b.conv2.weight].value, dmain, 3, 1, 1,
                                          g.params[b.conv2.weight], true);
        relu_mask(dh1.data, bc.h1.data);
        bn_back(dh1.data, dh1.channels, dh1.per_channel(), b.bn1, bc.bn1);
        Activation<T> din = conv_backward(bc.input, params_[b.conv1.weight].value, dh1, 3, b.conv1.stride, 1,
                                          g.params[b.conv1.weight], true);
        // Shortcut branch.
        if (b.projection) {
            Activation<T> ds = dx;
            bn_back(ds.data, ds.channels, ds.per_channel(), b.shortcut_bn, bc.shortcut_bn);
            Activation<T> dsc = conv_backward(bc.input, params_[b.shortcut.weight].value, ds, 1, b.shortcut.stride,
                                              0, g.params[b.shortcut.weight], true);
            for (std::size_t j = 0; j < din.data.size(); ++j) din.data[j] += dsc.data[j];
        } else {
            for (std::size_t j = 0; j < din.data.size(); ++j) din.data[j] += dx.data[j];
        }
        dx = std::move(din);
    }

    relu_mask(dx.data, cache.stem_out.data);
    bn_back(dx.data, dx.channels, dx.per_channel(), stem_bn_, cache.stem_bn);
    Activation<T> dinput =
        conv_backward(cache.input, params_[stem_.weight].value, dx, 3, 1, 1, g.params[stem_.weight], true);
    g.input = std::move(dinput.data);
    return g;
}

template <typename T>
std::vector<T> normalize_embeddings(std::span<const T> e, std::size_t rows, std::size_t dim) {
    if (e.size() != rows * dim) throw std::invalid_argument("normalize_embeddings: shape mismatch");
    std::vector<T> out(e.begin(), e.end());
    for (std::size_t r = 0; r < rows; ++r) {
        T* row = out.data() + r * dim;
        double s = 0.0;
        for (std::size_t j = 0; j < dim; ++j) s += static_cast<double>(row[j]) * row[j];
        if (s == 0.0) continue;
        const T inv = static_cast<T>(1.0 / std::sqrt(s));
        for (std::size_t j = 0; j < dim; ++j) row[j] *= inv;
    }
    return out;
}

template <typename T>
std::vector<T> normalize_backward(std::span<const T> e, std::span<const T> grad_normalized, std::size_t rows,
                                  std::size_t dim) {
    if (e.size() != rows * dim || grad_normalized.size() != rows * dim)
        throw std::invalid_argument("normalize_backward: shape mismatch");
    std::vector<T> out(rows * dim, T(0));
    for (std::size_t r = 0; r < rows; ++r) {
        const T* x = e.data() + r * dim;
        const T* gy = grad_normalized.data() + r * dim;
        double s = 0.0;
        for (std::size_t j = 0; j < dim; ++j) s += static_cast<double>(x[j]) * x[j];
        if (s == 0.0) continue;
        const double norm = std::sqrt(s);
        double dot = 0.0;  // u . g
        for (std::size_t j = 0; j < dim; ++j) dot += (x[j] / norm) * gy[j];
        for (std::size_t j = 0; j < dim; ++j)
            out[r * dim + j] = static_cast<T>((gy[j] - (x[j] / norm) * dot) / norm);
    }
    return out;
}

template class Encoder<float>;
template class Encoder<double>;
template std::vector<float> normalize_embeddings(std::span<const float>, std::size_t, std::size_t);
template std::vector<double> normalize_embeddings(std::span<const double>, std::size_t, std::size_t);
template std::vector<float> normalize_backward(std::span<const float>, std::span<const float>, std::size_t,
                                               std::size_t);
template std::vector<double> normalize_backward(std::span<const double>, std::span<const double>, std::size_t,
                                                std::size_t);

}  // namespace cgfam::nn
