#include "cgfam/common.hpp"
#include "cgfam/nnet/checkpoint.hpp"
#include "cgfam/nnet/encoder.hpp"
#include "oracles/gradcheck.hpp"

#include <doctest.h>

#include <cmath>

using namespace cgfam;
using namespace cgfam::nn;

namespace {

std::vector<double> random_input(std::size_t n, Rng& rng) {
    std::vector<double> x(n);
    for (auto& v : x) v = uniform01(rng) < 0.4 ? 0.0 : uniform01(rng);
    return x;
}

oracle::Objective objective(std::size_t batch, std::size_t dim, Rng& rng) {
    oracle::Objective o;
    for (std::size_t i = 0; i < batch; ++i) o.labels.push_back(static_cast<std::uint32_t>(i / 2));
    o.probe.resize(batch * dim);
    for (auto& p : o.probe) p = uniform(rng, -0.3, 0.3);
    return o;
}

}  // namespace

TEST_CASE("standard encoder shape") {
    auto cfg = EncoderConfig::standard(16);
    CHECK(cfg.block_count() == 6);
    CHECK(cfg.feature_channels() == 64);
    CHECK(cfg.feature_side() == 4);
    Encoder<float> enc(cfg, 1);
    std::vector<float> x(2 * 16 * 16, 0.5f);
    auto c = enc.forward_eval(x, 2);
    CHECK(c.embeddings.size() == 2 * 512);
    CHECK(c.features().channels == 64);
    CHECK(c.features().height == 4);
    CHECK(EncoderConfig::standard(42).feature_side() == 11);
}

TEST_CASE("tiny encoder gradients match finite differences") {
    Rng rng(17);
    for (auto mode : {Mode::train, Mode::eval}) {
        Encoder<double> enc(EncoderConfig::tiny(8), 5);
        if (mode == Mode::eval) {
            // move running statistics away from their initial values
            for (auto& b : enc.mutable_buffers())
                for (auto& v : b.value) v = b.name.find("var") != std::string::npos ? uniform(rng, 0.5, 2.0) : uniform(rng, -0.2, 0.2);
        }
        const std::size_t batch = 4;
        auto x = random_input(batch * 64, rng);
        auto obj = objective(batch, enc.config().embed_dim, rng);
        auto r = oracle::check_encoder(enc, x, batch, mode, obj);
        for (const auto& g : r.groups) {
            INFO(g.name);
            CHECK(g.rel < 1e-4);
        }
    }
}

TEST_CASE("float and double encoders agree from the same seed") {
    Encoder<float> f(EncoderConfig::tiny(8), 3);
    Encoder<double> d(EncoderConfig::tiny(8), 3);
    Rng rng(4);
    auto x = random_input(3 * 64, rng);
    std::vector<float> xf(x.begin(), x.end());
    auto cf = f.forward(xf, 3, Mode::train);
    auto cd = d.forward(x, 3, Mode::train);
    for (std::size_t i = 0; i < cf.embeddings.size(); ++i) CHECK(cf.embeddings[i] == doctest::Approx(cd.embeddings[i]).epsilon(1e-3));
}

TEST_CASE("train mode updates running statistics, eval mode does not") {
    Encoder<float> enc(EncoderConfig::tiny(8), 9);
    Rng rng(1);
    auto xd = random_input(4 * 64, rng);
    std::vector<float> x(xd.begin(), xd.end());
    const auto before = enc.buffers();
    enc.forward_eval(x, 4);
    CHECK(enc.buffers().front().value == before.front().value);
    enc.forward(x, 4, Mode::train);
    CHECK(enc.buffers().front().value != before.front().value);
}

TEST_CASE("stale caches are rejected") {
    Encoder<float> enc(EncoderConfig::tiny(8), 9);
    std::vector<float> x(2 * 64, 0.3f);
    auto c = enc.forward(x, 2, Mode::train);
    enc.mutable_params()[0].value[0] += 1.0f;
    std::vector<float> g(2 * enc.config().embed_dim, 1.0f);
    CHECK_THROWS_AS(enc.backward(c, g), std::logic_error);
}

TEST_CASE("normalisation backward matches finite differences") {
    Rng rng(2);
    const std::size_t rows = 3, dim = 5;
    std::vector<double> e(rows * dim), w(rows * dim);
    for (auto& v : e) v = uniform(rng, -1, 1);
    for (auto& v : w) v = uniform(rng, -1, 1);
    auto f = [&](const std::vector<double>& x) {
        auto u = normalize_embeddings<double>(x, rows, dim);
        double s = 0;
        for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * u[i];
        return s;
    };
    auto g = normalize_backward<double>(e, w, rows, dim);
    for (std::size_t i = 0; i < e.size(); ++i) {
        auto a = e, b = e;
        a[i] += 1e-6;
        b[i] -= 1e-6;
        CHECK(g[i] == doctest::Approx((f(a) - f(b)) / 2e-6).epsilon(1e-6));
    }
    auto u = normalize_embeddings<double>(e, rows, dim);
    for (std::size_t r = 0; r < rows; ++r) {
        double n = 0;
        for (std::size_t k = 0; k < dim; ++k) n += u[r * dim + k] * u[r * dim + k];
        CHECK(n == doctest::Approx(1.0));
    }
    std::vector<double> zero(dim, 0.0);
    CHECK(normalize_embeddings<double>(zero, 1, dim) == zero);
}

TEST_CASE("checkpoint round-trip and integrity checks") {
    Checkpoint ck(EncoderConfig::tiny(8), 21, 0xabcdef);
    ck.labels = {"a", "b", "c"};
    ck.head = LinearHead(3, ck.encoder.config().embed_dim);
    for (std::size_t i = 0; i < ck.head->weight.size(); ++i) ck.head->weight[i] = 0.01f * static_cast<float>(i);
    ck.head->bias = {1.0f, -1.0f, 0.5f};
    auto bytes = encode_checkpoint(ck);
    auto back = decode_checkpoint(bytes, 0xabcdef);
    CHECK(back.labels == ck.labels);
    CHECK(back.seed == 21);
    CHECK(back.encoder.config() == ck.encoder.config());
    for (std::size_t p = 0; p < ck.encoder.params().size(); ++p)
        CHECK(back.encoder.params()[p].value == ck.encoder.params()[p].value);
    REQUIRE(back.head);
    CHECK(back.head->weight == ck.head->weight);
    CHECK(back.head->bias == ck.head->bias);
    CHECK(encode_checkpoint(back) == bytes);

    CHECK_THROWS_AS(decode_checkpoint(bytes, 0x1234), HashMismatchError);
    auto corrupt = bytes;
    corrupt[corrupt.size() / 2] ^= 0x40;
    CHECK_THROWS_AS(decode_checkpoint(corrupt), FormatError);
    CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, 10)), FormatError);
}

TEST_CASE("linear head scores") {
    LinearHead h(2, 3);
    h.weight = {1, 0, 0, 0, 1, 0};
    h.bias = {0.5f, 0};
    std::vector<float> u = {0.0f, 1.0f, 0.0f};
    auto s = h.scores(u);
    CHECK(s[0] == 0.5f);
    CHECK(s[1] == 1.0f);
}
