#include "cgfam/nnet/checkpoint.hpp"

#include "cgfam/common.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace cgfam::nn {

std::vector<float> LinearHead::scores(std::span<const float> u) const {
    if (u.size() != dim) throw std::invalid_argument("head input has wrong dimension");
    std::vector<float> s(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        double acc = bias[c];
        const float* w = weight.data() + c * dim;
        for (std::size_t j = 0; j < dim; ++j) acc += static_cast<double>(w[j]) * u[j];
        s[c] = static_cast<float>(acc);
    }
    return s;
}

namespace {

constexpr char kMagic[4] = {'C', 'G', 'F', 'C'};
constexpr std::uint32_t kVersion = 1;

void write_tensors(BinaryWriter& w, Digest& d, const std::vector<Param<float>>& ts) {
    w.u32(static_cast<std::uint32_t>(ts.size()));
    for (const auto& t : ts) {
        w.str(t.name);
        w.u64(t.value.size());
        d.str(t.name);
        for (float v : t.value) {
            w.f32(v);
            d.u64(std::bit_cast<std::uint32_t>(v));
        }
    }
}

void read_tensors(BinaryReader& r, Digest& d, std::vector<Param<float>>& ts) {
    if (r.u32() != ts.size()) throw FormatError("checkpoint tensor count does not match its configuration");
    for (auto& t : ts) {
        const std::string name = r.str();
        if (name != t.name) throw FormatError("checkpoint tensor '" + name + "' where '" + t.name + "' was expected");
        if (r.u64() != t.value.size()) throw FormatError("checkpoint tensor '" + name + "' has the wrong size");
        d.str(name);
        for (float& v : t.value) {
            v = r.f32();
            d.u64(std::bit_cast<std::uint32_t>(v));
        }
    }
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& ck) {
    std::ostringstream os;
    BinaryWriter w(os);
    Digest d;
    const EncoderConfig& c = ck.encoder.config();
    w.raw(kMagic, 4);
    w.u32(kVersion);
    w.u64(c.input_side);
    w.u64(c.stem_channels);
    w.u32(static_cast<std::uint32_t>(c.stages.size()));
    for (const auto& s : c.stages) {
        w.u64(s.blocks);
        w.u64(s.channels);
        w.u64(s.stride);
    }
    w.u64(c.embed_dim);
    w.f64(c.bn_eps);
    w.f64(c.bn_momentum);
    w.u64(c.digest());
    w.u64(ck.registry_hash);
    w.u64(ck.encoder.seed());
    w.u32(static_cast<std::uint32_t>(ck.labels.size()));
    for (const auto& l : ck.labels) w.str(l);
    write_tensors(w, d, ck.encoder.params());
    write_tensors(w, d, ck.encoder.buffers());
    w.u32(ck.head ? 1 : 0);
    if (ck.head) {
        w.u64(ck.head->classes);
        w.u64(ck.head->dim);
        for (float v : ck.head->weight) {
            w.f32(v);
            d.u64(std::bit_cast<std::uint32_t>(v));
        }
        for (float v : ck.head->bias) {
            w.f32(v);
            d.u64(std::bit_cast<std::uint32_t>(v));
        }
    }
    w.u64(d.value());
    return os.str();
}

Checkpoint decode_checkpoint(std::string_view bytes, std::optional<std::uint64_t> expected_registry) {
    std::istringstream is{std::string(bytes)};
    BinaryReader r(is);
    char magic[4];
    r.raw(magic, 4);
    if (!std::equal(magic, magic + 4, kMagic)) throw FormatError("not a checkpoint file");
    const std::uint32_t version = r.u32();
    if (version != kVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));
    EncoderConfig c;
    c.input_side = r.u64();
    c.stem_channels = r.u64();
    const std::uint32_t nstages = r.u32();
    if (nstages > 64) throw FormatError("checkpoint declares too many stages");
    c.stages.resize(nstages);
    for (auto& s : c.stages) {
        s.blocks = r.u64();
        s.channels = r.u64();
        s.stride = r.u64();
    }
    c.embed_dim = r.u64();
    c.bn_eps = r.f64();
    c.bn_momentum = r.f64();
    if (r.u64() != c.digest()) throw FormatError("checkpoint configuration digest mismatch");
    const std::uint64_t registry = r.u64();
    if (expected_registry && *expected_registry != registry)
        throw HashMismatchError("checkpoint was trained against a different API registry (" + hex64(registry) +
                                " vs " + hex64(*expected_registry) + ")");
    const std::uint64_t seed = r.u64();
    Checkpoint ck(c, seed, registry);
    const std::uint32_t nlabels = r.u32();
    for (std::uint32_t i = 0; i < nlabels; ++i) ck.labels.push_back(r.str());
    Digest d;
    read_tensors(r, d, ck.encoder.mutable_params());
    read_tensors(r, d, ck.encoder.mutable_buffers());
    if (r.u32() == 1) {
        const std::size_t classes = r.u64();
        const std::size_t dim = r.u64();
        if (classes != ck.labels.size() || dim != c.embed_dim) throw FormatError("checkpoint head shape mismatch");
        LinearHead h(classes, dim);
        for (float& v : h.weight) {
            v = r.f32();
            d.u64(std::bit_cast<std::uint32_t>(v));
        }
        for (float& v : h.bias) {
            v = r.f32();
            d.u64(std::bit_cast<std::uint32_t>(v));
        }
        ck.head = std::move(h);
    }
    if (r.u64() != d.value()) throw FormatError("checkpoint payload digest mismatch (corrupted file)");
    return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) { write_file(path, encode_checkpoint(ck)); }

Checkpoint load_checkpoint(const std::string& path, std::optional<std::uint64_t> expected_registry) {
    return decode_checkpoint(read_file(path), expected_registry);
}

}  // namespace cgfam::nn
