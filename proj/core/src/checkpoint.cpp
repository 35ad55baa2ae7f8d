// Copyright 2026 rfbsr authors
// SPDX-License-Identifier: Apache-2.0

#include "rfbsr/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rfbsr {

namespace {

constexpr char kMagic[6] = {'R', 'F', 'B', 'S', 'R', '\0'};

uint64_t fnv1a64(const uint8_t* data, size_t n) {
    uint64_t h = 1469598103934665603ull;
    for (size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) { le(v, 2); }
    void u32(uint32_t v) { le(v, 4); }
    void u64(uint64_t v) { le(v, 8); }
    void f32(float v) { u32(std::bit_cast<uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
    void bytes(const void* p, size_t n) {
        const uint8_t* b = static_cast<const uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    const std::vector<uint8_t>& data() const { return buf_; }

private:
    void le(uint64_t v, int n) {
        for (int i = 0; i < n; ++i) buf_.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
    }
    std::vector<uint8_t> buf_;
};

class ByteReader {
public:
    ByteReader(const uint8_t* p, size_t n) : p_(p), n_(n) {}
    uint8_t u8() { return static_cast<uint8_t>(le(1)); }
    uint16_t u16() { return static_cast<uint16_t>(le(2)); }
    uint32_t u32() { return static_cast<uint32_t>(le(4)); }
    uint64_t u64() { return le(8); }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str(size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(p_ + pos_), n);
        pos_ += n;
        return s;
    }
    size_t remaining() const { return n_ - pos_; }

private:
    void need(size_t n) {
        if (pos_ + n > n_) throw CheckpointError("checkpoint file truncated");
    }
    uint64_t le(int n) {
        need(static_cast<size_t>(n));
        uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= static_cast<uint64_t>(p_[pos_ + i]) << (8 * i);
        pos_ += static_cast<size_t>(n);
        return v;
    }
    const uint8_t* p_;
    size_t n_;
    size_t pos_ = 0;
};

// -- SHA-256 (FIPS 180-4) -----------------------------------------------------

constexpr uint32_t kSha256K[64] = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

void sha256_block(uint32_t state[8], const uint8_t* p) {
    uint32_t w[64];
    for (int i = 0; i < 16; ++i)
        w[i] = (uint32_t(p[4 * i]) << 24) | (uint32_t(p[4 * i + 1]) << 16) | (uint32_t(p[4 * i + 2]) << 8) |
               uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
        const uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
        const uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
        w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    uint32_t a = state[0], b = state[1], c = state[2], d = state[3];
    uint32_t e = state[4], f = state[5], g = state[6], h = state[7];
    for (int i = 0; i < 64; ++i) {
        const uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
        const uint32_t ch = (e & f) ^ (~e & g);
        const uint32_t t1 = h + s1 + ch + kSha256K[i] + w[i];
        const uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
        const uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
        const uint32_t t2 = s0 + maj;
        h = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }
    state[0] += a;
    state[1] += b;
    state[2] += c;
    state[3] += d;
    state[4] += e;
    state[5] += f;
    state[6] += g;
    state[7] += h;
}

}  // namespace

Fingerprint sha256(std::string_view bytes) {
    uint32_t state[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                         0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    const size_t full = bytes.size() / 64;
    for (size_t i = 0; i < full; ++i)
        sha256_block(state, reinterpret_cast<const uint8_t*>(bytes.data()) + 64 * i);

    uint8_t tail[128] = {0};
    const size_t rem = bytes.size() - full * 64;
    std::memcpy(tail, bytes.data() + full * 64, rem);
    tail[rem] = 0x80;
    const size_t tail_len = rem + 9 <= 64 ? 64 : 128;
    const uint64_t bitlen = static_cast<uint64_t>(bytes.size()) * 8;
    for (int i = 0; i < 8; ++i) tail[tail_len - 1 - i] = static_cast<uint8_t>((bitlen >> (8 * i)) & 0xff);
    sha256_block(state, tail);
    if (tail_len == 128) sha256_block(state, tail + 64);

    Fingerprint out{};
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 4; ++j) out[static_cast<size_t>(4 * i + j)] = static_cast<uint8_t>(state[i] >> (24 - 8 * j));
    return out;
}

std::string canonical_config_string(const GeneratorConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "generator-v1"
       << ";in=" << cfg.in_channels << ";out=" << cfg.out_channels << ";rrdb=" << cfg.n_rrdb
       << ";rrfdb=" << cfg.n_rrfdb << ";rfb=" << cfg.rfb_per_rrfdb << ";base=" << cfg.base_channels
       << ";growth=" << cfg.growth << ";scale=" << cfg.scale << ";beta=" << cfg.residual_scale
       << ";rfb_s=" << cfg.rfb_residual_scale << ";alpha=" << cfg.lrelu_alpha << ";plan=";
    for (size_t i = 0; i < cfg.upsample_plan.size(); ++i) {
        if (i) os << ",";
        os << (cfg.upsample_plan[i].kind == UpsampleKind::nni ? "nni" : "spc");
        if (!cfg.upsample_plan[i].with_rfb) os << "-bare";
    }
    return os.str();
}

Fingerprint fingerprint_of(const GeneratorConfig& cfg) { return sha256(canonical_config_string(cfg)); }

std::string fingerprint_hex(const Fingerprint& fp) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (uint8_t b : fp) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

namespace detail {

StoredTensor store(const Tensor<float>& t) {
    StoredTensor s;
    s.dtype = kDtypeF32;
    s.shape = t.shape;
    s.f32 = t.data;
    return s;
}

StoredTensor store(const Tensor<double>& t) {
    StoredTensor s;
    s.dtype = kDtypeF64;
    s.shape = t.shape;
    s.f64 = t.data;
    return s;
}

void restore(const StoredTensor& s, Tensor<float>& out) {
    out = Tensor<float>(s.shape, s.f32);
}

void restore(const StoredTensor& s, Tensor<double>& out) {
    out = Tensor<double>(s.shape, s.f64);
}

}  // namespace detail

void save_checkpoint_data(const CheckpointData& data, const std::filesystem::path& path) {
    ByteWriter w;
    w.bytes(kMagic, sizeof(kMagic));
    w.u16(data.version);
    w.bytes(data.fingerprint.data(), data.fingerprint.size());
    w.u64(data.meta.step);
    w.u8(data.meta.stage);
    w.u64(data.meta.seed);
    w.u32(static_cast<uint32_t>(data.meta.source_steps.size()));
    for (uint64_t s : data.meta.source_steps) w.u64(s);
    w.u64(data.tensors.size());
    for (const auto& [name, t] : data.tensors) {  // std::map iterates sorted by name
        w.u32(static_cast<uint32_t>(name.size()));
        w.bytes(name.data(), name.size());
        w.u8(t.dtype);
        w.u8(4);
        w.u64(static_cast<uint64_t>(t.shape.n));
        w.u64(static_cast<uint64_t>(t.shape.c));
        w.u64(static_cast<uint64_t>(t.shape.h));
        w.u64(static_cast<uint64_t>(t.shape.w));
        if (t.dtype == kDtypeF32) {
            if (static_cast<int64_t>(t.f32.size()) != t.numel())
                throw CheckpointError("stored tensor size mismatch for " + name);
            for (float v : t.f32) w.f32(v);
        } else {
            if (static_cast<int64_t>(t.f64.size()) != t.numel())
                throw CheckpointError("stored tensor size mismatch for " + name);
            for (double v : t.f64) w.f64(v);
        }
    }
    const uint64_t checksum = fnv1a64(w.data().data(), w.data().size());
    ByteWriter trailer;
    trailer.u64(checksum);

    // temp-file-then-rename keeps readers from ever seeing a partial file
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open for writing: " + tmp.string());
        os.write(reinterpret_cast<const char*>(w.data().data()), static_cast<std::streamsize>(w.data().size()));
        os.write(reinterpret_cast<const char*>(trailer.data().data()), 8);
        if (!os) throw IoError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

CheckpointData load_checkpoint_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw IoError("cannot open checkpoint: " + path.string());
    const auto size = static_cast<size_t>(is.tellg());
    if (size < sizeof(kMagic) + 2 + 32 + 8) throw CheckpointError("checkpoint file truncated");
    std::vector<uint8_t> bytes(size);
    is.seekg(0);
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!is) throw IoError("read failed: " + path.string());

    const uint64_t stored_sum = [&] {
        ByteReader r(bytes.data() + size - 8, 8);
        return r.u64();
    }();
    if (fnv1a64(bytes.data(), size - 8) != stored_sum)
        throw CheckpointError("checkpoint checksum mismatch: " + path.string());

    ByteReader r(bytes.data(), size - 8);
    if (r.str(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic)))
        throw CheckpointError("not a checkpoint file: " + path.string());
    CheckpointData data;
    data.version = r.u16();
    if (data.version != kCheckpointVersion)
        throw CheckpointError("unknown checkpoint version " + std::to_string(data.version));
    for (auto& b : data.fingerprint) b = r.u8();
    data.meta.step = r.u64();
    data.meta.stage = r.u8();
    data.meta.seed = r.u64();
    const uint32_t n_sources = r.u32();
    data.meta.source_steps.resize(n_sources);
    for (auto& s : data.meta.source_steps) s = r.u64();

    const uint64_t count = r.u64();
    for (uint64_t i = 0; i < count; ++i) {
        const uint32_t name_len = r.u32();
        std::string name = r.str(name_len);
        StoredTensor t;
        t.dtype = r.u8();
        const uint8_t rank = r.u8();
        if (rank != 4) throw CheckpointError("unsupported tensor rank in " + name);
        // read dims one statement at a time: argument evaluation order is
        // unspecified
        const auto dim_n = static_cast<int64_t>(r.u64());
        const auto dim_c = static_cast<int64_t>(r.u64());
        const auto dim_h = static_cast<int64_t>(r.u64());
        const auto dim_w = static_cast<int64_t>(r.u64());
        t.shape = Shape(dim_n, dim_c, dim_h, dim_w);
        if (!t.shape.valid()) throw CheckpointError("invalid tensor shape in " + name);
        const int64_t numel = t.shape.numel();
        if (t.dtype == kDtypeF32) {
            t.f32.reserve(static_cast<size_t>(numel));
            for (int64_t j = 0; j < numel; ++j) t.f32.push_back(r.f32());
        } else if (t.dtype == kDtypeF64) {
            t.f64.reserve(static_cast<size_t>(numel));
            for (int64_t j = 0; j < numel; ++j) t.f64.push_back(r.f64());
        } else {
            throw CheckpointError("unknown dtype tag in " + name);
        }
        if (!data.tensors.emplace(std::move(name), std::move(t)).second)
            throw CheckpointError("duplicate tensor name in checkpoint");
    }
    if (r.remaining() != 0) throw CheckpointError("trailing bytes in checkpoint: " + path.string());
    return data;
}

}  // namespace rfbsr
