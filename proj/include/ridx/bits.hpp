#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace ridx {

inline uint32_t ceil_log2(uint64_t x) {
    if (x <= 1) return 0;
    return 64 - std::countl_zero(x - 1);
}

// Width needed to store values in [1, max_value] as (value - 1).
inline uint32_t width_for(uint64_t max_value) {
    uint32_t w = ceil_log2(max_value);
    return w == 0 ? 1 : w;
}

/*
    Append-only bit stream over 64-bit words. Bit i of the stream lives in
    word[i / 64] at bit (i % 64), so the serialized little-endian word dump
    is a stable, portable layout.
*/
struct bit_writer {
    std::vector<uint64_t> words;
    uint64_t n_bits = 0;

    void push(bool b) {
        if (n_bits % 64 == 0) words.push_back(0);
        if (b) words.back() |= uint64_t(1) << (n_bits % 64);
        ++n_bits;
    }

    // Low `width` bits of v, LSB first.
    void push_bits(uint64_t v, uint32_t width) {
        assert(width <= 64);
        for (uint32_t i = 0; i < width; ++i) push((v >> i) & 1);
    }

    void push_unary(uint64_t q) {
        for (uint64_t i = 0; i < q; ++i) push(true);
        push(false);
    }
};

struct bit_reader {
    const uint64_t* words;
    uint64_t n_bits;
    uint64_t pos = 0;

    bit_reader(const uint64_t* w, uint64_t n) : words(w), n_bits(n) {}
    explicit bit_reader(const bit_writer& bw) : words(bw.words.data()), n_bits(bw.n_bits) {}

    bool exhausted() const { return pos >= n_bits; }

    bool next() {
        assert(pos < n_bits);
        bool b = (words[pos / 64] >> (pos % 64)) & 1;
        ++pos;
        return b;
    }

    uint64_t next_bits(uint32_t width) {
        uint64_t v = 0;
        for (uint32_t i = 0; i < width; ++i)
            if (next()) v |= uint64_t(1) << i;
        return v;
    }
};

/*
    Fixed-width array of values >= 1. Entry v is stored as (v - 1) in
    `width` bits, so width_for(max) bits per entry suffice and the all-ones
    code is never wasted on an unreachable zero.
*/
struct packed_array {
    std::vector<uint64_t> words;
    uint64_t count = 0;
    uint32_t width = 1;

    packed_array() = default;
    packed_array(uint64_t n, uint32_t w) : count(n), width(w) {
        assert(w >= 1 && w <= 64);
        words.resize((n * w + 63) / 64, 0);
    }

    uint64_t size() const { return count; }

    void set(uint64_t i, uint64_t value) {
        assert(i < count);
        assert(value >= 1);
        uint64_t v = value - 1;
        assert(width == 64 || v < (uint64_t(1) << width));
        uint64_t bitpos = i * width;
        uint64_t word = bitpos / 64, off = bitpos % 64;
        words[word] |= v << off;
        if (off + width > 64) words[word + 1] |= v >> (64 - off);
    }

    uint64_t get(uint64_t i) const {
        assert(i < count);
        uint64_t bitpos = i * width;
        uint64_t word = bitpos / 64, off = bitpos % 64;
        uint64_t v = words[word] >> off;
        if (off + width > 64) v |= words[word + 1] << (64 - off);
        if (width < 64) v &= (uint64_t(1) << width) - 1;
        return v + 1;
    }

    uint64_t bits() const { return count * width; }

    static packed_array pack(const std::vector<uint64_t>& values, uint32_t w) {
        packed_array a(values.size(), w);
        for (uint64_t i = 0; i < values.size(); ++i) a.set(i, values[i]);
        return a;
    }

    std::vector<uint64_t> unpack() const {
        std::vector<uint64_t> out(count);
        for (uint64_t i = 0; i < count; ++i) out[i] = get(i);
        return out;
    }

    bool operator==(const packed_array&) const = default;
};

}  // namespace ridx
