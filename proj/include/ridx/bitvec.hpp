#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ridx/bits.hpp"

namespace ridx {

/*
    Plain bitmap with constant-time rank. Positions are 1-indexed.

    The directory is two interleaved 64-bit entries per superblock of 512
    bits: the absolute number of 1s before the superblock, and seven 9-bit
    cumulative word counts inside it (the count before word 0 is always 0).
    That is 128/512 = 25% on top of the bits themselves, and a query is two
    lookups plus one popcount.
*/
class rank_bitmap {
public:
    rank_bitmap() = default;

    rank_bitmap(std::vector<uint64_t> words, uint64_t n_bits)
        : words_(std::move(words)), n_(n_bits) {
        build_directory();
    }

    static rank_bitmap from_bits(const std::vector<bool>& bits) {
        bit_writer bw;
        for (bool b : bits) bw.push(b);
        return rank_bitmap(std::move(bw.words), bw.n_bits);
    }

    uint64_t size() const { return n_; }

    // Number of 1s in positions 1..i.
    uint64_t rank1(uint64_t i) const {
        if (i > n_) throw std::out_of_range("rank_bitmap: rank position past end");
        if (i == 0) return 0;
        uint64_t bit = i;  // count of bits strictly before index i (0-based)
        uint64_t word = (bit - 1) / 64;
        uint64_t super = word / 8;
        uint64_t r = dir_[super * 2];
        uint64_t sub = word % 8;
        if (sub) r += (dir_[super * 2 + 1] >> ((sub - 1) * 9)) & 0x1FF;
        uint64_t rem = bit - word * 64;  // 1..64 bits of this word
        uint64_t w = words_[word];
        if (rem < 64) w &= (uint64_t(1) << rem) - 1;
        return r + std::popcount(w);
    }

    // Number of 0s in positions 1..i.
    uint64_t rank0(uint64_t i) const { return i - rank1(i); }

    bool access(uint64_t i) const {
        if (i < 1 || i > n_) throw std::out_of_range("rank_bitmap: access position out of range");
        uint64_t bit = i - 1;
        return (words_[bit / 64] >> (bit % 64)) & 1;
    }

    // Unchecked access for hot loops; i must be in [1, size()].
    bool bit(uint64_t i) const {
        uint64_t b = i - 1;
        return (words_[b / 64] >> (b % 64)) & 1;
    }

    uint64_t zeros() const { return n_ - ones(); }
    uint64_t ones() const { return n_ ? rank1(n_) : 0; }

    const std::vector<uint64_t>& words() const { return words_; }

    uint64_t directory_bits() const { return dir_.size() * 64; }

private:
    void build_directory() {
        uint64_t n_words = (n_ + 63) / 64;
        words_.resize(((n_words + 7) / 8) * 8, 0);
        // Zero any tail bits past n_ so popcounts stay exact.
        if (n_ % 64) words_[n_ / 64] &= (uint64_t(1) << (n_ % 64)) - 1;
        for (uint64_t w = n_words; w < words_.size(); ++w) words_[w] = 0;

        uint64_t supers = words_.size() / 8;
        dir_.assign(supers * 2, 0);
        uint64_t abs = 0;
        for (uint64_t s = 0; s < supers; ++s) {
            dir_[s * 2] = abs;
            uint64_t rel = 0, subs = 0;
            for (uint64_t k = 0; k < 8; ++k) {
                if (k) subs |= rel << ((k - 1) * 9);
                rel += std::popcount(words_[s * 8 + k]);
            }
            dir_[s * 2 + 1] = subs;
            abs += rel;
        }
    }

    std::vector<uint64_t> words_;
    std::vector<uint64_t> dir_;
    uint64_t n_ = 0;
};

}  // namespace ridx
