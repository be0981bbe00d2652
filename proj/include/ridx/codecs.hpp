#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ridx/bits.hpp"

namespace ridx {

struct decode_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/*
    Byte codes: 7 data bits per byte, continuation bit set on every byte but
    the last, 7-bit groups emitted most significant first (gap 128 is
    0x81 0x00, gap 1 is 0x01).
*/
void vbyte_append(std::vector<uint8_t>& out, uint64_t gap);
std::vector<uint8_t> vbyte_encode(const std::vector<uint64_t>& gaps);

// Reads one gap starting at `pos`, advancing it.
uint64_t vbyte_read(const uint8_t* bytes, uint64_t size, uint64_t& pos);
std::vector<uint64_t> vbyte_decode(const std::vector<uint8_t>& bytes, uint64_t count);

/*
    Rice codes: gap g is unary(floor((g-1) / 2^b)) — that many 1s and a 0 —
    followed by the low b bits of g-1. Stream length is exactly
    sum(floor((g-1)/2^b) + 1 + b).
*/
void rice_append(bit_writer& out, uint64_t gap, uint32_t b);
bit_writer rice_encode(const std::vector<uint64_t>& gaps, uint32_t b);

uint64_t rice_read(bit_reader& in, uint32_t b);
std::vector<uint64_t> rice_decode(const uint64_t* words, uint64_t n_bits, uint32_t b, uint64_t count);

// Standard Golomb-derived parameter: b = max(0, floor(log2(ln 2 * u / l))).
uint32_t rice_parameter(uint64_t universe, uint64_t length);

uint64_t rice_cost_bits(const std::vector<uint64_t>& gaps, uint32_t b);

}  // namespace ridx
