#include "ridx/codecs.hpp"

#include <bit>
#include <cmath>

namespace ridx {

void vbyte_append(std::vector<uint8_t>& out, uint64_t gap) {
    int shift = 0;
    while ((gap >> (shift + 7)) != 0) shift += 7;
    for (; shift > 0; shift -= 7) out.push_back(uint8_t(0x80 | ((gap >> shift) & 0x7F)));
    out.push_back(uint8_t(gap & 0x7F));
}

std::vector<uint8_t> vbyte_encode(const std::vector<uint64_t>& gaps) {
    std::vector<uint8_t> out;
    for (uint64_t g : gaps) vbyte_append(out, g);
    return out;
}

uint64_t vbyte_read(const uint8_t* bytes, uint64_t size, uint64_t& pos) {
    uint64_t v = 0;
    for (;;) {
        if (pos >= size) throw decode_error("vbyte: truncated stream");
        uint8_t byte = bytes[pos++];
        v = (v << 7) | (byte & 0x7F);
        if (!(byte & 0x80)) return v;
    }
}

std::vector<uint64_t> vbyte_decode(const std::vector<uint8_t>& bytes, uint64_t count) {
    std::vector<uint64_t> out;
    out.reserve(count);
    uint64_t pos = 0;
    for (uint64_t i = 0; i < count; ++i) out.push_back(vbyte_read(bytes.data(), bytes.size(), pos));
    return out;
}

void rice_append(bit_writer& out, uint64_t gap, uint32_t b) {
    uint64_t v = gap - 1;
    out.push_unary(v >> b);
    out.push_bits(v, b);
}

bit_writer rice_encode(const std::vector<uint64_t>& gaps, uint32_t b) {
    bit_writer out;
    for (uint64_t g : gaps) rice_append(out, g, b);
    return out;
}

uint64_t rice_read(bit_reader& in, uint32_t b) {
    uint64_t q = 0;
    for (;;) {
        if (in.exhausted()) throw decode_error("rice: truncated stream");
        if (!in.next()) break;
        ++q;
    }
    if (in.pos + b > in.n_bits) throw decode_error("rice: truncated stream");
    uint64_t low = in.next_bits(b);
    return ((q << b) | low) + 1;
}

std::vector<uint64_t> rice_decode(const uint64_t* words, uint64_t n_bits, uint32_t b, uint64_t count) {
    bit_reader in(words, n_bits);
    std::vector<uint64_t> out;
    out.reserve(count);
    for (uint64_t i = 0; i < count; ++i) out.push_back(rice_read(in, b));
    return out;
}

uint32_t rice_parameter(uint64_t universe, uint64_t length) {
    if (length == 0) return 0;
    double x = 0.6931471805599453 * (double(universe) / double(length));
    if (x < 2.0) return 0;
    return uint32_t(std::floor(std::log2(x)));
}

uint64_t rice_cost_bits(const std::vector<uint64_t>& gaps, uint32_t b) {
    uint64_t bits = 0;
    for (uint64_t g : gaps) bits += ((g - 1) >> b) + 1 + b;
    return bits;
}

}  // namespace ridx
