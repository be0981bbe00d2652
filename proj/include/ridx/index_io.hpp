#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ridx/index.hpp"

namespace ridx {

struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Byte sizes of the file sections; samples/bitmaps are zero when absent.
struct space_report {
    uint64_t header = 0;
    uint64_t vocab = 0;
    uint64_t dictionary = 0;  // forest (repair) — zero for coded methods
    uint64_t sequence = 0;    // C / byte codes / rice codes
    uint64_t samples = 0;
    uint64_t bitmaps = 0;
    uint64_t total() const { return header + vocab + dictionary + sequence + samples + bitmaps; }
};

/*
    RPI1 container, little-endian throughout:

      header   magic "RPI1", version u32, u u64, vocab count u32, flags u32,
               symbol width u8, sampling param u32, bitmap threshold u64
               flags: bit0 sums, bit1 hybrid, bits2-3 method, bits4-5 sampling
               kind, bit6 rank counters stored (0: rebuilt on load)
      vocab    per term: u32 byte length + bytes, length u64, pointer u64,
               bitmap tag u8, rice parameter u8
      payload  repair: |R_B| u64, R_B words, rank flag u8, R_S words at the
               header width (count = |R_B| with sums, else its zero count);
               then |C| u64 and C words at the header width
               vbyte: stream byte count u64 + bytes
               rice: stream bit count u64 + words
      bitmaps  bitmap count u64, then ceil(u/64) words per tagged term
      samples  (a): per coded term, entry count u64, values packed at
               width_for(u+1) (+1 stored), then offsets packed at
               width_for(stream size+1) for coded methods
               (b): per coded term, entry count u64, values and offsets
               packed the same way (repair offsets are 1-based symbols)
*/
std::vector<uint8_t> serialize_index(const compressed_index& idx, space_report* report = nullptr);
void save_index(const compressed_index& idx, const std::string& path, space_report* report = nullptr);

compressed_index parse_index(const std::vector<uint8_t>& buf);
compressed_index load_index(const std::string& path);

space_report measure_index(const compressed_index& idx);

}  // namespace ridx
