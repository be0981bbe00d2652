#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ridx/bits.hpp"
#include "ridx/codecs.hpp"
#include "ridx/grammar.hpp"
#include "ridx/postings.hpp"

namespace ridx {

enum class index_method : uint8_t { repair = 0, vbyte = 1, rice = 2 };

enum class sampling_kind : uint8_t { none = 0, stride = 1, bucket = 2 };  // (a) / (b)

struct sampling_params {
    sampling_kind kind = sampling_kind::none;
    uint32_t param = 0;  // stride: t (repair, in symbols) or k (coded, k' = k*ceil(log2 l)); bucket: B
};

struct term_entry {
    std::string term;
    uint64_t length = 0;   // uncompressed list length
    uint64_t pointer = 0;  // repair: first symbol (1-based); vbyte: byte offset; rice: bit offset; bitmap: slot
    uint64_t clen = 0;     // symbols / bytes / bits, derived from the neighbors
    uint8_t rice_b = 0;
    bool is_bitmap = false;
};

// (a)-sampling: absolute value preceding each window of the compressed list.
// Repair windows are `t` symbols wide and need no offsets; coded windows are
// k' elements wide and keep the code offset of each window start.
struct term_samples_a {
    std::vector<uint64_t> values;
    std::vector<uint64_t> offsets;
    uint64_t window = 0;  // symbols (repair) or elements (coded) per window
};

// (b)-sampling: entry i serves domain bucket [(i-1)*2^k, i*2^k) and stores the
// absolute value accumulated before the phrase/code holding the bucket's
// first element, plus that phrase's position (repair: 1-based symbol in the
// segment; coded: code offset).
struct term_samples_b {
    uint32_t k = 0;
    std::vector<uint64_t> values;
    std::vector<uint64_t> offsets;
};

struct build_options {
    index_method method = index_method::repair;
    bool hybrid = false;  // lists with length >= ceil(u/8) become bitmaps
    bool exact = true;
    uint64_t approx_budget = 10000;
    bool with_sums = true;
    bool optimal_cut = false;
    sampling_params sampling;
};

struct compressed_index {
    uint64_t universe = 0;
    index_method method = index_method::repair;
    bool hybrid = false;
    uint64_t bitmap_threshold = 0;
    bool with_sums = true;
    sampling_params sampling;

    std::vector<term_entry> terms;  // sorted by term

    // repair payload
    grammar_forest forest;
    packed_array seq;

    // coded payloads
    std::vector<uint8_t> bytes;       // vbyte streams, back to back
    std::vector<uint64_t> code_words; // rice streams
    uint64_t code_bits = 0;

    // hybrid long lists, one universe-wide bitmap each
    std::vector<std::vector<uint64_t>> bitmaps;

    std::vector<term_samples_a> samples_a;  // aligned with terms when sampling.kind == stride
    std::vector<term_samples_b> samples_b;  // aligned with terms when sampling.kind == bucket

    int64_t find_term(const std::string& t) const;
    const term_entry& require_term(const std::string& t) const;

    // Full expansion of one term's posting list.
    std::vector<uint64_t> decode_list(uint32_t term_id) const;
    std::vector<uint64_t> decode_gaps(uint32_t term_id) const;

    bool bitmap_test(uint32_t term_id, uint64_t doc) const;

    uint64_t dictionary_bits() const { return forest.dictionary_bits(); }
    uint64_t sequence_bits() const { return seq.bits(); }
};

compressed_index build_index(const corpus_postings& postings, const build_options& opt);

// (a)/(b) sampling structures for a single term, as stored per list.
term_samples_a sample_a(const compressed_index& idx, const std::string& term, uint32_t param);
term_samples_b sample_b(const compressed_index& idx, const std::string& term, uint32_t B);

uint64_t bucket_k(uint64_t universe, uint32_t B, uint64_t length);

// u-bit membership bitmap for one posting list.
std::vector<uint64_t> to_bitmap(const std::vector<uint64_t>& docs, uint64_t universe);

uint64_t bitmap_threshold_default(uint64_t universe);  // ceil(u/8)

}  // namespace ridx
