#include "ridx/index.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace ridx {

namespace {
constexpr uint64_t SENTINEL_BASE = uint64_t(1) << 62;
}

uint64_t bitmap_threshold_default(uint64_t universe) { return (universe + 7) / 8; }

std::vector<uint64_t> to_bitmap(const std::vector<uint64_t>& docs, uint64_t universe) {
    std::vector<uint64_t> words((universe + 63) / 64, 0);
    for (uint64_t d : docs) words[(d - 1) / 64] |= uint64_t(1) << ((d - 1) % 64);
    return words;
}

uint64_t bucket_k(uint64_t universe, uint32_t B, uint64_t length) {
    // smallest k with 2^k >= u*B/l
    uint64_t target = (universe * B + length - 1) / length;
    return ceil_log2(std::max<uint64_t>(target, 1));
}

int64_t compressed_index::find_term(const std::string& t) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), t,
                               [](const term_entry& e, const std::string& s) { return e.term < s; });
    if (it == terms.end() || it->term != t) return -1;
    return it - terms.begin();
}

const term_entry& compressed_index::require_term(const std::string& t) const {
    int64_t id = find_term(t);
    if (id < 0) throw std::out_of_range("unknown term: " + t);
    return terms[id];
}

bool compressed_index::bitmap_test(uint32_t term_id, uint64_t doc) const {
    const auto& words = bitmaps[terms[term_id].pointer];
    return (words[(doc - 1) / 64] >> ((doc - 1) % 64)) & 1;
}

std::vector<uint64_t> compressed_index::decode_gaps(uint32_t term_id) const {
    const term_entry& e = terms[term_id];
    if (e.is_bitmap) return to_gaps(decode_list(term_id));
    switch (method) {
        case index_method::repair: {
            std::vector<uint64_t> gaps;
            gaps.reserve(e.length);
            for (uint64_t i = 0; i < e.clen; ++i)
                expand_append(forest, seq.get(e.pointer - 1 + i), gaps);
            return gaps;
        }
        case index_method::vbyte: {
            std::vector<uint64_t> gaps;
            gaps.reserve(e.length);
            uint64_t pos = e.pointer;
            for (uint64_t i = 0; i < e.length; ++i)
                gaps.push_back(vbyte_read(bytes.data(), bytes.size(), pos));
            return gaps;
        }
        case index_method::rice: {
            bit_reader in(code_words.data(), code_bits);
            in.pos = e.pointer;
            std::vector<uint64_t> gaps;
            gaps.reserve(e.length);
            for (uint64_t i = 0; i < e.length; ++i) gaps.push_back(rice_read(in, e.rice_b));
            return gaps;
        }
    }
    throw std::logic_error("unreachable");
}

std::vector<uint64_t> compressed_index::decode_list(uint32_t term_id) const {
    const term_entry& e = terms[term_id];
    if (e.is_bitmap) {
        std::vector<uint64_t> docs;
        docs.reserve(e.length);
        const auto& words = bitmaps[e.pointer];
        for (uint64_t w = 0; w < words.size(); ++w) {
            uint64_t word = words[w];
            while (word) {
                docs.push_back(w * 64 + std::countr_zero(word) + 1);
                word &= word - 1;
            }
        }
        return docs;
    }
    return from_gaps(decode_gaps(term_id));
}

/*
    (a)-sampling. Repair lists: entry j is the absolute value accumulated by
    the first (j-1)*t symbols of the segment (no offsets needed, symbol width
    is fixed). Coded lists: windows of k' = max(1, k*ceil(log2 l)) elements,
    entries keep (value before window, code offset of its first element).
*/
static term_samples_a build_samples_a(const compressed_index& idx, uint32_t term_id, uint32_t param) {
    const term_entry& e = idx.terms[term_id];
    term_samples_a out;
    if (e.is_bitmap) return out;
    if (idx.method == index_method::repair) {
        out.window = param;
        uint64_t acc = 0;
        for (uint64_t i = 0; i < e.clen; ++i) {
            if (i % param == 0) out.values.push_back(acc);
            acc += phrase_sum(idx.forest, idx.seq.get(e.pointer - 1 + i));
        }
        return out;
    }
    uint64_t kprime = std::max<uint64_t>(1, uint64_t(param) * ceil_log2(std::max<uint64_t>(e.length, 2)));
    out.window = kprime;
    if (idx.method == index_method::vbyte) {
        uint64_t pos = e.pointer, acc = 0;
        for (uint64_t i = 0; i < e.length; ++i) {
            if (i % kprime == 0) {
                out.values.push_back(acc);
                out.offsets.push_back(pos);
            }
            acc += vbyte_read(idx.bytes.data(), idx.bytes.size(), pos);
        }
    } else {
        bit_reader in(idx.code_words.data(), idx.code_bits);
        in.pos = e.pointer;
        uint64_t acc = 0;
        for (uint64_t i = 0; i < e.length; ++i) {
            if (i % kprime == 0) {
                out.values.push_back(acc);
                out.offsets.push_back(in.pos);
            }
            acc += rice_read(in, e.rice_b);
        }
    }
    return out;
}

/*
    (b)-sampling with step 2^k, k = ceil(log2(u*B/l)). Entry i locates the
    first element >= (i-1)*2^k: the value accumulated before its phrase/code
    and the position of that phrase/code. Entries exist up to the bucket of
    the last element, so bucket(p) indexes the array directly.
*/
static term_samples_b build_samples_b(const compressed_index& idx, uint32_t term_id, uint32_t B) {
    const term_entry& e = idx.terms[term_id];
    term_samples_b out;
    if (e.is_bitmap) return out;
    out.k = uint32_t(bucket_k(idx.universe, B, e.length));
    uint64_t step = uint64_t(1) << out.k;

    // phrase boundaries: (value before, value after, offset) per phrase/code
    struct span {
        uint64_t before, after, offset;
    };
    std::vector<span> spans;
    if (idx.method == index_method::repair) {
        uint64_t acc = 0;
        for (uint64_t i = 0; i < e.clen; ++i) {
            uint64_t s = phrase_sum(idx.forest, idx.seq.get(e.pointer - 1 + i));
            spans.push_back({acc, acc + s, i + 1});
            acc += s;
        }
    } else if (idx.method == index_method::vbyte) {
        uint64_t pos = e.pointer, acc = 0;
        for (uint64_t i = 0; i < e.length; ++i) {
            uint64_t off = pos;
            uint64_t g = vbyte_read(idx.bytes.data(), idx.bytes.size(), pos);
            spans.push_back({acc, acc + g, off});
            acc += g;
        }
    } else {
        bit_reader in(idx.code_words.data(), idx.code_bits);
        in.pos = e.pointer;
        uint64_t acc = 0;
        for (uint64_t i = 0; i < e.length; ++i) {
            uint64_t off = in.pos;
            uint64_t g = rice_read(in, e.rice_b);
            spans.push_back({acc, acc + g, off});
            acc += g;
        }
    }

    uint64_t last = spans.back().after;
    uint64_t buckets = std::max<uint64_t>(1, (last + step - 1) / step);
    uint64_t cursor = 0;
    for (uint64_t i = 1; i <= buckets; ++i) {
        uint64_t target = (i - 1) * step;
        // first phrase whose last covered element is >= target holds the
        // first element >= target (elements inside a phrase are increasing)
        while (spans[cursor].after < target) ++cursor;
        out.values.push_back(spans[cursor].before);
        out.offsets.push_back(spans[cursor].offset);
    }
    return out;
}

term_samples_a sample_a(const compressed_index& idx, const std::string& term, uint32_t param) {
    if (param < 1) throw std::invalid_argument("sample_a: period must be >= 1");
    int64_t id = idx.find_term(term);
    if (id < 0) throw std::out_of_range("unknown term: " + term);
    return build_samples_a(idx, uint32_t(id), param);
}

term_samples_b sample_b(const compressed_index& idx, const std::string& term, uint32_t B) {
    if (B < 1) throw std::invalid_argument("sample_b: B must be >= 1");
    int64_t id = idx.find_term(term);
    if (id < 0) throw std::out_of_range("unknown term: " + term);
    return build_samples_b(idx, uint32_t(id), B);
}

static void build_repair_payload(compressed_index& idx,
                                 const std::vector<const std::vector<uint64_t>*>& lists,
                                 const std::vector<uint32_t>& term_ids, const build_options& opt) {
    // concatenate d-gaps, one unique sentinel opening each list
    std::vector<uint64_t> concat;
    uint64_t total = 0;
    for (auto* l : lists) total += l->size();
    concat.reserve(total + lists.size());
    for (uint64_t i = 0; i < lists.size(); ++i) {
        concat.push_back(SENTINEL_BASE + i);
        for (uint64_t g : to_gaps(*lists[i])) concat.push_back(g);
    }

    repair_options ropt;
    ropt.exact = opt.exact;
    ropt.table_budget = opt.approx_budget;
    ropt.sentinel_base = SENTINEL_BASE;
    repair_result rr = repair_compress(concat, ropt);
    rr.rules.alphabet_bound = idx.universe;  // model alphabet: any gap value fits

    if (opt.optimal_cut && rr.rules.size() > 0) {
        std::vector<uint64_t> stripped;
        stripped.reserve(rr.seq.size());
        for (uint64_t s : rr.seq)
            if (s < SENTINEL_BASE) stripped.push_back(s);
        cut_result cut = optimize_cut(rr.rules, stripped, opt.with_sums ? 1 : 0);
        if (cut.best_cut < rr.rules.size()) {
            unroll_result un = unroll_to(rr.seq, rr.rules, cut.best_cut);
            rr.seq = std::move(un.seq);
            rr.rules = std::move(un.rules);
            rr.rules.alphabet_bound = idx.universe;
        }
    }

    forest_result fr = build_forest(rr.rules, opt.with_sums, idx.universe);
    idx.forest = std::move(fr.forest);

    // re-encode the sequence and record the per-list segments
    std::vector<uint64_t> encoded;
    encoded.reserve(rr.seq.size());
    int64_t cur_list = -1;
    for (uint64_t s : rr.seq) {
        if (s >= SENTINEL_BASE) {
            if (cur_list >= 0) idx.terms[term_ids[cur_list]].clen = encoded.size() + 1 - idx.terms[term_ids[cur_list]].pointer;
            cur_list = int64_t(s - SENTINEL_BASE);
            idx.terms[term_ids[cur_list]].pointer = encoded.size() + 1;
            continue;
        }
        encoded.push_back(rr.rules.is_terminal(s) ? s : idx.universe + fr.root_pos[rr.rules.rule_index(s)]);
    }
    if (cur_list >= 0)
        idx.terms[term_ids[cur_list]].clen = encoded.size() + 1 - idx.terms[term_ids[cur_list]].pointer;

    uint32_t w = std::max(width_for(idx.universe + idx.forest.rb.size()),
                          idx.forest.rb.size() ? idx.forest.rs.width : 1);
    idx.seq = packed_array::pack(encoded, w);
}

compressed_index build_index(const corpus_postings& postings, const build_options& opt) {
    compressed_index idx;
    idx.universe = postings.universe;
    idx.method = opt.method;
    idx.hybrid = opt.hybrid;
    idx.with_sums = opt.with_sums;
    idx.sampling = opt.sampling;
    if (opt.hybrid) idx.bitmap_threshold = bitmap_threshold_default(postings.universe);

    idx.terms.reserve(postings.lists.size());
    for (const auto& [term, docs] : postings.lists) {
        term_entry e;
        e.term = term;
        e.length = docs.size();
        e.is_bitmap = opt.hybrid && docs.size() >= idx.bitmap_threshold;
        idx.terms.push_back(std::move(e));
    }

    // bitmaps for the long lists
    std::vector<const std::vector<uint64_t>*> coded_lists;
    std::vector<uint32_t> coded_ids;
    {
        uint32_t id = 0;
        for (const auto& [term, docs] : postings.lists) {
            if (idx.terms[id].is_bitmap) {
                idx.terms[id].pointer = idx.bitmaps.size();
                idx.bitmaps.push_back(to_bitmap(docs, idx.universe));
            } else {
                coded_lists.push_back(&docs);
                coded_ids.push_back(id);
            }
            ++id;
        }
    }

    switch (opt.method) {
        case index_method::repair:
            if (!coded_lists.empty()) build_repair_payload(idx, coded_lists, coded_ids, opt);
            break;
        case index_method::vbyte:
            for (uint64_t i = 0; i < coded_lists.size(); ++i) {
                term_entry& e = idx.terms[coded_ids[i]];
                e.pointer = idx.bytes.size();
                for (uint64_t g : to_gaps(*coded_lists[i])) vbyte_append(idx.bytes, g);
                e.clen = idx.bytes.size() - e.pointer;
            }
            break;
        case index_method::rice: {
            bit_writer bw;
            for (uint64_t i = 0; i < coded_lists.size(); ++i) {
                term_entry& e = idx.terms[coded_ids[i]];
                e.rice_b = uint8_t(rice_parameter(idx.universe, e.length));
                e.pointer = bw.n_bits;
                for (uint64_t g : to_gaps(*coded_lists[i])) rice_append(bw, g, e.rice_b);
                e.clen = bw.n_bits - e.pointer;
            }
            idx.code_words = std::move(bw.words);
            idx.code_bits = bw.n_bits;
            break;
        }
    }

    if (opt.sampling.kind == sampling_kind::stride) {
        idx.samples_a.resize(idx.terms.size());
        for (uint32_t id = 0; id < idx.terms.size(); ++id)
            idx.samples_a[id] = build_samples_a(idx, id, opt.sampling.param);
    } else if (opt.sampling.kind == sampling_kind::bucket) {
        idx.samples_b.resize(idx.terms.size());
        for (uint32_t id = 0; id < idx.terms.size(); ++id)
            idx.samples_b[id] = build_samples_b(idx, id, opt.sampling.param);
    }
    return idx;
}

}  // namespace ridx
