#include "ridx/index_io.hpp"

#include <cstring>
#include <fstream>

namespace ridx {

namespace {

struct writer {
    std::vector<uint8_t> buf;

    void raw(const void* p, size_t n) {
        const uint8_t* b = static_cast<const uint8_t*>(p);
        buf.insert(buf.end(), b, b + n);
    }
    void u8(uint8_t v) { buf.push_back(v); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(uint8_t(v >> (8 * i)));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(uint8_t(v >> (8 * i)));
    }
    void words(const std::vector<uint64_t>& ws) {
        for (uint64_t w : ws) u64(w);
    }
};

struct reader {
    const uint8_t* p;
    size_t left;
    const char* section = "header";

    void need(size_t n) {
        if (left < n) throw format_error(std::string(section) + ": truncated");
    }
    void raw(void* out, size_t n) {
        need(n);
        std::memcpy(out, p, n);
        p += n;
        left -= n;
    }
    uint8_t u8() {
        need(1);
        uint8_t v = *p++;
        --left;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
        p += 4;
        left -= 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
        p += 8;
        left -= 8;
        return v;
    }
    std::vector<uint64_t> words(uint64_t n) {
        std::vector<uint64_t> ws(n);
        for (uint64_t i = 0; i < n; ++i) ws[i] = u64();
        return ws;
    }
};

// Values may be zero here (absolute ids start at 0), so store v+1.
packed_array pack_plus_one(const std::vector<uint64_t>& values, uint32_t width) {
    packed_array a(values.size(), width);
    for (uint64_t i = 0; i < values.size(); ++i) a.set(i, values[i] + 1);
    return a;
}

uint32_t sample_value_width(const compressed_index& idx) { return width_for(idx.universe + 1); }

uint32_t sample_offset_width(const compressed_index& idx) {
    switch (idx.method) {
        case index_method::repair: return width_for(idx.seq.size() + 1);
        case index_method::vbyte: return width_for(idx.bytes.size() + 1);
        case index_method::rice: return width_for(idx.code_bits + 1);
    }
    return 64;
}

}  // namespace

std::vector<uint8_t> serialize_index(const compressed_index& idx, space_report* report) {
    writer w;
    space_report rep;

    uint32_t flags = 0;
    flags |= idx.with_sums ? 1u : 0;
    flags |= idx.hybrid ? 2u : 0;
    flags |= uint32_t(idx.method) << 2;
    flags |= uint32_t(idx.sampling.kind) << 4;

    uint32_t width = idx.seq.count ? idx.seq.width : 1;

    w.raw("RPI1", 4);
    w.u32(1);
    w.u64(idx.universe);
    w.u32(uint32_t(idx.terms.size()));
    w.u32(flags);
    w.u8(uint8_t(width));
    w.u32(idx.sampling.param);
    w.u64(idx.bitmap_threshold);
    rep.header = w.buf.size();

    for (const auto& e : idx.terms) {
        w.u32(uint32_t(e.term.size()));
        w.raw(e.term.data(), e.term.size());
        w.u64(e.length);
        w.u64(e.pointer);
        w.u8(e.is_bitmap ? 1 : 0);
        w.u8(e.rice_b);
    }
    rep.vocab = w.buf.size() - rep.header;

    uint64_t mark = w.buf.size();
    switch (idx.method) {
        case index_method::repair: {
            w.u64(idx.forest.rb.size());
            std::vector<uint64_t> rb_words(idx.forest.rb.words().begin(),
                                           idx.forest.rb.words().begin() + (idx.forest.rb.size() + 63) / 64);
            w.words(rb_words);
            w.u8(0);  // rank directory rebuilt on load
            w.words(idx.forest.rs.words);
            rep.dictionary = w.buf.size() - mark;
            mark = w.buf.size();
            w.u64(idx.seq.size());
            w.words(idx.seq.words);
            rep.sequence = w.buf.size() - mark;
            break;
        }
        case index_method::vbyte:
            w.u64(idx.bytes.size());
            w.raw(idx.bytes.data(), idx.bytes.size());
            rep.sequence = w.buf.size() - mark;
            break;
        case index_method::rice:
            w.u64(idx.code_bits);
            w.words(idx.code_words);
            rep.sequence = w.buf.size() - mark;
            break;
    }

    mark = w.buf.size();
    if (idx.hybrid) {
        w.u64(idx.bitmaps.size());
        for (const auto& bm : idx.bitmaps) w.words(bm);
        rep.bitmaps = w.buf.size() - mark;
    }

    mark = w.buf.size();
    if (idx.sampling.kind == sampling_kind::stride) {
        uint32_t vw = sample_value_width(idx), ow = sample_offset_width(idx);
        for (uint32_t id = 0; id < idx.terms.size(); ++id) {
            if (idx.terms[id].is_bitmap) continue;
            const auto& s = idx.samples_a[id];
            w.u64(s.values.size());
            w.words(pack_plus_one(s.values, vw).words);
            if (idx.method != index_method::repair) w.words(pack_plus_one(s.offsets, ow).words);
        }
    } else if (idx.sampling.kind == sampling_kind::bucket) {
        uint32_t vw = sample_value_width(idx), ow = sample_offset_width(idx);
        for (uint32_t id = 0; id < idx.terms.size(); ++id) {
            if (idx.terms[id].is_bitmap) continue;
            const auto& s = idx.samples_b[id];
            w.u64(s.values.size());
            w.words(pack_plus_one(s.values, vw).words);
            w.words(pack_plus_one(s.offsets, ow).words);
        }
    }
    rep.samples = w.buf.size() - mark;

    if (report) *report = rep;
    return std::move(w.buf);
}

void save_index(const compressed_index& idx, const std::string& path, space_report* report) {
    auto buf = serialize_index(idx, report);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write index: " + path);
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
}

space_report measure_index(const compressed_index& idx) {
    space_report rep;
    serialize_index(idx, &rep);
    return rep;
}

compressed_index parse_index(const std::vector<uint8_t>& buf) {
    reader r{buf.data(), buf.size()};
    compressed_index idx;

    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, "RPI1", 4) != 0) throw format_error("header: bad magic");
    uint32_t version = r.u32();
    if (version != 1) throw format_error("header: unsupported version");
    idx.universe = r.u64();
    uint32_t vocab_count = r.u32();
    uint32_t flags = r.u32();
    idx.with_sums = flags & 1;
    idx.hybrid = flags & 2;
    uint32_t method = (flags >> 2) & 3;
    if (method > 2) throw format_error("header: bad method");
    idx.method = index_method(method);
    uint32_t skind = (flags >> 4) & 3;
    if (skind > 2) throw format_error("header: bad sampling kind");
    idx.sampling.kind = sampling_kind(skind);
    uint32_t width = r.u8();
    if (width < 1 || width > 64) throw format_error("header: bad symbol width");
    idx.sampling.param = r.u32();
    idx.bitmap_threshold = r.u64();

    r.section = "vocab";
    idx.terms.resize(vocab_count);
    for (auto& e : idx.terms) {
        uint32_t len = r.u32();
        r.need(len);
        e.term.assign(reinterpret_cast<const char*>(r.p), len);
        r.p += len;
        r.left -= len;
        e.length = r.u64();
        e.pointer = r.u64();
        e.is_bitmap = r.u8() != 0;
        e.rice_b = r.u8();
    }

    switch (idx.method) {
        case index_method::repair: {
            r.section = "forest";
            uint64_t l = r.u64();
            auto rb_words = r.words((l + 63) / 64);
            idx.forest.rb = rank_bitmap(std::move(rb_words), l);
            r.u8();  // rank flag; directory always rebuilt
            idx.forest.with_sums = idx.with_sums;
            idx.forest.shift = idx.universe;
            uint64_t rs_count = idx.with_sums ? l : idx.forest.rb.zeros();
            idx.forest.rs = packed_array(rs_count, width);
            idx.forest.rs.words = r.words((rs_count * width + 63) / 64);
            r.section = "sequence";
            uint64_t n = r.u64();
            idx.seq = packed_array(n, width);
            idx.seq.words = r.words((n * width + 63) / 64);
            break;
        }
        case index_method::vbyte: {
            r.section = "codes";
            uint64_t n = r.u64();
            r.need(n);
            idx.bytes.assign(r.p, r.p + n);
            r.p += n;
            r.left -= n;
            break;
        }
        case index_method::rice: {
            r.section = "codes";
            idx.code_bits = r.u64();
            idx.code_words = r.words((idx.code_bits + 63) / 64);
            break;
        }
    }

    if (idx.hybrid) {
        r.section = "bitmaps";
        uint64_t count = r.u64();
        uint64_t wpb = (idx.universe + 63) / 64;
        idx.bitmaps.resize(count);
        for (auto& bm : idx.bitmaps) bm = r.words(wpb);
    }

    // compressed lengths: segments partition the stream in vocab order
    {
        std::vector<std::pair<uint64_t, uint32_t>> order;
        for (uint32_t id = 0; id < idx.terms.size(); ++id)
            if (!idx.terms[id].is_bitmap) order.emplace_back(idx.terms[id].pointer, id);
        std::sort(order.begin(), order.end());
        uint64_t end;
        switch (idx.method) {
            case index_method::repair: end = idx.seq.size() + 1; break;
            case index_method::vbyte: end = idx.bytes.size(); break;
            default: end = idx.code_bits; break;
        }
        for (uint64_t i = order.size(); i-- > 0;) {
            idx.terms[order[i].second].clen = end - order[i].first;
            end = order[i].first;
        }
    }

    if (idx.sampling.kind == sampling_kind::stride) {
        r.section = "samples-a";
        uint32_t vw = sample_value_width(idx), ow = sample_offset_width(idx);
        idx.samples_a.resize(idx.terms.size());
        for (uint32_t id = 0; id < idx.terms.size(); ++id) {
            if (idx.terms[id].is_bitmap) continue;
            auto& s = idx.samples_a[id];
            uint64_t count = r.u64();
            packed_array vals(count, vw);
            vals.words = r.words((count * vw + 63) / 64);
            s.values.resize(count);
            for (uint64_t i = 0; i < count; ++i) s.values[i] = vals.get(i) - 1;
            if (idx.method != index_method::repair) {
                packed_array offs(count, ow);
                offs.words = r.words((count * ow + 63) / 64);
                s.offsets.resize(count);
                for (uint64_t i = 0; i < count; ++i) s.offsets[i] = offs.get(i) - 1;
                s.window = std::max<uint64_t>(
                    1, uint64_t(idx.sampling.param) *
                           ceil_log2(std::max<uint64_t>(idx.terms[id].length, 2)));
            } else {
                s.window = idx.sampling.param;
            }
        }
    } else if (idx.sampling.kind == sampling_kind::bucket) {
        r.section = "samples-b";
        uint32_t vw = sample_value_width(idx), ow = sample_offset_width(idx);
        idx.samples_b.resize(idx.terms.size());
        for (uint32_t id = 0; id < idx.terms.size(); ++id) {
            if (idx.terms[id].is_bitmap) continue;
            auto& s = idx.samples_b[id];
            s.k = uint32_t(bucket_k(idx.universe, idx.sampling.param, idx.terms[id].length));
            uint64_t count = r.u64();
            packed_array vals(count, vw);
            vals.words = r.words((count * vw + 63) / 64);
            packed_array offs(count, ow);
            offs.words = r.words((count * ow + 63) / 64);
            s.values.resize(count);
            s.offsets.resize(count);
            for (uint64_t i = 0; i < count; ++i) {
                s.values[i] = vals.get(i) - 1;
                s.offsets[i] = offs.get(i) - 1;
            }
        }
    }

    if (r.left != 0) throw format_error("trailer: unexpected trailing bytes");
    return idx;
}

compressed_index load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open index: " + path);
    std::vector<uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_index(buf);
}

}  // namespace ridx
