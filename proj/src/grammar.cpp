#include "ridx/grammar.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <set>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace ridx {

namespace {

constexpr uint32_t NIL = std::numeric_limits<uint32_t>::max();

struct pair_key {
    uint64_t a, b;
    bool operator==(const pair_key&) const = default;
};

struct pair_key_hash {
    size_t operator()(const pair_key& k) const {
        uint64_t z = k.a * 0x9e3779b97f4a7c15ULL ^ (k.b + 0x517cc1b727220a95ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        return size_t(z ^ (z >> 27));
    }
};

/*
    Pair-queue Re-Pair. The sequence lives in slot arrays with doubly-linked
    live neighbors; every counted occurrence of a pair is threaded into that
    pair's occurrence list. Run pairs (aa) are threaded so that threaded
    occurrences never overlap and their number equals the non-overlapping
    (leftmost-greedy) count.

    The replacement queue is an ordered set keyed by
    (count desc, component sum asc, pair asc), so extraction is the most
    frequent pair with the pinned deterministic tie-break.
*/
struct repair_engine {
    std::vector<uint64_t> val;
    std::vector<uint32_t> prv, nxt;
    std::vector<uint32_t> pprev, pnext;  // occurrence-list links per slot
    std::vector<uint8_t> thr;
    std::vector<uint32_t> slot_rec;

    struct pair_rec {
        uint64_t a, b;
        uint32_t head = NIL, tail = NIL;
        uint64_t count = 0;
        bool queued = false;
    };
    std::vector<pair_rec> recs;
    std::unordered_map<pair_key, uint32_t, pair_key_hash> rec_of;

    using queue_key = std::tuple<uint64_t, uint64_t, uint64_t, uint64_t>;  // (~count, a+b, a, b)
    std::set<queue_key> queue;

    uint64_t sentinel_base;
    uint64_t alphabet_bound = 0;
    uint32_t begin = NIL;

    explicit repair_engine(const std::vector<uint64_t>& input, uint64_t sentinel)
        : sentinel_base(sentinel) {
        if (input.size() >= NIL) throw std::length_error("repair: input too long");
        val = input;
        uint32_t n = uint32_t(val.size());
        prv.resize(n);
        nxt.resize(n);
        pprev.assign(n, NIL);
        pnext.assign(n, NIL);
        thr.assign(n, 0);
        slot_rec.assign(n, NIL);
        for (uint32_t i = 0; i < n; ++i) {
            prv[i] = i ? i - 1 : NIL;
            nxt[i] = i + 1 < n ? i + 1 : NIL;
            if (val[i] < sentinel_base) alphabet_bound = std::max(alphabet_bound, val[i]);
        }
        begin = n ? 0 : NIL;
    }

    bool is_sentinel(uint64_t v) const { return v >= sentinel_base; }

    queue_key key_of(const pair_rec& rec) const {
        return {~rec.count, rec.a + rec.b, rec.a, rec.b};
    }

    void queue_remove(uint32_t r) {
        if (recs[r].queued) {
            queue.erase(key_of(recs[r]));
            recs[r].queued = false;
        }
    }

    void queue_insert(uint32_t r) {
        if (recs[r].count >= 2) {
            queue.insert(key_of(recs[r]));
            recs[r].queued = true;
        }
    }

    uint32_t get_rec(uint64_t a, uint64_t b) {
        auto [it, fresh] = rec_of.try_emplace(pair_key{a, b}, uint32_t(recs.size()));
        if (fresh) recs.push_back(pair_rec{a, b});
        return it->second;
    }

    // Thread the pair starting at live slot p unless it overlaps an already
    // threaded occurrence of the same run pair on either side.
    void thread_occ(uint32_t p) {
        uint32_t j = nxt[p];
        if (j == NIL) return;
        uint64_t a = val[p], b = val[j];
        if (is_sentinel(a) || is_sentinel(b)) return;
        if (a == b) {
            uint32_t L = prv[p];
            if (L != NIL && val[L] == a && thr[L]) return;
            uint32_t jj = nxt[j];
            if (jj != NIL && val[jj] == a && thr[j]) return;
        }
        uint32_t r = get_rec(a, b);
        pair_rec& rec = recs[r];
        if (rec.tail != NIL)
            pnext[rec.tail] = p;
        else
            rec.head = p;
        pprev[p] = rec.tail;
        pnext[p] = NIL;
        rec.tail = p;
        thr[p] = 1;
        slot_rec[p] = r;
        queue_remove(r);
        ++rec.count;
        queue_insert(r);
    }

    bool unthread_occ(uint32_t p) {
        if (!thr[p]) return false;
        uint32_t r = slot_rec[p];
        pair_rec& rec = recs[r];
        if (pprev[p] != NIL)
            pnext[pprev[p]] = pnext[p];
        else
            rec.head = pnext[p];
        if (pnext[p] != NIL)
            pprev[pnext[p]] = pprev[p];
        else
            rec.tail = pprev[p];
        pprev[p] = pnext[p] = NIL;
        thr[p] = 0;
        slot_rec[p] = NIL;
        queue_remove(r);
        --rec.count;
        queue_insert(r);
        return true;
    }

    void initial_scan() {
        for (uint32_t i = 0; i + 1 < val.size(); ++i) thread_occ(i);
    }

    uint32_t extract_max() {
        if (queue.empty()) return NIL;
        auto [nc, sum, a, b] = *queue.begin();
        (void)nc;
        (void)sum;
        return rec_of.at(pair_key{a, b});
    }

    // Replace every threaded occurrence of recs[r] with the fresh symbol s.
    uint64_t replace_all(uint32_t r, uint64_t s) {
        uint64_t a = recs[r].a, b = recs[r].b;
        uint64_t k = 0;
        for (uint32_t p = recs[r].head; p != NIL; p = recs[r].head) {
            uint32_t j = nxt[p];
            assert(j != NIL && val[p] == a && val[j] == b && thr[p]);
            uint32_t L = prv[p], R = nxt[j];
            uint64_t x = L != NIL ? val[L] : 0;
            uint64_t y = R != NIL ? val[R] : 0;

            bool wasL = L != NIL && unthread_occ(L);
            unthread_occ(p);
            bool wasR = unthread_occ(j);

            // splice: p takes the new symbol, j leaves the sequence
            val[p] = s;
            val[j] = 0;
            nxt[p] = R;
            if (R != NIL) prv[R] = p;

            // Destroying a threaded occurrence of a run pair may leave a
            // neighbor occurrence of that pair unthreaded yet unblocked.
            if (wasL && x == a) {
                uint32_t K = prv[L];
                if (K != NIL && val[K] == x && !thr[K]) thread_occ(K);
            }
            if (wasR && b == y && R != NIL) {
                uint32_t RR = nxt[R];
                if (RR != NIL && val[RR] == b && !thr[R]) thread_occ(R);
            }

            if (L != NIL) thread_occ(L);
            if (R != NIL) thread_occ(p);
            ++k;
        }
        return k;
    }

    std::vector<uint64_t> live_sequence() const {
        std::vector<uint64_t> out;
        for (uint32_t i = begin; i != NIL; i = nxt[i]) out.push_back(val[i]);
        return out;
    }
};

uint64_t checked_sum(uint64_t a, uint64_t b) {
    uint64_t s = a + b;
    if (s < a) throw std::overflow_error("phrase sum overflow");
    return s;
}

}  // namespace

static repair_result repair_exact(const std::vector<uint64_t>& input, const repair_options& opt) {
    repair_engine eng(input, opt.sentinel_base);
    eng.initial_scan();

    rule_list rules;
    rules.alphabet_bound = eng.alphabet_bound;
    uint64_t next_sym = eng.alphabet_bound;
    for (;;) {
        uint32_t r = eng.extract_max();
        if (r == NIL) break;
        uint64_t a = eng.recs[r].a, b = eng.recs[r].b;
        uint64_t s = ++next_sym;
        if (s >= opt.sentinel_base) throw std::overflow_error("repair: symbol space exhausted");
        uint64_t k = eng.replace_all(r, s);
        assert(k >= 2);
        rules.rules.push_back(rule{a, b});
        rules.freq.push_back(k);
    }
    return repair_result{eng.live_sequence(), std::move(rules)};
}

/*
    Approximate variant: per pass, count pairs into a capacity-bounded table
    (pairs beyond the budget are not considered), then replace every pair
    whose count reaches half of the maximum in one left-to-right sweep. The
    symbols eliminated by a pass grow the table for the next one.
*/
static repair_result repair_approx(const std::vector<uint64_t>& input, const repair_options& opt) {
    uint64_t budget = std::max<uint64_t>(opt.table_budget, 16);
    std::vector<uint64_t> seq = input;

    rule_list rules;
    for (uint64_t v : seq)
        if (v < opt.sentinel_base) rules.alphabet_bound = std::max(rules.alphabet_bound, v);
    uint64_t next_sym = rules.alphabet_bound;

    auto is_sent = [&](uint64_t v) { return v >= opt.sentinel_base; };

    for (;;) {
        std::unordered_map<pair_key, uint64_t, pair_key_hash> counts;
        counts.reserve(budget * 2);
        bool overflowed = false;
        uint64_t maxc = 0;
        {
            uint64_t prev_a = 0;
            bool prev_counted = false;
            for (size_t i = 0; i + 1 < seq.size(); ++i) {
                uint64_t a = seq[i], b = seq[i + 1];
                if (is_sent(a) || is_sent(b)) {
                    prev_counted = false;
                    continue;
                }
                if (a == b && prev_counted && prev_a == a) {
                    prev_counted = false;  // overlapping run occurrence
                    continue;
                }
                auto it = counts.find(pair_key{a, b});
                if (it == counts.end()) {
                    if (counts.size() >= budget) {
                        overflowed = true;
                        prev_counted = false;
                        continue;
                    }
                    it = counts.emplace(pair_key{a, b}, 0).first;
                }
                maxc = std::max(maxc, ++it->second);
                prev_counted = true;
                prev_a = a;
            }
        }
        if (maxc < 2) {
            if (!overflowed) break;
            budget *= 2;
            continue;
        }

        uint64_t threshold = std::max<uint64_t>(2, (maxc + 1) / 2);
        std::unordered_map<pair_key, uint64_t, pair_key_hash> chosen;  // pair -> symbol (0 until first use)
        for (const auto& [k, c] : counts)
            if (c >= threshold) chosen.emplace(k, 0);

        uint64_t eliminated = 0;
        size_t w = 0;
        for (size_t i = 0; i < seq.size();) {
            if (i + 1 < seq.size() && !is_sent(seq[i]) && !is_sent(seq[i + 1])) {
                auto it = chosen.find(pair_key{seq[i], seq[i + 1]});
                if (it != chosen.end()) {
                    if (it->second == 0) {
                        if (next_sym + 1 >= opt.sentinel_base)
                            throw std::overflow_error("repair: symbol space exhausted");
                        it->second = ++next_sym;
                        rules.rules.push_back(rule{it->first.a, it->first.b});
                        rules.freq.push_back(0);
                    }
                    uint64_t sym = it->second;
                    ++rules.freq[sym - rules.alphabet_bound - 1];
                    seq[w++] = sym;
                    i += 2;
                    ++eliminated;
                    continue;
                }
            }
            seq[w++] = seq[i++];
        }
        seq.resize(w);
        budget += eliminated;
    }
    return repair_result{std::move(seq), std::move(rules)};
}

repair_result repair_compress(const std::vector<uint64_t>& input, const repair_options& opt) {
    for (uint64_t v : input)
        if (v < 1) throw std::invalid_argument("repair: values must be >= 1");
    if (input.empty()) return {};
    return opt.exact ? repair_exact(input, opt) : repair_approx(input, opt);
}

ref_flags reference_flags(const rule_list& rules) {
    ref_flags out;
    out.left.resize(rules.size());
    out.right.resize(rules.size());
    std::vector<uint8_t> used(rules.size(), 0);
    for (uint64_t i = 0; i < rules.size(); ++i) {
        auto classify = [&](uint64_t sym) -> uint8_t {
            if (rules.is_terminal(sym)) return 1;
            uint64_t r = rules.rule_index(sym);
            if (used[r]) return 1;
            used[r] = 1;  // first use: the child's tree is inlined here
            return 0;
        };
        out.left[i] = classify(rules.rules[i].left);
        out.right[i] = classify(rules.rules[i].right);
    }
    return out;
}

forest_result build_forest(const rule_list& rules, bool with_sums, uint64_t shift) {
    if (shift < rules.alphabet_bound)
        throw std::invalid_argument("build_forest: shift below alphabet bound");

    uint64_t d = rules.size();
    constexpr uint64_t NONE = ~uint64_t(0);
    // first use of each rule, scanning bodies in creation order
    std::vector<uint64_t> host(d, NONE);
    std::vector<uint8_t> host_slot(d, 0);
    for (uint64_t i = 0; i < d; ++i) {
        for (int slot = 0; slot < 2; ++slot) {
            uint64_t c = slot ? rules.rules[i].right : rules.rules[i].left;
            if (rules.is_terminal(c)) continue;
            uint64_t r = rules.rule_index(c);
            if (host[r] == NONE) {
                host[r] = i;
                host_slot[r] = uint8_t(slot);
            }
        }
    }

    std::vector<bool> rb_bits;
    std::vector<uint64_t> root_pos(d, 0);
    std::vector<uint64_t> leaf_vals;                     // refs patched once positions are known
    std::vector<std::pair<uint64_t, uint64_t>> patches;  // (leaf index, rule)
    std::vector<uint64_t> pos_rule;                      // rule at each 1-position
    std::vector<uint8_t> placed(d, 0);

    struct frame {
        uint64_t rule_idx;
        int next_child;
    };
    std::vector<frame> stack;

    auto open_node = [&](uint64_t r) {
        rb_bits.push_back(true);
        pos_rule.push_back(r);
        root_pos[r] = rb_bits.size();
        placed[r] = 1;
        stack.push_back({r, 0});
    };

    auto emit_tree = [&](uint64_t top) {
        open_node(top);
        while (!stack.empty()) {
            frame& fr = stack.back();
            if (fr.next_child == 2) {
                stack.pop_back();
                continue;
            }
            uint64_t i = fr.rule_idx;
            int slot = fr.next_child++;
            uint64_t c = slot ? rules.rules[i].right : rules.rules[i].left;
            if (rules.is_terminal(c)) {
                rb_bits.push_back(false);
                pos_rule.push_back(NONE);
                leaf_vals.push_back(c);
            } else {
                uint64_t r = rules.rule_index(c);
                if (host[r] == i && host_slot[r] == slot) {
                    open_node(r);
                } else {
                    rb_bits.push_back(false);
                    pos_rule.push_back(NONE);
                    patches.emplace_back(leaf_vals.size(), r);
                    leaf_vals.push_back(0);
                }
            }
        }
    };

    // Trees come out ordered by the smallest rule index they contain.
    for (uint64_t i = 0; i < d; ++i) {
        if (placed[i]) continue;
        uint64_t top = i;
        while (host[top] != NONE) top = host[top];
        emit_tree(top);
    }

    for (auto [li, r] : patches) leaf_vals[li] = shift + root_pos[r];

    uint64_t l = rb_bits.size();
    forest_result out;
    out.root_pos = std::move(root_pos);
    out.forest.with_sums = with_sums;
    out.forest.shift = shift;
    out.forest.rb = rank_bitmap::from_bits(rb_bits);

    std::vector<uint64_t> rs_vals;
    uint64_t max_val = shift + l;
    if (with_sums) {
        std::vector<uint64_t> sums(d, 0);
        for (uint64_t i = 0; i < d; ++i) {
            auto value_of = [&](uint64_t c) {
                return rules.is_terminal(c) ? c : sums[rules.rule_index(c)];
            };
            sums[i] = checked_sum(value_of(rules.rules[i].left), value_of(rules.rules[i].right));
            max_val = std::max(max_val, sums[i]);
        }
        rs_vals.resize(l);
        uint64_t leaf = 0;
        for (uint64_t pos = 1; pos <= l; ++pos)
            rs_vals[pos - 1] = rb_bits[pos - 1] ? sums[pos_rule[pos - 1]] : leaf_vals[leaf++];
    } else {
        rs_vals = std::move(leaf_vals);
    }
    if (l > 0) out.forest.rs = packed_array::pack(rs_vals, width_for(max_val));
    return out;
}

static uint64_t decode_root(const grammar_forest& f, uint64_t sym) {
    uint64_t pos = sym - f.shift;
    if (pos < 1 || pos > f.rb.size() || !f.rb.bit(pos))
        throw std::invalid_argument("grammar: symbol does not name a subtree root");
    return pos;
}

void expand_append(const grammar_forest& f, uint64_t sym, std::vector<uint64_t>& out) {
    if (!f.is_nonterminal(sym)) {
        out.push_back(sym);
        return;
    }
    struct frame {
        uint64_t pos;
        int64_t excess;
    };
    std::vector<frame> stack;
    stack.push_back({decode_root(f, sym), 0});
    while (!stack.empty()) {
        frame& fr = stack.back();
        if (fr.excess < 0) {
            stack.pop_back();
            continue;
        }
        uint64_t p = fr.pos++;
        if (f.rb.bit(p)) {
            ++fr.excess;
        } else {
            --fr.excess;
            uint64_t v = f.leaf_value(p);
            if (f.is_nonterminal(v))
                stack.push_back({decode_root(f, v), 0});
            else
                out.push_back(v);
        }
    }
}

std::vector<uint64_t> expand(const grammar_forest& f, uint64_t sym) {
    std::vector<uint64_t> out;
    expand_append(f, sym, out);
    return out;
}

uint64_t phrase_sum(const grammar_forest& f, uint64_t sym) {
    if (!f.is_nonterminal(sym)) return sym;
    uint64_t root = decode_root(f, sym);
    if (f.with_sums) return f.node_sum(root);
    uint64_t total = 0;
    struct frame {
        uint64_t pos;
        int64_t excess;
    };
    std::vector<frame> stack{{root, 0}};
    while (!stack.empty()) {
        frame& fr = stack.back();
        if (fr.excess < 0) {
            stack.pop_back();
            continue;
        }
        uint64_t p = fr.pos++;
        if (f.rb.bit(p)) {
            ++fr.excess;
        } else {
            --fr.excess;
            uint64_t v = f.leaf_value(p);
            if (f.is_nonterminal(v))
                stack.push_back({decode_root(f, v), 0});
            else
                total = checked_sum(total, v);
        }
    }
    return total;
}

uint64_t subtree_end(const rank_bitmap& rb, uint64_t pos) {
    int64_t excess = 0;
    for (;;) {
        excess += rb.bit(pos) ? 1 : -1;
        if (excess < 0) return pos;
        ++pos;
    }
}

uint32_t model_width(uint64_t sigma, uint64_t l) {
    uint64_t values = l == 0 ? sigma : sigma + l - 2;
    return ceil_log2(std::max<uint64_t>(values, 1));
}

cut_result optimize_cut(const rule_list& rules, const std::vector<uint64_t>& seq, uint32_t rho) {
    uint64_t dcount = rules.size();
    ref_flags fl = reference_flags(rules);

    uint64_t sigma = rules.alphabet_bound;
    uint64_t n = seq.size();
    uint64_t d = 0, l = 0;
    for (uint64_t i = 0; i < dcount; ++i) {
        uint64_t c = uint64_t(fl.left[i]) + fl.right[i];
        d += rho + c;
        l += 1 + c;
    }

    auto size_at = [&](uint64_t dd, uint64_t nn, uint64_t ll) {
        return (dd + nn) * uint64_t(model_width(sigma, ll)) + ll;
    };

    // Scan cuts from full to empty; ties keep the larger cut.
    cut_result best{dcount, size_at(d, n, l)};
    for (uint64_t m = dcount; m-- > 0;) {
        uint64_t c = uint64_t(fl.left[m]) + fl.right[m];
        n += rules.freq[m];
        d -= rho + c;
        l -= 1 + c;
        uint64_t sz = size_at(d, n, l);
        if (sz < best.predicted_bits) best = {m, sz};
    }
    return best;
}

unroll_result unroll_to(const std::vector<uint64_t>& seq, const rule_list& rules, uint64_t cut) {
    if (cut > rules.size()) throw std::invalid_argument("unroll_to: cut past rule count");
    uint64_t d = rules.size();
    unroll_result out;
    out.rules.alphabet_bound = rules.alphabet_bound;
    out.rules.rules.assign(rules.rules.begin(), rules.rules.begin() + cut);
    out.rules.freq.assign(rules.freq.begin(), rules.freq.begin() + cut);

    auto is_discarded = [&](uint64_t c) {
        return c > rules.alphabet_bound && c <= rules.alphabet_bound + d && rules.rule_index(c) >= cut;
    };

    std::vector<std::vector<uint64_t>> body(d - cut);  // expansions over surviving symbols
    for (uint64_t i = cut; i < d; ++i) {
        auto& b = body[i - cut];
        for (uint64_t c : {rules.rules[i].left, rules.rules[i].right}) {
            if (is_discarded(c)) {
                const auto& sub = body[rules.rule_index(c) - cut];
                b.insert(b.end(), sub.begin(), sub.end());
            } else {
                b.push_back(c);
            }
        }
    }
    for (uint64_t c : seq) {
        if (is_discarded(c)) {
            const auto& sub = body[rules.rule_index(c) - cut];
            out.seq.insert(out.seq.end(), sub.begin(), sub.end());
        } else {
            out.seq.push_back(c);
        }
    }
    return out;
}

std::vector<uint64_t> rule_heights(const rule_list& rules) {
    std::vector<uint64_t> h(rules.size(), 0);
    for (uint64_t i = 0; i < rules.size(); ++i) {
        auto hv = [&](uint64_t c) { return rules.is_terminal(c) ? 1 : h[rules.rule_index(c)]; };
        h[i] = 1 + std::max(hv(rules.rules[i].left), hv(rules.rules[i].right));
    }
    return h;
}

uint64_t max_rule_height(const rule_list& rules) {
    uint64_t m = 0;
    for (uint64_t h : rule_heights(rules)) m = std::max(m, h);
    return m;
}

}  // namespace ridx
