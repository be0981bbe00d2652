#pragma once

#include <cstdint>
#include <vector>

#include "ridx/bits.hpp"
#include "ridx/bitvec.hpp"

namespace ridx {

/*
    Re-Pair over integer sequences.

    Working symbol space: terminals are the original values 1..alphabet_bound;
    the i-th created rule (0-based) is the symbol alphabet_bound + 1 + i.
    Values >= the sentinel base are list separators: they never participate in
    a pair and survive compression untouched.
*/
struct rule {
    uint64_t left, right;
};

struct rule_list {
    std::vector<rule> rules;    // creation order; bodies reference terminals or earlier rules
    std::vector<uint64_t> freq; // occurrences replaced when the rule was created
    uint64_t alphabet_bound = 0;

    uint64_t size() const { return rules.size(); }
    bool is_terminal(uint64_t sym) const { return sym <= alphabet_bound; }
    uint64_t rule_index(uint64_t sym) const { return sym - alphabet_bound - 1; }
    uint64_t rule_symbol(uint64_t index) const { return alphabet_bound + 1 + index; }
};

struct repair_options {
    bool exact = true;
    uint64_t table_budget = 10000;  // approximate mode: initial pair-table capacity
    uint64_t sentinel_base = ~uint64_t(0);
};

struct repair_result {
    std::vector<uint64_t> seq;  // C, sentinels still in place
    rule_list rules;
};

repair_result repair_compress(const std::vector<uint64_t>& input, const repair_options& opt = {});

// Per-child leaf cost flags: 1 when the child occupies a leaf of its rule's
// tree (terminals, and nonterminals already inlined at an earlier use), 0
// when the child's own tree is inlined at this slot.
struct ref_flags {
    std::vector<uint8_t> left, right;
};
ref_flags reference_flags(const rule_list& rules);

/*
    Forest dictionary: R_B holds the preorder shapes of the rule trees
    (1 = internal node, 0 = leaf), R_S the values. Without sums R_S has one
    entry per leaf, addressed by rank0; with sums it is aligned with every
    R_B position and 1-positions carry the phrase sums. A value v <= shift
    is a terminal gap; v > shift names the subtree rooted at R_B[v - shift].
*/
struct grammar_forest {
    rank_bitmap rb;
    packed_array rs;
    bool with_sums = true;
    uint64_t shift = 0;

    bool empty() const { return rb.size() == 0; }
    bool is_nonterminal(uint64_t sym) const { return sym > shift; }

    // Value stored for the leaf at R_B position pos (pos must be a 0-position).
    uint64_t leaf_value(uint64_t pos) const {
        return with_sums ? rs.get(pos - 1) : rs.get(rb.rank0(pos) - 1);
    }
    // Phrase sum stored at an internal position (sums variant only).
    uint64_t node_sum(uint64_t pos) const { return rs.get(pos - 1); }

    uint64_t dictionary_bits() const { return rb.size() + rs.bits(); }
};

struct forest_result {
    grammar_forest forest;
    std::vector<uint64_t> root_pos;  // per rule, 1-based position of its 1 in R_B
};

forest_result build_forest(const rule_list& rules, bool with_sums, uint64_t shift);

// Full expansion of an encoded symbol (terminal gap, or shift + root position).
void expand_append(const grammar_forest& f, uint64_t sym, std::vector<uint64_t>& out);
std::vector<uint64_t> expand(const grammar_forest& f, uint64_t sym);

// O(1) with sums, by subtree walk without.
uint64_t phrase_sum(const grammar_forest& f, uint64_t sym);

// Last R_B position of the subtree rooted at pos (inclusive).
uint64_t subtree_end(const rank_bitmap& rb, uint64_t pos);

/*
    Space model for choosing how much of the dictionary to keep: with d = |R_S|,
    l = |R_B| and n = |C|, a cut keeping the first `cut` rules costs
    (d + n) * model_width(sigma, l) + l bits. Evaluated for every prefix of the
    creation order in O(d) by unrolling rules from the last one backwards.
*/
uint32_t model_width(uint64_t sigma, uint64_t l);

struct cut_result {
    uint64_t best_cut = 0;
    uint64_t predicted_bits = 0;
};

cut_result optimize_cut(const rule_list& rules, const std::vector<uint64_t>& seq, uint32_t rho);

struct unroll_result {
    std::vector<uint64_t> seq;
    rule_list rules;
};

// Keep the first `cut` rules; occurrences of discarded rules in the sequence
// are replaced by their expansion over the surviving symbols.
unroll_result unroll_to(const std::vector<uint64_t>& seq, const rule_list& rules, uint64_t cut);

// Derivation-tree heights, counting nodes on the path (terminal = 1).
std::vector<uint64_t> rule_heights(const rule_list& rules);
uint64_t max_rule_height(const rule_list& rules);

}  // namespace ridx
