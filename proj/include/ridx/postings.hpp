#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ridx {

/// Sorted document ids for one term; ids are 1-based and strictly increasing.
struct posting_list {
    std::string term;
    std::vector<uint64_t> docs;

    uint64_t length() const { return docs.size(); }
};

// term -> postings, plus the universe size u (number of documents).
struct corpus_postings {
    uint64_t universe = 0;
    std::map<std::string, std::vector<uint64_t>> lists;
};

// d-gaps; the first gap is p1 itself (measured from 0).
std::vector<uint64_t> to_gaps(const std::vector<uint64_t>& docs);
std::vector<uint64_t> from_gaps(const std::vector<uint64_t>& gaps);

// A word is a maximal run of letters and digits, folded to lowercase.
std::vector<std::string> tokenize(const std::string& text);

corpus_postings parse_corpus(const std::vector<std::string>& documents);

// Merge every `pack` consecutive documents into one.
std::vector<std::string> pack_documents(const std::vector<std::string>& docs, uint64_t pack);

// Corpus input: a single file with a separator line between documents, or a
// directory of text files (one document per file, lexicographic order).
std::vector<std::string> read_corpus(const std::string& path, const std::string& separator = "---");

void write_corpus(const std::string& path, const std::vector<std::string>& docs,
                  const std::string& separator = "---");

// Render postings back into a document-per-id text corpus (term names joined
// by spaces), so generated postings can flow through the normal build path.
std::vector<std::string> postings_to_documents(const corpus_postings& postings);

}  // namespace ridx
