#include "ridx/postings.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ridx {

std::vector<uint64_t> to_gaps(const std::vector<uint64_t>& docs) {
    std::vector<uint64_t> gaps;
    gaps.reserve(docs.size());
    uint64_t prev = 0;
    for (uint64_t d : docs) {
        if (d <= prev) throw std::invalid_argument("to_gaps: document ids must be strictly increasing and >= 1");
        gaps.push_back(d - prev);
        prev = d;
    }
    return gaps;
}

std::vector<uint64_t> from_gaps(const std::vector<uint64_t>& gaps) {
    std::vector<uint64_t> docs;
    docs.reserve(gaps.size());
    uint64_t acc = 0;
    for (uint64_t g : gaps) {
        if (g < 1) throw std::invalid_argument("from_gaps: gaps must be >= 1");
        acc += g;
        docs.push_back(acc);
    }
    return docs;
}

static bool word_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    for (unsigned char c : text) {
        if (word_char(c)) {
            cur.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : char(c));
        } else if (!cur.empty()) {
            words.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

corpus_postings parse_corpus(const std::vector<std::string>& documents) {
    corpus_postings out;
    out.universe = documents.size();
    for (uint64_t doc = 1; doc <= documents.size(); ++doc) {
        std::set<std::string> seen;
        for (auto& w : tokenize(documents[doc - 1])) seen.insert(std::move(w));
        for (const auto& w : seen) out.lists[w].push_back(doc);
    }
    return out;
}

std::vector<std::string> pack_documents(const std::vector<std::string>& docs, uint64_t pack) {
    if (pack <= 1) return docs;
    std::vector<std::string> out;
    out.reserve((docs.size() + pack - 1) / pack);
    for (uint64_t i = 0; i < docs.size(); i += pack) {
        std::string merged;
        for (uint64_t j = i; j < std::min<uint64_t>(i + pack, docs.size()); ++j) {
            if (!merged.empty()) merged.push_back('\n');
            merged += docs[j];
        }
        out.push_back(std::move(merged));
    }
    return out;
}

std::vector<std::string> read_corpus(const std::string& path, const std::string& separator) {
    namespace fs = std::filesystem;
    std::vector<std::string> docs;
    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(path))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            std::ifstream in(f, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            docs.push_back(ss.str());
        }
        return docs;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus: " + path);
    std::string line, cur;
    bool any = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == separator) {
            docs.push_back(cur);
            cur.clear();
            any = true;
            continue;
        }
        if (!cur.empty()) cur.push_back('\n');
        cur += line;
        any = true;
    }
    if (any) docs.push_back(cur);
    return docs;
}

void write_corpus(const std::string& path, const std::vector<std::string>& docs,
                  const std::string& separator) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus: " + path);
    for (uint64_t i = 0; i < docs.size(); ++i) {
        if (i) out << separator << '\n';
        out << docs[i] << '\n';
    }
}

std::vector<std::string> postings_to_documents(const corpus_postings& postings) {
    std::vector<std::vector<const std::string*>> per_doc(postings.universe);
    for (const auto& [term, docs] : postings.lists)
        for (uint64_t d : docs) per_doc.at(d - 1).push_back(&term);
    std::vector<std::string> out;
    out.reserve(postings.universe);
    for (const auto& terms : per_doc) {
        std::string line;
        for (const auto* t : terms) {
            if (!line.empty()) line.push_back(' ');
            line += *t;
        }
        out.push_back(std::move(line));
    }
    return out;
}

}  // namespace ridx
