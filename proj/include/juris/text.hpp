#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace juris::text {

// Declared tokenizer used by every lexical ranking path in the project:
// Unicode-aware, lowercased word segmentation with a character-bigram
// fallback for unsegmented scripts (CJK ideographs, kana, Thai).
std::vector<std::string> tokenize(const std::string& utf8);

// Lowercase + collapse to tokens joined by single spaces. Used for heading
// detection and quoted-text comparison, where punctuation and spacing must
// not matter.
std::string normalize_loose(const std::string& utf8);

// Law-name normalization for exact lookup: trim surrounding whitespace and
// fold case, nothing else.
std::string normalize_law_name(const std::string& name);

std::string trim(const std::string& s);
std::string to_lower(const std::string& utf8);

std::vector<std::uint32_t> decode_utf8(const std::string& s);
std::string encode_utf8(const std::vector<std::uint32_t>& cps);

struct ScoredDoc {
    std::string id;
    double score = 0.0;
};

// TF-IDF cosine index over a fixed document set.
//
// Declared scoring, shared with the brute-force oracles in the test suite:
//   idf(t)      = ln((N + 1) / (df_t + 1)) + 1
//   weight(t,d) = tf(t,d) * idf(t)
//   score(q,d)  = cosine(weight(q), weight(d))
// Per-document accumulation always iterates query terms in lexicographic
// order so that independent implementations of the same formula produce
// bit-identical sums. Ties are broken by ascending document id.
class LexicalIndex {
public:
    // Duplicate ids are rejected with invalid_argument.
    void add_document(const std::string& id, const std::string& body);

    // Computes document frequencies and norms; must be called once after the
    // last add_document and before any query.
    void finalize();

    bool finalized() const { return finalized_; }
    std::size_t size() const { return docs_.size(); }

    // Ranked search; zero-score documents are omitted. topk == 0 means all.
    std::vector<ScoredDoc> search(const std::string& query, std::size_t topk) const;

    // Score of one document against a query (same math as search).
    double score(const std::string& query, const std::string& doc_id) const;

    // TF-IDF cosine between two indexed documents.
    double cosine(const std::string& id_a, const std::string& id_b) const;

    double idf(const std::string& term) const;

private:
    struct Doc {
        std::map<std::string, int> tf;
        double norm = 0.0;
    };

    std::map<std::string, int> query_tf(const std::string& query) const;
    double doc_score(const std::map<std::string, int>& qtf, double qnorm, const Doc& doc) const;
    double query_norm(const std::map<std::string, int>& qtf) const;

    std::map<std::string, Doc> docs_;
    std::map<std::string, int> df_;
    bool finalized_ = false;
};

// Convenience one-shot ranking for small transient collections (memory
// fetch): builds an index over (id, body) pairs and searches it.
std::vector<ScoredDoc> rank_lexical(const std::string& query,
                                    const std::vector<std::pair<std::string, std::string>>& docs,
                                    std::size_t topk);

}  // namespace juris::text
