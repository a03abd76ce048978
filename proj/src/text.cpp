#include "juris/text.hpp"

#include <algorithm>
#include <cmath>

#include "juris/errors.hpp"

namespace juris::text {

namespace {

bool is_unsegmented(std::uint32_t cp) {
    // Scripts written without word separators: fall back to character bigrams.
    return (cp >= 0x2E80 && cp <= 0x2FDF) ||   // CJK radicals
           (cp >= 0x3040 && cp <= 0x30FF) ||   // hiragana, katakana
           (cp >= 0x3400 && cp <= 0x4DBF) ||   // CJK extension A
           (cp >= 0x4E00 && cp <= 0x9FFF) ||   // CJK unified
           (cp >= 0xF900 && cp <= 0xFAFF) ||   // CJK compatibility
           (cp >= 0x0E00 && cp <= 0x0E7F);     // Thai
}

bool is_word_char(std::uint32_t cp) {
    return (cp >= '0' && cp <= '9') ||
           (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z') ||
           (cp >= 0x00C0 && cp <= 0x024F && cp != 0x00D7 && cp != 0x00F7) ||  // Latin suppl./ext.
           (cp >= 0x0370 && cp <= 0x03FF) ||   // Greek
           (cp >= 0x0400 && cp <= 0x04FF) ||   // Cyrillic
           (cp >= 0xAC00 && cp <= 0xD7A3);     // Hangul syllables (space separated)
}

std::uint32_t lower_cp(std::uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;  // Latin-1
    if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 0x20;  // Greek
    if (cp >= 0x0410 && cp <= 0x042F) return cp + 0x20;                  // Cyrillic
    if (cp >= 0x0400 && cp <= 0x040F) return cp + 0x50;
    return cp;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace

std::vector<std::uint32_t> decode_utf8(const std::string& s) {
    std::vector<std::uint32_t> cps;
    cps.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        std::uint32_t cp = 0;
        std::size_t extra = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            // Stray continuation or invalid lead byte: keep as replacement.
            cps.push_back(0xFFFD);
            ++i;
            continue;
        }
        if (i + extra >= s.size()) {
            cps.push_back(0xFFFD);
            ++i;
            continue;
        }
        bool valid = true;
        for (std::size_t k = 1; k <= extra; ++k) {
            unsigned char cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (!valid) {
            cps.push_back(0xFFFD);
            ++i;
            continue;
        }
        cps.push_back(cp);
        i += extra + 1;
    }
    return cps;
}

std::string encode_utf8(const std::vector<std::uint32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (auto cp : cps) append_utf8(out, cp);
    return out;
}

std::vector<std::string> tokenize(const std::string& utf8) {
    std::vector<std::string> tokens;
    auto cps = decode_utf8(utf8);
    std::size_t i = 0;
    while (i < cps.size()) {
        if (is_word_char(cps[i])) {
            std::string tok;
            while (i < cps.size() && is_word_char(cps[i])) {
                append_utf8(tok, lower_cp(cps[i]));
                ++i;
            }
            tokens.push_back(std::move(tok));
        } else if (is_unsegmented(cps[i])) {
            std::size_t start = i;
            while (i < cps.size() && is_unsegmented(cps[i])) ++i;
            if (i - start == 1) {
                std::string tok;
                append_utf8(tok, cps[start]);
                tokens.push_back(std::move(tok));
            } else {
                for (std::size_t k = start; k + 1 < i; ++k) {
                    std::string tok;
                    append_utf8(tok, cps[k]);
                    append_utf8(tok, cps[k + 1]);
                    tokens.push_back(std::move(tok));
                }
            }
        } else {
            ++i;
        }
    }
    return tokens;
}

std::string normalize_loose(const std::string& utf8) {
    auto toks = tokenize(utf8);
    std::string out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i) out.push_back(' ');
        out += toks[i];
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string to_lower(const std::string& utf8) {
    auto cps = decode_utf8(utf8);
    for (auto& cp : cps) cp = lower_cp(cp);
    return encode_utf8(cps);
}

std::string normalize_law_name(const std::string& name) {
    return to_lower(trim(name));
}

void LexicalIndex::add_document(const std::string& id, const std::string& body) {
    if (docs_.count(id)) {
        throw Error(ErrorCode::invalid_argument, "duplicate document id: " + id);
    }
    Doc doc;
    for (auto& tok : tokenize(body)) doc.tf[tok] += 1;
    docs_.emplace(id, std::move(doc));
    finalized_ = false;
}

double LexicalIndex::idf(const std::string& term) const {
    auto it = df_.find(term);
    int df = it == df_.end() ? 0 : it->second;
    return std::log(static_cast<double>(docs_.size() + 1) / (df + 1)) + 1.0;
}

void LexicalIndex::finalize() {
    df_.clear();
    for (auto& [id, doc] : docs_) {
        for (auto& [term, tf] : doc.tf) df_[term] += 1;
    }
    for (auto& [id, doc] : docs_) {
        double sum = 0.0;
        for (auto& [term, tf] : doc.tf) {
            double w = tf * idf(term);
            sum += w * w;
        }
        doc.norm = std::sqrt(sum);
    }
    finalized_ = true;
}

std::map<std::string, int> LexicalIndex::query_tf(const std::string& query) const {
    std::map<std::string, int> qtf;
    for (auto& tok : tokenize(query)) qtf[tok] += 1;
    return qtf;
}

double LexicalIndex::query_norm(const std::map<std::string, int>& qtf) const {
    double sum = 0.0;
    for (auto& [term, tf] : qtf) {
        double w = tf * idf(term);
        sum += w * w;
    }
    return std::sqrt(sum);
}

double LexicalIndex::doc_score(const std::map<std::string, int>& qtf, double qnorm,
                               const Doc& doc) const {
    if (qnorm == 0.0 || doc.norm == 0.0) return 0.0;
    double dot = 0.0;
    for (auto& [term, tf] : qtf) {
        auto it = doc.tf.find(term);
        if (it == doc.tf.end()) continue;
        double w = idf(term);
        dot += (tf * w) * (it->second * w);
    }
    return dot / (qnorm * doc.norm);
}

std::vector<ScoredDoc> LexicalIndex::search(const std::string& query, std::size_t topk) const {
    if (!finalized_) throw Error(ErrorCode::invalid_state, "index not finalized");
    auto qtf = query_tf(query);
    double qnorm = query_norm(qtf);
    std::vector<ScoredDoc> out;
    for (auto& [id, doc] : docs_) {
        double s = doc_score(qtf, qnorm, doc);
        if (s > 0.0) out.push_back({id, s});
    }
    std::stable_sort(out.begin(), out.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (topk > 0 && out.size() > topk) out.resize(topk);
    return out;
}

double LexicalIndex::score(const std::string& query, const std::string& doc_id) const {
    if (!finalized_) throw Error(ErrorCode::invalid_state, "index not finalized");
    auto it = docs_.find(doc_id);
    if (it == docs_.end()) throw Error(ErrorCode::not_found, "no such document: " + doc_id);
    auto qtf = query_tf(query);
    return doc_score(qtf, query_norm(qtf), it->second);
}

double LexicalIndex::cosine(const std::string& id_a, const std::string& id_b) const {
    if (!finalized_) throw Error(ErrorCode::invalid_state, "index not finalized");
    auto a = docs_.find(id_a);
    auto b = docs_.find(id_b);
    if (a == docs_.end() || b == docs_.end()) {
        throw Error(ErrorCode::not_found, "no such document");
    }
    if (a->second.norm == 0.0 || b->second.norm == 0.0) return 0.0;
    double dot = 0.0;
    for (auto& [term, tf] : a->second.tf) {
        auto it = b->second.tf.find(term);
        if (it == b->second.tf.end()) continue;
        double w = idf(term);
        dot += (tf * w) * (it->second * w);
    }
    return dot / (a->second.norm * b->second.norm);
}

std::vector<ScoredDoc> rank_lexical(const std::string& query,
                                    const std::vector<std::pair<std::string, std::string>>& docs,
                                    std::size_t topk) {
    LexicalIndex index;
    for (auto& [id, body] : docs) index.add_document(id, body);
    index.finalize();
    return index.search(query, topk);
}

}  // namespace juris::text
