#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "juris/text.hpp"

namespace juris::kb {

using json = nlohmann::json;

enum class LawCategory { civil, criminal, interpretation, other };

LawCategory law_category_from_string(const std::string& s);
std::string to_string(LawCategory c);

struct LawArticle {
    std::string article_id;
    std::string law_name;
    int article_number = 0;
    std::string body;
    LawCategory category = LawCategory::other;

    json to_json() const;
};

struct Charge {
    std::string charge_id;
    std::string name;
    std::set<std::string> aliases;

    json to_json() const;
};

enum class CaseType { civil, criminal };

CaseType case_type_from_string(const std::string& s);
std::string to_string(CaseType t);

struct CaseRecord {
    std::string case_id;
    CaseType case_type = CaseType::civil;
    std::string facts;
    std::string judgment;
    std::set<std::string> cited_article_ids;
    std::set<std::string> charge_ids;

    json to_json() const;
};

enum class TemplateType { complaint, defence };

// Accepts "complaint", "defence"/"defense" and the wire variants with a
// trailing " document" ("complaint document"). Throws invalid_argument.
TemplateType template_type_from_string(const std::string& s);
std::string to_string(TemplateType t);

enum class Requirement { mandatory, optional };

struct TemplateSection {
    std::string name;
    Requirement requirement = Requirement::mandatory;
    std::string guidance;
};

struct DocumentTemplate {
    TemplateType type = TemplateType::complaint;
    std::vector<TemplateSection> sections;

    std::vector<std::string> mandatory_sections() const;
    // A minimal document containing every section heading in template order,
    // used for plan seeding and checker agreement tests.
    std::string skeleton() const;
    json to_json() const;
};

enum class CourtType { civil, criminal };

CourtType court_type_from_string(const std::string& s);
std::string to_string(CourtType t);

struct ProcedureAction {
    std::string id;
    std::string description;
};

struct ProcedureStage {
    std::string name;
    std::vector<std::string> aliases;
    std::vector<ProcedureAction> mandatory_actions;
};

struct ProcedureSpec {
    CourtType court_type = CourtType::civil;
    std::vector<ProcedureStage> stages;

    std::size_t total_mandatory_actions() const;
    json to_json() const;
    json stage_to_json(std::size_t index) const;
};

// Pluggable dense-embedding backend. The default retrieval path is purely
// lexical; installing an Embedder at ingest switches article and case
// ranking to cosine over its vectors without any API change.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<double> embed(const std::string& text) const = 0;
    virtual std::size_t dimension() const = 0;
};

struct IngestCounts {
    std::size_t articles = 0;
    std::size_t charges = 0;
    std::size_t cases = 0;
    std::size_t map_entries = 0;
    std::size_t templates = 0;
    std::size_t procedures = 0;
};

struct ScoredArticle {
    const LawArticle* article;
    double score;
};

struct ScoredCase {
    const CaseRecord* record;
    double score;
};

class KnowledgeBase {
public:
    // Loads laws.jsonl, charges.jsonl, cases.jsonl, charge_law_map.jsonl,
    // templates/*.jsonl and procedures/*.jsonl from root, builds the indices
    // and validates referential integrity. Throws ingest_error for missing
    // or unreadable inputs and integrity_error for dangling references.
    static std::shared_ptr<KnowledgeBase> ingest(const std::filesystem::path& root,
                                                 std::shared_ptr<Embedder> embedder = nullptr);

    const IngestCounts& counts() const { return counts_; }

    std::vector<ScoredArticle> search_articles(const std::string& query, std::size_t topk) const;

    // Excludes the input article. Adds the declared structural bonus on top
    // of the lexical score: +0.25 for same law_name, +0.25 more when the
    // article numbers are adjacent within that law.
    std::vector<ScoredArticle> similar_articles(const std::string& article_id,
                                                std::size_t topk) const;

    // Related charges ranked by the overlap of mapped article sets; inputs
    // excluded, zero-overlap charges omitted. Returned with their overlap.
    std::vector<std::pair<const Charge*, std::size_t>> expand_charges(
        const std::vector<std::string>& charge_names, std::size_t topk) const;

    std::vector<ScoredCase> search_cases(CaseType type, const std::string& query,
                                         std::size_t topk) const;

    // Exact match after law-name normalization; never a fuzzy substitute.
    const LawArticle& lookup_article(const std::string& law_name, int article_number) const;
    const LawArticle* try_lookup_article(const std::string& law_name, int article_number) const;

    const LawArticle* find_article_by_id(const std::string& article_id) const;
    // All articles with the given number, any law. Grounding aid for
    // citations like "Art. 201" that omit the law name.
    std::vector<const LawArticle*> find_articles_by_number(int article_number) const;
    bool law_exists(const std::string& law_name) const;

    const Charge* resolve_charge(const std::string& name_or_alias) const;
    const Charge* find_charge_by_id(const std::string& charge_id) const;
    const std::vector<std::string>* mapped_articles(const std::string& charge_id) const;

    const DocumentTemplate& get_template(TemplateType type) const;

    const ProcedureSpec& get_procedure(CourtType type) const;
    // stage == 0 returns the full spec as JSON; stage == k the k-th stage.
    json get_procedure_json(CourtType type, std::size_t stage) const;

    const std::vector<LawArticle>& articles() const { return articles_; }
    const std::vector<Charge>& charges() const { return charges_; }
    const std::vector<CaseRecord>& cases() const { return cases_; }
    const std::map<std::string, std::vector<std::string>>& charge_law_map() const {
        return charge_law_map_;
    }

private:
    KnowledgeBase() = default;
    void build_indices();
    void validate_integrity() const;
    double article_pair_score(const LawArticle& a, const LawArticle& b) const;

    std::vector<LawArticle> articles_;
    std::vector<Charge> charges_;
    std::vector<CaseRecord> cases_;
    std::map<std::string, std::vector<std::string>> charge_law_map_;
    std::map<TemplateType, DocumentTemplate> templates_;
    std::map<CourtType, ProcedureSpec> procedures_;

    std::map<std::string, std::size_t> article_by_id_;
    std::map<std::pair<std::string, int>, std::size_t> article_by_name_number_;
    std::map<std::string, std::size_t> charge_by_id_;
    std::map<std::string, std::size_t> charge_by_alias_;  // normalized name/alias -> index
    std::map<std::string, std::size_t> case_by_id_;

    text::LexicalIndex article_index_;
    text::LexicalIndex case_index_;

    std::shared_ptr<Embedder> embedder_;
    std::map<std::string, std::vector<double>> article_vectors_;
    std::map<std::string, std::vector<double>> case_vectors_;

    IngestCounts counts_;
};

// Parses citation strings like "Criminal Law Art.201", "Civil Code Article
// 122" or a bare "Art. 201" into (law_name, article_number). The law name
// may come out empty.
struct ArticleRef {
    std::string law_name;
    std::optional<int> article_number;
};
ArticleRef parse_article_ref(const std::string& text);

// Section names in order of first occurrence in the document. A heading is
// a line equal to a section name after loose normalization (case,
// whitespace and punctuation dropped).
std::vector<std::string> detect_section_sequence(const std::string& document,
                                                 const std::vector<std::string>& section_names);

}  // namespace juris::kb
