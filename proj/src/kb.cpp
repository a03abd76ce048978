#include "juris/kb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "juris/errors.hpp"

namespace juris::kb {

namespace fs = std::filesystem;

LawCategory law_category_from_string(const std::string& s) {
    auto v = text::normalize_law_name(s);
    if (v == "civil") return LawCategory::civil;
    if (v == "criminal") return LawCategory::criminal;
    if (v == "interpretation") return LawCategory::interpretation;
    if (v == "other") return LawCategory::other;
    throw Error(ErrorCode::invalid_argument, "unknown law category: " + s);
}

std::string to_string(LawCategory c) {
    switch (c) {
        case LawCategory::civil: return "civil";
        case LawCategory::criminal: return "criminal";
        case LawCategory::interpretation: return "interpretation";
        case LawCategory::other: return "other";
    }
    return "other";
}

CaseType case_type_from_string(const std::string& s) {
    auto v = text::normalize_law_name(s);
    if (v == "civil") return CaseType::civil;
    if (v == "criminal") return CaseType::criminal;
    throw Error(ErrorCode::invalid_argument, "unknown case type: " + s);
}

std::string to_string(CaseType t) {
    return t == CaseType::civil ? "civil" : "criminal";
}

TemplateType template_type_from_string(const std::string& s) {
    auto v = text::normalize_law_name(s);
    // Wire values carry a trailing " document" ("complaint document").
    const std::string suffix = " document";
    if (v.size() > suffix.size() && v.compare(v.size() - suffix.size(), suffix.size(), suffix) == 0) {
        v = v.substr(0, v.size() - suffix.size());
    }
    if (v == "complaint") return TemplateType::complaint;
    if (v == "defence" || v == "defense") return TemplateType::defence;
    throw Error(ErrorCode::invalid_argument, "unknown template type: " + s);
}

std::string to_string(TemplateType t) {
    return t == TemplateType::complaint ? "complaint" : "defence";
}

CourtType court_type_from_string(const std::string& s) {
    auto v = text::normalize_law_name(s);
    const std::string suffix = " court";
    if (v.size() > suffix.size() && v.compare(v.size() - suffix.size(), suffix.size(), suffix) == 0) {
        v = v.substr(0, v.size() - suffix.size());
    }
    if (v == "civil") return CourtType::civil;
    if (v == "criminal") return CourtType::criminal;
    throw Error(ErrorCode::invalid_argument, "unknown court type: " + s);
}

std::string to_string(CourtType t) {
    return t == CourtType::civil ? "civil" : "criminal";
}

json LawArticle::to_json() const {
    return json{{"article_id", article_id},
                {"law_name", law_name},
                {"article_number", article_number},
                {"body", body},
                {"category", to_string(category)}};
}

json Charge::to_json() const {
    return json{{"charge_id", charge_id},
                {"name", name},
                {"aliases", aliases}};
}

json CaseRecord::to_json() const {
    return json{{"case_id", case_id},
                {"case_type", to_string(case_type)},
                {"facts", facts},
                {"judgment", judgment},
                {"cited_article_ids", cited_article_ids},
                {"charge_ids", charge_ids}};
}

std::vector<std::string> DocumentTemplate::mandatory_sections() const {
    std::vector<std::string> out;
    for (auto& s : sections) {
        if (s.requirement == Requirement::mandatory) out.push_back(s.name);
    }
    return out;
}

std::string DocumentTemplate::skeleton() const {
    std::string out;
    for (auto& s : sections) {
        out += s.name + "\n";
        out += "  " + s.guidance + "\n\n";
    }
    return out;
}

json DocumentTemplate::to_json() const {
    json sections_json = json::array();
    for (auto& s : sections) {
        sections_json.push_back({{"name", s.name},
                                 {"requirement", s.requirement == Requirement::mandatory
                                                     ? "mandatory"
                                                     : "optional"},
                                 {"guidance", s.guidance}});
    }
    return json{{"template_type", to_string(type)}, {"sections", sections_json}};
}

std::size_t ProcedureSpec::total_mandatory_actions() const {
    std::size_t n = 0;
    for (auto& stage : stages) n += stage.mandatory_actions.size();
    return n;
}

json ProcedureSpec::stage_to_json(std::size_t index) const {
    const auto& stage = stages.at(index);
    json actions = json::array();
    for (auto& a : stage.mandatory_actions) {
        actions.push_back({{"id", a.id}, {"description", a.description}});
    }
    return json{{"stage", index + 1},
                {"name", stage.name},
                {"aliases", stage.aliases},
                {"mandatory_actions", actions}};
}

json ProcedureSpec::to_json() const {
    json stages_json = json::array();
    for (std::size_t i = 0; i < stages.size(); ++i) stages_json.push_back(stage_to_json(i));
    return json{{"court_type", to_string(court_type)},
                {"stage_count", stages.size()},
                {"stages", stages_json}};
}

namespace {

std::vector<json> read_jsonl(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ingest_error, "missing corpus file: " + path.string());
    }
    std::vector<json> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto trimmed = text::trim(line);
        if (trimmed.empty()) continue;
        json rec = json::parse(trimmed, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            throw Error(ErrorCode::ingest_error,
                        path.filename().string() + ":" + std::to_string(lineno) +
                            ": malformed record");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::string require_string(const json& rec, const std::string& key, const fs::path& file) {
    if (!rec.contains(key) || !rec[key].is_string()) {
        throw Error(ErrorCode::ingest_error,
                    file.filename().string() + ": record missing string field '" + key + "'");
    }
    return rec[key].get<std::string>();
}

double vec_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

ArticleRef parse_article_ref(const std::string& input) {
    ArticleRef ref;
    auto s = text::trim(input);
    // Find the last "art"/"article" marker followed by digits, or a trailing
    // bare number.
    auto lower = text::to_lower(s);
    std::size_t num_pos = std::string::npos;
    std::size_t name_end = std::string::npos;
    for (std::size_t i = 0; i + 2 < lower.size(); ++i) {
        if (lower.compare(i, 7, "article") == 0) {
            std::size_t j = i + 7;
            while (j < lower.size() && (lower[j] == '.' || lower[j] == ' ')) ++j;
            if (j < lower.size() && std::isdigit(static_cast<unsigned char>(lower[j]))) {
                num_pos = j;
                name_end = i;
            }
            continue;
        }
        if (lower.compare(i, 3, "art") == 0 &&
            (i == 0 || !std::isalpha(static_cast<unsigned char>(lower[i - 1])))) {
            std::size_t j = i + 3;
            while (j < lower.size() && (lower[j] == '.' || lower[j] == ' ')) ++j;
            if (j < lower.size() && std::isdigit(static_cast<unsigned char>(lower[j]))) {
                num_pos = j;
                name_end = i;
            }
        }
    }
    if (num_pos == std::string::npos) {
        // Trailing bare number ("Civil Code 122").
        std::size_t e = s.size();
        while (e > 0 && std::isdigit(static_cast<unsigned char>(s[e - 1]))) --e;
        if (e < s.size() && (e == 0 || s[e - 1] == ' ')) {
            num_pos = e;
            name_end = e;
        }
    }
    if (num_pos != std::string::npos) {
        int n = 0;
        std::size_t j = num_pos;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
            n = n * 10 + (s[j] - '0');
            ++j;
        }
        ref.article_number = n;
        ref.law_name = text::trim(s.substr(0, name_end));
        // Drop a trailing comma/dash left over from "Civil Code, Art. 122".
        while (!ref.law_name.empty() &&
               (ref.law_name.back() == ',' || ref.law_name.back() == '-')) {
            ref.law_name = text::trim(ref.law_name.substr(0, ref.law_name.size() - 1));
        }
    } else {
        ref.law_name = s;
    }
    return ref;
}

std::vector<std::string> detect_section_sequence(const std::string& document,
                                                 const std::vector<std::string>& section_names) {
    std::vector<std::string> lines;
    {
        std::istringstream in(document);
        std::string line;
        while (std::getline(in, line)) lines.push_back(text::normalize_loose(line));
    }
    std::vector<std::pair<std::size_t, std::string>> found;  // (line, name)
    for (auto& name : section_names) {
        auto want = text::normalize_loose(name);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (lines[i] == want) {
                found.emplace_back(i, name);
                break;
            }
        }
    }
    std::stable_sort(found.begin(), found.end(),
                     [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<std::string> out;
    for (auto& [line, name] : found) out.push_back(name);
    return out;
}

std::shared_ptr<KnowledgeBase> KnowledgeBase::ingest(const fs::path& root,
                                                     std::shared_ptr<Embedder> embedder) {
    if (!fs::is_directory(root)) {
        throw Error(ErrorCode::ingest_error, "corpus directory not found: " + root.string());
    }
    auto kb = std::shared_ptr<KnowledgeBase>(new KnowledgeBase());
    kb->embedder_ = std::move(embedder);

    for (auto& rec : read_jsonl(root / "laws.jsonl")) {
        LawArticle a;
        a.law_name = require_string(rec, "law_name", "laws.jsonl");
        if (!rec.contains("article_number") || !rec["article_number"].is_number_integer() ||
            rec["article_number"].get<int>() <= 0) {
            throw Error(ErrorCode::ingest_error,
                        "laws.jsonl: article_number must be a positive integer");
        }
        a.article_number = rec["article_number"].get<int>();
        a.body = require_string(rec, "body", "laws.jsonl");
        if (text::trim(a.body).empty()) {
            throw Error(ErrorCode::ingest_error, "laws.jsonl: empty body for " + a.law_name);
        }
        a.category = law_category_from_string(require_string(rec, "category", "laws.jsonl"));
        a.article_id = rec.contains("article_id") && rec["article_id"].is_string()
                           ? rec["article_id"].get<std::string>()
                           : a.law_name + "#" + std::to_string(a.article_number);
        kb->articles_.push_back(std::move(a));
    }

    for (auto& rec : read_jsonl(root / "charges.jsonl")) {
        Charge c;
        c.charge_id = require_string(rec, "charge_id", "charges.jsonl");
        c.name = require_string(rec, "name", "charges.jsonl");
        if (rec.contains("aliases")) {
            for (auto& a : rec["aliases"]) {
                auto alias = a.get<std::string>();
                if (alias != c.name) c.aliases.insert(alias);
            }
        }
        kb->charges_.push_back(std::move(c));
    }

    for (auto& rec : read_jsonl(root / "cases.jsonl")) {
        CaseRecord c;
        c.case_id = require_string(rec, "case_id", "cases.jsonl");
        c.case_type = case_type_from_string(require_string(rec, "case_type", "cases.jsonl"));
        c.facts = require_string(rec, "facts", "cases.jsonl");
        c.judgment = require_string(rec, "judgment", "cases.jsonl");
        if (rec.contains("cited_article_ids")) {
            for (auto& id : rec["cited_article_ids"]) c.cited_article_ids.insert(id.get<std::string>());
        }
        if (rec.contains("charge_ids")) {
            for (auto& id : rec["charge_ids"]) c.charge_ids.insert(id.get<std::string>());
        }
        kb->cases_.push_back(std::move(c));
    }

    for (auto& rec : read_jsonl(root / "charge_law_map.jsonl")) {
        auto charge_id = require_string(rec, "charge_id", "charge_law_map.jsonl");
        if (!rec.contains("article_ids") || !rec["article_ids"].is_array()) {
            throw Error(ErrorCode::ingest_error, "charge_law_map.jsonl: missing article_ids");
        }
        std::vector<std::string> ids;
        for (auto& id : rec["article_ids"]) ids.push_back(id.get<std::string>());
        kb->charge_law_map_[charge_id] = std::move(ids);
    }

    auto templates_dir = root / "templates";
    if (!fs::is_directory(templates_dir)) {
        throw Error(ErrorCode::ingest_error, "missing templates directory: " + templates_dir.string());
    }
    std::vector<fs::path> template_files;
    for (auto& entry : fs::directory_iterator(templates_dir)) {
        if (entry.path().extension() == ".jsonl") template_files.push_back(entry.path());
    }
    std::sort(template_files.begin(), template_files.end());
    for (auto& file : template_files) {
        for (auto& rec : read_jsonl(file)) {
            auto type = template_type_from_string(require_string(rec, "template_type", file));
            TemplateSection section;
            section.name = require_string(rec, "section", file);
            auto req = require_string(rec, "requirement", file);
            if (req == "mandatory") {
                section.requirement = Requirement::mandatory;
            } else if (req == "optional") {
                section.requirement = Requirement::optional;
            } else {
                throw Error(ErrorCode::ingest_error,
                            file.filename().string() + ": unknown requirement '" + req + "'");
            }
            section.guidance = rec.value("guidance", "");
            auto& tpl = kb->templates_[type];
            tpl.type = type;
            for (auto& existing : tpl.sections) {
                if (existing.name == section.name) {
                    throw Error(ErrorCode::ingest_error,
                                file.filename().string() + ": duplicate section '" +
                                    section.name + "'");
                }
            }
            tpl.sections.push_back(std::move(section));
        }
    }

    auto procedures_dir = root / "procedures";
    if (!fs::is_directory(procedures_dir)) {
        throw Error(ErrorCode::ingest_error,
                    "missing procedures directory: " + procedures_dir.string());
    }
    std::vector<fs::path> procedure_files;
    for (auto& entry : fs::directory_iterator(procedures_dir)) {
        if (entry.path().extension() == ".jsonl") procedure_files.push_back(entry.path());
    }
    std::sort(procedure_files.begin(), procedure_files.end());
    for (auto& file : procedure_files) {
        for (auto& rec : read_jsonl(file)) {
            auto type = court_type_from_string(require_string(rec, "court_type", file));
            ProcedureStage stage;
            stage.name = require_string(rec, "stage", file);
            if (rec.contains("aliases")) {
                for (auto& a : rec["aliases"]) stage.aliases.push_back(a.get<std::string>());
            }
            if (!rec.contains("mandatory_actions") || !rec["mandatory_actions"].is_array() ||
                rec["mandatory_actions"].empty()) {
                throw Error(ErrorCode::ingest_error,
                            file.filename().string() + ": stage '" + stage.name +
                                "' needs at least one mandatory action");
            }
            for (auto& a : rec["mandatory_actions"]) {
                stage.mandatory_actions.push_back(
                    {a.at("id").get<std::string>(), a.value("description", "")});
            }
            auto& spec = kb->procedures_[type];
            spec.court_type = type;
            spec.stages.push_back(std::move(stage));
        }
    }

    if (kb->articles_.empty() && kb->charges_.empty() && kb->cases_.empty()) {
        throw Error(ErrorCode::ingest_error, "corpus is empty: " + root.string());
    }

    kb->build_indices();
    kb->validate_integrity();

    kb->counts_.articles = kb->articles_.size();
    kb->counts_.charges = kb->charges_.size();
    kb->counts_.cases = kb->cases_.size();
    kb->counts_.map_entries = kb->charge_law_map_.size();
    kb->counts_.templates = kb->templates_.size();
    kb->counts_.procedures = kb->procedures_.size();
    return kb;
}

void KnowledgeBase::build_indices() {
    for (std::size_t i = 0; i < articles_.size(); ++i) {
        const auto& a = articles_[i];
        if (!article_by_id_.emplace(a.article_id, i).second) {
            throw Error(ErrorCode::integrity_error, "duplicate article_id: " + a.article_id);
        }
        auto key = std::make_pair(text::normalize_law_name(a.law_name), a.article_number);
        if (!article_by_name_number_.emplace(key, i).second) {
            throw Error(ErrorCode::integrity_error,
                        "duplicate article: " + a.law_name + " " +
                            std::to_string(a.article_number));
        }
        article_index_.add_document(a.article_id, a.body);
        if (embedder_) article_vectors_[a.article_id] = embedder_->embed(a.body);
    }
    article_index_.finalize();

    for (std::size_t i = 0; i < charges_.size(); ++i) {
        const auto& c = charges_[i];
        if (!charge_by_id_.emplace(c.charge_id, i).second) {
            throw Error(ErrorCode::integrity_error, "duplicate charge_id: " + c.charge_id);
        }
        auto canon = text::normalize_law_name(c.name);
        if (!charge_by_alias_.emplace(canon, i).second) {
            throw Error(ErrorCode::integrity_error, "duplicate charge name: " + c.name);
        }
        for (auto& alias : c.aliases) {
            charge_by_alias_.emplace(text::normalize_law_name(alias), i);
        }
    }

    for (std::size_t i = 0; i < cases_.size(); ++i) {
        const auto& c = cases_[i];
        if (!case_by_id_.emplace(c.case_id, i).second) {
            throw Error(ErrorCode::integrity_error, "duplicate case_id: " + c.case_id);
        }
        case_index_.add_document(c.case_id, c.facts);
        if (embedder_) case_vectors_[c.case_id] = embedder_->embed(c.facts);
    }
    case_index_.finalize();
}

void KnowledgeBase::validate_integrity() const {
    for (auto& [charge_id, article_ids] : charge_law_map_) {
        if (!charge_by_id_.count(charge_id)) {
            throw Error(ErrorCode::integrity_error,
                        "charge_law_map: unknown charge '" + charge_id + "'");
        }
        for (auto& aid : article_ids) {
            if (!article_by_id_.count(aid)) {
                throw Error(ErrorCode::integrity_error,
                            "charge_law_map: charge '" + charge_id + "' -> article '" + aid +
                                "' does not resolve");
            }
        }
    }
    for (auto& c : cases_) {
        for (auto& aid : c.cited_article_ids) {
            if (!article_by_id_.count(aid)) {
                throw Error(ErrorCode::integrity_error,
                            "case '" + c.case_id + "' -> article '" + aid + "' does not resolve");
            }
        }
        for (auto& cid : c.charge_ids) {
            if (!charge_by_id_.count(cid)) {
                throw Error(ErrorCode::integrity_error,
                            "case '" + c.case_id + "' -> charge '" + cid + "' does not resolve");
            }
        }
        if (c.case_type == CaseType::criminal && c.charge_ids.empty()) {
            throw Error(ErrorCode::integrity_error,
                        "criminal case '" + c.case_id + "' has no charges");
        }
    }
}

std::vector<ScoredArticle> KnowledgeBase::search_articles(const std::string& query,
                                                          std::size_t topk) const {
    if (text::trim(query).empty()) {
        throw Error(ErrorCode::invalid_query, "empty query");
    }
    if (topk < 1) {
        throw Error(ErrorCode::invalid_argument, "topk must be >= 1");
    }
    std::vector<text::ScoredDoc> ranked;
    if (embedder_) {
        auto qvec = embedder_->embed(query);
        for (auto& [id, vec] : article_vectors_) {
            double s = vec_cosine(qvec, vec);
            if (s > 0.0) ranked.push_back({id, s});
        }
        std::stable_sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.id < b.id;
        });
        if (ranked.size() > topk) ranked.resize(topk);
    } else {
        ranked = article_index_.search(query, topk);
    }
    std::vector<ScoredArticle> out;
    for (auto& r : ranked) {
        out.push_back({&articles_[article_by_id_.at(r.id)], r.score});
    }
    return out;
}

double KnowledgeBase::article_pair_score(const LawArticle& a, const LawArticle& b) const {
    double s = embedder_ ? vec_cosine(article_vectors_.at(a.article_id),
                                      article_vectors_.at(b.article_id))
                         : article_index_.cosine(a.article_id, b.article_id);
    if (text::normalize_law_name(a.law_name) == text::normalize_law_name(b.law_name)) {
        s += 0.25;
        if (std::abs(a.article_number - b.article_number) == 1) s += 0.25;
    }
    return s;
}

std::vector<ScoredArticle> KnowledgeBase::similar_articles(const std::string& article_id,
                                                           std::size_t topk) const {
    auto it = article_by_id_.find(article_id);
    if (it == article_by_id_.end()) {
        throw Error(ErrorCode::not_found, "no such article: " + article_id);
    }
    const auto& base = articles_[it->second];
    std::vector<ScoredArticle> out;
    for (auto& [id, idx] : article_by_id_) {
        if (id == article_id) continue;
        const auto& other = articles_[idx];
        double s = article_pair_score(base, other);
        if (s > 0.0) out.push_back({&other, s});
    }
    std::stable_sort(out.begin(), out.end(), [](const ScoredArticle& a, const ScoredArticle& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.article->article_id < b.article->article_id;
    });
    if (topk > 0 && out.size() > topk) out.resize(topk);
    return out;
}

std::vector<std::pair<const Charge*, std::size_t>> KnowledgeBase::expand_charges(
    const std::vector<std::string>& charge_names, std::size_t topk) const {
    std::set<std::string> input_ids;
    std::set<std::string> input_articles;
    for (auto& name : charge_names) {
        const Charge* c = resolve_charge(name);
        if (!c) {
            throw Error(ErrorCode::not_found, "unknown charge: " + name);
        }
        input_ids.insert(c->charge_id);
        auto mapped = mapped_articles(c->charge_id);
        if (mapped) input_articles.insert(mapped->begin(), mapped->end());
    }
    std::vector<std::pair<const Charge*, std::size_t>> out;
    for (auto& [charge_id, idx] : charge_by_id_) {
        if (input_ids.count(charge_id)) continue;
        auto mapped = mapped_articles(charge_id);
        if (!mapped) continue;
        std::size_t overlap = 0;
        for (auto& aid : *mapped) overlap += input_articles.count(aid);
        if (overlap > 0) out.push_back({&charges_[idx], overlap});
    }
    std::stable_sort(out.begin(), out.end(), [](auto& a, auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first->charge_id < b.first->charge_id;
    });
    if (topk > 0 && out.size() > topk) out.resize(topk);
    return out;
}

std::vector<ScoredCase> KnowledgeBase::search_cases(CaseType type, const std::string& query,
                                                    std::size_t topk) const {
    if (text::trim(query).empty()) {
        throw Error(ErrorCode::invalid_query, "empty query");
    }
    std::vector<text::ScoredDoc> ranked;
    if (embedder_) {
        auto qvec = embedder_->embed(query);
        for (auto& [id, vec] : case_vectors_) {
            double s = vec_cosine(qvec, vec);
            if (s > 0.0) ranked.push_back({id, s});
        }
        std::stable_sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.id < b.id;
        });
    } else {
        ranked = case_index_.search(query, 0);
    }
    std::vector<ScoredCase> out;
    for (auto& r : ranked) {
        const auto& rec = cases_[case_by_id_.at(r.id)];
        if (rec.case_type != type) continue;
        out.push_back({&rec, r.score});
        if (topk > 0 && out.size() == topk) break;
    }
    return out;
}

const LawArticle* KnowledgeBase::try_lookup_article(const std::string& law_name,
                                                    int article_number) const {
    auto key = std::make_pair(text::normalize_law_name(law_name), article_number);
    auto it = article_by_name_number_.find(key);
    if (it == article_by_name_number_.end()) return nullptr;
    return &articles_[it->second];
}

const LawArticle& KnowledgeBase::lookup_article(const std::string& law_name,
                                                int article_number) const {
    const auto* a = try_lookup_article(law_name, article_number);
    if (!a) {
        throw Error(ErrorCode::not_found,
                    "no such provision: " + law_name + " art. " + std::to_string(article_number));
    }
    return *a;
}

const LawArticle* KnowledgeBase::find_article_by_id(const std::string& article_id) const {
    auto it = article_by_id_.find(article_id);
    if (it == article_by_id_.end()) return nullptr;
    return &articles_[it->second];
}

std::vector<const LawArticle*> KnowledgeBase::find_articles_by_number(int article_number) const {
    std::vector<const LawArticle*> out;
    for (auto& [id, idx] : article_by_id_) {
        if (articles_[idx].article_number == article_number) out.push_back(&articles_[idx]);
    }
    return out;
}

bool KnowledgeBase::law_exists(const std::string& law_name) const {
    auto norm = text::normalize_law_name(law_name);
    for (auto& a : articles_) {
        if (text::normalize_law_name(a.law_name) == norm) return true;
    }
    return false;
}

const Charge* KnowledgeBase::resolve_charge(const std::string& name_or_alias) const {
    auto it = charge_by_alias_.find(text::normalize_law_name(name_or_alias));
    if (it == charge_by_alias_.end()) {
        auto by_id = charge_by_id_.find(name_or_alias);
        if (by_id != charge_by_id_.end()) return &charges_[by_id->second];
        return nullptr;
    }
    return &charges_[it->second];
}

const Charge* KnowledgeBase::find_charge_by_id(const std::string& charge_id) const {
    auto it = charge_by_id_.find(charge_id);
    if (it == charge_by_id_.end()) return nullptr;
    return &charges_[it->second];
}

const std::vector<std::string>* KnowledgeBase::mapped_articles(const std::string& charge_id) const {
    auto it = charge_law_map_.find(charge_id);
    if (it == charge_law_map_.end()) return nullptr;
    return &it->second;
}

const DocumentTemplate& KnowledgeBase::get_template(TemplateType type) const {
    auto it = templates_.find(type);
    if (it == templates_.end()) {
        throw Error(ErrorCode::not_found, "no template for type: " + to_string(type));
    }
    return it->second;
}

const ProcedureSpec& KnowledgeBase::get_procedure(CourtType type) const {
    auto it = procedures_.find(type);
    if (it == procedures_.end()) {
        throw Error(ErrorCode::not_found, "no procedure for court type: " + to_string(type));
    }
    return it->second;
}

json KnowledgeBase::get_procedure_json(CourtType type, std::size_t stage) const {
    const auto& spec = get_procedure(type);
    if (stage > spec.stages.size()) {
        throw Error(ErrorCode::invalid_argument,
                    "stage out of range: " + std::to_string(stage) + " (have " +
                        std::to_string(spec.stages.size()) + ")");
    }
    if (stage == 0) return spec.to_json();
    return spec.stage_to_json(stage - 1);
}

}  // namespace juris::kb
