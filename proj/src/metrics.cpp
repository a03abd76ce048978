#include "juris/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

#include "juris/errors.hpp"
#include "juris/text.hpp"

namespace juris::metrics {

namespace {

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> dp(a.size() + 1,
                                             std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1
                                            : std::max(dp[i - 1][j], dp[i][j - 1]);
        }
    }
    return dp[a.size()][b.size()];
}

}  // namespace

double score_format_following(const std::string& document, const kb::DocumentTemplate& tpl) {
    auto mandatory = tpl.mandatory_sections();
    if (mandatory.empty()) {
        throw Error(ErrorCode::invalid_argument, "template has no mandatory sections");
    }
    auto detected = kb::detect_section_sequence(document, mandatory);
    return static_cast<double>(lcs_length(mandatory, detected)) /
           static_cast<double>(mandatory.size());
}

StageScores score_stage_completion(const scenarios::CompletionSnapshot& snapshot) {
    StageScores s;
    if (snapshot.stages.empty()) return s;
    std::size_t complete = 0;
    for (auto& st : snapshot.stages) {
        if (st.complete) ++complete;
    }
    s.sta = static_cast<double>(complete) / static_cast<double>(snapshot.stages.size());
    s.act = snapshot.total_mandatory == 0
                ? 0.0
                : static_cast<double>(snapshot.total_completed) /
                      static_cast<double>(snapshot.total_mandatory);
    s.uni = complete == snapshot.stages.size() ? 1.0 : 0.0;
    s.pfs = (s.sta + s.act + s.uni) / 3.0;
    return s;
}

double log_distance_score(double pred, double gold) {
    if (pred < 0.0 || gold < 0.0) {
        throw Error(ErrorCode::invalid_argument, "verdict numbers must be non-negative");
    }
    if (pred == gold) return 1.0;
    if (gold == 0.0) return 0.0;
    double deviation = std::abs(std::log1p(pred) - std::log1p(gold)) / std::log1p(gold);
    return std::max(0.0, 1.0 - deviation);
}

VerdictScores score_verdict_numbers(double pred_sentence, double gold_sentence, double pred_fine,
                                    double gold_fine) {
    VerdictScores v;
    v.sen = log_distance_score(pred_sentence, gold_sentence);
    v.fine = log_distance_score(pred_fine, gold_fine);
    v.ver = (v.sen + v.fine) / 2.0;
    return v;
}

double score_law_citations(const std::set<std::string>& pred, const std::set<std::string>& gold) {
    if (pred.empty() && gold.empty()) return 1.0;
    if (pred.empty() || gold.empty()) return 0.0;
    std::size_t tp = 0;
    for (auto& p : pred) tp += gold.count(p);
    if (tp == 0) return 0.0;
    // F1 = 2|P∩G| / (|P| + |G|)
    return 2.0 * static_cast<double>(tp) / static_cast<double>(pred.size() + gold.size());
}

CriScore score_charges(const std::vector<std::string>& pred, const std::set<std::string>& gold,
                       const kb::KnowledgeBase* base) {
    CriScore out;
    if (pred.empty()) {
        out.note = "no predicted charge";
        return out;
    }
    auto canonical = [&](const std::string& name) -> std::string {
        if (base) {
            if (const auto* c = base->resolve_charge(name)) return c->charge_id;
        }
        return text::normalize_loose(name);
    };
    auto primary = canonical(pred.front());
    if (base && !base->resolve_charge(pred.front())) {
        out.note = "unresolvable charge: " + pred.front();
        return out;
    }
    for (auto& g : gold) {
        if (canonical(g) == primary) {
            out.score = 1;
            return out;
        }
    }
    return out;
}

namespace {

// Declared affirmation/negation lexicon for binary answers.
const std::set<std::string>& yes_tokens() {
    static const std::set<std::string> kYes = {"yes", "yeah",  "yep", "affirmative",
                                               "correct", "true", "是", "是的", "可以", "能"};
    return kYes;
}

const std::set<std::string>& no_tokens() {
    static const std::set<std::string> kNo = {"no",    "nope",  "not",   "negative", "incorrect",
                                              "false", "cannot", "不", "不能", "不可", "否"};
    return kNo;
}

}  // namespace

BinScore score_binary(const std::string& answer, const std::string& gold_yes_no) {
    auto gold = text::normalize_law_name(gold_yes_no);
    if (gold != "yes" && gold != "no") {
        throw Error(ErrorCode::invalid_argument, "gold must be yes or no, got: " + gold_yes_no);
    }
    BinScore out;
    for (auto& tok : text::tokenize(answer)) {
        bool is_yes = yes_tokens().count(tok) > 0;
        bool is_no = no_tokens().count(tok) > 0;
        if (!is_yes && !is_no) continue;
        out.score = (is_no ? gold == "no" : gold == "yes") ? 1 : 0;
        return out;
    }
    out.score = 0;
    out.note = "no affirmation or negation token found in answer";
    return out;
}

std::string to_string(JudgeKind k) {
    switch (k) {
        case JudgeKind::DOC: return "DOC";
        case JudgeKind::JUD: return "JUD";
        case JudgeKind::REA: return "REA";
        case JudgeKind::NBIN: return "NBIN";
    }
    return "DOC";
}

double judge_score(JudgeKind kind, const std::string& submission, const std::string& gold,
                   model::ModelClient& judge, const prompts::PromptLibrary* prompts) {
    std::string prompt_name = "judge_" + to_string(kind);
    std::map<std::string, std::string> vars{{"submission", submission}, {"gold", gold}};
    std::string prompt =
        prompts && prompts->has(prompt_name)
            ? prompts->render(prompt_name, vars)
            : prompts::PromptLibrary::substitute(
                  "Score the submission against the reference on a 0-100 scale. Reply with a "
                  "line SCORE: x/100.\n\nReference:\n{gold}\n\nSubmission:\n{submission}",
                  vars);
    auto reply = judge.complete({{"system", prompt}});
    static const std::regex kScore(R"(SCORE:\s*([0-9]+(?:\.[0-9]+)?)\s*/\s*100)",
                                   std::regex::icase);
    std::smatch match;
    if (!std::regex_search(reply, match, kScore)) {
        throw Error(ErrorCode::parse_error,
                    "judge reply carries no SCORE: x/100 token: " + reply);
    }
    double score = std::stod(match[1].str()) / 100.0;
    return std::clamp(score, 0.0, 1.0);
}

std::optional<VerdictBlock> parse_verdict_block(const std::string& input) {
    auto open = input.find("[VERDICT]");
    if (open == std::string::npos) return std::nullopt;
    auto close = input.find("[/VERDICT]", open);
    if (close == std::string::npos) return std::nullopt;
    auto body = input.substr(open + 9, close - open - 9);

    VerdictBlock block;
    std::istringstream in(body);
    std::string line;
    auto split_list = [](const std::string& s) {
        std::vector<std::string> items;
        std::string current;
        for (char c : s) {
            if (c == ',' || c == ';') {
                auto t = text::trim(current);
                if (!t.empty()) items.push_back(t);
                current.clear();
            } else {
                current.push_back(c);
            }
        }
        auto t = text::trim(current);
        if (!t.empty()) items.push_back(t);
        return items;
    };
    while (std::getline(in, line)) {
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        auto key = text::normalize_law_name(line.substr(0, colon));
        auto value = text::trim(line.substr(colon + 1));
        if (key == "charges" || key == "charge") {
            block.charges = split_list(value);
        } else if (key == "sentence_months" || key == "sentence") {
            try {
                block.sentence_months = std::stod(value);
            } catch (...) {
            }
        } else if (key == "fine") {
            try {
                block.fine = std::stod(value);
            } catch (...) {
            }
        } else if (key == "articles" || key == "article") {
            for (auto& a : split_list(value)) block.articles.insert(a);
        }
    }
    return block;
}

std::string final_response(const controller::Trace& trace) {
    for (auto it = trace.rounds.rbegin(); it != trace.rounds.rend(); ++it) {
        if (!text::trim(it->response).empty()) return it->response;
    }
    return "";
}

GoldLabel gold_label_from_json(const json& j) {
    GoldLabel g;
    g.episode_id = j.value("episode_id", "");
    g.scenario = scenarios::kind_from_string(j.value("scenario", "KQ"));
    if (j.contains("answer")) g.answer = j["answer"].get<std::string>();
    if (j.contains("reference")) g.reference = j["reference"].get<std::string>();
    if (j.contains("gold_sections")) g.gold_sections = j["gold_sections"];
    if (j.contains("gold_judgment")) g.gold_judgment = j["gold_judgment"].get<std::string>();
    if (j.contains("gold_articles")) {
        for (auto& a : j["gold_articles"]) g.gold_articles.insert(a.get<std::string>());
    }
    if (j.contains("gold_charges")) {
        for (auto& c : j["gold_charges"]) g.gold_charges.push_back(c.get<std::string>());
    }
    if (j.contains("gold_sentence_months")) {
        g.gold_sentence_months = j["gold_sentence_months"].get<double>();
        if (*g.gold_sentence_months < 0) {
            throw Error(ErrorCode::invalid_argument, "gold_sentence_months must be >= 0");
        }
    }
    if (j.contains("gold_fine")) {
        g.gold_fine = j["gold_fine"].get<double>();
        if (*g.gold_fine < 0) {
            throw Error(ErrorCode::invalid_argument, "gold_fine must be >= 0");
        }
    }
    return g;
}

std::map<std::string, GoldLabel> load_gold_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open gold file: " + path.string());
    std::map<std::string, GoldLabel> out;
    std::string line;
    while (std::getline(in, line)) {
        auto trimmed = text::trim(line);
        if (trimmed.empty()) continue;
        json j = json::parse(trimmed, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw Error(ErrorCode::parse_error, "malformed gold record: " + trimmed);
        }
        auto g = gold_label_from_json(j);
        if (g.episode_id.empty()) {
            throw Error(ErrorCode::parse_error, "gold record missing episode_id");
        }
        out[g.episode_id] = std::move(g);
    }
    return out;
}

std::optional<scenarios::CompletionSnapshot> snapshot_from_trace(const controller::Trace& trace) {
    if (!trace.court || !trace.court->contains("snapshot")) return std::nullopt;
    const auto& snap = (*trace.court)["snapshot"];
    scenarios::CompletionSnapshot out;
    out.total_mandatory = snap.value("total_mandatory", 0u);
    out.total_completed = snap.value("total_completed", 0u);
    if (snap.contains("stages")) {
        for (auto& s : snap["stages"]) {
            scenarios::StageCompletion sc;
            sc.stage_name = s.value("stage", "");
            sc.mandatory = s.value("mandatory", 0u);
            sc.completed = s.value("completed", 0u);
            sc.complete = s.value("complete", false);
            out.stages.push_back(std::move(sc));
        }
    }
    return out;
}

json MetricReport::to_json() const {
    return json{{"per_trace", per_trace}, {"means", means}, {"stage_matrix", stage_matrix}};
}

std::string MetricReport::to_table() const {
    // Collect the union of metric names per scenario row.
    std::vector<std::string> scenario_order;
    std::set<std::string> metric_names;
    for (auto& [scenario, metrics] : means.items()) {
        scenario_order.push_back(scenario);
        for (auto& [name, value] : metrics.items()) metric_names.insert(name);
    }
    std::vector<std::string> columns(metric_names.begin(), metric_names.end());

    std::ostringstream out;
    out << std::left << std::setw(10) << "scenario";
    for (auto& c : columns) out << std::right << std::setw(9) << c;
    out << "\n";
    for (auto& scenario : scenario_order) {
        out << std::left << std::setw(10) << scenario;
        for (auto& c : columns) {
            if (means[scenario].contains(c)) {
                out << std::right << std::setw(9) << std::fixed << std::setprecision(3)
                    << means[scenario][c].get<double>();
            } else {
                out << std::right << std::setw(9) << "-";
            }
        }
        out << "\n";
    }
    return out.str();
}

namespace {

void check_unit_interval(double v, const std::string& name) {
    if (v < 0.0 || v > 1.0) {
        throw Error(ErrorCode::invalid_state, "metric out of [0,1]: " + name);
    }
}

}  // namespace

MetricReport aggregate_report(const std::vector<controller::Trace>& traces,
                              const std::map<std::string, GoldLabel>& gold,
                              const kb::KnowledgeBase* base) {
    if (traces.empty()) {
        throw Error(ErrorCode::invalid_argument, "no traces to score");
    }
    MetricReport report;
    std::map<std::string, std::map<std::string, std::vector<double>>> samples;
    std::map<std::string, std::map<std::string, std::vector<double>>> stage_samples;

    for (auto& trace : traces) {
        auto it = gold.find(trace.episode_id);
        if (it == gold.end()) {
            throw Error(ErrorCode::key_mismatch,
                        "no gold label for episode '" + trace.episode_id + "'");
        }
        const auto& label = it->second;
        auto kind = scenarios::kind_from_string(trace.scenario);
        if (kind != label.scenario) {
            throw Error(ErrorCode::key_mismatch,
                        "scenario mismatch for episode '" + trace.episode_id + "'");
        }

        json row{{"episode_id", trace.episode_id}, {"scenario", trace.scenario}};
        json notes = json::array();
        auto response = final_response(trace);
        auto add = [&](const std::string& name, double value) {
            check_unit_interval(value, name);
            row[name] = value;
            samples[trace.scenario][name].push_back(value);
        };

        switch (kind) {
            case scenarios::Kind::KQ:
            case scenarios::Kind::LC: {
                if (label.answer) {
                    auto bin = score_binary(response, *label.answer);
                    add("BIN", bin.score);
                    if (!bin.note.empty()) notes.push_back(bin.note);
                }
                break;
            }
            case scenarios::Kind::CD:
            case scenarios::Kind::DD: {
                if (base) {
                    auto type = kind == scenarios::Kind::CD ? kb::TemplateType::complaint
                                                            : kb::TemplateType::defence;
                    add("FOR", score_format_following(response, base->get_template(type)));
                }
                break;
            }
            case scenarios::Kind::CI:
            case scenarios::Kind::CR: {
                auto snapshot = snapshot_from_trace(trace);
                if (snapshot) {
                    auto stages = score_stage_completion(*snapshot);
                    add("STA", stages.sta);
                    add("ACT", stages.act);
                    add("UNI", stages.uni);
                    add("PFS", stages.pfs);
                    for (auto& st : snapshot->stages) {
                        stage_samples[trace.scenario][st.stage_name].push_back(
                            st.complete ? 1.0 : 0.0);
                    }
                }
                auto verdict = parse_verdict_block(response);
                if (!label.gold_articles.empty() || verdict) {
                    std::set<std::string> pred_articles;
                    if (verdict) pred_articles = verdict->articles;
                    add("LAW", score_law_citations(pred_articles, label.gold_articles));
                }
                if (kind == scenarios::Kind::CR) {
                    if (!label.gold_charges.empty()) {
                        std::set<std::string> gold_set(label.gold_charges.begin(),
                                                       label.gold_charges.end());
                        auto cri = score_charges(verdict ? verdict->charges
                                                         : std::vector<std::string>{},
                                                 gold_set, base);
                        add("CRI", cri.score);
                        if (!cri.note.empty()) notes.push_back(cri.note);
                    }
                    if (label.gold_sentence_months && label.gold_fine) {
                        double ps = verdict && verdict->sentence_months
                                        ? *verdict->sentence_months
                                        : 0.0;
                        double pf = verdict && verdict->fine ? *verdict->fine : 0.0;
                        auto v = score_verdict_numbers(ps, *label.gold_sentence_months, pf,
                                                       *label.gold_fine);
                        add("SEN", v.sen);
                        add("FINE", v.fine);
                        add("VER", v.ver);
                    }
                }
                break;
            }
        }
        if (!notes.empty()) row["notes"] = notes;
        report.per_trace.push_back(std::move(row));
    }

    for (auto& [scenario, metrics] : samples) {
        for (auto& [name, values] : metrics) {
            double sum = 0.0;
            for (auto v : values) sum += v;
            report.means[scenario][name] = sum / static_cast<double>(values.size());
        }
    }
    for (auto& [scenario, stages] : stage_samples) {
        for (auto& [stage, values] : stages) {
            double sum = 0.0;
            for (auto v : values) sum += v;
            report.stage_matrix[scenario][stage] = sum / static_cast<double>(values.size());
        }
    }
    return report;
}

}  // namespace juris::metrics
