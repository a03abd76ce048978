#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "juris/controller.hpp"
#include "juris/kb.hpp"
#include "juris/model_client.hpp"
#include "juris/prompts.hpp"
#include "juris/scenarios.hpp"

namespace juris::metrics {

using json = nlohmann::json;

// FOR: |LCS(mandatory template order, detected mandatory headings in
// document order)| / number of mandatory sections.
double score_format_following(const std::string& document, const kb::DocumentTemplate& tpl);

struct StageScores {
    double sta = 0.0;  // complete stages / total stages
    double act = 0.0;  // completed mandatory actions / total mandatory actions
    double uni = 0.0;  // 1 iff all stages complete
    double pfs = 0.0;  // (STA + ACT + UNI) / 3
};
StageScores score_stage_completion(const scenarios::CompletionSnapshot& snapshot);

// Normalized log-distance: 1 when pred == gold == 0, 0 when gold == 0 and
// pred > 0, otherwise max(0, 1 - |ln(1+p) - ln(1+g)| / ln(1+g)).
// Negative inputs raise invalid_argument.
double log_distance_score(double pred, double gold);

struct VerdictScores {
    double sen = 0.0;
    double fine = 0.0;
    double ver = 0.0;  // (SEN + FINE) / 2
};
VerdictScores score_verdict_numbers(double pred_sentence, double gold_sentence, double pred_fine,
                                    double gold_fine);

// Set F1; both empty -> 1.0, exactly one empty -> 0.0.
double score_law_citations(const std::set<std::string>& pred, const std::set<std::string>& gold);

struct CriScore {
    int score = 0;
    std::string note;
};
// 1 iff the predicted primary charge (first listed) resolves into the gold
// set; alias resolution goes through the charge corpus when available.
CriScore score_charges(const std::vector<std::string>& pred, const std::set<std::string>& gold,
                       const kb::KnowledgeBase* base);

struct BinScore {
    int score = 0;
    std::string note;
};
// First affirmation/negation token of the answer under the declared
// lexicon, compared with the gold yes/no.
BinScore score_binary(const std::string& answer, const std::string& gold_yes_no);

enum class JudgeKind { DOC, JUD, REA, NBIN };
std::string to_string(JudgeKind k);

// Sends the rubric prompt to the judge client and parses the reply for a
// `SCORE: x/100` token; anything else raises parse_error.
double judge_score(JudgeKind kind, const std::string& submission, const std::string& gold,
                   model::ModelClient& judge, const prompts::PromptLibrary* prompts);

// Structured verdict block a judgment response may carry:
//   [VERDICT]
//   charges: theft
//   sentence_months: 12
//   fine: 5000
//   articles: Criminal Law#264, Criminal Law#269
//   [/VERDICT]
struct VerdictBlock {
    std::vector<std::string> charges;
    std::optional<double> sentence_months;
    std::optional<double> fine;
    std::set<std::string> articles;
};
std::optional<VerdictBlock> parse_verdict_block(const std::string& text);

// Last non-empty round response of a trace.
std::string final_response(const controller::Trace& trace);

struct GoldLabel {
    std::string episode_id;
    scenarios::Kind scenario = scenarios::Kind::KQ;
    std::optional<std::string> answer;          // KQ/LC binary gold
    std::optional<std::string> reference;       // KQ/LC open-ended gold
    std::optional<json> gold_sections;          // CD/DD
    std::optional<std::string> gold_judgment;   // CI
    std::set<std::string> gold_articles;        // CI/CR
    std::vector<std::string> gold_charges;      // CR
    std::optional<double> gold_sentence_months; // CR
    std::optional<double> gold_fine;            // CR
};

std::map<std::string, GoldLabel> load_gold_file(const std::filesystem::path& path);
GoldLabel gold_label_from_json(const json& j);

struct MetricReport {
    json per_trace = json::array();   // one row per trace
    json means = json::object();      // scenario -> metric -> mean
    json stage_matrix = json::object();  // scenario -> stage -> completion rate

    json to_json() const;
    std::string to_table() const;  // aligned-column text table
};

// Scores every trace against its gold label (keyed by episode_id) with the
// rule-based metrics and aggregates per-scenario means. Key mismatches
// raise key_mismatch; the judge-backed metrics are out of the default path.
MetricReport aggregate_report(const std::vector<controller::Trace>& traces,
                              const std::map<std::string, GoldLabel>& gold,
                              const kb::KnowledgeBase* base);

// Reads a CompletionSnapshot back from a trace's court dump.
std::optional<scenarios::CompletionSnapshot> snapshot_from_trace(const controller::Trace& trace);

}  // namespace juris::metrics
