#pragma once
// Classification F1 over predicted vs gold label sets (per level, per
// domain) and the greedy-matching word-embedding score for generated
// justifications, plus the multi-run comparison table.
//
// All functions are pure over in-memory data and safe to call from any
// thread.

#include "narrlens/common.hpp"
#include "narrlens/corpus.hpp"
#include "narrlens/embedding.hpp"

#include <map>
#include <string>
#include <vector>

namespace narrlens {

enum class Averaging { Samples, Micro, Macro };

struct PrfRow {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t count = 0; // articles contributing to the row
};

// Classification report: one row per (level, domain) pair plus overalls.
struct F1Report {
    PrfRow narrative_cc, narrative_urw, narrative_overall;
    PrfRow sub_cc, sub_urw, sub_overall;
    std::size_t article_count = 0;
};

// Generation report: one row per language plus an overall row.
struct GenScoreRow {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t count = 0; // text pairs
};

struct GenScore {
    std::map<Language, GenScoreRow> per_language;
    GenScoreRow overall;
};

// Sample-averaged P/R/F1 over aligned (pred, gold) label sets. Conventions:
// both sets empty scores 1.0 on all three; exactly one empty scores 0.0.
PrfRow f1_samples(const std::vector<std::vector<std::string>>& preds,
                  const std::vector<std::vector<std::string>>& golds);

// Same data under the selected averaging mode.
PrfRow f1_score(const std::vector<std::vector<std::string>>& preds,
                const std::vector<std::vector<std::string>>& golds, Averaging mode);

// Greedy token matching under the configured embedder: recall averages each
// reference word's best cosine against the candidate words, precision the
// reverse; f1 is their harmonic mean when both are positive, else 0.
GenScoreRow greedy_match_score(const std::string& candidate, const std::string& reference,
                               Embedder& embedder);

// Full classification report. Domain attribution uses the gold labels'
// "CC:"/"URW:" prefixes; articles of unknown domain count toward Overall only.
F1Report build_f1_report(const std::vector<GoldAnnotation>& preds,
                         const std::vector<GoldAnnotation>& golds, Averaging mode);

struct RunComparison {
    std::vector<std::string> metric_names; // six level x domain rows
    std::vector<std::string> run_names;
    std::vector<std::vector<double>> f1;   // [metric][run]
};

// One column of level x domain F1 per named run, all runs evaluated against
// the same gold set. Throws when a run's article ids do not match the gold's.
RunComparison compare_runs(
    const std::vector<std::pair<std::string, std::vector<GoldAnnotation>>>& runs,
    const std::vector<GoldAnnotation>& golds, Averaging mode);

std::string f1_report_to_tsv(const F1Report& report);
std::string f1_report_to_json(const F1Report& report);
std::string gen_score_to_tsv(const GenScore& score);
std::string gen_score_to_json(const GenScore& score);
std::string comparison_to_tsv(const RunComparison& cmp);
// Console-friendly aligned rendering of the comparison.
std::string comparison_to_table(const RunComparison& cmp);

} // namespace narrlens
