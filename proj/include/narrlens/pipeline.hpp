#pragma once
// End-to-end wiring: one declarative config, the four pipeline entry points
// (train / classify / explain / evaluate), and shared-task-compatible files.
//
// Articles are processed by a bounded worker pool but results are always
// written in input order. A scripted mock chat backend forces the pool down
// to one worker so the script consumption order stays deterministic.

#include "narrlens/classifier.hpp"
#include "narrlens/common.hpp"
#include "narrlens/corpus.hpp"
#include "narrlens/embedding.hpp"
#include "narrlens/evaluation.hpp"
#include "narrlens/llm.hpp"
#include "narrlens/retrieval.hpp"
#include "narrlens/taxonomy.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace narrlens {

struct PipelinePaths {
    std::filesystem::path taxonomy_cc;
    std::filesystem::path taxonomy_urw;
    std::filesystem::path articles_dir;
    std::filesystem::path annotations;
    std::filesystem::path models_dir;
    std::filesystem::path output_dir;
};

struct PipelineConfig {
    PipelinePaths paths;
    EmbedderConfig embedder;
    ChatBackendConfig chat;
    RetrievalConfig retrieval;
    TrainingConfig training;
    FocalLossParams loss;
    double split_ratio = 0.8;
    double threshold_beta = 2.0;
    ThresholdMode threshold_mode = ThresholdMode::PerLabel;
    Averaging averaging = Averaging::Samples;
    std::size_t parallelism = 1;
    Language default_language = Language::EN;
    std::size_t fallback_k = 3;
    bool offline = false;
};

// Reads the JSON config; relative paths resolve against the config file's
// directory. Unknown keys are rejected to catch typos.
PipelineConfig load_config(const std::filesystem::path& path);

// Forces the deterministic embedder and the scripted mock chat backend;
// errors when no mock script is configured (offline runs refuse the network).
void apply_offline(PipelineConfig& cfg);

enum class ReportFormat { Tsv, Json };

struct TrainOutcome {
    std::vector<std::filesystem::path> model_files;
    std::filesystem::path summary_file;
    std::vector<std::string> warnings;
};

// Trains one model per domain that has articles (skipping empty domains with
// a warning) and writes model files plus a training summary.
TrainOutcome run_train(const PipelineConfig& cfg);

struct ArticleTrace {
    std::string filename;
    std::vector<std::string> candidates;
    std::vector<std::string> refined;
    std::vector<std::string> subs;
    std::string error; // empty on success
};

struct ClassifyOutcome {
    std::filesystem::path predictions_file;
    std::optional<std::filesystem::path> errors_file;
    std::size_t failures = 0;
    std::vector<ArticleTrace> traces; // populated when keep_traces
};

// embed -> candidate labels -> narrative refinement -> sub-narrative
// assignment, one output line per article in input (sorted filename) order.
// Per-article failures land in an errors sidecar next to the output file.
ClassifyOutcome run_classify(const PipelineConfig& cfg,
                             const std::filesystem::path& articles_dir,
                             const std::filesystem::path& out_file,
                             bool keep_traces = false);

struct ExplainTrace {
    std::string filename;
    std::shared_ptr<SentenceIndex> index; // probe-able after the run
    std::size_t word_count = 0;
    std::string error;
};

struct ExplainOutcome {
    std::filesystem::path explanations_file;
    std::optional<std::filesystem::path> errors_file;
    std::size_t failures = 0;
    std::vector<ExplainTrace> traces;
};

// Input lines: <filename>\t<dominant narrative>[\t<subs ;-joined>]. Per
// article: index -> dual-pass retrieval -> ReACT prompt -> explanation ->
// index drop.
ExplainOutcome run_explain(const PipelineConfig& cfg,
                           const std::filesystem::path& input_file,
                           const std::filesystem::path& out_file,
                           bool keep_traces = false);

struct EvaluateOutcome {
    F1Report f1; // of the first run
    std::optional<GenScore> gen;
    std::optional<RunComparison> comparison; // when more than one run
    std::vector<std::filesystem::path> files_written;
};

// Emits the classification report and, when explanation/reference files are
// given, the per-language generation report, into output_dir.
EvaluateOutcome run_evaluate(
    const PipelineConfig& cfg,
    const std::vector<std::pair<std::string, std::filesystem::path>>& prediction_files,
    const std::filesystem::path& gold_file,
    const std::optional<std::filesystem::path>& explanations_file,
    const std::optional<std::filesystem::path>& references_file,
    ReportFormat format = ReportFormat::Tsv);

// Parses a <filename>\t<text> file (explanations or references).
std::vector<std::pair<std::string, std::string>> load_text_pairs(
    const std::filesystem::path& path);

} // namespace narrlens
