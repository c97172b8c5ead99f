// narrlens CLI: train / classify / explain / evaluate over one config file.

#include "narrlens/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace narrlens;

struct CommonArgs {
    std::string config_path;
    std::int64_t seed = -1;
    bool offline = false;
    std::string mock_script;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Pipeline config file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "Override the training/split seed");
    cmd->add_flag("--offline", args.offline,
                  "Force the deterministic embedder and the mock chat backend; refuse network");
    cmd->add_option("--mock-script", args.mock_script,
                    "Override the chat mock script path (implies a mock backend)");
}

PipelineConfig make_config(const CommonArgs& args) {
    PipelineConfig cfg = load_config(args.config_path);
    if (args.seed >= 0) {
        cfg.training.seed = static_cast<std::uint64_t>(args.seed);
    }
    if (!args.mock_script.empty()) {
        cfg.chat.mock_script = args.mock_script;
    }
    if (args.offline) {
        apply_offline(cfg);
    }
    return cfg;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) {
        std::cerr << "warning: " << w << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"narrlens: two-level narrative classification and evidence-grounded "
                 "justification for news articles"};
    app.require_subcommand(1);

    CommonArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "Train the per-domain classifiers");
    add_common(train_cmd, train_args);

    CommonArgs classify_args;
    std::string classify_articles;
    std::string classify_out;
    CLI::App* classify_cmd =
        app.add_subcommand("classify", "Predict narratives and sub-narratives for a directory");
    add_common(classify_cmd, classify_args);
    classify_cmd->add_option("--articles", classify_articles,
                             "Articles directory (default: paths.articles_dir)");
    classify_cmd->add_option("--out", classify_out,
                             "Predictions file (default: <output_dir>/predictions.tsv)");

    CommonArgs explain_args;
    std::string explain_input;
    std::string explain_out;
    CLI::App* explain_cmd =
        app.add_subcommand("explain", "Generate grounded justifications for dominant narratives");
    add_common(explain_cmd, explain_args);
    explain_cmd->add_option("--input", explain_input,
                            "Input file: <filename>\\t<dominant>[\\t<subs>] per line")
        ->required()
        ->check(CLI::ExistingFile);
    explain_cmd->add_option("--out", explain_out,
                            "Explanations file (default: <output_dir>/explanations.tsv)");

    CommonArgs evaluate_args;
    std::vector<std::string> evaluate_predictions;
    std::string evaluate_gold;
    std::string evaluate_explanations;
    std::string evaluate_references;
    std::string evaluate_format = "tsv";
    CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions and explanations");
    add_common(evaluate_cmd, evaluate_args);
    evaluate_cmd
        ->add_option("--predictions", evaluate_predictions,
                     "Prediction file(s); repeat as name=path to compare runs")
        ->required();
    evaluate_cmd->add_option("--gold", evaluate_gold, "Gold annotations file")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--explanations", evaluate_explanations,
                             "Generated explanations (<filename>\\t<text>)");
    evaluate_cmd->add_option("--references", evaluate_references,
                             "Reference explanations (<filename>\\t<text>)");
    evaluate_cmd->add_option("--format", evaluate_format, "Report format: tsv or json")
        ->check(CLI::IsMember({"tsv", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            PipelineConfig cfg = make_config(train_args);
            TrainOutcome outcome = run_train(cfg);
            print_warnings(outcome.warnings);
            for (const auto& f : outcome.model_files) {
                std::cout << "model written: " << f.string() << '\n';
            }
            std::cout << "summary written: " << outcome.summary_file.string() << '\n';
            return 0;
        }
        if (*classify_cmd) {
            PipelineConfig cfg = make_config(classify_args);
            std::filesystem::path articles =
                classify_articles.empty() ? cfg.paths.articles_dir
                                          : std::filesystem::path(classify_articles);
            std::filesystem::path out = classify_out.empty()
                                            ? cfg.paths.output_dir / "predictions.tsv"
                                            : std::filesystem::path(classify_out);
            ClassifyOutcome outcome = run_classify(cfg, articles, out);
            std::cout << "predictions written: " << outcome.predictions_file.string() << '\n';
            if (outcome.failures > 0) {
                std::cerr << outcome.failures << " article(s) failed; see "
                          << outcome.errors_file->string() << '\n';
                return 2;
            }
            return 0;
        }
        if (*explain_cmd) {
            PipelineConfig cfg = make_config(explain_args);
            std::filesystem::path out = explain_out.empty()
                                            ? cfg.paths.output_dir / "explanations.tsv"
                                            : std::filesystem::path(explain_out);
            ExplainOutcome outcome = run_explain(cfg, explain_input, out);
            std::cout << "explanations written: " << outcome.explanations_file.string() << '\n';
            if (outcome.failures > 0) {
                std::cerr << outcome.failures << " article(s) failed; see "
                          << outcome.errors_file->string() << '\n';
                return 2;
            }
            return 0;
        }
        if (*evaluate_cmd) {
            PipelineConfig cfg = make_config(evaluate_args);
            std::vector<std::pair<std::string, std::filesystem::path>> runs;
            for (const std::string& spec : evaluate_predictions) {
                std::size_t eq = spec.find('=');
                if (eq == std::string::npos) {
                    runs.emplace_back("run" + std::to_string(runs.size() + 1), spec);
                } else {
                    runs.emplace_back(spec.substr(0, eq), spec.substr(eq + 1));
                }
            }
            std::optional<std::filesystem::path> explanations;
            std::optional<std::filesystem::path> references;
            if (!evaluate_explanations.empty()) explanations = evaluate_explanations;
            if (!evaluate_references.empty()) references = evaluate_references;
            ReportFormat format =
                evaluate_format == "json" ? ReportFormat::Json : ReportFormat::Tsv;
            EvaluateOutcome outcome =
                run_evaluate(cfg, runs, evaluate_gold, explanations, references, format);

            std::cout << f1_report_to_tsv(outcome.f1);
            if (outcome.gen) {
                std::cout << '\n' << gen_score_to_tsv(*outcome.gen);
            }
            if (outcome.comparison) {
                std::cout << '\n' << comparison_to_table(*outcome.comparison);
            }
            for (const auto& f : outcome.files_written) {
                std::cout << "report written: " << f.string() << '\n';
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
