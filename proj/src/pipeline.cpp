#include "narrlens/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace narrlens {

using nlohmann::json;

namespace {

const char* kOtherLabel = "Other";

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw Error("config: unknown key '" + it.key() + "' in " + where);
        }
    }
}

// Runs fn(0..n-1) on at most `workers` threads. fn must handle its own
// exceptions (results and errors go into caller-owned slots by index).
void parallel_for_ordered(std::size_t n, std::size_t workers,
                          const std::function<void(std::size_t)>& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (std::thread& t : pool) t.join();
}

std::string sanitize_single_line(const std::string& text) {
    std::string out = text;
    for (char& c : out) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return trim(out);
}

std::string labels_field(const std::vector<std::string>& labels) {
    return labels.empty() ? std::string(kOtherLabel) : join(labels, ";");
}

Domain domain_from_filename(const std::string& stem) {
    for (const std::string& token : split(stem, '_')) {
        if (token == "CC") return Domain::CC;
        if (token == "URW") return Domain::URW;
    }
    return Domain::Unknown;
}

Domain domain_from_label(const std::string& label) {
    if (label.rfind("CC:", 0) == 0) return Domain::CC;
    if (label.rfind("URW:", 0) == 0) return Domain::URW;
    return Domain::Unknown;
}

// Candidate labels with their scores, mirroring candidate_labels().
std::vector<std::pair<std::string, double>> scored_candidates(const ClassifierModel& model,
                                                              const EmbeddingVector& vec,
                                                              std::size_t fallback_k) {
    std::vector<double> scores = predict_scores(model, vec);
    std::vector<std::size_t> order(scores.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t j : order) {
        if (scores[j] >= model.thresholds.values[j]) out.emplace_back(model.vocab[j], scores[j]);
    }
    if (out.empty()) {
        std::size_t k = std::min(fallback_k, order.size());
        for (std::size_t p = 0; p < k; ++p) {
            out.emplace_back(model.vocab[order[p]], scores[order[p]]);
        }
    }
    return out;
}

} // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw Error("config " + path.string() + " is not valid JSON: " + e.what());
    }
    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");
    PipelineConfig cfg;
    try {
        reject_unknown_keys(j, {"paths", "embedder", "chat", "retrieval", "training",
                                "threshold", "split_ratio", "evaluation", "parallelism",
                                "default_language", "fallback_k"},
                            "top level");
        if (j.contains("paths")) {
            const json& p = j["paths"];
            reject_unknown_keys(p, {"taxonomy_cc", "taxonomy_urw", "articles_dir",
                                    "annotations", "models_dir", "output_dir"},
                                "paths");
            if (p.contains("taxonomy_cc"))
                cfg.paths.taxonomy_cc = resolve(base, p["taxonomy_cc"].get<std::string>());
            if (p.contains("taxonomy_urw"))
                cfg.paths.taxonomy_urw = resolve(base, p["taxonomy_urw"].get<std::string>());
            if (p.contains("articles_dir"))
                cfg.paths.articles_dir = resolve(base, p["articles_dir"].get<std::string>());
            if (p.contains("annotations"))
                cfg.paths.annotations = resolve(base, p["annotations"].get<std::string>());
            if (p.contains("models_dir"))
                cfg.paths.models_dir = resolve(base, p["models_dir"].get<std::string>());
            if (p.contains("output_dir"))
                cfg.paths.output_dir = resolve(base, p["output_dir"].get<std::string>());
        }
        if (j.contains("embedder")) {
            const json& e = j["embedder"];
            reject_unknown_keys(e, {"backend", "endpoint", "model_name", "dim", "max_batch",
                                    "max_parallel", "timeout_ms", "retries"},
                                "embedder");
            if (e.contains("backend")) {
                std::string b = e["backend"].get<std::string>();
                if (b == "deterministic") cfg.embedder.backend = EmbedderBackend::Deterministic;
                else if (b == "remote") cfg.embedder.backend = EmbedderBackend::Remote;
                else throw Error("config: unknown embedder backend '" + b + "'");
            }
            if (e.contains("endpoint")) cfg.embedder.endpoint = e["endpoint"].get<std::string>();
            if (e.contains("model_name")) cfg.embedder.model_name = e["model_name"].get<std::string>();
            if (e.contains("dim")) cfg.embedder.dim = e["dim"].get<std::size_t>();
            if (e.contains("max_batch")) cfg.embedder.max_batch = e["max_batch"].get<std::size_t>();
            if (e.contains("max_parallel"))
                cfg.embedder.max_parallel = e["max_parallel"].get<std::size_t>();
            if (e.contains("timeout_ms")) cfg.embedder.timeout_ms = e["timeout_ms"].get<int>();
            if (e.contains("retries")) cfg.embedder.retries = e["retries"].get<int>();
        }
        if (j.contains("chat")) {
            const json& c = j["chat"];
            reject_unknown_keys(c, {"endpoint", "model_name", "temperature", "max_output_tokens",
                                    "timeout_ms", "retries", "mock_script"},
                                "chat");
            if (c.contains("endpoint")) cfg.chat.endpoint = c["endpoint"].get<std::string>();
            if (c.contains("model_name")) cfg.chat.model_name = c["model_name"].get<std::string>();
            if (c.contains("temperature")) cfg.chat.temperature = c["temperature"].get<double>();
            if (c.contains("max_output_tokens"))
                cfg.chat.max_output_tokens = c["max_output_tokens"].get<std::size_t>();
            if (c.contains("timeout_ms")) cfg.chat.timeout_ms = c["timeout_ms"].get<int>();
            if (c.contains("retries")) cfg.chat.retries = c["retries"].get<int>();
            if (c.contains("mock_script"))
                cfg.chat.mock_script = resolve(base, c["mock_script"].get<std::string>()).string();
        }
        if (j.contains("retrieval")) {
            const json& r = j["retrieval"];
            reject_unknown_keys(r, {"top_k", "query_composition", "tau_inclusive"}, "retrieval");
            if (r.contains("top_k")) cfg.retrieval.top_k = r["top_k"].get<std::size_t>();
            if (r.contains("query_composition")) {
                std::string q = r["query_composition"].get<std::string>();
                if (q == "label_only") {
                    cfg.retrieval.query_composition = RetrievalConfig::QueryComposition::LabelOnly;
                } else if (q == "label_plus_definition") {
                    cfg.retrieval.query_composition =
                        RetrievalConfig::QueryComposition::LabelPlusDefinition;
                } else {
                    throw Error("config: unknown query_composition '" + q + "'");
                }
            }
            if (r.contains("tau_inclusive")) cfg.retrieval.tau_inclusive = r["tau_inclusive"].get<bool>();
        }
        if (j.contains("training")) {
            const json& t = j["training"];
            reject_unknown_keys(t, {"epochs", "batch_size", "learning_rate", "adam_epsilon",
                                    "weight_decay", "warmup_fraction", "seed", "gamma", "alpha"},
                                "training");
            if (t.contains("epochs")) cfg.training.epochs = t["epochs"].get<std::size_t>();
            if (t.contains("batch_size")) cfg.training.batch_size = t["batch_size"].get<std::size_t>();
            if (t.contains("learning_rate")) cfg.training.learning_rate = t["learning_rate"].get<double>();
            if (t.contains("adam_epsilon")) cfg.training.adam_epsilon = t["adam_epsilon"].get<double>();
            if (t.contains("weight_decay")) cfg.training.weight_decay = t["weight_decay"].get<double>();
            if (t.contains("warmup_fraction"))
                cfg.training.warmup_fraction = t["warmup_fraction"].get<double>();
            if (t.contains("seed")) cfg.training.seed = t["seed"].get<std::uint64_t>();
            if (t.contains("gamma")) cfg.loss.gamma = t["gamma"].get<double>();
            if (t.contains("alpha")) cfg.loss.alpha = t["alpha"].get<double>();
        }
        if (j.contains("threshold")) {
            const json& t = j["threshold"];
            reject_unknown_keys(t, {"beta", "mode"}, "threshold");
            if (t.contains("beta")) cfg.threshold_beta = t["beta"].get<double>();
            if (t.contains("mode")) {
                std::string m = t["mode"].get<std::string>();
                if (m == "per_label") cfg.threshold_mode = ThresholdMode::PerLabel;
                else if (m == "global") cfg.threshold_mode = ThresholdMode::Global;
                else throw Error("config: unknown threshold mode '" + m + "'");
            }
        }
        if (j.contains("split_ratio")) cfg.split_ratio = j["split_ratio"].get<double>();
        if (j.contains("evaluation")) {
            const json& e = j["evaluation"];
            reject_unknown_keys(e, {"averaging"}, "evaluation");
            if (e.contains("averaging")) {
                std::string a = e["averaging"].get<std::string>();
                if (a == "samples") cfg.averaging = Averaging::Samples;
                else if (a == "micro") cfg.averaging = Averaging::Micro;
                else if (a == "macro") cfg.averaging = Averaging::Macro;
                else throw Error("config: unknown averaging '" + a + "'");
            }
        }
        if (j.contains("parallelism")) cfg.parallelism = j["parallelism"].get<std::size_t>();
        if (j.contains("default_language"))
            cfg.default_language = parse_language(j["default_language"].get<std::string>());
        if (j.contains("fallback_k")) cfg.fallback_k = j["fallback_k"].get<std::size_t>();
    } catch (const json::exception& e) {
        throw Error("config " + path.string() + ": " + e.what());
    }
    if (cfg.parallelism < 1) {
        throw Error("config: parallelism must be >= 1");
    }
    return cfg;
}

void apply_offline(PipelineConfig& cfg) {
    cfg.offline = true;
    cfg.embedder.backend = EmbedderBackend::Deterministic;
    if (cfg.chat.mock_script.empty()) {
        throw Error("offline mode needs chat.mock_script (network use is refused)");
    }
    cfg.chat.endpoint.clear();
}

TrainOutcome run_train(const PipelineConfig& cfg) {
    Taxonomy tax_cc = load_taxonomy(cfg.paths.taxonomy_cc, Domain::CC);
    Taxonomy tax_urw = load_taxonomy(cfg.paths.taxonomy_urw, Domain::URW);
    Dataset corpus = load_corpus(cfg.paths.articles_dir, cfg.paths.annotations, tax_cc, tax_urw,
                                 cfg.default_language);
    std::unique_ptr<Embedder> embedder = make_embedder(cfg.embedder);

    TrainOutcome outcome;
    outcome.warnings = corpus.warnings;

    json summary;
    summary["models"] = json::array();

    for (Domain domain : {Domain::CC, Domain::URW}) {
        const Taxonomy& taxonomy = domain == Domain::CC ? tax_cc : tax_urw;
        Dataset domain_set = corpus.by_domain(domain);
        if (domain_set.empty()) {
            outcome.warnings.push_back("skipping domain " + to_string(domain) +
                                       ": no articles in corpus");
            continue;
        }
        SplitResult parts = split(domain_set, cfg.split_ratio, cfg.training.seed);
        for (const std::string& w : parts.warnings) {
            outcome.warnings.push_back("domain " + to_string(domain) + ": " + w);
        }
        TrainReport report;
        ClassifierModel model;
        try {
            model = train(parts.train, parts.validation, *embedder, cfg.training, cfg.loss,
                          domain, taxonomy.main_ids(), cfg.threshold_beta, cfg.threshold_mode,
                          &report);
        } catch (const std::exception& e) {
            throw Error("training domain " + to_string(domain) + ": " + e.what());
        }

        std::string filename = domain == Domain::CC ? "model_cc.json" : "model_urw.json";
        std::filesystem::path model_path = cfg.paths.models_dir / filename;
        save_model(model, model_path);
        outcome.model_files.push_back(model_path);

        // validation fit with the tuned thresholds
        double val_f1 = 0.0;
        if (!parts.validation.empty()) {
            std::vector<std::vector<std::string>> preds, golds;
            for (std::size_t i = 0; i < parts.validation.size(); ++i) {
                EmbeddingVector v = embedder->embed_one(parts.validation.articles[i].text);
                std::vector<double> scores = predict_scores(model, v);
                std::vector<std::string> pred;
                for (std::size_t jx = 0; jx < scores.size(); ++jx) {
                    if (scores[jx] >= model.thresholds.values[jx]) pred.push_back(model.vocab[jx]);
                }
                preds.push_back(std::move(pred));
                golds.push_back(parts.validation.golds[i].narratives);
            }
            val_f1 = f1_samples(preds, golds).f1;
        }

        json m;
        m["domain"] = to_string(domain);
        m["file"] = filename;
        m["train_articles"] = parts.train.size();
        m["validation_articles"] = parts.validation.size();
        m["epoch_loss"] = report.epoch_loss;
        json thresholds = json::object();
        json achieved = json::object();
        for (std::size_t jx = 0; jx < model.vocab.size(); ++jx) {
            thresholds[model.vocab[jx]] = model.thresholds.values[jx];
            achieved[model.vocab[jx]] = model.thresholds.achieved_fbeta[jx];
        }
        m["thresholds"] = thresholds;
        m["achieved_fbeta"] = achieved;
        m["validation_f1"] = val_f1;
        summary["models"].push_back(m);
    }
    if (outcome.model_files.empty()) {
        throw Error("run_train: no domain had any articles");
    }
    summary["warnings"] = outcome.warnings;
    outcome.summary_file = cfg.paths.models_dir / "training_summary.json";
    write_text_file(outcome.summary_file, summary.dump(2) + "\n");
    return outcome;
}

namespace {

struct LoadedModels {
    std::optional<ClassifierModel> cc;
    std::optional<ClassifierModel> urw;
};

LoadedModels load_models(const PipelineConfig& cfg) {
    LoadedModels models;
    std::filesystem::path cc_path = cfg.paths.models_dir / "model_cc.json";
    std::filesystem::path urw_path = cfg.paths.models_dir / "model_urw.json";
    if (std::filesystem::exists(cc_path)) models.cc = load_model(cc_path);
    if (std::filesystem::exists(urw_path)) models.urw = load_model(urw_path);
    if (!models.cc && !models.urw) {
        throw Error("no trained models in " + cfg.paths.models_dir.string() +
                    " (expected model_cc.json and/or model_urw.json)");
    }
    return models;
}

std::vector<std::string> union_candidates(const LoadedModels& models, const EmbeddingVector& vec,
                                          std::size_t fallback_k) {
    std::vector<std::pair<std::string, double>> pool;
    if (models.cc) {
        auto c = scored_candidates(*models.cc, vec, fallback_k);
        pool.insert(pool.end(), c.begin(), c.end());
    }
    if (models.urw) {
        auto c = scored_candidates(*models.urw, vec, fallback_k);
        pool.insert(pool.end(), c.begin(), c.end());
    }
    std::sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (auto& [label, score] : pool) {
        if (seen.insert(label).second) out.push_back(label);
    }
    return out;
}

} // namespace

ClassifyOutcome run_classify(const PipelineConfig& cfg,
                             const std::filesystem::path& articles_dir,
                             const std::filesystem::path& out_file, bool keep_traces) {
    if (!std::filesystem::is_directory(articles_dir)) {
        throw Error("articles directory not found: " + articles_dir.string());
    }
    Taxonomy tax_cc = load_taxonomy(cfg.paths.taxonomy_cc, Domain::CC);
    Taxonomy tax_urw = load_taxonomy(cfg.paths.taxonomy_urw, Domain::URW);
    Taxonomy merged = merge_taxonomies(tax_cc, tax_urw);
    LoadedModels models = load_models(cfg);
    std::unique_ptr<Embedder> embedder = make_embedder(cfg.embedder);
    std::unique_ptr<ChatBackend> chat = make_chat_backend(cfg.chat);

    std::vector<std::string> filenames;
    for (const auto& entry : std::filesystem::directory_iterator(articles_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            filenames.push_back(entry.path().filename().string());
        }
    }
    std::sort(filenames.begin(), filenames.end());
    if (filenames.empty()) {
        throw Error("no .txt articles in " + articles_dir.string());
    }

    std::vector<ArticleTrace> traces(filenames.size());
    // an ordered mock script requires strictly sequential consumption
    std::size_t workers = cfg.chat.is_mock() ? 1 : cfg.parallelism;

    parallel_for_ordered(filenames.size(), workers, [&](std::size_t i) {
        ArticleTrace& trace = traces[i];
        trace.filename = filenames[i];
        try {
            std::filesystem::path file = articles_dir / filenames[i];
            Article article;
            article.filename = filenames[i];
            article.id = file.stem().string();
            article.text = read_text_file(file);
            if (trim(article.text).empty()) {
                throw Error("article is empty");
            }
            article.language = language_from_id(article.id, cfg.default_language);
            article.domain = domain_from_filename(article.id);

            EmbeddingVector vec = embedder->embed_one(article.text);

            const Taxonomy* taxonomy = &merged;
            if (article.domain == Domain::CC) {
                if (!models.cc) throw Error("no CC model available");
                trace.candidates = candidate_labels(*models.cc, vec, cfg.fallback_k);
                taxonomy = &tax_cc;
            } else if (article.domain == Domain::URW) {
                if (!models.urw) throw Error("no URW model available");
                trace.candidates = candidate_labels(*models.urw, vec, cfg.fallback_k);
                taxonomy = &tax_urw;
            } else {
                trace.candidates = union_candidates(models, vec, cfg.fallback_k);
            }

            PromptBundle stage1 = build_stage1_prompt(article, trace.candidates, *taxonomy);
            trace.refined = refine_narratives(*chat, stage1, trace.candidates);
            RefinementResult refined = assign_subnarratives(*chat, article, trace.refined, *taxonomy);
            trace.refined = refined.narratives;
            trace.subs = refined.sub_narratives;
        } catch (const std::exception& e) {
            trace.error = e.what();
        }
    });

    std::ostringstream predictions;
    std::ostringstream errors;
    std::size_t failures = 0;
    for (const ArticleTrace& trace : traces) {
        if (!trace.error.empty()) {
            ++failures;
            errors << trace.filename << '\t' << sanitize_single_line(trace.error) << '\n';
            continue;
        }
        predictions << trace.filename << '\t' << labels_field(trace.refined) << '\t'
                    << labels_field(trace.subs) << '\n';
    }

    ClassifyOutcome outcome;
    outcome.predictions_file = out_file;
    write_text_file(out_file, predictions.str());
    std::filesystem::path sidecar = out_file;
    sidecar += ".errors.tsv";
    std::filesystem::remove(sidecar);
    if (failures > 0) {
        write_text_file(sidecar, errors.str());
        outcome.errors_file = sidecar;
    }
    outcome.failures = failures;
    if (keep_traces) outcome.traces = std::move(traces);
    return outcome;
}

ExplainOutcome run_explain(const PipelineConfig& cfg, const std::filesystem::path& input_file,
                           const std::filesystem::path& out_file, bool keep_traces) {
    Taxonomy tax_cc = load_taxonomy(cfg.paths.taxonomy_cc, Domain::CC);
    Taxonomy tax_urw = load_taxonomy(cfg.paths.taxonomy_urw, Domain::URW);
    Taxonomy merged = merge_taxonomies(tax_cc, tax_urw);
    std::unique_ptr<Embedder> embedder = make_embedder(cfg.embedder);
    std::unique_ptr<ChatBackend> chat = make_chat_backend(cfg.chat);

    struct Request {
        std::string filename;
        std::string dominant;
        std::vector<std::string> subs;
    };
    std::vector<Request> requests;
    {
        std::vector<std::string> lines = read_lines(input_file);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (trim(lines[i]).empty()) continue;
            std::vector<std::string> fields = split(lines[i], '\t');
            if (fields.size() != 2 && fields.size() != 3) {
                throw Error("explain input line " + std::to_string(i + 1) +
                            ": expected 2 or 3 tab-separated fields");
            }
            Request r;
            r.filename = trim(fields[0]);
            r.dominant = trim(fields[1]);
            if (r.filename.empty() || r.dominant.empty()) {
                throw Error("explain input line " + std::to_string(i + 1) +
                            ": empty filename or narrative");
            }
            if (fields.size() == 3) {
                for (const std::string& raw : split(fields[2], ';')) {
                    std::string s = trim(raw);
                    if (!s.empty()) r.subs.push_back(s);
                }
            }
            requests.push_back(std::move(r));
        }
    }
    if (requests.empty()) {
        throw Error("explain input " + input_file.string() + " has no entries");
    }

    struct Result {
        std::string line;
        std::string error;
    };
    std::vector<Result> results(requests.size());
    std::vector<ExplainTrace> traces(requests.size());
    std::size_t workers = cfg.chat.is_mock() ? 1 : cfg.parallelism;

    parallel_for_ordered(requests.size(), workers, [&](std::size_t i) {
        const Request& req = requests[i];
        traces[i].filename = req.filename;
        try {
            std::filesystem::path file = cfg.paths.articles_dir / req.filename;
            Article article;
            article.filename = req.filename;
            article.id = file.stem().string();
            article.text = read_text_file(file);
            if (trim(article.text).empty()) {
                throw Error("article is empty");
            }
            article.language = language_from_id(article.id, cfg.default_language);

            const Taxonomy* taxonomy = &merged;
            Domain d = domain_from_label(req.dominant);
            if (d == Domain::CC) taxonomy = &tax_cc;
            if (d == Domain::URW) taxonomy = &tax_urw;

            auto index = std::make_shared<SentenceIndex>(
                index_article(article, *embedder, cfg.retrieval));
            traces[i].index = index;
            std::vector<RetrievedEvidence> evidence = retrieve_dual_pass(
                *index, *taxonomy, req.dominant, req.subs, *embedder, cfg.retrieval);
            PromptBundle bundle = build_react_prompt(evidence, req.dominant, req.subs, *taxonomy);
            Explanation explanation = generate_explanation(*chat, bundle);
            drop_index(*index);

            traces[i].word_count = explanation.word_count;
            results[i].line = req.filename + "\t" + sanitize_single_line(explanation.text);
        } catch (const std::exception& e) {
            results[i].error = e.what();
            traces[i].error = e.what();
            if (traces[i].index && traces[i].index->state() == IndexState::Live) {
                traces[i].index->drop(); // indices never outlive their article task
            }
        }
    });

    std::ostringstream explanations;
    std::ostringstream errors;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].error.empty()) {
            ++failures;
            errors << requests[i].filename << '\t' << sanitize_single_line(results[i].error)
                   << '\n';
            continue;
        }
        explanations << results[i].line << '\n';
    }

    ExplainOutcome outcome;
    outcome.explanations_file = out_file;
    write_text_file(out_file, explanations.str());
    std::filesystem::path sidecar = out_file;
    sidecar += ".errors.tsv";
    std::filesystem::remove(sidecar);
    if (failures > 0) {
        write_text_file(sidecar, errors.str());
        outcome.errors_file = sidecar;
    }
    outcome.failures = failures;
    if (keep_traces) outcome.traces = std::move(traces);
    return outcome;
}

std::vector<std::pair<std::string, std::string>> load_text_pairs(
    const std::filesystem::path& path) {
    std::vector<std::pair<std::string, std::string>> out;
    std::vector<std::string> lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        std::vector<std::string> fields = split(lines[i], '\t');
        if (fields.size() != 2) {
            throw Error(path.string() + " line " + std::to_string(i + 1) +
                        ": expected <filename>\\t<text>");
        }
        out.emplace_back(trim(fields[0]), trim(fields[1]));
    }
    return out;
}

EvaluateOutcome run_evaluate(
    const PipelineConfig& cfg,
    const std::vector<std::pair<std::string, std::filesystem::path>>& prediction_files,
    const std::filesystem::path& gold_file,
    const std::optional<std::filesystem::path>& explanations_file,
    const std::optional<std::filesystem::path>& references_file, ReportFormat format) {
    if (prediction_files.empty()) {
        throw Error("run_evaluate: no prediction files given");
    }
    std::vector<GoldAnnotation> golds = load_annotations(gold_file);
    if (golds.empty()) {
        throw Error("gold file " + gold_file.string() + " has no entries");
    }

    std::vector<std::pair<std::string, std::vector<GoldAnnotation>>> runs;
    for (const auto& [name, file] : prediction_files) {
        runs.emplace_back(name, load_annotations(file));
    }

    EvaluateOutcome outcome;
    const char* ext = format == ReportFormat::Tsv ? ".tsv" : ".json";

    outcome.f1 = build_f1_report(runs.front().second, golds, cfg.averaging);
    std::filesystem::path class_report =
        cfg.paths.output_dir / (std::string("classification_report") + ext);
    write_text_file(class_report, format == ReportFormat::Tsv ? f1_report_to_tsv(outcome.f1)
                                                              : f1_report_to_json(outcome.f1));
    outcome.files_written.push_back(class_report);

    if (runs.size() > 1) {
        outcome.comparison = compare_runs(runs, golds, cfg.averaging);
        std::filesystem::path cmp_file = cfg.paths.output_dir / "comparison.tsv";
        write_text_file(cmp_file, comparison_to_tsv(*outcome.comparison));
        outcome.files_written.push_back(cmp_file);
    }

    if (explanations_file && references_file) {
        auto explanations = load_text_pairs(*explanations_file);
        auto references = load_text_pairs(*references_file);
        std::map<std::string, std::string> ref_by_id(references.begin(), references.end());
        if (ref_by_id.size() != references.size()) {
            throw Error("references file has duplicate ids");
        }

        std::unique_ptr<Embedder> embedder = make_embedder(cfg.embedder);
        GenScore score;
        std::map<Language, std::vector<GenScoreRow>> by_language;
        std::vector<GenScoreRow> all;
        for (const auto& [id, text] : explanations) {
            auto it = ref_by_id.find(id);
            if (it == ref_by_id.end()) {
                throw Error("no reference for explanation '" + id + "'");
            }
            GenScoreRow row = greedy_match_score(text, it->second, *embedder);
            by_language[language_from_id(id, cfg.default_language)].push_back(row);
            all.push_back(row);
        }
        if (all.empty()) {
            throw Error("explanations file " + explanations_file->string() + " has no entries");
        }
        auto average = [](const std::vector<GenScoreRow>& rows) {
            GenScoreRow avg;
            for (const GenScoreRow& r : rows) {
                avg.precision += r.precision;
                avg.recall += r.recall;
                avg.f1 += r.f1;
            }
            double n = static_cast<double>(rows.size());
            avg.precision /= n;
            avg.recall /= n;
            avg.f1 /= n;
            avg.count = rows.size();
            return avg;
        };
        for (const auto& [lang, rows] : by_language) {
            score.per_language[lang] = average(rows);
        }
        score.overall = average(all);
        outcome.gen = score;

        std::filesystem::path gen_report =
            cfg.paths.output_dir / (std::string("generation_report") + ext);
        write_text_file(gen_report, format == ReportFormat::Tsv ? gen_score_to_tsv(score)
                                                                : gen_score_to_json(score));
        outcome.files_written.push_back(gen_report);
    } else if (explanations_file || references_file) {
        throw Error("generation scoring needs both --explanations and --references");
    }
    return outcome;
}

} // namespace narrlens
