#include "narrlens/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_map>

namespace narrlens {

using nlohmann::json;

namespace {

double harmonic(double p, double r) {
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

std::set<std::string> as_set(const std::vector<std::string>& labels) {
    return std::set<std::string>(labels.begin(), labels.end());
}

std::string format4(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << v;
    return out.str();
}

} // namespace

PrfRow f1_samples(const std::vector<std::vector<std::string>>& preds,
                  const std::vector<std::vector<std::string>>& golds) {
    if (preds.size() != golds.size()) {
        throw Error("f1_samples: length mismatch");
    }
    PrfRow row;
    row.count = preds.size();
    if (preds.empty()) return row;
    double p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        std::set<std::string> pred = as_set(preds[i]);
        std::set<std::string> gold = as_set(golds[i]);
        double p, r, f;
        if (pred.empty() && gold.empty()) {
            p = r = f = 1.0;
        } else if (pred.empty() || gold.empty()) {
            p = r = f = 0.0;
        } else {
            std::size_t inter = 0;
            for (const std::string& l : pred) inter += gold.count(l);
            p = static_cast<double>(inter) / static_cast<double>(pred.size());
            r = static_cast<double>(inter) / static_cast<double>(gold.size());
            f = harmonic(p, r);
        }
        p_sum += p;
        r_sum += r;
        f_sum += f;
    }
    double n = static_cast<double>(preds.size());
    row.precision = p_sum / n;
    row.recall = r_sum / n;
    row.f1 = f_sum / n;
    return row;
}

PrfRow f1_score(const std::vector<std::vector<std::string>>& preds,
                const std::vector<std::vector<std::string>>& golds, Averaging mode) {
    if (mode == Averaging::Samples) return f1_samples(preds, golds);
    if (preds.size() != golds.size()) {
        throw Error("f1_score: length mismatch");
    }
    PrfRow row;
    row.count = preds.size();
    if (preds.empty()) return row;

    if (mode == Averaging::Micro) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            std::set<std::string> pred = as_set(preds[i]);
            std::set<std::string> gold = as_set(golds[i]);
            for (const std::string& l : pred) {
                if (gold.count(l)) ++tp;
                else ++fp;
            }
            for (const std::string& l : gold) {
                if (!pred.count(l)) ++fn;
            }
        }
        row.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        row.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        row.f1 = harmonic(row.precision, row.recall);
        return row;
    }

    // macro: average per-label P/R/F over the label vocabulary seen in
    // gold or predictions
    std::set<std::string> vocabulary;
    for (const auto& labels : preds) vocabulary.insert(labels.begin(), labels.end());
    for (const auto& labels : golds) vocabulary.insert(labels.begin(), labels.end());
    if (vocabulary.empty()) {
        row.precision = row.recall = row.f1 = 1.0; // nothing predicted, nothing expected
        return row;
    }
    double p_sum = 0, r_sum = 0, f_sum = 0;
    for (const std::string& label : vocabulary) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            bool in_pred = std::find(preds[i].begin(), preds[i].end(), label) != preds[i].end();
            bool in_gold = std::find(golds[i].begin(), golds[i].end(), label) != golds[i].end();
            if (in_pred && in_gold) ++tp;
            else if (in_pred) ++fp;
            else if (in_gold) ++fn;
        }
        double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        p_sum += p;
        r_sum += r;
        f_sum += harmonic(p, r);
    }
    double v = static_cast<double>(vocabulary.size());
    row.precision = p_sum / v;
    row.recall = r_sum / v;
    row.f1 = f_sum / v;
    return row;
}

GenScoreRow greedy_match_score(const std::string& candidate, const std::string& reference,
                               Embedder& embedder) {
    std::vector<std::string> cand_tokens = whitespace_tokenize(candidate);
    std::vector<std::string> ref_tokens = whitespace_tokenize(reference);
    if (cand_tokens.empty() || ref_tokens.empty()) {
        throw Error("greedy_match_score: empty text");
    }

    // embed each distinct token once
    std::vector<std::string> unique_tokens;
    std::unordered_map<std::string, std::size_t> token_pos;
    auto intern = [&](const std::string& t) {
        auto [it, inserted] = token_pos.try_emplace(t, unique_tokens.size());
        if (inserted) unique_tokens.push_back(t);
        return it->second;
    };
    std::vector<std::size_t> cand_ids, ref_ids;
    for (const std::string& t : cand_tokens) cand_ids.push_back(intern(t));
    for (const std::string& t : ref_tokens) ref_ids.push_back(intern(t));
    std::vector<EmbeddingVector> vectors = embedder.embed(unique_tokens);

    auto mean_best = [&vectors](const std::vector<std::size_t>& from,
                                const std::vector<std::size_t>& against) {
        double sum = 0.0;
        for (std::size_t f : from) {
            double best = -2.0;
            for (std::size_t a : against) {
                best = std::max(best, cosine(vectors[f], vectors[a]));
            }
            sum += best;
        }
        return sum / static_cast<double>(from.size());
    };

    GenScoreRow row;
    row.count = 1;
    row.recall = mean_best(ref_ids, cand_ids);
    row.precision = mean_best(cand_ids, ref_ids);
    row.f1 = (row.precision > 0.0 && row.recall > 0.0) ? harmonic(row.precision, row.recall) : 0.0;
    return row;
}

namespace {

struct LevelSets {
    std::vector<std::vector<std::string>> preds;
    std::vector<std::vector<std::string>> golds;
};

PrfRow score_level(const LevelSets& sets, Averaging mode) {
    return f1_score(sets.preds, sets.golds, mode);
}

} // namespace

F1Report build_f1_report(const std::vector<GoldAnnotation>& preds,
                         const std::vector<GoldAnnotation>& golds, Averaging mode) {
    if (preds.size() != golds.size()) {
        throw Error("build_f1_report: prediction/gold count mismatch");
    }
    std::unordered_map<std::string, const GoldAnnotation*> pred_by_id;
    for (const GoldAnnotation& p : preds) pred_by_id[p.article_id] = &p;
    if (pred_by_id.size() != preds.size()) {
        throw Error("build_f1_report: duplicate prediction ids");
    }

    LevelSets narr_cc, narr_urw, narr_all, sub_cc, sub_urw, sub_all;
    for (const GoldAnnotation& gold : golds) {
        auto it = pred_by_id.find(gold.article_id);
        if (it == pred_by_id.end()) {
            throw Error("build_f1_report: no prediction for article '" + gold.article_id + "'");
        }
        const GoldAnnotation& pred = *it->second;
        Domain domain = infer_domain(gold.narratives, gold.sub_narratives);

        narr_all.preds.push_back(pred.narratives);
        narr_all.golds.push_back(gold.narratives);
        sub_all.preds.push_back(pred.sub_narratives);
        sub_all.golds.push_back(gold.sub_narratives);
        if (domain == Domain::CC) {
            narr_cc.preds.push_back(pred.narratives);
            narr_cc.golds.push_back(gold.narratives);
            sub_cc.preds.push_back(pred.sub_narratives);
            sub_cc.golds.push_back(gold.sub_narratives);
        } else if (domain == Domain::URW) {
            narr_urw.preds.push_back(pred.narratives);
            narr_urw.golds.push_back(gold.narratives);
            sub_urw.preds.push_back(pred.sub_narratives);
            sub_urw.golds.push_back(gold.sub_narratives);
        }
    }

    F1Report report;
    report.article_count = golds.size();
    report.narrative_cc = score_level(narr_cc, mode);
    report.narrative_urw = score_level(narr_urw, mode);
    report.narrative_overall = score_level(narr_all, mode);
    report.sub_cc = score_level(sub_cc, mode);
    report.sub_urw = score_level(sub_urw, mode);
    report.sub_overall = score_level(sub_all, mode);
    return report;
}

RunComparison compare_runs(
    const std::vector<std::pair<std::string, std::vector<GoldAnnotation>>>& runs,
    const std::vector<GoldAnnotation>& golds, Averaging mode) {
    if (runs.empty()) {
        throw Error("compare_runs: no runs given");
    }
    std::set<std::string> gold_ids;
    for (const GoldAnnotation& g : golds) gold_ids.insert(g.article_id);
    for (const auto& [name, preds] : runs) {
        std::set<std::string> run_ids;
        for (const GoldAnnotation& p : preds) run_ids.insert(p.article_id);
        if (run_ids != gold_ids) {
            throw Error("compare_runs: run '" + name + "' covers different article ids than gold");
        }
    }

    RunComparison cmp;
    cmp.metric_names = {"Narrative CC",     "Narrative URW",     "Narrative Overall",
                        "Sub Narrative CC", "Sub Narrative URW", "Sub Narrative Overall"};
    cmp.f1.assign(cmp.metric_names.size(), {});
    for (const auto& [name, preds] : runs) {
        cmp.run_names.push_back(name);
        F1Report r = build_f1_report(preds, golds, mode);
        cmp.f1[0].push_back(r.narrative_cc.f1);
        cmp.f1[1].push_back(r.narrative_urw.f1);
        cmp.f1[2].push_back(r.narrative_overall.f1);
        cmp.f1[3].push_back(r.sub_cc.f1);
        cmp.f1[4].push_back(r.sub_urw.f1);
        cmp.f1[5].push_back(r.sub_overall.f1);
    }
    return cmp;
}

namespace {

void append_report_row(std::ostringstream& out, const std::string& name, const PrfRow& row) {
    out << name << '\t' << format4(row.precision) << '\t' << format4(row.recall) << '\t'
        << format4(row.f1) << '\t' << row.count << '\n';
}

json row_to_json(const PrfRow& row) {
    return {{"precision", row.precision},
            {"recall", row.recall},
            {"f1", row.f1},
            {"articles", row.count}};
}

} // namespace

std::string f1_report_to_tsv(const F1Report& report) {
    std::ostringstream out;
    out << "metric\tprecision\trecall\tf1\tarticles\n";
    append_report_row(out, "Narrative CC", report.narrative_cc);
    append_report_row(out, "Narrative URW", report.narrative_urw);
    append_report_row(out, "Narrative Overall", report.narrative_overall);
    append_report_row(out, "Sub Narrative CC", report.sub_cc);
    append_report_row(out, "Sub Narrative URW", report.sub_urw);
    append_report_row(out, "Sub Narrative Overall", report.sub_overall);
    return out.str();
}

std::string f1_report_to_json(const F1Report& report) {
    json j;
    j["article_count"] = report.article_count;
    j["narrative"] = {{"CC", row_to_json(report.narrative_cc)},
                      {"URW", row_to_json(report.narrative_urw)},
                      {"Overall", row_to_json(report.narrative_overall)}};
    j["sub_narrative"] = {{"CC", row_to_json(report.sub_cc)},
                          {"URW", row_to_json(report.sub_urw)},
                          {"Overall", row_to_json(report.sub_overall)}};
    return j.dump(2) + "\n";
}

std::string gen_score_to_tsv(const GenScore& score) {
    std::ostringstream out;
    out << "language\tprecision\trecall\tf1\tpairs\n";
    for (const auto& [lang, row] : score.per_language) {
        out << to_string(lang) << '\t' << format4(row.precision) << '\t' << format4(row.recall)
            << '\t' << format4(row.f1) << '\t' << row.count << '\n';
    }
    out << "Overall\t" << format4(score.overall.precision) << '\t'
        << format4(score.overall.recall) << '\t' << format4(score.overall.f1) << '\t'
        << score.overall.count << '\n';
    return out.str();
}

std::string gen_score_to_json(const GenScore& score) {
    json j;
    for (const auto& [lang, row] : score.per_language) {
        j["per_language"][to_string(lang)] = {{"precision", row.precision},
                                              {"recall", row.recall},
                                              {"f1", row.f1},
                                              {"pairs", row.count}};
    }
    j["overall"] = {{"precision", score.overall.precision},
                    {"recall", score.overall.recall},
                    {"f1", score.overall.f1},
                    {"pairs", score.overall.count}};
    return j.dump(2) + "\n";
}

std::string comparison_to_tsv(const RunComparison& cmp) {
    std::ostringstream out;
    out << "metric";
    for (const std::string& name : cmp.run_names) out << '\t' << name;
    out << '\n';
    for (std::size_t m = 0; m < cmp.metric_names.size(); ++m) {
        out << cmp.metric_names[m];
        for (double v : cmp.f1[m]) out << '\t' << format4(v);
        out << '\n';
    }
    return out.str();
}

std::string comparison_to_table(const RunComparison& cmp) {
    std::size_t name_width = 6; // "metric"
    for (const std::string& m : cmp.metric_names) name_width = std::max(name_width, m.size());
    std::vector<std::size_t> col_width;
    for (const std::string& r : cmp.run_names) col_width.push_back(std::max<std::size_t>(6, r.size()));

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(name_width)) << "metric";
    for (std::size_t c = 0; c < cmp.run_names.size(); ++c) {
        out << "  " << std::right << std::setw(static_cast<int>(col_width[c])) << cmp.run_names[c];
    }
    out << '\n';
    for (std::size_t m = 0; m < cmp.metric_names.size(); ++m) {
        out << std::left << std::setw(static_cast<int>(name_width)) << cmp.metric_names[m];
        for (std::size_t c = 0; c < cmp.run_names.size(); ++c) {
            out << "  " << std::right << std::setw(static_cast<int>(col_width[c]))
                << format4(cmp.f1[m][c]);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace narrlens
