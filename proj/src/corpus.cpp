#include "narrlens/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace narrlens {

namespace {

std::vector<std::string> parse_label_list(const std::string& field) {
    std::vector<std::string> labels;
    std::unordered_set<std::string> seen;
    for (const std::string& raw : split(field, ';')) {
        std::string label = trim(raw);
        if (label.empty()) continue;
        if (seen.insert(label).second) {
            labels.push_back(std::move(label));
        }
    }
    return labels;
}

bool all_have_prefix(const std::vector<std::string>& labels, std::string_view prefix) {
    for (const std::string& l : labels) {
        if (l.rfind(prefix, 0) != 0) return false;
    }
    return true;
}

} // namespace

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    for (std::size_t i : indices) {
        out.articles.push_back(articles.at(i));
        out.golds.push_back(golds.at(i));
    }
    return out;
}

Dataset Dataset::by_domain(Domain d) const {
    Dataset out;
    for (std::size_t i = 0; i < articles.size(); ++i) {
        if (articles[i].domain == d) {
            out.articles.push_back(articles[i]);
            out.golds.push_back(golds[i]);
        }
    }
    return out;
}

std::size_t LabelMatrix::row_sum(std::size_t i) const {
    std::size_t sum = 0;
    for (std::uint8_t v : values.at(i)) sum += v;
    return sum;
}

std::vector<GoldAnnotation> load_annotations(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw Error("annotations file not found: " + path.string());
    }
    std::vector<GoldAnnotation> out;
    std::vector<std::string> lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        std::vector<std::string> fields = split(lines[i], '\t');
        if (fields.size() != 3) {
            throw Error("annotations line " + std::to_string(i + 1) + ": expected 3 tab-separated fields, got " +
                        std::to_string(fields.size()));
        }
        GoldAnnotation g;
        g.article_id = trim(fields[0]);
        if (g.article_id.empty()) {
            throw Error("annotations line " + std::to_string(i + 1) + ": empty filename");
        }
        g.narratives = parse_label_list(fields[1]);
        g.sub_narratives = parse_label_list(fields[2]);
        out.push_back(std::move(g));
    }
    return out;
}

Language language_from_id(const std::string& id, Language fallback) {
    std::size_t pos = id.find('_');
    if (pos != std::string::npos) {
        Language l;
        if (try_parse_language(std::string_view(id).substr(0, pos), l)) return l;
    }
    return fallback;
}

Domain infer_domain(const std::vector<std::string>& narratives,
                    const std::vector<std::string>& subs) {
    std::vector<std::string> all = narratives;
    all.insert(all.end(), subs.begin(), subs.end());
    if (all.empty()) return Domain::Unknown;
    if (all_have_prefix(all, "CC:")) return Domain::CC;
    if (all_have_prefix(all, "URW:")) return Domain::URW;
    return Domain::Unknown;
}

Dataset load_corpus(const std::filesystem::path& articles_dir,
                    const std::filesystem::path& annotations,
                    const Taxonomy& taxonomy_cc,
                    const Taxonomy& taxonomy_urw,
                    Language default_language) {
    if (!std::filesystem::is_directory(articles_dir)) {
        throw Error("articles directory not found: " + articles_dir.string());
    }
    std::vector<GoldAnnotation> golds = load_annotations(annotations);

    Dataset out;
    std::unordered_set<std::string> seen_files;
    const Taxonomy merged = merge_taxonomies(taxonomy_cc, taxonomy_urw);

    for (GoldAnnotation& gold : golds) {
        const std::string filename = gold.article_id;
        if (!seen_files.insert(filename).second) {
            throw Error("duplicate annotation for '" + filename + "'");
        }
        std::filesystem::path file = articles_dir / filename;
        if (!std::filesystem::exists(file)) {
            throw Error("annotation references missing file '" + filename + "'");
        }

        Article a;
        a.filename = filename;
        a.id = file.stem().string();
        a.text = read_text_file(file);
        if (trim(a.text).empty()) {
            throw Error("article '" + filename + "' is empty");
        }
        a.language = language_from_id(a.id, default_language);
        a.domain = infer_domain(gold.narratives, gold.sub_narratives);

        const Taxonomy* tax = &merged;
        if (a.domain == Domain::CC) tax = &taxonomy_cc;
        if (a.domain == Domain::URW) tax = &taxonomy_urw;
        for (const LabelViolation& v : validate_labelset(*tax, gold.narratives, gold.sub_narratives)) {
            out.warnings.push_back("article '" + filename + "': " + v.detail);
        }

        gold.article_id = a.id;
        out.articles.push_back(std::move(a));
        out.golds.push_back(std::move(gold));
    }
    return out;
}

SplitResult split(const Dataset& d, double ratio, std::uint64_t seed) {
    if (d.empty()) {
        throw Error("cannot split an empty dataset");
    }
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw Error("split ratio must be in (0, 1)");
    }
    std::vector<std::size_t> indices(d.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    std::mt19937_64 rng(seed);
    deterministic_shuffle(indices, rng);

    const auto n_train = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(d.size())));
    std::vector<std::size_t> train_idx(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> val_idx(indices.begin() + static_cast<std::ptrdiff_t>(n_train), indices.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(val_idx.begin(), val_idx.end());

    SplitResult result;
    result.train = d.subset(train_idx);
    result.validation = d.subset(val_idx);
    if (result.validation.empty()) {
        result.warnings.push_back("validation split is empty (N=" + std::to_string(d.size()) +
                                  ", ratio=" + std::to_string(ratio) + ")");
    }
    if (result.train.empty()) {
        result.warnings.push_back("train split is empty (N=" + std::to_string(d.size()) +
                                  ", ratio=" + std::to_string(ratio) + ")");
    }
    return result;
}

LabelMatrix encode_labels(const Dataset& d, const std::vector<std::string>& vocab,
                          LabelLevel level) {
    if (vocab.empty()) {
        throw Error("label vocabulary is empty");
    }
    {
        std::set<std::string> unique(vocab.begin(), vocab.end());
        if (unique.size() != vocab.size()) {
            throw Error("duplicate entries in label vocabulary");
        }
    }
    LabelMatrix m;
    m.columns = vocab;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::vector<std::string>& gold =
            level == LabelLevel::Main ? d.golds[i].narratives : d.golds[i].sub_narratives;
        std::vector<std::uint8_t> row(vocab.size(), 0);
        for (const std::string& label : gold) {
            auto it = std::find(vocab.begin(), vocab.end(), label);
            if (it == vocab.end()) {
                m.skipped.push_back(d.articles[i].id + ": " + label);
            } else {
                row[static_cast<std::size_t>(it - vocab.begin())] = 1;
            }
        }
        m.row_ids.push_back(d.articles[i].id);
        m.values.push_back(std::move(row));
    }
    return m;
}

} // namespace narrlens
