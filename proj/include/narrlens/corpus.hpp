#pragma once
// Corpus ingestion: article files + shared-task-style gold annotations, the
// seeded train/validation split, and multi-hot label matrices.
//
// Annotations file: one line per article,
//   <filename>\t<narrative1;narrative2;...>\t<sub1;sub2;...>
// An empty label list is encoded as the literal "Other". Articles are plain
// UTF-8 text files; the file stem is the article id and a leading "XX_"
// filename prefix selects the language (falling back to a caller default).
//
// A Dataset is immutable after load; concurrent reads are safe.

#include "narrlens/common.hpp"
#include "narrlens/taxonomy.hpp"

#include <string>
#include <vector>

namespace narrlens {

struct Article {
    std::string id;       // file stem
    std::string filename; // as written in the annotations file
    Language language = Language::EN;
    Domain domain = Domain::Unknown;
    std::string text;
};

struct GoldAnnotation {
    std::string article_id;
    std::vector<std::string> narratives;     // ordered, duplicate-free
    std::vector<std::string> sub_narratives; // ordered, duplicate-free
};

struct Dataset {
    std::vector<Article> articles;      // annotation-file order
    std::vector<GoldAnnotation> golds;  // aligned with articles
    std::vector<std::string> warnings;  // label violations and other reports

    std::size_t size() const { return articles.size(); }
    bool empty() const { return articles.empty(); }

    // Subset with the given article indices, order preserved.
    Dataset subset(const std::vector<std::size_t>& indices) const;
    // Articles whose domain matches.
    Dataset by_domain(Domain d) const;
};

struct SplitResult {
    Dataset train;
    Dataset validation;
    std::vector<std::string> warnings;
};

struct LabelMatrix {
    std::vector<std::string> row_ids;            // article ids, dataset order
    std::vector<std::string> columns;            // label vocabulary
    std::vector<std::vector<std::uint8_t>> values;
    std::vector<std::string> skipped;            // gold labels outside the vocabulary

    std::size_t row_sum(std::size_t i) const;
};

// Parses an annotations file into (filename, narratives, subs) records.
// Label lists are ';'-separated; entries are trimmed and deduplicated.
std::vector<GoldAnnotation> load_annotations(const std::filesystem::path& path);

// Language from a filename prefix like "EN_...", else the fallback.
Language language_from_id(const std::string& id, Language fallback);

// Domain from the label prefixes "CC:" / "URW:": unambiguous prefixes pick
// the domain, anything mixed or unprefixed (e.g. "Other") is Unknown.
Domain infer_domain(const std::vector<std::string>& narratives,
                    const std::vector<std::string>& subs);

Dataset load_corpus(const std::filesystem::path& articles_dir,
                    const std::filesystem::path& annotations,
                    const Taxonomy& taxonomy_cc,
                    const Taxonomy& taxonomy_urw,
                    Language default_language = Language::EN);

// Deterministic seeded shuffle then prefix split; |train| = round(ratio * N).
// The partition is exact: disjoint and covering, original relative order kept
// within each side.
SplitResult split(const Dataset& d, double ratio, std::uint64_t seed);

// matrix[i][j] = 1 iff vocab[j] is a gold label of article i at the level.
// Gold labels outside the vocabulary are reported in `skipped`, not encoded.
LabelMatrix encode_labels(const Dataset& d, const std::vector<std::string>& vocab,
                          LabelLevel level);

} // namespace narrlens
