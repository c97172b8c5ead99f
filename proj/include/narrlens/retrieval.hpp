#pragma once
// Sentence segmentation, the ephemeral per-article vector index, and the
// dual-pass cosine retrieval with its dynamic 5th-rank threshold.
//
// Pass 1 ranks sentences against the dominant-narrative query and keeps the
// top min(k, n); the score of its lowest-ranked sentence becomes tau5. Pass 2
// queries each sub-narrative and admits any sentence not yet included whose
// score meets tau5. The final evidence list is deduplicated by sentence index
// and sorted in article order.
//
// Each SentenceIndex is exclusively owned by one article task; separate
// articles can be processed in parallel with independent indices.

#include "narrlens/common.hpp"
#include "narrlens/corpus.hpp"
#include "narrlens/embedding.hpp"
#include "narrlens/taxonomy.hpp"

#include <string>
#include <vector>

namespace narrlens {

struct SentenceRecord {
    std::size_t index; // 0-based position in the article
    std::string text;
    EmbeddingVector vector;
};

enum class IndexState { Live, Dropped };

class SentenceIndex {
public:
    SentenceIndex(std::string article_id, std::vector<SentenceRecord> records)
        : article_id_(std::move(article_id)), records_(std::move(records)) {}

    SentenceIndex(const SentenceIndex&) = delete;
    SentenceIndex& operator=(const SentenceIndex&) = delete;
    SentenceIndex(SentenceIndex&&) = default;
    SentenceIndex& operator=(SentenceIndex&&) = default;

    const std::string& article_id() const { return article_id_; }
    IndexState state() const { return state_; }

    // Throws once the index has been dropped.
    const std::vector<SentenceRecord>& records() const;

    // Releases the records; any later query errors. Double drop is an error.
    void drop();

private:
    std::string article_id_;
    std::vector<SentenceRecord> records_;
    IndexState state_ = IndexState::Live;
};

struct RetrievedEvidence {
    enum class Source { Pass1, Pass2 };
    std::string sentence;
    std::size_t article_index;
    double score;
    Source source;
    std::string query_label;
};

struct RetrievalConfig {
    enum class QueryComposition { LabelOnly, LabelPlusDefinition };
    std::size_t top_k = 5;
    QueryComposition query_composition = QueryComposition::LabelPlusDefinition;
    // Pass-2 admission: score >= tau5 when true (default), strict > otherwise.
    bool tau_inclusive = true;
};

// Splits text into sentences at '.', '!', '?' or the devanagari danda '।'
// followed by whitespace or end-of-text. A candidate sentence shorter than 3
// code points keeps accumulating into the following text; a short trailing
// fragment is merged back into the previous sentence. Sentences are trimmed;
// order is preserved. Throws when no sentence remains.
std::vector<std::string> segment(const std::string& text, Language language);

SentenceIndex index_article(const Article& article, Embedder& embedder,
                            const RetrievalConfig& cfg);

std::vector<RetrievedEvidence> retrieve_dual_pass(const SentenceIndex& idx,
                                                  const Taxonomy& taxonomy,
                                                  const std::string& dominant,
                                                  const std::vector<std::string>& subs,
                                                  Embedder& embedder,
                                                  const RetrievalConfig& cfg);

inline void drop_index(SentenceIndex& idx) { idx.drop(); }

// Query string for a label under the configured composition.
std::string compose_query(const Taxonomy& taxonomy, const std::string& label,
                          LabelLevel level, RetrievalConfig::QueryComposition composition);

} // namespace narrlens
