#include "narrlens/retrieval.hpp"

#include <algorithm>

namespace narrlens {

namespace {

constexpr std::size_t kMinSentenceChars = 3;

// Byte length of the sentence terminator starting at text[i], or 0.
std::size_t terminator_length(const std::string& text, std::size_t i) {
    char c = text[i];
    if (c == '.' || c == '!' || c == '?') return 1;
    // devanagari danda U+0964
    if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE0 &&
        static_cast<unsigned char>(text[i + 1]) == 0xA5 &&
        static_cast<unsigned char>(text[i + 2]) == 0xA4) {
        return 3;
    }
    return 0;
}

bool is_space_byte(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

} // namespace

const std::vector<SentenceRecord>& SentenceIndex::records() const {
    if (state_ == IndexState::Dropped) {
        throw Error("index dropped: article '" + article_id_ + "'");
    }
    return records_;
}

void SentenceIndex::drop() {
    if (state_ == IndexState::Dropped) {
        throw Error("index already dropped: article '" + article_id_ + "'");
    }
    records_.clear();
    records_.shrink_to_fit();
    state_ = IndexState::Dropped;
}

std::vector<std::string> segment(const std::string& text, Language /*language*/) {
    if (trim(text).empty()) {
        throw Error("segment: empty text");
    }
    std::vector<std::string> sentences;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t tlen = terminator_length(text, i);
        if (tlen == 0) {
            current += text[i];
            ++i;
            continue;
        }
        current.append(text, i, tlen);
        i += tlen;
        bool at_boundary = i >= text.size() || is_space_byte(text[i]);
        if (!at_boundary) continue;
        std::string candidate = trim(current);
        if (candidate.empty()) {
            current.clear();
            continue;
        }
        if (utf8_length(candidate) < kMinSentenceChars) {
            if (i < text.size()) {
                // too short to stand alone: suppress the boundary and keep
                // accumulating into the following text
                continue;
            }
            if (!sentences.empty()) {
                // short terminated fragment at end-of-text joins backwards
                sentences.back() += ' ';
                sentences.back() += candidate;
                current.clear();
                continue;
            }
        }
        sentences.push_back(std::move(candidate));
        current.clear();
    }
    std::string tail = trim(current);
    if (!tail.empty()) {
        if (utf8_length(tail) < kMinSentenceChars && !sentences.empty()) {
            sentences.back() += ' ';
            sentences.back() += tail;
        } else {
            sentences.push_back(std::move(tail));
        }
    }
    if (sentences.empty()) {
        throw Error("segment: no sentences in text");
    }
    return sentences;
}

SentenceIndex index_article(const Article& article, Embedder& embedder,
                            const RetrievalConfig& /*cfg*/) {
    std::vector<std::string> sentences = segment(article.text, article.language);
    std::vector<EmbeddingVector> vectors = embedder.embed(sentences);
    std::vector<SentenceRecord> records;
    records.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        records.push_back({i, std::move(sentences[i]), std::move(vectors[i])});
    }
    return SentenceIndex(article.id, std::move(records));
}

std::string compose_query(const Taxonomy& taxonomy, const std::string& label,
                          LabelLevel level, RetrievalConfig::QueryComposition composition) {
    if (composition == RetrievalConfig::QueryComposition::LabelOnly) {
        if (level == LabelLevel::Main) {
            taxonomy.main_entry(label); // existence check
        } else {
            taxonomy.sub_entry(label);
        }
        return label;
    }
    const std::string& definition = level == LabelLevel::Main
                                        ? taxonomy.main_entry(label).main_definition
                                        : taxonomy.sub_entry(label).sub_definition;
    if (definition.empty()) return label;
    return label + "\n" + definition;
}

std::vector<RetrievedEvidence> retrieve_dual_pass(const SentenceIndex& idx,
                                                  const Taxonomy& taxonomy,
                                                  const std::string& dominant,
                                                  const std::vector<std::string>& subs,
                                                  Embedder& embedder,
                                                  const RetrievalConfig& cfg) {
    const std::vector<SentenceRecord>& records = idx.records(); // throws if dropped
    if (!taxonomy.has_main(dominant)) {
        throw Error("unknown narrative '" + dominant + "'");
    }

    std::vector<std::string> queries;
    queries.push_back(compose_query(taxonomy, dominant, LabelLevel::Main, cfg.query_composition));
    for (const std::string& sub : subs) {
        queries.push_back(compose_query(taxonomy, sub, LabelLevel::Sub, cfg.query_composition));
    }
    std::vector<EmbeddingVector> query_vectors = embedder.embed(queries);

    // pass 1: rank against the dominant query, keep top min(k, n)
    std::vector<std::pair<double, std::size_t>> ranked; // (score, record position)
    ranked.reserve(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
        ranked.emplace_back(cosine(records[r].vector, query_vectors[0]), r);
    }
    std::sort(ranked.begin(), ranked.end(), [&records](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return records[a.second].index < records[b.second].index;
    });
    std::size_t keep = std::min(cfg.top_k, ranked.size());
    if (keep == 0) {
        throw Error("retrieval with top_k = 0");
    }

    std::vector<RetrievedEvidence> evidence;
    std::vector<bool> included(records.size(), false);
    for (std::size_t p = 0; p < keep; ++p) {
        const SentenceRecord& rec = records[ranked[p].second];
        evidence.push_back({rec.text, rec.index, ranked[p].first,
                            RetrievedEvidence::Source::Pass1, dominant});
        included[ranked[p].second] = true;
    }
    const double tau5 = ranked[keep - 1].first;

    // pass 2: admit sentences meeting tau5 against each sub-narrative query
    for (std::size_t q = 0; q < subs.size(); ++q) {
        const EmbeddingVector& qv = query_vectors[q + 1];
        for (std::size_t r = 0; r < records.size(); ++r) {
            if (included[r]) continue;
            double score = cosine(records[r].vector, qv);
            bool admit = cfg.tau_inclusive ? score >= tau5 : score > tau5;
            if (admit) {
                evidence.push_back({records[r].text, records[r].index, score,
                                    RetrievedEvidence::Source::Pass2, subs[q]});
                included[r] = true;
            }
        }
    }

    std::sort(evidence.begin(), evidence.end(),
              [](const RetrievedEvidence& a, const RetrievedEvidence& b) {
                  return a.article_index < b.article_index;
              });
    return evidence;
}

} // namespace narrlens
