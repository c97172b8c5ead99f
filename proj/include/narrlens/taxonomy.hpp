#pragma once
// Two-level narrative taxonomy: a list of (main, sub) rows with definitions,
// examples and metadata, plus queries and deterministic prompt rendering.
//
// File format: UTF-8 TSV with the exact header
//   main_id\tmain_def\tmain_example\tmain_meta\tsub_id\tsub_def\tsub_example\tsub_meta
// One row per (main, sub) pair; embedded tabs/newlines are not representable.
// An "Other" catch-all is expressed as a row whose main_id and sub_id are both
// the literal "Other".
//
// A Taxonomy is immutable after load and safe for concurrent reads.

#include "narrlens/common.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace narrlens {

struct TaxonomyEntry {
    std::string main_id;
    std::string main_definition;
    std::string main_example;
    std::string main_metadata;
    std::string sub_id;
    std::string sub_definition;
    std::string sub_example;
    std::string sub_metadata;
};

struct LabelViolation {
    enum class Kind { UnknownNarrative, UnknownSub, OrphanSub };
    Kind kind;
    std::string label;
    std::string detail;
};

class Taxonomy {
public:
    Taxonomy() = default;
    Taxonomy(Domain domain, std::vector<TaxonomyEntry> entries);

    Domain domain() const { return domain_; }
    const std::vector<TaxonomyEntry>& entries() const { return entries_; }

    // Main narrative ids in first-appearance order.
    const std::vector<std::string>& main_ids() const { return main_order_; }

    bool has_main(const std::string& main_id) const;
    bool has_sub(const std::string& sub_id) const;

    // Sub ids of one main narrative, in file order. Throws on unknown main.
    const std::vector<std::string>& subs_of(const std::string& main_id) const;

    // The unique main narrative owning sub_id. Throws on unknown sub.
    const std::string& parent_of(const std::string& sub_id) const;

    // First entry carrying this main narrative (its definition/example/meta
    // columns describe the main). Throws on unknown main.
    const TaxonomyEntry& main_entry(const std::string& main_id) const;

    // The entry of a sub narrative. Throws on unknown sub.
    const TaxonomyEntry& sub_entry(const std::string& sub_id) const;

private:
    Domain domain_ = Domain::Unknown;
    std::vector<TaxonomyEntry> entries_;
    std::vector<std::string> main_order_;
    std::unordered_map<std::string, std::vector<std::string>> narrative_index_;
    std::unordered_map<std::string, std::size_t> main_first_entry_;
    std::unordered_map<std::string, std::size_t> sub_to_entry_;
};

Taxonomy load_taxonomy(const std::filesystem::path& path, Domain domain);

// Parses the TSV content directly (used by load_taxonomy and tests).
Taxonomy parse_taxonomy(const std::string& tsv, Domain domain);

// Re-serializes to the TSV format, header included. load -> to_tsv round-trips
// the row multiset.
std::string taxonomy_to_tsv(const Taxonomy& t);

// Checks a (narratives, subs) label pair against the taxonomy. Returns the
// violations found; an empty list means every narrative and sub exists and
// each sub's parent is present in the narrative set.
std::vector<LabelViolation> validate_labelset(const Taxonomy& t,
                                              const std::vector<std::string>& narratives,
                                              const std::vector<std::string>& subs);

// Deterministic text block for prompt injection: one stanza per label with
// identifier, definition, example and metadata, in input order. Throws on a
// label unknown at the requested level.
std::string render_taxonomy_block(const Taxonomy& t,
                                  const std::vector<std::string>& labels,
                                  LabelLevel level);

// Combined view over two taxonomies, used to route articles whose domain is
// not known. Rows identical in both inputs (the shared "Other" row) are kept
// once; conflicting duplicates are an error.
Taxonomy merge_taxonomies(const Taxonomy& a, const Taxonomy& b);

} // namespace narrlens
