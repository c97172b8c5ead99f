#include "narrlens/taxonomy.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace narrlens {

namespace {

const char* kHeader =
    "main_id\tmain_def\tmain_example\tmain_meta\tsub_id\tsub_def\tsub_example\tsub_meta";

std::string field_or(const std::string& s) {
    return s.empty() ? std::string("-") : s;
}

} // namespace

Taxonomy::Taxonomy(Domain domain, std::vector<TaxonomyEntry> entries)
    : domain_(domain), entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        TaxonomyEntry& e = entries_[i];
        e.main_id = trim(e.main_id);
        e.sub_id = trim(e.sub_id);
        if (e.main_id.empty() || e.sub_id.empty()) {
            throw Error("taxonomy entry with empty identifier at row " + std::to_string(i + 1));
        }
        if (sub_to_entry_.count(e.sub_id)) {
            throw Error("duplicate sub-narrative '" + e.sub_id + "'");
        }
        sub_to_entry_[e.sub_id] = i;
        auto [it, inserted] = narrative_index_.try_emplace(e.main_id);
        if (inserted) {
            main_order_.push_back(e.main_id);
            main_first_entry_[e.main_id] = i;
        }
        it->second.push_back(e.sub_id);
    }
    if (entries_.empty()) {
        throw Error("empty taxonomy");
    }
}

bool Taxonomy::has_main(const std::string& main_id) const {
    return narrative_index_.count(main_id) > 0;
}

bool Taxonomy::has_sub(const std::string& sub_id) const {
    return sub_to_entry_.count(sub_id) > 0;
}

const std::vector<std::string>& Taxonomy::subs_of(const std::string& main_id) const {
    auto it = narrative_index_.find(main_id);
    if (it == narrative_index_.end()) {
        throw Error("unknown narrative '" + main_id + "'");
    }
    return it->second;
}

const std::string& Taxonomy::parent_of(const std::string& sub_id) const {
    auto it = sub_to_entry_.find(sub_id);
    if (it == sub_to_entry_.end()) {
        throw Error("unknown sub-narrative '" + sub_id + "'");
    }
    return entries_[it->second].main_id;
}

const TaxonomyEntry& Taxonomy::main_entry(const std::string& main_id) const {
    auto it = main_first_entry_.find(main_id);
    if (it == main_first_entry_.end()) {
        throw Error("unknown narrative '" + main_id + "'");
    }
    return entries_[it->second];
}

const TaxonomyEntry& Taxonomy::sub_entry(const std::string& sub_id) const {
    auto it = sub_to_entry_.find(sub_id);
    if (it == sub_to_entry_.end()) {
        throw Error("unknown sub-narrative '" + sub_id + "'");
    }
    return entries_[it->second];
}

Taxonomy parse_taxonomy(const std::string& tsv, Domain domain) {
    std::vector<std::string> lines;
    {
        std::string current;
        for (char c : tsv) {
            if (c == '\n') {
                if (!current.empty() && current.back() == '\r') current.pop_back();
                lines.push_back(current);
                current.clear();
            } else {
                current += c;
            }
        }
        if (!current.empty()) {
            if (current.back() == '\r') current.pop_back();
            lines.push_back(current);
        }
    }
    if (lines.empty()) {
        throw Error("empty taxonomy");
    }
    if (lines.front() != kHeader) {
        throw Error("bad taxonomy header; expected '" + std::string(kHeader) + "'");
    }

    std::vector<TaxonomyEntry> entries;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        std::vector<std::string> cols = split(lines[i], '\t');
        if (cols.size() != 8) {
            throw Error("malformed taxonomy row " + std::to_string(i + 1) + ": expected 8 columns, got " +
                        std::to_string(cols.size()));
        }
        TaxonomyEntry e;
        e.main_id = trim(cols[0]);
        e.main_definition = trim(cols[1]);
        e.main_example = trim(cols[2]);
        e.main_metadata = trim(cols[3]);
        e.sub_id = trim(cols[4]);
        e.sub_definition = trim(cols[5]);
        e.sub_example = trim(cols[6]);
        e.sub_metadata = trim(cols[7]);
        if (e.main_id.empty() || e.sub_id.empty()) {
            throw Error("empty identifier in taxonomy row " + std::to_string(i + 1));
        }
        entries.push_back(std::move(e));
    }
    if (entries.empty()) {
        throw Error("empty taxonomy");
    }
    return Taxonomy(domain, std::move(entries));
}

Taxonomy load_taxonomy(const std::filesystem::path& path, Domain domain) {
    if (!std::filesystem::exists(path)) {
        throw Error("taxonomy file not found: " + path.string());
    }
    return parse_taxonomy(read_text_file(path), domain);
}

std::string taxonomy_to_tsv(const Taxonomy& t) {
    std::ostringstream out;
    out << kHeader << '\n';
    for (const TaxonomyEntry& e : t.entries()) {
        out << e.main_id << '\t' << e.main_definition << '\t' << e.main_example << '\t'
            << e.main_metadata << '\t' << e.sub_id << '\t' << e.sub_definition << '\t'
            << e.sub_example << '\t' << e.sub_metadata << '\n';
    }
    return out.str();
}

std::vector<LabelViolation> validate_labelset(const Taxonomy& t,
                                              const std::vector<std::string>& narratives,
                                              const std::vector<std::string>& subs) {
    std::vector<LabelViolation> violations;
    std::set<std::string> narrative_set(narratives.begin(), narratives.end());
    for (const std::string& n : narratives) {
        if (!t.has_main(n)) {
            violations.push_back({LabelViolation::Kind::UnknownNarrative, n,
                                  "narrative '" + n + "' not in taxonomy"});
        }
    }
    for (const std::string& s : subs) {
        if (!t.has_sub(s)) {
            violations.push_back({LabelViolation::Kind::UnknownSub, s,
                                  "sub-narrative '" + s + "' not in taxonomy"});
            continue;
        }
        const std::string& parent = t.parent_of(s);
        if (!narrative_set.count(parent)) {
            violations.push_back({LabelViolation::Kind::OrphanSub, s,
                                  "sub-narrative '" + s + "' has parent '" + parent +
                                      "' absent from the narrative set"});
        }
    }
    return violations;
}

std::string render_taxonomy_block(const Taxonomy& t,
                                  const std::vector<std::string>& labels,
                                  LabelLevel level) {
    std::ostringstream out;
    bool first = true;
    for (const std::string& label : labels) {
        if (!first) out << '\n';
        first = false;
        if (level == LabelLevel::Main) {
            const TaxonomyEntry& e = t.main_entry(label);
            out << "Label: " << e.main_id << '\n'
                << "Definition: " << field_or(e.main_definition) << '\n'
                << "Example: " << field_or(e.main_example) << '\n'
                << "Notes: " << field_or(e.main_metadata) << '\n';
        } else {
            const TaxonomyEntry& e = t.sub_entry(label);
            out << "Label: " << e.sub_id << '\n'
                << "Definition: " << field_or(e.sub_definition) << '\n'
                << "Example: " << field_or(e.sub_example) << '\n'
                << "Notes: " << field_or(e.sub_metadata) << '\n';
        }
    }
    return out.str();
}

Taxonomy merge_taxonomies(const Taxonomy& a, const Taxonomy& b) {
    std::vector<TaxonomyEntry> entries = a.entries();
    for (const TaxonomyEntry& e : b.entries()) {
        auto same_row = [&e](const TaxonomyEntry& x) {
            return x.main_id == e.main_id && x.sub_id == e.sub_id;
        };
        auto it = std::find_if(entries.begin(), entries.end(), same_row);
        if (it == entries.end()) {
            entries.push_back(e);
            continue;
        }
        bool identical = it->main_definition == e.main_definition &&
                         it->main_example == e.main_example &&
                         it->main_metadata == e.main_metadata &&
                         it->sub_definition == e.sub_definition &&
                         it->sub_example == e.sub_example &&
                         it->sub_metadata == e.sub_metadata;
        if (!identical) {
            throw Error("conflicting duplicate taxonomy row for ('" + e.main_id + "', '" +
                        e.sub_id + "') while merging");
        }
    }
    return Taxonomy(Domain::Unknown, std::move(entries));
}

} // namespace narrlens
