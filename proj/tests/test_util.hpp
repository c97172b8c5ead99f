#pragma once
// Shared test helpers: scratch directories and small fixture builders.

#include "narrlens/corpus.hpp"
#include "narrlens/taxonomy.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace narrlens::testutil {

// A unique scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("narrlens-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string tiny_taxonomy_tsv() {
    return "main_id\tmain_def\tmain_example\tmain_meta\tsub_id\tsub_def\tsub_example\tsub_meta\n"
           "N1\tfirst narrative definition\tfirst example\tfirst meta\t"
           "S1a\tsub a definition\tsub a example\tsub a meta\n"
           "N1\tfirst narrative definition\tfirst example\tfirst meta\t"
           "S1b\tsub b definition\tsub b example\tsub b meta\n"
           "N2\tsecond narrative definition\tsecond example\tsecond meta\t"
           "S2a\tsub c definition\tsub c example\tsub c meta\n";
}

inline Taxonomy tiny_taxonomy(Domain domain = Domain::CC) {
    return parse_taxonomy(tiny_taxonomy_tsv(), domain);
}

inline Article make_article(std::string id, std::string text,
                            Language language = Language::EN,
                            Domain domain = Domain::Unknown) {
    Article a;
    a.id = id;
    a.filename = id + ".txt";
    a.language = language;
    a.domain = domain;
    a.text = std::move(text);
    return a;
}

inline std::filesystem::path data_dir() { return std::filesystem::path(NARRLENS_DATA_DIR); }

} // namespace narrlens::testutil
