#include "narrlens/taxonomy.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace narrlens;
using namespace narrlens::testutil;

TEST_CASE("load groups entries by main narrative in file order") {
    Taxonomy t = tiny_taxonomy();
    CHECK(t.main_ids() == std::vector<std::string>{"N1", "N2"});
    CHECK(t.subs_of("N1") == std::vector<std::string>{"S1a", "S1b"});
    CHECK(t.subs_of("N2") == std::vector<std::string>{"S2a"});
    CHECK(t.entries().size() == 3);
}

TEST_CASE("duplicate sub id is rejected") {
    std::string tsv =
        "main_id\tmain_def\tmain_example\tmain_meta\tsub_id\tsub_def\tsub_example\tsub_meta\n"
        "N1\td\te\tm\tS1a\td\te\tm\n"
        "N2\td\te\tm\tS1a\td\te\tm\n";
    CHECK_THROWS_WITH_AS(parse_taxonomy(tsv, Domain::CC),
                         doctest::Contains("duplicate sub-narrative"), Error);
}

TEST_CASE("empty taxonomy is rejected") {
    std::string header_only =
        "main_id\tmain_def\tmain_example\tmain_meta\tsub_id\tsub_def\tsub_example\tsub_meta\n";
    CHECK_THROWS_WITH_AS(parse_taxonomy(header_only, Domain::CC),
                         doctest::Contains("empty taxonomy"), Error);
    CHECK_THROWS_AS(parse_taxonomy("", Domain::CC), Error);
}

TEST_CASE("malformed rows and identifiers are rejected") {
    std::string header =
        "main_id\tmain_def\tmain_example\tmain_meta\tsub_id\tsub_def\tsub_example\tsub_meta\n";
    CHECK_THROWS_WITH_AS(parse_taxonomy(header + "N1\tonly\tthree\n", Domain::CC),
                         doctest::Contains("expected 8 columns"), Error);
    CHECK_THROWS_WITH_AS(parse_taxonomy(header + "\td\te\tm\tS1\td\te\tm\n", Domain::CC),
                         doctest::Contains("empty identifier"), Error);
    CHECK_THROWS_AS(parse_taxonomy("wrong\theader\n", Domain::CC), Error);
}

TEST_CASE("missing file errors") {
    CHECK_THROWS_WITH_AS(load_taxonomy("/nonexistent/taxonomy.tsv", Domain::CC),
                         doctest::Contains("not found"), Error);
}

TEST_CASE("parent_of resolves ownership") {
    Taxonomy t = tiny_taxonomy();
    CHECK(t.parent_of("S1b") == "N1");
    CHECK(t.parent_of("S2a") == "N2");
    CHECK_THROWS_WITH_AS(t.parent_of("missing"), doctest::Contains("unknown sub-narrative"),
                         Error);
}

TEST_CASE("every sub's parent is an indexed main") {
    Taxonomy t = tiny_taxonomy();
    for (const TaxonomyEntry& e : t.entries()) {
        const std::string& parent = t.parent_of(e.sub_id);
        CHECK(std::find(t.main_ids().begin(), t.main_ids().end(), parent) != t.main_ids().end());
    }
}

TEST_CASE("validate_labelset reports violations as data") {
    Taxonomy t = tiny_taxonomy();
    CHECK(validate_labelset(t, {"N1"}, {"S1a"}).empty());

    auto orphan = validate_labelset(t, {"N2"}, {"S1a"});
    REQUIRE(orphan.size() == 1);
    CHECK(orphan[0].kind == LabelViolation::Kind::OrphanSub);
    CHECK(orphan[0].label == "S1a");

    auto unknown = validate_labelset(t, {"NX"}, {});
    REQUIRE(unknown.size() == 1);
    CHECK(unknown[0].kind == LabelViolation::Kind::UnknownNarrative);

    auto unknown_sub = validate_labelset(t, {"N1"}, {"SX"});
    REQUIRE(unknown_sub.size() == 1);
    CHECK(unknown_sub[0].kind == LabelViolation::Kind::UnknownSub);
}

TEST_CASE("render_taxonomy_block is deterministic and ordered") {
    Taxonomy t = tiny_taxonomy();

    std::string main_block = render_taxonomy_block(t, {"N1"}, LabelLevel::Main);
    CHECK(main_block.find("Label: N1") != std::string::npos);
    CHECK(main_block.find("first narrative definition") != std::string::npos);
    // exactly one definition line for N1 and no other narrative content
    std::size_t first = main_block.find("first narrative definition");
    CHECK(main_block.find("first narrative definition", first + 1) == std::string::npos);
    CHECK(main_block.find("second narrative definition") == std::string::npos);

    std::string two = render_taxonomy_block(t, {"S1a", "S1b"}, LabelLevel::Sub);
    CHECK(two.find("Label: S1a") < two.find("Label: S1b"));

    CHECK(render_taxonomy_block(t, {"N1", "N2"}, LabelLevel::Main) ==
          render_taxonomy_block(t, {"N1", "N2"}, LabelLevel::Main));

    CHECK_THROWS_AS(render_taxonomy_block(t, {"NX"}, LabelLevel::Main), Error);
}

TEST_CASE("load then re-serialize round-trips the row multiset") {
    std::string tsv = tiny_taxonomy_tsv();
    Taxonomy t = parse_taxonomy(tsv, Domain::CC);
    std::string out = taxonomy_to_tsv(t);
    CHECK(out == tsv);

    // reloading the serialized form gives the same rows again
    Taxonomy t2 = parse_taxonomy(out, Domain::CC);
    REQUIRE(t2.entries().size() == t.entries().size());
    std::multiset<std::string> rows1, rows2;
    for (const TaxonomyEntry& e : t.entries()) rows1.insert(e.main_id + "\x1f" + e.sub_id);
    for (const TaxonomyEntry& e : t2.entries()) rows2.insert(e.main_id + "\x1f" + e.sub_id);
    CHECK(rows1 == rows2);
}

TEST_CASE("Other row is accepted as its own main") {
    std::string tsv =
        "main_id\tmain_def\tmain_example\tmain_meta\tsub_id\tsub_def\tsub_example\tsub_meta\n"
        "N1\td\te\tm\tS1a\td\te\tm\n"
        "Other\tAny narrative not covered.\t-\t-\tOther\tAny narrative not covered.\t-\t-\n";
    Taxonomy t = parse_taxonomy(tsv, Domain::CC);
    CHECK(t.has_main("Other"));
    CHECK(t.parent_of("Other") == "Other");
    CHECK(validate_labelset(t, {"Other"}, {"Other"}).empty());
}

TEST_CASE("merge keeps identical shared rows once and rejects conflicts") {
    std::string header =
        "main_id\tmain_def\tmain_example\tmain_meta\tsub_id\tsub_def\tsub_example\tsub_meta\n";
    std::string other_row = "Other\tcatch-all\t-\t-\tOther\tcatch-all\t-\t-\n";
    Taxonomy a = parse_taxonomy(header + "N1\td\te\tm\tS1a\td\te\tm\n" + other_row, Domain::CC);
    Taxonomy b = parse_taxonomy(header + "M1\td\te\tm\tT1a\td\te\tm\n" + other_row, Domain::URW);

    Taxonomy merged = merge_taxonomies(a, b);
    CHECK(merged.has_main("N1"));
    CHECK(merged.has_main("M1"));
    CHECK(merged.subs_of("Other") == std::vector<std::string>{"Other"});

    Taxonomy conflicting =
        parse_taxonomy(header + "Other\tDIFFERENT\t-\t-\tOther\tcatch-all\t-\t-\n", Domain::URW);
    CHECK_THROWS_WITH_AS(merge_taxonomies(a, conflicting),
                         doctest::Contains("conflicting duplicate"), Error);
}

TEST_CASE("labels are trimmed and matched case-sensitively") {
    std::string tsv =
        "main_id\tmain_def\tmain_example\tmain_meta\tsub_id\tsub_def\tsub_example\tsub_meta\n"
        "  N1  \td\te\tm\t  S1a \td\te\tm\n";
    Taxonomy t = parse_taxonomy(tsv, Domain::CC);
    CHECK(t.has_main("N1"));
    CHECK_FALSE(t.has_main("n1"));
    CHECK(t.has_sub("S1a"));
}
