#include "narrlens/evaluation.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace narrlens;
using namespace narrlens::testutil;

namespace {

using LabelSets = std::vector<std::vector<std::string>>;

std::string random_text(std::mt19937_64& rng, std::size_t min_words = 2,
                        std::size_t max_words = 10) {
    static const char* pool[] = {"river", "bank",  "storm",  "quiet", "march", "paper",
                                 "stone", "light", "winter", "crane", "field", "seven"};
    std::size_t n = min_words + rng() % (max_words - min_words + 1);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) words.push_back(pool[rng() % 12]);
    return join(words, " ");
}

// Exhaustive pairwise-cosine oracle for the greedy match.
GenScoreRow greedy_oracle(const std::string& cand, const std::string& ref, Embedder& e) {
    std::vector<std::string> ct = whitespace_tokenize(cand);
    std::vector<std::string> rt = whitespace_tokenize(ref);
    auto best_of = [&e](const std::vector<std::string>& from, const std::vector<std::string>& to) {
        double sum = 0.0;
        for (const std::string& f : from) {
            double best = -2.0;
            EmbeddingVector fv = e.embed_one(f);
            for (const std::string& t : to) {
                best = std::max(best, cosine(fv, e.embed_one(t)));
            }
            sum += best;
        }
        return sum / static_cast<double>(from.size());
    };
    GenScoreRow row;
    row.recall = best_of(rt, ct);
    row.precision = best_of(ct, rt);
    row.f1 = (row.precision > 0 && row.recall > 0)
                 ? 2 * row.precision * row.recall / (row.precision + row.recall)
                 : 0.0;
    row.count = 1;
    return row;
}

GoldAnnotation ann(std::string id, std::vector<std::string> narratives,
                   std::vector<std::string> subs) {
    return GoldAnnotation{std::move(id), std::move(narratives), std::move(subs)};
}

} // namespace

TEST_CASE("f1_samples conventions and arithmetic") {
    // perfect predictions
    PrfRow row = f1_samples({{"A"}, {"B", "C"}}, {{"A"}, {"B", "C"}});
    CHECK(row.f1 == doctest::Approx(1.0));
    CHECK(row.precision == doctest::Approx(1.0));
    CHECK(row.recall == doctest::Approx(1.0));

    // half overlap: P = R = F1 = 0.5
    row = f1_samples({{"A", "B"}}, {{"A", "C"}});
    CHECK(row.precision == doctest::Approx(0.5));
    CHECK(row.recall == doctest::Approx(0.5));
    CHECK(row.f1 == doctest::Approx(0.5));

    // stated conventions for empty sets
    CHECK(f1_samples({{}}, {{}}).f1 == doctest::Approx(1.0));
    CHECK(f1_samples({{"A"}}, {{}}).f1 == doctest::Approx(0.0));
    CHECK(f1_samples({{}}, {{"A"}}).f1 == doctest::Approx(0.0));

    CHECK_THROWS_AS(f1_samples({{}}, {{}, {}}), Error);
}

TEST_CASE("f1_samples is permutation invariant") {
    std::mt19937_64 rng(8);
    LabelSets preds, golds;
    for (int i = 0; i < 20; ++i) {
        std::vector<std::string> p, g;
        for (int k = 0; k < 4; ++k) {
            if (rng() % 2) p.push_back("L" + std::to_string(rng() % 6));
            if (rng() % 2) g.push_back("L" + std::to_string(rng() % 6));
        }
        preds.push_back(p);
        golds.push_back(g);
    }
    PrfRow base = f1_samples(preds, golds);
    std::vector<std::size_t> order(preds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    deterministic_shuffle(order, rng);
    LabelSets preds2, golds2;
    for (std::size_t i : order) {
        preds2.push_back(preds[i]);
        golds2.push_back(golds[i]);
    }
    PrfRow shuffled = f1_samples(preds2, golds2);
    CHECK(base.precision == doctest::Approx(shuffled.precision).epsilon(1e-12));
    CHECK(base.recall == doctest::Approx(shuffled.recall).epsilon(1e-12));
    CHECK(base.f1 == doctest::Approx(shuffled.f1).epsilon(1e-12));
}

TEST_CASE("adding a correct label never decreases recall") {
    std::mt19937_64 rng(9);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<std::string> gold = {"A", "B", "C"};
        std::vector<std::string> pred;
        for (const char* l : {"A", "B", "C", "D"}) {
            if (rng() % 2) pred.push_back(l);
        }
        PrfRow before = f1_samples({pred}, {gold});
        // add one missing correct label, if any
        std::vector<std::string> extended = pred;
        for (const std::string& l : gold) {
            if (std::find(pred.begin(), pred.end(), l) == pred.end()) {
                extended.push_back(l);
                break;
            }
        }
        PrfRow after = f1_samples({extended}, {gold});
        CHECK(after.recall >= before.recall - 1e-12);
    }
}

TEST_CASE("micro and macro averaging modes") {
    LabelSets preds = {{"A"}, {"A", "B"}};
    LabelSets golds = {{"A", "B"}, {"B"}};
    // micro: TP=2 (A@1, B@2), FP=1 (A@2), FN=1 (B@1)
    PrfRow micro = f1_score(preds, golds, Averaging::Micro);
    CHECK(micro.precision == doctest::Approx(2.0 / 3.0));
    CHECK(micro.recall == doctest::Approx(2.0 / 3.0));
    // macro over labels A and B
    PrfRow macro = f1_score(preds, golds, Averaging::Macro);
    // A: P=1/2, R=1/1; B: P=1/1, R=1/2
    CHECK(macro.precision == doctest::Approx(0.75));
    CHECK(macro.recall == doctest::Approx(0.75));
}

TEST_CASE("greedy match identity scores one") {
    DeterministicEmbedder e(48);
    std::mt19937_64 rng(77);
    for (int iter = 0; iter < 100; ++iter) {
        std::string text = random_text(rng);
        GenScoreRow row = greedy_match_score(text, text, e);
        CHECK(row.precision == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(row.recall == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(row.f1 == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("greedy match precision of (a,b) equals recall of (b,a)") {
    DeterministicEmbedder e(48);
    std::mt19937_64 rng(78);
    for (int iter = 0; iter < 100; ++iter) {
        std::string a = random_text(rng);
        std::string b = random_text(rng);
        GenScoreRow ab = greedy_match_score(a, b, e);
        GenScoreRow ba = greedy_match_score(b, a, e);
        CHECK(std::abs(ab.precision - ba.recall) < 1e-9);
        CHECK(std::abs(ab.recall - ba.precision) < 1e-9);
    }
}

TEST_CASE("greedy match equals the exhaustive pairwise oracle") {
    DeterministicEmbedder e(64);
    std::string cand = "the river bank froze over in winter";
    std::string ref = "the bank of the river froze during the long winter";
    GenScoreRow got = greedy_match_score(cand, ref, e);
    GenScoreRow expected = greedy_oracle(cand, ref, e);
    CHECK(got.precision == doctest::Approx(expected.precision).epsilon(1e-12));
    CHECK(got.recall == doctest::Approx(expected.recall).epsilon(1e-12));
    CHECK(got.f1 == doctest::Approx(expected.f1).epsilon(1e-12));

    // f1 never exceeds max(p, r); p and r stay in cosine bounds
    std::mt19937_64 rng(79);
    for (int iter = 0; iter < 50; ++iter) {
        GenScoreRow row = greedy_match_score(random_text(rng), random_text(rng), e);
        CHECK(row.f1 <= std::max(row.precision, row.recall) + 1e-12);
        CHECK(row.precision <= 1.0 + 1e-9);
        CHECK(row.recall <= 1.0 + 1e-9);
        CHECK(row.precision >= -1.0 - 1e-9);
        CHECK(row.recall >= -1.0 - 1e-9);
    }

    CHECK_THROWS_AS(greedy_match_score("", "x", e), Error);
    CHECK_THROWS_AS(greedy_match_score("x", "  ", e), Error);
}

TEST_CASE("report splits by gold domain prefixes") {
    std::vector<GoldAnnotation> golds = {
        ann("a1.txt", {"CC: X"}, {"CC: X sub"}),
        ann("a2.txt", {"URW: Y"}, {"URW: Y sub"}),
        ann("a3.txt", {"Other"}, {"Other"}),
    };
    std::vector<GoldAnnotation> preds = {
        ann("a1.txt", {"CC: X"}, {"CC: X sub"}),
        ann("a2.txt", {"URW: Z"}, {"URW: Y sub"}),
        ann("a3.txt", {"Other"}, {"Other"}),
    };
    F1Report r = build_f1_report(preds, golds, Averaging::Samples);
    CHECK(r.article_count == 3);
    CHECK(r.narrative_cc.count == 1);
    CHECK(r.narrative_urw.count == 1);
    CHECK(r.narrative_overall.count == 3); // unknown-domain article counts overall
    CHECK(r.narrative_cc.f1 == doctest::Approx(1.0));
    CHECK(r.narrative_urw.f1 == doctest::Approx(0.0));
    CHECK(r.narrative_overall.f1 == doctest::Approx(2.0 / 3.0));
    CHECK(r.sub_overall.f1 == doctest::Approx(1.0));
}

TEST_CASE("perfect single run compares to all ones") {
    std::vector<GoldAnnotation> golds = {
        ann("a1.txt", {"CC: X"}, {"CC: X sub"}),
        ann("a2.txt", {"URW: Y"}, {"URW: Y sub"}),
    };
    RunComparison cmp = compare_runs({{"perfect", golds}}, golds, Averaging::Samples);
    REQUIRE(cmp.run_names == std::vector<std::string>{"perfect"});
    for (const auto& row : cmp.f1) {
        for (double v : row) CHECK(v == doctest::Approx(1.0));
    }
}

TEST_CASE("a dominating run scores at least as high everywhere") {
    std::vector<GoldAnnotation> golds = {
        ann("a1.txt", {"CC: X", "CC: Y"}, {"CC: X sub"}),
        ann("a2.txt", {"URW: Y"}, {"URW: Y sub"}),
        ann("a3.txt", {"CC: X"}, {"CC: X sub"}),
    };
    // run B predicts gold exactly; run A misses labels
    std::vector<GoldAnnotation> worse = {
        ann("a1.txt", {"CC: X"}, {}),
        ann("a2.txt", {}, {"URW: Y sub"}),
        ann("a3.txt", {"CC: X"}, {"CC: X sub"}),
    };
    RunComparison cmp =
        compare_runs({{"A", worse}, {"B", golds}}, golds, Averaging::Samples);
    for (std::size_t m = 0; m < cmp.metric_names.size(); ++m) {
        CHECK(cmp.f1[m][1] >= cmp.f1[m][0] - 1e-12);
    }
}

TEST_CASE("mismatched ids across runs error") {
    std::vector<GoldAnnotation> golds = {ann("a1.txt", {"CC: X"}, {})};
    std::vector<GoldAnnotation> other = {ann("b9.txt", {"CC: X"}, {})};
    CHECK_THROWS_WITH_AS(compare_runs({{"bad", other}}, golds, Averaging::Samples),
                         doctest::Contains("different article ids"), Error);
}

TEST_CASE("report serializations carry all six metric rows") {
    std::vector<GoldAnnotation> golds = {ann("a1.txt", {"CC: X"}, {"CC: X sub"})};
    F1Report r = build_f1_report(golds, golds, Averaging::Samples);
    std::string tsv = f1_report_to_tsv(r);
    for (const char* row : {"Narrative CC", "Narrative URW", "Narrative Overall",
                            "Sub Narrative CC", "Sub Narrative URW", "Sub Narrative Overall"}) {
        CHECK(tsv.find(row) != std::string::npos);
    }
    std::string js = f1_report_to_json(r);
    CHECK(js.find("\"narrative\"") != std::string::npos);
    CHECK(js.find("\"sub_narrative\"") != std::string::npos);
}
