#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "metarev/rouge.hpp"
#include "oracles.hpp"
#include "rouge_pairs.hpp"

using namespace metarev::rouge;
namespace oracle = metarev::testsupport::oracle;

TEST_CASE("tokenize lowercases and splits on non-alphanumeric runs") {
    CHECK(tokenize("The cat-sat.") == std::vector<std::string>{"the", "cat", "sat"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("A  b") == std::vector<std::string>{"a", "b"});
    CHECK(tokenize("  --  ") == std::vector<std::string>{});
    CHECK(tokenize("3 datasets, 12 baselines") ==
          std::vector<std::string>{"3", "datasets", "12", "baselines"});
}

TEST_CASE("porter stemmer matches the classic algorithm on known words") {
    CHECK(porter_stem("caresses") == "caress");
    CHECK(porter_stem("ponies") == "poni");
    CHECK(porter_stem("ties") == "ti");
    CHECK(porter_stem("caress") == "caress");
    CHECK(porter_stem("cats") == "cat");
    CHECK(porter_stem("feed") == "feed");
    CHECK(porter_stem("agreed") == "agre");
    CHECK(porter_stem("plastered") == "plaster");
    CHECK(porter_stem("motoring") == "motor");
    CHECK(porter_stem("sing") == "sing");
    CHECK(porter_stem("troubling") == "troubl");
    CHECK(porter_stem("sized") == "size");
    CHECK(porter_stem("hopping") == "hop");
    CHECK(porter_stem("falling") == "fall");
    CHECK(porter_stem("happy") == "happi");
    CHECK(porter_stem("sky") == "sky");
    CHECK(porter_stem("relational") == "relat");
    CHECK(porter_stem("rational") == "ration");
    CHECK(porter_stem("digitizer") == "digit");
    CHECK(porter_stem("effective") == "effect");
    CHECK(porter_stem("generalization") == "gener");
    CHECK(porter_stem("probate") == "probat");
    CHECK(porter_stem("controll") == "control");
    CHECK(porter_stem("roll") == "roll");
    CHECK(porter_stem("ion") == "ion");
    // Non-letters and short words pass through untouched.
    CHECK(porter_stem("a1b2") == "a1b2");
    CHECK(porter_stem("is") == "is");
}

TEST_CASE("tokenize applies stemming only when enabled") {
    TokenizeOptions stem;
    stem.porter_stemming = true;
    CHECK(tokenize("motoring ponies", stem) == std::vector<std::string>{"motor", "poni"});
    CHECK(tokenize("motoring ponies") == std::vector<std::string>{"motoring", "ponies"});
}

TEST_CASE("rouge_n hand examples") {
    CHECK(rouge_n("the cat sat", "the cat sat", 1).f1 == doctest::Approx(1.0));

    const auto partial = rouge_n("the cat", "the cat sat", 1);
    CHECK(partial.precision == doctest::Approx(1.0));
    CHECK(partial.recall == doctest::Approx(2.0 / 3.0));
    CHECK(partial.f1 == doctest::Approx(0.8));

    CHECK(rouge_n("a b", "c d", 2).f1 == doctest::Approx(0.0));
}

TEST_CASE("rouge_n clips repeated n-grams") {
    // candidate has "the" three times, reference twice: clipped to 2.
    const auto s = rouge_n("the the the", "the the", 1);
    CHECK(s.precision == doctest::Approx(2.0 / 3.0));
    CHECK(s.recall == doctest::Approx(1.0));
}

TEST_CASE("rouge_l hand examples") {
    CHECK(rouge_l("same text here", "same text here").f1 == doctest::Approx(1.0));

    const auto s = rouge_l("a c e", "a b c d e");
    CHECK(s.precision == doctest::Approx(1.0));
    CHECK(s.recall == doctest::Approx(0.6));
    CHECK(s.f1 == doctest::Approx(0.75));

    CHECK(rouge_l("", "x").f1 == doctest::Approx(0.0));
    CHECK(rouge_l("x", "").f1 == doctest::Approx(0.0));
}

TEST_CASE("rouge_suite bundles the three scores") {
    const auto same = rouge_suite("the cat sat", "the cat sat");
    CHECK(same.r1.f1 == doctest::Approx(1.0));
    CHECK(same.r2.f1 == doctest::Approx(1.0));
    CHECK(same.rl.f1 == doctest::Approx(1.0));
    CHECK(same.f1_sum() == doctest::Approx(3.0));

    const auto single = rouge_suite("word", "word");
    CHECK(single.r1.f1 == doctest::Approx(1.0));
    CHECK(single.r2.f1 == doctest::Approx(0.0));  // no bigrams exist
    CHECK(single.rl.f1 == doctest::Approx(1.0));

    const auto disjoint = rouge_suite("a b c", "x y z");
    CHECK(disjoint.f1_sum() == doctest::Approx(0.0));
}

TEST_CASE("scores match the brute-force oracle on the curated pairs") {
    for (const auto& [cand_text, ref_text] : metarev::testsupport::kRougePairs) {
        const auto cand = tokenize(cand_text);
        const auto ref = tokenize(ref_text);
        for (int n : {1, 2, 3}) {
            const auto got = rouge_n_tokens(cand, ref, n);
            const auto want = oracle::rouge_n(cand, ref, n);
            CHECK(got.precision == doctest::Approx(want.precision).epsilon(1e-9));
            CHECK(got.recall == doctest::Approx(want.recall).epsilon(1e-9));
            CHECK(got.f1 == doctest::Approx(want.f1).epsilon(1e-9));
        }
        const auto got_l = rouge_l_tokens(cand, ref);
        const auto want_l = oracle::rouge_l(cand, ref);
        CHECK(got_l.precision == doctest::Approx(want_l.precision).epsilon(1e-9));
        CHECK(got_l.recall == doctest::Approx(want_l.recall).epsilon(1e-9));
        CHECK(got_l.f1 == doctest::Approx(want_l.f1).epsilon(1e-9));
    }
}

namespace {

std::vector<std::string> random_tokens(std::mt19937& rng, std::size_t max_len) {
    static const std::vector<std::string> vocab = {"a", "b", "c", "d", "method", "result",
                                                   "novel", "weak", "clear"};
    std::uniform_int_distribution<std::size_t> len_dist(0, max_len);
    std::uniform_int_distribution<std::size_t> word_dist(0, vocab.size() - 1);
    std::vector<std::string> out(len_dist(rng));
    for (auto& t : out) t = vocab[word_dist(rng)];
    return out;
}

}  // namespace

TEST_CASE("swapping candidate and reference swaps precision/recall, keeps f1") {
    std::mt19937 rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        const auto a = random_tokens(rng, 12);
        const auto b = random_tokens(rng, 12);
        for (int n : {1, 2}) {
            const auto ab = rouge_n_tokens(a, b, n);
            const auto ba = rouge_n_tokens(b, a, n);
            CHECK(ab.precision == doctest::Approx(ba.recall).epsilon(1e-12));
            CHECK(ab.recall == doctest::Approx(ba.precision).epsilon(1e-12));
            CHECK(ab.f1 == doctest::Approx(ba.f1).epsilon(1e-12));
        }
        const auto lab = rouge_l_tokens(a, b);
        const auto lba = rouge_l_tokens(b, a);
        CHECK(lab.f1 == doctest::Approx(lba.f1).epsilon(1e-12));
    }
}

TEST_CASE("scores stay in [0,1] and recall is monotone in matching tokens") {
    std::mt19937 rng(11);
    for (int iter = 0; iter < 200; ++iter) {
        auto cand = random_tokens(rng, 10);
        const auto ref = random_tokens(rng, 10);
        if (ref.empty()) continue;
        const auto before = rouge_n_tokens(cand, ref, 1);
        CHECK(before.precision >= 0.0);
        CHECK(before.precision <= 1.0);
        CHECK(before.recall >= 0.0);
        CHECK(before.recall <= 1.0);
        CHECK(before.f1 >= 0.0);
        CHECK(before.f1 <= 1.0);
        // Appending a token that occurs in the reference never lowers recall.
        cand.push_back(ref.front());
        const auto after = rouge_n_tokens(cand, ref, 1);
        CHECK(after.recall >= before.recall - 1e-12);
    }
}
