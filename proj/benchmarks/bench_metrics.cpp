#include <benchmark/benchmark.h>

#include <random>
#include <sstream>
#include <vector>

#include "metarev/agreement.hpp"
#include "metarev/metrics.hpp"
#include "metarev/rouge.hpp"

using namespace metarev;

namespace {

std::string synthetic_text(std::mt19937& rng, std::size_t words) {
    static const char* vocab[] = {"the",      "method",  "results", "novel",   "evaluation",
                                  "baseline", "clarity", "strong",  "weak",    "analysis",
                                  "sound",    "limited", "dataset", "metrics", "review"};
    std::uniform_int_distribution<std::size_t> pick(0, std::size(vocab) - 1);
    std::ostringstream os;
    for (std::size_t i = 0; i < words; ++i) {
        if (i) os << ' ';
        os << vocab[pick(rng)];
    }
    return os.str();
}

std::vector<Judgement> synthetic_judgements(std::mt19937& rng, std::size_t n) {
    std::uniform_int_distribution<int> facet(0, 5);
    std::uniform_int_distribution<int> level(0, 3);
    std::vector<Judgement> out(n);
    for (auto& j : out) {
        j.facet = kAllFacets[static_cast<std::size_t>(facet(rng))];
        j.level = kAllLevels[static_cast<std::size_t>(level(rng))];
        j.content_expression = synthetic_text(rng, 4);
        j.sentiment_expression = synthetic_text(rng, 2);
        j.judgement_sentence = j.content_expression + " is " + j.sentiment_expression + ".";
    }
    return out;
}

void BM_RougeSuite(benchmark::State& state) {
    std::mt19937 rng(1);
    const std::string cand = synthetic_text(rng, static_cast<std::size_t>(state.range(0)));
    const std::string ref = synthetic_text(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rouge::rouge_suite(cand, ref));
    }
}
BENCHMARK(BM_RougeSuite)->Arg(50)->Arg(200)->Arg(800);

void BM_RougeSuiteStemmed(benchmark::State& state) {
    std::mt19937 rng(1);
    const std::string cand = synthetic_text(rng, 200);
    const std::string ref = synthetic_text(rng, 200);
    rouge::TokenizeOptions opts;
    opts.porter_stemming = true;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rouge::rouge_suite(cand, ref, opts));
    }
}
BENCHMARK(BM_RougeSuiteStemmed);

void BM_CohensKappa(benchmark::State& state) {
    std::mt19937 rng(2);
    std::uniform_int_distribution<int> label(0, 3);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = label(rng);
        b[i] = rng() % 3 ? a[i] : label(rng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(agreement::cohens_kappa(a, b));
    }
}
BENCHMARK(BM_CohensKappa)->Arg(1000)->Arg(100000);

void BM_KrippendorffAlpha(benchmark::State& state) {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> label(0, 3);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<agreement::LabelPair> units(n);
    for (auto& u : units) {
        const int a = label(rng);
        u = {a, rng() % 3 ? a : label(rng)};
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(agreement::krippendorff_alpha(units));
    }
}
BENCHMARK(BM_KrippendorffAlpha)->Arg(1000)->Arg(100000);

void BM_AlignJudgements(benchmark::State& state) {
    std::mt19937 rng(4);
    const auto a = synthetic_judgements(rng, static_cast<std::size_t>(state.range(0)));
    const auto b = synthetic_judgements(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(agreement::align_judgements(a, b));
    }
}
BENCHMARK(BM_AlignJudgements)->Arg(10)->Arg(50);

void BM_FacetEval(benchmark::State& state) {
    std::mt19937 rng(5);
    const auto a = synthetic_judgements(rng, static_cast<std::size_t>(state.range(0)));
    const auto b = synthetic_judgements(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(metrics::facet_eval(a, b));
    }
}
BENCHMARK(BM_FacetEval)->Arg(10)->Arg(1000);

void BM_PorterStem(benchmark::State& state) {
    const std::vector<std::string> words = {"generalization", "relational",  "troubling",
                                            "caresses",       "effective",   "hopping",
                                            "digitizer",      "conditional", "probabilistic"};
    for (auto _ : state) {
        for (const auto& w : words) {
            benchmark::DoNotOptimize(rouge::porter_stem(w));
        }
    }
}
BENCHMARK(BM_PorterStem);

}  // namespace

BENCHMARK_MAIN();
