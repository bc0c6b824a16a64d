#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "funcsum/errors.hpp"
#include "funcsum/metrics.hpp"

using namespace funcsum;
using namespace funcsum::metrics;

namespace {

const MetricParams kDefaults{};

// Random word sentences with a small vocabulary so duplicates occur.
std::string random_sentence(std::mt19937_64& rng, std::size_t max_words = 12) {
  static const char* kVocab[] = {"opens", "a",    "socket", "file",  "writes", "reads",
                                 "the",   "key",  "value",  "loop",  "sends",  "data"};
  std::size_t n = 1 + rng() % max_words;
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += kVocab[rng() % 12];
  }
  return s;
}

}  // namespace

// ---- tokenization -----------------------------------------------------------

TEST_CASE("sentence tokenization lowercases and splits punctuation") {
  CHECK(tokenize_sentence("Opens a Socket.", kDefaults) ==
        std::vector<std::string>{"opens", "a", "socket", "."});
  CHECK(tokenize_sentence("sub_404018, then exit", kDefaults) ==
        std::vector<std::string>{"sub_404018", ",", "then", "exit"});
  CHECK(tokenize_sentence("", kDefaults).empty());
}

TEST_CASE("stopwords drop out when configured") {
  MetricParams params;
  params.stopwords = {"the", "a"};
  CHECK(tokenize_sentence("the code opens a file", params) ==
        std::vector<std::string>{"code", "opens", "file"});
}

// ---- bleu ---------------------------------------------------------------

TEST_CASE("bleu identity is exactly one") {
  CHECK(bleu("opens a socket", "opens a socket", kDefaults) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bleu one-word zero-overlap pair hits the smoothing floor") {
  // P1 = (0+1)/(1+1), P2..P4 = (0+1)/(0+1); BP = 1 -> 0.5^(1/4)
  const double expected = std::pow(0.5, 0.25);  // = 0.8408964152537145
  CHECK(bleu("cat", "dog", kDefaults) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(bleu("cat", "dog", kDefaults) - 0.8408964152537145) < 1e-12);
}

TEST_CASE("bleu zero-overlap score decreases with equal length") {
  double prev = 2.0;
  for (int len = 1; len <= 30; ++len) {
    std::string cand, ref;
    for (int i = 0; i < len; ++i) {
      if (i) {
        cand += ' ';
        ref += ' ';
      }
      cand += "foo" + std::to_string(i);
      ref += "bar" + std::to_string(i);
    }
    double value = bleu(cand, ref, kDefaults);
    CHECK(value > 0.0);  // the add-one floor never reaches zero
    CHECK(value < prev);
    prev = value;
  }
}

TEST_CASE("bleu empty candidate scores zero") {
  CHECK(bleu("", "reference text", kDefaults) == 0.0);
}

TEST_CASE("bleu brevity penalty punishes short candidates") {
  // candidate "a" vs reference "a b c d": all smoothed precisions are 1,
  // BP = exp(1 - 4/1)
  const double expected = std::exp(1.0 - 4.0);
  CHECK(bleu("a", "a b c d", kDefaults) == doctest::Approx(expected).epsilon(1e-9));
}

// ---- rouge_l ------------------------------------------------------------

TEST_CASE("rouge identity and disjoint") {
  CHECK(rouge_l("writes the key", "writes the key", kDefaults) == doctest::Approx(1.0));
  CHECK(rouge_l("alpha beta", "gamma delta", kDefaults) == 0.0);
  CHECK(rouge_l("", "x", kDefaults) == 0.0);
}

TEST_CASE("rouge hand-computed lcs case is beta independent") {
  // LCS("a b c", "a x c") = 2; P = R = 2/3 -> F = 2/3 for any beta
  CHECK(rouge_l("a b c", "a x c", kDefaults) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  MetricParams params;
  params.rouge_beta = 7.5;
  CHECK(rouge_l("a b c", "a x c", params) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

// ---- meteor -------------------------------------------------------------

TEST_CASE("meteor identity carries the fragmentation penalty") {
  // k matched words in one chunk: 1 - gamma * (1/k)^theta
  CHECK(meteor("a b c d", "a b c d", kDefaults) == doctest::Approx(1.0 - 0.5 / 64.0).epsilon(1e-12));
}

TEST_CASE("meteor disjoint is zero") {
  CHECK(meteor("alpha beta", "gamma delta", kDefaults) == 0.0);
}

TEST_CASE("meteor word order sensitivity") {
  // cand "b a" vs ref "a b": m=2, F=1, chunks=2 -> penalty = gamma
  CHECK(meteor("b a", "a b", kDefaults) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("meteor minimizes chunks over maximal alignments") {
  // cand "a b a", ref "a a b": pairing (0->1)(1->2)(2->0) has 2 chunks,
  // greedy first-fit would find 3. m=3, F=1 -> 1 - 0.5*(2/3)^3 = 23/27.
  CHECK(meteor("a b a", "a a b", kDefaults) == doctest::Approx(23.0 / 27.0).epsilon(1e-12));
}

TEST_CASE("meteor handles surplus candidate occurrences") {
  // cand "a x a", ref "a": m=1, P=1/3, R=1, F=(10/3)/(1+3) = 5/6,
  // chunks=1 -> penalty=0.5 -> 5/12
  CHECK(meteor("a x a", "a", kDefaults) == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
}

TEST_CASE("meteor synonym classes match across surface forms") {
  MetricParams params;
  params.synonyms = {{"opens", "open"}, {"opening", "open"}};
  CHECK(meteor("opening file", "opens file", params) ==
        doctest::Approx(meteor("opens file", "opens file", params)).epsilon(1e-12));
}

// ---- struc and score labels ----------------------------------------------

TEST_CASE("struc is the exact arithmetic mean") {
  const char* cand = "writes the key value";
  const char* ref = "writes a key";
  const double expected =
      (bleu(cand, ref, kDefaults) + rouge_l(cand, ref, kDefaults) + meteor(cand, ref, kDefaults)) /
      3.0;
  CHECK(struc(cand, ref, kDefaults) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("struc of disjoint long sentences stays under 0.2") {
  std::string cand, ref;
  for (int i = 0; i < 10; ++i) {
    if (i) {
      cand += ' ';
      ref += ' ';
    }
    cand += "foo" + std::to_string(i);
    ref += "bar" + std::to_string(i);
  }
  // only the BLEU smoothing floor contributes: ((1/11)(1/10)(1/9)(1/8))^(1/4) / 3
  const double floor = std::pow(1.0 / 7920.0, 0.25);
  CHECK(struc(cand, ref, kDefaults) == doctest::Approx(floor / 3.0).epsilon(1e-9));
  CHECK(struc(cand, ref, kDefaults) < 0.2);
}

TEST_CASE("struc of empty candidate is zero") { CHECK(struc("", "anything", kDefaults) == 0.0); }

TEST_CASE("score label formula") {
  CHECK(score_from_struc(1.0, Polarity::Positive, kDefaults) == 1.0);
  CHECK(score_from_struc(0.0, Polarity::Negative, kDefaults) == 0.0);
  CHECK(score_from_struc(0.5, Polarity::Positive, kDefaults) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(score_from_struc(0.0, Polarity::Positive, kDefaults) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("score label separation is exactly p for fixed sentences") {
  std::mt19937_64 rng(71);
  for (int i = 0; i < 200; ++i) {
    const std::string a = random_sentence(rng), b = random_sentence(rng);
    const double pos = score_label(a, b, Polarity::Positive, kDefaults);
    const double neg = score_label(a, b, Polarity::Negative, kDefaults);
    CHECK(std::abs((pos - neg) - kDefaults.p_semantic) < 1e-12);
    CHECK(pos >= kDefaults.p_semantic);
    CHECK(pos <= 1.0);
    CHECK(neg >= 0.0);
    CHECK(neg <= 1.0 - kDefaults.p_semantic + 1e-12);
  }
}

// ---- properties across all metrics ----------------------------------------

TEST_CASE("all metrics stay in [0,1] on random pairs") {
  std::mt19937_64 rng(91);
  for (int i = 0; i < 2000; ++i) {
    const std::string a = random_sentence(rng), b = random_sentence(rng);
    for (double v : {bleu(a, b, kDefaults), rouge_l(a, b, kDefaults), meteor(a, b, kDefaults),
                     struc(a, b, kDefaults)}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("identities hold for random sentences") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 300; ++i) {
    const std::string s = random_sentence(rng);
    const double k = static_cast<double>(tokenize_sentence(s, kDefaults).size());
    CHECK(std::abs(bleu(s, s, kDefaults) - 1.0) < 1e-9);
    CHECK(std::abs(rouge_l(s, s, kDefaults) - 1.0) < 1e-9);
    const double expected_meteor = 1.0 - 0.5 * std::pow(1.0 / k, 3.0);
    CHECK(std::abs(meteor(s, s, kDefaults) - expected_meteor) < 1e-9);
  }
}

// ---- bias probe -----------------------------------------------------------

TEST_CASE("bias probe grid matches its corner and shows the bias") {
  auto grid = bleu_bias_probe(30);
  REQUIRE(grid.size() == 900);
  CHECK(grid[0].cand_len == 1);
  CHECK(grid[0].ref_len == 1);
  CHECK(std::abs(grid[0].bleu - std::pow(0.5, 0.25)) < 1e-9);

  bool above_03 = false;
  double prev_diag = 2.0;
  for (const auto& cell : grid) {
    if (cell.bleu > 0.3) above_03 = true;
    if (cell.cand_len == cell.ref_len) {
      CHECK(cell.bleu <= prev_diag + 1e-15);
      prev_diag = cell.bleu;
    }
  }
  CHECK(above_03);
}

// ---- params validation ------------------------------------------------------

TEST_CASE("parameter validation") {
  MetricParams params;
  params.p_semantic = 1.0;
  CHECK_THROWS_AS(params.validate(), ValidationError);
  params = MetricParams{};
  params.bleu_max_n = 0;
  CHECK_THROWS_AS(params.validate(), ValidationError);
  params = MetricParams{};
  params.meteor_gamma = -1.0;
  CHECK_THROWS_AS(params.validate(), ValidationError);
}

// ---- corpus evaluation ------------------------------------------------------

TEST_CASE("evaluate_corpus means and variances") {
  std::map<std::string, std::string> refs{{"a", "x y z"}, {"b", "p q r"}};
  std::vector<std::pair<std::string, std::string>> candidates{{"a", "x y z"}, {"b", "u v w"}};
  auto report = evaluate_corpus(candidates, refs, kDefaults);
  REQUIRE(report.per_function.size() == 2);
  // rouge values are {1.0, 0.0} -> mean 0.5, population variance 0.25
  CHECK(report.mean.rouge_l == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.variance.rouge_l == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(report.avg_summary_words == doctest::Approx(3.0));
  CHECK(report.unmatched.empty());
  for (const auto& entry : report.per_function) {
    const auto& r = entry.report;
    CHECK(std::abs(r.struc - (r.bleu + r.rouge_l + r.meteor) / 3.0) < 1e-12);
  }
}

TEST_CASE("evaluate_corpus single pair has zero variance") {
  std::map<std::string, std::string> refs{{"a", "x y z"}};
  auto report = evaluate_corpus({{"a", "x y w"}}, refs, kDefaults);
  CHECK(report.variance.bleu == 0.0);
  CHECK(report.variance.struc == 0.0);
}

TEST_CASE("evaluate_corpus lists unmatched ids and rejects empty overlap") {
  std::map<std::string, std::string> refs{{"known", "x"}};
  auto report = evaluate_corpus({{"known", "x"}, {"stray", "y"}}, refs, kDefaults);
  CHECK(report.unmatched == std::vector<std::string>{"stray"});
  CHECK_THROWS_AS(evaluate_corpus({{"other", "x"}}, refs, kDefaults), ValidationError);
}

TEST_CASE("pit normalizer maps through the empirical cdf") {
  PitNormalizer pit;
  pit.fit({0.1, 0.2, 0.3});
  CHECK(pit.transform(0.05) == doctest::Approx(0.0));
  CHECK(pit.transform(0.15) == doctest::Approx(1.0 / 3.0));
  CHECK(pit.transform(0.2) == doctest::Approx(2.0 / 3.0));
  CHECK(pit.transform(0.9) == doctest::Approx(1.0));
}

TEST_CASE("pit-normalized reports keep struc as the mean") {
  std::map<std::string, std::string> refs{{"a", "x y z"}, {"b", "p q r"}, {"c", "k l m"}};
  std::vector<std::pair<std::string, std::string>> candidates{
      {"a", "x y z"}, {"b", "p q m"}, {"c", "z z z"}};
  auto report = evaluate_corpus(candidates, refs, kDefaults, /*pit_normalize=*/true);
  for (const auto& entry : report.per_function) {
    const auto& r = entry.report;
    CHECK(r.bleu >= 0.0);
    CHECK(r.bleu <= 1.0);
    CHECK(std::abs(r.struc - (r.bleu + r.rouge_l + r.meteor) / 3.0) < 1e-12);
  }
}
