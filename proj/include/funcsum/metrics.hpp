#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace funcsum::metrics {

// Knobs for the similarity metrics and the score-label construction.
// bleu n-gram weights are uniform 1/bleu_max_n.
struct MetricParams {
  int bleu_max_n = 4;
  double rouge_beta = 1.2;     // recall weight in the ROUGE-L F measure
  double meteor_beta = 3.0;    // recall weight in the METEOR F-mean
  double meteor_gamma = 0.5;   // fragmentation penalty scale
  double meteor_theta = 3.0;   // fragmentation penalty exponent
  double p_semantic = 0.2;     // semantic share of the score label

  // Optional: dropped from sentences before scoring.
  std::set<std::string> stopwords;
  // Optional: maps words to a shared class id; METEOR matches words whose
  // classes agree, so a synonym table can stand in for stem/WordNet stages.
  std::map<std::string, std::string> synonyms;

  void validate() const;  // throws ValidationError on out-of-range values
};

// Lowercases and splits on whitespace and punctuation boundaries.
// Runs of [a-z0-9_] form word tokens; any other visible character is a
// one-character token. Stopwords (if configured) are removed afterwards.
std::vector<std::string> tokenize_sentence(std::string_view text, const MetricParams& params);

// BLEU with add-one smoothed n-gram precisions and the standard brevity
// penalty. Empty candidate scores 0. Note the smoothing floor: disjoint
// sentences still score > 0, increasingly so the shorter they are.
double bleu(std::string_view candidate, std::string_view reference, const MetricParams& params);

// ROUGE-L: LCS-based F measure weighted toward recall by rouge_beta^2.
double rouge_l(std::string_view candidate, std::string_view reference, const MetricParams& params);

// METEOR restricted to exact unigram matching (plus the optional synonym
// table). Alignments maximize matches, then minimize chunks.
double meteor(std::string_view candidate, std::string_view reference, const MetricParams& params);

// Arithmetic mean of bleu, rouge_l, and meteor.
double struc(std::string_view candidate, std::string_view reference, const MetricParams& params);

enum class Polarity { Positive, Negative };

// Score label given a structural similarity s_f in [0,1]:
//   Positive -> p + (1-p)*s_f      Negative -> (1-p)*s_f
// For a fixed s_f the two labels are separated by exactly p.
double score_from_struc(double s_f, Polarity polarity, const MetricParams& params);

// score_from_struc applied to struc(s_g, s_r).
double score_label(std::string_view s_g, std::string_view s_r, Polarity polarity,
                   const MetricParams& params);

// BLEU over zero-overlap sentence pairs for every length combination in
// [1, max_len]^2; the grid behind the short-sentence bias analysis.
struct BiasProbeCell {
  int cand_len;
  int ref_len;
  double bleu;
};
std::vector<BiasProbeCell> bleu_bias_probe(int max_len, const MetricParams& params = {});

// Per-pair metric bundle. struc is kept the exact arithmetic mean of the
// other three. score_label is only populated where a polarity is known.
struct MetricReport {
  double bleu = 0.0;
  double rouge_l = 0.0;
  double meteor = 0.0;
  double struc = 0.0;
  std::optional<double> score_label;
};

MetricReport score_pair(std::string_view candidate, std::string_view reference,
                        const MetricParams& params);

// Empirical probability-integral transform: maps a value through the CDF
// of a fitted sample, yielding approximately uniform [0,1] scores.
class PitNormalizer {
 public:
  void fit(std::vector<double> sample);
  double transform(double value) const;
  bool fitted() const { return !sorted_.empty(); }

 private:
  std::vector<double> sorted_;
};

struct EvaluationEntry {
  std::string id;
  MetricReport report;
};

struct CorpusReport {
  std::vector<EvaluationEntry> per_function;
  MetricReport mean;
  MetricReport variance;  // population variance
  double avg_summary_words = 0.0;
  std::vector<std::string> unmatched;  // candidate ids with no reference
};

// Scores every (candidate, reference) pair matched by id. Candidates
// without a reference are listed in unmatched, not fatal; an empty
// intersection throws ValidationError. With pit_normalize the three
// metrics are replaced by their empirical-CDF transforms (struc stays
// their mean).
CorpusReport evaluate_corpus(const std::vector<std::pair<std::string, std::string>>& candidates,
                             const std::map<std::string, std::string>& references,
                             const MetricParams& params, bool pit_normalize = false);

}  // namespace funcsum::metrics
