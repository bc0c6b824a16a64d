#include "funcsum/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "funcsum/errors.hpp"

namespace funcsum::metrics {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

using Tokens = std::vector<std::string>;

// n-gram counts keyed by tokens joined with an unprintable separator.
std::unordered_map<std::string, int> ngram_counts(const Tokens& tokens, int n) {
  std::unordered_map<std::string, int> counts;
  if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

// ---- METEOR alignment ------------------------------------------------------
//
// The match count is forced: m = sum over words of min(candidate count,
// reference count). Which occurrences pair up is not, and the fragmentation
// penalty depends on it, so we search for the pairing with the fewest
// chunks. Branch and bound over candidate positions with a greedy initial
// bound; a node cap keeps adversarial inputs bounded (the greedy answer is
// already a valid maximal alignment).

struct AlignmentProblem {
  const std::vector<int>& cand;           // word class ids per candidate position
  const std::vector<int>& ref;            // word class ids per reference position
  std::vector<int> quota;                 // per class: matches still to place
  std::vector<int> cand_left;             // per class: candidate occurrences at >= i
  std::vector<std::vector<int>> ref_pos;  // per class: reference positions, ascending
};

struct SearchState {
  std::vector<bool> used_ref;
  int best = 0;
  long nodes = 0;
  static constexpr long kNodeCap = 200000;
};

// chunks so far, position of last matched candidate token, last matched ref.
void search(AlignmentProblem& p, SearchState& s, std::size_t i, int chunks, int last_cand,
            int last_ref) {
  if (chunks >= s.best) return;  // can only grow
  if (++s.nodes > SearchState::kNodeCap) return;
  if (i == p.cand.size()) {
    s.best = chunks;  // strictly better by the guard above
    return;
  }
  int cls = p.cand[i];
  --p.cand_left[cls];
  // Try matching this occurrence; contiguous continuation first so good
  // alignments are found early.
  if (p.quota[cls] > 0) {
    const auto& positions = p.ref_pos[cls];
    auto try_ref = [&](int j) {
      bool contiguous = last_cand == static_cast<int>(i) - 1 && j == last_ref + 1;
      s.used_ref[j] = true;
      --p.quota[cls];
      search(p, s, i + 1, chunks + (contiguous ? 0 : 1), static_cast<int>(i), j);
      ++p.quota[cls];
      s.used_ref[j] = false;
    };
    if (last_cand == static_cast<int>(i) - 1 && last_ref + 1 < static_cast<int>(p.ref.size()) &&
        p.ref[last_ref + 1] == cls && !s.used_ref[last_ref + 1]) {
      try_ref(last_ref + 1);
    }
    for (int j : positions) {
      if (s.used_ref[j]) continue;
      if (last_cand == static_cast<int>(i) - 1 && j == last_ref + 1) continue;  // done above
      try_ref(j);
    }
  }
  // Skip this occurrence if the quota can still be met by later ones.
  if (p.cand_left[cls] >= p.quota[cls]) {
    search(p, s, i + 1, chunks, last_cand, last_ref);
  }
  ++p.cand_left[cls];
}

// Greedy maximal alignment: prefer extending the current chunk, otherwise
// the earliest free reference slot. Returns its chunk count.
int greedy_chunks(const AlignmentProblem& base) {
  AlignmentProblem p = base;
  std::vector<bool> used(p.ref.size(), false);
  int chunks = 0, last_cand = -2, last_ref = -2;
  for (std::size_t i = 0; i < p.cand.size(); ++i) {
    int cls = p.cand[i];
    --p.cand_left[cls];
    if (p.quota[cls] == 0) continue;
    if (p.cand_left[cls] >= p.quota[cls]) {
      // Surplus occurrence: only match it when it extends the run.
      bool extends = last_cand == static_cast<int>(i) - 1 &&
                     last_ref + 1 < static_cast<int>(p.ref.size()) &&
                     p.ref[last_ref + 1] == cls && !used[last_ref + 1];
      if (!extends) continue;
    }
    int chosen = -1;
    if (last_cand == static_cast<int>(i) - 1 && last_ref + 1 < static_cast<int>(p.ref.size()) &&
        p.ref[last_ref + 1] == cls && !used[last_ref + 1]) {
      chosen = last_ref + 1;
    } else {
      for (int j : p.ref_pos[cls]) {
        if (!used[j]) {
          chosen = j;
          break;
        }
      }
    }
    if (chosen < 0) continue;
    used[chosen] = true;
    --p.quota[cls];
    chunks += (last_cand == static_cast<int>(i) - 1 && chosen == last_ref + 1) ? 0 : 1;
    last_cand = static_cast<int>(i);
    last_ref = chosen;
  }
  return chunks;
}

struct MeteorAlignment {
  int matches = 0;
  int chunks = 0;
};

MeteorAlignment align_unigrams(const Tokens& cand_words, const Tokens& ref_words) {
  // Intern word classes.
  std::unordered_map<std::string, int> class_of;
  auto intern = [&](const std::string& w) {
    auto [it, _] = class_of.emplace(w, static_cast<int>(class_of.size()));
    return it->second;
  };
  std::vector<int> cand, ref;
  cand.reserve(cand_words.size());
  ref.reserve(ref_words.size());
  for (const auto& w : cand_words) cand.push_back(intern(w));
  for (const auto& w : ref_words) ref.push_back(intern(w));

  int classes = static_cast<int>(class_of.size());
  std::vector<int> cand_count(classes, 0), ref_count(classes, 0);
  for (int c : cand) ++cand_count[c];
  for (int r : ref) ++ref_count[r];

  MeteorAlignment result;
  std::vector<int> quota(classes, 0);
  for (int c = 0; c < classes; ++c) {
    quota[c] = std::min(cand_count[c], ref_count[c]);
    result.matches += quota[c];
  }
  if (result.matches == 0) return result;

  std::vector<std::vector<int>> ref_pos(classes);
  for (std::size_t j = 0; j < ref.size(); ++j) ref_pos[ref[j]].push_back(static_cast<int>(j));

  AlignmentProblem problem{cand, ref, quota, cand_count, std::move(ref_pos)};
  SearchState state;
  state.used_ref.assign(ref.size(), false);
  state.best = greedy_chunks(problem);
  if (state.best > 1) search(problem, state, 0, 0, -2, -2);  // never worsens the bound
  result.chunks = state.best;
  return result;
}

std::size_t whitespace_words(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char c : text) {
    bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

}  // namespace

void MetricParams::validate() const {
  if (bleu_max_n < 1) throw ValidationError("bleu_max_n must be >= 1");
  if (rouge_beta <= 0 || meteor_beta <= 0 || meteor_gamma <= 0 || meteor_theta <= 0)
    throw ValidationError("metric parameters must be strictly positive");
  if (p_semantic <= 0.0 || p_semantic >= 1.0)
    throw ValidationError("p_semantic must lie in (0, 1)");
}

std::vector<std::string> tokenize_sentence(std::string_view text, const MetricParams& params) {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) {
      if (!params.stopwords.count(word)) tokens.push_back(word);
      word.clear();
    }
  };
  for (char raw : text) {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
    if (is_word_char(c)) {
      word += c;
    } else {
      flush();
      if (!std::isspace(static_cast<unsigned char>(c)))
        tokens.push_back(std::string(1, c));
    }
  }
  flush();
  return tokens;
}

double bleu(std::string_view candidate, std::string_view reference, const MetricParams& params) {
  const Tokens cand = tokenize_sentence(candidate, params);
  const Tokens ref = tokenize_sentence(reference, params);
  if (cand.empty()) return 0.0;

  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);

  double log_sum = 0.0;
  const double weight = 1.0 / params.bleu_max_n;
  for (int n = 1; n <= params.bleu_max_n; ++n) {
    auto cand_ngrams = ngram_counts(cand, n);
    auto ref_ngrams = ngram_counts(ref, n);
    long total = 0, matched = 0;
    for (const auto& [gram, count] : cand_ngrams) {
      total += count;
      auto it = ref_ngrams.find(gram);
      if (it != ref_ngrams.end()) matched += std::min(count, it->second);
    }
    // Add-one smoothing keeps the precision positive when nothing overlaps;
    // the price is a floor that inflates short-sentence scores.
    const double precision = (static_cast<double>(matched) + 1.0) / (static_cast<double>(total) + 1.0);
    log_sum += weight * std::log(precision);
  }
  return bp * std::exp(log_sum);
}

double rouge_l(std::string_view candidate, std::string_view reference, const MetricParams& params) {
  const Tokens cand = tokenize_sentence(candidate, params);
  const Tokens ref = tokenize_sentence(reference, params);
  if (cand.empty() || ref.empty()) return 0.0;
  const double lcs = static_cast<double>(lcs_length(cand, ref));
  if (lcs == 0.0) return 0.0;
  const double recall = lcs / static_cast<double>(ref.size());
  const double precision = lcs / static_cast<double>(cand.size());
  const double beta2 = params.rouge_beta * params.rouge_beta;
  return (1.0 + beta2) * recall * precision / (recall + beta2 * precision);
}

double meteor(std::string_view candidate, std::string_view reference, const MetricParams& params) {
  Tokens cand = tokenize_sentence(candidate, params);
  Tokens ref = tokenize_sentence(reference, params);
  if (cand.empty() || ref.empty()) return 0.0;
  if (!params.synonyms.empty()) {
    auto canon = [&](Tokens& tokens) {
      for (auto& t : tokens) {
        auto it = params.synonyms.find(t);
        if (it != params.synonyms.end()) t = "\x1e" + it->second;
      }
    };
    canon(cand);
    canon(ref);
  }
  const MeteorAlignment alignment = align_unigrams(cand, ref);
  if (alignment.matches == 0) return 0.0;

  const double m = static_cast<double>(alignment.matches);
  const double precision = m / static_cast<double>(cand.size());
  const double recall = m / static_cast<double>(ref.size());
  const double beta2 = params.meteor_beta * params.meteor_beta;
  const double f_mean = (1.0 + beta2) * precision * recall / (recall + beta2 * precision);
  const double penalty =
      params.meteor_gamma * std::pow(static_cast<double>(alignment.chunks) / m, params.meteor_theta);
  return f_mean * (1.0 - penalty);
}

double struc(std::string_view candidate, std::string_view reference, const MetricParams& params) {
  return (bleu(candidate, reference, params) + rouge_l(candidate, reference, params) +
          meteor(candidate, reference, params)) /
         3.0;
}

double score_from_struc(double s_f, Polarity polarity, const MetricParams& params) {
  const double p = params.p_semantic;
  return polarity == Polarity::Positive ? p + (1.0 - p) * s_f : (1.0 - p) * s_f;
}

double score_label(std::string_view s_g, std::string_view s_r, Polarity polarity,
                   const MetricParams& params) {
  return score_from_struc(struc(s_g, s_r, params), polarity, params);
}

std::vector<BiasProbeCell> bleu_bias_probe(int max_len, const MetricParams& params) {
  if (max_len < 1) throw ValidationError("bias probe length must be >= 1");
  auto sentence = [](const char* stem, int len) {
    std::string s;
    for (int i = 0; i < len; ++i) {
      if (i) s += ' ';
      s += stem;
      s += std::to_string(i);
    }
    return s;
  };
  std::vector<BiasProbeCell> grid;
  grid.reserve(static_cast<std::size_t>(max_len) * max_len);
  for (int c = 1; c <= max_len; ++c) {
    const std::string cand = sentence("alpha", c);
    for (int r = 1; r <= max_len; ++r) {
      const std::string ref = sentence("omega", r);
      grid.push_back({c, r, bleu(cand, ref, params)});
    }
  }
  return grid;
}

MetricReport score_pair(std::string_view candidate, std::string_view reference,
                        const MetricParams& params) {
  MetricReport report;
  report.bleu = bleu(candidate, reference, params);
  report.rouge_l = rouge_l(candidate, reference, params);
  report.meteor = meteor(candidate, reference, params);
  report.struc = (report.bleu + report.rouge_l + report.meteor) / 3.0;
  return report;
}

void PitNormalizer::fit(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  sorted_ = std::move(sample);
}

double PitNormalizer::transform(double value) const {
  if (sorted_.empty()) return value;
  auto rank = std::upper_bound(sorted_.begin(), sorted_.end(), value) - sorted_.begin();
  return static_cast<double>(rank) / static_cast<double>(sorted_.size());
}

CorpusReport evaluate_corpus(const std::vector<std::pair<std::string, std::string>>& candidates,
                             const std::map<std::string, std::string>& references,
                             const MetricParams& params, bool pit_normalize) {
  params.validate();
  CorpusReport report;
  double word_total = 0.0;
  for (const auto& [id, sentence] : candidates) {
    auto ref = references.find(id);
    if (ref == references.end()) {
      report.unmatched.push_back(id);
      continue;
    }
    report.per_function.push_back({id, score_pair(sentence, ref->second, params)});
    word_total += static_cast<double>(whitespace_words(sentence));
  }
  if (report.per_function.empty())
    throw ValidationError("no candidate id matches any reference id");

  if (pit_normalize) {
    PitNormalizer bleu_pit, rouge_pit, meteor_pit;
    std::vector<double> b, r, m;
    for (const auto& e : report.per_function) {
      b.push_back(e.report.bleu);
      r.push_back(e.report.rouge_l);
      m.push_back(e.report.meteor);
    }
    bleu_pit.fit(std::move(b));
    rouge_pit.fit(std::move(r));
    meteor_pit.fit(std::move(m));
    for (auto& e : report.per_function) {
      e.report.bleu = bleu_pit.transform(e.report.bleu);
      e.report.rouge_l = rouge_pit.transform(e.report.rouge_l);
      e.report.meteor = meteor_pit.transform(e.report.meteor);
      e.report.struc = (e.report.bleu + e.report.rouge_l + e.report.meteor) / 3.0;
    }
  }

  const double n = static_cast<double>(report.per_function.size());
  auto accumulate = [&](auto getter, double& mean_out, double& var_out) {
    double mean = 0.0;
    for (const auto& e : report.per_function) mean += getter(e.report);
    mean /= n;
    double var = 0.0;
    for (const auto& e : report.per_function) {
      const double d = getter(e.report) - mean;
      var += d * d;
    }
    mean_out = mean;
    var_out = var / n;
  };
  accumulate([](const MetricReport& r) { return r.bleu; }, report.mean.bleu, report.variance.bleu);
  accumulate([](const MetricReport& r) { return r.rouge_l; }, report.mean.rouge_l,
             report.variance.rouge_l);
  accumulate([](const MetricReport& r) { return r.meteor; }, report.mean.meteor,
             report.variance.meteor);
  accumulate([](const MetricReport& r) { return r.struc; }, report.mean.struc,
             report.variance.struc);
  report.avg_summary_words = word_total / n;
  return report;
}

}  // namespace funcsum::metrics
