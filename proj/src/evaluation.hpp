#pragma once

#include <vector>

#include "types.hpp"

namespace chdp {

/// Mean over rows of the Euclidean distance between learned and true rows.
double recovery_distance(const std::vector<std::vector<double>>& learned,
                         const std::vector<std::vector<double>>& truth);

/// cosine(theta_k, doc token counts) per dish, normalized to sum to 1 over k.
std::vector<double> doc_topic_weights(const std::vector<std::vector<double>>& dishes,
                                      const std::vector<int>& docTokens, int vocabSize);

/// exp(-mean over test docs of the author-given-document probability).
/// Superposition averages over linked authors; Maximization scores the
/// per-atom maximum of the linked authors' topic weights, renormalized.
double author_perplexity(const std::vector<std::vector<int>>& testTokens,
                         const std::vector<std::vector<int>>& testLinks,
                         const std::vector<std::vector<double>>& authorTopicWeights,
                         const std::vector<std::vector<double>>& dishes, int vocabSize,
                         CoopMode mode);

/// A strict total order over labels (descending score, index tie-break).
struct RankingResult {
    std::vector<int> order;      // label indices, best first
    std::vector<double> scores;  // raw score per label index
};

RankingResult rank_labels(const std::vector<std::vector<double>>& labelWeights,
                          const std::vector<double>& docWeights);

struct MultilabelMetrics {
    double oneError = 0.0;
    double coverage = 0.0;  // 0-based
    double rankingLoss = 0.0;
    double avgPrecision = 0.0;
    int skipped = 0;  // instances violating the >=1 true / >=1 false precondition
};

MultilabelMetrics multilabel_metrics(const std::vector<RankingResult>& rankings,
                                     const std::vector<std::vector<int>>& trueLabels);

}  // namespace chdp
