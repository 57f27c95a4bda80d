#include "evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chdp {

double recovery_distance(const std::vector<std::vector<double>>& learned,
                         const std::vector<std::vector<double>>& truth) {
    if (learned.size() != truth.size() || learned.empty())
        throw std::invalid_argument("recovery_distance: row count mismatch");
    double total = 0.0;
    for (std::size_t a = 0; a < learned.size(); ++a) {
        if (learned[a].size() != truth[a].size())
            throw std::invalid_argument("recovery_distance: column count mismatch");
        double s = 0.0;
        for (std::size_t v = 0; v < learned[a].size(); ++v) {
            const double diff = learned[a][v] - truth[a][v];
            s += diff * diff;
        }
        total += std::sqrt(s);
    }
    return total / static_cast<double>(learned.size());
}

std::vector<double> doc_topic_weights(const std::vector<std::vector<double>>& dishes,
                                      const std::vector<int>& docTokens, int vocabSize) {
    if (dishes.empty()) throw std::invalid_argument("doc_topic_weights: no dishes");
    std::vector<double> w(vocabSize, 0.0);
    for (int v : docTokens) {
        if (v < 0 || v >= vocabSize) throw std::invalid_argument("doc_topic_weights: token out of range");
        w[v] += 1.0;
    }
    double wn = 0.0;
    for (double x : w) wn += x * x;
    wn = std::sqrt(wn);
    std::vector<double> out(dishes.size(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < dishes.size(); ++k) {
        double dot = 0.0, tn = 0.0;
        for (int v = 0; v < vocabSize; ++v) {
            dot += dishes[k][v] * w[v];
            tn += dishes[k][v] * dishes[k][v];
        }
        out[k] = (wn > 0.0 && tn > 0.0) ? dot / (wn * std::sqrt(tn)) : 0.0;
        total += out[k];
    }
    if (total <= 0.0) throw std::domain_error("doc_topic_weights: zero cosine mass");
    for (double& x : out) x /= total;
    return out;
}

double author_perplexity(const std::vector<std::vector<int>>& testTokens,
                         const std::vector<std::vector<int>>& testLinks,
                         const std::vector<std::vector<double>>& authorTopicWeights,
                         const std::vector<std::vector<double>>& dishes, int vocabSize,
                         CoopMode mode) {
    if (testTokens.empty()) throw std::domain_error("author_perplexity: empty test set");
    if (testTokens.size() != testLinks.size())
        throw std::invalid_argument("author_perplexity: tokens/links size mismatch");
    const std::size_t K = dishes.size();
    double acc = 0.0;
    for (std::size_t d = 0; d < testTokens.size(); ++d) {
        const auto pkd = doc_topic_weights(dishes, testTokens[d], vocabSize);
        const auto& linked = testLinks[d];
        if (linked.empty()) throw std::invalid_argument("author_perplexity: doc with no authors");
        double inner = 0.0;
        if (mode == CoopMode::Superposition) {
            for (int a : linked) {
                const auto& pi = authorTopicWeights.at(a);
                for (std::size_t k = 0; k < K; ++k) inner += pi[k] * pkd[k];
            }
            inner /= static_cast<double>(linked.size());
        } else {
            std::vector<WeightVector> rows;
            for (int a : linked) rows.push_back(authorTopicWeights.at(a));
            const auto tilde = maximize(rows);
            for (std::size_t k = 0; k < K; ++k) inner += tilde[k] * pkd[k];
        }
        acc += inner;
    }
    return std::exp(-acc / static_cast<double>(testTokens.size()));
}

RankingResult rank_labels(const std::vector<std::vector<double>>& labelWeights,
                          const std::vector<double>& docWeights) {
    RankingResult out;
    out.scores.resize(labelWeights.size());
    for (std::size_t l = 0; l < labelWeights.size(); ++l) {
        if (labelWeights[l].size() != docWeights.size())
            throw std::invalid_argument("rank_labels: dimension mismatch");
        out.scores[l] =
            std::inner_product(labelWeights[l].begin(), labelWeights[l].end(), docWeights.begin(), 0.0);
        if (!std::isfinite(out.scores[l])) throw std::domain_error("rank_labels: non-finite score");
    }
    out.order.resize(labelWeights.size());
    std::iota(out.order.begin(), out.order.end(), 0);
    std::stable_sort(out.order.begin(), out.order.end(), [&](int i, int j) {
        if (out.scores[i] != out.scores[j]) return out.scores[i] > out.scores[j];
        return i < j;
    });
    return out;
}

MultilabelMetrics multilabel_metrics(const std::vector<RankingResult>& rankings,
                                     const std::vector<std::vector<int>>& trueLabels) {
    if (rankings.size() != trueLabels.size())
        throw std::invalid_argument("multilabel_metrics: instance count mismatch");
    MultilabelMetrics m;
    int used = 0;
    for (std::size_t i = 0; i < rankings.size(); ++i) {
        const auto& order = rankings[i].order;
        const int L = static_cast<int>(order.size());
        std::vector<char> isTrue(L, 0);
        int numTrue = 0;
        for (int y : trueLabels[i]) {
            if (y < 0 || y >= L) throw std::invalid_argument("multilabel_metrics: label out of range");
            if (!isTrue[y]) {
                isTrue[y] = 1;
                ++numTrue;
            }
        }
        if (numTrue == 0 || numTrue == L) {
            ++m.skipped;
            continue;
        }
        ++used;
        std::vector<int> rankOf(L);  // 0-based position in the order
        for (int pos = 0; pos < L; ++pos) rankOf[order[pos]] = pos;
        m.oneError += isTrue[order[0]] ? 0.0 : 1.0;
        int maxTrueRank = 0;
        for (int y = 0; y < L; ++y)
            if (isTrue[y]) maxTrueRank = std::max(maxTrueRank, rankOf[y]);
        m.coverage += maxTrueRank;
        int wrongPairs = 0;
        for (int y = 0; y < L; ++y) {
            if (!isTrue[y]) continue;
            for (int z = 0; z < L; ++z)
                if (!isTrue[z] && rankOf[z] < rankOf[y]) ++wrongPairs;
        }
        m.rankingLoss += static_cast<double>(wrongPairs) /
                         (static_cast<double>(numTrue) * (L - numTrue));
        double ap = 0.0;
        for (int y = 0; y < L; ++y) {
            if (!isTrue[y]) continue;
            int trueAtOrAbove = 0;
            for (int z = 0; z < L; ++z)
                if (isTrue[z] && rankOf[z] <= rankOf[y]) ++trueAtOrAbove;
            ap += static_cast<double>(trueAtOrAbove) / (rankOf[y] + 1);
        }
        m.avgPrecision += ap / numTrue;
    }
    if (used == 0) throw std::domain_error("multilabel_metrics: no scorable instance");
    m.oneError /= used;
    m.coverage /= used;
    m.rankingLoss /= used;
    m.avgPrecision /= used;
    return m;
}

}  // namespace chdp
