#include "diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace chdp {

double acf(const std::vector<double>& series, int lag) {
    const int n = static_cast<int>(series.size());
    if (n < 1) throw std::domain_error("acf: empty series");
    if (lag < 0 || lag >= n) throw std::domain_error("acf: lag out of range");
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= n;
    double denom = 0.0;
    for (double x : series) denom += (x - mean) * (x - mean);
    if (denom == 0.0) return 0.0;  // constant series carries no correlation evidence
    double num = 0.0;
    for (int t = 0; t + lag < n; ++t) num += (series[t] - mean) * (series[t + lag] - mean);
    return num / denom;
}

double psrf(const std::vector<std::vector<double>>& chains) {
    const int m = static_cast<int>(chains.size());
    if (m < 2) throw std::domain_error("psrf: need >= 2 chains");
    const int n = static_cast<int>(chains[0].size());
    if (n < 2) throw std::domain_error("psrf: chains must have length >= 2");
    for (const auto& c : chains)
        if (static_cast<int>(c.size()) != n) throw std::domain_error("psrf: unequal chain lengths");

    std::vector<double> means(m, 0.0);
    double W = 0.0;
    for (int j = 0; j < m; ++j) {
        for (double x : chains[j]) means[j] += x;
        means[j] /= n;
        double s2 = 0.0;
        for (double x : chains[j]) s2 += (x - means[j]) * (x - means[j]);
        W += s2 / (n - 1);
    }
    W /= m;
    if (W == 0.0) throw std::domain_error("psrf: zero within-chain variance");
    double grand = 0.0;
    for (double mu : means) grand += mu;
    grand /= m;
    double varMeans = 0.0;
    for (double mu : means) varMeans += (mu - grand) * (mu - grand);
    varMeans /= (m - 1);
    const double B = n * varMeans;
    return std::sqrt((n - 1.0) / n + B / (n * W));
}

}  // namespace chdp
