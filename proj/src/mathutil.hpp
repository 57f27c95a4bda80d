#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace chdp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double digamma(double x) { return boost::math::digamma(x); }
inline double trigamma(double x) { return boost::math::trigamma(x); }

inline double log_sum_exp(std::span<const double> logs) {
    double m = kNegInf;
    for (double v : logs) m = std::max(m, v);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double v : logs) s += std::exp(v - m);
    return m + std::log(s);
}

// Normalizes log masses into probabilities in place.
inline void normalize_log_probs(std::vector<double>& logs) {
    const double z = log_sum_exp(logs);
    if (!std::isfinite(z)) throw std::runtime_error("normalize_log_probs: zero or non-finite total mass");
    for (double& v : logs) v = std::exp(v - z);
}

// Inverse-CDF draw from an already normalized probability vector.
template <class Rng>
int sample_categorical(const std::vector<double>& probs, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double beta_entropy(double a, double b) {
    return log_beta(a, b) - (a - 1.0) * digamma(a) - (b - 1.0) * digamma(b) +
           (a + b - 2.0) * digamma(a + b);
}

// KL( Beta(a,b) || Beta(c,d) )
inline double beta_kl(double a, double b, double c, double d) {
    return log_beta(c, d) - log_beta(a, b) + (a - c) * digamma(a) + (b - d) * digamma(b) +
           (c - a + d - b) * digamma(a + b);
}

inline double categorical_entropy(std::span<const double> p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

inline double dirichlet_entropy(std::span<const double> alpha) {
    double a0 = 0.0, lb = 0.0, acc = 0.0;
    for (double a : alpha) a0 += a;
    for (double a : alpha) {
        lb += std::lgamma(a);
        acc += (a - 1.0) * (digamma(a) - digamma(a0));
    }
    lb -= std::lgamma(a0);
    return lb - acc;
}

}  // namespace chdp
