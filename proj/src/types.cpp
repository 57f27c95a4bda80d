#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace chdp {

std::string to_string(CoopMode mode) {
    return mode == CoopMode::Superposition ? "superposition" : "maximization";
}

CoopMode coop_mode_from_string(const std::string& s) {
    if (s == "superposition" || s == "sup" || s == "s") return CoopMode::Superposition;
    if (s == "maximization" || s == "max" || s == "m") return CoopMode::Maximization;
    throw std::invalid_argument("unknown cooperation mode: " + s);
}

void Hyperparams::validate() const {
    auto bad = [](const std::string& what) { throw std::invalid_argument("Hyperparams: " + what); };
    if (!(alpha0 > 0)) bad("alpha0 must be > 0");
    if (!(alphaA > 0)) bad("alphaA must be > 0");
    if (!(alphaD > 0)) bad("alphaD must be > 0");
    if (!(eta > 0)) bad("eta must be > 0");
    if (!(gammaProx >= 0)) bad("gammaProx must be >= 0");
    if (mcSamples < 1) bad("mcSamples must be >= 1");
    if (truncK < 2 || truncO < 2 || truncT < 2) bad("truncation levels must be >= 2");
}

void CoopHierarchy::validate() const {
    auto bad = [](const std::string& what) { throw std::invalid_argument("CoopHierarchy: " + what); };
    if (numUpper < 1 || numMiddle < 1 || vocabSize < 1) bad("all node counts must be >= 1");
    if (static_cast<int>(links.size()) != numMiddle) bad("links size != numMiddle");
    if (static_cast<int>(tokens.size()) != numMiddle) bad("tokens size != numMiddle");
    std::vector<char> upperSeen(numUpper, 0);
    for (int d = 0; d < numMiddle; ++d) {
        if (links[d].empty()) bad("middle node " + std::to_string(d) + " has no linked upper node");
        if (tokens[d].empty()) bad("middle node " + std::to_string(d) + " has no tokens");
        std::set<int> seen;
        for (int a : links[d]) {
            if (a < 0 || a >= numUpper) bad("link index out of range in middle node " + std::to_string(d));
            if (!seen.insert(a).second) bad("duplicate upper index in middle node " + std::to_string(d));
            upperSeen[a] = 1;
        }
        for (int w : tokens[d])
            if (w < 0 || w >= vocabSize) bad("token out of range in middle node " + std::to_string(d));
    }
    for (int a = 0; a < numUpper; ++a)
        if (!upperSeen[a]) bad("upper node " + std::to_string(a) + " appears in no link list");
}

void normalize_weights(WeightVector& w) {
    double total = 0.0;
    for (double v : w) {
        if (v < 0.0 || !std::isfinite(v)) throw std::domain_error("weight vector has a negative or non-finite entry");
        total += v;
    }
    if (total <= 0.0) throw std::domain_error("cannot normalize a zero-mass weight vector");
    for (double& v : w) v /= total;
}

WeightVector stick_weights(const std::vector<double>& breaks) {
    if (breaks.empty()) throw std::domain_error("stick_weights: empty break list");
    for (double b : breaks)
        if (!(b > 0.0) || b > 1.0) throw std::domain_error("stick_weights: break outside (0,1]");
    if (breaks.back() != 1.0) throw std::domain_error("stick_weights: final break must be 1");
    WeightVector w(breaks.size());
    double remaining = 1.0;
    for (std::size_t i = 0; i < breaks.size(); ++i) {
        w[i] = breaks[i] * remaining;
        remaining *= (1.0 - breaks[i]);
    }
    return w;
}

namespace {
void check_shapes(const std::vector<WeightVector>& vectors) {
    if (vectors.empty()) throw std::invalid_argument("cooperation needs at least one weight vector");
    const std::size_t n = vectors.front().size();
    for (const auto& v : vectors)
        if (v.size() != n) throw std::invalid_argument("cooperation inputs have mismatched lengths");
}
}  // namespace

WeightVector superpose(const std::vector<WeightVector>& vectors) {
    check_shapes(vectors);
    WeightVector out(vectors.front().size(), 0.0);
    for (const auto& v : vectors)
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += v[k];
    normalize_weights(out);
    return out;
}

WeightVector maximize(const std::vector<WeightVector>& vectors) {
    check_shapes(vectors);
    WeightVector out(vectors.front().size(), 0.0);
    for (const auto& v : vectors)
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::max(out[k], v[k]);
    normalize_weights(out);
    return out;
}

WeightVector author_topic_weights(const WeightVector& optionWeights,
                                  const std::vector<int>& optionDish, int numDishes) {
    if (optionWeights.size() != optionDish.size())
        throw std::invalid_argument("author_topic_weights: mismatched option/dish lengths");
    WeightVector out(numDishes, 0.0);
    for (std::size_t o = 0; o < optionDish.size(); ++o) {
        const int k = optionDish[o];
        if (k < 0 || k >= numDishes) throw std::out_of_range("author_topic_weights: dish index out of range");
        out[k] += optionWeights[o];
    }
    return out;
}

}  // namespace chdp
