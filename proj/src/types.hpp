#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chdp {

enum class CoopMode { Superposition, Maximization };

std::string to_string(CoopMode mode);
CoopMode coop_mode_from_string(const std::string& s);

/// Model and algorithm hyperparameters shared by both inference engines.
struct Hyperparams {
    double alpha0 = 1.0;     // top-layer DP concentration
    double alphaA = 1.0;     // chef-layer concentration, shared
    double alphaD = 1.0;     // restaurant-layer concentration, shared
    double eta = 0.5;        // symmetric Dirichlet base parameter
    double gammaProx = 1.0;  // proximal weight in VI updates
    int mcSamples = 20;      // Monte-Carlo sample count S
    int truncK = 20;         // K truncation
    int truncO = 10;         // O truncation
    int truncT = 10;         // T truncation
    CoopMode coopMode = CoopMode::Superposition;
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument on a bad field
};

/// Observed three-layer structure: upper nodes (authors/labels), middle nodes
/// (documents), link lists and token sequences.
struct CoopHierarchy {
    int numUpper = 0;
    int numMiddle = 0;
    int vocabSize = 0;
    std::vector<std::vector<int>> links;   // per middle node: linked upper indices
    std::vector<std::vector<int>> tokens;  // per middle node: vocabulary indices

    void validate() const;  // throws std::invalid_argument on a broken invariant

    int totalTokens() const {
        int n = 0;
        for (const auto& t : tokens) n += static_cast<int>(t.size());
        return n;
    }
    bool operator==(const CoopHierarchy&) const = default;
};

/// Normalized atom weights over a shared atom index.
using WeightVector = std::vector<double>;

/// Unit-sum normalization in place; throws on zero or negative total mass.
void normalize_weights(WeightVector& w);

/// weights[i] = breaks[i] * prod_{j<i} (1 - breaks[j]); last break must be 1.
WeightVector stick_weights(const std::vector<double>& breaks);

/// Per-atom sum of the inputs, renormalized.
WeightVector superpose(const std::vector<WeightVector>& vectors);

/// Per-atom maximum of the inputs, renormalized (Zadeh-style operator).
WeightVector maximize(const std::vector<WeightVector>& vectors);

/// pi_{a,k} = sum of option weights whose dish assignment is k.
WeightVector author_topic_weights(const WeightVector& optionWeights,
                                  const std::vector<int>& optionDish, int numDishes);

}  // namespace chdp
