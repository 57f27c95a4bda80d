#pragma once

#include <random>
#include <vector>

#include "types.hpp"

namespace chdp {

/// Ground truth for the interest-recovery experiment.
struct RecoveryGroundTruth {
    std::vector<std::vector<double>> authorInterests;  // A x V simplices
    std::vector<int> groupOf;                          // author -> group
    std::vector<std::vector<double>> docInterests;     // D x V simplices
    CoopMode mode = CoopMode::Superposition;
};

/// Random bipartite link structure with coverage repair plus uniform tokens.
CoopHierarchy generate_chs(int A, int D, int V, double densityAD, int tokensPerDoc,
                           std::uint64_t seed);

/// Group-interest recovery dataset: 12 authors in 3 groups, 20 docs, V=3,
/// density 0.3, 100 tokens/doc; doc interests cooperate the author rows.
struct RecoveryDataset {
    CoopHierarchy data;
    RecoveryGroundTruth truth;
};
RecoveryDataset generate_recovery(CoopMode mode, std::uint64_t seed);
RecoveryDataset generate_recovery(CoopMode mode, std::uint64_t seed, int A, int D, int V,
                                  double densityAD, int tokensPerDoc);

/// One uniformly chosen author retained per doc; authors left without any doc
/// are dropped. authorRemap (optional out) maps old index -> new or -1.
CoopHierarchy degenerate_to_type1(const CoopHierarchy& chs, std::uint64_t seed,
                                  std::vector<int>* authorRemap = nullptr);

}  // namespace chdp
