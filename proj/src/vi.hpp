#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "types.hpp"

namespace chdp {

/// Truncated variational parameters at all three layers.
struct VariationalState {
    std::vector<double> u0, r0;                      // K†-1 top-stick Betas
    std::vector<std::vector<double>> uA, rA;         // [a][O†-1]
    std::vector<std::vector<double>> uD, rD;         // [d][T†-1]
    std::vector<std::vector<WeightVector>> sigmaAO;  // [a][o] -> K†-simplex
    std::vector<std::vector<WeightVector>> sigmaDT;  // [d][t] -> simplex over linked options
    std::vector<std::vector<WeightVector>> sigmaDN;  // [d][n] -> T†-simplex
    std::vector<std::vector<double>> vartheta;       // [k][v] Dirichlet params
    int iteration = 0;
};

/// Chef-layer Monte-Carlo draws with the parameters that generated them.
/// Keeping the generation-time parameters lets the surrogate re-weight the
/// fixed draws when evaluated away from the generation point.
struct StickSampleBatch {
    int S = 0;
    int iteration = 0;
    std::vector<std::vector<std::vector<double>>> nu;  // [s][a][o<O†-1]
    std::vector<std::vector<WeightVector>> piA;        // [s][a] realized O† weights
    std::vector<std::vector<std::vector<int>>> zA;     // [s][a] realized dish per option
    std::vector<std::vector<double>> genUA, genRA;     // [a][O†-1]
    std::vector<std::vector<WeightVector>> genSigmaAO;
};

/// Stick-breaking VI: closed-form proximal coordinate updates under
/// Superposition; score-function Monte-Carlo gradients under Maximization.
class ViEngine {
public:
    ViEngine(const CoopHierarchy& data, const Hyperparams& hp);

    void init();
    StickSampleBatch draw_batch();
    void iterate();

    /// Runs until |relative objective change| < tol or maxIter; returns the
    /// per-iteration surrogate objective trace.
    std::vector<double> run(int maxIter, double tol);

    /// Full surrogate objective: analytic ELBO terms; in Maximization mode the
    /// table-to-option prior expectation is the importance-weighted MC
    /// estimate on the supplied batch (required in that mode).
    double surrogate_objective(const StickSampleBatch* batch = nullptr) const;

    /// Exact gradient of the fixed-batch surrogate w.r.t. (uA[a][o], rA[a][o]).
    std::pair<double, double> grad_sticks_ao_max(int a, int o, const StickSampleBatch& batch) const;

    /// Realized table-to-option weights for doc d under sample s of the batch,
    /// indexed j*O† + o over linked chefs j; entries floored at 1e-12.
    WeightVector pi_d_realized(int d, const std::vector<WeightVector>& piRows,
                               const std::vector<std::vector<int>>& zRows) const;

    VariationalState& state() { return st_; }
    const VariationalState& state() const { return st_; }
    const CoopHierarchy& data() const { return data_; }
    const Hyperparams& hyperparams() const { return hp_; }
    std::mt19937_64& rng() { return rng_; }

    /// E[pi_{a,o}] under the mean sticks.
    WeightVector expected_option_weights(int a) const;
    /// pi_{a,k} = sum_o E[pi_{a,o}] * sigmaAO[a][o][k].
    WeightVector author_topic_weights(int a) const;
    /// normalize(sum_k pi_{a,k} * normalized vartheta_k) per author.
    std::vector<std::vector<double>> author_interest_rows() const;
    /// Normalized vartheta rows.
    std::vector<std::vector<double>> topics() const;
    /// Dishes whose total sigmaAO usage exceeds the threshold.
    int active_dishes(double threshold = 0.01) const;

    std::string serialize_state() const;
    void restore_state(const std::string& blob);

private:
    // E[log pi] along one truncated stick chain (u,r of length L-1 -> L terms).
    static std::vector<double> elog_stick(const std::vector<double>& u,
                                          const std::vector<double>& r);
    std::vector<std::vector<double>> elog_theta() const;  // [k][v]
    // log importance weight of restaurant d under sample s, current vs gen.
    double log_weight(int d, int s, const StickSampleBatch& batch) const;

    void update_doc_layer(const StickSampleBatch* batch,
                          const std::vector<std::vector<double>>& elogTheta);
    void update_chef_layer_sup(const std::vector<std::vector<double>>& elogTheta);
    void update_chef_layer_max(const StickSampleBatch& batch,
                               const std::vector<std::vector<double>>& elogTheta);
    void update_top_layer(const std::vector<std::vector<double>>& elogTheta);

    CoopHierarchy data_;
    Hyperparams hp_;
    std::mt19937_64 rng_;
    VariationalState st_;
    bool initialized_ = false;

    std::vector<std::vector<int>> docsOfAuthor_;
    std::vector<std::vector<int>> chefSlotInDoc_;  // [d] position of each chef in links[d]

    // per-iteration accumulators refreshed by update_doc_layer
    std::vector<std::vector<double>> massAO_;               // [a][o] sum_dt sigmaDT
    std::vector<std::vector<std::vector<double>>> emitAO_;  // [a][o][v] expected emissions
    std::vector<std::vector<std::vector<double>>> logPiBatch_;  // [s][d][idx] (Max only)
};

}  // namespace chdp
