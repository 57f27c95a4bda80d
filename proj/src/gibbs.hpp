#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "types.hpp"

namespace chdp {

/// log integral F(counts|theta) H(theta) dtheta under a symmetric Dirichlet(eta) base.
double log_marginal_dm(const std::vector<int>& counts, double eta, int V);

/// A table in one restaurant: which chef/option serves it and its customers.
struct Table {
    int chef = -1;
    int option = -1;  // index into the chef's option list
    int customers = 0;
    std::vector<int> tokenCounts;  // V-length
};

/// A menu option of one chef: the dish it realizes and the tables it serves.
struct Option {
    int dish = -1;
    int tables = 0;
    std::vector<int> tokenCounts;  // aggregated over served tables
    int tokenTotal = 0;
};

/// A global dish: collapsed sufficient statistics.
struct Dish {
    int options = 0;
    std::vector<int> tokenCounts;
    int tokenTotal = 0;
};

/// One atom of an expanded seating conditional. table >= 0 selects an occupied
/// table; otherwise (chef, option, dish) describe the new-table path, where
/// option == -1 means a new option and dish == -1 a new dish.
struct SeatingChoice {
    int table = -1;
    int chef = -1;
    int option = -1;
    int dish = -1;
};

/// A categorical over seating choices; probs is normalized.
struct SeatingConditional {
    std::vector<SeatingChoice> choices;
    std::vector<double> probs;
};

struct GibbsOptions {
    bool useAuxiliaryChef = false;  // Superposition-only auxiliary-variable customer step
    bool ignoreLikelihood = false;  // structure-only runs: all F terms dropped
};

/// Per-sample scalar series feeding the convergence diagnostics.
struct ChainTrace {
    std::vector<double> loglik;
    std::vector<int> kCount;
};

/// Marginal Gibbs sampler for CHDP under the international restaurant process
/// representation, covering both cooperation modes.
class GibbsSampler {
public:
    GibbsSampler(const CoopHierarchy& data, const Hyperparams& hp, GibbsOptions opts = {});

    /// Streaming initialization: customers seated one at a time from their own
    /// conditional.
    void init();

    /// One full sweep: all customers, all tables, all options.
    void sweep();

    /// burnIn + numSamples sweeps on top of init(); records loglik and K per
    /// retained sweep. Optionally accumulates posterior-mean author interest
    /// rows (A x V) over retained sweeps into meanInterests.
    ChainTrace run_chain(int numSamples, int burnIn,
                         std::vector<std::vector<double>>* meanInterests = nullptr);

    // --- conditionals (precondition: the unit is detached) ---
    SeatingConditional customer_conditional(int d, int n) const;
    SeatingConditional table_conditional(int d, int t) const;
    SeatingConditional option_conditional(int a, int o) const;

    // auxiliary-chef variant (Superposition only)
    std::vector<double> aux_chef_probs(int d) const;
    SeatingConditional customer_conditional_given_chef(int d, int n, int chef) const;

    // --- detach / attach primitives ---
    void detach_customer(int d, int n);
    void attach_customer(int d, int n, const SeatingChoice& choice);
    void detach_table(int d, int t);
    void attach_table(int d, int t, const SeatingChoice& choice);
    void detach_option(int a, int o);
    void attach_option(int a, int o, const SeatingChoice& choice);

    // --- state queries ---
    int num_dishes() const { return static_cast<int>(dishes_.size()); }
    int num_options(int a) const { return static_cast<int>(options_[a].size()); }
    int num_tables(int d) const { return static_cast<int>(tables_[d].size()); }
    const std::vector<Table>& tables(int d) const { return tables_[d]; }
    const std::vector<Option>& options(int a) const { return options_[a]; }
    const std::vector<Dish>& dishes() const { return dishes_; }
    int customer_table(int d, int n) const { return customerTable_[d][n]; }
    const CoopHierarchy& data() const { return data_; }
    const Hyperparams& hyperparams() const { return hp_; }
    const GibbsOptions& options_set() const { return opts_; }

    /// eta*1 + dishTokenCounts[k]; parameters of the dish posterior Dirichlet.
    std::vector<double> dish_posterior(int k) const;

    /// Collapsed data log-likelihood: sum_k log_marginal_dm(counts_k).
    double joint_loglik() const;

    /// Author weight over live dishes, from table counts per option.
    WeightVector author_topic_weights(int a) const;

    /// Posterior-mean interest rows: normalize(sum_k pi_{a,k} * mean theta_k).
    std::vector<std::vector<double>> author_interest_rows() const;

    /// Partition of all tokens by dish, canonical form (sorted blocks of
    /// global token ids). Used by posterior-enumeration checks.
    std::vector<std::vector<int>> dish_partition() const;

    /// Verifies every count identity; throws std::logic_error naming the
    /// failing counter.
    void check_invariants() const;

    std::mt19937_64& rng() { return rng_; }
    bool initialized() const { return initialized_; }

    // checkpoint plumbing
    std::string serialize_state() const;
    void restore_state(const std::string& blob);
    int iteration = 0;  // completed sweeps

private:
    double token_loglik(int w, const Dish* dish) const;
    double block_loglik(const std::vector<int>& counts, int total, const Dish* dish) const;

    // Expansion of the mode-specific G_a^d at option granularity, with block
    // likelihoods attached. Returns (choices, logPrior, logLik); logPrior is
    // unnormalized.
    void expand_cooperation(int d, const std::vector<int>& blockCounts, int blockTotal,
                            std::vector<SeatingChoice>& choices, std::vector<double>& logPrior,
                            std::vector<double>& logLik) const;

    void remove_table(int d, int t);
    void remove_option(int a, int o);
    void remove_dish(int k);
    void unlink_table_from_option(int d, int t);
    void link_table_to_option(int d, int t, const SeatingChoice& choice);

    CoopHierarchy data_;
    Hyperparams hp_;
    GibbsOptions opts_;

    std::vector<std::vector<int>> customerTable_;  // [d][n], -1 when detached
    std::vector<std::vector<Table>> tables_;       // [d]
    std::vector<std::vector<Option>> options_;     // [a]
    std::vector<Dish> dishes_;
    std::mt19937_64 rng_;
    bool initialized_ = false;
};

}  // namespace chdp
