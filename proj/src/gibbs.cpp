#include "gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mathutil.hpp"

namespace chdp {

double log_marginal_dm(const std::vector<int>& counts, double eta, int V) {
    if (V < 1 || !(eta > 0)) throw std::domain_error("log_marginal_dm: bad eta or V");
    if (static_cast<int>(counts.size()) != V) throw std::domain_error("log_marginal_dm: counts size != V");
    long long n = 0;
    for (int c : counts) {
        if (c < 0) throw std::domain_error("log_marginal_dm: negative count");
        n += c;
    }
    double out = std::lgamma(V * eta) - std::lgamma(V * eta + static_cast<double>(n));
    for (int c : counts)
        if (c > 0) out += std::lgamma(eta + c) - std::lgamma(eta);
    return out;
}

GibbsSampler::GibbsSampler(const CoopHierarchy& data, const Hyperparams& hp, GibbsOptions opts)
    : data_(data), hp_(hp), opts_(opts) {
    hp_.validate();
    data_.validate();
    if (opts_.useAuxiliaryChef && hp_.coopMode != CoopMode::Superposition)
        throw std::invalid_argument("auxiliary-chef sampling is only defined for Superposition");
    customerTable_.resize(data_.numMiddle);
    tables_.resize(data_.numMiddle);
    for (int d = 0; d < data_.numMiddle; ++d)
        customerTable_[d].assign(data_.tokens[d].size(), -1);
    options_.resize(data_.numUpper);
    rng_.seed(hp_.seed);
}

double GibbsSampler::token_loglik(int w, const Dish* dish) const {
    if (opts_.ignoreLikelihood) return 0.0;
    const double Veta = data_.vocabSize * hp_.eta;
    if (dish == nullptr) return -std::log(static_cast<double>(data_.vocabSize));
    return std::log((hp_.eta + dish->tokenCounts[w]) / (Veta + dish->tokenTotal));
}

double GibbsSampler::block_loglik(const std::vector<int>& counts, int total, const Dish* dish) const {
    if (opts_.ignoreLikelihood || total == 0) return 0.0;
    const double Veta = data_.vocabSize * hp_.eta;
    if (dish == nullptr) return log_marginal_dm(counts, hp_.eta, data_.vocabSize);
    double out = std::lgamma(Veta + dish->tokenTotal) - std::lgamma(Veta + dish->tokenTotal + total);
    for (int v = 0; v < data_.vocabSize; ++v)
        if (counts[v] > 0)
            out += std::lgamma(hp_.eta + dish->tokenCounts[v] + counts[v]) -
                   std::lgamma(hp_.eta + dish->tokenCounts[v]);
    return out;
}

void GibbsSampler::expand_cooperation(int d, const std::vector<int>& blockCounts, int blockTotal,
                                      std::vector<SeatingChoice>& choices,
                                      std::vector<double>& logPrior,
                                      std::vector<double>& logLik) const {
    const auto& linked = data_.links[d];
    const int J = static_cast<int>(linked.size());
    const int K = num_dishes();
    double sumO = 0.0;
    for (const auto& d2 : dishes_) sumO += d2.options;
    const double logNewDishFromMenu = std::log(hp_.alpha0) - std::log(sumO + hp_.alpha0);

    // dish-block likelihood cache
    std::vector<double> dishLik(K);
    for (int k = 0; k < K; ++k) dishLik[k] = block_loglik(blockCounts, blockTotal, &dishes_[k]);
    const double newDishLik = block_loglik(blockCounts, blockTotal, nullptr);

    // per-dish winning chef for Maximization (lowest index breaks ties)
    std::vector<int> winner;
    if (hp_.coopMode == CoopMode::Maximization && K > 0) {
        winner.assign(K, -1);
        std::vector<double> best(K, -1.0);
        for (int a : linked) {
            double denom = hp_.alphaA;
            for (const auto& opt : options_[a]) denom += opt.tables;
            std::vector<double> ratio(K, 0.0);
            for (const auto& opt : options_[a]) ratio[opt.dish] += opt.tables / denom;
            for (int k = 0; k < K; ++k)
                if (ratio[k] > best[k]) {
                    best[k] = ratio[k];
                    winner[k] = a;
                }
        }
    }

    for (int a : linked) {
        double denom = hp_.alphaA;
        for (const auto& opt : options_[a]) denom += opt.tables;
        const double logShare =
            hp_.coopMode == CoopMode::Superposition ? -std::log(static_cast<double>(J)) : 0.0;
        for (int o = 0; o < static_cast<int>(options_[a].size()); ++o) {
            const auto& opt = options_[a][o];
            if (hp_.coopMode == CoopMode::Maximization && winner[opt.dish] != a) continue;
            choices.push_back({-1, a, o, opt.dish});
            logPrior.push_back(logShare + std::log(static_cast<double>(opt.tables)) - std::log(denom));
            logLik.push_back(dishLik[opt.dish]);
        }
        // new option of this chef, expanded over the global menu
        const double logNewOpt = logShare + std::log(hp_.alphaA) - std::log(denom);
        for (int k = 0; k < K; ++k) {
            choices.push_back({-1, a, -1, k});
            logPrior.push_back(logNewOpt + std::log(static_cast<double>(dishes_[k].options)) -
                               std::log(sumO + hp_.alpha0));
            logLik.push_back(dishLik[k]);
        }
        choices.push_back({-1, a, -1, -1});
        logPrior.push_back(logNewOpt + logNewDishFromMenu);
        logLik.push_back(newDishLik);
    }
}

SeatingConditional GibbsSampler::customer_conditional(int d, int n) const {
    if (customerTable_[d][n] != -1)
        throw std::logic_error("customer_conditional: token must be detached");
    const int w = data_.tokens[d][n];
    SeatingConditional cond;
    std::vector<double> logMass;
    for (int t = 0; t < num_tables(d); ++t) {
        const auto& tab = tables_[d][t];
        const Dish& dish = dishes_[options_[tab.chef][tab.option].dish];
        cond.choices.push_back({t, tab.chef, tab.option, options_[tab.chef][tab.option].dish});
        logMass.push_back(std::log(static_cast<double>(tab.customers)) + token_loglik(w, &dish));
    }

    std::vector<SeatingChoice> newChoices;
    std::vector<double> prior, lik;
    std::vector<int> block(data_.vocabSize, 0);
    block[w] = 1;
    expand_cooperation(d, block, 1, newChoices, prior, lik);
    // The cooperation measure must be normalized before the alpha_d weight is
    // applied (its components do not sum to 1 under Maximization).
    const double logZ = log_sum_exp(prior);
    for (std::size_t i = 0; i < newChoices.size(); ++i) {
        cond.choices.push_back(newChoices[i]);
        logMass.push_back(std::log(hp_.alphaD) + prior[i] - logZ + lik[i]);
    }
    normalize_log_probs(logMass);
    cond.probs = std::move(logMass);
    return cond;
}

SeatingConditional GibbsSampler::table_conditional(int d, int t) const {
    if (tables_[d][t].chef != -1) throw std::logic_error("table_conditional: table must be detached");
    const auto& tab = tables_[d][t];
    SeatingConditional cond;
    std::vector<double> prior, lik;
    expand_cooperation(d, tab.tokenCounts, tab.customers, cond.choices, prior, lik);
    std::vector<double> logMass(prior.size());
    for (std::size_t i = 0; i < prior.size(); ++i) logMass[i] = prior[i] + lik[i];
    normalize_log_probs(logMass);
    cond.probs = std::move(logMass);
    return cond;
}

SeatingConditional GibbsSampler::option_conditional(int a, int o) const {
    if (options_[a][o].dish != -1) throw std::logic_error("option_conditional: option must be detached");
    const auto& opt = options_[a][o];
    SeatingConditional cond;
    std::vector<double> logMass;
    for (int k = 0; k < num_dishes(); ++k) {
        cond.choices.push_back({-1, a, o, k});
        logMass.push_back(std::log(static_cast<double>(dishes_[k].options)) +
                          block_loglik(opt.tokenCounts, opt.tokenTotal, &dishes_[k]));
    }
    cond.choices.push_back({-1, a, o, -1});
    logMass.push_back(std::log(hp_.alpha0) + block_loglik(opt.tokenCounts, opt.tokenTotal, nullptr));
    normalize_log_probs(logMass);
    cond.probs = std::move(logMass);
    return cond;
}

std::vector<double> GibbsSampler::aux_chef_probs(int d) const {
    if (hp_.coopMode != CoopMode::Superposition)
        throw std::logic_error("auxiliary-chef step requires Superposition mode");
    const auto& linked = data_.links[d];
    const int J = static_cast<int>(linked.size());
    std::vector<double> probs(linked.size());
    for (std::size_t j = 0; j < linked.size(); ++j) {
        double na = 0.0;
        for (const auto& tab : tables_[d])
            if (tab.chef == linked[j]) na += tab.customers;
        probs[j] = na + hp_.alphaD;
    }
    double denom = 0.0;
    for (const auto& tab : tables_[d]) denom += tab.customers;
    denom += J * hp_.alphaD;
    for (double& p : probs) p /= denom;
    return probs;
}

SeatingConditional GibbsSampler::customer_conditional_given_chef(int d, int n, int chef) const {
    if (customerTable_[d][n] != -1)
        throw std::logic_error("customer_conditional_given_chef: token must be detached");
    const int w = data_.tokens[d][n];
    SeatingConditional cond;
    std::vector<double> logMass;
    for (int t = 0; t < num_tables(d); ++t) {
        const auto& tab = tables_[d][t];
        if (tab.chef != chef) continue;
        const Dish& dish = dishes_[options_[tab.chef][tab.option].dish];
        cond.choices.push_back({t, tab.chef, tab.option, options_[tab.chef][tab.option].dish});
        logMass.push_back(std::log(static_cast<double>(tab.customers)) + token_loglik(w, &dish));
    }
    // new table from this chef's own menu, which is a normalized measure
    double denom = hp_.alphaA;
    for (const auto& opt : options_[chef]) denom += opt.tables;
    double sumO = 0.0;
    for (const auto& d2 : dishes_) sumO += d2.options;
    for (int o = 0; o < num_options(chef); ++o) {
        const auto& opt = options_[chef][o];
        cond.choices.push_back({-1, chef, o, opt.dish});
        logMass.push_back(std::log(hp_.alphaD) + std::log(static_cast<double>(opt.tables)) -
                          std::log(denom) + token_loglik(w, &dishes_[opt.dish]));
    }
    const double logNewOpt = std::log(hp_.alphaD) + std::log(hp_.alphaA) - std::log(denom);
    for (int k = 0; k < num_dishes(); ++k) {
        cond.choices.push_back({-1, chef, -1, k});
        logMass.push_back(logNewOpt + std::log(static_cast<double>(dishes_[k].options)) -
                          std::log(sumO + hp_.alpha0) + token_loglik(w, &dishes_[k]));
    }
    cond.choices.push_back({-1, chef, -1, -1});
    logMass.push_back(logNewOpt + std::log(hp_.alpha0) - std::log(sumO + hp_.alpha0) +
                      token_loglik(w, nullptr));
    normalize_log_probs(logMass);
    cond.probs = std::move(logMass);
    return cond;
}

// --- structural edits ---

void GibbsSampler::remove_table(int d, int t) {
    tables_[d].erase(tables_[d].begin() + t);
    for (int& ct : customerTable_[d])
        if (ct > t) --ct;
}

void GibbsSampler::remove_option(int a, int o) {
    options_[a].erase(options_[a].begin() + o);
    for (auto& docTables : tables_)
        for (auto& tab : docTables)
            if (tab.chef == a && tab.option > o) --tab.option;
}

void GibbsSampler::remove_dish(int k) {
    dishes_.erase(dishes_.begin() + k);
    for (auto& chefOptions : options_)
        for (auto& opt : chefOptions)
            if (opt.dish > k) --opt.dish;
}

void GibbsSampler::unlink_table_from_option(int d, int t) {
    Table& tab = tables_[d][t];
    const int a = tab.chef, o = tab.option;
    Option& opt = options_[a][o];
    Dish& dish = dishes_[opt.dish];
    opt.tables -= 1;
    for (int v = 0; v < data_.vocabSize; ++v) {
        opt.tokenCounts[v] -= tab.tokenCounts[v];
        dish.tokenCounts[v] -= tab.tokenCounts[v];
    }
    opt.tokenTotal -= tab.customers;
    dish.tokenTotal -= tab.customers;
    tab.chef = -1;
    tab.option = -1;
    if (opt.tables == 0) {
        const int k = opt.dish;
        remove_option(a, o);
        dishes_[k].options -= 1;
        if (dishes_[k].options == 0) remove_dish(k);
    }
}

void GibbsSampler::link_table_to_option(int d, int t, const SeatingChoice& choice) {
    Table& tab = tables_[d][t];
    const int a = choice.chef;
    int o = choice.option;
    if (o < 0) {  // new option; resolve its dish first
        int k = choice.dish;
        if (k < 0) {
            dishes_.push_back({0, std::vector<int>(data_.vocabSize, 0), 0});
            k = num_dishes() - 1;
        }
        options_[a].push_back({k, 0, std::vector<int>(data_.vocabSize, 0), 0});
        o = num_options(a) - 1;
        dishes_[k].options += 1;
    }
    Option& opt = options_[a][o];
    Dish& dish = dishes_[opt.dish];
    opt.tables += 1;
    for (int v = 0; v < data_.vocabSize; ++v) {
        opt.tokenCounts[v] += tab.tokenCounts[v];
        dish.tokenCounts[v] += tab.tokenCounts[v];
    }
    opt.tokenTotal += tab.customers;
    dish.tokenTotal += tab.customers;
    tab.chef = a;
    tab.option = o;
}

void GibbsSampler::detach_customer(int d, int n) {
    const int t = customerTable_[d][n];
    if (t < 0) throw std::logic_error("detach_customer: already detached");
    const int w = data_.tokens[d][n];
    Table& tab = tables_[d][t];
    Option& opt = options_[tab.chef][tab.option];
    Dish& dish = dishes_[opt.dish];
    tab.customers -= 1;
    tab.tokenCounts[w] -= 1;
    opt.tokenCounts[w] -= 1;
    opt.tokenTotal -= 1;
    dish.tokenCounts[w] -= 1;
    dish.tokenTotal -= 1;
    customerTable_[d][n] = -1;
    if (tab.customers == 0) {
        unlink_table_from_option(d, t);
        remove_table(d, t);
    }
}

void GibbsSampler::attach_customer(int d, int n, const SeatingChoice& choice) {
    const int w = data_.tokens[d][n];
    int t = choice.table;
    if (t < 0) {
        tables_[d].push_back({-1, -1, 0, std::vector<int>(data_.vocabSize, 0)});
        t = num_tables(d) - 1;
        Table& tab = tables_[d][t];
        tab.customers = 1;
        tab.tokenCounts[w] = 1;
        link_table_to_option(d, t, choice);
        customerTable_[d][n] = t;
        return;
    }
    Table& tab = tables_[d][t];
    Option& opt = options_[tab.chef][tab.option];
    Dish& dish = dishes_[opt.dish];
    tab.customers += 1;
    tab.tokenCounts[w] += 1;
    opt.tokenCounts[w] += 1;
    opt.tokenTotal += 1;
    dish.tokenCounts[w] += 1;
    dish.tokenTotal += 1;
    customerTable_[d][n] = t;
}

void GibbsSampler::detach_table(int d, int t) {
    if (tables_[d][t].chef < 0) throw std::logic_error("detach_table: already detached");
    unlink_table_from_option(d, t);
}

void GibbsSampler::attach_table(int d, int t, const SeatingChoice& choice) {
    if (tables_[d][t].chef >= 0) throw std::logic_error("attach_table: table not detached");
    link_table_to_option(d, t, choice);
}

void GibbsSampler::detach_option(int a, int o) {
    Option& opt = options_[a][o];
    if (opt.dish < 0) throw std::logic_error("detach_option: already detached");
    const int k = opt.dish;
    Dish& dish = dishes_[k];
    dish.options -= 1;
    for (int v = 0; v < data_.vocabSize; ++v) dish.tokenCounts[v] -= opt.tokenCounts[v];
    dish.tokenTotal -= opt.tokenTotal;
    opt.dish = -1;
    if (dish.options == 0) remove_dish(k);
}

void GibbsSampler::attach_option(int a, int o, const SeatingChoice& choice) {
    Option& opt = options_[a][o];
    if (opt.dish >= 0) throw std::logic_error("attach_option: option not detached");
    int k = choice.dish;
    if (k < 0) {
        dishes_.push_back({0, std::vector<int>(data_.vocabSize, 0), 0});
        k = num_dishes() - 1;
    }
    Dish& dish = dishes_[k];
    dish.options += 1;
    for (int v = 0; v < data_.vocabSize; ++v) dish.tokenCounts[v] += opt.tokenCounts[v];
    dish.tokenTotal += opt.tokenTotal;
    opt.dish = k;
}

// --- sampling loop ---

void GibbsSampler::init() {
    for (int d = 0; d < data_.numMiddle; ++d) {
        for (int n = 0; n < static_cast<int>(data_.tokens[d].size()); ++n) {
            const auto cond = customer_conditional(d, n);
            attach_customer(d, n, cond.choices[sample_categorical(cond.probs, rng_)]);
        }
    }
    initialized_ = true;
}

void GibbsSampler::sweep() {
    if (!initialized_) throw std::logic_error("sweep: sampler not initialized");
    for (int d = 0; d < data_.numMiddle; ++d) {
        for (int n = 0; n < static_cast<int>(data_.tokens[d].size()); ++n) {
            detach_customer(d, n);
            if (opts_.useAuxiliaryChef) {
                const auto chefProbs = aux_chef_probs(d);
                const int chef = data_.links[d][sample_categorical(chefProbs, rng_)];
                const auto cond = customer_conditional_given_chef(d, n, chef);
                attach_customer(d, n, cond.choices[sample_categorical(cond.probs, rng_)]);
            } else {
                const auto cond = customer_conditional(d, n);
                attach_customer(d, n, cond.choices[sample_categorical(cond.probs, rng_)]);
            }
        }
        for (int t = 0; t < num_tables(d); ++t) {
            detach_table(d, t);
            const auto cond = table_conditional(d, t);
            attach_table(d, t, cond.choices[sample_categorical(cond.probs, rng_)]);
        }
    }
    for (int a = 0; a < data_.numUpper; ++a) {
        for (int o = 0; o < num_options(a); ++o) {
            detach_option(a, o);
            const auto cond = option_conditional(a, o);
            attach_option(a, o, cond.choices[sample_categorical(cond.probs, rng_)]);
        }
    }
    ++iteration;
}

ChainTrace GibbsSampler::run_chain(int numSamples, int burnIn,
                                   std::vector<std::vector<double>>* meanInterests) {
    if (numSamples < 1) throw std::invalid_argument("run_chain: numSamples must be >= 1");
    if (!initialized_) init();
    for (int i = 0; i < burnIn; ++i) sweep();
    ChainTrace trace;
    trace.loglik.reserve(numSamples);
    trace.kCount.reserve(numSamples);
    if (meanInterests)
        meanInterests->assign(data_.numUpper, std::vector<double>(data_.vocabSize, 0.0));
    for (int i = 0; i < numSamples; ++i) {
        sweep();
        trace.loglik.push_back(joint_loglik());
        trace.kCount.push_back(num_dishes());
        if (meanInterests) {
            const auto rows = author_interest_rows();
            for (int a = 0; a < data_.numUpper; ++a)
                for (int v = 0; v < data_.vocabSize; ++v) (*meanInterests)[a][v] += rows[a][v];
        }
    }
    if (meanInterests)
        for (auto& row : *meanInterests)
            for (double& x : row) x /= numSamples;
    return trace;
}

// --- queries ---

std::vector<double> GibbsSampler::dish_posterior(int k) const {
    if (k < 0 || k >= num_dishes()) throw std::out_of_range("dish_posterior: dead dish index");
    std::vector<double> out(data_.vocabSize, hp_.eta);
    for (int v = 0; v < data_.vocabSize; ++v) out[v] += dishes_[k].tokenCounts[v];
    return out;
}

double GibbsSampler::joint_loglik() const {
    double ll = 0.0;
    for (const auto& dish : dishes_) ll += log_marginal_dm(dish.tokenCounts, hp_.eta, data_.vocabSize);
    return ll;
}

WeightVector GibbsSampler::author_topic_weights(int a) const {
    const int K = num_dishes();
    WeightVector w(K, 0.0);
    double total = 0.0;
    for (const auto& opt : options_[a]) {
        w[opt.dish] += opt.tables;
        total += opt.tables;
    }
    if (total == 0.0) return WeightVector(K, K > 0 ? 1.0 / K : 0.0);
    for (double& x : w) x /= total;
    return w;
}

std::vector<std::vector<double>> GibbsSampler::author_interest_rows() const {
    const int K = num_dishes();
    const double Veta = data_.vocabSize * hp_.eta;
    std::vector<std::vector<double>> theta(K, std::vector<double>(data_.vocabSize));
    for (int k = 0; k < K; ++k)
        for (int v = 0; v < data_.vocabSize; ++v)
            theta[k][v] = (hp_.eta + dishes_[k].tokenCounts[v]) / (Veta + dishes_[k].tokenTotal);
    std::vector<std::vector<double>> rows(data_.numUpper, std::vector<double>(data_.vocabSize, 0.0));
    for (int a = 0; a < data_.numUpper; ++a) {
        const auto pi = author_topic_weights(a);
        for (int k = 0; k < K; ++k)
            for (int v = 0; v < data_.vocabSize; ++v) rows[a][v] += pi[k] * theta[k][v];
        normalize_weights(rows[a]);
    }
    return rows;
}

std::vector<std::vector<int>> GibbsSampler::dish_partition() const {
    std::vector<std::vector<int>> blocks(num_dishes());
    int globalId = 0;
    for (int d = 0; d < data_.numMiddle; ++d) {
        for (int n = 0; n < static_cast<int>(data_.tokens[d].size()); ++n, ++globalId) {
            const int t = customerTable_[d][n];
            const auto& tab = tables_[d][t];
            blocks[options_[tab.chef][tab.option].dish].push_back(globalId);
        }
    }
    std::sort(blocks.begin(), blocks.end());
    blocks.erase(std::remove_if(blocks.begin(), blocks.end(),
                                [](const auto& b) { return b.empty(); }),
                 blocks.end());
    return blocks;
}

void GibbsSampler::check_invariants() const {
    auto fail = [](const std::string& what) { throw std::logic_error("GibbsState invariant: " + what); };
    std::vector<int> optionTables;  // flattened check accumulators
    for (int d = 0; d < data_.numMiddle; ++d) {
        int seated = 0;
        std::vector<int> tableCustomers(num_tables(d), 0);
        for (int n = 0; n < static_cast<int>(data_.tokens[d].size()); ++n) {
            const int t = customerTable_[d][n];
            if (t < 0 || t >= num_tables(d)) fail("customerTable out of range in doc " + std::to_string(d));
            ++tableCustomers[t];
            ++seated;
        }
        if (seated != static_cast<int>(data_.tokens[d].size())) fail("N_d mismatch");
        for (int t = 0; t < num_tables(d); ++t) {
            const auto& tab = tables_[d][t];
            if (tab.customers != tableCustomers[t]) fail("N_{d,t} mismatch at d=" + std::to_string(d));
            if (tab.customers < 1) fail("empty live table");
            if (std::find(data_.links[d].begin(), data_.links[d].end(), tab.chef) == data_.links[d].end())
                fail("table references chef outside the link list");
            if (tab.option < 0 || tab.option >= num_options(tab.chef)) fail("table option out of range");
            int s = std::accumulate(tab.tokenCounts.begin(), tab.tokenCounts.end(), 0);
            if (s != tab.customers) fail("table token counts != customers");
        }
    }
    std::vector<int> dishOptions(num_dishes(), 0);
    std::vector<std::vector<int>> dishTokens(num_dishes(), std::vector<int>(data_.vocabSize, 0));
    for (int a = 0; a < data_.numUpper; ++a) {
        for (int o = 0; o < num_options(a); ++o) {
            const auto& opt = options_[a][o];
            int refTables = 0;
            std::vector<int> refCounts(data_.vocabSize, 0);
            for (int d = 0; d < data_.numMiddle; ++d)
                for (const auto& tab : tables_[d])
                    if (tab.chef == a && tab.option == o) {
                        ++refTables;
                        for (int v = 0; v < data_.vocabSize; ++v) refCounts[v] += tab.tokenCounts[v];
                    }
            if (opt.tables != refTables) fail("T_{a,o} mismatch at a=" + std::to_string(a));
            if (opt.tables < 1) fail("empty live option");
            if (opt.tokenCounts != refCounts) fail("option token counts mismatch");
            if (opt.dish < 0 || opt.dish >= num_dishes()) fail("option dish out of range");
            ++dishOptions[opt.dish];
            for (int v = 0; v < data_.vocabSize; ++v) dishTokens[opt.dish][v] += opt.tokenCounts[v];
        }
    }
    int totalTokens = 0;
    for (int k = 0; k < num_dishes(); ++k) {
        if (dishes_[k].options != dishOptions[k]) fail("O_k mismatch at k=" + std::to_string(k));
        if (dishes_[k].options < 1) fail("empty live dish");
        if (dishes_[k].tokenCounts != dishTokens[k]) fail("dish token counts mismatch");
        totalTokens += dishes_[k].tokenTotal;
    }
    if (initialized_ && totalTokens != data_.totalTokens()) fail("total token conservation");
}

// --- checkpoint plumbing ---

std::string GibbsSampler::serialize_state() const {
    nlohmann::json j;
    j["customerTable"] = customerTable_;
    nlohmann::json jt = nlohmann::json::array();
    for (const auto& docTables : tables_) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& tab : docTables)
            arr.push_back({{"chef", tab.chef},
                           {"option", tab.option},
                           {"customers", tab.customers},
                           {"tokenCounts", tab.tokenCounts}});
        jt.push_back(arr);
    }
    j["tables"] = jt;
    nlohmann::json jo = nlohmann::json::array();
    for (const auto& chefOptions : options_) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& opt : chefOptions)
            arr.push_back({{"dish", opt.dish},
                           {"tables", opt.tables},
                           {"tokenCounts", opt.tokenCounts},
                           {"tokenTotal", opt.tokenTotal}});
        jo.push_back(arr);
    }
    j["options"] = jo;
    nlohmann::json jd = nlohmann::json::array();
    for (const auto& dish : dishes_)
        jd.push_back({{"options", dish.options},
                      {"tokenCounts", dish.tokenCounts},
                      {"tokenTotal", dish.tokenTotal}});
    j["dishes"] = jd;
    std::ostringstream rs;
    rs << rng_;
    j["rng"] = rs.str();
    j["iteration"] = iteration;
    j["initialized"] = initialized_;
    return j.dump();
}

void GibbsSampler::restore_state(const std::string& blob) {
    const auto j = nlohmann::json::parse(blob);
    customerTable_ = j.at("customerTable").get<std::vector<std::vector<int>>>();
    tables_.assign(data_.numMiddle, {});
    for (int d = 0; d < data_.numMiddle; ++d)
        for (const auto& e : j.at("tables")[d])
            tables_[d].push_back({e.at("chef").get<int>(), e.at("option").get<int>(),
                                  e.at("customers").get<int>(),
                                  e.at("tokenCounts").get<std::vector<int>>()});
    options_.assign(data_.numUpper, {});
    for (int a = 0; a < data_.numUpper; ++a)
        for (const auto& e : j.at("options")[a])
            options_[a].push_back({e.at("dish").get<int>(), e.at("tables").get<int>(),
                                   e.at("tokenCounts").get<std::vector<int>>(),
                                   e.at("tokenTotal").get<int>()});
    dishes_.clear();
    for (const auto& e : j.at("dishes"))
        dishes_.push_back({e.at("options").get<int>(), e.at("tokenCounts").get<std::vector<int>>(),
                           e.at("tokenTotal").get<int>()});
    std::istringstream rs(j.at("rng").get<std::string>());
    rs >> rng_;
    iteration = j.at("iteration").get<int>();
    initialized_ = j.at("initialized").get<bool>();
    check_invariants();
}

}  // namespace chdp
