// Acceptance harness: one criterion per invocation (argv[1] in 1..8), or all
// when run without arguments. Each criterion prints a single PASS/FAIL line;
// the exit code is nonzero if any requested criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "diagnostics.hpp"
#include "evaluation.hpp"
#include "gibbs.hpp"
#include "io.hpp"
#include "mathutil.hpp"
#include "synthetic.hpp"
#include "vi.hpp"

using namespace chdp;

namespace {

bool g_verbose = true;

void report(int crit, const std::string& name, bool pass, const std::string& detail) {
    std::printf("criterion %d (%s): %s%s%s\n", crit, name.c_str(), pass ? "PASS" : "FAIL",
                detail.empty() ? "" : " — ", detail.c_str());
    std::fflush(stdout);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------- criterion 1
// With exactly one upper node per doc, both cooperation modes collapse to the
// two-level CRF of an HDP. The oracle below recomputes every customer and
// table conditional from the published counts with the plain HDP formulas.

struct AtomKey {
    int table, chef, option, dish;
    bool operator<(const AtomKey& o) const {
        return std::tie(table, chef, option, dish) < std::tie(o.table, o.chef, o.option, o.dish);
    }
};

std::map<AtomKey, double> to_map(const SeatingConditional& cond) {
    std::map<AtomKey, double> m;
    for (std::size_t i = 0; i < cond.choices.size(); ++i) {
        const auto& c = cond.choices[i];
        m[{c.table, c.chef, c.option, c.dish}] += cond.probs[i];
    }
    return m;
}

// HDP predictive mass of a token block under one dish (or a fresh dish).
double hdp_block_lik(const GibbsSampler& s, const std::vector<int>& counts, int total,
                     const Dish* dish, double eta, int V) {
    (void)s;
    if (dish == nullptr) return std::exp(log_marginal_dm(counts, eta, V));
    double out = std::lgamma(V * eta + dish->tokenTotal) -
                 std::lgamma(V * eta + dish->tokenTotal + total);
    for (int v = 0; v < V; ++v)
        if (counts[v] > 0)
            out += std::lgamma(eta + dish->tokenCounts[v] + counts[v]) -
                   std::lgamma(eta + dish->tokenCounts[v]);
    return std::exp(out);
}

std::map<AtomKey, double> hdp_oracle_customer(const GibbsSampler& s, int d, int n,
                                              const Hyperparams& hp) {
    const int V = s.data().vocabSize;
    const int a = s.data().links[d][0];
    const int w = s.data().tokens[d][n];
    std::vector<int> block(V, 0);
    block[w] = 1;
    std::map<AtomKey, double> m;
    double total = 0.0;
    for (int t = 0; t < s.num_tables(d); ++t) {
        const auto& tab = s.tables(d)[t];
        const auto& opt = s.options(tab.chef)[tab.option];
        const double mass =
            tab.customers * hdp_block_lik(s, block, 1, &s.dishes()[opt.dish], hp.eta, V);
        m[{t, tab.chef, tab.option, opt.dish}] = mass;
        total += mass;
    }
    double sumT = hp.alphaA;
    for (const auto& opt : s.options(a)) sumT += opt.tables;
    double sumO = hp.alpha0;
    for (const auto& dish : s.dishes()) sumO += dish.options;
    for (int o = 0; o < s.num_options(a); ++o) {
        const auto& opt = s.options(a)[o];
        const double mass = hp.alphaD * (opt.tables / sumT) *
                            hdp_block_lik(s, block, 1, &s.dishes()[opt.dish], hp.eta, V);
        m[{-1, a, o, opt.dish}] = mass;
        total += mass;
    }
    for (int k = 0; k < s.num_dishes(); ++k) {
        const double mass = hp.alphaD * (hp.alphaA / sumT) * (s.dishes()[k].options / sumO) *
                            hdp_block_lik(s, block, 1, &s.dishes()[k], hp.eta, V);
        m[{-1, a, -1, k}] = mass;
        total += mass;
    }
    {
        const double mass = hp.alphaD * (hp.alphaA / sumT) * (hp.alpha0 / sumO) *
                            hdp_block_lik(s, block, 1, nullptr, hp.eta, V);
        m[{-1, a, -1, -1}] = mass;
        total += mass;
    }
    for (auto& [k, v] : m) v /= total;
    return m;
}

std::map<AtomKey, double> hdp_oracle_table(const GibbsSampler& s, int d, int t,
                                           const Hyperparams& hp) {
    const int V = s.data().vocabSize;
    const int a = s.data().links[d][0];
    const auto& tab = s.tables(d)[t];
    std::map<AtomKey, double> m;
    double total = 0.0;
    double sumT = hp.alphaA;
    for (const auto& opt : s.options(a)) sumT += opt.tables;
    double sumO = hp.alpha0;
    for (const auto& dish : s.dishes()) sumO += dish.options;
    for (int o = 0; o < s.num_options(a); ++o) {
        const auto& opt = s.options(a)[o];
        const double mass =
            (opt.tables / sumT) *
            hdp_block_lik(s, tab.tokenCounts, tab.customers, &s.dishes()[opt.dish], hp.eta, V);
        m[{-1, a, o, opt.dish}] = mass;
        total += mass;
    }
    for (int k = 0; k < s.num_dishes(); ++k) {
        const double mass = (hp.alphaA / sumT) * (s.dishes()[k].options / sumO) *
                            hdp_block_lik(s, tab.tokenCounts, tab.customers, &s.dishes()[k],
                                          hp.eta, V);
        m[{-1, a, -1, k}] = mass;
        total += mass;
    }
    {
        const double mass =
            (hp.alphaA / sumT) * (hp.alpha0 / sumO) *
            hdp_block_lik(s, tab.tokenCounts, tab.customers, nullptr, hp.eta, V);
        m[{-1, a, -1, -1}] = mass;
        total += mass;
    }
    for (auto& [k, v] : m) v /= total;
    return m;
}

bool maps_match(const std::map<AtomKey, double>& got, const std::map<AtomKey, double>& want,
                double tol, std::string& why) {
    if (got.size() != want.size()) {
        why = "atom count mismatch";
        return false;
    }
    for (const auto& [k, v] : want) {
        const auto it = got.find(k);
        if (it == got.end()) {
            why = "missing atom";
            return false;
        }
        if (std::fabs(it->second - v) > tol) {
            std::ostringstream os;
            os << "prob mismatch " << it->second << " vs " << v;
            why = os.str();
            return false;
        }
    }
    return true;
}

bool criterion1() {
    std::mt19937_64 meta(12345);
    const double tol = 1e-12;
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int A = 1 + static_cast<int>(meta() % 3);
        const int D = 1 + static_cast<int>(meta() % 3);
        const int V = 2 + static_cast<int>(meta() % 3);
        const int tok = 1 + static_cast<int>(meta() % 5);
        auto chs = generate_chs(A, D, V, 0.6, tok, meta());
        chs = degenerate_to_type1(chs, meta());  // exactly one upper node per doc
        Hyperparams hp;
        const double grid[3] = {0.5, 1.0, 2.0};
        hp.alpha0 = grid[meta() % 3];
        hp.alphaA = grid[meta() % 3];
        hp.alphaD = grid[meta() % 3];
        hp.coopMode = (trial % 2 == 0) ? CoopMode::Superposition : CoopMode::Maximization;
        hp.seed = meta();
        GibbsSampler s(chs, hp);
        s.init();
        for (int i = 0; i < 3; ++i) s.sweep();
        for (int d = 0; d < chs.numMiddle; ++d) {
            for (int n = 0; n < static_cast<int>(chs.tokens[d].size()); ++n) {
                s.detach_customer(d, n);
                const auto cond = s.customer_conditional(d, n);
                const auto want = hdp_oracle_customer(s, d, n, hp);
                std::string why;
                if (!maps_match(to_map(cond), want, tol, why)) {
                    report(1, "hdp-degeneration", false,
                           "customer conditional trial " + std::to_string(trial) + ": " + why);
                    return false;
                }
                s.attach_customer(d, n, cond.choices[0]);
                ++checked;
            }
            for (int t = 0; t < s.num_tables(d); ++t) {
                s.detach_table(d, t);
                const auto cond = s.table_conditional(d, t);
                const auto want = hdp_oracle_table(s, d, t, hp);
                std::string why;
                if (!maps_match(to_map(cond), want, tol, why)) {
                    report(1, "hdp-degeneration", false,
                           "table conditional trial " + std::to_string(trial) + ": " + why);
                    return false;
                }
                s.attach_table(d, t, cond.choices[0]);
                ++checked;
            }
        }
        s.check_invariants();
    }
    report(1, "hdp-degeneration", true,
           std::to_string(checked) + " conditionals matched to 1e-12 across 100 states");
    return true;
}

// ---------------------------------------------------------------- criterion 2
// Exact posterior over dish partitions of a 3-token instance by enumerating
// the sequential seating process, versus the empirical distribution of long
// Gibbs runs.

struct EnumTable {
    int chef = -1, opt = -1;
    std::vector<int> toks;  // global token ids
};

struct EnumState {
    std::vector<std::vector<EnumTable>> tables;  // per doc
    std::vector<std::vector<int>> optDish;       // [chef][opt] -> dish
    std::vector<int> dishOpts;
};

struct EnumAtom {
    double w;
    int chef, opt, dish;  // opt -1 = new option; dish -1 = new dish
};

std::vector<EnumAtom> coop_atoms(const EnumState& st, const std::vector<int>& linked,
                                 CoopMode mode, const Hyperparams& hp) {
    const int K = static_cast<int>(st.dishOpts.size());
    const int J = static_cast<int>(linked.size());
    // tables per (chef, option)
    auto tcount = [&](int a, int o) {
        int c = 0;
        for (const auto& doc : st.tables)
            for (const auto& t : doc)
                if (t.chef == a && t.opt == o) ++c;
        return c;
    };
    auto tsum = [&](int a) {
        int c = 0;
        for (const auto& doc : st.tables)
            for (const auto& t : doc)
                if (t.chef == a) ++c;
        return c;
    };
    double sumO = hp.alpha0;
    for (int k = 0; k < K; ++k) sumO += st.dishOpts[k];
    std::vector<EnumAtom> atoms;
    std::vector<int> winner(K, -1);
    if (mode == CoopMode::Maximization) {
        std::vector<double> best(K, -1.0);
        for (int a : linked) {
            const double denom = tsum(a) + hp.alphaA;
            std::vector<double> ratio(K, 0.0);
            for (int o = 0; o < static_cast<int>(st.optDish[a].size()); ++o)
                ratio[st.optDish[a][o]] += tcount(a, o) / denom;
            for (int k = 0; k < K; ++k)
                if (ratio[k] > best[k]) {
                    best[k] = ratio[k];
                    winner[k] = a;
                }
        }
    }
    for (int a : linked) {
        const double denom = tsum(a) + hp.alphaA;
        const double share = mode == CoopMode::Superposition ? 1.0 / J : 1.0;
        for (int o = 0; o < static_cast<int>(st.optDish[a].size()); ++o) {
            const int c = tcount(a, o);
            if (c == 0) continue;
            if (mode == CoopMode::Maximization && winner[st.optDish[a][o]] != a) continue;
            atoms.push_back({share * c / denom, a, o, st.optDish[a][o]});
        }
        const double newOpt = share * hp.alphaA / denom;
        for (int k = 0; k < K; ++k)
            atoms.push_back({newOpt * st.dishOpts[k] / sumO, a, -1, k});
        atoms.push_back({newOpt * hp.alpha0 / sumO, a, -1, -1});
    }
    double total = 0.0;
    for (const auto& at : atoms) total += at.w;
    for (auto& at : atoms) at.w /= total;
    return atoms;
}

void enumerate_rec(const CoopHierarchy& chs, const Hyperparams& hp, EnumState st, int pos,
                   const std::vector<std::pair<int, int>>& order, double prob,
                   std::map<std::string, double>& out) {
    if (pos == static_cast<int>(order.size())) {
        // likelihood: per-dish Dirichlet-multinomial of the gathered tokens
        const int K = static_cast<int>(st.dishOpts.size());
        std::vector<std::vector<int>> counts(K, std::vector<int>(chs.vocabSize, 0));
        std::vector<std::vector<int>> blocks(K);
        for (int d = 0; d < chs.numMiddle; ++d)
            for (const auto& t : st.tables[d]) {
                const int k = st.optDish[t.chef][t.opt];
                for (int id : t.toks) {
                    blocks[k].push_back(id);
                    // recover the word of global token id
                    int rem = id, dd = 0;
                    while (rem >= static_cast<int>(chs.tokens[dd].size())) {
                        rem -= static_cast<int>(chs.tokens[dd].size());
                        ++dd;
                    }
                    counts[k][chs.tokens[dd][rem]] += 1;
                }
            }
        double ll = 0.0;
        for (int k = 0; k < K; ++k)
            if (!blocks[k].empty()) ll += log_marginal_dm(counts[k], hp.eta, chs.vocabSize);
        std::vector<std::vector<int>> live;
        for (auto& b : blocks)
            if (!b.empty()) {
                std::sort(b.begin(), b.end());
                live.push_back(b);
            }
        std::sort(live.begin(), live.end());
        std::ostringstream key;
        for (const auto& b : live) {
            for (int id : b) key << id << ' ';
            key << '|';
        }
        out[key.str()] += prob * std::exp(ll);
        return;
    }
    const auto [d, n] = order[pos];
    int gid = 0;
    for (int dd = 0; dd < d; ++dd) gid += static_cast<int>(chs.tokens[dd].size());
    gid += n;
    int nd = 0;
    for (const auto& t : st.tables[d]) nd += static_cast<int>(t.toks.size());
    const double denom = nd + hp.alphaD;
    for (std::size_t t = 0; t < st.tables[d].size(); ++t) {
        EnumState next = st;
        next.tables[d][t].toks.push_back(gid);
        enumerate_rec(chs, hp, std::move(next), pos + 1, order,
                      prob * st.tables[d][t].toks.size() / denom, out);
    }
    for (const auto& atom : coop_atoms(st, chs.links[d], hp.coopMode, hp)) {
        EnumState next = st;
        int opt = atom.opt;
        if (opt < 0) {
            int k = atom.dish;
            if (k < 0) {
                next.dishOpts.push_back(0);
                k = static_cast<int>(next.dishOpts.size()) - 1;
            }
            next.optDish[atom.chef].push_back(k);
            opt = static_cast<int>(next.optDish[atom.chef].size()) - 1;
            next.dishOpts[k] += 1;
        }
        EnumTable tab;
        tab.chef = atom.chef;
        tab.opt = opt;
        tab.toks.push_back(gid);
        next.tables[d].push_back(tab);
        enumerate_rec(chs, hp, std::move(next), pos + 1, order,
                      prob * (hp.alphaD / denom) * atom.w, out);
    }
}

std::string partition_key(const std::vector<std::vector<int>>& part) {
    std::ostringstream key;
    for (const auto& b : part) {
        for (int id : b) key << id << ' ';
        key << '|';
    }
    return key.str();
}

bool criterion2() {
    CoopHierarchy chs;
    chs.numUpper = 2;
    chs.numMiddle = 2;
    chs.vocabSize = 2;
    chs.links = {{0, 1}, {0}};
    chs.tokens = {{0, 1}, {0}};
    chs.validate();
    bool ok = true;
    std::string detail;
    for (CoopMode mode : {CoopMode::Superposition, CoopMode::Maximization}) {
        Hyperparams hp;
        hp.coopMode = mode;
        hp.seed = 99;
        std::map<std::string, double> exact;
        EnumState st;
        st.tables.resize(2);
        st.optDish.resize(2);
        std::vector<std::pair<int, int>> order{{0, 0}, {0, 1}, {1, 0}};
        enumerate_rec(chs, hp, st, 0, order, 1.0, exact);
        double z = 0.0;
        for (const auto& [k, v] : exact) z += v;
        for (auto& [k, v] : exact) v /= z;

        GibbsSampler s(chs, hp);
        s.init();
        for (int i = 0; i < 500; ++i) s.sweep();
        std::map<std::string, double> emp;
        const int S = 50000;
        for (int i = 0; i < S; ++i) {
            s.sweep();
            emp[partition_key(s.dish_partition())] += 1.0 / S;
        }
        double tv = 0.0;
        for (const auto& [k, v] : exact) {
            const auto it = emp.find(k);
            tv += std::fabs(v - (it == emp.end() ? 0.0 : it->second));
        }
        for (const auto& [k, v] : emp)
            if (exact.find(k) == exact.end()) tv += v;
        tv *= 0.5;
        std::ostringstream os;
        os << to_string(mode) << " TV=" << tv;
        detail += (detail.empty() ? "" : "; ") + os.str();
        if (tv > 0.05) ok = false;
    }
    report(2, "small-instance-exactness", ok, detail);
    return ok;
}

// ---------------------------------------------------------------- criterion 3
// Interest recovery: for data generated under each cooperation mode, the
// matched model must attain the lowest recovery distance in at least 7/10
// seeds (competitors: the other cooperation mode and an HDP on the corpus
// reduced to one author per doc).

std::vector<std::vector<double>> fit_mean_interests(const CoopHierarchy& chs, CoopMode mode,
                                                    std::uint64_t seed, int samples, int burn) {
    Hyperparams hp;
    hp.coopMode = mode;
    hp.seed = seed;
    GibbsSampler s(chs, hp);
    std::vector<std::vector<double>> interests;
    s.run_chain(samples, burn, &interests);
    return interests;
}

bool criterion3() {
    // The S-vs-M separation is small relative to single-chain noise (aggregate
    // margins ~0.003-0.008 against per-chain std ~0.03), so each model's
    // distance is the mean over 12 fixed-seed chains of 300+300 sweeps.
    const int kChains = 12;
    bool ok = true;
    std::string detail;
    for (CoopMode dataMode : {CoopMode::Superposition, CoopMode::Maximization}) {
        int matchedWins = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto ds = generate_recovery(dataMode, seed);
            const auto& truth = ds.truth.authorInterests;
            double dist[3] = {0.0, 0.0, 0.0};
            for (int c = 0; c < kChains; ++c) {
                const std::uint64_t cs = 40000 + seed * 101 + c;
                dist[0] += recovery_distance(
                    fit_mean_interests(ds.data, CoopMode::Superposition, cs, 300, 300), truth);
                dist[1] += recovery_distance(
                    fit_mean_interests(ds.data, CoopMode::Maximization, cs, 300, 300), truth);
            }
            dist[0] /= kChains;
            dist[1] /= kChains;
            // HDP baseline: one author per doc; dropped authors get uniform
            // rows. Its margin is large (~0.05+), so two chains suffice.
            for (int c = 0; c < 2; ++c) {
                std::vector<int> remap;
                const auto deg = degenerate_to_type1(ds.data, seed * 31 + c, &remap);
                const auto degRows = fit_mean_interests(deg, CoopMode::Superposition,
                                                        40000 + seed * 101 + c, 200, 200);
                std::vector<std::vector<double>> hdpRows(
                    ds.data.numUpper,
                    std::vector<double>(ds.data.vocabSize, 1.0 / ds.data.vocabSize));
                for (int a = 0; a < ds.data.numUpper; ++a)
                    if (remap[a] >= 0) hdpRows[a] = degRows[remap[a]];
                dist[2] += recovery_distance(hdpRows, truth);
            }
            dist[2] /= 2;
            const int matched = dataMode == CoopMode::Superposition ? 0 : 1;
            if (dist[matched] < dist[(matched + 1) % 2] && dist[matched] < dist[2])
                ++matchedWins;
        }
        std::ostringstream os;
        os << to_string(dataMode) << " data: matched model lowest in " << matchedWins << "/10";
        detail += (detail.empty() ? "" : "; ") + os.str();
        if (matchedWins < 7) ok = false;
    }
    report(3, "interest-recovery-ordering", ok, detail);
    return ok;
}

// ---------------------------------------------------------------- criterion 4
bool criterion4() {
    const auto chs = generate_chs(20, 50, 100, 0.3, 10, 2024);
    bool ok = true;
    std::string detail;
    for (CoopMode mode : {CoopMode::Superposition, CoopMode::Maximization}) {
        std::vector<std::vector<double>> llChains, kChains;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            Hyperparams hp;
            hp.coopMode = mode;
            hp.alpha0 = hp.alphaA = hp.alphaD = 1.0;
            hp.eta = 0.5;
            hp.seed = seed;
            GibbsSampler s(chs, hp);
            const auto trace = s.run_chain(2000, 500);
            llChains.push_back(trace.loglik);
            kChains.emplace_back(trace.kCount.begin(), trace.kCount.end());
        }
        const double psrfLL = psrf(llChains);
        const double psrfK = psrf(kChains);
        double worstAcf = 0.0;
        for (const auto& chain : llChains)
            for (int lag : {200, 350, 500})
                worstAcf = std::max(worstAcf, std::fabs(acf(chain, lag)));
        std::ostringstream os;
        os << to_string(mode) << ": psrf(loglik)=" << psrfLL << " psrf(K)=" << psrfK
           << " max|acf|@lag>=200=" << worstAcf;
        detail += (detail.empty() ? "" : "; ") + os.str();
        if (psrfLL >= 1.2 || psrfK >= 1.2 || worstAcf >= 0.1) ok = false;
    }
    report(4, "mixing-diagnostics", ok, detail);
    return ok;
}

// ---------------------------------------------------------------- criterion 5
// Structure-only prior scaling: the dish count responds to the top-layer
// concentration at least twice as strongly as to the lower concentrations.
double mean_k_for(const CoopHierarchy& chs, double a0, double aa, double ad) {
    double acc = 0.0;
    int n = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        Hyperparams hp;
        hp.alpha0 = a0;
        hp.alphaA = aa;
        hp.alphaD = ad;
        hp.seed = 7000 + seed;
        GibbsOptions opts;
        opts.ignoreLikelihood = true;
        GibbsSampler s(chs, hp, opts);
        const auto trace = s.run_chain(200, 100);
        for (int k : trace.kCount) {
            acc += k;
            ++n;
        }
    }
    return acc / n;
}

bool criterion5() {
    const int D = 20, A = 10, V = 2 * D;
    const auto chs = generate_chs(A, D, V, 0.3, 10, 555);
    std::vector<double> xs;
    for (int i = 1; i <= 10; ++i) xs.push_back(i);
    std::vector<double> k0, kA, kD;
    for (int i = 1; i <= 10; ++i) k0.push_back(mean_k_for(chs, i, 1.0, 1.0));
    for (int i = 1; i <= 10; ++i) kA.push_back(mean_k_for(chs, 1.0, i, 1.0));
    for (int i = 1; i <= 10; ++i) kD.push_back(mean_k_for(chs, 1.0, 1.0, i));
    const double s0 = ls_slope(xs, k0), sA = ls_slope(xs, kA), sD = ls_slope(xs, kD);
    const bool ok = s0 > 0.0 && s0 >= 2.0 * std::fabs(sA) && s0 >= 2.0 * std::fabs(sD);
    std::ostringstream os;
    os << "slope(alpha0)=" << s0 << " slope(alphaA)=" << sA << " slope(alphaD)=" << sD;
    report(5, "concentration-scaling", ok, os.str());
    return ok;
}

// ---------------------------------------------------------------- criterion 6
bool criterion6() {
    bool ok = true;
    std::string detail;
    // (a) Maximization stick gradients against central finite differences of
    // the fixed-batch surrogate on a two-chef toy.
    {
        CoopHierarchy chs;
        chs.numUpper = 2;
        chs.numMiddle = 2;
        chs.vocabSize = 2;
        chs.links = {{0, 1}, {0, 1}};
        chs.tokens = {{0, 1, 0}, {1, 1}};
        chs.validate();
        Hyperparams hp;
        hp.coopMode = CoopMode::Maximization;
        hp.truncK = 2;
        hp.truncO = 2;
        hp.truncT = 2;
        hp.mcSamples = 6;
        hp.seed = 5;
        ViEngine vi(chs, hp);
        vi.init();
        for (int i = 0; i < 2; ++i) vi.iterate();
        const auto batch = vi.draw_batch();
        double worst = 0.0;
        for (int a = 0; a < 2 && ok; ++a)
            for (int o = 0; o < hp.truncO - 1 && ok; ++o) {
                const auto [du, dr] = vi.grad_sticks_ao_max(a, o, batch);
                for (int which = 0; which < 2; ++which) {
                    auto& param = which == 0 ? vi.state().uA[a][o] : vi.state().rA[a][o];
                    const double orig = param;
                    const double eps = 1e-5 * std::max(1.0, std::fabs(orig));
                    param = orig + eps;
                    const double hi = vi.surrogate_objective(&batch);
                    param = orig - eps;
                    const double lo = vi.surrogate_objective(&batch);
                    param = orig;
                    const double fd = (hi - lo) / (2.0 * eps);
                    const double an = which == 0 ? du : dr;
                    const double rel = std::fabs(fd - an) / std::max(1.0, std::fabs(an));
                    worst = std::max(worst, rel);
                    if (rel > 1e-3) ok = false;
                }
            }
        std::ostringstream os;
        os << "max-mode stick gradient max rel err=" << worst;
        detail = os.str();
    }
    // (b) Superposition closed forms at gamma=0 equal exact count + prior.
    {
        const auto chs = generate_chs(3, 5, 6, 0.5, 4, 42);
        Hyperparams hp;
        hp.gammaProx = 0.0;
        hp.alphaA = 1.3;
        hp.truncK = 4;
        hp.truncO = 3;
        hp.truncT = 3;
        ViEngine vi(chs, hp);
        vi.init();
        vi.iterate();
        const auto& st = vi.state();
        const int O = hp.truncO;
        std::vector<std::vector<double>> mass(chs.numUpper, std::vector<double>(O, 0.0));
        for (int d = 0; d < chs.numMiddle; ++d)
            for (std::size_t j = 0; j < chs.links[d].size(); ++j)
                for (int o = 0; o < O; ++o)
                    for (const auto& sdt : st.sigmaDT[d])
                        mass[chs.links[d][j]][o] += sdt[j * O + o];
        double worst = 0.0;
        for (int a = 0; a < chs.numUpper; ++a)
            for (int o = 0; o < O - 1; ++o) {
                double tail = 0.0;
                for (int h = o + 1; h < O; ++h) tail += mass[a][h];
                worst = std::max(worst, std::fabs(st.uA[a][o] - (1.0 + mass[a][o])));
                worst = std::max(worst, std::fabs(st.rA[a][o] - (hp.alphaA + tail)));
            }
        std::ostringstream os;
        os << "; sup gamma=0 closed-form max abs err=" << worst;
        detail += os.str();
        if (worst > 1e-9) ok = false;
    }
    report(6, "vi-gradient-checks", ok, detail);
    return ok;
}

// ---------------------------------------------------------------- criterion 7
bool criterion7() {
    bool ok = true;
    std::string fails;
    auto expect = [&](bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            fails += (fails.empty() ? "" : ", ") + what;
        }
    };
    auto near = [](double a, double b, double tol = 1e-9) { return std::fabs(a - b) <= tol; };

    const auto sw = stick_weights({0.3, 0.2, 1.0});
    expect(near(sw[0], 0.3) && near(sw[1], 0.14) && near(sw[2], 0.56), "stick_weights");
    const auto sp = superpose({{0.6, 0.4}, {0.2, 0.8}, {0.2, 0.8}});
    expect(near(sp[0], 1.0 / 3) && near(sp[1], 2.0 / 3), "superpose");
    const auto mx = maximize({{0.7, 0.3}, {0.2, 0.8}});
    expect(near(mx[0], 0.7 / 1.5) && near(mx[1], 0.8 / 1.5), "maximize");
    const auto atw = author_topic_weights({0.2, 0.3, 0.5}, {1, 1, 2}, 3);
    expect(near(atw[0], 0.0) && near(atw[1], 0.5) && near(atw[2], 0.5), "author_topic_weights");
    expect(near(log_marginal_dm({2, 1}, 0.5, 2), std::log(1.0 / 16)), "log_marginal_dm");

    std::vector<double> alt(1000);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
    expect(near(acf(alt, 1), -999.0 / 1000.0), "acf alternating");
    expect(acf(std::vector<double>(100, 2.0), 3) == 0.0, "acf constant");
    std::vector<double> c1(1000);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0, 1);
    for (double& v : c1) v = g(rng);
    expect(near(psrf({c1, c1}), std::sqrt(999.0 / 1000.0), 1e-12), "psrf identical");
    std::vector<double> a1(100), a2(100);
    for (int i = 0; i < 100; ++i) {
        a1[i] = (i % 2 == 0) ? 1.0 : -1.0;
        a2[i] = -a1[i];
    }
    expect(near(psrf({a1, a2}), std::sqrt(99.0 / 100.0), 1e-12), "psrf alternating");

    expect(near(recovery_distance({{1, 0}, {0, 1}}, {{0, 0}, {0, 1}}), 0.5),
           "recovery_distance");
    const auto dtw = doc_topic_weights({{1.0, 0.0}, {0.0, 1.0}}, {0, 1}, 2);
    expect(near(dtw[0], 0.5) && near(dtw[1], 0.5), "doc_topic_weights");
    expect(near(author_perplexity({{0}}, {{0}}, {{0.5, 0.5}}, {{1.0, 0.0}, {0.0, 1.0}}, 2,
                                  CoopMode::Superposition),
                std::exp(-0.5)),
           "author_perplexity");
    const auto rk = rank_labels({{0.5, 0.5}, {0.3, 0.7}}, {0.8, 0.2});
    expect(near(rk.scores[0], 0.5) && rk.order[0] == 0, "rank_labels");
    RankingResult r;
    r.order = {0, 1, 2};
    r.scores = {3, 2, 1};
    const auto mm = multilabel_metrics({r}, {{2}});
    expect(near(mm.oneError, 1.0) && near(mm.coverage, 2.0) && near(mm.rankingLoss, 1.0) &&
               near(mm.avgPrecision, 1.0 / 3.0),
           "multilabel_metrics");

    report(7, "frozen-metric-examples", ok, ok ? "all worked examples exact" : fails);
    return ok;
}

// ---------------------------------------------------------------- criterion 8
// Format ingestion on two 10-doc shapes (author-paper-word and
// label-text-feature), fit briefly with both engines, and run the label
// ranking pipeline end to end.
bool criterion8() {
    bool ok = true;
    std::string detail;
    struct Shape {
        const char* name;
        int upper, vocab, tokens;
    };
    for (const Shape& sh : {Shape{"author-paper-word", 5, 30, 20},
                            Shape{"label-text-feature", 4, 15, 12}}) {
        const auto chs = generate_chs(sh.upper, 10, sh.vocab, 0.35, sh.tokens, 31);
        const auto back = parse_corpus(format_corpus(chs));
        if (!(back == chs)) {
            ok = false;
            detail += std::string(sh.name) + ": round trip mismatch; ";
            continue;
        }
        Hyperparams hp;
        hp.seed = 3;
        GibbsSampler gs(chs, hp);
        const auto trace = gs.run_chain(20, 20);
        Hyperparams hv;
        hv.truncK = 8;
        hv.truncO = 4;
        hv.truncT = 4;
        hv.seed = 3;
        ViEngine vi(chs, hv);
        const auto objs = vi.run(15, 0.0);
        if (!std::isfinite(trace.loglik.back()) || !std::isfinite(objs.back())) {
            ok = false;
            detail += std::string(sh.name) + ": non-finite fit; ";
            continue;
        }
        // label ranking: score every doc against the learned label weights
        const auto topics = vi.topics();
        std::vector<RankingResult> rankings;
        std::vector<std::vector<int>> truths;
        std::vector<std::vector<double>> labelW;
        for (int a = 0; a < chs.numUpper; ++a) labelW.push_back(vi.author_topic_weights(a));
        for (int d = 0; d < chs.numMiddle; ++d) {
            const auto w = doc_topic_weights(topics, chs.tokens[d], chs.vocabSize);
            rankings.push_back(rank_labels(labelW, w));
            truths.push_back(chs.links[d]);
        }
        const auto mm = multilabel_metrics(rankings, truths);
        if (!(mm.rankingLoss >= 0.0 && mm.rankingLoss <= 1.0 && mm.avgPrecision >= 0.0 &&
              mm.avgPrecision <= 1.0)) {
            ok = false;
            detail += std::string(sh.name) + ": metrics out of range; ";
        }
        std::ostringstream os;
        os << sh.name << " rankingLoss=" << mm.rankingLoss << " avgPrec=" << mm.avgPrecision
           << " (skipped " << mm.skipped << "); ";
        detail += os.str();
    }
    report(8, "format-ingestion", ok, detail);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<bool()>> criteria{
        criterion1, criterion2, criterion3, criterion4,
        criterion5, criterion6, criterion7, criterion8};
    bool ok = true;
    if (argc > 1) {
        const int n = std::atoi(argv[1]);
        if (n < 1 || n > 8) {
            std::fprintf(stderr, "usage: acceptance [1..8]\n");
            return 2;
        }
        ok = criteria[n - 1]();
    } else {
        for (const auto& c : criteria) ok = c() && ok;
    }
    return ok ? 0 : 1;
}
