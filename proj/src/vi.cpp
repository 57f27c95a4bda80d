#include "vi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mathutil.hpp"

namespace chdp {

namespace {

constexpr double kSigmaFloor = 1e-12;
constexpr double kBetaFloor = 1e-8;

double log_beta_pdf(double x, double a, double b) {
    return (a - 1.0) * std::log(x) + (b - 1.0) * std::log(1.0 - x) - log_beta(a, b);
}

double draw_beta(double a, double b, std::mt19937_64& rng) {
    std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
    const double x = ga(rng), y = gb(rng);
    const double v = x / (x + y);
    return std::clamp(v, 1e-12, 1.0 - 1e-12);
}

}  // namespace

ViEngine::ViEngine(const CoopHierarchy& data, const Hyperparams& hp) : data_(data), hp_(hp) {
    hp_.validate();
    data_.validate();
    rng_.seed(hp_.seed);
    docsOfAuthor_.resize(data_.numUpper);
    for (int d = 0; d < data_.numMiddle; ++d)
        for (int a : data_.links[d]) docsOfAuthor_[a].push_back(d);
}

std::vector<double> ViEngine::elog_stick(const std::vector<double>& u,
                                         const std::vector<double>& r) {
    const int L = static_cast<int>(u.size()) + 1;
    std::vector<double> out(L, 0.0);
    double tail = 0.0;
    for (int i = 0; i < L; ++i) {
        out[i] = tail;
        if (i < L - 1) {
            out[i] += digamma(u[i]) - digamma(u[i] + r[i]);
            tail += digamma(r[i]) - digamma(u[i] + r[i]);
        }
    }
    return out;
}

std::vector<std::vector<double>> ViEngine::elog_theta() const {
    std::vector<std::vector<double>> out(hp_.truncK, std::vector<double>(data_.vocabSize));
    for (int k = 0; k < hp_.truncK; ++k) {
        double total = std::accumulate(st_.vartheta[k].begin(), st_.vartheta[k].end(), 0.0);
        const double dTotal = digamma(total);
        for (int v = 0; v < data_.vocabSize; ++v)
            out[k][v] = digamma(st_.vartheta[k][v]) - dTotal;
    }
    return out;
}

void ViEngine::init() {
    const int A = data_.numUpper, D = data_.numMiddle, V = data_.vocabSize;
    const int K = hp_.truncK, O = hp_.truncO, T = hp_.truncT;
    std::uniform_real_distribution<double> jit(-1.0, 1.0);
    auto jittered_simplex = [&](int n) {
        WeightVector w(n);
        for (double& x : w) x = 1.0 + 0.01 * jit(rng_);
        normalize_weights(w);
        return w;
    };
    st_.u0.assign(K - 1, 1.0);
    st_.r0.assign(K - 1, hp_.alpha0);
    st_.uA.assign(A, std::vector<double>(O - 1, 1.0));
    st_.rA.assign(A, std::vector<double>(O - 1, hp_.alphaA));
    st_.uD.assign(D, std::vector<double>(T - 1, 1.0));
    st_.rD.assign(D, std::vector<double>(T - 1, hp_.alphaD));
    st_.sigmaAO.assign(A, {});
    for (int a = 0; a < A; ++a)
        for (int o = 0; o < O; ++o) st_.sigmaAO[a].push_back(jittered_simplex(K));
    st_.sigmaDT.assign(D, {});
    st_.sigmaDN.assign(D, {});
    for (int d = 0; d < D; ++d) {
        const int J = static_cast<int>(data_.links[d].size());
        for (int t = 0; t < T; ++t) st_.sigmaDT[d].push_back(jittered_simplex(J * O));
        for (std::size_t n = 0; n < data_.tokens[d].size(); ++n)
            st_.sigmaDN[d].push_back(jittered_simplex(T));
    }
    std::vector<double> wordCount(V, 0.0);
    for (const auto& doc : data_.tokens)
        for (int w : doc) wordCount[w] += 1.0;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    st_.vartheta.assign(K, std::vector<double>(V));
    for (int k = 0; k < K; ++k)
        for (int v = 0; v < V; ++v)
            st_.vartheta[k][v] = hp_.eta + (wordCount[v] / K) * (0.95 + 0.1 * u01(rng_));
    st_.iteration = 0;
    initialized_ = true;
}

WeightVector ViEngine::pi_d_realized(int d, const std::vector<WeightVector>& piRows,
                                     const std::vector<std::vector<int>>& zRows) const {
    const auto& linked = data_.links[d];
    const int J = static_cast<int>(linked.size());
    const int O = hp_.truncO;
    // per-dish aggregated weight per linked chef, then the winning chef
    std::vector<double> best(hp_.truncK, -1.0);
    std::vector<int> winner(hp_.truncK, -1);
    for (int j = 0; j < J; ++j) {
        const int a = linked[j];
        std::vector<double> agg(hp_.truncK, 0.0);
        for (int o = 0; o < O; ++o) agg[zRows[a][o]] += piRows[a][o];
        for (int k = 0; k < hp_.truncK; ++k)
            if (agg[k] > best[k]) {
                best[k] = agg[k];
                winner[k] = j;
            }
    }
    WeightVector out(J * O, 0.0);
    double total = 0.0;
    for (int j = 0; j < J; ++j) {
        const int a = linked[j];
        for (int o = 0; o < O; ++o)
            if (winner[zRows[a][o]] == j) {
                out[j * O + o] = piRows[a][o];
                total += piRows[a][o];
            }
    }
    if (total <= 0.0) throw std::domain_error("pi_d_realized: every option filtered out");
    for (double& x : out) x /= total;
    return out;
}

StickSampleBatch ViEngine::draw_batch() {
    if (!initialized_) init();
    const int A = data_.numUpper, O = hp_.truncO, S = hp_.mcSamples;
    StickSampleBatch batch;
    batch.S = S;
    batch.iteration = st_.iteration;
    batch.genUA = st_.uA;
    batch.genRA = st_.rA;
    batch.genSigmaAO = st_.sigmaAO;
    batch.nu.assign(S, std::vector<std::vector<double>>(A));
    batch.piA.assign(S, std::vector<WeightVector>(A));
    batch.zA.assign(S, std::vector<std::vector<int>>(A));
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            std::vector<double> breaks(O);
            batch.nu[s][a].resize(O - 1);
            for (int o = 0; o < O - 1; ++o) {
                batch.nu[s][a][o] = draw_beta(st_.uA[a][o], st_.rA[a][o], rng_);
                breaks[o] = batch.nu[s][a][o];
            }
            breaks[O - 1] = 1.0;
            batch.piA[s][a] = stick_weights(breaks);
            batch.zA[s][a].resize(O);
            for (int o = 0; o < O; ++o)
                batch.zA[s][a][o] = sample_categorical(st_.sigmaAO[a][o], rng_);
        }
    logPiBatch_.assign(S, std::vector<std::vector<double>>(data_.numMiddle));
    for (int s = 0; s < S; ++s)
        for (int d = 0; d < data_.numMiddle; ++d) {
            const auto pi = pi_d_realized(d, batch.piA[s], batch.zA[s]);
            logPiBatch_[s][d].resize(pi.size());
            for (std::size_t i = 0; i < pi.size(); ++i)
                logPiBatch_[s][d][i] = std::log(std::max(pi[i], kSigmaFloor));
        }
    return batch;
}

double ViEngine::log_weight(int d, int s, const StickSampleBatch& batch) const {
    const int O = hp_.truncO;
    double lw = 0.0;
    for (int a : data_.links[d]) {
        for (int o = 0; o < O - 1; ++o) {
            const double nu = batch.nu[s][a][o];
            lw += log_beta_pdf(nu, st_.uA[a][o], st_.rA[a][o]) -
                  log_beta_pdf(nu, batch.genUA[a][o], batch.genRA[a][o]);
        }
        for (int o = 0; o < O; ++o) {
            const int k = batch.zA[s][a][o];
            lw += std::log(std::max(st_.sigmaAO[a][o][k], kSigmaFloor)) -
                  std::log(std::max(batch.genSigmaAO[a][o][k], kSigmaFloor));
        }
    }
    return lw;
}

void ViEngine::update_doc_layer(const StickSampleBatch* batch,
                                const std::vector<std::vector<double>>& elogTheta) {
    const int A = data_.numUpper, V = data_.vocabSize;
    const int K = hp_.truncK, O = hp_.truncO, T = hp_.truncT;
    const double g = hp_.gammaProx;
    massAO_.assign(A, std::vector<double>(O, 0.0));
    emitAO_.assign(A, std::vector<std::vector<double>>(O, std::vector<double>(V, 0.0)));
    // L[a][o][v] = sum_k sigmaAO * ElogTheta
    std::vector<std::vector<std::vector<double>>> L(
        A, std::vector<std::vector<double>>(O, std::vector<double>(V, 0.0)));
    for (int a = 0; a < A; ++a)
        for (int o = 0; o < O; ++o)
            for (int k = 0; k < K; ++k)
                for (int v = 0; v < V; ++v)
                    L[a][o][v] += st_.sigmaAO[a][o][k] * elogTheta[k][v];
    std::vector<std::vector<double>> elogA(A);
    for (int a = 0; a < A; ++a) elogA[a] = elog_stick(st_.uA[a], st_.rA[a]);

    for (int d = 0; d < data_.numMiddle; ++d) {
        const auto& linked = data_.links[d];
        const int J = static_cast<int>(linked.size());
        const int N = static_cast<int>(data_.tokens[d].size());
        // M[t][v]: emission weight of table slot t, under current sigmaDT
        std::vector<std::vector<double>> M(T, std::vector<double>(V, 0.0));
        for (int t = 0; t < T; ++t)
            for (int j = 0; j < J; ++j)
                for (int o = 0; o < O; ++o) {
                    const double w = st_.sigmaDT[d][t][j * O + o];
                    if (w == 0.0) continue;
                    for (int v = 0; v < V; ++v) M[t][v] += w * L[linked[j]][o][v];
                }
        const auto elogD = elog_stick(st_.uD[d], st_.rD[d]);
        for (int n = 0; n < N; ++n) {
            const int w = data_.tokens[d][n];
            std::vector<double> logs(T);
            for (int t = 0; t < T; ++t)
                logs[t] = (elogD[t] + g * std::log(std::max(st_.sigmaDN[d][n][t], kSigmaFloor)) +
                           M[t][w]) /
                          (1.0 + g);
            normalize_log_probs(logs);
            st_.sigmaDN[d][n] = std::move(logs);
        }
        for (int t = 0; t < T - 1; ++t) {
            double mass = 0.0, tail = 0.0;
            for (int n = 0; n < N; ++n) {
                mass += st_.sigmaDN[d][n][t];
                for (int l = t + 1; l < T; ++l) tail += st_.sigmaDN[d][n][l];
            }
            st_.uD[d][t] = (mass + g * (st_.uD[d][t] - 1.0)) / (1.0 + g) + 1.0;
            st_.rD[d][t] = (hp_.alphaD - 1.0 + tail + g * (st_.rD[d][t] - 1.0)) / (1.0 + g) + 1.0;
        }
        // token emissions per table slot under the refreshed sigmaDN
        std::vector<std::vector<double>> C(T, std::vector<double>(V, 0.0));
        for (int n = 0; n < N; ++n)
            for (int t = 0; t < T; ++t) C[t][data_.tokens[d][n]] += st_.sigmaDN[d][n][t];
        const double logJ = std::log(static_cast<double>(J));
        for (int t = 0; t < T; ++t) {
            std::vector<double> logs(J * O);
            for (int j = 0; j < J; ++j) {
                const int a = linked[j];
                for (int o = 0; o < O; ++o) {
                    const int idx = j * O + o;
                    double prior;
                    if (batch == nullptr) {
                        prior = elogA[a][o] - logJ;
                    } else {
                        prior = 0.0;
                        for (int s = 0; s < batch->S; ++s) prior += logPiBatch_[s][d][idx];
                        prior /= batch->S;
                    }
                    double token = 0.0;
                    for (int v = 0; v < V; ++v)
                        if (C[t][v] != 0.0) token += C[t][v] * L[a][o][v];
                    logs[idx] =
                        (prior + g * std::log(std::max(st_.sigmaDT[d][t][idx], kSigmaFloor)) +
                         token) /
                        (1.0 + g);
                }
            }
            normalize_log_probs(logs);
            st_.sigmaDT[d][t] = std::move(logs);
            for (int j = 0; j < J; ++j) {
                const int a = linked[j];
                for (int o = 0; o < O; ++o) {
                    const double wgt = st_.sigmaDT[d][t][j * O + o];
                    massAO_[a][o] += wgt;
                    for (int v = 0; v < V; ++v)
                        if (C[t][v] != 0.0) emitAO_[a][o][v] += wgt * C[t][v];
                }
            }
        }
    }
}

void ViEngine::update_chef_layer_sup(const std::vector<std::vector<double>>& elogTheta) {
    const int O = hp_.truncO, K = hp_.truncK, V = data_.vocabSize;
    const double g = hp_.gammaProx;
    const auto elog0 = elog_stick(st_.u0, st_.r0);
    for (int a = 0; a < data_.numUpper; ++a) {
        for (int o = 0; o < O - 1; ++o) {
            double tail = 0.0;
            for (int h = o + 1; h < O; ++h) tail += massAO_[a][h];
            st_.uA[a][o] = (massAO_[a][o] + g * (st_.uA[a][o] - 1.0)) / (1.0 + g) + 1.0;
            st_.rA[a][o] = (hp_.alphaA - 1.0 + tail + g * (st_.rA[a][o] - 1.0)) / (1.0 + g) + 1.0;
        }
        for (int o = 0; o < O; ++o) {
            std::vector<double> logs(K);
            for (int k = 0; k < K; ++k) {
                double token = 0.0;
                for (int v = 0; v < V; ++v)
                    if (emitAO_[a][o][v] != 0.0) token += emitAO_[a][o][v] * elogTheta[k][v];
                logs[k] = (elog0[k] + g * std::log(std::max(st_.sigmaAO[a][o][k], kSigmaFloor)) +
                           token) /
                          (1.0 + g);
            }
            normalize_log_probs(logs);
            st_.sigmaAO[a][o] = std::move(logs);
        }
    }
}

std::pair<double, double> ViEngine::grad_sticks_ao_max(int a, int o,
                                                       const StickSampleBatch& batch) const {
    if (logPiBatch_.empty()) throw std::logic_error("grad_sticks_ao_max: no batch drawn");
    const double u = st_.uA[a][o], r = st_.rA[a][o];
    const double tgU = trigamma(u), tgR = trigamma(r), tgUR = trigamma(u + r);
    double du = -(hp_.alphaA - 1.0) * tgUR - (u - 1.0) * tgU + (u + r - 2.0) * tgUR;
    double dr = (hp_.alphaA - 1.0) * (tgR - tgUR) - (r - 1.0) * tgR + (u + r - 2.0) * tgUR;
    const double dgU = digamma(u), dgR = digamma(r), dgUR = digamma(u + r);
    const int O = hp_.truncO;
    for (int d : docsOfAuthor_[a]) {
        const int J = static_cast<int>(data_.links[d].size());
        for (int s = 0; s < batch.S; ++s) {
            double gd = 0.0;  // full restaurant-d expectation under sample s
            for (int t = 0; t < hp_.truncT; ++t)
                for (int idx = 0; idx < J * O; ++idx)
                    gd += st_.sigmaDT[d][t][idx] * logPiBatch_[s][d][idx];
            const double W = std::exp(log_weight(d, s, batch));
            const double nu = batch.nu[s][a][o];
            du += (W / batch.S) * (dgUR - dgU + std::log(nu)) * gd;
            dr += (W / batch.S) * (dgUR - dgR + std::log(1.0 - nu)) * gd;
        }
    }
    return {du, dr};
}

void ViEngine::update_chef_layer_max(const StickSampleBatch& batch,
                                     const std::vector<std::vector<double>>& elogTheta) {
    const int O = hp_.truncO, K = hp_.truncK, V = data_.vocabSize;
    const double g = hp_.gammaProx;
    const double tau = 0.05 / (1.0 + st_.iteration / 100.0);
    const auto elog0 = elog_stick(st_.u0, st_.r0);
    // restaurant expectations per (sample, doc), fixed for this batch
    std::vector<std::vector<double>> gd(batch.S, std::vector<double>(data_.numMiddle, 0.0));
    for (int s = 0; s < batch.S; ++s)
        for (int d = 0; d < data_.numMiddle; ++d) {
            const int n = static_cast<int>(logPiBatch_[s][d].size());
            for (int t = 0; t < hp_.truncT; ++t)
                for (int idx = 0; idx < n; ++idx)
                    gd[s][d] += st_.sigmaDT[d][t][idx] * logPiBatch_[s][d][idx];
        }
    for (int a = 0; a < data_.numUpper; ++a) {
        for (int o = 0; o < O - 1; ++o) {
            const auto [du, dr] = grad_sticks_ao_max(a, o, batch);
            st_.uA[a][o] = std::max(st_.uA[a][o] + tau * du, kBetaFloor);
            st_.rA[a][o] = std::max(st_.rA[a][o] + tau * dr, kBetaFloor);
        }
        for (int o = 0; o < O; ++o) {
            std::vector<double> logs(K);
            std::vector<double> score(K, 0.0);
            for (int d : docsOfAuthor_[a])
                for (int s = 0; s < batch.S; ++s)
                    score[batch.zA[s][a][o]] += gd[s][d] / batch.S;
            for (int k = 0; k < K; ++k) {
                double token = 0.0;
                for (int v = 0; v < V; ++v)
                    if (emitAO_[a][o][v] != 0.0) token += emitAO_[a][o][v] * elogTheta[k][v];
                const double scoreTerm =
                    score[k] / std::max(batch.genSigmaAO[a][o][k], kSigmaFloor);
                logs[k] = (elog0[k] + scoreTerm + token +
                           g * std::log(std::max(st_.sigmaAO[a][o][k], kSigmaFloor))) /
                          (1.0 + g);
            }
            normalize_log_probs(logs);
            st_.sigmaAO[a][o] = std::move(logs);
        }
    }
}

void ViEngine::update_top_layer(const std::vector<std::vector<double>>& elogTheta) {
    (void)elogTheta;
    const int O = hp_.truncO, K = hp_.truncK, V = data_.vocabSize;
    const double g = hp_.gammaProx;
    std::vector<double> usage(K, 0.0);
    for (int a = 0; a < data_.numUpper; ++a)
        for (int o = 0; o < O; ++o)
            for (int k = 0; k < K; ++k) usage[k] += st_.sigmaAO[a][o][k];
    for (int k = 0; k < K - 1; ++k) {
        double tail = 0.0;
        for (int l = k + 1; l < K; ++l) tail += usage[l];
        st_.u0[k] = (usage[k] + g * (st_.u0[k] - 1.0)) / (1.0 + g) + 1.0;
        st_.r0[k] = (hp_.alpha0 - 1.0 + tail + g * (st_.r0[k] - 1.0)) / (1.0 + g) + 1.0;
    }
    for (int k = 0; k < K; ++k)
        for (int v = 0; v < V; ++v) {
            double count = 0.0;
            for (int a = 0; a < data_.numUpper; ++a)
                for (int o = 0; o < O; ++o)
                    if (emitAO_[a][o][v] != 0.0) count += st_.sigmaAO[a][o][k] * emitAO_[a][o][v];
            st_.vartheta[k][v] =
                (hp_.eta + g * st_.vartheta[k][v] + count) / (g + 1.0);
        }
}

void ViEngine::iterate() {
    if (!initialized_) init();
    const bool isMax = hp_.coopMode == CoopMode::Maximization;
    StickSampleBatch batch;
    if (isMax) batch = draw_batch();
    const auto elogTheta = elog_theta();
    update_doc_layer(isMax ? &batch : nullptr, elogTheta);
    if (isMax)
        update_chef_layer_max(batch, elogTheta);
    else
        update_chef_layer_sup(elogTheta);
    update_top_layer(elogTheta);
    ++st_.iteration;
}

double ViEngine::surrogate_objective(const StickSampleBatch* batch) const {
    const int A = data_.numUpper, D = data_.numMiddle, V = data_.vocabSize;
    const int K = hp_.truncK, O = hp_.truncO, T = hp_.truncT;
    const bool isMax = hp_.coopMode == CoopMode::Maximization;
    if (isMax && batch == nullptr)
        throw std::invalid_argument("surrogate_objective: Maximization mode needs a batch");
    const auto elogTheta = elog_theta();
    const auto elog0 = elog_stick(st_.u0, st_.r0);
    double obj = 0.0;
    // top sticks: prior + entropy
    for (int k = 0; k < K - 1; ++k) {
        obj += (hp_.alpha0 - 1.0) * (digamma(st_.r0[k]) - digamma(st_.u0[k] + st_.r0[k])) +
               std::log(hp_.alpha0);
        obj += beta_entropy(st_.u0[k], st_.r0[k]);
    }
    // dish indicators at chef layer
    for (int a = 0; a < A; ++a)
        for (int o = 0; o < O; ++o) {
            for (int k = 0; k < K; ++k) obj += st_.sigmaAO[a][o][k] * elog0[k];
            obj += categorical_entropy(st_.sigmaAO[a][o]);
        }
    // chef sticks
    for (int a = 0; a < A; ++a)
        for (int o = 0; o < O - 1; ++o) {
            obj += (hp_.alphaA - 1.0) *
                       (digamma(st_.rA[a][o]) - digamma(st_.uA[a][o] + st_.rA[a][o])) +
                   std::log(hp_.alphaA);
            obj += beta_entropy(st_.uA[a][o], st_.rA[a][o]);
        }
    // table-to-option indicators
    if (!isMax) {
        std::vector<std::vector<double>> elogA(A);
        for (int a = 0; a < A; ++a) elogA[a] = elog_stick(st_.uA[a], st_.rA[a]);
        for (int d = 0; d < D; ++d) {
            const auto& linked = data_.links[d];
            const double logJ = std::log(static_cast<double>(linked.size()));
            for (int t = 0; t < T; ++t)
                for (std::size_t j = 0; j < linked.size(); ++j)
                    for (int o = 0; o < O; ++o)
                        obj += st_.sigmaDT[d][t][j * O + o] * (elogA[linked[j]][o] - logJ);
        }
    } else {
        for (int d = 0; d < D; ++d) {
            const int n = static_cast<int>(logPiBatch_[0][d].size());
            double est = 0.0;
            for (int s = 0; s < batch->S; ++s) {
                double gd = 0.0;
                for (int t = 0; t < T; ++t)
                    for (int idx = 0; idx < n; ++idx)
                        gd += st_.sigmaDT[d][t][idx] * logPiBatch_[s][d][idx];
                est += std::exp(log_weight(d, s, *batch)) * gd;
            }
            obj += est / batch->S;
        }
    }
    for (int d = 0; d < D; ++d)
        for (int t = 0; t < T; ++t) obj += categorical_entropy(st_.sigmaDT[d][t]);
    // restaurant sticks and token-to-table indicators
    for (int d = 0; d < D; ++d) {
        for (int t = 0; t < T - 1; ++t) {
            obj += (hp_.alphaD - 1.0) *
                       (digamma(st_.rD[d][t]) - digamma(st_.uD[d][t] + st_.rD[d][t])) +
                   std::log(hp_.alphaD);
            obj += beta_entropy(st_.uD[d][t], st_.rD[d][t]);
        }
        const auto elogD = elog_stick(st_.uD[d], st_.rD[d]);
        for (std::size_t n = 0; n < data_.tokens[d].size(); ++n) {
            for (int t = 0; t < T; ++t) obj += st_.sigmaDN[d][n][t] * elogD[t];
            obj += categorical_entropy(st_.sigmaDN[d][n]);
        }
    }
    // token likelihood
    for (int d = 0; d < D; ++d) {
        const auto& linked = data_.links[d];
        for (std::size_t n = 0; n < data_.tokens[d].size(); ++n) {
            const int w = data_.tokens[d][n];
            for (int t = 0; t < T; ++t) {
                const double wn = st_.sigmaDN[d][n][t];
                if (wn == 0.0) continue;
                for (std::size_t j = 0; j < linked.size(); ++j)
                    for (int o = 0; o < O; ++o) {
                        const double wt = st_.sigmaDT[d][t][j * O + o];
                        if (wt == 0.0) continue;
                        double inner = 0.0;
                        for (int k = 0; k < K; ++k)
                            inner += st_.sigmaAO[linked[j]][o][k] * elogTheta[k][w];
                        obj += wn * wt * inner;
                    }
            }
        }
    }
    // dish Dirichlets: prior + entropy
    const double logPriorNorm = std::lgamma(V * hp_.eta) - V * std::lgamma(hp_.eta);
    for (int k = 0; k < K; ++k) {
        double s = logPriorNorm;
        for (int v = 0; v < V; ++v) s += (hp_.eta - 1.0) * elogTheta[k][v];
        obj += s + dirichlet_entropy(st_.vartheta[k]);
    }
    return obj;
}

std::vector<double> ViEngine::run(int maxIter, double tol) {
    if (maxIter < 1) throw std::invalid_argument("vi run: maxIter must be >= 1");
    if (!initialized_) init();
    const bool isMax = hp_.coopMode == CoopMode::Maximization;
    std::vector<double> trace;
    double prev = 0.0;
    for (int it = 0; it < maxIter; ++it) {
        StickSampleBatch batch;
        if (isMax) batch = draw_batch();
        const auto elogTheta = elog_theta();
        update_doc_layer(isMax ? &batch : nullptr, elogTheta);
        if (isMax)
            update_chef_layer_max(batch, elogTheta);
        else
            update_chef_layer_sup(elogTheta);
        update_top_layer(elogTheta);
        ++st_.iteration;
        const double obj = surrogate_objective(isMax ? &batch : nullptr);
        if (!std::isfinite(obj))
            throw std::runtime_error("vi run: objective diverged at iteration " +
                                     std::to_string(st_.iteration));
        trace.push_back(obj);
        if (it > 0 && std::abs(obj - prev) / std::max(1.0, std::abs(prev)) < tol) break;
        prev = obj;
    }
    return trace;
}

WeightVector ViEngine::expected_option_weights(int a) const {
    std::vector<double> breaks(hp_.truncO);
    for (int o = 0; o < hp_.truncO - 1; ++o)
        breaks[o] = st_.uA[a][o] / (st_.uA[a][o] + st_.rA[a][o]);
    breaks[hp_.truncO - 1] = 1.0;
    return stick_weights(breaks);
}

WeightVector ViEngine::author_topic_weights(int a) const {
    const auto pi = expected_option_weights(a);
    WeightVector out(hp_.truncK, 0.0);
    for (int o = 0; o < hp_.truncO; ++o)
        for (int k = 0; k < hp_.truncK; ++k) out[k] += pi[o] * st_.sigmaAO[a][o][k];
    return out;
}

std::vector<std::vector<double>> ViEngine::topics() const {
    std::vector<std::vector<double>> out = st_.vartheta;
    for (auto& row : out) normalize_weights(row);
    return out;
}

std::vector<std::vector<double>> ViEngine::author_interest_rows() const {
    const auto th = topics();
    std::vector<std::vector<double>> rows(data_.numUpper,
                                          std::vector<double>(data_.vocabSize, 0.0));
    for (int a = 0; a < data_.numUpper; ++a) {
        const auto pi = author_topic_weights(a);
        for (int k = 0; k < hp_.truncK; ++k)
            for (int v = 0; v < data_.vocabSize; ++v) rows[a][v] += pi[k] * th[k][v];
        normalize_weights(rows[a]);
    }
    return rows;
}

int ViEngine::active_dishes(double threshold) const {
    int count = 0;
    for (int k = 0; k < hp_.truncK; ++k) {
        double usage = 0.0;
        for (int a = 0; a < data_.numUpper; ++a)
            for (int o = 0; o < hp_.truncO; ++o) usage += st_.sigmaAO[a][o][k];
        if (usage > threshold) ++count;
    }
    return count;
}

std::string ViEngine::serialize_state() const {
    nlohmann::json j;
    j["u0"] = st_.u0;
    j["r0"] = st_.r0;
    j["uA"] = st_.uA;
    j["rA"] = st_.rA;
    j["uD"] = st_.uD;
    j["rD"] = st_.rD;
    j["sigmaAO"] = st_.sigmaAO;
    j["sigmaDT"] = st_.sigmaDT;
    j["sigmaDN"] = st_.sigmaDN;
    j["vartheta"] = st_.vartheta;
    j["iteration"] = st_.iteration;
    j["initialized"] = initialized_;
    std::ostringstream rs;
    rs << rng_;
    j["rng"] = rs.str();
    return j.dump();
}

void ViEngine::restore_state(const std::string& blob) {
    const auto j = nlohmann::json::parse(blob);
    st_.u0 = j.at("u0").get<std::vector<double>>();
    st_.r0 = j.at("r0").get<std::vector<double>>();
    st_.uA = j.at("uA").get<std::vector<std::vector<double>>>();
    st_.rA = j.at("rA").get<std::vector<std::vector<double>>>();
    st_.uD = j.at("uD").get<std::vector<std::vector<double>>>();
    st_.rD = j.at("rD").get<std::vector<std::vector<double>>>();
    st_.sigmaAO = j.at("sigmaAO").get<std::vector<std::vector<WeightVector>>>();
    st_.sigmaDT = j.at("sigmaDT").get<std::vector<std::vector<WeightVector>>>();
    st_.sigmaDN = j.at("sigmaDN").get<std::vector<std::vector<WeightVector>>>();
    st_.vartheta = j.at("vartheta").get<std::vector<std::vector<double>>>();
    st_.iteration = j.at("iteration").get<int>();
    initialized_ = j.at("initialized").get<bool>();
    std::istringstream rs(j.at("rng").get<std::string>());
    rs >> rng_;
}

}  // namespace chdp
