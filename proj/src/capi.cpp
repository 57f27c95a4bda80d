#include "chdp/chdp.h"

#include <cstring>
#include <exception>
#include <stdexcept>
#include <string>

#include "diagnostics.hpp"
#include "evaluation.hpp"
#include "gibbs.hpp"
#include "io.hpp"
#include "synthetic.hpp"
#include "types.hpp"
#include "vi.hpp"

namespace {

thread_local std::string g_lastError;

chdp_status set_error(chdp_status code, const std::string& msg) {
    g_lastError = msg;
    return code;
}

// Maps C++ exceptions onto status codes at the boundary.
template <class Fn>
chdp_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return set_error(CHDP_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return set_error(CHDP_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return set_error(CHDP_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::logic_error& e) {
        return set_error(CHDP_ERR_STATE, e.what());
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        if (what.find("parse") != std::string::npos) return set_error(CHDP_ERR_PARSE, what);
        if (what.find("file") != std::string::npos || what.find("write") != std::string::npos)
            return set_error(CHDP_ERR_IO, what);
        return set_error(CHDP_ERR_NUMERIC, what);
    } catch (const std::exception& e) {
        return set_error(CHDP_ERR_UNKNOWN, e.what());
    } catch (...) {
        return set_error(CHDP_ERR_UNKNOWN, "unknown failure");
    }
}

chdp_status require(bool cond, const char* msg) {
    return cond ? CHDP_OK : set_error(CHDP_ERR_INVALID_ARGUMENT, msg);
}

chdp::Hyperparams to_cpp(const chdp_hyperparams& hp) {
    chdp::Hyperparams out;
    out.alpha0 = hp.alpha0;
    out.alphaA = hp.alphaA;
    out.alphaD = hp.alphaD;
    out.eta = hp.eta;
    out.gammaProx = hp.gammaProx;
    out.mcSamples = hp.mcSamples;
    out.truncK = hp.truncK;
    out.truncO = hp.truncO;
    out.truncT = hp.truncT;
    out.coopMode = hp.coopMode == CHDP_MODE_MAXIMIZATION ? chdp::CoopMode::Maximization
                                                         : chdp::CoopMode::Superposition;
    out.seed = hp.seed;
    return out;
}

chdp_hyperparams to_c(const chdp::Hyperparams& hp) {
    chdp_hyperparams out;
    out.alpha0 = hp.alpha0;
    out.alphaA = hp.alphaA;
    out.alphaD = hp.alphaD;
    out.eta = hp.eta;
    out.gammaProx = hp.gammaProx;
    out.mcSamples = hp.mcSamples;
    out.truncK = hp.truncK;
    out.truncO = hp.truncO;
    out.truncT = hp.truncT;
    out.coopMode = hp.coopMode == chdp::CoopMode::Maximization ? CHDP_MODE_MAXIMIZATION
                                                               : CHDP_MODE_SUPERPOSITION;
    out.seed = hp.seed;
    return out;
}

}  // namespace

struct chdp_corpus {
    chdp::CoopHierarchy data;
};
struct chdp_gibbs {
    chdp::GibbsSampler sampler;
    chdp::GibbsOptions opts;
};
struct chdp_vi {
    chdp::ViEngine engine;
};

extern "C" {

const char* chdp_last_error(void) { return g_lastError.c_str(); }

void chdp_hyperparams_default(chdp_hyperparams* hp) {
    if (hp) *hp = to_c(chdp::Hyperparams{});
}

/* ---- corpus ---- */

chdp_status chdp_corpus_load(const char* path, chdp_corpus** out) {
    if (auto rc = require(path && out, "null argument")) return rc;
    return guarded([&] {
        *out = new chdp_corpus{chdp::load_corpus(path)};
        return CHDP_OK;
    });
}

chdp_status chdp_corpus_parse(const char* text, chdp_corpus** out) {
    if (auto rc = require(text && out, "null argument")) return rc;
    return guarded([&] {
        *out = new chdp_corpus{chdp::parse_corpus(text)};
        return CHDP_OK;
    });
}

chdp_status chdp_corpus_save(const chdp_corpus* c, const char* path) {
    if (auto rc = require(c && path, "null argument")) return rc;
    return guarded([&] {
        chdp::save_corpus(c->data, path);
        return CHDP_OK;
    });
}

void chdp_corpus_free(chdp_corpus* c) { delete c; }

int chdp_corpus_num_upper(const chdp_corpus* c) { return c ? c->data.numUpper : -1; }
int chdp_corpus_num_middle(const chdp_corpus* c) { return c ? c->data.numMiddle : -1; }
int chdp_corpus_vocab_size(const chdp_corpus* c) { return c ? c->data.vocabSize : -1; }

int chdp_corpus_num_links(const chdp_corpus* c, int d) {
    if (!c || d < 0 || d >= c->data.numMiddle) return -1;
    return static_cast<int>(c->data.links[d].size());
}

int chdp_corpus_num_tokens(const chdp_corpus* c, int d) {
    if (!c || d < 0 || d >= c->data.numMiddle) return -1;
    return static_cast<int>(c->data.tokens[d].size());
}

chdp_status chdp_corpus_links(const chdp_corpus* c, int d, int* out, int cap) {
    if (auto rc = require(c && out, "null argument")) return rc;
    if (auto rc = require(d >= 0 && d < c->data.numMiddle, "doc index out of range")) return rc;
    const auto& l = c->data.links[d];
    if (auto rc = require(cap >= static_cast<int>(l.size()), "buffer too small")) return rc;
    std::memcpy(out, l.data(), l.size() * sizeof(int));
    return CHDP_OK;
}

chdp_status chdp_corpus_tokens(const chdp_corpus* c, int d, int* out, int cap) {
    if (auto rc = require(c && out, "null argument")) return rc;
    if (auto rc = require(d >= 0 && d < c->data.numMiddle, "doc index out of range")) return rc;
    const auto& t = c->data.tokens[d];
    if (auto rc = require(cap >= static_cast<int>(t.size()), "buffer too small")) return rc;
    std::memcpy(out, t.data(), t.size() * sizeof(int));
    return CHDP_OK;
}

unsigned long long chdp_corpus_digest(const chdp_corpus* c) {
    return c ? chdp::corpus_digest(c->data) : 0;
}

/* ---- synthetic ---- */

chdp_status chdp_generate_chs(int A, int D, int V, double densityAD, int tokensPerDoc,
                              unsigned long long seed, chdp_corpus** out) {
    if (auto rc = require(out != nullptr, "null output")) return rc;
    return guarded([&] {
        *out = new chdp_corpus{chdp::generate_chs(A, D, V, densityAD, tokensPerDoc, seed)};
        return CHDP_OK;
    });
}

chdp_status chdp_generate_recovery(int coopMode, unsigned long long seed, chdp_corpus** outCorpus,
                                   double* authorInterests, double* docInterests, int* groupOf) {
    if (auto rc = require(outCorpus != nullptr, "null output")) return rc;
    return guarded([&] {
        const auto mode = coopMode == CHDP_MODE_MAXIMIZATION ? chdp::CoopMode::Maximization
                                                             : chdp::CoopMode::Superposition;
        auto ds = chdp::generate_recovery(mode, seed);
        const int V = ds.data.vocabSize;
        if (authorInterests)
            for (std::size_t a = 0; a < ds.truth.authorInterests.size(); ++a)
                for (int v = 0; v < V; ++v)
                    authorInterests[a * V + v] = ds.truth.authorInterests[a][v];
        if (docInterests)
            for (std::size_t d = 0; d < ds.truth.docInterests.size(); ++d)
                for (int v = 0; v < V; ++v) docInterests[d * V + v] = ds.truth.docInterests[d][v];
        if (groupOf)
            for (std::size_t a = 0; a < ds.truth.groupOf.size(); ++a)
                groupOf[a] = ds.truth.groupOf[a];
        *outCorpus = new chdp_corpus{std::move(ds.data)};
        return CHDP_OK;
    });
}

chdp_status chdp_degenerate_to_type1(const chdp_corpus* c, unsigned long long seed,
                                     chdp_corpus** out, int* authorRemap) {
    if (auto rc = require(c && out, "null argument")) return rc;
    return guarded([&] {
        std::vector<int> remap;
        auto deg = chdp::degenerate_to_type1(c->data, seed, &remap);
        if (authorRemap)
            for (std::size_t a = 0; a < remap.size(); ++a) authorRemap[a] = remap[a];
        *out = new chdp_corpus{std::move(deg)};
        return CHDP_OK;
    });
}

/* ---- Gibbs ---- */

chdp_status chdp_gibbs_create(const chdp_corpus* c, const chdp_hyperparams* hp,
                              int useAuxiliaryChef, int ignoreLikelihood, chdp_gibbs** out) {
    if (auto rc = require(c && hp && out, "null argument")) return rc;
    return guarded([&] {
        chdp::GibbsOptions opts{useAuxiliaryChef != 0, ignoreLikelihood != 0};
        *out = new chdp_gibbs{chdp::GibbsSampler(c->data, to_cpp(*hp), opts), opts};
        return CHDP_OK;
    });
}

void chdp_gibbs_free(chdp_gibbs* g) { delete g; }

chdp_status chdp_gibbs_run_chain(chdp_gibbs* g, int numSamples, int burnIn, double* loglikOut,
                                 int* kOut, double* meanInterestsOut) {
    if (auto rc = require(g != nullptr, "null handle")) return rc;
    return guarded([&] {
        std::vector<std::vector<double>> interests;
        const auto trace =
            g->sampler.run_chain(numSamples, burnIn, meanInterestsOut ? &interests : nullptr);
        if (loglikOut)
            std::memcpy(loglikOut, trace.loglik.data(), trace.loglik.size() * sizeof(double));
        if (kOut) std::memcpy(kOut, trace.kCount.data(), trace.kCount.size() * sizeof(int));
        if (meanInterestsOut) {
            const int V = g->sampler.data().vocabSize;
            for (std::size_t a = 0; a < interests.size(); ++a)
                for (int v = 0; v < V; ++v) meanInterestsOut[a * V + v] = interests[a][v];
        }
        return CHDP_OK;
    });
}

chdp_status chdp_gibbs_sweep(chdp_gibbs* g) {
    if (auto rc = require(g != nullptr, "null handle")) return rc;
    return guarded([&] {
        if (!g->sampler.initialized()) g->sampler.init();
        g->sampler.sweep();
        return CHDP_OK;
    });
}

int chdp_gibbs_num_dishes(const chdp_gibbs* g) { return g ? g->sampler.num_dishes() : -1; }
int chdp_gibbs_iteration(const chdp_gibbs* g) { return g ? g->sampler.iteration : -1; }

chdp_status chdp_gibbs_loglik(const chdp_gibbs* g, double* out) {
    if (auto rc = require(g && out, "null argument")) return rc;
    return guarded([&] {
        *out = g->sampler.joint_loglik();
        return CHDP_OK;
    });
}

chdp_status chdp_gibbs_author_interests(const chdp_gibbs* g, double* out) {
    if (auto rc = require(g && out, "null argument")) return rc;
    return guarded([&] {
        const auto rows = g->sampler.author_interest_rows();
        const int V = g->sampler.data().vocabSize;
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (int v = 0; v < V; ++v) out[a * V + v] = rows[a][v];
        return CHDP_OK;
    });
}

chdp_status chdp_gibbs_author_topic_weights(const chdp_gibbs* g, int a, double* out) {
    if (auto rc = require(g && out, "null argument")) return rc;
    return guarded([&] {
        if (a < 0 || a >= g->sampler.data().numUpper)
            throw std::invalid_argument("author index out of range");
        const auto w = g->sampler.author_topic_weights(a);
        std::memcpy(out, w.data(), w.size() * sizeof(double));
        return CHDP_OK;
    });
}

chdp_status chdp_gibbs_topics(const chdp_gibbs* g, double* out) {
    if (auto rc = require(g && out, "null argument")) return rc;
    return guarded([&] {
        const int V = g->sampler.data().vocabSize;
        for (int k = 0; k < g->sampler.num_dishes(); ++k) {
            auto p = g->sampler.dish_posterior(k);
            chdp::normalize_weights(p);
            for (int v = 0; v < V; ++v) out[k * V + v] = p[v];
        }
        return CHDP_OK;
    });
}

chdp_status chdp_gibbs_save_checkpoint(const chdp_gibbs* g, const char* path) {
    if (auto rc = require(g && path, "null argument")) return rc;
    return guarded([&] {
        chdp::Checkpoint cp;
        cp.engine = "gibbs";
        cp.hp = g->sampler.hyperparams();
        cp.datasetDigest = chdp::corpus_digest(g->sampler.data());
        cp.iteration = g->sampler.iteration;
        cp.stateBlob = g->sampler.serialize_state();
        chdp::save_checkpoint(cp, path);
        return CHDP_OK;
    });
}

chdp_status chdp_gibbs_load_checkpoint(const chdp_corpus* c, const char* path, chdp_gibbs** out) {
    if (auto rc = require(c && path && out, "null argument")) return rc;
    return guarded([&] {
        const auto cp = chdp::load_checkpoint(path);
        if (cp.engine != "gibbs") throw std::logic_error("checkpoint engine is not gibbs");
        if (cp.datasetDigest != chdp::corpus_digest(c->data))
            throw std::logic_error("checkpoint dataset digest does not match corpus");
        chdp::GibbsOptions opts;  // structural options are not part of the posterior state
        auto handle = new chdp_gibbs{chdp::GibbsSampler(c->data, cp.hp, opts), opts};
        handle->sampler.restore_state(cp.stateBlob);
        *out = handle;
        return CHDP_OK;
    });
}

/* ---- VI ---- */

chdp_status chdp_vi_create(const chdp_corpus* c, const chdp_hyperparams* hp, chdp_vi** out) {
    if (auto rc = require(c && hp && out, "null argument")) return rc;
    return guarded([&] {
        *out = new chdp_vi{chdp::ViEngine(c->data, to_cpp(*hp))};
        return CHDP_OK;
    });
}

void chdp_vi_free(chdp_vi* v) { delete v; }

chdp_status chdp_vi_run(chdp_vi* v, int maxIter, double tol, double* objOut, int* outLen) {
    if (auto rc = require(v != nullptr, "null handle")) return rc;
    return guarded([&] {
        const auto trace = v->engine.run(maxIter, tol);
        if (objOut) std::memcpy(objOut, trace.data(), trace.size() * sizeof(double));
        if (outLen) *outLen = static_cast<int>(trace.size());
        return CHDP_OK;
    });
}

int chdp_vi_active_dishes(const chdp_vi* v) { return v ? v->engine.active_dishes() : -1; }
int chdp_vi_iteration(const chdp_vi* v) { return v ? v->engine.state().iteration : -1; }
int chdp_vi_trunc_k(const chdp_vi* v) { return v ? v->engine.hyperparams().truncK : -1; }

chdp_status chdp_vi_author_interests(const chdp_vi* v, double* out) {
    if (auto rc = require(v && out, "null argument")) return rc;
    return guarded([&] {
        const auto rows = v->engine.author_interest_rows();
        const int V = v->engine.data().vocabSize;
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (int w = 0; w < V; ++w) out[a * V + w] = rows[a][w];
        return CHDP_OK;
    });
}

chdp_status chdp_vi_author_topic_weights(const chdp_vi* v, int a, double* out) {
    if (auto rc = require(v && out, "null argument")) return rc;
    return guarded([&] {
        if (a < 0 || a >= v->engine.data().numUpper)
            throw std::invalid_argument("author index out of range");
        const auto w = v->engine.author_topic_weights(a);
        std::memcpy(out, w.data(), w.size() * sizeof(double));
        return CHDP_OK;
    });
}

chdp_status chdp_vi_topics(const chdp_vi* v, double* out) {
    if (auto rc = require(v && out, "null argument")) return rc;
    return guarded([&] {
        const auto th = v->engine.topics();
        const int V = v->engine.data().vocabSize;
        for (std::size_t k = 0; k < th.size(); ++k)
            for (int w = 0; w < V; ++w) out[k * V + w] = th[k][w];
        return CHDP_OK;
    });
}

chdp_status chdp_vi_save_checkpoint(const chdp_vi* v, const char* path) {
    if (auto rc = require(v && path, "null argument")) return rc;
    return guarded([&] {
        chdp::Checkpoint cp;
        cp.engine = "vi";
        cp.hp = v->engine.hyperparams();
        cp.datasetDigest = chdp::corpus_digest(v->engine.data());
        cp.iteration = v->engine.state().iteration;
        cp.stateBlob = v->engine.serialize_state();
        chdp::save_checkpoint(cp, path);
        return CHDP_OK;
    });
}

chdp_status chdp_vi_load_checkpoint(const chdp_corpus* c, const char* path, chdp_vi** out) {
    if (auto rc = require(c && path && out, "null argument")) return rc;
    return guarded([&] {
        const auto cp = chdp::load_checkpoint(path);
        if (cp.engine != "vi") throw std::logic_error("checkpoint engine is not vi");
        if (cp.datasetDigest != chdp::corpus_digest(c->data))
            throw std::logic_error("checkpoint dataset digest does not match corpus");
        auto handle = new chdp_vi{chdp::ViEngine(c->data, cp.hp)};
        handle->engine.restore_state(cp.stateBlob);
        *out = handle;
        return CHDP_OK;
    });
}

/* ---- diagnostics ---- */

chdp_status chdp_acf(const double* series, int n, int lag, double* out) {
    if (auto rc = require(series && out, "null argument")) return rc;
    return guarded([&] {
        *out = chdp::acf(std::vector<double>(series, series + n), lag);
        return CHDP_OK;
    });
}

chdp_status chdp_psrf(const double* chains, int m, int n, double* out) {
    if (auto rc = require(chains && out, "null argument")) return rc;
    return guarded([&] {
        std::vector<std::vector<double>> cc(m);
        for (int j = 0; j < m; ++j) cc[j].assign(chains + j * n, chains + (j + 1) * n);
        *out = chdp::psrf(cc);
        return CHDP_OK;
    });
}

/* ---- metrics ---- */

chdp_status chdp_recovery_distance(const double* learned, const double* truth, int A, int V,
                                   double* out) {
    if (auto rc = require(learned && truth && out, "null argument")) return rc;
    return guarded([&] {
        std::vector<std::vector<double>> l(A), t(A);
        for (int a = 0; a < A; ++a) {
            l[a].assign(learned + a * V, learned + (a + 1) * V);
            t[a].assign(truth + a * V, truth + (a + 1) * V);
        }
        *out = chdp::recovery_distance(l, t);
        return CHDP_OK;
    });
}

chdp_status chdp_doc_topic_weights(const double* topics, int K, int V, const int* tokens, int n,
                                   double* out) {
    if (auto rc = require(topics && tokens && out, "null argument")) return rc;
    return guarded([&] {
        std::vector<std::vector<double>> th(K);
        for (int k = 0; k < K; ++k) th[k].assign(topics + k * V, topics + (k + 1) * V);
        const auto w = chdp::doc_topic_weights(th, std::vector<int>(tokens, tokens + n), V);
        std::memcpy(out, w.data(), w.size() * sizeof(double));
        return CHDP_OK;
    });
}

chdp_status chdp_author_perplexity(const chdp_corpus* test, const double* authorTopicWeights,
                                   const double* topics, int K, int coopMode, double* out) {
    if (auto rc = require(test && authorTopicWeights && topics && out, "null argument")) return rc;
    return guarded([&] {
        const int V = test->data.vocabSize;
        const int A = test->data.numUpper;
        std::vector<std::vector<double>> pi(A), th(K);
        for (int a = 0; a < A; ++a)
            pi[a].assign(authorTopicWeights + a * K, authorTopicWeights + (a + 1) * K);
        for (int k = 0; k < K; ++k) th[k].assign(topics + k * V, topics + (k + 1) * V);
        const auto mode = coopMode == CHDP_MODE_MAXIMIZATION ? chdp::CoopMode::Maximization
                                                             : chdp::CoopMode::Superposition;
        *out = chdp::author_perplexity(test->data.tokens, test->data.links, pi, th, V, mode);
        return CHDP_OK;
    });
}

chdp_status chdp_rank_labels(const double* labelWeights, int L, const double* docWeights, int K,
                             int* orderOut, double* scoresOut) {
    if (auto rc = require(labelWeights && docWeights && orderOut, "null argument")) return rc;
    return guarded([&] {
        std::vector<std::vector<double>> lw(L);
        for (int l = 0; l < L; ++l) lw[l].assign(labelWeights + l * K, labelWeights + (l + 1) * K);
        const auto r = chdp::rank_labels(lw, std::vector<double>(docWeights, docWeights + K));
        std::memcpy(orderOut, r.order.data(), r.order.size() * sizeof(int));
        if (scoresOut) std::memcpy(scoresOut, r.scores.data(), r.scores.size() * sizeof(double));
        return CHDP_OK;
    });
}

chdp_status chdp_multilabel_metrics(const int* orders, int I, int L, const int* trueLabels,
                                    const int* trueOffsets, double* oneError, double* coverage,
                                    double* rankingLoss, double* avgPrecision, int* skipped) {
    if (auto rc = require(orders && trueLabels && trueOffsets, "null argument")) return rc;
    return guarded([&] {
        std::vector<chdp::RankingResult> rankings(I);
        std::vector<std::vector<int>> truth(I);
        for (int i = 0; i < I; ++i) {
            rankings[i].order.assign(orders + i * L, orders + (i + 1) * L);
            rankings[i].scores.assign(L, 0.0);
            truth[i].assign(trueLabels + trueOffsets[i], trueLabels + trueOffsets[i + 1]);
        }
        const auto m = chdp::multilabel_metrics(rankings, truth);
        if (oneError) *oneError = m.oneError;
        if (coverage) *coverage = m.coverage;
        if (rankingLoss) *rankingLoss = m.rankingLoss;
        if (avgPrecision) *avgPrecision = m.avgPrecision;
        if (skipped) *skipped = m.skipped;
        return CHDP_OK;
    });
}

}  // extern "C"
