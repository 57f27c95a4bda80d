#ifndef CHDP_H
#define CHDP_H

/* C interface to the cooperative hierarchical Dirichlet process library.
 * All functions returning chdp_status set a thread-local error message
 * retrievable via chdp_last_error() on failure. Opaque handles are freed
 * with their matching _free function; passing NULL to _free is a no-op. */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    CHDP_OK = 0,
    CHDP_ERR_INVALID_ARGUMENT = 1,
    CHDP_ERR_PARSE = 2,
    CHDP_ERR_IO = 3,
    CHDP_ERR_STATE = 4,
    CHDP_ERR_NUMERIC = 5,
    CHDP_ERR_UNKNOWN = 6
} chdp_status;

/* Message describing the most recent failure on this thread. */
const char* chdp_last_error(void);

typedef struct chdp_corpus chdp_corpus;
typedef struct chdp_gibbs chdp_gibbs;
typedef struct chdp_vi chdp_vi;

#define CHDP_MODE_SUPERPOSITION 0
#define CHDP_MODE_MAXIMIZATION 1

typedef struct {
    double alpha0;
    double alphaA;
    double alphaD;
    double eta;
    double gammaProx;
    int mcSamples;
    int truncK;
    int truncO;
    int truncT;
    int coopMode; /* CHDP_MODE_* */
    unsigned long long seed;
} chdp_hyperparams;

void chdp_hyperparams_default(chdp_hyperparams* hp);

/* ---- corpus ---- */
chdp_status chdp_corpus_load(const char* path, chdp_corpus** out);
chdp_status chdp_corpus_parse(const char* text, chdp_corpus** out);
chdp_status chdp_corpus_save(const chdp_corpus* c, const char* path);
void chdp_corpus_free(chdp_corpus* c);
int chdp_corpus_num_upper(const chdp_corpus* c);
int chdp_corpus_num_middle(const chdp_corpus* c);
int chdp_corpus_vocab_size(const chdp_corpus* c);
int chdp_corpus_num_links(const chdp_corpus* c, int d);  /* -1 on bad index */
int chdp_corpus_num_tokens(const chdp_corpus* c, int d); /* -1 on bad index */
chdp_status chdp_corpus_links(const chdp_corpus* c, int d, int* out, int cap);
chdp_status chdp_corpus_tokens(const chdp_corpus* c, int d, int* out, int cap);
unsigned long long chdp_corpus_digest(const chdp_corpus* c);

/* ---- synthetic generators ---- */
chdp_status chdp_generate_chs(int A, int D, int V, double densityAD, int tokensPerDoc,
                              unsigned long long seed, chdp_corpus** out);
/* Fixed recovery protocol: A=12 (3 groups), D=20, V=3, density 0.3, 100
 * tokens/doc. Optional out buffers: authorInterests A*V, docInterests D*V,
 * groupOf length A. */
chdp_status chdp_generate_recovery(int coopMode, unsigned long long seed, chdp_corpus** outCorpus,
                                   double* authorInterests, double* docInterests, int* groupOf);
/* authorRemap (length numUpper of the input, or NULL): old index -> new or -1. */
chdp_status chdp_degenerate_to_type1(const chdp_corpus* c, unsigned long long seed,
                                     chdp_corpus** out, int* authorRemap);

/* ---- Gibbs engine ---- */
chdp_status chdp_gibbs_create(const chdp_corpus* c, const chdp_hyperparams* hp,
                              int useAuxiliaryChef, int ignoreLikelihood, chdp_gibbs** out);
void chdp_gibbs_free(chdp_gibbs* g);
/* loglikOut/kOut: numSamples entries, or NULL. meanInterestsOut: A*V or NULL. */
chdp_status chdp_gibbs_run_chain(chdp_gibbs* g, int numSamples, int burnIn, double* loglikOut,
                                 int* kOut, double* meanInterestsOut);
chdp_status chdp_gibbs_sweep(chdp_gibbs* g);
int chdp_gibbs_num_dishes(const chdp_gibbs* g);
int chdp_gibbs_iteration(const chdp_gibbs* g);
chdp_status chdp_gibbs_loglik(const chdp_gibbs* g, double* out);
chdp_status chdp_gibbs_author_interests(const chdp_gibbs* g, double* out /* A*V */);
chdp_status chdp_gibbs_author_topic_weights(const chdp_gibbs* g, int a,
                                            double* out /* num_dishes */);
chdp_status chdp_gibbs_topics(const chdp_gibbs* g, double* out /* num_dishes*V */);
chdp_status chdp_gibbs_save_checkpoint(const chdp_gibbs* g, const char* path);
chdp_status chdp_gibbs_load_checkpoint(const chdp_corpus* c, const char* path, chdp_gibbs** out);

/* ---- variational engine ---- */
chdp_status chdp_vi_create(const chdp_corpus* c, const chdp_hyperparams* hp, chdp_vi** out);
void chdp_vi_free(chdp_vi* v);
/* objOut holds up to maxIter entries (or NULL); *outLen gets the trace length. */
chdp_status chdp_vi_run(chdp_vi* v, int maxIter, double tol, double* objOut, int* outLen);
int chdp_vi_active_dishes(const chdp_vi* v);
int chdp_vi_iteration(const chdp_vi* v);
int chdp_vi_trunc_k(const chdp_vi* v);
chdp_status chdp_vi_author_interests(const chdp_vi* v, double* out /* A*V */);
chdp_status chdp_vi_author_topic_weights(const chdp_vi* v, int a, double* out /* truncK */);
chdp_status chdp_vi_topics(const chdp_vi* v, double* out /* truncK*V */);
chdp_status chdp_vi_save_checkpoint(const chdp_vi* v, const char* path);
chdp_status chdp_vi_load_checkpoint(const chdp_corpus* c, const char* path, chdp_vi** out);

/* ---- convergence diagnostics ---- */
chdp_status chdp_acf(const double* series, int n, int lag, double* out);
chdp_status chdp_psrf(const double* chains /* m*n row-major */, int m, int n, double* out);

/* ---- task metrics ---- */
chdp_status chdp_recovery_distance(const double* learned, const double* truth, int A, int V,
                                   double* out);
/* Topic weight of one document: cosine(topic row, token counts), normalized. */
chdp_status chdp_doc_topic_weights(const double* topics /* K*V */, int K, int V,
                                   const int* tokens, int n, double* out /* K */);
chdp_status chdp_author_perplexity(const chdp_corpus* test,
                                   const double* authorTopicWeights /* A*K */,
                                   const double* topics /* K*V */, int K, int coopMode,
                                   double* out);
chdp_status chdp_rank_labels(const double* labelWeights /* L*K */, int L,
                             const double* docWeights /* K */, int K, int* orderOut /* L */,
                             double* scoresOut /* L, or NULL */);
/* orders: I*L row-major rankings (best first). trueLabels flattened with
 * trueOffsets of length I+1. Any output pointer may be NULL. */
chdp_status chdp_multilabel_metrics(const int* orders, int I, int L, const int* trueLabels,
                                    const int* trueOffsets, double* oneError, double* coverage,
                                    double* rankingLoss, double* avgPrecision, int* skipped);

#ifdef __cplusplus
}
#endif

#endif /* CHDP_H */
