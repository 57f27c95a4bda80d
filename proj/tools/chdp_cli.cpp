// Command-line harness for the chdp shared library: dataset generation,
// fitting, convergence diagnostics, and task evaluation. All file outputs are
// plain text (corpus format, CSV, JSON) so runs are diffable and re-parseable.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chdp/chdp.h"

namespace {

using nlohmann::json;

struct CliError : std::runtime_error {
    chdp_status status;
    CliError(chdp_status s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

void check(chdp_status rc) {
    if (rc != CHDP_OK) throw CliError(rc, chdp_last_error());
}

struct CorpusHandle {
    chdp_corpus* ptr = nullptr;
    ~CorpusHandle() { chdp_corpus_free(ptr); }
};
struct GibbsHandle {
    chdp_gibbs* ptr = nullptr;
    ~GibbsHandle() { chdp_gibbs_free(ptr); }
};
struct ViHandle {
    chdp_vi* ptr = nullptr;
    ~ViHandle() { chdp_vi_free(ptr); }
};

int mode_from_string(const std::string& s) {
    if (s == "superposition" || s == "sup") return CHDP_MODE_SUPERPOSITION;
    if (s == "maximization" || s == "max") return CHDP_MODE_MAXIMIZATION;
    throw CliError(CHDP_ERR_INVALID_ARGUMENT, "unknown mode: " + s);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError(CHDP_ERR_IO, "cannot write " + path);
    out << content;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError(CHDP_ERR_IO, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// metrics CSV rows share the fixed column order: run_id, metric, value, seed, iter
struct MetricsWriter {
    std::ostringstream buf;
    MetricsWriter() { buf << "run_id,metric,value,seed,iter\n"; }
    void row(const std::string& runId, const std::string& metric, double value,
             unsigned long long seed, int iter) {
        buf << runId << ',' << metric << ',';
        char num[64];
        std::snprintf(num, sizeof(num), "%.17g", value);
        buf << num << ',' << seed << ',' << iter << '\n';
    }
};

void write_matrix_csv(const std::string& path, const std::vector<double>& flat, int rows,
                      int cols) {
    std::ostringstream out;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c) out << ',';
            char num[64];
            std::snprintf(num, sizeof(num), "%.17g", flat[r * cols + c]);
            out << num;
        }
        out << '\n';
    }
    write_text(path, out.str());
}

std::vector<std::vector<double>> read_matrix_csv(const std::string& path) {
    std::istringstream in(read_text(path));
    std::vector<std::vector<double>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        out.push_back(std::move(row));
    }
    return out;
}

struct Trace {
    std::vector<int> iter;
    std::vector<double> loglik;
    std::vector<double> k;
};

Trace read_trace_csv(const std::string& path) {
    std::istringstream in(read_text(path));
    Trace t;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line.back() == '\r') {
            while (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
        }
        if (header) {
            header = false;
            continue;
        }
        std::istringstream ls(line);
        std::string a, b, c;
        std::getline(ls, a, ',');
        std::getline(ls, b, ',');
        std::getline(ls, c, ',');
        t.iter.push_back(std::stoi(a));
        t.loglik.push_back(std::stod(b));
        t.k.push_back(std::stod(c));
    }
    if (t.iter.empty()) throw CliError(CHDP_ERR_PARSE, "empty trace file: " + path);
    return t;
}

void write_manifest(const std::string& dir, const std::string& command, const json& params) {
    json m;
    m["schema"] = "chdp-manifest";
    m["version"] = 1;
    m["command"] = command;
    m["params"] = params;
    write_text(dir + "/manifest.json", m.dump(2));
}

void add_hp_flags(CLI::App* cmd, chdp_hyperparams& hp, std::string& mode) {
    cmd->add_option("--alpha0", hp.alpha0, "top-layer concentration");
    cmd->add_option("--alpha-a", hp.alphaA, "chef-layer concentration");
    cmd->add_option("--alpha-d", hp.alphaD, "restaurant-layer concentration");
    cmd->add_option("--eta", hp.eta, "Dirichlet base parameter");
    cmd->add_option("--gamma", hp.gammaProx, "proximal weight");
    cmd->add_option("--mc-samples", hp.mcSamples, "Monte-Carlo sample count");
    cmd->add_option("--trunc-k", hp.truncK, "dish truncation");
    cmd->add_option("--trunc-o", hp.truncO, "option truncation");
    cmd->add_option("--trunc-t", hp.truncT, "table truncation");
    cmd->add_option("--seed", hp.seed, "RNG seed");
    cmd->add_option("--mode", mode, "superposition|maximization");
}

json hp_to_json(const chdp_hyperparams& hp) {
    return {{"alpha0", hp.alpha0},   {"alphaA", hp.alphaA},       {"alphaD", hp.alphaD},
            {"eta", hp.eta},         {"gammaProx", hp.gammaProx}, {"mcSamples", hp.mcSamples},
            {"truncK", hp.truncK},   {"truncO", hp.truncO},       {"truncT", hp.truncT},
            {"coopMode", hp.coopMode},                            {"seed", hp.seed}};
}

int run_cli(int argc, char** argv) {
    CLI::App app{"cooperative hierarchical Dirichlet process toolkit"};
    app.require_subcommand(1);

    // ---- generate ----
    auto* gen = app.add_subcommand("generate", "emit a synthetic corpus");
    std::string genKind = "chs", genMode = "superposition", genOut, genTruth;
    int genA = 10, genD = 20, genV = 50, genTok = 10;
    double genDensity = 0.3;
    unsigned long long genSeed = 0;
    gen->add_option("--kind", genKind, "chs|recovery");
    gen->add_option("--A", genA);
    gen->add_option("--D", genD);
    gen->add_option("--V", genV);
    gen->add_option("--density", genDensity);
    gen->add_option("--tokens-per-doc", genTok);
    gen->add_option("--seed", genSeed);
    gen->add_option("--mode", genMode, "cooperation mode (recovery kind)");
    gen->add_option("--out", genOut, "corpus output path")->required();
    gen->add_option("--truth", genTruth, "ground-truth JSON output (recovery kind)");
    gen->callback([&] {
        CorpusHandle c;
        if (genKind == "chs") {
            check(chdp_generate_chs(genA, genD, genV, genDensity, genTok, genSeed, &c.ptr));
        } else if (genKind == "recovery") {
            const int A = 12, D = 20, V = 3;
            std::vector<double> ai(A * V), di(D * V);
            std::vector<int> grp(A);
            check(chdp_generate_recovery(mode_from_string(genMode), genSeed, &c.ptr, ai.data(),
                                         di.data(), grp.data()));
            if (!genTruth.empty()) {
                json t;
                t["mode"] = genMode;
                t["groupOf"] = grp;
                for (int a = 0; a < A; ++a)
                    t["authorInterests"].push_back(
                        std::vector<double>(ai.begin() + a * V, ai.begin() + (a + 1) * V));
                for (int d = 0; d < D; ++d)
                    t["docInterests"].push_back(
                        std::vector<double>(di.begin() + d * V, di.begin() + (d + 1) * V));
                write_text(genTruth, t.dump(2));
            }
        } else {
            throw CliError(CHDP_ERR_INVALID_ARGUMENT, "unknown --kind: " + genKind);
        }
        check(chdp_corpus_save(c.ptr, genOut.c_str()));
    });

    // ---- degenerate ----
    auto* deg = app.add_subcommand("degenerate", "reduce a corpus to one author per doc");
    std::string degIn, degOut, degRemap;
    unsigned long long degSeed = 0;
    deg->add_option("--in", degIn)->required();
    deg->add_option("--out", degOut)->required();
    deg->add_option("--seed", degSeed);
    deg->add_option("--remap", degRemap, "author index remap JSON output");
    deg->callback([&] {
        CorpusHandle in, out;
        check(chdp_corpus_load(degIn.c_str(), &in.ptr));
        std::vector<int> remap(chdp_corpus_num_upper(in.ptr));
        check(chdp_degenerate_to_type1(in.ptr, degSeed, &out.ptr, remap.data()));
        check(chdp_corpus_save(out.ptr, degOut.c_str()));
        if (!degRemap.empty()) write_text(degRemap, json(remap).dump());
    });

    // ---- fit-gibbs ----
    auto* fg = app.add_subcommand("fit-gibbs", "run the marginal Gibbs sampler");
    std::string fgCorpus, fgOutDir, fgMode = "superposition", fgResume, fgRunId = "gibbs";
    chdp_hyperparams fgHp;
    chdp_hyperparams_default(&fgHp);
    int fgSamples = 100, fgBurnin = 100;
    bool fgAux = false, fgIgnoreLik = false;
    fg->add_option("--corpus", fgCorpus)->required();
    fg->add_option("--out-dir", fgOutDir)->required();
    add_hp_flags(fg, fgHp, fgMode);
    fg->add_option("--samples", fgSamples, "retained sweeps");
    fg->add_option("--burnin", fgBurnin, "discarded sweeps");
    fg->add_flag("--aux-chef", fgAux, "auxiliary-chef customer step");
    fg->add_flag("--ignore-likelihood", fgIgnoreLik, "structure-only run");
    fg->add_option("--resume", fgResume, "checkpoint to continue from");
    fg->add_option("--run-id", fgRunId);
    fg->callback([&] {
        fgHp.coopMode = mode_from_string(fgMode);
        CorpusHandle c;
        check(chdp_corpus_load(fgCorpus.c_str(), &c.ptr));
        GibbsHandle g;
        if (fgResume.empty()) {
            check(chdp_gibbs_create(c.ptr, &fgHp, fgAux ? 1 : 0, fgIgnoreLik ? 1 : 0, &g.ptr));
        } else {
            check(chdp_gibbs_load_checkpoint(c.ptr, fgResume.c_str(), &g.ptr));
            fgBurnin = 0;
        }
        const int A = chdp_corpus_num_upper(c.ptr), V = chdp_corpus_vocab_size(c.ptr);
        std::vector<double> loglik(fgSamples), interests(A * V);
        std::vector<int> kTrace(fgSamples);
        check(chdp_gibbs_run_chain(g.ptr, fgSamples, fgBurnin, loglik.data(), kTrace.data(),
                                   interests.data()));
        const int endIter = chdp_gibbs_iteration(g.ptr);
        std::ostringstream trace;
        trace << "iter,loglik,k\n";
        for (int i = 0; i < fgSamples; ++i) {
            char num[64];
            std::snprintf(num, sizeof(num), "%.17g", loglik[i]);
            trace << (endIter - fgSamples + i + 1) << ',' << num << ',' << kTrace[i] << '\n';
        }
        write_text(fgOutDir + "/trace.csv", trace.str());
        write_matrix_csv(fgOutDir + "/interests.csv", interests, A, V);
        MetricsWriter mw;
        mw.row(fgRunId, "final_loglik", loglik.back(), fgHp.seed, endIter);
        mw.row(fgRunId, "final_k", kTrace.back(), fgHp.seed, endIter);
        double meanK = 0.0;
        for (int k : kTrace) meanK += k;
        mw.row(fgRunId, "mean_k", meanK / fgSamples, fgHp.seed, endIter);
        write_text(fgOutDir + "/metrics.csv", mw.buf.str());
        check(chdp_gibbs_save_checkpoint(g.ptr, (fgOutDir + "/checkpoint.json").c_str()));
        json params = hp_to_json(fgHp);
        params["corpus"] = fgCorpus;
        params["corpusDigest"] = chdp_corpus_digest(c.ptr);
        params["samples"] = fgSamples;
        params["burnin"] = fgBurnin;
        params["auxChef"] = fgAux;
        params["ignoreLikelihood"] = fgIgnoreLik;
        params["resume"] = fgResume;
        params["runId"] = fgRunId;
        write_manifest(fgOutDir, "fit-gibbs", params);
    });

    // ---- fit-vi ----
    auto* fv = app.add_subcommand("fit-vi", "run stick-breaking variational inference");
    std::string fvCorpus, fvOutDir, fvMode = "superposition", fvResume, fvRunId = "vi";
    chdp_hyperparams fvHp;
    chdp_hyperparams_default(&fvHp);
    int fvMaxIter = 100;
    double fvTol = 1e-6;
    fv->add_option("--corpus", fvCorpus)->required();
    fv->add_option("--out-dir", fvOutDir)->required();
    add_hp_flags(fv, fvHp, fvMode);
    fv->add_option("--max-iter", fvMaxIter);
    fv->add_option("--tol", fvTol, "relative objective-change stop");
    fv->add_option("--resume", fvResume, "checkpoint to continue from");
    fv->add_option("--run-id", fvRunId);
    fv->callback([&] {
        fvHp.coopMode = mode_from_string(fvMode);
        CorpusHandle c;
        check(chdp_corpus_load(fvCorpus.c_str(), &c.ptr));
        ViHandle v;
        if (fvResume.empty())
            check(chdp_vi_create(c.ptr, &fvHp, &v.ptr));
        else
            check(chdp_vi_load_checkpoint(c.ptr, fvResume.c_str(), &v.ptr));
        const int startIter = chdp_vi_iteration(v.ptr);
        std::vector<double> obj(fvMaxIter);
        int len = 0;
        check(chdp_vi_run(v.ptr, fvMaxIter, fvTol, obj.data(), &len));
        std::ostringstream trace;
        trace << "iter,loglik,k\n";
        for (int i = 0; i < len; ++i) {
            char num[64];
            std::snprintf(num, sizeof(num), "%.17g", obj[i]);
            trace << (startIter + i + 1) << ',' << num << ',' << chdp_vi_active_dishes(v.ptr)
                  << '\n';
        }
        write_text(fvOutDir + "/trace.csv", trace.str());
        const int A = chdp_corpus_num_upper(c.ptr), V = chdp_corpus_vocab_size(c.ptr);
        std::vector<double> interests(A * V);
        check(chdp_vi_author_interests(v.ptr, interests.data()));
        write_matrix_csv(fvOutDir + "/interests.csv", interests, A, V);
        MetricsWriter mw;
        mw.row(fvRunId, "final_objective", obj[len - 1], fvHp.seed, chdp_vi_iteration(v.ptr));
        mw.row(fvRunId, "active_k", chdp_vi_active_dishes(v.ptr), fvHp.seed,
               chdp_vi_iteration(v.ptr));
        write_text(fvOutDir + "/metrics.csv", mw.buf.str());
        check(chdp_vi_save_checkpoint(v.ptr, (fvOutDir + "/checkpoint.json").c_str()));
        json params = hp_to_json(fvHp);
        params["corpus"] = fvCorpus;
        params["corpusDigest"] = chdp_corpus_digest(c.ptr);
        params["maxIter"] = fvMaxIter;
        params["tol"] = fvTol;
        params["resume"] = fvResume;
        params["runId"] = fvRunId;
        write_manifest(fvOutDir, "fit-vi", params);
    });

    // ---- diagnose ----
    auto* dg = app.add_subcommand("diagnose", "ACF/PSRF report over trace files");
    std::vector<std::string> dgTraces;
    std::vector<int> dgLags = {1, 10, 50, 100, 200};
    std::string dgOut;
    dg->add_option("--trace", dgTraces, "trace.csv files (>=2 enables PSRF)")->required();
    dg->add_option("--lags", dgLags, "ACF lags");
    dg->add_option("--out", dgOut, "report CSV path")->required();
    dg->callback([&] {
        std::vector<Trace> traces;
        for (const auto& p : dgTraces) traces.push_back(read_trace_csv(p));
        MetricsWriter mw;
        const int lastIter = traces[0].iter.back();
        for (int lag : dgLags) {
            if (lag >= static_cast<int>(traces[0].loglik.size())) continue;
            double a1 = 0, a2 = 0;
            check(chdp_acf(traces[0].loglik.data(), static_cast<int>(traces[0].loglik.size()),
                           lag, &a1));
            check(chdp_acf(traces[0].k.data(), static_cast<int>(traces[0].k.size()), lag, &a2));
            mw.row("diagnose", "acf_loglik_lag" + std::to_string(lag), a1, 0, lastIter);
            mw.row("diagnose", "acf_k_lag" + std::to_string(lag), a2, 0, lastIter);
        }
        if (traces.size() >= 2) {
            const int n = static_cast<int>(traces[0].loglik.size());
            for (const auto& t : traces)
                if (static_cast<int>(t.loglik.size()) != n)
                    throw CliError(CHDP_ERR_INVALID_ARGUMENT, "traces have unequal lengths");
            std::vector<double> ll, kk;
            for (const auto& t : traces) {
                ll.insert(ll.end(), t.loglik.begin(), t.loglik.end());
                kk.insert(kk.end(), t.k.begin(), t.k.end());
            }
            double p1 = 0, p2 = 0;
            check(chdp_psrf(ll.data(), static_cast<int>(traces.size()), n, &p1));
            check(chdp_psrf(kk.data(), static_cast<int>(traces.size()), n, &p2));
            mw.row("diagnose", "psrf_loglik", p1, 0, lastIter);
            mw.row("diagnose", "psrf_k", p2, 0, lastIter);
        }
        write_text(dgOut, mw.buf.str());
    });

    // ---- evaluate ----
    auto* ev = app.add_subcommand("evaluate", "task metrics");
    std::string evTask, evInterests, evTruth, evCorpus, evCheckpoint, evTrainCorpus, evOut;
    std::string evRunId = "evaluate";
    ev->add_option("--task", evTask, "recovery|perplexity")->required();
    ev->add_option("--interests", evInterests, "learned interests CSV (recovery)");
    ev->add_option("--truth", evTruth, "ground-truth JSON (recovery)");
    ev->add_option("--corpus", evCorpus, "test corpus (perplexity)");
    ev->add_option("--checkpoint", evCheckpoint, "fitted model checkpoint (perplexity)");
    ev->add_option("--train-corpus", evTrainCorpus, "corpus the checkpoint was fit on");
    ev->add_option("--out", evOut, "metrics CSV path")->required();
    ev->add_option("--run-id", evRunId);
    ev->callback([&] {
        MetricsWriter mw;
        if (evTask == "recovery") {
            if (evInterests.empty() || evTruth.empty())
                throw CliError(CHDP_ERR_INVALID_ARGUMENT,
                               "recovery task needs --interests and --truth");
            const auto learned = read_matrix_csv(evInterests);
            const auto t = json::parse(read_text(evTruth));
            const auto truth = t.at("authorInterests").get<std::vector<std::vector<double>>>();
            if (learned.size() != truth.size() || learned.empty() ||
                learned[0].size() != truth[0].size())
                throw CliError(CHDP_ERR_INVALID_ARGUMENT, "interest matrix shape mismatch");
            const int A = static_cast<int>(truth.size()), V = static_cast<int>(truth[0].size());
            std::vector<double> lf, tf;
            for (const auto& r : learned) lf.insert(lf.end(), r.begin(), r.end());
            for (const auto& r : truth) tf.insert(tf.end(), r.begin(), r.end());
            double dist = 0;
            check(chdp_recovery_distance(lf.data(), tf.data(), A, V, &dist));
            mw.row(evRunId, "recovery_distance", dist, 0, 0);
        } else if (evTask == "perplexity") {
            if (evCorpus.empty() || evCheckpoint.empty() || evTrainCorpus.empty())
                throw CliError(CHDP_ERR_INVALID_ARGUMENT,
                               "perplexity task needs --corpus, --checkpoint, --train-corpus");
            CorpusHandle train, test;
            check(chdp_corpus_load(evTrainCorpus.c_str(), &train.ptr));
            check(chdp_corpus_load(evCorpus.c_str(), &test.ptr));
            const auto cp = json::parse(read_text(evCheckpoint));
            const std::string engine = cp.at("engine").get<std::string>();
            const int coopMode = mode_from_string(
                cp.at("hyperparams").at("coopMode").get<std::string>());
            const int A = chdp_corpus_num_upper(train.ptr);
            const int V = chdp_corpus_vocab_size(train.ptr);
            std::vector<double> pi, topics;
            int K = 0;
            if (engine == "gibbs") {
                GibbsHandle g;
                check(chdp_gibbs_load_checkpoint(train.ptr, evCheckpoint.c_str(), &g.ptr));
                K = chdp_gibbs_num_dishes(g.ptr);
                pi.resize(static_cast<std::size_t>(A) * K);
                topics.resize(static_cast<std::size_t>(K) * V);
                for (int a = 0; a < A; ++a)
                    check(chdp_gibbs_author_topic_weights(g.ptr, a, pi.data() + a * K));
                check(chdp_gibbs_topics(g.ptr, topics.data()));
            } else {
                ViHandle v;
                check(chdp_vi_load_checkpoint(train.ptr, evCheckpoint.c_str(), &v.ptr));
                K = chdp_vi_trunc_k(v.ptr);
                pi.resize(static_cast<std::size_t>(A) * K);
                topics.resize(static_cast<std::size_t>(K) * V);
                for (int a = 0; a < A; ++a)
                    check(chdp_vi_author_topic_weights(v.ptr, a, pi.data() + a * K));
                check(chdp_vi_topics(v.ptr, topics.data()));
            }
            double ap = 0;
            check(chdp_author_perplexity(test.ptr, pi.data(), topics.data(), K, coopMode, &ap));
            mw.row(evRunId, "author_perplexity", ap, 0, 0);
        } else {
            throw CliError(CHDP_ERR_INVALID_ARGUMENT, "unknown --task: " + evTask);
        }
        write_text(evOut, mw.buf.str());
    });

    // ---- predict-labels ----
    auto* pl = app.add_subcommand("predict-labels", "rank upper-node labels for test docs");
    std::string plCheckpoint, plTrain, plTest, plOut, plRankings, plRunId = "predict-labels";
    pl->add_option("--checkpoint", plCheckpoint)->required();
    pl->add_option("--train-corpus", plTrain)->required();
    pl->add_option("--test-corpus", plTest)->required();
    pl->add_option("--out", plOut, "metrics CSV path")->required();
    pl->add_option("--rankings", plRankings, "per-doc ranking CSV path");
    pl->add_option("--run-id", plRunId);
    pl->callback([&] {
        CorpusHandle train, test;
        check(chdp_corpus_load(plTrain.c_str(), &train.ptr));
        check(chdp_corpus_load(plTest.c_str(), &test.ptr));
        const auto cp = json::parse(read_text(plCheckpoint));
        const std::string engine = cp.at("engine").get<std::string>();
        const int L = chdp_corpus_num_upper(train.ptr);
        const int V = chdp_corpus_vocab_size(train.ptr);
        std::vector<double> labelW, topics;
        int K = 0;
        GibbsHandle g;
        ViHandle v;
        if (engine == "gibbs") {
            check(chdp_gibbs_load_checkpoint(train.ptr, plCheckpoint.c_str(), &g.ptr));
            K = chdp_gibbs_num_dishes(g.ptr);
            labelW.resize(static_cast<std::size_t>(L) * K);
            topics.resize(static_cast<std::size_t>(K) * V);
            for (int l = 0; l < L; ++l)
                check(chdp_gibbs_author_topic_weights(g.ptr, l, labelW.data() + l * K));
            check(chdp_gibbs_topics(g.ptr, topics.data()));
        } else {
            check(chdp_vi_load_checkpoint(train.ptr, plCheckpoint.c_str(), &v.ptr));
            K = chdp_vi_trunc_k(v.ptr);
            labelW.resize(static_cast<std::size_t>(L) * K);
            topics.resize(static_cast<std::size_t>(K) * V);
            for (int l = 0; l < L; ++l)
                check(chdp_vi_author_topic_weights(v.ptr, l, labelW.data() + l * K));
            check(chdp_vi_topics(v.ptr, topics.data()));
        }
        const int I = chdp_corpus_num_middle(test.ptr);
        std::vector<int> orders(static_cast<std::size_t>(I) * L);
        std::vector<int> trueLabels;
        std::vector<int> offsets = {0};
        std::ostringstream rankOut;
        rankOut << "doc,rank,label,score\n";
        for (int d = 0; d < I; ++d) {
            const int n = chdp_corpus_num_tokens(test.ptr, d);
            std::vector<int> tokens(n);
            check(chdp_corpus_tokens(test.ptr, d, tokens.data(), n));
            std::vector<double> docW(K);
            check(chdp_doc_topic_weights(topics.data(), K, V, tokens.data(), n, docW.data()));
            std::vector<double> scores(L);
            check(chdp_rank_labels(labelW.data(), L, docW.data(), K, orders.data() + d * L,
                                   scores.data()));
            for (int pos = 0; pos < L; ++pos) {
                const int label = orders[d * L + pos];
                char num[64];
                std::snprintf(num, sizeof(num), "%.17g", scores[label]);
                rankOut << d << ',' << pos << ',' << label << ',' << num << '\n';
            }
            const int nl = chdp_corpus_num_links(test.ptr, d);
            std::vector<int> links(nl);
            check(chdp_corpus_links(test.ptr, d, links.data(), nl));
            trueLabels.insert(trueLabels.end(), links.begin(), links.end());
            offsets.push_back(static_cast<int>(trueLabels.size()));
        }
        double oneErr = 0, cov = 0, rloss = 0, ap = 0;
        int skipped = 0;
        check(chdp_multilabel_metrics(orders.data(), I, L, trueLabels.data(), offsets.data(),
                                      &oneErr, &cov, &rloss, &ap, &skipped));
        MetricsWriter mw;
        mw.row(plRunId, "one_error", oneErr, 0, 0);
        mw.row(plRunId, "coverage", cov, 0, 0);
        mw.row(plRunId, "ranking_loss", rloss, 0, 0);
        mw.row(plRunId, "avg_precision", ap, 0, 0);
        mw.row(plRunId, "skipped", skipped, 0, 0);
        write_text(plOut, mw.buf.str());
        if (!plRankings.empty()) write_text(plRankings, rankOut.str());
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const CliError& e) {
        json err = {{"error", e.what()}, {"status", static_cast<int>(e.status)}};
        std::cerr << err.dump() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        json err = {{"error", e.what()}, {"status", static_cast<int>(CHDP_ERR_UNKNOWN)}};
        std::cerr << err.dump() << std::endl;
        return 1;
    }
}
