#include "synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "mathutil.hpp"

namespace chdp {

CoopHierarchy generate_chs(int A, int D, int V, double densityAD, int tokensPerDoc,
                           std::uint64_t seed) {
    if (A < 1 || D < 1 || V < 1) throw std::invalid_argument("generate_chs: counts must be >= 1");
    if (!(densityAD > 0.0) || densityAD > 1.0)
        throw std::invalid_argument("generate_chs: densityAD must be in (0,1]");
    if (tokensPerDoc < 1) throw std::invalid_argument("generate_chs: tokensPerDoc must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    CoopHierarchy chs;
    chs.numUpper = A;
    chs.numMiddle = D;
    chs.vocabSize = V;
    chs.links.resize(D);
    std::vector<int> authorDocs(A, 0);
    for (int d = 0; d < D; ++d)
        for (int a = 0; a < A; ++a)
            if (unif(rng) < densityAD) {
                chs.links[d].push_back(a);
                ++authorDocs[a];
            }
    // repair: every doc needs an author, every author a doc
    std::uniform_int_distribution<int> pickA(0, A - 1);
    std::uniform_int_distribution<int> pickD(0, D - 1);
    for (int d = 0; d < D; ++d)
        if (chs.links[d].empty()) {
            const int a = pickA(rng);
            chs.links[d].push_back(a);
            ++authorDocs[a];
        }
    for (int a = 0; a < A; ++a)
        while (authorDocs[a] == 0) {
            const int d = pickD(rng);
            if (std::find(chs.links[d].begin(), chs.links[d].end(), a) != chs.links[d].end())
                continue;
            chs.links[d].push_back(a);
            ++authorDocs[a];
        }
    for (auto& l : chs.links) std::sort(l.begin(), l.end());
    std::uniform_int_distribution<int> pickW(0, V - 1);
    chs.tokens.resize(D);
    for (int d = 0; d < D; ++d) {
        chs.tokens[d].resize(tokensPerDoc);
        for (int& w : chs.tokens[d]) w = pickW(rng);
    }
    chs.validate();
    return chs;
}

namespace {
std::vector<double> draw_dirichlet(const std::vector<double>& alpha, std::mt19937_64& rng) {
    std::vector<double> out(alpha.size());
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        std::gamma_distribution<double> g(alpha[i], 1.0);
        out[i] = g(rng);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}
}  // namespace

RecoveryDataset generate_recovery(CoopMode mode, std::uint64_t seed) {
    return generate_recovery(mode, seed, 12, 20, 3, 0.3, 100);
}

RecoveryDataset generate_recovery(CoopMode mode, std::uint64_t seed, int A, int D, int V,
                                  double densityAD, int tokensPerDoc) {
    if (A % 3 != 0) throw std::invalid_argument("generate_recovery: A must split into 3 groups");
    std::mt19937_64 rng(seed);
    RecoveryDataset out;
    out.truth.mode = mode;
    // Three groups with interests pulled toward distinct corners: cyclic
    // rotations of a (20,1,...,1) concentration vector.
    out.truth.groupOf.resize(A);
    out.truth.authorInterests.resize(A);
    for (int a = 0; a < A; ++a) {
        const int g = a / (A / 3);
        out.truth.groupOf[a] = g;
        std::vector<double> alpha(V, 1.0);
        alpha[g % V] = 20.0;
        out.truth.authorInterests[a] = draw_dirichlet(alpha, rng);
    }
    // link structure with the same density/repair scheme as generate_chs
    CoopHierarchy chs = generate_chs(A, D, V, densityAD, 1, rng());
    out.truth.docInterests.resize(D);
    for (int d = 0; d < D; ++d) {
        std::vector<WeightVector> rows;
        for (int a : chs.links[d]) rows.push_back(out.truth.authorInterests[a]);
        out.truth.docInterests[d] =
            mode == CoopMode::Superposition ? superpose(rows) : maximize(rows);
        chs.tokens[d].resize(tokensPerDoc);
        std::discrete_distribution<int> draw(out.truth.docInterests[d].begin(),
                                             out.truth.docInterests[d].end());
        for (int& w : chs.tokens[d]) w = draw(rng);
    }
    chs.validate();
    out.data = std::move(chs);
    return out;
}

CoopHierarchy degenerate_to_type1(const CoopHierarchy& chs, std::uint64_t seed,
                                  std::vector<int>* authorRemap) {
    chs.validate();
    std::mt19937_64 rng(seed);
    CoopHierarchy out;
    out.numMiddle = chs.numMiddle;
    out.vocabSize = chs.vocabSize;
    out.tokens = chs.tokens;
    std::vector<int> kept(chs.numMiddle);
    std::vector<char> used(chs.numUpper, 0);
    for (int d = 0; d < chs.numMiddle; ++d) {
        std::uniform_int_distribution<int> pick(0, static_cast<int>(chs.links[d].size()) - 1);
        kept[d] = chs.links[d][pick(rng)];
        used[kept[d]] = 1;
    }
    std::vector<int> remap(chs.numUpper, -1);
    int next = 0;
    for (int a = 0; a < chs.numUpper; ++a)
        if (used[a]) remap[a] = next++;
    out.numUpper = next;
    out.links.resize(chs.numMiddle);
    for (int d = 0; d < chs.numMiddle; ++d) out.links[d] = {remap[kept[d]]};
    if (authorRemap) *authorRemap = remap;
    out.validate();
    return out;
}

}  // namespace chdp
