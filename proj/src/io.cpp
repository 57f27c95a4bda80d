#include "io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace chdp {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw std::runtime_error("corpus parse error at line " + std::to_string(line) + ": " + what);
}

// "d: x1 x2 ..." -> (d, values); expectedIndex pins the line order.
std::vector<int> parse_indexed_line(const std::string& line, int lineNo, int expectedIndex,
                                    bool allowEmpty) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) parse_fail(lineNo, "missing ':'");
    int idx = -1;
    try {
        idx = std::stoi(line.substr(0, colon));
    } catch (const std::exception&) {
        parse_fail(lineNo, "bad line index");
    }
    if (idx != expectedIndex)
        parse_fail(lineNo, "expected index " + std::to_string(expectedIndex) + ", got " +
                               std::to_string(idx));
    std::vector<int> values;
    std::istringstream rest(line.substr(colon + 1));
    std::string tok;
    while (rest >> tok) {
        try {
            values.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            parse_fail(lineNo, "non-integer entry '" + tok + "'");
        }
    }
    if (values.empty() && !allowEmpty) parse_fail(lineNo, "empty entry list");
    return values;
}

}  // namespace

CoopHierarchy parse_corpus(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineNo;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    if (!next_line()) parse_fail(1, "missing header");
    CoopHierarchy chs;
    {
        std::istringstream hdr(line);
        if (!(hdr >> chs.numUpper >> chs.numMiddle >> chs.vocabSize))
            parse_fail(lineNo, "header must be 'A D V'");
        std::string extra;
        if (hdr >> extra) parse_fail(lineNo, "trailing header content");
    }
    if (chs.numUpper < 1 || chs.numMiddle < 1 || chs.vocabSize < 1)
        parse_fail(lineNo, "header counts must be >= 1");
    chs.links.resize(chs.numMiddle);
    for (int d = 0; d < chs.numMiddle; ++d) {
        if (!next_line()) parse_fail(lineNo + 1, "missing link line for doc " + std::to_string(d));
        chs.links[d] = parse_indexed_line(line, lineNo, d, false);
        for (int a : chs.links[d])
            if (a < 0 || a >= chs.numUpper) parse_fail(lineNo, "dangling upper-node index");
    }
    chs.tokens.resize(chs.numMiddle);
    for (int d = 0; d < chs.numMiddle; ++d) {
        if (!next_line()) parse_fail(lineNo + 1, "missing token line for doc " + std::to_string(d));
        chs.tokens[d] = parse_indexed_line(line, lineNo, d, false);
        for (int w : chs.tokens[d])
            if (w < 0 || w >= chs.vocabSize) parse_fail(lineNo, "token index out of range");
    }
    if (next_line()) parse_fail(lineNo, "unexpected trailing content");
    try {
        chs.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("corpus structure invalid: ") + e.what());
    }
    return chs;
}

std::string format_corpus(const CoopHierarchy& chs) {
    std::ostringstream out;
    out << chs.numUpper << ' ' << chs.numMiddle << ' ' << chs.vocabSize << '\n';
    for (int d = 0; d < chs.numMiddle; ++d) {
        out << d << ':';
        for (int a : chs.links[d]) out << ' ' << a;
        out << '\n';
    }
    for (int d = 0; d < chs.numMiddle; ++d) {
        out << d << ':';
        for (int w : chs.tokens[d]) out << ' ' << w;
        out << '\n';
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

CoopHierarchy load_corpus(const std::string& path) { return parse_corpus(read_file(path)); }

void save_corpus(const CoopHierarchy& chs, const std::string& path) {
    write_file(path, format_corpus(chs));
}

std::uint64_t corpus_digest(const CoopHierarchy& chs) {
    const std::string text = format_corpus(chs);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {
nlohmann::json hp_to_json(const Hyperparams& hp) {
    return {{"alpha0", hp.alpha0},   {"alphaA", hp.alphaA},       {"alphaD", hp.alphaD},
            {"eta", hp.eta},         {"gammaProx", hp.gammaProx}, {"mcSamples", hp.mcSamples},
            {"truncK", hp.truncK},   {"truncO", hp.truncO},       {"truncT", hp.truncT},
            {"coopMode", to_string(hp.coopMode)},                 {"seed", hp.seed}};
}

Hyperparams hp_from_json(const nlohmann::json& j) {
    Hyperparams hp;
    hp.alpha0 = j.at("alpha0").get<double>();
    hp.alphaA = j.at("alphaA").get<double>();
    hp.alphaD = j.at("alphaD").get<double>();
    hp.eta = j.at("eta").get<double>();
    hp.gammaProx = j.at("gammaProx").get<double>();
    hp.mcSamples = j.at("mcSamples").get<int>();
    hp.truncK = j.at("truncK").get<int>();
    hp.truncO = j.at("truncO").get<int>();
    hp.truncT = j.at("truncT").get<int>();
    hp.coopMode = coop_mode_from_string(j.at("coopMode").get<std::string>());
    hp.seed = j.at("seed").get<std::uint64_t>();
    return hp;
}
}  // namespace

std::string format_checkpoint(const Checkpoint& cp) {
    nlohmann::json j;
    j["schema"] = cp.schema;
    j["version"] = cp.version;
    j["engine"] = cp.engine;
    j["hyperparams"] = hp_to_json(cp.hp);
    j["datasetDigest"] = cp.datasetDigest;
    j["iteration"] = cp.iteration;
    j["state"] = nlohmann::json::parse(cp.stateBlob);
    return j.dump(2);
}

Checkpoint parse_checkpoint(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    Checkpoint cp;
    cp.schema = j.at("schema").get<std::string>();
    if (cp.schema != "chdp-checkpoint")
        throw std::runtime_error("not a checkpoint document (schema=" + cp.schema + ")");
    cp.version = j.at("version").get<int>();
    cp.engine = j.at("engine").get<std::string>();
    cp.hp = hp_from_json(j.at("hyperparams"));
    cp.datasetDigest = j.at("datasetDigest").get<std::uint64_t>();
    cp.iteration = j.at("iteration").get<int>();
    cp.stateBlob = j.at("state").dump();
    return cp;
}

void save_checkpoint(const Checkpoint& cp, const std::string& path) {
    write_file(path, format_checkpoint(cp));
}

Checkpoint load_checkpoint(const std::string& path) { return parse_checkpoint(read_file(path)); }

}  // namespace chdp
