#pragma once

#include <cstdint>
#include <string>

#include "types.hpp"

namespace chdp {

/// Line-oriented corpus: header "A D V", D link lines "d: a1 a2 ...", then D
/// token lines "d: w1 w2 ..." (0-based indices throughout).
CoopHierarchy parse_corpus(const std::string& text);
CoopHierarchy load_corpus(const std::string& path);
std::string format_corpus(const CoopHierarchy& chs);
void save_corpus(const CoopHierarchy& chs, const std::string& path);

/// FNV-1a over the canonical corpus text; ties checkpoints to their dataset.
std::uint64_t corpus_digest(const CoopHierarchy& chs);

/// Self-describing checkpoint envelope. stateBlob is engine-defined JSON.
struct Checkpoint {
    std::string schema = "chdp-checkpoint";
    int version = 1;
    std::string engine;  // "gibbs" | "vi"
    Hyperparams hp;
    std::uint64_t datasetDigest = 0;
    int iteration = 0;
    std::string stateBlob;
};

std::string format_checkpoint(const Checkpoint& cp);
Checkpoint parse_checkpoint(const std::string& text);
void save_checkpoint(const Checkpoint& cp, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace chdp
