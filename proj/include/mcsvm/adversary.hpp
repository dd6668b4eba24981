#ifndef MCSVM_ADVERSARY_HPP
#define MCSVM_ADVERSARY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mcsvm/data_gen.hpp"
#include "mcsvm/types.hpp"

namespace mcsvm {

// Heuristic worst-case strategies for the nasty oracle. The adversary sees
// the clean sample and the full ground truth and replaces exactly
// floor(eta * n) pairs.
enum class Strategy { none, random_replace, label_flip_nearest, boundary_inject, fake_cluster };

Strategy strategy_from_string(const std::string& s);
std::string to_string(Strategy s);

struct AttackConfig {
    double eta = 0.0;  // in [0, 1)
    Strategy strategy = Strategy::none;
    std::uint64_t seed = 0;
};

struct CorruptionResult {
    LabeledSet corrupted;
    // harness-only ground truth marking replaced positions; the learner API
    // never receives it
    std::vector<std::uint8_t> dirty_mask;
};

CorruptionResult corrupt(const LabeledSet& clean, const GroundTruth& gt, const AttackConfig& cfg);

}  // namespace mcsvm

#endif
