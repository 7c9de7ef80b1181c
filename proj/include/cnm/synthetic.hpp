#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "cnm/data_io.hpp"

namespace cnm {

// Generator for answer-selection data with a TREC-like shape: short
// questions, about a dozen candidate sentences each, few positives.
//
// Every question names two key words of its topic. Positives contain the
// pair next to each other; hard negatives contain both words far apart;
// the remaining negatives come from the same topic without the pair or
// from another topic. Word lists depend only on the config, so splits drawn
// with different seeds share a vocabulary.
struct SyntheticQAConfig {
    std::size_t questions = 200;
    std::size_t topics = 20;
    std::size_t words_per_topic = 16;
    std::size_t filler_words = 40;
    std::size_t min_positives = 1;
    std::size_t max_positives = 2;
    std::size_t hard_negatives = 3;
    std::size_t other_negatives = 6;
};

QADataset synthetic_qa(const SyntheticQAConfig& config, std::uint64_t seed, const std::string& split,
                       const std::string& id_prefix = "q");

// `questions` questions, each with a unique marker word that appears in its
// positive answers and nowhere else, so one token separates the classes.
QADataset separable_toy(std::size_t questions, std::uint64_t seed, const std::string& split = "toy");

}  // namespace cnm
