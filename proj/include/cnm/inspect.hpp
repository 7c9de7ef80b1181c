#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cnm/checkpoint.hpp"

namespace cnm {

struct WordImportance {
    std::string token;
    std::size_t index = 0;
    double norm = 0.0;  // L2 norm of the amplitude row
};

// Words ranked by amplitude norm, descending (lower index first on ties).
// top_n is clamped to the vocabulary size.
std::vector<WordImportance> inspect_words(const Checkpoint& checkpoint, std::size_t top_n);

struct WeightedWord {
    std::string token;
    double weight = 0.0;
};

// The question/answer window pair whose measurement probability columns are
// closest by cosine, with the mixture weight of every word in both windows.
// Pairs within 1e-12 of the best keep the earliest (window size, question
// window, answer window) in scan order.
struct MatchInspection {
    std::size_t window_length = 0;  // 0 for the global mixture
    WindowSpan question_window;
    WindowSpan answer_window;
    double similarity = 0.0;
    std::vector<WeightedWord> question_words;
    std::vector<WeightedWord> answer_words;
};

// Throws DegenerateInputError when either text tokenizes to nothing.
MatchInspection inspect_match(const Checkpoint& checkpoint, const std::string& question, const std::string& answer);

struct Neighbour {
    std::string token;
    std::size_t index = 0;
    double similarity = 0.0;  // |<v|w>|
};

// For every measurement, the top_n vocabulary words by |<v|w>| (descending,
// lower index first on ties). Reserved tokens are skipped; top_n is clamped
// to the number of remaining words.
std::vector<std::vector<Neighbour>> inspect_measurements(const Checkpoint& checkpoint, std::size_t top_n);

void write_words_report(std::ostream& out, const std::vector<WordImportance>& words);
void write_match_report(std::ostream& out, const MatchInspection& match);
void write_measurements_report(std::ostream& out, const std::vector<std::vector<Neighbour>>& lists);

}  // namespace cnm
