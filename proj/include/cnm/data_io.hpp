#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cnm/embedding.hpp"

namespace cnm {

struct QAPair {
    std::string question_id;
    std::string question;
    std::string answer;
    int label = 0;
};

struct Candidate {
    std::string answer;
    int label = 0;
    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct Question {
    std::string id;
    std::string text;
    std::vector<Candidate> candidates;

    std::size_t positives() const;
    std::size_t negatives() const;
    friend bool operator==(const Question&, const Question&) = default;
};

struct QADataset {
    std::string split;
    std::vector<Question> questions;

    std::size_t pair_count() const;
    friend bool operator==(const QADataset&, const QADataset&) = default;
};

// Column layout of a raw TSV release. A negative question_id_column groups
// rows by question text instead.
struct FormatDescriptor {
    int question_id_column = 0;
    int question_column = 1;
    int answer_column = 2;
    int label_column = 3;
    bool header = false;

    // question_id, question, answer, label with a header row.
    static FormatDescriptor canonical();
    // QuestionID Question DocumentID DocumentTitle SentenceID Sentence Label.
    static FormatDescriptor wikiqa();
    // question, answer, label without ids.
    static FormatDescriptor trecqa();

    // Reads `key = value` lines (keys: question_id_column, question_column,
    // answer_column, label_column, header, preset). '#' starts a comment.
    static FormatDescriptor load(const std::filesystem::path& path);
    static FormatDescriptor parse(std::istream& in, const std::string& source);
};

struct LoadStats {
    std::size_t rows = 0;
    std::size_t questions_seen = 0;
    std::size_t pairs_dropped_empty = 0;
    std::size_t questions_without_positive = 0;
    std::size_t questions = 0;
    std::size_t pairs = 0;
};

// Parses, groups by question (first-appearance order), drops pairs whose
// question or answer tokenizes to nothing, then drops questions without a
// positive answer. Malformed rows raise ParseError with the line number; a
// label other than 0/1 raises DataError.
QADataset load_tsv(const std::filesystem::path& path, const FormatDescriptor& format,
                   const std::string& split = "", LoadStats* stats = nullptr);
QADataset read_tsv(std::istream& in, const FormatDescriptor& format, const std::string& source,
                   const std::string& split = "", LoadStats* stats = nullptr);

// Canonical layout: header plus question_id, question, answer, label.
void write_tsv(std::ostream& out, const QADataset& dataset);
void write_tsv(const std::filesystem::path& path, const QADataset& dataset);

// Tokens of every question and answer in the given (training) splits plus
// the reserved padding/OOV entries; ordered by descending frequency, then
// lexicographically.
Vocabulary build_vocab(std::span<const QADataset> datasets);

struct EncodedCandidate {
    std::vector<std::size_t> tokens;
    int label = 0;
    std::size_t answer_id = 0;  // position within the question
};

struct EncodedQuestion {
    std::string id;
    std::vector<std::size_t> tokens;
    std::vector<EncodedCandidate> candidates;
};

struct EncodedDataset {
    std::string split;
    std::vector<EncodedQuestion> questions;
};

// Tokenizes, truncates to `max_length` tokens and maps tokens through
// `vocab` (unknown tokens map to the OOV entry).
EncodedDataset encode(const QADataset& dataset, const Vocabulary& vocab, std::size_t max_length);

struct Triplet {
    std::size_t question = 0;
    std::size_t positive = 0;  // candidate index
    std::size_t negative = 0;  // candidate index
    friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct TripletSample {
    std::vector<Triplet> triplets;
    std::vector<std::size_t> skipped_questions;  // no negative answers
};

// Every positive answer is paired with one negative drawn without
// replacement from its question's negatives (the pool is refilled once
// exhausted); the result is shuffled. Deterministic in `epoch_seed`.
TripletSample sample_triplets(const QADataset& dataset, std::uint64_t epoch_seed);
TripletSample sample_triplets(const EncodedDataset& dataset, std::uint64_t epoch_seed);

// Consecutive chunks of at most `batch_size` triplets.
std::vector<std::vector<Triplet>> make_batches(std::span<const Triplet> triplets, std::size_t batch_size);

}  // namespace cnm
