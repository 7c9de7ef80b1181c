#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cnm/data_io.hpp"
#include "cnm/matcher.hpp"

namespace cnm {

struct RankedItem {
    std::size_t answer_id = 0;
    double score = 0.0;
    int label = 0;
};

// Candidates of one question sorted by score descending; ties go to the
// lower answer_id.
struct RankedList {
    std::string question_id;
    std::vector<RankedItem> items;
};

RankedList rank(std::string question_id, std::vector<RankedItem> items);

// Mean over positive positions i of (positives in the top i) / i. Throws
// DomainError when the list holds no positive.
double average_precision(const RankedList& list);
// 1 / rank of the first positive. Throws DomainError when there is none.
double reciprocal_rank(const RankedList& list);

struct QuestionMetrics {
    std::string question_id;
    std::size_t candidates = 0;
    double average_precision = 0.0;
    double reciprocal_rank = 0.0;
};

struct MetricReport {
    std::string split;
    double map = 0.0;
    double mrr = 0.0;
    std::vector<QuestionMetrics> per_question;
};

MetricReport aggregate(std::span<const RankedList> lists, const std::string& split = "");

// Scores every candidate against its question in eval mode and aggregates
// MAP/MRR. Throws DataError for an empty split.
MetricReport evaluate(const ParameterSet& params, const ModelConfig& model, const EncodedDataset& split);

// Ranked lists produced by the model, one per question.
std::vector<RankedList> rank_dataset(const ParameterSet& params, const ModelConfig& model,
                                     const EncodedDataset& split);

// Fixed-width table for people.
void write_report_table(std::ostream& out, const MetricReport& report);
// One JSON object per line: a "summary" record followed by "question" records.
void write_report_jsonl(std::ostream& out, const MetricReport& report);
MetricReport read_report_jsonl(std::istream& in);

}  // namespace cnm
