#include "cnm/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "cnm/errors.hpp"
#include "cnm/parallel.hpp"

namespace cnm {

RankedList rank(std::string question_id, std::vector<RankedItem> items) {
    std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.answer_id < b.answer_id;
    });
    return {std::move(question_id), std::move(items)};
}

double average_precision(const RankedList& list) {
    std::size_t hits = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < list.items.size(); ++i) {
        if (list.items[i].label != 1) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    if (hits == 0) throw DomainError("average_precision: question " + list.question_id + " has no positive");
    return sum / static_cast<double>(hits);
}

double reciprocal_rank(const RankedList& list) {
    for (std::size_t i = 0; i < list.items.size(); ++i)
        if (list.items[i].label == 1) return 1.0 / static_cast<double>(i + 1);
    throw DomainError("reciprocal_rank: question " + list.question_id + " has no positive");
}

MetricReport aggregate(std::span<const RankedList> lists, const std::string& split) {
    MetricReport report;
    report.split = split;
    for (const auto& list : lists) {
        QuestionMetrics m{list.question_id, list.items.size(), average_precision(list), reciprocal_rank(list)};
        report.map += m.average_precision;
        report.mrr += m.reciprocal_rank;
        report.per_question.push_back(std::move(m));
    }
    if (!lists.empty()) {
        report.map /= static_cast<double>(lists.size());
        report.mrr /= static_cast<double>(lists.size());
    }
    return report;
}

std::vector<RankedList> rank_dataset(const ParameterSet& params, const ModelConfig& model,
                                     const EncodedDataset& split) {
    std::vector<RankedList> lists(split.questions.size());
    parallel_for(split.questions.size(), [&](std::size_t qi) {
        const auto& q = split.questions[qi];
        const auto q_rep = represent(q.tokens, params, model);
        std::vector<RankedItem> items;
        items.reserve(q.candidates.size());
        for (const auto& c : q.candidates)
            items.push_back({c.answer_id, score(q_rep, represent(c.tokens, params, model)), c.label});
        lists[qi] = rank(q.id, std::move(items));
    });
    return lists;
}

MetricReport evaluate(const ParameterSet& params, const ModelConfig& model, const EncodedDataset& split) {
    if (split.questions.empty()) throw DataError("evaluate: split '" + split.split + "' has no questions");
    const auto lists = rank_dataset(params, model, split);
    return aggregate(lists, split.split);
}

void write_report_table(std::ostream& out, const MetricReport& report) {
    out << "split      " << (report.split.empty() ? "-" : report.split) << '\n'
        << "questions  " << report.per_question.size() << '\n'
        << std::fixed << std::setprecision(4) << "MAP        " << report.map << '\n'
        << "MRR        " << report.mrr << '\n';
    out.unsetf(std::ios::floatfield);
}

void write_report_jsonl(std::ostream& out, const MetricReport& report) {
    using nlohmann::json;
    out << json{{"type", "summary"},
                {"split", report.split},
                {"questions", report.per_question.size()},
                {"map", report.map},
                {"mrr", report.mrr}}
               .dump()
        << '\n';
    for (const auto& q : report.per_question)
        out << json{{"type", "question"},
                    {"question_id", q.question_id},
                    {"candidates", q.candidates},
                    {"ap", q.average_precision},
                    {"rr", q.reciprocal_rank}}
                   .dump()
            << '\n';
}

MetricReport read_report_jsonl(std::istream& in) {
    using nlohmann::json;
    MetricReport report;
    std::string line;
    std::size_t line_no = 0;
    bool have_summary = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("report", line_no, e.what());
        }
        const auto type = j.value("type", "");
        if (type == "summary") {
            report.split = j.at("split").get<std::string>();
            report.map = j.at("map").get<double>();
            report.mrr = j.at("mrr").get<double>();
            have_summary = true;
        } else if (type == "question") {
            report.per_question.push_back({j.at("question_id").get<std::string>(), j.at("candidates").get<std::size_t>(),
                                           j.at("ap").get<double>(), j.at("rr").get<double>()});
        } else {
            throw ParseError("report", line_no, "unknown record type '" + type + "'");
        }
    }
    if (!have_summary) throw DataError("report has no summary record");
    return report;
}

}  // namespace cnm
