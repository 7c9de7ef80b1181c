#include "cnm/data_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

#include "cnm/errors.hpp"

namespace cnm {

std::size_t Question::positives() const {
    return static_cast<std::size_t>(
        std::count_if(candidates.begin(), candidates.end(), [](const Candidate& c) { return c.label == 1; }));
}

std::size_t Question::negatives() const { return candidates.size() - positives(); }

std::size_t QADataset::pair_count() const {
    std::size_t n = 0;
    for (const auto& q : questions) n += q.candidates.size();
    return n;
}

FormatDescriptor FormatDescriptor::canonical() { return {0, 1, 2, 3, true}; }
FormatDescriptor FormatDescriptor::wikiqa() { return {0, 1, 5, 6, true}; }
FormatDescriptor FormatDescriptor::trecqa() { return {-1, 0, 1, 2, false}; }

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

}  // namespace

FormatDescriptor FormatDescriptor::parse(std::istream& in, const std::string& source) {
    FormatDescriptor f = canonical();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(source, line_no, "expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        auto as_int = [&]() {
            try {
                std::size_t used = 0;
                const int v = std::stoi(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
                return v;
            } catch (const std::exception&) {
                throw ParseError(source, line_no, "expected an integer for '" + key + "'");
            }
        };
        if (key == "preset") {
            if (value == "canonical") f = canonical();
            else if (value == "wikiqa") f = wikiqa();
            else if (value == "trecqa") f = trecqa();
            else throw ConfigError(source + ": unknown preset '" + value + "'");
        } else if (key == "question_id_column") {
            f.question_id_column = as_int();
        } else if (key == "question_column") {
            f.question_column = as_int();
        } else if (key == "answer_column") {
            f.answer_column = as_int();
        } else if (key == "label_column") {
            f.label_column = as_int();
        } else if (key == "header") {
            if (value == "true" || value == "1") f.header = true;
            else if (value == "false" || value == "0") f.header = false;
            else throw ParseError(source, line_no, "header must be true or false");
        } else {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (f.question_column < 0 || f.answer_column < 0 || f.label_column < 0)
        throw ConfigError(source + ": question, answer and label columns are required");
    if (f.question_column == f.answer_column || f.question_column == f.label_column ||
        f.answer_column == f.label_column)
        throw ConfigError(source + ": question, answer and label columns must differ");
    return f;
}

FormatDescriptor FormatDescriptor::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open format descriptor " + path.string());
    return parse(in, path.string());
}

QADataset read_tsv(std::istream& in, const FormatDescriptor& format, const std::string& source,
                   const std::string& split, LoadStats* stats) {
    const int needed = std::max({format.question_id_column, format.question_column, format.answer_column,
                                 format.label_column}) + 1;
    LoadStats local;
    QADataset raw;
    raw.split = split;
    std::unordered_map<std::string, std::size_t> by_key;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && format.header) continue;
        if (line.empty()) continue;
        const auto fields = split_tabs(line);
        if (static_cast<int>(fields.size()) < needed)
            throw ParseError(source, line_no,
                             "expected at least " + std::to_string(needed) + " tab-separated fields, found " +
                                 std::to_string(fields.size()));
        ++local.rows;
        QAPair pair;
        pair.question = std::string(fields[static_cast<std::size_t>(format.question_column)]);
        pair.answer = std::string(fields[static_cast<std::size_t>(format.answer_column)]);
        pair.question_id = format.question_id_column >= 0
                               ? std::string(fields[static_cast<std::size_t>(format.question_id_column)])
                               : pair.question;
        const std::string label = trim(fields[static_cast<std::size_t>(format.label_column)]);
        if (label == "1") pair.label = 1;
        else if (label == "0") pair.label = 0;
        else throw DataError(source + ":" + std::to_string(line_no) + ": unknown label '" + label + "'");

        auto [it, inserted] = by_key.try_emplace(pair.question_id, raw.questions.size());
        if (inserted) raw.questions.push_back({pair.question_id, pair.question, {}});
        auto& q = raw.questions[it->second];
        if (tokenize(pair.question).empty() || tokenize(pair.answer).empty()) {
            ++local.pairs_dropped_empty;
            continue;
        }
        q.candidates.push_back({std::move(pair.answer), pair.label});
    }

    local.questions_seen = raw.questions.size();
    QADataset out;
    out.split = split;
    for (auto& q : raw.questions) {
        if (q.positives() == 0) {
            ++local.questions_without_positive;
            continue;
        }
        out.questions.push_back(std::move(q));
    }
    local.questions = out.questions.size();
    local.pairs = out.pair_count();
    if (stats) *stats = local;
    return out;
}

QADataset load_tsv(const std::filesystem::path& path, const FormatDescriptor& format, const std::string& split,
                   LoadStats* stats) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset " + path.string());
    return read_tsv(in, format, path.string(), split, stats);
}

void write_tsv(std::ostream& out, const QADataset& dataset) {
    out << "question_id\tquestion\tanswer\tlabel\n";
    for (const auto& q : dataset.questions)
        for (const auto& c : q.candidates) out << q.id << '\t' << q.text << '\t' << c.answer << '\t' << c.label << '\n';
}

void write_tsv(const std::filesystem::path& path, const QADataset& dataset) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    write_tsv(out, dataset);
}

Vocabulary build_vocab(std::span<const QADataset> datasets) {
    std::map<std::string, std::size_t> counts;
    for (const auto& ds : datasets)
        for (const auto& q : ds.questions) {
            for (auto& t : tokenize(q.text)) ++counts[t];
            for (const auto& c : q.candidates)
                for (auto& t : tokenize(c.answer)) ++counts[t];
        }
    counts.erase(std::string(kPadToken));
    counts.erase(std::string(kOovToken));
    std::vector<std::pair<std::string, std::size_t>> ordered(counts.begin(), counts.end());
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    auto vocab = Vocabulary::with_reserved_tokens();
    for (const auto& [token, _] : ordered) vocab.add(token);
    return vocab;
}

EncodedDataset encode(const QADataset& dataset, const Vocabulary& vocab, std::size_t max_length) {
    auto encode_text = [&](const std::string& text) {
        auto tokens = tokenize(text);
        if (tokens.size() > max_length) tokens.resize(max_length);
        return vocab.encode(tokens);
    };
    EncodedDataset out;
    out.split = dataset.split;
    out.questions.reserve(dataset.questions.size());
    for (const auto& q : dataset.questions) {
        EncodedQuestion eq;
        eq.id = q.id;
        eq.tokens = encode_text(q.text);
        for (std::size_t i = 0; i < q.candidates.size(); ++i)
            eq.candidates.push_back({encode_text(q.candidates[i].answer), q.candidates[i].label, i});
        out.questions.push_back(std::move(eq));
    }
    return out;
}

namespace {

template <typename LabelsOf>
TripletSample sample_impl(std::size_t question_count, LabelsOf labels_of, std::uint64_t epoch_seed) {
    std::mt19937_64 rng(epoch_seed);
    TripletSample out;
    for (std::size_t qi = 0; qi < question_count; ++qi) {
        const std::vector<int> labels = labels_of(qi);
        std::vector<std::size_t> pos;
        std::vector<std::size_t> neg;
        for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
        if (pos.empty()) continue;
        if (neg.empty()) {
            out.skipped_questions.push_back(qi);
            continue;
        }
        std::vector<std::size_t> pool;
        for (const auto p : pos) {
            if (pool.empty()) {
                pool = neg;
                std::shuffle(pool.begin(), pool.end(), rng);
            }
            out.triplets.push_back({qi, p, pool.back()});
            pool.pop_back();
        }
    }
    std::shuffle(out.triplets.begin(), out.triplets.end(), rng);
    return out;
}

}  // namespace

TripletSample sample_triplets(const QADataset& dataset, std::uint64_t epoch_seed) {
    return sample_impl(
        dataset.questions.size(),
        [&](std::size_t qi) {
            std::vector<int> labels;
            for (const auto& c : dataset.questions[qi].candidates) labels.push_back(c.label);
            return labels;
        },
        epoch_seed);
}

TripletSample sample_triplets(const EncodedDataset& dataset, std::uint64_t epoch_seed) {
    return sample_impl(
        dataset.questions.size(),
        [&](std::size_t qi) {
            std::vector<int> labels;
            for (const auto& c : dataset.questions[qi].candidates) labels.push_back(c.label);
            return labels;
        },
        epoch_seed);
}

std::vector<std::vector<Triplet>> make_batches(std::span<const Triplet> triplets, std::size_t batch_size) {
    if (batch_size == 0) throw ConfigError("batch size must be positive");
    std::vector<std::vector<Triplet>> out;
    for (std::size_t i = 0; i < triplets.size(); i += batch_size) {
        const auto end = std::min(triplets.size(), i + batch_size);
        out.emplace_back(triplets.begin() + static_cast<std::ptrdiff_t>(i),
                         triplets.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

}  // namespace cnm
