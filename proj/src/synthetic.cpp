#include "cnm/synthetic.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "cnm/errors.hpp"

namespace cnm {

namespace {

std::string topic_word(std::size_t topic, std::size_t i) {
    return "t" + std::to_string(topic) + "w" + std::to_string(i);
}

std::string filler_word(std::size_t i) { return "f" + std::to_string(i); }

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

class Builder {
public:
    Builder(const SyntheticQAConfig& config, std::uint64_t seed) : c_(config), rng_(seed) {}

    std::size_t uniform(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }

    std::string filler() { return filler_word(uniform(0, c_.filler_words - 1)); }

    // Topic words other than the excluded ones.
    std::string topic(std::size_t t, std::size_t a, std::size_t b) {
        while (true) {
            const std::size_t i = uniform(0, c_.words_per_topic - 1);
            if (i != a && i != b) return topic_word(t, i);
        }
    }

    std::vector<std::string> background(std::size_t t, std::size_t a, std::size_t b, std::size_t length) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < length; ++i)
            out.push_back(std::bernoulli_distribution(0.5)(rng_) ? filler() : topic(t, a, b));
        return out;
    }

    std::mt19937_64& rng() { return rng_; }

private:
    const SyntheticQAConfig& c_;
    std::mt19937_64 rng_;
};

}  // namespace

QADataset synthetic_qa(const SyntheticQAConfig& c, std::uint64_t seed, const std::string& split,
                       const std::string& id_prefix) {
    if (c.topics < 2 || c.words_per_topic < 4 || c.filler_words < 1 || c.min_positives < 1 ||
        c.max_positives < c.min_positives || c.hard_negatives + c.other_negatives == 0)
        throw ConfigError("synthetic_qa: unusable generator config");
    Builder b(c, seed);
    static const char* const wh[] = {"what", "who", "when", "where", "which", "how"};

    QADataset out;
    out.split = split;
    for (std::size_t qi = 0; qi < c.questions; ++qi) {
        const std::size_t t = b.uniform(0, c.topics - 1);
        const std::size_t ka = b.uniform(0, c.words_per_topic - 1);
        std::size_t kb = b.uniform(0, c.words_per_topic - 2);
        if (kb >= ka) ++kb;
        const std::string key_a = topic_word(t, ka);
        const std::string key_b = topic_word(t, kb);

        const std::string f1 = b.filler(), f2 = b.filler(), f3 = b.filler();
        Question q;
        q.id = id_prefix + std::to_string(qi);
        q.text = join({wh[b.uniform(0, 5)], f1, key_a, key_b, f2, f3});

        std::vector<Candidate> cands;
        auto insert_at_random = [&](std::vector<std::string>& words, const std::string& w) {
            words.insert(words.begin() + static_cast<std::ptrdiff_t>(b.uniform(0, words.size())), w);
        };
        const std::size_t positives = b.uniform(c.min_positives, c.max_positives);
        for (std::size_t p = 0; p < positives; ++p) {
            auto words = b.background(t, ka, kb, b.uniform(7, 12));
            const std::size_t at = b.uniform(0, words.size());
            words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), {key_a, key_b});
            cands.push_back({join(words), 1});
        }
        // Decoys share the question's filler words and at most one key word.
        for (std::size_t h = 0; h < c.hard_negatives; ++h) {
            auto words = b.background(t, ka, kb, b.uniform(6, 10));
            for (const auto* f : {&f1, &f2, &f3}) insert_at_random(words, *f);
            if (std::bernoulli_distribution(0.5)(b.rng()))
                insert_at_random(words, std::bernoulli_distribution(0.5)(b.rng()) ? key_a : key_b);
            cands.push_back({join(words), 0});
        }
        for (std::size_t o = 0; o < c.other_negatives; ++o) {
            std::size_t other = t;
            if (o % 2 == 1) {
                other = b.uniform(0, c.topics - 2);
                if (other >= t) ++other;
            }
            auto words = b.background(other, ka, kb, b.uniform(8, 14));
            if (std::bernoulli_distribution(0.5)(b.rng())) insert_at_random(words, f1);
            cands.push_back({join(words), 0});
        }
        std::shuffle(cands.begin(), cands.end(), b.rng());
        q.candidates = std::move(cands);
        out.questions.push_back(std::move(q));
    }
    return out;
}

QADataset separable_toy(std::size_t questions, std::uint64_t seed, const std::string& split) {
    if (questions == 0) throw ConfigError("separable_toy: at least one question is required");
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    QADataset out;
    out.split = split;
    for (std::size_t qi = 0; qi < questions; ++qi) {
        const std::string marker = "m" + std::to_string(qi);
        Question q;
        q.id = "toy" + std::to_string(qi);
        q.text = join({"what", "is", marker, filler_word(pick(10))});
        for (int c = 0; c < 4; ++c) {
            std::vector<std::string> words;
            for (int i = 0; i < 5; ++i) words.push_back(filler_word(pick(10)));
            const bool positive = c < 1;
            if (positive) words[pick(words.size())] = marker;
            q.candidates.push_back({join(words), positive ? 1 : 0});
        }
        std::shuffle(q.candidates.begin(), q.candidates.end(), rng);
        out.questions.push_back(std::move(q));
    }
    return out;
}

}  // namespace cnm
