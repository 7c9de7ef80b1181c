#include "cnm/checkpoint.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cnm/errors.hpp"

namespace cnm {

namespace {

constexpr const char* kMagic = "cnm-checkpoint";
constexpr int kVersion = 1;

void put_real(std::ostream& out, double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
}

class Reader {
public:
    Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    std::string line() {
        std::string s;
        if (!std::getline(in_, s)) throw ParseError(source_, line_no_ + 1, "unexpected end of checkpoint");
        ++line_no_;
        if (!s.empty() && s.back() == '\r') s.pop_back();
        return s;
    }

    std::vector<std::string> fields() {
        std::istringstream ss(line());
        std::vector<std::string> out;
        for (std::string f; ss >> f;) out.push_back(std::move(f));
        return out;
    }

    // "<key> <value...>" with the expected key.
    std::vector<std::string> keyed(const std::string& key, std::size_t min_values = 1) {
        auto f = fields();
        if (f.empty() || f[0] != key || f.size() < min_values + 1) fail("expected '" + key + "'");
        f.erase(f.begin());
        return f;
    }

    std::size_t count(const std::string& s) {
        std::size_t v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size()) fail("expected a non-negative integer, got '" + s + "'");
        return v;
    }

    std::vector<double> reals(std::size_t expected) {
        const std::string s = line();
        std::vector<double> out;
        const char* p = s.data();
        const char* end = s.data() + s.size();
        while (true) {
            while (p != end && (*p == ' ' || *p == '\t')) ++p;
            if (p == end) break;
            double v = 0.0;
            const auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{}) fail("malformed number");
            out.push_back(v);
            p = next;
        }
        if (out.size() != expected)
            throw ConfigError(source_ + ":" + std::to_string(line_no_) + ": expected " + std::to_string(expected) +
                              " values, found " + std::to_string(out.size()));
        return out;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_no_ = 0;
};

}  // namespace

void validate_checkpoint(const Checkpoint& c) {
    const std::size_t n = c.model.embedding_dim;
    const std::size_t v = c.vocab.size();
    const std::size_t k = c.model.measurement_count;
    c.model.validate();
    if (c.params.amplitudes.rows() != v || c.params.amplitudes.cols() != n)
        throw ConfigError("checkpoint amplitude table is " + std::to_string(c.params.amplitudes.rows()) + "x" +
                          std::to_string(c.params.amplitudes.cols()) + ", expected " + std::to_string(v) + "x" +
                          std::to_string(n));
    if (c.params.phases.rows() != v || c.params.phases.cols() != n)
        throw ConfigError("checkpoint phase table does not match |V| x n");
    if (c.params.measurements.count() != k || c.params.measurements.dim() != n)
        throw ConfigError("checkpoint measurement set does not match k x n");
}

void save_checkpoint(std::ostream& out, const Checkpoint& c) {
    validate_checkpoint(c);
    const std::size_t n = c.model.embedding_dim;
    out << kMagic << ' ' << kVersion << '\n';
    out << "n " << n << '\n';
    out << "vocab " << c.vocab.size() << '\n';
    out << "k " << c.model.measurement_count << '\n';
    out << "windows";
    for (const auto l : c.model.window_sizes) out << ' ' << l;
    out << '\n';
    out << "mixture " << (c.model.mixture == MixtureKind::local ? "local" : "global") << '\n';
    out << "complex " << (c.model.complex_valued ? 1 : 0) << '\n';
    out << "max_length " << c.model.max_length << '\n';
    out << "tokens\n";
    for (const auto& t : c.vocab.tokens()) out << t << '\n';
    auto table = [&](const char* name, const RealTable& t) {
        out << name << '\n';
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const auto row = t.row(r);
            for (std::size_t j = 0; j < n; ++j) {
                if (j) out << ' ';
                put_real(out, row[j]);
            }
            out << '\n';
        }
    };
    table("amplitudes", c.params.amplitudes);
    table("phases", c.params.phases);
    out << "measurements\n";
    for (std::size_t i = 0; i < c.params.measurements.count(); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j) out << ' ';
            put_real(out, c.params.measurements(i, j).real());
            out << ' ';
            put_real(out, c.params.measurements(i, j).imag());
        }
        out << '\n';
    }
    out << "end\n";
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write checkpoint " + path.string());
    save_checkpoint(out, c);
    if (!out) throw ConfigError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(std::istream& in, const std::string& source) {
    Reader r(in, source);
    const auto head = r.fields();
    if (head.size() != 2 || head[0] != kMagic) r.fail("not a checkpoint file");
    if (r.count(head[1]) != static_cast<std::size_t>(kVersion)) r.fail("unsupported checkpoint version " + head[1]);

    Checkpoint c;
    const std::size_t n = r.count(r.keyed("n")[0]);
    const std::size_t v = r.count(r.keyed("vocab")[0]);
    const std::size_t k = r.count(r.keyed("k")[0]);
    c.model.embedding_dim = n;
    c.model.measurement_count = k;
    c.model.window_sizes.clear();
    for (const auto& s : r.keyed("windows", 0)) c.model.window_sizes.push_back(r.count(s));
    const auto mixture = r.keyed("mixture")[0];
    if (mixture == "local") c.model.mixture = MixtureKind::local;
    else if (mixture == "global") c.model.mixture = MixtureKind::global;
    else r.fail("unknown mixture '" + mixture + "'");
    c.model.complex_valued = r.count(r.keyed("complex")[0]) != 0;
    c.model.max_length = r.count(r.keyed("max_length")[0]);
    if (n == 0 || k == 0) throw ConfigError(source + ": n and k must be positive");

    r.keyed("tokens", 0);
    for (std::size_t i = 0; i < v; ++i) {
        const std::string t = r.line();
        if (t == "amplitudes") throw ConfigError(source + ": header announces " + std::to_string(v) +
                                                 " tokens, found " + std::to_string(i));
        if (c.vocab.contains(t)) r.fail("duplicate token '" + t + "'");
        c.vocab.add(t);
    }
    auto table = [&](const char* name) {
        r.keyed(name, 0);
        RealTable t(v, n);
        for (std::size_t row = 0; row < v; ++row) {
            const auto values = r.reals(n);
            std::copy(values.begin(), values.end(), t.row(row).begin());
        }
        return t;
    };
    c.params.amplitudes = table("amplitudes");
    c.params.phases = table("phases");
    r.keyed("measurements", 0);
    c.params.measurements = MeasurementSet(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        const auto values = r.reals(2 * n);
        for (std::size_t j = 0; j < n; ++j) c.params.measurements(i, j) = {values[2 * j], values[2 * j + 1]};
    }
    const auto tail = r.fields();
    if (tail.size() != 1 || tail[0] != "end")
        throw ConfigError(source + ": trailing data after the announced tables (header and tables disagree)");
    validate_checkpoint(c);
    return c;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open checkpoint " + path.string());
    return load_checkpoint(in, path.string());
}

}  // namespace cnm
