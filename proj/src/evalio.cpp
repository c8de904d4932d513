#include "roid/evalio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace roid {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

// Splits a content line into whitespace-separated tokens.
std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

bool parse_index(const std::string& tok, Index& out) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(tok, &pos);
        if (pos != tok.size()) return false;
        out = static_cast<Index>(v);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_value(const std::string& tok, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(tok, &pos);
        return pos == tok.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path.string() + ": cannot open file for writing");
    return out;
}

}  // namespace

double rse(const DenseTensor3& x, const DenseTensor3& reference) {
    if (!(x.dims() == reference.dims())) throw DimensionError("rse: dims mismatch");
    const double denom = frobenius(reference);
    if (denom == 0.0) throw DegenerateInputError("rse: reference tensor is zero");
    return frobenius(x - reference) / denom;
}

double auc(const ScoredLabels& data) {
    const std::size_t n = data.scores.size();
    if (data.labels.size() != n) throw InputError("auc: scores/labels size mismatch");
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(data.scores[i])) throw InputError("auc: scores must be finite");
        if (data.labels[i] == 1)
            ++pos;
        else if (data.labels[i] == 0)
            ++neg;
        else
            throw InputError("auc: labels must be 0 or 1");
    }
    if (pos == 0 || neg == 0)
        throw InputError("auc: need at least one positive and one negative label");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return data.scores[a] < data.scores[b]; });
    // Midranks over tie groups make the statistic exact under ties.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && data.scores[order[j + 1]] == data.scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            if (data.labels[order[k]] == 1) rank_sum_pos += midrank;
        i = j + 1;
    }
    const double m = static_cast<double>(pos);
    return (rank_sum_pos - m * (m + 1.0) / 2.0) / (m * static_cast<double>(neg));
}

ObservationSet read_coo(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    std::size_t lineno = 0;
    Dims3 dims;
    bool have_header = false;
    std::vector<Observation> entries;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::vector<std::string> toks = tokens_of(line);
        if (toks.empty()) continue;
        if (!have_header) {
            if (toks.size() != 3) parse_fail(path, lineno, "expected header \"I1 I2 I3\"");
            if (!parse_index(toks[0], dims.i1) || !parse_index(toks[1], dims.i2) ||
                !parse_index(toks[2], dims.i3) || dims.i1 < 1 || dims.i2 < 1 || dims.i3 < 1)
                parse_fail(path, lineno, "header dims must be positive integers");
            have_header = true;
            continue;
        }
        if (toks.size() != 4)
            parse_fail(path, lineno, "expected \"i1 i2 i3 value\", found " +
                                         std::to_string(toks.size()) + " fields");
        Observation e{};
        if (!parse_index(toks[0], e.i1) || !parse_index(toks[1], e.i2) ||
            !parse_index(toks[2], e.i3))
            parse_fail(path, lineno, "malformed index");
        if (!parse_value(toks[3], e.value)) parse_fail(path, lineno, "malformed value");
        entries.push_back(e);
    }
    if (!have_header) throw ParseError(path.string() + ": missing header line");
    return ObservationSet(dims, std::move(entries));
}

void write_coo(const std::filesystem::path& path, const ObservationSet& obs) {
    std::ofstream out = open_out(path);
    const Dims3 d = obs.dims();
    out << d.i1 << ' ' << d.i2 << ' ' << d.i3 << '\n';
    for (const Observation& e : obs.entries())
        out << e.i1 << ' ' << e.i2 << ' ' << e.i3 << ' ' << fmt17(e.value) << '\n';
    if (!out) throw ParseError(path.string() + ": write failed");
}

DenseTensor3 read_dense(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    std::size_t lineno = 0;
    Dims3 dims;
    bool have_header = false;
    Vector values;
    Index count = 0, expected = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::vector<std::string> toks = tokens_of(line);
        if (toks.empty()) continue;
        if (!have_header) {
            if (toks.size() != 3) parse_fail(path, lineno, "expected header \"I1 I2 I3\"");
            if (!parse_index(toks[0], dims.i1) || !parse_index(toks[1], dims.i2) ||
                !parse_index(toks[2], dims.i3) || dims.i1 < 1 || dims.i2 < 1 || dims.i3 < 1)
                parse_fail(path, lineno, "header dims must be positive integers");
            expected = dims.count();
            values.resize(expected);
            have_header = true;
            continue;
        }
        for (const std::string& tok : toks) {
            double v;
            if (!parse_value(tok, v)) parse_fail(path, lineno, "malformed value \"" + tok + "\"");
            if (count >= expected)
                parse_fail(path, lineno,
                           "expected " + std::to_string(expected) + " values, found more");
            values[count++] = v;
        }
    }
    if (!have_header) throw ParseError(path.string() + ": missing header line");
    if (count != expected)
        throw ParseError(path.string() + ": expected " + std::to_string(expected) +
                         " values, found " + std::to_string(count));
    return DenseTensor3(dims, std::move(values));
}

void write_dense(const std::filesystem::path& path, const DenseTensor3& t) {
    std::ofstream out = open_out(path);
    const Dims3 d = t.dims();
    out << d.i1 << ' ' << d.i2 << ' ' << d.i3 << '\n';
    for (Index i = 0; i < t.size(); ++i) out << fmt17(t.values()[i]) << '\n';
    if (!out) throw ParseError(path.string() + ": write failed");
}

std::string results_csv_header() { return "method,dims,rank,ratio,lambda,seed,rse,auc,iters,seconds"; }

std::string format_result_row(const ResultRow& row) {
    std::ostringstream os;
    os << row.method << ',' << row.dims.i1 << 'x' << row.dims.i2 << 'x' << row.dims.i3 << ','
       << row.rank.i1 << 'x' << row.rank.i2 << 'x' << row.rank.i3 << ',' << fmt17(row.ratio)
       << ',' << fmt17(row.lambda) << ',' << row.seed << ',' << fmt17(row.rse) << ','
       << fmt17(row.auc) << ',' << row.iters << ',' << fmt17(row.seconds);
    return os.str();
}

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << results_csv_header() << '\n';
    for (const ResultRow& row : rows) os << format_result_row(row) << '\n';
}

}  // namespace roid
