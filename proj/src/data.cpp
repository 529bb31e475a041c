#include "sobnn/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sobnn/rng.hpp"

namespace sobnn {

namespace {

constexpr std::uint64_t kSeededSplitSeed = 42;

void check_consistent(const Dataset& d) {
    if (d.samples.empty()) return;
    const std::size_t ni = d.samples.front().x.size();
    const std::size_t no = d.samples.front().y.size();
    for (const auto& s : d.samples) {
        if (s.x.size() != ni || s.y.size() != no || s.dy_dx.rows != no || s.dy_dx.cols != ni) {
            throw std::invalid_argument("dataset: inconsistent sample dimensions");
        }
    }
}

// Population mean/std over one column accessor.
template <typename Get>
std::pair<double, double> column_moments(const Dataset& d, Get get) {
    const double n = static_cast<double>(d.size());
    double mean = 0.0;
    for (const auto& s : d.samples) mean += get(s);
    mean /= n;
    double var = 0.0;
    for (const auto& s : d.samples) {
        const double c = get(s) - mean;
        var += c * c;
    }
    return {mean, std::sqrt(var / n)};
}

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

double parse_double(const std::string& tok, std::size_t line_no) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw std::runtime_error("csv: non-numeric cell '" + tok + "' at line " +
                                 std::to_string(line_no));
    }
    return v;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> expected_header(std::size_t n_in, std::size_t n_out) {
    std::vector<std::string> cols;
    for (std::size_t e = 1; e <= n_in; ++e) cols.push_back("x" + std::to_string(e));
    for (std::size_t i = 1; i <= n_out; ++i) cols.push_back("y" + std::to_string(i));
    for (std::size_t i = 1; i <= n_out; ++i)
        for (std::size_t e = 1; e <= n_in; ++e)
            cols.push_back("dy" + std::to_string(i) + "_dx" + std::to_string(e));
    return cols;
}

}  // namespace

std::pair<Dataset, StandardizationStats> fit_standardize(const Dataset& train) {
    check_consistent(train);
    if (train.size() < 2) throw std::invalid_argument("fit_standardize: need at least 2 samples");

    const std::size_t ni = train.n_in();
    const std::size_t no = train.n_out();
    StandardizationStats st;
    st.x_mean.resize(ni);
    st.x_std.resize(ni);
    st.y_mean.resize(no);
    st.y_std.resize(no);

    for (std::size_t e = 0; e < ni; ++e) {
        auto [mean, sd] = column_moments(train, [e](const SamplePoint& s) { return s.x[e]; });
        if (!(sd > 0.0)) {
            throw std::invalid_argument("fit_standardize: input column x" + std::to_string(e + 1) +
                                        " is constant");
        }
        st.x_mean[e] = mean;
        st.x_std[e] = sd;
    }
    for (std::size_t i = 0; i < no; ++i) {
        auto [mean, sd] = column_moments(train, [i](const SamplePoint& s) { return s.y[i]; });
        if (!(sd > 0.0)) {
            throw std::invalid_argument("fit_standardize: output column y" + std::to_string(i + 1) +
                                        " is constant");
        }
        st.y_mean[i] = mean;
        st.y_std[i] = sd;
    }
    return {apply_standardize(train, st), st};
}

SamplePoint scale_sensitivities(const SamplePoint& s, const StandardizationStats& stats) {
    SamplePoint out = s;
    for (std::size_t i = 0; i < out.dy_dx.rows; ++i)
        for (std::size_t e = 0; e < out.dy_dx.cols; ++e)
            out.dy_dx(i, e) = s.dy_dx(i, e) * stats.x_std[e] / stats.y_std[i];
    return out;
}

Dataset apply_standardize(const Dataset& d, const StandardizationStats& stats) {
    check_consistent(d);
    Dataset out;
    out.samples.reserve(d.size());
    for (const auto& s : d.samples) {
        SamplePoint t = scale_sensitivities(s, stats);
        for (std::size_t e = 0; e < t.x.size(); ++e)
            t.x[e] = (s.x[e] - stats.x_mean[e]) / stats.x_std[e];
        for (std::size_t i = 0; i < t.y.size(); ++i)
            t.y[i] = (s.y[i] - stats.y_mean[i]) / stats.y_std[i];
        out.samples.push_back(std::move(t));
    }
    out.stats = stats;
    out.standardized = true;
    return out;
}

Dataset unstandardize(const Dataset& d) {
    if (!d.standardized || !d.stats) {
        throw std::invalid_argument("unstandardize: dataset is not standardized");
    }
    const StandardizationStats& st = *d.stats;
    Dataset out;
    out.samples.reserve(d.size());
    for (const auto& s : d.samples) {
        SamplePoint t = s;
        for (std::size_t e = 0; e < t.x.size(); ++e) t.x[e] = s.x[e] * st.x_std[e] + st.x_mean[e];
        for (std::size_t i = 0; i < t.y.size(); ++i) t.y[i] = s.y[i] * st.y_std[i] + st.y_mean[i];
        for (std::size_t i = 0; i < t.dy_dx.rows; ++i)
            for (std::size_t e = 0; e < t.dy_dx.cols; ++e)
                t.dy_dx(i, e) = s.dy_dx(i, e) * st.y_std[i] / st.x_std[e];
        out.samples.push_back(std::move(t));
    }
    out.standardized = false;
    return out;
}

std::pair<Dataset, Dataset> grid_split(const Dataset& d, std::size_t n_train, std::size_t n_val,
                                       SplitPattern pattern) {
    if (n_train + n_val > d.size()) {
        throw std::invalid_argument("grid_split: requested " + std::to_string(n_train) + "+" +
                                    std::to_string(n_val) + " points from dataset of size " +
                                    std::to_string(d.size()));
    }
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;
    if (pattern == SplitPattern::stride2) {
        for (std::size_t i = 0; i < d.size(); i += 2) train_idx.push_back(i);
        for (std::size_t i = 1; i < d.size(); i += 2) val_idx.push_back(i);
        if (n_train > train_idx.size() || n_val > val_idx.size()) {
            throw std::invalid_argument("grid_split: stride2 can supply at most " +
                                        std::to_string(train_idx.size()) + "/" +
                                        std::to_string(val_idx.size()) + " points");
        }
        train_idx.resize(n_train);
        val_idx.resize(n_val);
    } else {
        std::vector<std::size_t> perm(d.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        Rng rng(kSeededSplitSeed);
        rng.shuffle(perm);
        train_idx.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
        val_idx.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                       perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    }

    Dataset train, val;
    train.samples.reserve(train_idx.size());
    val.samples.reserve(val_idx.size());
    for (std::size_t i : train_idx) train.samples.push_back(d.samples[i]);
    for (std::size_t i : val_idx) val.samples.push_back(d.samples[i]);
    train.stats = d.stats;
    train.standardized = d.standardized;
    val.stats = d.stats;
    val.standardized = d.standardized;
    return {train, val};
}

std::vector<std::size_t> epoch_permutation(std::size_t n_train, const MinibatchPlan& plan,
                                           std::size_t epoch) {
    std::vector<std::size_t> perm(n_train);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(derive_seed(plan.rng_seed, epoch));
    rng.shuffle(perm);
    return perm;
}

std::vector<std::vector<std::size_t>> minibatches(const Dataset& train, const MinibatchPlan& plan,
                                                  std::size_t epoch) {
    if (plan.batch_size < 1) throw std::invalid_argument("minibatches: batch_size must be >= 1");
    const std::vector<std::size_t> perm = epoch_permutation(train.size(), plan, epoch);
    std::vector<std::vector<std::size_t>> slices;
    for (std::size_t start = 0; start < perm.size(); start += plan.batch_size) {
        const std::size_t end = std::min(start + plan.batch_size, perm.size());
        slices.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(start),
                            perm.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return slices;
}

Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: '" + path + "' is empty");
    const std::vector<std::string> header = split_line(line);

    std::size_t n_in = 0;
    while (n_in < header.size() && header[n_in] == "x" + std::to_string(n_in + 1)) ++n_in;
    std::size_t n_out = 0;
    while (n_in + n_out < header.size() &&
           header[n_in + n_out] == "y" + std::to_string(n_out + 1))
        ++n_out;
    if (n_in == 0 || n_out == 0) {
        throw std::runtime_error("csv: header must start with x1..xN,y1..yM, got '" + line + "'");
    }
    const std::vector<std::string> expected = expected_header(n_in, n_out);
    for (std::size_t c = 0; c < expected.size(); ++c) {
        if (c >= header.size() || header[c] != expected[c]) {
            throw std::runtime_error("csv: header column " + std::to_string(c + 1) +
                                     " expected '" + expected[c] + "'" +
                                     (c < header.size() ? ", got '" + header[c] + "'" : " but header ends"));
        }
    }
    if (header.size() != expected.size()) {
        throw std::runtime_error("csv: header has " + std::to_string(header.size()) +
                                 " columns, expected " + std::to_string(expected.size()));
    }

    Dataset d;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != expected.size()) {
            throw std::runtime_error("csv: line " + std::to_string(line_no) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(expected.size()));
        }
        SamplePoint s;
        s.x.resize(n_in);
        s.y.resize(n_out);
        s.dy_dx = Matrix(n_out, n_in);
        std::size_t c = 0;
        for (std::size_t e = 0; e < n_in; ++e) s.x[e] = parse_double(cells[c++], line_no);
        for (std::size_t i = 0; i < n_out; ++i) s.y[i] = parse_double(cells[c++], line_no);
        for (std::size_t i = 0; i < n_out; ++i)
            for (std::size_t e = 0; e < n_in; ++e) s.dy_dx(i, e) = parse_double(cells[c++], line_no);
        d.samples.push_back(std::move(s));
    }
    return d;
}

void write_csv(const Dataset& d, const std::string& path) {
    check_consistent(d);
    if (d.samples.empty()) throw std::invalid_argument("write_csv: empty dataset");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");

    const auto cols = expected_header(d.n_in(), d.n_out());
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << "\n";
    for (const auto& s : d.samples) {
        bool first = true;
        auto emit = [&](double v) {
            out << (first ? "" : ",") << format_double(v);
            first = false;
        };
        for (double v : s.x) emit(v);
        for (double v : s.y) emit(v);
        for (double v : s.dy_dx.data) emit(v);
        out << "\n";
    }
    if (!out) throw std::runtime_error("csv: write to '" + path + "' failed");
}

}  // namespace sobnn
