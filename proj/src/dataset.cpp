#include "topal/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "topal/rng.hpp"

namespace topal {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace and quotes
        auto b = cell.find_first_not_of(" \t\r\"");
        auto e = cell.find_last_not_of(" \t\r\"");
        cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool is_missing(const std::string& s) {
    if (s.empty()) return true;
    std::string low;
    for (char c : s) low.push_back(static_cast<char>(std::tolower(c)));
    return low == "na" || low == "nan" || low == "?" || low == "null";
}

bool parse_double(const std::string& s, double& out) {
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end != s.c_str() && *end == '\0' && std::isfinite(out);
}

// Numeric-aware label ordering so "2" sorts before "10".
bool label_less(const std::string& a, const std::string& b) {
    double da, db;
    if (parse_double(a, da) && parse_double(b, db)) {
        if (da != db) return da < db;
        return a < b;
    }
    return a < b;
}

}  // namespace

void normalize_columns(Matrix& features) {
    const std::size_t n = features.rows(), m = features.cols();
    for (std::size_t j = 0; j < m; ++j) {
        double lo = features(0, j), hi = features(0, j);
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, features(i, j));
            hi = std::max(hi, features(i, j));
        }
        const double range = hi - lo;
        for (std::size_t i = 0; i < n; ++i)
            features(i, j) = range > 0.0 ? (features(i, j) - lo) / range : 0.0;
    }
}

Dataset make_dataset(std::string name, Matrix raw, std::vector<std::string> raw_labels) {
    const std::size_t m = raw.cols();
    if (raw.rows() != raw_labels.size())
        throw std::invalid_argument("make_dataset: row/label count mismatch");

    // Drop exact duplicate (features, label) rows, keeping first occurrences.
    std::vector<std::size_t> keep;
    {
        std::map<std::pair<std::vector<double>, std::string>, bool> seen;
        for (std::size_t i = 0; i < raw.rows(); ++i) {
            std::vector<double> row(raw.row(i).begin(), raw.row(i).end());
            auto key = std::make_pair(std::move(row), raw_labels[i]);
            if (!seen.count(key)) {
                seen.emplace(std::move(key), true);
                keep.push_back(i);
            }
        }
    }

    Dataset d;
    d.name = std::move(name);
    d.features = Matrix(keep.size(), m);
    std::vector<std::string> labels_kept;
    labels_kept.reserve(keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        for (std::size_t j = 0; j < m; ++j) d.features(r, j) = raw(keep[r], j);
        labels_kept.push_back(raw_labels[keep[r]]);
    }

    normalize_columns(d.features);

    std::vector<std::string> distinct(labels_kept.begin(), labels_kept.end());
    std::sort(distinct.begin(), distinct.end(), label_less);
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2)
        throw std::runtime_error("dataset '" + d.name + "' has a single class");

    std::map<std::string, int> id;
    for (std::size_t k = 0; k < distinct.size(); ++k) id[distinct[k]] = static_cast<int>(k) + 1;
    d.labels.reserve(labels_kept.size());
    for (const auto& s : labels_kept) d.labels.push_back(id[s]);
    d.class_count = static_cast<int>(distinct.size());
    return d;
}

Dataset load_dataset(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path);
    const auto header = split_csv_line(line);
    std::size_t label_col = header.size();
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == label_column) label_col = j;
    if (label_col == header.size())
        throw std::runtime_error("label column '" + label_column + "' not found in " + path);

    const std::size_t m = header.size() - 1;
    std::vector<double> values;
    std::vector<std::string> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": wrong cell count");
        bool missing = false;
        for (const auto& c : cells)
            if (is_missing(c)) missing = true;
        if (missing) continue;

        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (j == label_col) continue;
            double v;
            if (!parse_double(cells[j], v))
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": non-numeric feature cell '" + cells[j] + "'");
            values.push_back(v);
        }
        labels.push_back(cells[label_col]);
    }
    if (labels.empty()) throw std::runtime_error("no usable rows in " + path);

    Matrix raw(labels.size(), m);
    raw.data() = std::move(values);

    std::string name = path;
    if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
    if (auto dot = name.find_last_of('.'); dot != std::string::npos) name = name.substr(0, dot);
    return make_dataset(std::move(name), std::move(raw), std::move(labels));
}

Split stratified_split(const Dataset& d, std::uint64_t seed, double train_frac) {
    if (!(train_frac > 0.0 && train_frac < 1.0))
        throw std::invalid_argument("train_frac must be in (0,1)");
    const std::size_t n = d.size();

    std::vector<std::vector<std::size_t>> by_class(d.class_count + 1);
    for (std::size_t i = 0; i < n; ++i) by_class[d.labels[i]].push_back(i);
    for (int c = 1; c <= d.class_count; ++c)
        if (by_class[c].size() < 2)
            throw std::runtime_error("class " + std::to_string(c) + " has fewer than 2 samples");

    const auto total_train = static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n) + 1e-9));

    // Largest-remainder apportionment, clamped so that each class keeps at
    // least one sample on each side.
    std::vector<std::size_t> take(d.class_count + 1, 0);
    std::vector<std::pair<double, int>> remainders;
    std::size_t assigned = 0;
    for (int c = 1; c <= d.class_count; ++c) {
        const double exact = train_frac * static_cast<double>(by_class[c].size());
        take[c] = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(exact + 1e-9)),
                                          1, by_class[c].size() - 1);
        assigned += take[c];
        remainders.emplace_back(exact - std::floor(exact + 1e-9), c);
    }
    std::sort(remainders.begin(), remainders.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first > b.first;
                  return a.second < b.second;
              });
    for (const auto& [rem, c] : remainders) {
        if (assigned >= total_train) break;
        if (take[c] < by_class[c].size() - 1) {
            ++take[c];
            ++assigned;
        }
    }
    for (auto it = remainders.rbegin(); it != remainders.rend() && assigned > total_train; ++it) {
        const int c = it->second;
        if (take[c] > 1) {
            --take[c];
            --assigned;
        }
    }

    auto rng = make_rng(mix_seed(seed, 0x5fb1u));
    Split s;
    s.seed = seed;
    for (int c = 1; c <= d.class_count; ++c) {
        auto idx = by_class[c];
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t k = 0; k < idx.size(); ++k)
            (k < take[c] ? s.train_indices : s.test_indices).push_back(idx[k]);
    }
    std::sort(s.train_indices.begin(), s.train_indices.end());
    std::sort(s.test_indices.begin(), s.test_indices.end());
    return s;
}

Dataset subset(const Dataset& d, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.name = d.name;
    out.class_count = d.class_count;
    out.features = Matrix(indices.size(), d.dim());
    out.labels.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        for (std::size_t j = 0; j < d.dim(); ++j) out.features(r, j) = d.features(indices[r], j);
        out.labels.push_back(d.labels[indices[r]]);
    }
    return out;
}

}  // namespace topal
