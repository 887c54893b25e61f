#pragma once

// CSV matrix I/O.
//
// dense_csv : one row per line, comma-separated decimals.
// sparse_csv: optional "# rows cols" dimension comment, a "i,j,value" header,
//             then one zero-based triplet per line.
//
// Values are written with 17 significant digits so load(save(A)) round-trips
// doubles exactly.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "orlx/matrix.hpp"

namespace orlx {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& tok, const std::string& path, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        while (pos < tok.size() && (tok[pos] == ' ' || tok[pos] == '\t' || tok[pos] == '\r')) ++pos;
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(line_no) + ": cannot parse number '" + tok + "'");
    }
}

inline std::vector<std::string> split_csv(const std::string& line) {
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

}  // namespace detail

inline void save_dense_csv(const std::string& path, const Eigen::Ref<const Eigen::MatrixXd>& m) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) f << ',';
            f << detail::format_double(m(i, j));
        }
        f << '\n';
    }
}

inline Eigen::MatrixXd load_dense_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') continue;
        const auto toks = detail::split_csv(line);
        std::vector<double> row;
        row.reserve(toks.size());
        for (const auto& t : toks) row.push_back(detail::parse_double(t, path, line_no));
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError(path + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(rows.front().size()) + " columns, got " +
                          std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError(path + ": empty file (explicit dimensions required)");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

inline void save_sparse_csv(const std::string& path, const MatrixHandle& h) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << "# " << h.rows() << ' ' << h.cols() << '\n';
    f << "i,j,value\n";
    for (const auto& t : h.triplets())
        f << t.row << ',' << t.col << ',' << detail::format_double(t.value) << '\n';
}

inline MatrixHandle load_sparse_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    std::string line;
    std::size_t line_no = 0;
    Eigen::Index rows = -1, cols = -1;
    bool header_seen = false;
    std::vector<Triplet> entries;
    std::vector<std::pair<Eigen::Index, std::size_t>> lines_of;  // for duplicate reporting
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            long r = 0, c = 0;
            if (ss >> r >> c) {
                rows = r;
                cols = c;
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind("i,j,value", 0) != 0)
                throw IoError(path + ":" + std::to_string(line_no) + ": expected 'i,j,value' header");
            header_seen = true;
            continue;
        }
        const auto toks = detail::split_csv(line);
        if (toks.size() != 3)
            throw IoError(path + ":" + std::to_string(line_no) + ": expected 3 fields");
        const double iv = detail::parse_double(toks[0], path, line_no);
        const double jv = detail::parse_double(toks[1], path, line_no);
        Triplet t;
        t.row = static_cast<Eigen::Index>(iv);
        t.col = static_cast<Eigen::Index>(jv);
        t.value = detail::parse_double(toks[2], path, line_no);
        if (t.row < 0 || t.col < 0 || t.row != iv || t.col != jv)
            throw IoError(path + ":" + std::to_string(line_no) + ": bad index");
        entries.push_back(t);
        lines_of.emplace_back(0, line_no);
    }
    if (!header_seen || entries.empty())
        throw IoError(path + ": empty file (explicit dimensions required)");
    if (rows < 0) {  // no dimension comment: infer from the data
        for (const auto& t : entries) {
            rows = std::max(rows, t.row + 1);
            cols = std::max(cols, t.col + 1);
        }
    }
    // duplicate check here so the error carries the offending line number
    std::vector<std::size_t> order(entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (entries[a].row != entries[b].row) return entries[a].row < entries[b].row;
        if (entries[a].col != entries[b].col) return entries[a].col < entries[b].col;
        return lines_of[a].second < lines_of[b].second;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        const auto &p = entries[order[i - 1]], &q = entries[order[i]];
        if (p.row == q.row && p.col == q.col)
            throw IoError(path + ":" + std::to_string(lines_of[order[i]].second) +
                          ": duplicate entry (" + std::to_string(q.row) + "," +
                          std::to_string(q.col) + ")");
    }
    return MatrixHandle::sparse(rows, cols, std::move(entries));
}

inline void save_matrix(const std::string& path, const MatrixHandle& h) {
    if (h.is_dense())
        save_dense_csv(path, h.dense_data());
    else
        save_sparse_csv(path, h);
}

/// Loads sparse_csv when the first non-comment line is the "i,j,value"
/// header, dense_csv otherwise.
inline MatrixHandle load_matrix(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    std::string first;
    while (std::getline(f, first)) {
        if (!first.empty() && first != "\r" && first[0] != '#') break;
    }
    f.close();
    if (first.rfind("i,j,value", 0) == 0) return load_sparse_csv(path);
    return MatrixHandle::dense(load_dense_csv(path));
}

}  // namespace orlx
