#include "bidfm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <system_error>
#include <unordered_map>

#include "bidfm/errors.hpp"

namespace bidfm {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  if (delimiter != 0) {
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, delimiter)) out.push_back(trim(field));
    if (!line.empty() && line.back() == delimiter) out.emplace_back();
    return out;
  }
  std::string cur;
  for (char ch : line) {
    if (ch == ' ' || ch == '\t' || ch == ',' || ch == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_integer(std::string_view s, long long& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Assigns positions to ids: numeric order when every id is an integer,
// first appearance otherwise.
class IdIndex {
 public:
  void see(const std::string& id) {
    if (pos_.emplace(id, order_.size()).second) order_.push_back(id);
  }

  void finalize() {
    std::vector<std::pair<long long, std::string>> numeric;
    numeric.reserve(order_.size());
    for (const auto& id : order_) {
      long long v = 0;
      if (!parse_integer(id, v)) return;
      numeric.emplace_back(v, id);
    }
    std::sort(numeric.begin(), numeric.end());
    order_.clear();
    for (auto& [v, id] : numeric) {
      pos_[id] = order_.size();
      order_.push_back(id);
    }
  }

  std::size_t at(const std::string& id) const { return pos_.at(id); }
  const std::vector<std::string>& ids() const { return order_; }

 private:
  std::unordered_map<std::string, std::size_t> pos_;
  std::vector<std::string> order_;
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_text_atomic(const fs::path& path, std::string_view content) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::random_device rd;
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot replace '" + path.string() + "'");
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

EdgeListMatrix read_edge_list(const fs::path& path, const EdgeListOptions& options) {
  struct Record {
    std::string src, dst;
    double w;
  };
  std::ifstream in = open_input(path);
  std::vector<Record> records;
  std::string line;
  long line_no = 0;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split_fields(t, options.delimiter);
    if (fields.size() < 2 || fields.size() > 3) throw ParseError("expected 'source target [weight]'", line_no);
    if (fields[0].empty() || fields[1].empty()) throw ParseError("empty node id", line_no);
    double w = 1.0;
    if (fields.size() == 3 && !parse_double(fields[2], w)) throw ParseError("bad weight '" + fields[2] + "'", line_no);
    if (!std::isfinite(w)) throw ParseError("non-finite weight", line_no);
    records.push_back({fields[0], fields[1], w});
  }
  if (records.empty()) throw ParseError("edge list '" + path.string() + "' has no records");

  IdIndex rows, cols;
  for (const auto& r : records) {
    rows.see(r.src);
    (options.square ? rows : cols).see(r.dst);
  }
  rows.finalize();
  cols.finalize();
  const IdIndex& col_index = options.square ? rows : cols;

  EdgeListMatrix out;
  out.row_ids = rows.ids();
  out.col_ids = col_index.ids();
  out.matrix = Matrix::Zero(static_cast<Eigen::Index>(out.row_ids.size()),
                            static_cast<Eigen::Index>(out.col_ids.size()));
  std::map<std::pair<std::size_t, std::size_t>, int> seen;
  for (const auto& r : records) {
    const std::size_t i = rows.at(r.src);
    const std::size_t j = col_index.at(r.dst);
    if (++seen[{i, j}] == 2) out.warnings.push_back("duplicate edge " + r.src + " -> " + r.dst + " summed");
    out.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += r.w;
  }
  return out;
}

void write_edge_list(const fs::path& path, const Matrix& m) {
  require_finite(m, "write_edge_list");
  std::string out = "# bidfm-edges v1 " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) out += std::to_string(i) + '\t' + std::to_string(j) + '\t' + format_double(m(i, j)) + '\n';
  write_text_atomic(path, out);
}

void write_matrix(const fs::path& path, const Matrix& m) {
  require_finite(m, "write_matrix");
  std::string out = "# bidfm-matrix v1\n" + std::to_string(m.rows()) + ' ' + std::to_string(m.cols()) + '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ' ';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  write_text_atomic(path, out);
}

Matrix read_matrix(const fs::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line) || trim(line) != "# bidfm-matrix v1") throw ParseError("missing '# bidfm-matrix v1' header", 1);
  ++line_no;
  if (!std::getline(in, line)) throw ParseError("missing dimensions line", 2);
  ++line_no;
  const auto dims = split_fields(trim(line), 0);
  long long rows = 0, cols = 0;
  if (dims.size() != 2 || !parse_integer(dims[0], rows) || !parse_integer(dims[1], cols) || rows < 0 || cols < 0)
    throw ParseError("bad dimensions line", line_no);
  Matrix m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw ParseError("file ends after " + std::to_string(i) + " of " + std::to_string(rows) + " rows", line_no + 1);
    ++line_no;
    const auto fields = split_fields(trim(line), 0);
    if (static_cast<long long>(fields.size()) != cols)
      throw ParseError("expected " + std::to_string(cols) + " values, found " + std::to_string(fields.size()), line_no);
    for (long long j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!parse_double(fields[static_cast<std::size_t>(j)], v) || !std::isfinite(v))
        throw ParseError("bad value '" + fields[static_cast<std::size_t>(j)] + "'", line_no);
      m(i, j) = v;
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) throw ParseError("unexpected content after the last row", line_no);
  }
  return m;
}

void write_labels(const fs::path& path, const Membership& labels, const std::vector<std::string>& ids) {
  if (!ids.empty() && ids.size() != labels.size()) throw DimensionError("write_labels: id count differs from label count");
  std::string out = "# bidfm-labels v1 k=" + std::to_string(labels.k()) + "\n";
  const auto one = labels.one_based();
  for (std::size_t i = 0; i < one.size(); ++i) {
    out += ids.empty() ? std::to_string(i + 1) : ids[i];
    out += '\t';
    out += std::to_string(one[i]);
    out += '\n';
  }
  write_text_atomic(path, out);
}

LabelFile read_labels(const fs::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty label file", 1);
  const std::string head = trim(line);
  const std::string prefix = "# bidfm-labels v1 k=";
  long long k = 0;
  if (head.rfind(prefix, 0) != 0 || !parse_integer(std::string_view(head).substr(prefix.size()), k) || k < 1)
    throw ParseError("missing '# bidfm-labels v1 k=<K>' header", 1);
  LabelFile out;
  std::vector<int> labels;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_fields(t, 0);
    long long label = 0;
    if (fields.size() != 2 || !parse_integer(fields[1], label)) throw ParseError("expected 'id label'", line_no);
    if (label < 1 || label > k) throw ParseError("label " + fields[1] + " outside 1.." + std::to_string(k), line_no);
    out.ids.push_back(fields[0]);
    labels.push_back(static_cast<int>(label));
  }
  out.labels = Membership::from_one_based(labels, static_cast<int>(k));
  return out;
}

}  // namespace bidfm
