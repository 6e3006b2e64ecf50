#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bidfm/matrix.hpp"
#include "bidfm/membership.hpp"

namespace bidfm {

struct EdgeListOptions {
  char delimiter = 0;   // 0: any run of tabs, spaces or commas
  bool header = false;  // skip the first non-comment line
  bool square = false;  // one shared id universe for rows and columns
};

struct EdgeListMatrix {
  Matrix matrix;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  std::vector<std::string> warnings;  // duplicate (source, target) pairs, summed
};

// Reads "source target [weight]" records (weight defaults to 1). Lines
// starting with '#' are comments. Ids are ordered numerically when every id
// is an integer and by first appearance otherwise.
EdgeListMatrix read_edge_list(const std::filesystem::path& path, const EdgeListOptions& options = {});

// Writes the nonzero entries as "row<TAB>col<TAB>weight" with zero-based ids.
void write_edge_list(const std::filesystem::path& path, const Matrix& m);

// Dense text format:
//   # bidfm-matrix v1
//   <rows> <cols>
//   one line per row, values in shortest round-trip form
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

// Label file:
//   # bidfm-labels v1 k=<K>
//   <node id><TAB><one-based label>
void write_labels(const std::filesystem::path& path, const Membership& labels,
                  const std::vector<std::string>& ids = {});

struct LabelFile {
  Membership labels;
  std::vector<std::string> ids;
};
LabelFile read_labels(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace bidfm
