#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcpred/matrix.hpp"

namespace pcpred {

struct CsvRecord {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
std::vector<CsvRecord> parse_csv(std::istream& in);
std::string csv_escape(const std::string& field);

/// Observation log with header `program,args,machine,seconds`. Additional
/// trailing columns (resource usage and similar) are accepted and ignored.
std::vector<Observation> read_observations(std::istream& in);
std::vector<Observation> read_observations(const std::filesystem::path& path);

/// Matrix CSV: first column is the `program::args` row key, remaining columns
/// are machine ids, an empty field is a missing cell.
PCMatrix read_matrix_csv(std::istream& in);
PCMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(std::ostream& out, const PCMatrix& m);
void write_matrix_csv(const std::filesystem::path& path, const PCMatrix& m);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

}  // namespace pcpred
