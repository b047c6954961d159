#include "pcpred/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "pcpred/error.hpp"

namespace pcpred {

namespace {

const char* kObservationHeader = "program,args,machine,seconds";
const char* kRowKeyHeader = "program::args";

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<CsvRecord> parse_csv(std::istream& in) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line yields a single empty field; skip it.
    if (!(current.fields.size() == 1 && current.fields[0].empty())) records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
  };

  char ch = 0;
  while (in.get(ch)) {
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started) throw Error("line " + std::to_string(line) + ": stray quote in unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw Error("line " + std::to_string(current.line) + ": unterminated quoted field");
  if (field_started || !field.empty() || !current.fields.empty()) end_record();
  return records;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != last) throw Error("not a number: '" + text + "'");
  return v;
}

std::vector<Observation> read_observations(std::istream& in) {
  const auto records = parse_csv(in);
  if (records.empty()) throw Error(std::string("missing header; expected '") + kObservationHeader + "'");
  const auto& header = records.front().fields;
  const std::vector<std::string> expected = {"program", "args", "machine", "seconds"};
  bool ok = header.size() >= expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = trim(header[i]) == expected[i];
  if (!ok) throw Error(std::string("line 1: bad header; expected '") + kObservationHeader + "'");

  std::vector<Observation> out;
  out.reserve(records.size() - 1);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    const std::string where = "line " + std::to_string(rec.line) + ": ";
    if (rec.fields.size() < 4) throw Error(where + "expected at least 4 fields");
    Observation o{trim(rec.fields[0]), trim(rec.fields[1]), trim(rec.fields[2]), 0.0};
    try {
      o.seconds = parse_double(rec.fields[3]);
    } catch (const Error& e) {
      throw Error(where + e.what());
    }
    if (o.program_id.empty() || o.arg_label.empty() || o.machine_id.empty())
      throw Error(where + "empty program, args or machine");
    if (!(o.seconds > 0.0) || !std::isfinite(o.seconds)) throw Error(where + "seconds must be positive");
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<Observation> read_observations(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_observations(in);
}

PCMatrix read_matrix_csv(std::istream& in) {
  const auto records = parse_csv(in);
  if (records.empty()) throw Error("empty matrix file");
  const auto& header = records.front().fields;
  if (header.size() < 2) throw Error("line 1: matrix header needs a row-key column and machine columns");
  std::vector<std::string> cols(header.begin() + 1, header.end());

  std::vector<RowKey> rows;
  std::vector<double> cells;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    const std::string where = "line " + std::to_string(rec.line) + ": ";
    if (rec.fields.size() != header.size())
      throw Error(where + "expected " + std::to_string(header.size()) + " fields, got " +
                  std::to_string(rec.fields.size()));
    rows.push_back(RowKey::parse(rec.fields[0]));
    for (std::size_t c = 1; c < rec.fields.size(); ++c) {
      if (trim(rec.fields[c]).empty()) {
        cells.push_back(kMissing);
        continue;
      }
      double v = 0.0;
      try {
        v = parse_double(rec.fields[c]);
      } catch (const Error& e) {
        throw Error(where + e.what());
      }
      if (!(v > 0.0) || !std::isfinite(v)) throw Error(where + "cell times must be positive");
      cells.push_back(v);
    }
  }
  return PCMatrix(std::move(rows), std::move(cols), std::move(cells));
}

PCMatrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const PCMatrix& m) {
  out << kRowKeyHeader;
  for (const auto& c : m.col_keys()) out << ',' << csv_escape(c);
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << csv_escape(m.row_keys()[r].label());
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out << ',';
      if (m.present(r, c)) out << format_double(m.raw(r, c));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const PCMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_matrix_csv(out, m);
}

}  // namespace pcpred
