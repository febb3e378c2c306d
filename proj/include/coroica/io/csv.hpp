// Plain-text I/O. Signals are stored with one sample per row and one
// channel per column, optionally preceded by an integer "group" column.
// Matrices are header-less rows. Numbers are written in shortest
// round-trip form so repeated runs produce identical bytes.
#pragma once

#include "coroica/types.hpp"

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace coroica::io {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

class CsvError : public std::invalid_argument {
 public:
  CsvError(const std::string& file, std::size_t row, const std::string& what)
      : std::invalid_argument(file + ":" + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

inline bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

/// Channels x samples signal plus optional group labels.
struct LabelledSignal {
  Matrix values;
  std::vector<std::string> channel_names;
  std::optional<std::vector<std::int64_t>> groups;
};

inline void write_signal(const std::filesystem::path& path, const Matrix& x,
                         const std::vector<std::int64_t>* groups = nullptr, const std::string& prefix = "x") {
  if (groups && static_cast<Index>(groups->size()) != x.cols()) {
    throw std::invalid_argument("write_signal: one group label per sample required");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path.string());
  std::string line;
  if (groups) line = "group,";
  for (Index c = 0; c < x.rows(); ++c) {
    if (c) line += ',';
    line += prefix + std::to_string(c);
  }
  out << line << '\n';
  for (Index i = 0; i < x.cols(); ++i) {
    line.clear();
    if (groups) line = std::to_string((*groups)[static_cast<std::size_t>(i)]) + ",";
    for (Index c = 0; c < x.rows(); ++c) {
      if (c) line += ',';
      line += format_double(x(c, i));
    }
    out << line << '\n';
  }
  if (!out) throw std::invalid_argument("write failed: " + path.string());
}

inline LabelledSignal read_signal(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const std::string name = path.string();
  if (lines.empty()) throw CsvError(name, 1, "empty file, expected a header row");
  const auto header = split_fields(lines[0]);
  LabelledSignal out;
  const bool has_group = !header.empty() && header[0] == "group";
  for (std::size_t c = has_group ? 1 : 0; c < header.size(); ++c) out.channel_names.emplace_back(header[c]);
  const auto d = static_cast<Index>(out.channel_names.size());
  if (d < 1) throw CsvError(name, 1, "header names no channels");

  std::vector<std::int64_t> groups;
  std::vector<double> data;
  std::size_t samples = 0;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (blank(lines[r])) continue;
    const auto fields = split_fields(lines[r]);
    if (fields.size() != header.size()) {
      throw CsvError(name, r + 1, "expected " + std::to_string(header.size()) + " fields, found " +
                                      std::to_string(fields.size()));
    }
    std::size_t c = 0;
    if (has_group) {
      const auto g = parse_int(fields[0]);
      if (!g) throw CsvError(name, r + 1, "group label is not an integer");
      groups.push_back(*g);
      c = 1;
    }
    for (; c < fields.size(); ++c) {
      const auto v = parse_double(fields[c]);
      if (!v || !std::isfinite(*v)) throw CsvError(name, r + 1, "field " + std::to_string(c + 1) + " is not a finite number");
      data.push_back(*v);
    }
    ++samples;
  }
  if (samples == 0) throw CsvError(name, lines.size(), "no samples");
  out.values.resize(d, static_cast<Index>(samples));
  for (std::size_t i = 0; i < samples; ++i)
    for (Index c = 0; c < d; ++c) out.values(c, static_cast<Index>(i)) = data[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)];
  if (has_group) out.groups = std::move(groups);
  return out;
}

inline void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path.string());
  for (Index r = 0; r < m.rows(); ++r) {
    std::string line;
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) line += ',';
      line += format_double(m(r, c));
    }
    out << line << '\n';
  }
  if (!out) throw std::invalid_argument("write failed: " + path.string());
}

inline Matrix read_matrix(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const std::string name = path.string();
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (blank(lines[r])) continue;
    std::vector<double> row;
    for (auto f : split_fields(lines[r])) {
      const auto v = parse_double(f);
      if (!v) throw CsvError(name, r + 1, "'" + std::string(f) + "' is not a number");
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw CsvError(name, r + 1, "ragged matrix row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError(name, 1, "empty matrix");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return m;
}

/// Two-column (time, value) series. A non-numeric first row is treated as a
/// header; '#' starts a comment line.
inline std::pair<std::vector<double>, std::vector<double>> read_two_columns(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const std::string name = path.string();
  std::vector<double> a, b;
  bool first_content = true;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (blank(lines[r]) || lines[r].front() == '#') continue;
    std::vector<std::string_view> fields;
    if (lines[r].find(',') != std::string::npos) {
      fields = split_fields(lines[r], ',');
    } else if (lines[r].find(';') != std::string::npos) {
      fields = split_fields(lines[r], ';');
    } else {
      std::string_view rest(lines[r]);
      while (!rest.empty()) {
        const auto begin = rest.find_first_not_of(" \t\r");
        if (begin == std::string_view::npos) break;
        rest.remove_prefix(begin);
        const auto end = std::min(rest.find_first_of(" \t\r"), rest.size());
        fields.push_back(rest.substr(0, end));
        rest.remove_prefix(end);
      }
    }
    const bool header_like = fields.size() >= 1 && !parse_double(fields[0]);
    if (first_content && header_like) {
      first_content = false;
      continue;
    }
    first_content = false;
    if (fields.size() != 2) {
      throw CsvError(name, r + 1, "expected 2 columns, found " + std::to_string(fields.size()));
    }
    const auto x = parse_double(fields[0]), y = parse_double(fields[1]);
    if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) throw CsvError(name, r + 1, "malformed number");
    a.push_back(*x);
    b.push_back(*y);
  }
  if (a.empty()) throw CsvError(name, lines.size(), "no data rows");
  return {a, b};
}

}  // namespace coroica::io
