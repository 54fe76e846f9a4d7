#pragma once

// Minimal CSV tables (comma separated, header row, LF line endings, no
// quoting) and all-or-nothing file output.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace shiftplan::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest text that parses back to exactly `v`.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::logic_error("format_number: to_chars failed");
  return {buf, end};
}

inline std::string format_number(long long v) { return std::to_string(v); }
inline std::string format_number(long v) { return std::to_string(v); }
inline std::string format_number(int v) { return std::to_string(v); }

inline double parse_number(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const char* first = text.data();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw CsvError("not a number: '" + std::string(text) + "'");
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw CsvError("missing column '" + std::string(name) + "'");
  }

  double number(std::size_t row, std::string_view name) const { return parse_number(rows.at(row).at(column(name))); }

  std::vector<double> numbers(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(parse_number(r.at(c)));
    return out;
  }

  void add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) throw CsvError("row width differs from header width");
    rows.push_back(std::move(row));
  }
};

inline std::string to_csv_text(const CsvTable& table) {
  auto check = [](const std::string& cell) {
    if (cell.find_first_of(",\n\r\"") != std::string::npos) throw CsvError("cell needs quoting: '" + cell + "'");
  };
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      check(cells[i]);
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) {
    if (r.size() != table.header.size()) throw CsvError("row width differs from header width");
    line(r);
  }
  return out;
}

inline CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool first = true;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    for (;;) {
      const auto comma = line.find(',');
      cells.emplace_back(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != table.header.size())
        throw CsvError("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(table.header.size()));
      table.rows.push_back(std::move(cells));
    }
  }
  if (first) throw CsvError("empty CSV, header row missing");
  return table;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return buf.str();
}

inline CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

/// Writes every file or none: all contents go to temporaries next to their
/// targets first and are renamed into place only once all writes succeeded.
inline void write_files_atomic(const std::vector<std::pair<std::filesystem::path, std::string>>& files) {
  namespace fs = std::filesystem;
  std::random_device rd;
  const std::string tag = std::to_string(rd()) + std::to_string(rd());
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (const auto& [path, content] : files) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) {
      cleanup();
      throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path temp = path;
    temp += ".tmp-" + tag;
    temps.push_back(temp);
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) {
      cleanup();
      throw IoError("cannot write " + path.string());
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::error_code ec;
    fs::rename(temps[i], files[i].first, ec);
    if (ec) {
      cleanup();
      throw IoError("cannot move " + temps[i].string() + " to " + files[i].first.string() + ": " + ec.message());
    }
  }
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  write_files_atomic({{path, content}});
}

}  // namespace shiftplan::io
