#pragma once

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace semidist::cli {

class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One or two numeric columns. The second column may be shorter than the first
/// (two-sample data with m < n); a comma-separated row may also leave the first
/// cell empty when n < m.
struct DataColumns {
  std::vector<double> first;
  std::vector<double> second;
  int columns = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  if (line.find(',') != std::string::npos) {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  }
  std::istringstream ss(line);
  std::string cell;
  while (ss >> cell) out.push_back(cell);
  return out;
}

inline bool parse_real(const std::string& s, double& v) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE;
}

}  // namespace detail

inline DataColumns parse_data(std::istream& in, const std::string& source) {
  DataColumns d;
  std::string line;
  int line_no = 0;
  bool seen_row = false;
  bool first_ended = false;
  bool second_ended = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::vector<std::string> fields = detail::split_fields(t);
    auto fail = [&](const std::string& what) {
      return data_error(source + ":" + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() > 2) throw fail("expected one or two columns, got " + std::to_string(fields.size()));

    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].empty()) continue;
      if (!detail::parse_real(fields[i], values[i])) numeric = false;
    }
    if (!numeric) {
      if (!seen_row) {
        // A header row.
        seen_row = true;
        d.columns = static_cast<int>(fields.size());
        continue;
      }
      throw fail("not a number");
    }
    if (d.columns == 0) d.columns = static_cast<int>(fields.size());
    seen_row = true;
    if (static_cast<int>(fields.size()) > d.columns) throw fail("extra column");

    const bool has_first = !fields[0].empty();
    const bool has_second = fields.size() == 2 && !fields[1].empty();
    if (!has_first && !has_second) throw fail("empty row");
    if (has_first) {
      if (first_ended) throw fail("gap in the first column");
      d.first.push_back(values[0]);
    } else {
      first_ended = true;
    }
    if (d.columns == 2) {
      if (has_second) {
        if (second_ended) throw fail("gap in the second column");
        d.second.push_back(values[1]);
      } else {
        second_ended = true;
      }
    }
  }
  if (in.bad()) throw data_error(source + ": read error");
  if (d.first.empty() && d.second.empty()) throw data_error(source + ": no data");
  return d;
}

inline DataColumns read_data(const std::string& path) {
  if (path == "-") return parse_data(std::cin, "<stdin>");
  std::ifstream in(path);
  if (!in) throw data_error(path + ": cannot open");
  return parse_data(in, path);
}

}  // namespace semidist::cli
