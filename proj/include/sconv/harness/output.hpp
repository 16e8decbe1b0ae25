// CSV tables and JSON-lines records; every float printed with 17 significant digits.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sconv::harness {

inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Cell = std::variant<std::string, double, std::int64_t, bool>;

inline std::string cell_text(const Cell& c) {
  if (auto s = std::get_if<std::string>(&c)) return *s;
  if (auto d = std::get_if<double>(&c)) return fmt17(*d);
  if (auto i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<bool>(c) ? "true" : "false";
}

class CsvTable {
 public:
  CsvTable(std::string header) : header_(std::move(header)) {
    columns_ = 1;
    for (char ch : header_) columns_ += ch == ',';
  }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_) throw std::logic_error("CsvTable: row width does not match header " + header_);
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cell_text(cells[i]);
    }
    rows_.push_back(std::move(line));
  }

  const std::string& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }

  std::string text() const {
    std::string s = header_ + "\n";
    for (const auto& r : rows_) s += r + "\n";
    return s;
  }

  void write(const std::filesystem::path& path) const {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text();
  }

 private:
  std::string header_;
  std::size_t columns_;
  std::vector<std::string> rows_;
};

inline std::string json_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '"': o += "\\\""; break;
      case '\\': o += "\\\\"; break;
      case '\n': o += "\\n"; break;
      case '\t': o += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          o += buf;
        } else {
          o += c;
        }
    }
  }
  return o;
}

/// One flat JSON object with keys in insertion order.
class JsonRecord {
 public:
  JsonRecord& add(const std::string& key, Cell v) {
    fields_.emplace_back(key, std::move(v));
    return *this;
  }
  JsonRecord& add_null(const std::string& key) {
    nulls_.push_back(fields_.size());
    fields_.emplace_back(key, std::string());
    return *this;
  }

  std::string text() const {
    std::string s = "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      if (i) s += ",";
      s += "\"" + json_escape(fields_[i].first) + "\":";
      s += value_text(i);
    }
    return s + "}";
  }

 private:
  std::string value_text(std::size_t i) const {
    for (auto n : nulls_)
      if (n == i) return "null";
    const auto& v = fields_[i].second;
    if (auto str = std::get_if<std::string>(&v)) return "\"" + json_escape(*str) + "\"";
    if (auto d = std::get_if<double>(&v)) return std::isfinite(*d) ? fmt17(*d) : "null";
    return cell_text(v);
  }

  std::vector<std::pair<std::string, Cell>> fields_;
  std::vector<std::size_t> nulls_;
};

class JsonLines {
 public:
  void add(const JsonRecord& r) { lines_.push_back(r.text()); }
  std::string text() const {
    std::string s;
    for (const auto& l : lines_) s += l + "\n";
    return s;
  }
  void write(const std::filesystem::path& path) const {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text();
  }

 private:
  std::vector<std::string> lines_;
};

}  // namespace sconv::harness
