#pragma once

// Deterministic JSON / CSV output. Every float is written as "%.16e"
// (17 significant digits, lowercase exponent); non-finite values become null.

#include <fmt/format.h>
#include <json.hpp>
#include <Eigen/Core>

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "stochlim/core/error.hpp"
#include "stochlim/core/types.hpp"

namespace stochlim::io {

using Json = nlohmann::ordered_json;

inline std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  return fmt::format("{:.16e}", x);
}

namespace detail {

inline void dump(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump(it.value(), out, indent, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(j[i], out, indent, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], out, indent, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

inline std::string dump_json(const Json& j) {
  std::string out;
  detail::dump(j, out, 2, 0);
  out += "\n";
  return out;
}

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

template <class MatrixT>
Json matrix_json(const MatrixT& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : cols_(std::move(columns)) {}

  void add_row(const std::vector<double>& values) {
    if (values.size() != cols_.size()) throw Error(ErrorKind::config, "CSV row width mismatch");
    rows_.push_back(values);
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < cols_.size(); ++i) out += (i ? "," : "") + cols_[i];
    out += "\n";
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_double(r[i]);
      out += "\n";
    }
    return out;
  }

 private:
  std::vector<std::string> cols_;
  std::vector<std::vector<double>> rows_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::config, "cannot write output file: " + path);
  out << content;
}

}  // namespace stochlim::io
