#include "fsi/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace fsi::cli {

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quoted(const std::string& s) { return Tree(s).dump(); }

void write_json(std::ostringstream& out, const Tree& v, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (v.type()) {
    case Tree::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out << ",\n";
        first = false;
        out << pad << quoted(key) << ": ";
        write_json(out, item, depth + 1);
      }
      out << "\n" << close_pad << "}";
      return;
    }
    case Tree::value_t::array: {
      // Arrays of scalars stay on one line so table rows read as rows.
      bool flat = true;
      for (const auto& item : v) flat = flat && !item.is_structured();
      if (v.empty()) {
        out << "[]";
      } else if (flat) {
        out << "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out << ", ";
          write_json(out, v[i], depth + 1);
        }
        out << "]";
      } else {
        out << "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) out << ",\n";
          out << pad;
          write_json(out, v[i], depth + 1);
        }
        out << "\n" << close_pad << "]";
      }
      return;
    }
    case Tree::value_t::number_float: {
      const double x = v.get<double>();
      out << (std::isfinite(x) ? format_double(x) : quoted(format_double(x)));
      return;
    }
    default:
      out << v.dump();
  }
}

std::string csv_cell(const Tree& v) {
  switch (v.type()) {
    case Tree::value_t::number_float:
      return format_double(v.get<double>());
    case Tree::value_t::null:
      return "";
    case Tree::value_t::string: {
      const auto s = v.get<std::string>();
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char c : s) {
        if (c == '"') out += '"';
        out += c;
      }
      return out + "\"";
    }
    default:
      return v.dump();
  }
}

}  // namespace

std::string emit_json(const Tree& report) {
  std::ostringstream out;
  write_json(out, report, 0);
  out << "\n";
  return out.str();
}

std::string emit_csv(const Tree& report) {
  std::ostringstream out;
  const auto& table = report.at("table");
  const auto& columns = table.at("columns");
  std::size_t d_col = columns.size();
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) out << ",";
    out << columns[j].get<std::string>();
    if (columns[j] == "d") d_col = j;
  }
  out << "\n";
  for (const auto& row : table.at("rows")) {
    if (d_col < row.size() && row[d_col].get<std::int64_t>() == 0) continue;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ",";
      out << csv_cell(row[j]);
    }
    out << "\n";
  }
  return out.str();
}

std::string emit(const Tree& report, const std::string& format) {
  if (format == "json") return emit_json(report);
  if (format == "csv") return emit_csv(report);
  throw ValidationError("unknown_format", "format must be json or csv, got '" + format + "'");
}

Tree error_tree(const Error& e) {
  static const char* kinds[] = {"validation", "infeasible", "internal", "resource"};
  Tree err;
  err["kind"] = kinds[static_cast<int>(e.kind())];
  err["code"] = e.code();
  err["message"] = e.what();
  err["fibers"] = e.fibers();
  Tree out;
  out["error"] = err;
  return out;
}

int exit_code(const Error& e) noexcept {
  switch (e.kind()) {
    case ErrorKind::validation:
    case ErrorKind::resource:
      return 2;
    case ErrorKind::infeasible:
      return 3;
    case ErrorKind::internal:
      return 4;
  }
  return 4;
}

}  // namespace fsi::cli
