#include "srcd_cli/json_out.hpp"

#include <cmath>
#include <cstdio>

namespace srcd::cli {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

std::string scalar(const Json& j) {
  if (j.is_number_float()) return format_double(j.get<double>());
  return j.dump();
}

void write(const Json& j, int indent, std::string& out) {
  const std::string pad(indent, ' '), inner(indent + 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [k, v] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += inner + Json(k).dump() + ": ";
      write(v, indent + 2, out);
    }
    out += "\n" + pad + "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    bool flat = true;
    for (const auto& v : j) flat = flat && v.is_primitive();
    if (flat) {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + scalar(j[i]);
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      out += inner;
      write(j[i], indent + 2, out);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += pad + "]";
  } else {
    out += scalar(j);
  }
}

void write_text(const Json& j, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) {
      out += pad + k + ":\n";
      write_text(v, indent + 2, out);
    } else if (v.is_array() && !v.empty() && v[0].is_object()) {
      out += pad + k + ":\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        out += pad + "  - [" + std::to_string(i) + "]\n";
        write_text(v[i], indent + 4, out);
      }
    } else {
      std::string s;
      write(v, 0, s);
      for (auto& ch : s)
        if (ch == '\n') ch = ' ';
      out += pad + k + ": " + (v.is_string() ? v.get<std::string>() : s) + "\n";
    }
  }
}

}  // namespace

Json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json num(const std::optional<double>& v, const char* sentinel) { return v ? num(*v) : Json(sentinel); }

Json matrix(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(num(m(r, c)));
    a.push_back(row);
  }
  return a;
}

Json vector(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

std::string dump_canonical(const Json& j) {
  std::string out;
  write(j, 0, out);
  return out + "\n";
}

std::string dump_text(const Json& j) {
  std::string out;
  if (j.is_object())
    write_text(j, 0, out);
  else
    out = dump_canonical(j);
  return out;
}

}  // namespace srcd::cli
