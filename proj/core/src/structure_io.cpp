#include "srcd/structure_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "srcd/error.hpp"

namespace srcd {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void schema(const std::string& msg) { throw Error(Errc::schema_error, msg); }

void only_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) schema("unknown key '" + key + "' in " + where);
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) schema("missing key '" + std::string(key) + "' in " + where);
  return obj.at(key);
}

int get_int(const json& v, const std::string& what) {
  if (!v.is_number_integer()) schema(what + " must be an integer");
  return v.get<int>();
}

double get_number(const json& v, const std::string& what) {
  if (!v.is_number()) schema(what + " must be a number");
  return v.get<double>();
}

Eigen::MatrixXd square_matrix(const json& v, int size, const std::string& what) {
  if (!v.is_array() || static_cast<int>(v.size()) != size * size)
    schema(what + " must be an array of " + std::to_string(size * size) + " numbers");
  Eigen::MatrixXd m(size, size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) m(r, c) = get_number(v[r * size + c], what + " entry");
  return m;
}

MatrixRealization parse_realization(const json& v, int N) {
  const std::string where = "matrix_realization";
  if (!v.is_object()) schema(where + " must be an object");
  only_keys(v, {"dim", "field", "generators"}, where);
  MatrixRealization r;
  r.dim = get_int(require(v, "dim", where), "matrix_realization.dim");
  if (r.dim < 1) schema("matrix_realization.dim must be positive");
  const json& field = require(v, "field", where);
  if (field == "real")
    r.field = Field::real;
  else if (field == "complex")
    r.field = Field::complex;
  else
    schema("matrix_realization.field must be \"real\" or \"complex\"");
  const json& gens = require(v, "generators", where);
  if (!gens.is_array() || static_cast<int>(gens.size()) != N)
    schema("matrix_realization.generators needs one matrix per basis element");
  const int d = r.dim;
  for (int k = 0; k < N; ++k) {
    const json& g = gens[k];
    const std::string what = "generator " + std::to_string(k);
    if (!g.is_array() || static_cast<int>(g.size()) != d * d)
      schema(what + " must have " + std::to_string(d * d) + " entries");
    Eigen::MatrixXd re(d, d), im = Eigen::MatrixXd::Zero(d, d);
    for (int a = 0; a < d * d; ++a) {
      const json& e = g[a];
      if (r.field == Field::real) {
        re(a / d, a % d) = get_number(e, what + " entry");
      } else {
        if (!e.is_array() || e.size() != 2) schema(what + " entries must be [re, im] pairs");
        re(a / d, a % d) = get_number(e[0], what + " entry");
        im(a / d, a % d) = get_number(e[1], what + " entry");
      }
    }
    r.re.push_back(re);
    if (r.field == Field::complex) r.im.push_back(im);
  }
  return r;
}

LieSRStructure build(const json& doc) {
  if (!doc.is_object()) schema("top level must be an object");
  only_keys(doc, {"name", "n", "nu", "brackets", "gram_h", "gram_v", "matrix_realization"}, "structure");
  const json& name = require(doc, "name", "structure");
  if (!name.is_string()) schema("name must be a string");
  const int n = get_int(require(doc, "n", "structure"), "n");
  const int nu = get_int(require(doc, "nu", "structure"), "nu");
  if (n < 1 || nu < 0) schema("need n >= 1 and nu >= 0");
  const int N = n + nu;

  Tensor3 c({N, N, N});
  const json& brackets = require(doc, "brackets", "structure");
  if (!brackets.is_array()) schema("brackets must be an array");
  std::set<std::pair<int, int>> seen;
  for (const json& b : brackets) {
    if (!b.is_object()) schema("bracket entries must be objects");
    only_keys(b, {"i", "j", "coeffs"}, "bracket entry");
    const int i = get_int(require(b, "i", "bracket entry"), "i");
    const int j = get_int(require(b, "j", "bracket entry"), "j");
    if (i < 0 || j < 0 || i >= N || j >= N) schema("bracket index out of range");
    const std::pair<int, int> key{std::min(i, j), std::max(i, j)};
    if (!seen.insert(key).second)
      schema("redundant bracket entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (i >= j)
      schema("bracket entry (" + std::to_string(i) + "," + std::to_string(j) +
             ") must have i < j; the other order follows by antisymmetry");
    const json& coeffs = require(b, "coeffs", "bracket entry");
    if (!coeffs.is_object()) schema("coeffs must be an object");
    for (const auto& [k, v] : coeffs.items()) {
      int kk = -1;
      try {
        std::size_t pos = 0;
        kk = std::stoi(k, &pos);
        if (pos != k.size()) kk = -1;
      } catch (const std::exception&) {
        kk = -1;
      }
      if (kk < 0 || kk >= N) schema("coefficient key '" + k + "' is not a basis index");
      const double x = get_number(v, "coefficient");
      c(i, j, kk) = x;
      c(j, i, kk) = -x;
    }
  }
  Eigen::MatrixXd gram_h = square_matrix(require(doc, "gram_h", "structure"), n, "gram_h");
  Eigen::MatrixXd gram_v = square_matrix(require(doc, "gram_v", "structure"), nu, "gram_v");
  std::optional<MatrixRealization> real;
  if (doc.contains("matrix_realization")) real = parse_realization(doc.at("matrix_realization"), N);

  std::optional<LieSRStructure> s;
  try {
    s.emplace(name.get<std::string>(), n, nu, std::move(c), std::move(gram_h), std::move(gram_v), std::move(real));
  } catch (const Error& e) {
    schema(e.what());
  }
  const ValidationReport rep = validate_structure(*s);
  if (const ValidationCheck* bad = rep.first_failure())
    throw Error(Errc::validation_error,
                "check '" + bad->name + "' failed" + (bad->detail.empty() ? "" : ": " + bad->detail));
  return *s;
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json a = ordered_json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  return a;
}

}  // namespace

LieSRStructure parse_structure_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // locate the byte offset as line:column
    const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(Errc::parse_error, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                       e.what());
  }
  return build(doc);
}

LieSRStructure parse_structure_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::parse_error, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_structure_text(ss.str());
}

std::string serialize_structure(const LieSRStructure& s) {
  const int N = s.dim();
  ordered_json doc;
  doc["name"] = s.name();
  doc["n"] = s.n();
  doc["nu"] = s.nu();
  ordered_json brackets = ordered_json::array();
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      ordered_json coeffs = ordered_json::object();
      for (int k = 0; k < N; ++k)
        if (s.c(i, j, k) != 0.0) coeffs[std::to_string(k)] = s.c(i, j, k);
      if (!coeffs.empty()) brackets.push_back(ordered_json{{"i", i}, {"j", j}, {"coeffs", coeffs}});
    }
  doc["brackets"] = brackets;
  doc["gram_h"] = matrix_json(s.gram_h());
  doc["gram_v"] = matrix_json(s.gram_v());
  if (const auto& r = s.realization()) {
    ordered_json gens = ordered_json::array();
    for (int k = 0; k < N; ++k) {
      ordered_json g = ordered_json::array();
      for (int a = 0; a < r->dim; ++a)
        for (int b = 0; b < r->dim; ++b) {
          if (r->field == Field::real)
            g.push_back(r->re[k](a, b));
          else
            g.push_back(ordered_json::array({r->re[k](a, b), r->im[k](a, b)}));
        }
      gens.push_back(g);
    }
    doc["matrix_realization"] = ordered_json{
        {"dim", r->dim}, {"field", r->field == Field::real ? "real" : "complex"}, {"generators", gens}};
  }
  return doc.dump(2) + "\n";
}

}  // namespace srcd
