#include "oneshot/problem_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace oneshot {

namespace {

using nlohmann::json;

Index dimension(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ProblemParseError(std::string("missing field '") + key + "'");
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw ProblemParseError(std::string("field '") + key + "' must be a positive integer");
  return static_cast<Index>(v.get<long long>());
}

std::vector<double> flatten(const json& v, const std::string& name) {
  if (!v.is_array()) throw ProblemParseError("field '" + name + "' must be an array");
  std::vector<double> out;
  for (const json& item : v) {
    if (item.is_array()) {
      for (const json& x : item) {
        if (!x.is_number()) throw ProblemParseError("field '" + name + "' has a non-numeric entry");
        out.push_back(x.get<double>());
      }
    } else if (item.is_number()) {
      out.push_back(item.get<double>());
    } else {
      throw ProblemParseError("field '" + name + "' has a non-numeric entry");
    }
  }
  return out;
}

Matrix read_matrix(const json& doc, const std::string& name, Index rows, Index cols) {
  if (!doc.contains(name)) throw ProblemParseError("missing field '" + name + "'");
  const std::vector<double> flat = flatten(doc.at(name), name);
  if (static_cast<Index>(flat.size()) != rows * cols) {
    std::ostringstream msg;
    msg << "field '" << name << "' has " << flat.size() << " entries, expected " << rows << "x"
        << cols;
    throw ProblemParseError(msg.str());
  }
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) a(i, j) = flat[static_cast<std::size_t>(i * cols + j)];
  return a;
}

ComplexMatrix read_complex_matrix(const json& doc, const std::string& name, Index rows,
                                  Index cols) {
  if (!doc.contains(name)) throw ProblemParseError("missing field 'complex." + name + "'");
  const json& part = doc.at(name);
  if (!part.is_object()) throw ProblemParseError("field 'complex." + name + "' must be an object");
  ComplexMatrix a(rows, cols);
  a.real() = read_matrix(part, "re", rows, cols);
  a.imag() = part.contains("im") ? read_matrix(part, "im", rows, cols) : Matrix::Zero(rows, cols);
  return a;
}

std::optional<Vector> read_optional_vector(const json& doc, const char* key, Index size) {
  if (!doc.contains(key)) return std::nullopt;
  return Vector(read_matrix(doc, key, size, 1));
}

json to_row_major(const Matrix& a) {
  json out = json::array();
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.push_back(a(i, j));
  return out;
}

}  // namespace

ProblemFile parse_problem_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProblemParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ProblemParseError("problem file must hold a JSON object");

  const Index nu = dimension(doc, "n_u");
  const Index ns = dimension(doc, "n_sigma");
  const Index nf = dimension(doc, "n_f");

  try {
    if (doc.contains("complex")) {
      const json& c = doc.at("complex");
      if (!c.is_object()) throw ProblemParseError("field 'complex' must be an object");
      ComplexVector F = read_complex_matrix(c, "F", nu, 1);
      ComplexLinearProblem source(read_complex_matrix(c, "B", nu, nu),
                                  read_complex_matrix(c, "M", nu, ns),
                                  read_complex_matrix(c, "H", nf, nu), std::move(F));
      LinearProblem real = realify(source);
      return ProblemFile{std::move(real), std::move(source),
                         read_optional_vector(doc, "sigma_exact", ns),
                         read_optional_vector(doc, "sigma0", ns)};
    }
    Vector F = read_matrix(doc, "F", nu, 1);
    LinearProblem problem(read_matrix(doc, "B", nu, nu), read_matrix(doc, "M", nu, ns),
                          read_matrix(doc, "H", nf, nu), std::move(F));
    return ProblemFile{std::move(problem), std::nullopt,
                       read_optional_vector(doc, "sigma_exact", ns),
                       read_optional_vector(doc, "sigma0", ns)};
  } catch (const json::exception& e) {
    throw ProblemParseError(std::string("malformed problem: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ProblemParseError(e.what());
  }
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ProblemParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_json(buf.str());
}

std::string problem_to_json(const LinearProblem& problem, const std::optional<Vector>& sigma_exact) {
  json doc;
  doc["n_u"] = problem.state_dim();
  doc["n_sigma"] = problem.param_dim();
  doc["n_f"] = problem.measurement_dim();
  doc["B"] = to_row_major(problem.B());
  doc["M"] = to_row_major(problem.M());
  doc["H"] = to_row_major(problem.H());
  doc["F"] = to_row_major(problem.F());
  if (sigma_exact) doc["sigma_exact"] = to_row_major(*sigma_exact);
  return doc.dump(2);
}

}  // namespace oneshot
