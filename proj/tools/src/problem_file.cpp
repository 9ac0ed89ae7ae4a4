#include "rankdeg_cli/problem_file.hpp"

#include <filesystem>
#include <fstream>

#include "rankdeg/examples.hpp"
#include "rankdeg_cli/expression.hpp"

namespace rankdeg::cli {

namespace {

using nlohmann::json;

Expression entry(const json& j, int max_y, bool allow_s, const std::string& where) {
  if (j.is_number()) return Expression::constant(j.get<double>());
  if (j.is_string()) return Expression::parse(j.get<std::string>(), max_y, allow_s);
  throw InvalidInput(where + ": entries must be numbers or expression strings");
}

std::vector<Expression> vector_of(const json& doc, const char* key, int r, int max_y, bool allow_s) {
  if (!doc.contains(key)) throw InvalidInput(std::string("problem file: missing '") + key + "'");
  const json& v = doc.at(key);
  if (!v.is_array() || static_cast<int>(v.size()) != r) {
    throw InvalidInput(std::string("problem file: '") + key + "' must be an array of " + std::to_string(r));
  }
  std::vector<Expression> out;
  for (const json& e : v) out.push_back(entry(e, max_y, allow_s, key));
  return out;
}

std::vector<std::vector<Expression>> matrix_of(const json& doc, const char* key, int r, int max_y, bool allow_s) {
  if (!doc.contains(key)) throw InvalidInput(std::string("problem file: missing '") + key + "'");
  const json& m = doc.at(key);
  if (!m.is_array() || static_cast<int>(m.size()) != r) {
    throw InvalidInput(std::string("problem file: '") + key + "' must have " + std::to_string(r) + " rows");
  }
  std::vector<std::vector<Expression>> out;
  for (const json& row : m) {
    if (!row.is_array() || static_cast<int>(row.size()) != r) {
      throw InvalidInput(std::string("problem file: every row of '") + key + "' needs " + std::to_string(r) + " entries");
    }
    std::vector<Expression> line;
    for (const json& e : row) line.push_back(entry(e, max_y, allow_s, key));
    out.push_back(std::move(line));
  }
  return out;
}

Vec eval_vec(const std::vector<Expression>& v, const ExprScope& sc) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i](sc);
  return out;
}

Mat eval_mat(const std::vector<std::vector<Expression>>& m, const ExprScope& sc) {
  const auto r = static_cast<Eigen::Index>(m.size());
  Mat out(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) out(i, j) = m[static_cast<size_t>(i)][static_cast<size_t>(j)](sc);
  }
  return out;
}

VectorFn time_vector(std::vector<Expression> v) {
  return [v = std::move(v)](double t) { return eval_vec(v, ExprScope{t, 0.0, nullptr}); };
}

MatrixFunction time_matrix(std::vector<std::vector<Expression>> m, Interval dom) {
  bool constant = true;
  for (const auto& row : m) {
    for (const auto& e : row) constant = constant && e.is_constant();
  }
  if (constant) return MatrixFunction::constant(eval_mat(m, {}), dom);
  return MatrixFunction([m = std::move(m)](double t) { return eval_mat(m, ExprScope{t, 0.0, nullptr}); }, dom);
}

std::optional<VectorFn> optional_vector(const json& doc, const char* key, int r) {
  if (!doc.contains(key)) return std::nullopt;
  return time_vector(vector_of(doc, key, r, 0, false));
}

Vec constant_vector(const json& doc, const char* key, int r) {
  const std::vector<Expression> v = vector_of(doc, key, r, 0, false);
  return eval_vec(v, {});
}

std::vector<CriticalCondition> conditions(const json& doc, int r) {
  std::vector<CriticalCondition> out;
  if (!doc.contains("critical_conditions")) return out;
  for (const json& c : doc.at("critical_conditions")) {
    if (!c.contains("expr")) throw InvalidInput("problem file: critical condition needs 'expr'");
    Expression e = entry(c.at("expr"), r, false, "critical_conditions");
    const std::string id = c.value("id", e.text());
    out.push_back({id, [e](double t, const Vec& y) { return e(ExprScope{t, 0.0, &y}); }});
  }
  return out;
}

}  // namespace

Problem load_problem(const json& doc) {
  if (!doc.is_object()) throw InvalidInput("problem file: top level must be an object");
  const std::string kind = doc.value("kind", "");
  const int r = doc.value("r", 0);
  if (r < 1) throw InvalidInput("problem file: 'r' must be a positive integer");
  const double t_start = doc.value("t_start", 0.0);
  const double T = doc.value("T", 1.0);
  if (!(T > t_start)) throw InvalidInput("problem file: need T > t_start");
  const Interval dom{t_start, T};
  MatrixFunction A = time_matrix(matrix_of(doc, "A", r, 0, false), dom);

  if (kind == "linear-iae") {
    LinearIAE p;
    p.r = r;
    p.t_start = t_start;
    p.T = T;
    p.A = std::move(A);
    auto k = matrix_of(doc, "k", r, 0, true);
    p.k = [k](double t, double s) { return eval_mat(k, ExprScope{t, s, nullptr}); };
    p.f = time_vector(vector_of(doc, "f", r, 0, false));
    p.exact = optional_vector(doc, "exact", r);
    return p;
  }
  if (kind == "linear-dae") {
    LinearDAE p;
    p.r = r;
    p.t_start = t_start;
    p.T = T;
    p.A = std::move(A);
    p.B = time_matrix(matrix_of(doc, "B", r, 0, false), dom);
    p.f = time_vector(vector_of(doc, "f", r, 0, false));
    p.exact = optional_vector(doc, "exact", r);
    if (doc.contains("y0")) {
      p.y0 = constant_vector(doc, "y0", r);
    } else if (p.exact) {
      p.y0 = (*p.exact)(t_start);
    } else {
      throw InvalidInput("problem file: linear-dae needs 'y0' or 'exact'");
    }
    return p;
  }
  if (kind == "semi-nonlinear-dae") {
    SemiNonlinearDAE p;
    p.r = r;
    p.t_start = t_start;
    p.T = T;
    p.A = std::move(A);
    auto F = vector_of(doc, "F", r, r, false);
    p.F = [F](double t, const Vec& y) { return eval_vec(F, ExprScope{t, 0.0, &y}); };
    if (doc.contains("F_y")) {
      auto J = matrix_of(doc, "F_y", r, r, false);
      p.F_y = [J](double t, const Vec& y) { return eval_mat(J, ExprScope{t, 0.0, &y}); };
    }
    p.f = time_vector(vector_of(doc, "f", r, 0, false));
    p.exact = optional_vector(doc, "exact", r);
    if (doc.contains("y0")) {
      p.y0 = constant_vector(doc, "y0", r);
    } else if (p.exact) {
      p.y0 = (*p.exact)(t_start);
    } else {
      throw InvalidInput("problem file: semi-nonlinear-dae needs 'y0' or 'exact'");
    }
    p.critical_conditions = conditions(doc, r);
    return p;
  }
  if (kind == "semi-nonlinear-iae") {
    SemiNonlinearIAE p;
    p.r = r;
    p.t_start = t_start;
    p.T = T;
    p.A = std::move(A);
    auto kappa = vector_of(doc, "kappa", r, r, true);
    p.kappa = [kappa](double t, double s, const Vec& y) { return eval_vec(kappa, ExprScope{t, s, &y}); };
    if (doc.contains("kappa_y")) {
      auto J = matrix_of(doc, "kappa_y", r, r, true);
      p.kappa_y = [J](double t, double s, const Vec& y) { return eval_mat(J, ExprScope{t, s, &y}); };
    }
    p.f = time_vector(vector_of(doc, "f", r, 0, false));
    p.exact = optional_vector(doc, "exact", r);
    p.critical_conditions = conditions(doc, r);
    return p;
  }
  throw InvalidInput("problem file: unknown kind '" + kind + "'");
}

Problem load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open problem file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput("problem file '" + path + "': " + e.what());
  }
  try {
    return load_problem(doc);
  } catch (const json::exception& e) {
    throw InvalidInput("problem file '" + path + "': " + e.what());
  }
}

ResolvedProblem resolve_problem(std::string_view name_or_path) {
  for (const ExampleInfo& info : list_examples()) {
    if (info.name == name_or_path) return {info.name, example(name_or_path)};
  }
  const std::string path(name_or_path);
  if (std::filesystem::is_regular_file(path)) return {path, load_problem_file(path)};
  throw NotFound("unknown problem '" + path + "' (not a registered example or a readable file)");
}

std::string kind_of(const Problem& p) {
  switch (p.index()) {
    case 0:
      return "linear-iae";
    case 1:
      return "linear-dae";
    case 2:
      return "semi-nonlinear-iae";
    default:
      return "semi-nonlinear-dae";
  }
}

}  // namespace rankdeg::cli
