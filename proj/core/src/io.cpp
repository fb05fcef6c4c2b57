#include "mpkit/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mpkit/errors.hpp"

namespace mpkit {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double finite_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where + ": value is not finite");
  return v;
}

Index positive_count(const Json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("matrix: missing \"") + key + "\"");
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw ParseError(std::string("matrix: \"") + key + "\" must be a positive integer");
  return static_cast<Index>(v.get<long long>());
}

Json json_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<Index> index_list(const Json& j, const char* field) {
  if (!j.is_array()) throw std::invalid_argument(std::string(field) + ": expected a list of integers");
  std::vector<Index> out;
  for (const Json& v : j) {
    if (!v.is_number_integer())
      throw std::invalid_argument(std::string(field) + ": expected a list of integers");
    out.push_back(static_cast<Index>(v.get<long long>()));
  }
  return out;
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json entries = Json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) entries.push_back({m(i, j).real(), m(i, j).imag()});
  Json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["entries"] = std::move(entries);
  return out;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("matrix: expected a JSON object");
  const Index rows = positive_count(j, "rows");
  const Index cols = positive_count(j, "cols");
  if (!j.contains("entries") || !j.at("entries").is_array())
    throw ParseError("matrix: \"entries\" must be an array");
  const Json& entries = j.at("entries");
  if (entries.size() != static_cast<std::size_t>(rows * cols))
    throw ParseError("matrix: \"entries\" has " + std::to_string(entries.size()) +
                     " elements, expected rows*cols = " + std::to_string(rows * cols));
  ComplexMatrix m(rows, cols);
  for (Index k = 0; k < rows * cols; ++k) {
    const Json& e = entries[static_cast<std::size_t>(k)];
    const std::string where = "matrix: entries[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 2) throw ParseError(where + ": expected [re, im]");
    m(k / cols, k % cols) = Complex(finite_number(e[0], where), finite_number(e[1], where));
  }
  return m;
}

Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const std::string_view before = text.substr(0, offset);
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(before.begin(), before.end(), '\n'));
    const std::size_t last_newline = before.rfind('\n');
    const std::size_t column =
        1 + (last_newline == std::string_view::npos ? offset : offset - last_newline - 1);
    throw ParseError("parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + e.what(),
                     line, column);
  }
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return parse_json_text(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line(), e.column());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m,
                       const Json& provenance) {
  Json j = matrix_to_json(m);
  if (!provenance.is_null()) j["provenance"] = provenance;
  write_json_file(path, j);
}

ComplexMatrix read_matrix_file(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return matrix_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line(), e.column());
  }
}

Json tolerances_to_json(const Tolerances& tol) {
  Json j;
  j["tol_eig"] = tol.eig;
  j["tol_clip"] = tol.clip;
  j["tol_pinv"] = tol.pinv;
  j["tol_id"] = tol.id;
  return j;
}

Tolerances tolerances_from_json(const Json& j, Tolerances base) {
  if (!j.is_object()) throw std::invalid_argument("tolerance: expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw std::invalid_argument("tolerance." + key + ": expected a number");
    const double v = value.get<double>();
    if (key == "tol_eig") base.eig = v;
    else if (key == "tol_clip") base.clip = v;
    else if (key == "tol_pinv") base.pinv = v;
    else if (key == "tol_id") base.id = v;
    else throw std::invalid_argument("tolerance: unknown field \"" + key + "\"");
  }
  base.validate();
  return base;
}

Json report_to_json(const VerificationReport& report) {
  Json input;
  input["source"] = report.input.source;
  input["n"] = report.input.n;
  input["rank"] = report.input.rank;
  input["skew"] = report.input.skew ? Json(*report.input.skew) : Json(nullptr);
  input["seed"] = report.input.seed ? Json(*report.input.seed) : Json(nullptr);

  Json checks = Json::array();
  for (const CheckResult& c : report.checks) {
    Json entry;
    entry["id"] = c.id;
    entry["residual"] = json_or_null(c.residual);
    entry["threshold"] = json_or_null(c.threshold);
    entry["passed"] = c.passed;
    entry["notes"] = c.notes;
    checks.push_back(std::move(entry));
  }

  Json out;
  out["input"] = std::move(input);
  out["tolerance"] = tolerances_to_json(report.tolerance);
  out["checks"] = std::move(checks);
  out["overall"] = report.overall;
  return out;
}

Json summary_to_json(const CampaignSummary& summary) {
  Json per_check;
  for (const auto& [id, count] : summary.passes_per_check) per_check[id] = count;
  Json out;
  out["trials"] = summary.trials;
  out["passed"] = summary.passed;
  out["passes_per_check"] = std::move(per_check);
  return out;
}

CampaignConfig campaign_from_json(const Json& j, CampaignConfig base) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "sizes") {
      base.sizes = index_list(value, "sizes");
    } else if (key == "ranks") {
      if (value.is_string() && value.get<std::string>() == "random") base.ranks.clear();
      else base.ranks = index_list(value, "ranks");
    } else if (key == "skews") {
      if (!value.is_array()) throw std::invalid_argument("skews: expected a list of numbers");
      base.skews.clear();
      for (const Json& v : value) {
        if (!v.is_number()) throw std::invalid_argument("skews: expected a list of numbers");
        base.skews.push_back(v.get<double>());
      }
    } else if (key == "trials") {
      if (!value.is_number_integer()) throw std::invalid_argument("trials: expected an integer");
      base.trials_per_cell = value.get<int>();
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw std::invalid_argument("seed: expected a non-negative integer");
      base.seed = value.get<std::uint64_t>();
    } else if (key == "tolerance") {
      base.tol = tolerances_from_json(value, base.tol);
    } else {
      throw std::invalid_argument("config: unknown field \"" + key + "\"");
    }
  }
  base.validate();
  return base;
}

}  // namespace mpkit
