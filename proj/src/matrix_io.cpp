#include "sginf/matrix_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "sginf/errors.hpp"

namespace sginf {

namespace {

Eigen::MatrixXd parse_block(const nlohmann::json& j, const char* field, Eigen::Index dim) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim) {
    std::ostringstream os;
    os << "field \"" << field << "\": expected " << dim << " rows";
    throw InputError(os.str());
  }
  Eigen::MatrixXd out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      std::ostringstream os;
      os << "field \"" << field << "\" row " << i << ": expected " << dim << " entries";
      throw InputError(os.str());
    }
    for (Eigen::Index k = 0; k < dim; ++k) {
      if (!row[k].is_number()) {
        std::ostringstream os;
        os << "field \"" << field << "\" entry (" << i << "," << k << ") is not a number";
        throw InputError(os.str());
      }
      out(i, k) = row[k].get<double>();
    }
  }
  return out;
}

}  // namespace

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("matrix: expected a JSON object");
  if (!j.contains("re")) throw InputError("matrix: missing field \"re\"");
  Eigen::Index dim = 0;
  if (j.contains("dim")) {
    if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1)
      throw InputError("matrix: field \"dim\" must be a positive integer");
    dim = j["dim"].get<Eigen::Index>();
  } else {
    dim = static_cast<Eigen::Index>(j["re"].size());
  }
  const Eigen::MatrixXd re = parse_block(j["re"], "re", dim);
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(dim, dim);
  if (j.contains("im") && !j["im"].is_null()) im = parse_block(j["im"], "im", dim);

  ComplexMatrix m(dim, dim);
  m.real() = re;
  m.imag() = im;
  validate_matrix(m);
  return m;
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  bool any_imag = false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array(), c = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      r.push_back(m(i, k).real());
      c.push_back(m(i, k).imag());
      any_imag = any_imag || m(i, k).imag() != 0.0;
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  nlohmann::json out{{"dim", m.rows()}, {"re", std::move(re)}};
  if (any_imag) out["im"] = std::move(im);
  return out;
}

ComplexMatrix matrix_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[line.find_first_not_of(" \t")] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    int field = 0;
    while (std::getline(ls, cell, ',')) {
      ++field;
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("trailing");
        row.push_back(v);
      } catch (const std::exception&) {
        std::ostringstream os;
        os << "csv line " << lineno << " field " << field << ": not a number: \"" << cell << "\"";
        throw InputError(os.str());
      }
    }
    rows.push_back(std::move(row));
  }
  const auto n = rows.size();
  if (n == 0) throw InputError("csv: no rows");
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      std::ostringstream os;
      os << "csv row " << i + 1 << ": expected " << n << " fields, got " << rows[i].size();
      throw InputError(os.str());
    }
    for (std::size_t k = 0; k < n; ++k) m(i, k) = rows[i][k];
  }
  validate_matrix(m);
  return m;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ComplexMatrix load_matrix(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(path.string() + ": " + e.what());
    }
    // Accept a bare matrix or a SemigroupSpec document carrying "matrix".
    if (j.contains("matrix")) return matrix_from_json(j["matrix"]);
    return matrix_from_json(j);
  }
  return matrix_from_csv(text);
}

}  // namespace sginf
