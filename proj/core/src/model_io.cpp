#include "dofid/model_io.hpp"

#include <istream>
#include <iterator>
#include <ostream>

#include "json.hpp"

namespace dofid {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "dofid-ids-model";
constexpr int kVersion = 1;

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw DataError("model matrix: entry count does not match shape");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = data[k++].get<double>();
  }
  return m;
}

}  // namespace

std::string serialize_model(const ModelDocument& doc, int indent) {
  const auto& p = doc.params;
  json hidden = json::array();
  for (const auto& W : doc.model.hidden) hidden.push_back(matrix_to_json(W));
  json j = {
      {"format", kFormat},
      {"version", kVersion},
      {"drnn",
       {{"p", p.p},
        {"r", p.r},
        {"lambda_plus", p.lambda_plus},
        {"lambda_minus", p.lambda_minus},
        {"layers", p.layers},
        {"width", p.width},
        {"cluster_size", p.cluster_size}}},
      {"hidden", std::move(hidden)},
      {"output", matrix_to_json(doc.model.output)},
      {"whiskers", doc.model.whiskers},
      {"theta", doc.model.theta},
  };
  return j.dump(indent);
}

ModelDocument parse_model(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormat) throw DataError("not a dofid model document");
    if (j.at("version").get<int>() != kVersion) throw DataError("unsupported model version");
    ModelDocument doc;
    const auto& d = j.at("drnn");
    doc.params.p = d.at("p").get<double>();
    doc.params.r = d.at("r").get<double>();
    doc.params.lambda_plus = d.at("lambda_plus").get<double>();
    doc.params.lambda_minus = d.at("lambda_minus").get<double>();
    doc.params.layers = d.at("layers").get<std::size_t>();
    doc.params.width = d.at("width").get<std::size_t>();
    doc.params.cluster_size = d.at("cluster_size").get<std::size_t>();
    for (const auto& W : j.at("hidden")) doc.model.hidden.push_back(matrix_from_json(W));
    doc.model.output = matrix_from_json(j.at("output"));
    doc.model.whiskers = j.at("whiskers").get<Vec3>();
    doc.model.theta = j.at("theta").get<double>();
    if (!doc.model.shape_matches(doc.params)) throw DataError("model shapes do not match drnn block");
    return doc;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  }
}

void write_model(std::ostream& os, const ModelDocument& doc) { os << serialize_model(doc, 2) << '\n'; }

ModelDocument read_model(std::istream& is) {
  std::string text{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  return parse_model(text);
}

}  // namespace dofid
