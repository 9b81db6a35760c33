#include "gkp/io.hpp"

namespace gkp {

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw Error(ErrorCode::InvalidDimension, "matrix must be a non-empty array of arrays");
  const auto rows = j.size(), cols = j[0].size();
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw Error(ErrorCode::InvalidDimension, "matrix rows have unequal length");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

json noise_to_json(const NoiseSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AgnNoise>) return {{"kind", "agn"}, {"Y", matrix_to_json(s.Y)}};
        else if constexpr (std::is_same_v<T, LossNoise>) return {{"kind", "loss"}, {"eta", s.eta}, {"nbar", s.nbar}};
        else return {{"kind", "amp"}, {"gain", s.gain}, {"nbar", s.nbar}};
      },
      spec);
}

NoiseSpec noise_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  NoiseSpec spec;
  if (kind == "agn") {
    if (j.contains("Y")) {
      spec = AgnNoise{matrix_from_json(j.at("Y"))};
    } else {
      int n = j.value("n_modes", 1);
      if (n < 1) throw Error(ErrorCode::InvalidDimension, "n_modes must be >= 1");
      spec = AgnNoise{j.at("sigma2").get<double>() * Mat::Identity(2 * n, 2 * n)};
    }
  } else if (kind == "loss") {
    spec = LossNoise{j.at("eta").get<double>(), j.value("nbar", 0.0)};
  } else if (kind == "amp") {
    spec = AmpNoise{j.at("gain").get<double>(), j.value("nbar", 0.0)};
  } else {
    throw Error(ErrorCode::InvalidParameter, "unknown noise kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

json lattice_to_json(const GkpLattice& l) {
  return {{"name", l.name}, {"n_modes", l.n_modes}, {"generator", matrix_to_json(l.M)}, {"d", l.d}};
}

GkpLattice lattice_from_json(const json& j) {
  GkpLattice l = from_generator(matrix_from_json(j.at("generator")), kGramTol, j.value("name", "custom"));
  if (j.contains("d") && j.at("d").get<int>() != l.d)
    throw Error(ErrorCode::InvalidCodeDimension, "stored code dimension does not match the generator");
  return l;
}

}  // namespace gkp
