#include "zeroopt/objective_json.hpp"

#include <string>

#include "zeroopt/errors.hpp"

namespace zeroopt {

using nlohmann::json;

namespace {

Vector read_vector(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw Error(ErrorKind::ConfigError, std::string("params.") + key + " must be an array");
  }
  Vector v;
  for (const auto& x : j.at(key)) {
    if (!x.is_number()) throw Error(ErrorKind::ConfigError, std::string(key) + " holds a non-number");
    v.push_back(x.get<double>());
  }
  return v;
}

double read_number(const json& j, const char* key, std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw Error(ErrorKind::ConfigError, std::string("missing params.") + key);
  }
  if (!j.at(key).is_number()) throw Error(ErrorKind::ConfigError, std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

std::uint64_t read_seed(const json& doc) {
  if (!doc.contains("seed")) return 0;
  const auto& s = doc.at("seed");
  if (!s.is_number_integer()) throw Error(ErrorKind::ConfigError, "seed must be an integer");
  if (s.is_number_unsigned()) return s.get<std::uint64_t>();
  const auto v = s.get<std::int64_t>();
  if (v < 0) throw Error(ErrorKind::ConfigError, "seed must be non-negative");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

json objective_to_json(const ObjectiveSpec& spec) {
  json doc;
  doc["variant"] = variant_name(spec);
  doc["params"] = json::object();
  doc["seed"] = std::uint64_t{0};
  if (const auto* s = std::get_if<SyntheticVeryGood>(&spec)) {
    doc["params"] = {{"big_m", s->big_m}, {"x_star", s->x_star}, {"delta_bound", s->delta_bound}};
    doc["seed"] = s->seed;
  } else if (const auto* q = std::get_if<NoisyQuadratic>(&spec)) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < q->matrix_a.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index k = 0; k < q->matrix_a.cols(); ++k) row.push_back(q->matrix_a(i, k));
      rows.push_back(std::move(row));
    }
    doc["params"] = {{"matrix_a", rows},
                     {"x_star", q->x_star},
                     {"sigma", q->sigma},
                     {"delta_bound", q->delta_bound},
                     {"noise", q->noise == NoiseKind::Uniform ? "uniform" : "gaussian"}};
    doc["seed"] = q->seed;
  } else if (std::holds_alternative<UserAnalytic>(spec)) {
    throw Error(ErrorKind::ConfigError, "UserAnalytic objectives cannot be serialized");
  }
  return doc;
}

ObjectiveSpec objective_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("variant") || !doc.at("variant").is_string()) {
    throw Error(ErrorKind::ConfigError, "objective must be an object with a string \"variant\"");
  }
  const auto variant = doc.at("variant").get<std::string>();
  const json params = doc.value("params", json::object());
  if (!params.is_object()) throw Error(ErrorKind::ConfigError, "params must be an object");
  const std::uint64_t seed = read_seed(doc);

  ObjectiveSpec spec;
  if (variant == "OscillatingParabola") {
    spec = OscillatingParabola{};
  } else if (variant == "Levy2D") {
    spec = Levy2D{};
  } else if (variant == "SyntheticVeryGood") {
    Vector x_star = read_vector(params, "x_star");
    const double big_m = read_number(params, "big_m", 20.0);
    if (x_star.size() < 2) {
      throw Error(ErrorKind::ConfigError, "SyntheticVeryGood needs x_star with >= 2 coordinates");
    }
    const double cap = big_m / (16.0 * static_cast<double>(x_star.size() - 1));
    spec = SyntheticVeryGood{big_m, std::move(x_star), read_number(params, "delta_bound", cap), seed};
  } else if (variant == "NoisyQuadratic") {
    NoisyQuadratic q;
    q.x_star = read_vector(params, "x_star");
    const auto d = static_cast<Eigen::Index>(q.x_star.size());
    if (!params.contains("matrix_a") || !params.at("matrix_a").is_array() ||
        static_cast<Eigen::Index>(params.at("matrix_a").size()) != d) {
      throw Error(ErrorKind::ConfigError, "matrix_a must be a d x d nested array");
    }
    q.matrix_a.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto& row = params.at("matrix_a").at(static_cast<std::size_t>(i));
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
        throw Error(ErrorKind::ConfigError, "matrix_a must be a d x d nested array");
      }
      for (Eigen::Index k = 0; k < d; ++k) {
        const auto& v = row.at(static_cast<std::size_t>(k));
        if (!v.is_number()) throw Error(ErrorKind::ConfigError, "matrix_a holds a non-number");
        q.matrix_a(i, k) = v.get<double>();
      }
    }
    q.sigma = read_number(params, "sigma", 0.0);
    q.delta_bound = read_number(params, "delta_bound", 0.0);
    const std::string noise = params.value("noise", std::string("gaussian"));
    if (noise == "gaussian") {
      q.noise = NoiseKind::Gaussian;
    } else if (noise == "uniform") {
      q.noise = NoiseKind::Uniform;
    } else {
      throw Error(ErrorKind::ConfigError, "noise must be \"gaussian\" or \"uniform\"");
    }
    q.seed = seed;
    spec = std::move(q);
  } else {
    throw Error(ErrorKind::ConfigError, "unknown objective variant \"" + variant + "\"");
  }
  validate(spec);
  return spec;
}

}  // namespace zeroopt
