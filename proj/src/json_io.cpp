#include "cadlag/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace cadlag {

using nlohmann::json;

json to_json(const StepFunction& f) {
  json jumps = json::array();
  for (std::size_t i = 0; i < f.jump_count(); ++i) {
    const auto v = f.jump_value(i);
    jumps.push_back({{"t", f.jump_time(i)}, {"v", std::vector<double>(v.begin(), v.end())}});
  }
  const auto init = f.initial_value();
  return {{"dim", f.dim()},
          {"initial", std::vector<double>(init.begin(), init.end())},
          {"jumps", std::move(jumps)}};
}

StepFunction step_function_from_json(const json& j) {
  try {
    const auto dim = j.at("dim").get<std::size_t>();
    auto initial = j.at("initial").get<std::vector<double>>();
    if (initial.size() != dim) throw std::invalid_argument("initial value has wrong dimension");
    std::vector<double> times;
    std::vector<double> values;
    for (const auto& jump : j.value("jumps", json::array())) {
      times.push_back(jump.at("t").get<double>());
      const auto v = jump.at("v").get<std::vector<double>>();
      if (v.size() != dim) throw std::invalid_argument("jump value has wrong dimension");
      values.insert(values.end(), v.begin(), v.end());
    }
    return StepFunction(std::move(initial), std::move(times), std::move(values));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed step function JSON: ") + e.what());
  }
}

StepFunction read_step_function(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return step_function_from_json(j);
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  try {
    if (j.contains("kind")) c.kind = parse_model_kind(j.at("kind").get<std::string>());
    c.alpha = j.value("alpha", c.alpha);
    c.q = j.value("q", c.q);
    c.sre_dim = j.value("sre_dim", c.sre_dim);
    c.n = j.value("n", c.n);
    c.seed = j.value("seed", c.seed);
    c.burn_in = j.value("burn_in", c.burn_in);
    if (j.contains("sre_a_upper") && !j.at("sre_a_upper").is_null()) {
      c.sre_a_upper = j.at("sre_a_upper").get<double>();
    }
    c.sre_unit_b = j.value("sre_unit_b", c.sre_unit_b);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed model JSON: ") + e.what());
  }
  return c;
}

json to_json(const ModelConfig& c) {
  json j{{"kind", to_string(c.kind)}, {"name", c.name()}, {"alpha", c.alpha},
         {"n", c.n},                  {"seed", c.seed}};
  if (c.kind == ModelKind::lagged) j["q"] = c.q;
  if (c.kind == ModelKind::sre) {
    j["sre_dim"] = c.sre_dim;
    j["burn_in"] = c.burn_in;
    j["sre_a_upper"] = c.sre_a_upper ? json(*c.sre_a_upper) : json(nullptr);
    j["sre_unit_b"] = c.sre_unit_b;
  }
  return j;
}

void write_sample_csv(std::ostream& out, const Sample& s) {
  char buf[32];
  for (std::size_t t = 0; t < s.n; ++t) {
    const auto r = s.row(t);
    for (std::size_t j = 0; j < s.dim; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", r[j]);
      if (j > 0) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

json to_json(const Sample& s) {
  json rows = json::array();
  for (std::size_t t = 0; t < s.n; ++t) {
    const auto r = s.row(t);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"model", to_json(s.config)}, {"dim", s.dim}, {"n", s.n}, {"rows", std::move(rows)}};
}

}  // namespace cadlag
