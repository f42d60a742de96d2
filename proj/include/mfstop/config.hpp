#pragma once

// Named presets and the key-value model configuration format.
//
//   # comment
//   kind = piecewise_density
//   breakpoints = 0.375, 0.5, 1.5, 2
//   levels = 4, 0, 1
//   horizon = 1          (or "none")
//   r = 1
//   c = 1
//   n = 10000
//   seed = 7
//
// kind is one of two_atom (locations, weights), piecewise_density
// (breakpoints, levels), tent, uniform_interval (a, b), custom_cdf
// (knots_y, knots_F). Optional keys: post_value (default r + 1 + right end of
// the support), shift (default 0). Unknown keys are kept so that callers can
// read experiment settings from the same file.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfstop/errors.hpp"
#include "mfstop/signal_model.hpp"

namespace mfstop {

struct ModelSpec {
  std::string id;
  SignalModel model;
  GameParams params;
  std::optional<std::uint64_t> seed;
};

using ConfigMap = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

inline double parse_double(const std::string& key, const std::string& text) {
  const std::string s = detail::trim(text);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + s + "'");
  }
}

inline std::int64_t parse_int(const std::string& key, const std::string& text) {
  const std::string s = detail::trim(text);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    // allow 1e4 style integers
    const double d = parse_double(key, s);
    if (d != static_cast<double>(static_cast<std::int64_t>(d))) throw ConfigError("key '" + key + "': not an integer");
    return static_cast<std::int64_t>(d);
  }
  return v;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  const std::string s = detail::trim(text);
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("key '" + key + "': not an unsigned integer");
  return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (detail::trim(item).empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

inline ConfigMap parse_config_text(const std::string& text) {
  ConfigMap out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    out[key] = value;
  }
  return out;
}

inline ConfigMap load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace detail {

inline const std::string& require(const ConfigMap& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

inline SignalLaw law_from_config(const ConfigMap& m) {
  const std::string kind = require(m, "kind");
  if (kind == "two_atom" || kind == "atomic")
    return AtomicLaw(parse_list("locations", require(m, "locations")), parse_list("weights", require(m, "weights")));
  if (kind == "piecewise_density")
    return PiecewiseDensity(parse_list("breakpoints", require(m, "breakpoints")),
                            parse_list("levels", require(m, "levels")));
  if (kind == "tent") return TentLaw{};
  if (kind == "uniform_interval")
    return UniformInterval(parse_double("a", require(m, "a")), parse_double("b", require(m, "b")));
  if (kind == "custom_cdf")
    return PiecewiseLinearCdf(parse_list("knots_y", require(m, "knots_y")), parse_list("knots_F", require(m, "knots_F")));
  throw ConfigError("unknown model kind '" + kind + "'");
}

}  // namespace detail

inline ModelSpec model_from_config(const ConfigMap& m, const std::string& id = "config") {
  GameParams params;
  if (auto it = m.find("r"); it != m.end()) params.r = parse_double("r", it->second);
  if (auto it = m.find("c"); it != m.end()) params.c = parse_double("c", it->second);
  if (auto it = m.find("n"); it != m.end()) params.n = parse_int("n", it->second);
  params.validate();

  std::optional<double> horizon;
  if (auto it = m.find("horizon"); it != m.end() && it->second != "none") horizon = parse_double("horizon", it->second);
  double shift = 0.0;
  if (auto it = m.find("shift"); it != m.end()) shift = parse_double("shift", it->second);

  SignalLaw law = detail::law_from_config(m);
  std::optional<SignalModel> model;
  if (auto it = m.find("post_value"); it != m.end()) {
    model.emplace(std::move(law), horizon, parse_double("post_value", it->second), shift);
  } else {
    model.emplace(SignalModel::with_default_post(std::move(law), horizon, params.r, shift));
  }

  std::optional<std::uint64_t> seed;
  if (auto it = m.find("seed"); it != m.end()) seed = parse_u64("seed", it->second);
  return ModelSpec{id, std::move(*model), params, seed};
}

inline const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids{"example-5.1", "example-5.6", "example-5.7",
                                            "example-5.8", "example-6.2", "uniform02"};
  return ids;
}

inline ModelSpec preset(const std::string& id) {
  constexpr double horizon = 1.0;
  auto make = [&](SignalLaw law, double r, double c, std::int64_t n, std::uint64_t seed) {
    GameParams p{r, c, n};
    return ModelSpec{id, SignalModel::with_default_post(std::move(law), horizon, r), p, seed};
  };
  if (id == "example-5.1") return make(AtomicLaw({0.5, 2.0}, {0.5, 0.5}), 1.0, 1.0, 2000, 51);
  if (id == "example-5.6")
    return make(PiecewiseDensity({0.375, 0.5, 1.5, 2.0}, {4.0, 0.0, 1.0}), 1.0, 1.0, 10000, 56);
  if (id == "example-5.7")
    return make(PiecewiseDensity({0.0, 0.5, 1.5, 2.0}, {1.0, 0.0, 1.0}), 1.0, 1.0, 10000, 57);
  if (id == "example-5.8") return make(PiecewiseDensity({0.5, 1.0}, {2.0}), 1.0, 1.0, 10000, 58);
  if (id == "example-6.2" || id == "tent") {
    auto spec = make(TentLaw{}, 1.0, 1.0, 10000, 62);
    spec.id = "example-6.2";
    return spec;
  }
  if (id == "uniform02") return make(UniformInterval(0.0, 2.0), 1.5, 1.0, 10000, 2);
  throw ConfigError("unknown preset '" + id + "'");
}

// JSON description of a model; model_from_json inverts it.
inline nlohmann::json model_to_json(const SignalModel& model) {
  nlohmann::json j;
  j["kind"] = model.kind();
  std::visit(
      [&j](const auto& law) {
        using L = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<L, AtomicLaw>) {
          j["locations"] = law.locations();
          j["weights"] = law.weights();
        } else if constexpr (std::is_same_v<L, PiecewiseDensity>) {
          j["breakpoints"] = law.breakpoints();
          j["levels"] = law.levels();
        } else if constexpr (std::is_same_v<L, UniformInterval>) {
          j["a"] = law.a();
          j["b"] = law.b();
        } else if constexpr (std::is_same_v<L, PiecewiseLinearCdf>) {
          j["knots_y"] = law.knots_y();
          j["knots_F"] = law.knots_F();
        }
      },
      model.law());
  j["horizon"] = model.horizon() ? nlohmann::json(*model.horizon()) : nlohmann::json(nullptr);
  j["post_value"] = model.post_value();
  j["shift"] = model.shift();
  return j;
}

namespace detail {

inline std::string join_numbers(const nlohmann::json& arr) {
  std::string out;
  for (const auto& v : arr) {
    if (!out.empty()) out += ", ";
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    out += os.str();
  }
  return out;
}

}  // namespace detail

inline SignalModel model_from_json(const nlohmann::json& j) {
  ConfigMap m;
  for (const auto& [key, value] : j.items()) {
    if (value.is_array()) {
      m[key] = detail::join_numbers(value);
    } else if (value.is_null()) {
      m[key] = "none";
    } else if (value.is_string()) {
      m[key] = value.get<std::string>();
    } else {
      std::ostringstream os;
      os.precision(17);
      os << value.get<double>();
      m[key] = os.str();
    }
  }
  std::optional<double> horizon;
  if (auto it = m.find("horizon"); it != m.end() && it->second != "none") horizon = parse_double("horizon", it->second);
  return SignalModel(detail::law_from_config(m), horizon, parse_double("post_value", detail::require(m, "post_value")),
                     m.count("shift") ? parse_double("shift", m["shift"]) : 0.0);
}

}  // namespace mfstop
