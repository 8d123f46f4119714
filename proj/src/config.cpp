// Copyright 2026 The crowdauction Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "crowdauction/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "crowdauction/errors.hpp"

namespace crowdauction {

namespace {

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    raise(errc::config, std::string("bad value for '") + key + "': " + e.what());
  }
}

std::vector<Exponent> exponents_from_json(const nlohmann::json& arr) {
  std::vector<Exponent> out;
  for (const auto& item : arr) {
    if (item.is_string())
      out.push_back(exponent_from_string(item.get<std::string>()));
    else if (item.is_number())
      out.push_back(Exponent::finite(item.get<double>()));
    else
      raise(errc::config, "k entries must be numbers or \"inf\"");
  }
  return out;
}

nlohmann::json exponents_to_json(const std::vector<Exponent>& grid) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Exponent& k : grid) {
    if (k.is_infinite())
      arr.push_back("inf");
    else
      arr.push_back(k.value());
  }
  return arr;
}

}  // namespace

BidDistribution DistributionSpec::build() const {
  if (kind == "truncated_log_normal")
    return BidDistribution::truncated_log_normal(mu, sigma, bbar, lower);
  if (kind == "uniform") return BidDistribution::uniform(lower, bbar);
  if (kind == "tabulated") {
    Eigen::ArrayXd b(static_cast<Eigen::Index>(knots_b.size()));
    Eigen::ArrayXd F(static_cast<Eigen::Index>(knots_cdf.size()));
    for (std::size_t i = 0; i < knots_b.size(); ++i) b[i] = knots_b[i];
    for (std::size_t i = 0; i < knots_cdf.size(); ++i) F[i] = knots_cdf[i];
    return BidDistribution::tabulated(std::move(b), std::move(F));
  }
  raise(errc::config, "unknown distribution kind '" + kind + "'");
}

DistributionSpec distribution_from_json(const nlohmann::json& j) {
  DistributionSpec spec;
  spec.kind = get_or<std::string>(j, "kind", spec.kind);
  spec.mu = get_or(j, "mu", spec.mu);
  spec.sigma = get_or(j, "sigma", spec.sigma);
  spec.bbar = get_or(j, "bbar", spec.bbar);
  spec.lower = get_or(j, "lower", spec.lower);
  spec.knots_b = get_or(j, "knots_b", spec.knots_b);
  spec.knots_cdf = get_or(j, "knots_cdf", spec.knots_cdf);
  return spec;
}

nlohmann::json distribution_to_json(const DistributionSpec& spec) {
  nlohmann::json j{{"kind", spec.kind}, {"mu", spec.mu},       {"sigma", spec.sigma},
                   {"bbar", spec.bbar}, {"lower", spec.lower}};
  if (!spec.knots_b.empty()) {
    j["knots_b"] = spec.knots_b;
    j["knots_cdf"] = spec.knots_cdf;
  }
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  if (j.contains("distribution"))
    config.distribution = distribution_from_json(j.at("distribution"));

  SimulationConfig& sim = config.simulation;
  const nlohmann::json s = j.contains("simulation") ? j.at("simulation") : nlohmann::json::object();
  sim.population_sizes = get_or(s, "n", sim.population_sizes);
  sim.rho = get_or(s, "rho", sim.rho);
  if (s.contains("k")) sim.k_grid = exponents_from_json(s.at("k"));
  sim.gamma_grid = get_or(s, "gamma", sim.gamma_grid);
  sim.repeats = get_or(s, "repeats", sim.repeats);
  sim.threads = get_or(s, "threads", sim.threads);
  if (s.contains("probe")) {
    const nlohmann::json& p = s.at("probe");
    sim.probe.quantiles = get_or(p, "quantiles", sim.probe.quantiles);
    sim.probe.capacity = get_or(p, "x_max", sim.probe.capacity);
    sim.probe.accept_rate = get_or(p, "beta", sim.probe.accept_rate);
  }
  sim.seed = get_or<std::uint64_t>(j, "seed", sim.seed);

  if (sim.population_sizes.empty() || sim.rho.empty() || sim.k_grid.empty() ||
      sim.gamma_grid.empty() || sim.probe.quantiles.empty())
    raise(errc::config, "all simulation grids must be non-empty");
  if (sim.repeats < 1) raise(errc::config, "repeats must be >= 1");
  return config;
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  const SimulationConfig& sim = config.simulation;
  return nlohmann::json{
      {"distribution", distribution_to_json(config.distribution)},
      {"seed", sim.seed},
      {"simulation",
       {{"n", sim.population_sizes},
        {"rho", sim.rho},
        {"k", exponents_to_json(sim.k_grid)},
        {"gamma", sim.gamma_grid},
        {"repeats", sim.repeats},
        {"threads", sim.threads},
        {"probe",
         {{"quantiles", sim.probe.quantiles},
          {"x_max", sim.probe.capacity},
          {"beta", sim.probe.accept_rate}}}}}};
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::config, "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(errc::config, std::string("config parse failure: ") + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const nlohmann::json& j) {
  const std::string dump = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string exponent_to_string(const Exponent& k) {
  if (k.is_infinite()) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", k.value());
  return std::string(buf);
}

Exponent exponent_from_string(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF" || text == "infinity")
    return Exponent::infinity();
  double v = 0.0;
  const auto* begin = text.data();
  const auto* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end)
    raise(errc::config, "cannot parse exponent '" + text + "'");
  return Exponent::finite(v);
}

}  // namespace crowdauction
