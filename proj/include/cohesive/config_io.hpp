#pragma once

// Scenario files: INI-style sections [network], [controller], [trajectory],
// [run]. Numbers are in cm, N, s, rad/s and N/cm. Robot numbers in edge
// lists are 1-based.
//
//   [network]
//   topology = chain
//   neighbor_stiffness = 0.05, 0.05, 0.05
//   leader_stiffness = 0.05, 0, 0, 0
//
// A general graph uses `topology = graph`, `robots = <n>` and
// `edges = 1-2:0.05, 2-3:0.05`.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cohesive/scenario.hpp"

namespace cohesive {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "invalid config:";
    for (const auto& i : issues) out += "\n  " + i;
    return out;
  }
  std::vector<std::string> issues_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return v;
}

inline std::optional<std::size_t> parse_size(std::string_view text) {
  text = trim(text);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

// Reads typed fields from one section and records every problem.
class SectionReader {
 public:
  SectionReader(const boost::property_tree::ptree* section, std::string name,
                std::vector<std::string>& issues)
      : section_(section), name_(std::move(name)), issues_(issues) {}

  bool has(const std::string& key) const {
    return section_ && section_->find(key) != section_->not_found();
  }

  std::optional<std::string> text(const std::string& key, bool required) {
    used_.insert(key);
    if (!has(key)) {
      if (required) issues_.push_back(path(key) + ": missing");
      return std::nullopt;
    }
    return std::string(trim(section_->get<std::string>(key)));
  }

  std::optional<double> number(const std::string& key, bool required) {
    const auto t = text(key, required);
    if (!t) return std::nullopt;
    const auto v = parse_double(*t);
    if (!v) issues_.push_back(path(key) + ": not a number: '" + *t + "'");
    return v;
  }

  std::optional<std::size_t> count(const std::string& key, bool required) {
    const auto t = text(key, required);
    if (!t) return std::nullopt;
    const auto v = parse_size(*t);
    if (!v) issues_.push_back(path(key) + ": not a non-negative integer: '" + *t + "'");
    return v;
  }

  std::optional<std::vector<double>> list(const std::string& key, bool required) {
    const auto t = text(key, required);
    if (!t) return std::nullopt;
    std::vector<double> out;
    bool ok = true;
    for (const auto item : split(*t, ',')) {
      const auto v = parse_double(item);
      if (!v) {
        issues_.push_back(path(key) + ": not a number: '" + std::string(item) + "'");
        ok = false;
      } else {
        out.push_back(*v);
      }
    }
    if (!ok) return std::nullopt;
    return out;
  }

  /// Keys present but never asked for.
  void reject_unused(const std::string& why) {
    if (!section_) return;
    for (const auto& [key, value] : *section_) {
      if (!used_.count(key)) issues_.push_back(path(key) + ": " + why);
    }
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

 private:
  const boost::property_tree::ptree* section_;
  std::string name_;
  std::vector<std::string>& issues_;
  std::set<std::string> used_;
};

inline std::optional<StiffnessNetwork> read_network(SectionReader& r,
                                                    std::vector<std::string>& issues) {
  const auto topology = r.text("topology", false).value_or("chain");
  const auto leader = r.list("leader_stiffness", true);
  std::optional<StiffnessNetwork> out;
  try {
    if (topology == "chain") {
      const auto neighbor = r.list("neighbor_stiffness", true);
      if (neighbor && leader) out = StiffnessNetwork(StiffnessChain(*neighbor, *leader));
    } else if (topology == "graph") {
      const auto robots = r.count("robots", true);
      const auto edge_text = r.text("edges", true);
      std::vector<Edge> edges;
      bool ok = true;
      if (edge_text) {
        for (const auto item : split(*edge_text, ',')) {
          // a-b:k
          const auto colon = item.find(':');
          const auto dash = item.find('-');
          std::optional<std::size_t> a, b;
          std::optional<double> k;
          if (colon != std::string_view::npos && dash != std::string_view::npos &&
              dash < colon) {
            a = parse_size(item.substr(0, dash));
            b = parse_size(item.substr(dash + 1, colon - dash - 1));
            k = parse_double(item.substr(colon + 1));
          }
          if (!a || !b || !k || *a == 0 || *b == 0) {
            issues.push_back(r.path("edges") + ": expected 'i-j:stiffness', got '" +
                             std::string(item) + "'");
            ok = false;
            continue;
          }
          edges.push_back({*a - 1, *b - 1, *k});
        }
      }
      if (robots && edge_text && leader && ok) {
        out = StiffnessNetwork(*robots, std::move(edges), *leader);
      }
    } else {
      issues.push_back(r.path("topology") + ": expected 'chain' or 'graph', got '" +
                       topology + "'");
    }
  } catch (const ModelError& e) {
    issues.push_back("network: " + std::string(e.what()));
  }
  r.reject_unused(topology == "graph" ? "unknown key for graph topology"
                                      : "unknown key for chain topology");
  return out;
}

inline ControllerConfig read_controller(SectionReader& r, std::vector<std::string>& issues) {
  ControllerConfig c;
  const auto kind = r.text("kind", true).value_or("baseline");
  c.dt = r.number("dt", true).value_or(0.03);
  if (kind == "baseline") {
    c.kind = ControllerKind::kBaseline;
    c.gamma = r.number("gamma", true).value_or(0.0);
  } else if (kind == "dsr") {
    c.kind = ControllerKind::kDsr;
    c.alpha = r.number("alpha", true).value_or(0.0);
    c.beta = r.number("beta", true).value_or(0.0);
    c.delay_multiple = r.count("delay_multiple", false).value_or(1);
  } else {
    issues.push_back(r.path("kind") + ": expected 'baseline' or 'dsr', got '" + kind + "'");
  }
  r.reject_unused("not used by a " + kind + " controller");
  return c;
}

inline TrajectorySpec read_trajectory(SectionReader& r, std::vector<std::string>& issues) {
  TrajectorySpec t;
  const auto kind = r.text("kind", true).value_or("filtered_step");
  t.amplitude = r.number("amplitude", true).value_or(0.0);
  t.start_index = r.count("start_index", false).value_or(1);
  if (kind == "step") {
    t.kind = TrajectoryKind::kStep;
    t.omega_c = 0.0;
  } else if (kind == "filtered_step") {
    t.kind = TrajectoryKind::kFilteredStep;
    t.omega_c = r.number("omega_c", true).value_or(0.0);
  } else {
    issues.push_back(r.path("kind") + ": expected 'step' or 'filtered_step', got '" +
                     kind + "'");
  }
  r.reject_unused("not used by a " + kind + " trajectory");
  return t;
}

}  // namespace detail

/// Parses scenario text. `source` names the input in error messages.
inline ScenarioConfig parse_config(const std::string& text,
                                   const std::string& source = "<config>") {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError({source + ":" + std::to_string(e.line()) + ": " + e.message()});
  }

  std::vector<std::string> issues;
  static const std::set<std::string> kSections = {"network", "controller", "trajectory",
                                                  "run"};
  for (const auto& [name, section] : tree) {
    if (!kSections.count(name)) {
      issues.push_back(section.empty() ? name + ": key outside any section"
                                       : name + ": unknown section");
    }
  }
  const auto section = [&](const std::string& name) -> const boost::property_tree::ptree* {
    const auto it = tree.find(name);
    if (it == tree.not_found()) {
      issues.push_back(name + ": missing section");
      return nullptr;
    }
    return &it->second;
  };

  ScenarioConfig s;
  detail::SectionReader network(section("network"), "network", issues);
  const auto net = detail::read_network(network, issues);
  detail::SectionReader controller(section("controller"), "controller", issues);
  s.controller = detail::read_controller(controller, issues);
  detail::SectionReader trajectory(section("trajectory"), "trajectory", issues);
  s.trajectory = detail::read_trajectory(trajectory, issues);

  detail::SectionReader run(section("run"), "run", issues);
  s.name = run.text("name", false).value_or("scenario");
  s.duration = run.number("duration", true).value_or(0.0);
  if (const auto init = run.list("initial_positions", false)) {
    s.initial_positions = Eigen::Map<const Eigen::VectorXd>(
        init->data(), static_cast<Eigen::Index>(init->size()));
  }
  s.trace_csv = run.text("trace_csv", false).value_or("");
  s.report = run.text("report", false).value_or("");
  run.reject_unused("unknown key");

  if (net) s.network = *net;
  for (auto& v : s.violations()) {
    // Without a usable network the size check has nothing to compare against.
    if (!net && v.starts_with("run.initial_positions")) continue;
    issues.push_back(std::move(v));
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return s;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open file"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

/// Text that parse_config() maps back to an equal scenario.
inline std::string write_config(const ScenarioConfig& s) {
  using detail::format_double;
  using detail::format_list;
  std::ostringstream out;
  out << "[network]\n";
  const auto& net = s.network;
  if (net.is_chain()) {
    const auto chain = net.as_chain();
    out << "topology = chain\n"
        << "neighbor_stiffness = " << format_list(chain.neighbor_stiffness()) << "\n";
  } else {
    out << "topology = graph\n"
        << "robots = " << net.size() << "\n"
        << "edges = ";
    for (std::size_t i = 0; i < net.edges().size(); ++i) {
      const auto& e = net.edges()[i];
      if (i) out << ", ";
      out << e.a + 1 << "-" << e.b + 1 << ":" << format_double(e.stiffness);
    }
    out << "\n";
  }
  out << "leader_stiffness = " << format_list(net.leader_stiffness()) << "\n\n";

  const auto& c = s.controller;
  out << "[controller]\n"
      << "kind = " << to_string(c.kind) << "\n"
      << "dt = " << format_double(c.dt) << "\n";
  if (c.is_dsr()) {
    out << "alpha = " << format_double(c.alpha) << "\n"
        << "beta = " << format_double(c.beta) << "\n"
        << "delay_multiple = " << c.delay_multiple << "\n";
  } else {
    out << "gamma = " << format_double(c.gamma) << "\n";
  }
  out << "\n";

  const auto& t = s.trajectory;
  out << "[trajectory]\n"
      << "kind = " << (t.kind == TrajectoryKind::kStep ? "step" : "filtered_step") << "\n"
      << "amplitude = " << format_double(t.amplitude) << "\n"
      << "start_index = " << t.start_index << "\n";
  if (t.kind == TrajectoryKind::kFilteredStep) {
    out << "omega_c = " << format_double(t.omega_c) << "\n";
  }
  out << "\n";

  out << "[run]\n"
      << "name = " << s.name << "\n"
      << "duration = " << format_double(s.duration) << "\n";
  if (s.initial_positions) {
    const auto& y = *s.initial_positions;
    out << "initial_positions = "
        << format_list(std::vector<double>(y.data(), y.data() + y.size())) << "\n";
  }
  if (!s.trace_csv.empty()) out << "trace_csv = " << s.trace_csv << "\n";
  if (!s.report.empty()) out << "report = " << s.report << "\n";
  return out.str();
}

inline void save_config(const ScenarioConfig& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write");
  out << write_config(s);
}

}  // namespace cohesive
