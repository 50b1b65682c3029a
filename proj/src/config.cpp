#include "treechain/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace treechain {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& v, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (errno != 0 || end == v.c_str() || *end != '\0')
    throw ConfigError("config: bad numeric value for '" + key + "': " + v);
  return d;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
  if (errno != 0 || end == v.c_str() || *end != '\0' || v.find('-') != std::string::npos)
    throw ConfigError("config: bad integer value for '" + key + "': " + v);
  return u;
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : v) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& v,
                                                   const std::string& key) {
  std::vector<std::pair<double, double>> rows;
  for (const auto& item : split(v, ',')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() != 2)
      throw ConfigError("config: '" + key + "' rows must be value:prob");
    rows.emplace_back(parse_double(parts[0], key), parse_double(parts[1], key));
  }
  if (rows.empty()) throw ConfigError("config: '" + key + "' is empty");
  return rows;
}

std::vector<MixtureRow> parse_mixture(const std::string& v, const std::string& key) {
  std::vector<MixtureRow> rows;
  for (const auto& item : split(v, ',')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() != 3)
      throw ConfigError("config: '" + key + "' rows must be shift0:shift1:prob");
    rows.push_back({parse_double(parts[0], key), parse_double(parts[1], key),
                    parse_double(parts[2], key)});
  }
  if (rows.empty()) throw ConfigError("config: '" + key + "' is empty");
  return rows;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& v, const std::string& key) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(v, ','))
    if (!item.empty()) out.push_back(parse_u64(item, key));
  if (out.empty()) throw ConfigError("config: '" + key + "' is empty");
  return out;
}

std::string pairs_text(const std::vector<std::pair<double, double>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) s += ", ";
    s += format_double(rows[i].first) + ":" + format_double(rows[i].second);
  }
  return s;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "kernel" && section != "experiment" && section != "law" &&
          section != "run")
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside a section");

    if (section == "kernel") {
      if (key == "family") c.kernel.family = value;
      else if (key == "increment") c.kernel.increment = value;
      else if (key == "sigma") c.kernel.sigma = parse_double(value, key);
      else if (key == "shift") c.kernel.shift = parse_double(value, key);
      else if (key == "lambda") c.kernel.lambda = parse_double(value, key);
      else if (key == "table") c.kernel.table = parse_pairs(value, key);
      else if (key == "mixture") c.kernel.mixture = parse_mixture(value, key);
      else if (key == "n") c.kernel.n = parse_u64(value, key);
      else if (key == "n_list") c.kernel.n_list = parse_u64_list(value, key);
      else throw ConfigError("config line " + std::to_string(lineno) +
                             ": unknown key 'kernel." + key + "'");
    } else if (section == "experiment") {
      if (key == "x0") c.experiment.x0 = parse_double(value, key);
      else if (key == "t") c.experiment.t = parse_double(value, key);
      else if (key == "m") c.experiment.m = parse_u64(value, key);
      else if (key == "replicates") c.experiment.replicates = static_cast<int>(parse_u64(value, key));
      else if (key == "k") c.experiment.k = static_cast<std::uint32_t>(parse_u64(value, key));
      else if (key == "phi") c.experiment.phi = value;
      else if (key == "phi_threshold") c.experiment.phi_threshold = parse_double(value, key);
      else if (key == "phi_scale") c.experiment.phi_scale = parse_double(value, key);
      else if (key == "phi_table") c.experiment.phi_table = parse_pairs(value, key);
      else if (key == "threshold") c.experiment.threshold = parse_double(value, key);
      else if (key == "significance") c.experiment.significance = parse_double(value, key);
      else if (key == "grid_min") c.experiment.grid_min = parse_double(value, key);
      else if (key == "grid_max") c.experiment.grid_max = parse_double(value, key);
      else if (key == "grid_step") c.experiment.grid_step = parse_double(value, key);
      else if (key == "k_max") c.experiment.k_max = static_cast<std::uint32_t>(parse_u64(value, key));
      else if (key == "target") c.experiment.target = value;
      else throw ConfigError("config line " + std::to_string(lineno) +
                             ": unknown key 'experiment." + key + "'");
    } else if (section == "law") {
      if (key == "kind") c.law.kind = value;
      else throw ConfigError("config line " + std::to_string(lineno) +
                             ": unknown key 'law." + key + "'");
    } else {  // run
      if (key == "master_seed") c.run.master_seed = parse_u64(value, key);
      else if (key == "workers") c.run.workers = static_cast<int>(parse_u64(value, key));
      else if (key == "out") c.run.out = value;
      else if (key == "format") c.run.format = value;
      else throw ConfigError("config line " + std::to_string(lineno) +
                             ": unknown key 'run." + key + "'");
    }
  }

  if (c.run.format != "json" && c.run.format != "csv" && c.run.format != "both")
    throw ConfigError("config: run.format must be json, csv, or both");
  if (c.run.workers < 1) throw ConfigError("config: run.workers must be >= 1");
  if (c.experiment.target != "walk" && c.experiment.target != "tree")
    throw ConfigError("config: experiment.target must be walk or tree");
  return c;
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << serialize_identity();
  out << "workers = " << run.workers << "\n";
  out << "out = " << run.out << "\n";
  out << "format = " << run.format << "\n";
  return out.str();
}

std::string ExperimentConfig::serialize_identity() const {
  std::ostringstream out;
  out << "[kernel]\n";
  out << "family = " << kernel.family << "\n";
  out << "increment = " << kernel.increment << "\n";
  out << "sigma = " << format_double(kernel.sigma) << "\n";
  out << "shift = " << format_double(kernel.shift) << "\n";
  out << "lambda = " << format_double(kernel.lambda) << "\n";
  if (!kernel.table.empty()) out << "table = " << pairs_text(kernel.table) << "\n";
  if (!kernel.mixture.empty()) {
    out << "mixture = ";
    for (std::size_t i = 0; i < kernel.mixture.size(); ++i) {
      if (i) out << ", ";
      out << format_double(kernel.mixture[i].shift0) << ":"
          << format_double(kernel.mixture[i].shift1) << ":"
          << format_double(kernel.mixture[i].prob);
    }
    out << "\n";
  }
  out << "n = " << kernel.n << "\n";
  if (!kernel.n_list.empty()) {
    out << "n_list = ";
    for (std::size_t i = 0; i < kernel.n_list.size(); ++i)
      out << (i ? ", " : "") << kernel.n_list[i];
    out << "\n";
  }
  out << "\n[experiment]\n";
  out << "x0 = " << format_double(experiment.x0) << "\n";
  out << "t = " << format_double(experiment.t) << "\n";
  out << "m = " << experiment.m << "\n";
  out << "replicates = " << experiment.replicates << "\n";
  out << "k = " << experiment.k << "\n";
  out << "phi = " << experiment.phi << "\n";
  out << "phi_threshold = " << format_double(experiment.phi_threshold) << "\n";
  out << "phi_scale = " << format_double(experiment.phi_scale) << "\n";
  if (!experiment.phi_table.empty())
    out << "phi_table = " << pairs_text(experiment.phi_table) << "\n";
  out << "threshold = " << format_double(experiment.threshold) << "\n";
  out << "significance = " << format_double(experiment.significance) << "\n";
  out << "grid_min = " << format_double(experiment.grid_min) << "\n";
  out << "grid_max = " << format_double(experiment.grid_max) << "\n";
  out << "grid_step = " << format_double(experiment.grid_step) << "\n";
  out << "k_max = " << experiment.k_max << "\n";
  out << "target = " << experiment.target << "\n";
  out << "\n[law]\n";
  out << "kind = " << law.kind << "\n";
  out << "\n[run]\n";
  out << "master_seed = " << run.master_seed << "\n";
  return out.str();
}

KernelFamily ExperimentConfig::make_kernel(std::uint64_t n) const {
  const auto law_of = [&]() -> IncrementLaw {
    if (kernel.increment == "rademacher") return IncrementLaw::rademacher();
    if (kernel.increment == "gaussian") return IncrementLaw::gaussian(kernel.sigma);
    if (kernel.increment == "bernoulli_jump")
      return IncrementLaw::bernoulli_jump(kernel.lambda);
    if (kernel.increment == "point_mass") return IncrementLaw::point_mass(kernel.shift);
    if (kernel.increment == "table") return IncrementLaw::from_table(kernel.table);
    throw ConfigError("config: unknown increment kind '" + kernel.increment + "'");
  };
  try {
    if (kernel.family == "donsker") return KernelFamily::donsker(law_of(), n);
    if (kernel.family == "poisson") return KernelFamily::poisson(kernel.lambda, n);
    if (kernel.family == "symmetric_product")
      return KernelFamily::symmetric_product(law_of(), n);
    if (kernel.family == "custom") return KernelFamily::custom(kernel.mixture, n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  throw ConfigError("config: unknown kernel family '" + kernel.family + "'");
}

TestFunction ExperimentConfig::make_phi() const {
  const std::string& id = experiment.phi;
  if (id == "identity") return TestFunction::identity();
  if (id == "square") return TestFunction::square();
  if (id == "quartic") return TestFunction::quartic();
  if (id == "indicator") return TestFunction::indicator_ge(experiment.phi_threshold);
  if (id == "exp_bounded") return TestFunction::exp_bounded(experiment.phi_scale);
  if (id == "table") {
    if (experiment.phi_table.empty())
      throw ConfigError("config: phi = table requires experiment.phi_table");
    return TestFunction::from_table(experiment.phi_table);
  }
  throw ConfigError("config: unknown phi '" + id + "'");
}

LimitLaw ExperimentConfig::make_law() const {
  const double t = experiment.t;
  if (law.kind == "normal") return LimitLaw::normal(t);
  if (law.kind == "poisson") return LimitLaw::poisson(kernel.lambda, t);
  if (law.kind == "point_mass") return LimitLaw::point_mass(experiment.x0);
  if (law.kind == "auto") {
    if (t == 0.0) return LimitLaw::point_mass(experiment.x0);
    if (kernel.family == "donsker") return LimitLaw::normal(t);
    if (kernel.family == "poisson") return LimitLaw::poisson(kernel.lambda, t);
    throw ConfigError("config: no automatic limit law for family '" +
                      kernel.family + "'; set law.kind");
  }
  throw ConfigError("config: unknown law kind '" + law.kind + "'");
}

std::vector<std::uint64_t> ExperimentConfig::scales() const {
  if (!kernel.n_list.empty()) return kernel.n_list;
  return {kernel.n};
}

}  // namespace treechain
