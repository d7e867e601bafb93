#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace lct::cli {

namespace {

std::vector<std::pair<std::string, std::string>> make_schema() {
  std::vector<std::pair<std::string, std::string>> s = {
      {"grid.n", "2"},
      {"grid.r", "1"},
      {"grid.T", "2.5"},
      {"grid.nx", "129"},
      {"grid.nt", "0"},
      {"grid.cfl", "0.9"},
  };
  const std::pair<const char*, const char*> blocks[] = {
      {"background_a", "Q"}, {"background_b", "Q"}, {"unknown_a", "QrStar"}, {"unknown_b", "QrStar"}};
  for (auto [name, region] : blocks) {
    const std::string p = std::string(name) + ".";
    s.emplace_back(p + "center", "0,0");
    s.emplace_back(p + "tc", "1.25");
    s.emplace_back(p + "radius_x", "0.3");
    s.emplace_back(p + "radius_t", "0.35");
    s.emplace_back(p + "amplitude", "0");
    s.emplace_back(p + "region", region);
  }
  const std::vector<std::pair<std::string, std::string>> rest = {
      {"probe.mode", "Lambda"},
      {"probe.source", "extracted"},
      {"probe.lambda", "110"},
      {"probe.h", "0.2"},
      {"probe.omega_count", "4"},
      {"probe.y_count", "2"},
      {"probe.random_bumps", "4"},
      {"probe.directions", "8"},
      {"probe.dy", "0.1"},
      {"frequency.alpha", "30"},
      {"frequency.box_half", "0.5"},
      {"frequency.box_nx", "32"},
      {"frequency.box_nt", "64"},
      {"continuation.backend", "regularized"},
      {"continuation.rho", "1"},
      {"continuation.n_cap", "60"},
      {"continuation.reg", "1e-3"},
      {"continuation.reg_grad", "1e-3"},
      {"continuation.max_iter", "400"},
      {"continuation.noise", "0"},
      {"prior.x_half", "0"},
      {"prior.t0", "0"},
      {"prior.t1", "0"},
      {"sweep.ladder", "1e-3,3e-3,1e-2,3e-2,1e-1"},
      {"output.dir", "lct_out"},
      {"output.dump_field", "false"},
      {"run.seed", "0"},
      {"run.jobs", "1"},
  };
  s.insert(s.end(), rest.begin(), rest.end());
  return s;
}

double to_double(const FlatConfig& f, const std::string& key) {
  const std::string& v = f.at(key);
  double x = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

long long to_int(const FlatConfig& f, const std::string& key) {
  const std::string& v = f.at(key);
  long long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
  return x;
}

bool to_bool(const FlatConfig& f, const std::string& key) {
  const std::string& v = f.at(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::vector<double> to_list(const FlatConfig& f, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(f.at(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError(key + ": empty list entry");
    FlatConfig one{{key, item.substr(b, e - b + 1)}};
    out.push_back(to_double(one, key));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

BumpBlock to_bump(const FlatConfig& f, const std::string& name) {
  BumpBlock b;
  const auto c = to_list(f, name + ".center");
  if (c.size() != 2) throw ConfigError(name + ".center: expected 'x,y'");
  b.spec.center = {c[0], c[1]};
  b.spec.tc = to_double(f, name + ".tc");
  b.spec.radius_x = to_double(f, name + ".radius_x");
  b.spec.radius_t = to_double(f, name + ".radius_t");
  b.spec.amplitude = to_double(f, name + ".amplitude");
  const auto region = parse_region(f.at(name + ".region"));
  if (!region) throw ConfigError(name + ".region: unknown region '" + f.at(name + ".region") + "'");
  b.region = *region;
  b.present = b.spec.amplitude != 0.0;
  return b;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& config_schema() {
  static const auto schema = make_schema();
  return schema;
}

FlatConfig parse_ini(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  std::set<std::string> known;
  for (const auto& [k, v] : config_schema()) known.insert(k);
  FlatConfig flat;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key outside a section: " + section);
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!known.count(full)) throw ConfigError("unknown config key: " + full);
      flat[full] = value.get_value<std::string>();
    }
  }
  return flat;
}

FlatConfig load_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ini(ss.str());
}

void apply_override(FlatConfig& flat, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must be section.key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  bool known = false;
  for (const auto& [k, v] : config_schema()) known = known || k == key;
  if (!known) throw ConfigError("unknown config key: " + key);
  flat[key] = assignment.substr(eq + 1);
}

FlatConfig with_defaults(FlatConfig flat) {
  for (const auto& [k, v] : config_schema()) flat.try_emplace(k, v);
  return flat;
}

ToolkitConfig build_config(FlatConfig flat) {
  flat = with_defaults(std::move(flat));
  ToolkitConfig c;
  c.grid.n = static_cast<int>(to_int(flat, "grid.n"));
  c.grid.r = to_double(flat, "grid.r");
  c.grid.T = to_double(flat, "grid.T");
  c.grid.nx = static_cast<int>(to_int(flat, "grid.nx"));
  c.grid.nt = static_cast<int>(to_int(flat, "grid.nt"));
  c.grid.cfl = to_double(flat, "grid.cfl");
  c.background_a = to_bump(flat, "background_a");
  c.background_b = to_bump(flat, "background_b");
  c.unknown_a = to_bump(flat, "unknown_a");
  c.unknown_b = to_bump(flat, "unknown_b");

  const std::string mode = flat.at("probe.mode");
  if (mode == "Lambda") c.mode = OperatorTag::Lambda;
  else if (mode == "Response") c.mode = OperatorTag::Response;
  else if (mode == "FullData") c.mode = OperatorTag::FullData;
  else throw ConfigError("probe.mode: expected Lambda, Response or FullData");
  const std::string source = flat.at("probe.source");
  if (source == "extracted") c.source = LightRaySource::Extracted;
  else if (source == "direct") c.source = LightRaySource::Direct;
  else throw ConfigError("probe.source: expected extracted or direct");
  c.lambdas = to_list(flat, "probe.lambda");
  c.h = to_double(flat, "probe.h");
  c.omega_count = static_cast<int>(to_int(flat, "probe.omega_count"));
  c.y_count = static_cast<int>(to_int(flat, "probe.y_count"));
  c.random_bumps = static_cast<int>(to_int(flat, "probe.random_bumps"));
  c.directions = static_cast<int>(to_int(flat, "probe.directions"));
  c.dy = to_double(flat, "probe.dy");

  c.alpha = to_double(flat, "frequency.alpha");
  c.box.L = to_double(flat, "frequency.box_half");
  c.box.nx = static_cast<int>(to_int(flat, "frequency.box_nx"));
  c.box.nt = static_cast<int>(to_int(flat, "frequency.box_nt"));
  c.box.T = c.grid.T;

  const std::string backend = flat.at("continuation.backend");
  if (backend == "regularized") c.backend = FillBackend::Regularized;
  else if (backend == "lagrange") c.backend = FillBackend::Lagrange;
  else throw ConfigError("continuation.backend: expected regularized or lagrange");
  c.rho = to_double(flat, "continuation.rho");
  c.n_cap = static_cast<int>(to_int(flat, "continuation.n_cap"));
  c.reg = to_double(flat, "continuation.reg");
  c.reg_grad = to_double(flat, "continuation.reg_grad");
  c.max_iter = static_cast<int>(to_int(flat, "continuation.max_iter"));
  c.noise = to_double(flat, "continuation.noise");

  const double ph = to_double(flat, "prior.x_half");
  if (ph > 0.0) {
    c.prior.lo = {-ph, -ph};
    c.prior.hi = {ph, ph};
    c.prior.t0 = to_double(flat, "prior.t0");
    c.prior.t1 = to_double(flat, "prior.t1");
    c.prior.empty = !(c.prior.t1 > c.prior.t0);
    if (c.prior.empty) throw ConfigError("prior: need t1 > t0 when x_half > 0");
  }
  c.ladder = to_list(flat, "sweep.ladder");
  c.out_dir = flat.at("output.dir");
  c.dump_field = to_bool(flat, "output.dump_field");
  c.seed = static_cast<std::uint64_t>(to_int(flat, "run.seed"));
  c.jobs = static_cast<int>(to_int(flat, "run.jobs"));

  if (c.grid.n != 1 && c.grid.n != 2) throw ConfigError("grid.n must be 1 or 2");
  if (c.grid.nx < 5) throw ConfigError("grid.nx too small");
  if (c.jobs < 1) throw ConfigError("run.jobs must be >= 1");
  // λ_max rule: ten points per wavelength
  const SpaceTimeGrid g(c.grid);
  for (double l : c.lambdas)
    if (!(l > 0.0) || l > g.lambda_max() * (1.0 + 1e-12))
      throw ConfigError("probe.lambda=" + std::to_string(l) + " outside (0, " + std::to_string(g.lambda_max()) +
                        "] for this grid");
  return c;
}

std::string to_ini(const FlatConfig& flat) {
  // sections in schema order, keys in schema order
  std::ostringstream out;
  std::string section;
  for (const auto& [k, def] : config_schema()) {
    const auto dot = k.find('.');
    const std::string s = k.substr(0, dot);
    if (s != section) {
      if (!section.empty()) out << '\n';
      out << '[' << s << "]\n";
      section = s;
    }
    const auto it = flat.find(k);
    out << k.substr(dot + 1) << " = " << (it == flat.end() ? def : it->second) << '\n';
  }
  return out.str();
}

std::uint64_t config_hash(const FlatConfig& flat) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_ini(with_defaults(flat))) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace lct::cli
