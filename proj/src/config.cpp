#include "ep3/config.hpp"

#include "ep3/csv.hpp"
#include "ep3/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ep3 {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : config_keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e && std::isfinite(out);
}

bool parse_ll(const std::string& s, long long& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e;
}

void check_value(const KeySpec& k, const std::string& v, const std::string& where) {
  bool ok = true;
  switch (k.type) {
    case KeyType::real: {
      if (v.find(':') != std::string::npos || v.find(',') != std::string::npos) {
        try {
          (void)parse_real_list(v);
        } catch (const std::exception&) {
          ok = false;
        }
      } else {
        double d = 0.0;
        ok = parse_double(v, d);
      }
      break;
    }
    case KeyType::integer: {
      long long i = 0;
      ok = parse_ll(v, i);
      break;
    }
    case KeyType::seed: {
      std::uint64_t s = 0;
      ok = parse_u64(v, s);
      break;
    }
    case KeyType::text:
      ok = !v.empty();
      break;
  }
  if (!ok) throw ConfigError(where + ": bad value '" + v + "' for key '" + k.name + "'");
}

}  // namespace

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = {
      {"mode", KeyType::text, "noiseless", "noiseless | shot_noise"},
      {"seed", KeyType::seed, "", "master seed, required in shot_noise mode"},
      {"exec", KeyType::text, "openmp", "openmp | serial (identical outputs)"},
      {"gamma_mhz", KeyType::real, "0.040", "loss rate gamma1/(2 pi), MHz; gamma2 = 2 gamma1"},
      {"omega_over_gamma", KeyType::real, "0.4:1.6:13", "Omega/gamma values, a:b:n or list"},
      {"omega_a_mhz", KeyType::real, "0.004", "auxiliary Rabi frequency/(2 pi), MHz"},
      {"tau_a_us", KeyType::real, "7400", "lifetime of |a>, us (0 disables the decay)"},
      {"branch_f", KeyType::real, "0.816", "shelving branching fraction"},
      {"n0", KeyType::real, "0.98", "preparation and measurement scale of synthetic lines"},
      {"t_evolve_us", KeyType::real, "200", "spectroscopy evolution time, us"},
      {"grid_points", KeyType::integer, "41", "detuning grid points"},
      {"grid_span_mhz", KeyType::real, "0.1", "detuning grid half-span/(2 pi), MHz"},
      {"shots", KeyType::integer, "200", "spectroscopy shots per point and round"},
      {"rounds", KeyType::integer, "5", "spectroscopy rounds"},
      {"restarts", KeyType::integer, "8", "spectroscopy fit starts (start 0 is the init)"},
      {"loop_omega_over_gamma", KeyType::real, "1", "Omega/gamma on the winding loop"},
      {"delta_r_mhz", KeyType::real, "0.020", "winding loop radius/(2 pi), MHz"},
      {"center0_mhz", KeyType::real, "0", "loop centre Delta0/(2 pi), MHz"},
      {"center1_mhz", KeyType::real, "0", "loop centre Delta1/(2 pi), MHz"},
      {"points", KeyType::integer, "61", "loop points"},
      {"e_b_re_mhz", KeyType::real, "-0.016", "Re E_B/(2 pi), MHz"},
      {"e_b_im_mhz", KeyType::real, "-0.032", "Im E_B/(2 pi), MHz"},
      {"gamma_dt", KeyType::real, "0.5", "tomography evolution gamma*dt"},
      {"scan_points", KeyType::integer, "61", "tomography angle grid points"},
      {"family", KeyType::text, "both", "quench family: h_eff | liouvillian | both"},
      {"quench_points", KeyType::integer, "60", "quench samples"},
      {"quench_span", KeyType::real, "6", "quench window in gamma*t"},
      {"bootstrap", KeyType::integer, "200", "bootstrap resamples"},
      {"readout_shots", KeyType::integer, "1000", "repetitions per readout phase"},
      {"phases", KeyType::integer, "12", "readout phase points"},
      {"flip_prob", KeyType::real, "0.002", "symmetric detection error"},
  };
  return keys;
}

ParamConfig::ParamConfig() {
  for (const auto& k : config_keys()) {
    if (!k.default_value.empty()) values_[k.name] = k.default_value;
  }
}

ParamConfig ParamConfig::parse(const std::string& text, const std::string& source) {
  ParamConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (seen.count(key)) {
      throw ConfigError(where + ": duplicate key '" + key + "' (first on line " +
                        std::to_string(seen[key]) + ")");
    }
    seen[key] = lineno;
    cfg.set(key, value, where);
  }
  return cfg;
}

ParamConfig ParamConfig::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

void ParamConfig::set(const std::string& key, const std::string& value, const std::string& origin) {
  const KeySpec* k = find_key(key);
  if (!k) throw ConfigError(origin + ": unknown key '" + key + "'");
  check_value(*k, value, origin);
  values_[key] = value;
}

bool ParamConfig::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& ParamConfig::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

double ParamConfig::real(const std::string& key) const {
  double d = 0.0;
  if (!parse_double(text(key), d)) throw ConfigError("key '" + key + "' is not a single number");
  return d;
}

double ParamConfig::frequency(const std::string& key) const {
  if (key.size() < 4 || key.substr(key.size() - 4) != "_mhz") {
    throw ConfigError("key '" + key + "' is not a frequency");
  }
  return kTwoPi * real(key);
}

long long ParamConfig::integer(const std::string& key) const {
  long long i = 0;
  if (!parse_ll(text(key), i)) throw ConfigError("key '" + key + "' is not an integer");
  return i;
}

std::optional<std::uint64_t> ParamConfig::seed() const {
  if (!has("seed")) return std::nullopt;
  std::uint64_t s = 0;
  parse_u64(text("seed"), s);
  return s;
}

std::vector<double> ParamConfig::real_list(const std::string& key) const {
  return parse_real_list(text(key));
}

bool ParamConfig::shot_noise() const { return text("mode") == "shot_noise"; }

void ParamConfig::validate() const {
  const std::string& mode = text("mode");
  if (mode != "noiseless" && mode != "shot_noise") {
    throw ConfigError("mode must be noiseless or shot_noise");
  }
  if (mode == "shot_noise" && !seed()) throw ConfigError("shot_noise mode requires a seed");
  const std::string& ex = text("exec");
  if (ex != "openmp" && ex != "serial") throw ConfigError("exec must be openmp or serial");
  const std::string& fam = text("family");
  if (fam != "h_eff" && fam != "liouvillian" && fam != "both") {
    throw ConfigError("family must be h_eff, liouvillian or both");
  }
  if (!(real("gamma_mhz") > 0.0)) throw ConfigError("gamma_mhz must be > 0");
  for (double r : real_list("omega_over_gamma")) {
    if (!(r > 0.0)) throw ConfigError("omega_over_gamma values must be > 0");
  }
  for (const char* k : {"grid_points", "shots", "rounds", "points", "scan_points",
                        "quench_points", "readout_shots", "phases", "restarts"}) {
    if (integer(k) < 1) throw ConfigError(std::string(k) + " must be >= 1");
  }
  if (integer("bootstrap") < 0) throw ConfigError("bootstrap must be >= 0");
  const double fp = real("flip_prob");
  if (!(fp >= 0.0 && fp < 0.5)) throw ConfigError("flip_prob must lie in [0, 0.5)");
}

std::string ParamConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
      if (c == ':') {
        parts.push_back(trim(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(trim(cur));
    double a = 0.0;
    double b = 0.0;
    long long n = 0;
    if (parts.size() != 3 || !parse_double(parts[0], a) || !parse_double(parts[1], b) ||
        !parse_ll(parts[2], n) || n < 1) {
      throw ConfigError("range must be a:b:n with n >= 1, got '" + s + "'");
    }
    if (n == 1) return {a};
    for (long long k = 0; k < n; ++k) out.push_back(a + (b - a) * static_cast<double>(k) / (n - 1));
    return out;
  }
  std::string cur;
  auto flush = [&] {
    double d = 0.0;
    if (!parse_double(trim(cur), d)) throw ConfigError("bad number '" + trim(cur) + "' in list");
    out.push_back(d);
    cur.clear();
  };
  for (char c : s) {
    if (c == ',') {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunManifest::str() const {
  auto hex = [](std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
  };
  std::string out;
  out += "command = " + command + "\n";
  out += "config_hash = " + hex(config_hash) + "\n";
  out += "seed = " + (seed ? std::to_string(*seed) : std::string("none")) + "\n";
  out += "tool_version = " + tool_version + "\n";
  for (const auto& [name, h] : outputs) out += "output = " + name + " " + hex(h) + "\n";
  return out;
}

}  // namespace ep3
