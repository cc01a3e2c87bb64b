#include "mflab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace mflab::config {

const std::map<std::string, std::vector<std::string>>& schema() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"experiment", {"kind", "out", "seeds", "workers"}},
      {"graph",
       {"family", "n", "sizes", "q", "q_exponent", "symmetric", "degree", "alpha", "p", "path",
        "seed"}},
      {"model",
       {"kind", "coupling", "sigma", "drift_sine", "delta", "frequencies", "amplitudes", "phases",
        "weights", "bound_rate"}},
      {"initial", {"phase", "at", "mean", "spread"}},
      {"sim", {"dt", "t_final", "record_every", "checkpoints"}},
      {"fokker_planck",
       {"k_max", "dt", "t_final", "perturbation", "fit_modes", "couplings", "profile_points",
        "relax_time"}},
      {"linearized", {"paths", "N", "t_final", "dt"}},
      {"degree_tails", {"rows", "draws", "epsilon", "symmetric"}},
      {"thresholds",
       {"crossing_level", "crossing_min", "crossing_max", "dbl_max", "clique_r_fraction",
        "clique_success", "global_below", "ratio_low", "ratio_high", "rate_rel_tol",
        "linearized_rel_tol", "residual_max"}},
  };
  return keys;
}

namespace {

bool known(const std::string& section, const std::string& key) {
  const auto it = schema().find(section);
  if (it == schema().end()) return false;
  return std::find(it->second.begin(), it->second.end(), key) != it->second.end();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view text, const std::string& where) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v)) {
    throw ConfigError(where + ": expected a number, got '" + t + "'");
  }
  return v;
}

std::int64_t to_integer(std::string_view text, const std::string& where) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(where + ": expected an integer, got '" + t + "'");
  }
  return v;
}

std::uint64_t to_unsigned(std::string_view text, const std::string& where) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(where + ": expected a non-negative integer, got '" + t + "'");
  }
  return v;
}

}  // namespace

std::vector<std::uint64_t> SeedRange::list() const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = first;; ++s) {
    out.push_back(s);
    if (s == last) break;
  }
  return out;
}

SeedRange parse_seeds(std::string_view text) {
  const auto dots = text.find("..");
  SeedRange range;
  if (dots == std::string_view::npos) {
    range.first = range.last = to_unsigned(text, "seeds");
  } else {
    range.first = to_unsigned(text.substr(0, dots), "seeds");
    range.last = to_unsigned(text.substr(dots + 2), "seeds");
  }
  if (range.last < range.first) throw ConfigError("seeds: empty range '" + std::string(text) + "'");
  if (range.last - range.first >= 1000000) throw ConfigError("seeds: range too large");
  return range;
}

Config Config::parse(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Config cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config: key '" + section + "' outside of a section");
    }
    if (!schema().contains(section)) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) cfg.set(section, key, trim(value.data()));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  return parse(in);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!known(section, key)) throw ConfigError("config: unknown key " + section + "." + key);
  values_[section][key] = value;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto it = values_.find(section);
  return it != values_.end() && it->second.contains(key);
}

const std::string& Config::resolve(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  if (!known(section, key)) throw ConfigError("config: unknown key " + section + "." + key);
  auto& slot = resolved_[section][key];
  const auto it = values_.find(section);
  if (it != values_.end()) {
    const auto kv = it->second.find(key);
    if (kv != it->second.end()) {
      slot = kv->second;
      return slot;
    }
  }
  slot = fallback;
  return slot;
}

std::string Config::text(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
  return resolve(section, key, fallback);
}

double Config::number(const std::string& section, const std::string& key, double fallback) const {
  std::ostringstream os;
  os.precision(17);
  os << fallback;
  return to_double(resolve(section, key, os.str()), section + "." + key);
}

std::int64_t Config::integer(const std::string& section, const std::string& key,
                             std::int64_t fallback) const {
  return to_integer(resolve(section, key, std::to_string(fallback)), section + "." + key);
}

std::size_t Config::count(const std::string& section, const std::string& key,
                          std::size_t fallback) const {
  const auto v = integer(section, key, static_cast<std::int64_t>(fallback));
  if (v < 0) throw ConfigError(section + "." + key + ": must be non-negative");
  return static_cast<std::size_t>(v);
}

bool Config::flag(const std::string& section, const std::string& key, bool fallback) const {
  const std::string v = resolve(section, key, fallback ? "true" : "false");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(section + "." + key + ": expected true or false, got '" + v + "'");
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    const std::string& fallback) const {
  const std::string v = resolve(section, key, fallback);
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const auto comma = v.find(',', start);
    const auto end = comma == std::string::npos ? v.size() : comma;
    out.push_back(to_double(std::string_view(v).substr(start, end - start), section + "." + key));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

SeedRange Config::seeds(const std::string& fallback) const {
  return parse_seeds(resolve("experiment", "seeds", fallback));
}

std::string Config::canonical() const {
  Table merged = resolved_;
  for (const auto& [section, body] : values_) {
    for (const auto& [key, value] : body) merged[section][key] = value;
  }
  std::string out;
  for (const auto& [section, body] : merged) {
    for (const auto& [key, value] : body) {
      // Where results go and how many threads compute them do not change them.
      if (section == "experiment" && (key == "out" || key == "workers")) continue;
      out += section + "." + key + " = " + value + "\n";
    }
  }
  return out;
}

std::string Config::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mflab::config
