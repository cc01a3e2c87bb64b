#pragma once
// Experiment configuration: an INI file with a fixed set of sections and
// keys. Unknown sections or keys are rejected. Runners look values up with
// a fallback; every value read is remembered so the hash and the report
// describe the configuration that was actually used.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mflab::config {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inclusive seed range written "a..b" (or a single integer).
struct SeedRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
  std::vector<std::uint64_t> list() const;
};

SeedRange parse_seeds(std::string_view text);

using Table = std::map<std::string, std::map<std::string, std::string>>;

class Config {
 public:
  Config() = default;
  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& path);

  /// Rejects unknown section/key pairs.
  void set(const std::string& section, const std::string& key, const std::string& value);
  bool has(const std::string& section, const std::string& key) const;

  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  std::size_t count(const std::string& section, const std::string& key,
                    std::size_t fallback) const;
  bool flag(const std::string& section, const std::string& key, bool fallback) const;
  /// Comma-separated numbers.
  std::vector<double> numbers(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
  SeedRange seeds(const std::string& fallback) const;

  /// Sorted "section.key = value" lines of explicit and resolved values,
  /// leaving out experiment.out and experiment.workers.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
  const Table& explicit_values() const { return values_; }

 private:
  const std::string& resolve(const std::string& section, const std::string& key,
                             const std::string& fallback) const;

  Table values_;
  mutable Table resolved_;
};

/// Known keys per section.
const std::map<std::string, std::vector<std::string>>& schema();

}  // namespace mflab::config
