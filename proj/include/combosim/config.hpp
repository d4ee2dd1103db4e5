#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "combosim/events.hpp"

namespace combosim {

/// Flat `key = value` configuration text: one pair per line, '#' comments,
/// durations accept ps/ns/us/ms/s suffixes and rates accept cps/kcps/Mcps
/// (or Hz/kHz/MHz). Unknown keys are detected by the consumer, which knows
/// the schema.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  /// Typed getters; each throws a diagnostic naming the offending key on a
  /// malformed value and returns fallback when the key is absent.
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  Picos get_duration_ps(const std::string& key, Picos fallback) const;
  double get_rate_hz(const std::string& key, double fallback) const;

  void set(const std::string& key, const std::string& value);

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// "17.6ns" -> picoseconds. A bare number is already picoseconds.
Picos parse_duration_ps(const std::string& text, const std::string& key);

/// "10Mcps" / "4.5MHz" / plain Hz -> events per second.
double parse_rate_hz(const std::string& text, const std::string& key);

std::string format_duration_ps(Picos ps);

}  // namespace combosim
