#include "combosim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace combosim {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw std::invalid_argument("config key '" + key + "': cannot parse '" +
                              value + "' as " + expected);
}

// Splits "17.6ns" into the numeric prefix and the suffix.
std::pair<double, std::string> split_number(const std::string& text,
                                            const std::string& key,
                                            const std::string& expected) {
  std::size_t pos = 0;
  double number = 0.0;
  try {
    number = std::stod(text, &pos);
  } catch (const std::exception&) {
    bad_value(key, text, expected);
  }
  return {number, trim(text.substr(pos))};
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

Config Config::parse_string(const std::string& text) {
  Config config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key");
    config.values_[key] = value;
  }
  return config;
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) bad_value(key, it->second, "a number");
    return v;
  } catch (const std::invalid_argument&) {
    bad_value(key, it->second, "a number");
  }
}

std::uint64_t Config::get_u64(const std::string& key,
                              std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  // Accept scientific notation (e.g. 1e7) as long as it is integral.
  const double v = get_double(key, 0.0);
  if (v < 0 || v != std::floor(v) || v > 1.8e19)
    bad_value(key, it->second, "a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

Picos Config::get_duration_ps(const std::string& key, Picos fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return parse_duration_ps(it->second, key);
}

double Config::get_rate_hz(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return parse_rate_hz(it->second, key);
}

Picos parse_duration_ps(const std::string& text, const std::string& key) {
  const auto [number, unit] = split_number(text, key, "a duration");
  double scale = 1.0;
  if (unit.empty() || unit == "ps") scale = 1.0;
  else if (unit == "ns") scale = 1e3;
  else if (unit == "us") scale = 1e6;
  else if (unit == "ms") scale = 1e9;
  else if (unit == "s") scale = 1e12;
  else bad_value(key, text, "a duration (ps/ns/us/ms/s)");
  return static_cast<Picos>(std::llround(number * scale));
}

double parse_rate_hz(const std::string& text, const std::string& key) {
  const auto [number, unit] = split_number(text, key, "a rate");
  double scale = 1.0;
  if (unit.empty() || unit == "cps" || unit == "Hz") scale = 1.0;
  else if (unit == "kcps" || unit == "kHz") scale = 1e3;
  else if (unit == "Mcps" || unit == "MHz") scale = 1e6;
  else bad_value(key, text, "a rate (cps/kcps/Mcps or Hz/kHz/MHz)");
  return number * scale;
}

std::string format_duration_ps(Picos ps) {
  std::ostringstream out;
  if (ps != 0 && ps % kPsPerSec == 0) out << ps / kPsPerSec << "s";
  else if (ps != 0 && ps % kPsPerMs == 0) out << ps / kPsPerMs << "ms";
  else if (ps != 0 && ps % kPsPerUs == 0) out << ps / kPsPerUs << "us";
  else if (ps != 0 && ps % kPsPerNs == 0) out << ps / kPsPerNs << "ns";
  else out << ps << "ps";
  return out.str();
}

}  // namespace combosim
