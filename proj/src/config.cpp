#include <fstream>
#include <sstream>

#include "rsloc/harness.hpp"

namespace rsloc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: invalid number for '" + key + "': " + value);
  }
}

long to_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: invalid integer for '" + key + "': " + value);
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: invalid boolean for '" + key + "': " + value);
}

std::vector<double> to_doubles(const std::string& key,
                               const std::string& value) {
  std::vector<double> out;
  std::istringstream ss(value);
  std::string tok;
  while (ss >> tok) out.push_back(to_double(key, tok));
  return out;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig sc = default_scenario();
  std::vector<StripePose> custom_stripes;
  bool spacing_given = false;
  double spacing = 0.0;
  int antennas = 0;

  std::string section;
  std::istringstream stream(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config: malformed section at line " +
                          std::to_string(lineno));
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected key=value at line " +
                        std::to_string(lineno));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;

    if (full == "scenario.seed") {
      sc.seed = static_cast<std::uint64_t>(to_int(full, value));
    } else if (full == "scenario.transmit_power") {
      sc.transmit_power = to_double(full, value);
    } else if (full == "scenario.noise_temperature") {
      sc.noise_temperature = to_double(full, value);
    } else if (full == "scenario.noiseless") {
      sc.noiseless = to_bool(full, value);
    } else if (full == "dmc.dnr_db") {
      sc.dnr_db = to_double(full, value);
    } else if (full == "dmc.enabled") {
      sc.dmc_enabled = to_bool(full, value);
    } else if (full == "dmc.decay_distance") {
      sc.dmc_decay_distance = to_double(full, value);
    } else if (full == "dmc.onset_excess") {
      sc.dmc_onset_excess = to_double(full, value);
    } else if (full == "ue.position") {
      const auto v = to_doubles(full, value);
      if (v.size() != 3) throw ConfigError("config: ue.position needs x y z");
      sc.ue.position = Vector3d(v[0], v[1], v[2]);
    } else if (full == "ue.clock_offset") {
      sc.ue.clock_offset = to_double(full, value);
    } else if (full == "ue.phase_offset") {
      sc.ue.phase_offset = wrap_phase(to_double(full, value));
    } else if (full == "ofdm.carrier_freq") {
      sc.ofdm.carrier_freq = to_double(full, value);
    } else if (full == "ofdm.bandwidth") {
      sc.ofdm.bandwidth = to_double(full, value);
    } else if (full == "ofdm.subcarriers") {
      const long k = to_int(full, value);
      if (k < 1) throw ConfigError("config: ofdm.subcarriers must be >= 1");
      sc.ofdm.subcarrier_count = static_cast<int>(k);
      sc.ofdm.pilots = VectorXcd::Ones(k);
    } else if (full == "stripes.stripe") {
      const auto v = to_doubles(full, value);
      if (v.size() != 4) {
        throw ConfigError("config: stripes.stripe needs x y z orientation");
      }
      StripePose s;
      s.position = Vector3d(v[0], v[1], v[2]);
      s.orientation = wrap_phase(v[3]);
      custom_stripes.push_back(s);
    } else if (full == "stripes.antennas") {
      const long m = to_int(full, value);
      if (m < 1) throw ConfigError("config: stripes.antennas must be >= 1");
      antennas = static_cast<int>(m);
    } else if (full == "stripes.spacing") {
      spacing = to_double(full, value);
      spacing_given = true;
      if (spacing <= 0.0) throw ConfigError("config: stripes.spacing must be > 0");
    } else {
      throw ConfigError("config: unknown key '" + full + "' at line " +
                        std::to_string(lineno));
    }
  }

  if (!custom_stripes.empty()) sc.stripes = custom_stripes;
  for (StripePose& s : sc.stripes) {
    if (antennas > 0) s.antenna_count = antennas;
    // default element spacing tracks lambda/2 for the configured carrier
    s.element_spacing =
        spacing_given ? spacing : sc.ofdm.wavelength() / 2.0;
  }
  if (sc.stripes.empty()) throw ConfigError("config: no stripes defined");
  if (sc.ofdm.bandwidth <= 0.0 || sc.transmit_power <= 0.0) {
    throw ConfigError("config: bandwidth and transmit_power must be positive");
  }
  return sc;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("config: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace rsloc
