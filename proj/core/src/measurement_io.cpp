#include <fstream>
#include <iomanip>
#include <sstream>

#include "fdtrfit/error.hpp"
#include "fdtrfit/objective.hpp"

namespace fdtrfit {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

MeasurementSet read_measurement_csv(const std::filesystem::path& path, const SpotConfig& spot,
                                    double noise_sigma_deg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open measurement file " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "frequency_hz,phase_deg") {
    throw ConfigError(path.string() + ": expected header 'frequency_hz,phase_deg'");
  }
  std::vector<double> freqs, phases;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
    }
    try {
      std::size_t used = 0;
      const std::string a = trim(line.substr(0, comma));
      const std::string b = trim(line.substr(comma + 1));
      freqs.push_back(std::stod(a, &used));
      if (used != a.size()) throw std::invalid_argument(a);
      phases.push_back(std::stod(b, &used));
      if (used != b.size()) throw std::invalid_argument(b);
    } catch (const std::logic_error&) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  MeasurementSet set;
  try {
    set = MeasurementSet{spot, FrequencyGrid(std::move(freqs)), std::move(phases), noise_sigma_deg};
    set.validate();
  } catch (const ContractError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return set;
}

void write_measurement_csv(const std::filesystem::path& path, const MeasurementSet& set) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "frequency_hz,phase_deg\n" << std::setprecision(17);
  for (std::size_t i = 0; i < set.grid.size(); ++i) {
    out << set.grid[i] << ',' << set.phase_deg[i] << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace fdtrfit
