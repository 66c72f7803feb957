#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "pspm/raster.hpp"
#include "pspm/weights.hpp"

namespace pspm {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Sparse raster text: header "N T", then one line per neuron listing its
// spike timesteps in increasing order (blank for a silent neuron).
void write_raster(std::ostream& os, const Raster& r);
Raster read_raster(std::istream& is);
void write_raster(const std::filesystem::path& path, const Raster& r);
Raster read_raster(const std::filesystem::path& path);

// Dense CSV: one header row of E/I per column, then N rows of N values (volts).
void write_weights(std::ostream& os, const WeightMatrix& w);
WeightMatrix read_weights(std::istream& is);
void write_weights(const std::filesystem::path& path, const WeightMatrix& w);
WeightMatrix read_weights(const std::filesystem::path& path);

/// Shortest round-trippable decimal form of a double.
std::string format_double(double v);

}  // namespace pspm
