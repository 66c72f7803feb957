#include "pspm/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace pspm {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_number(std::string_view tok, T& out) {
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_raster(std::ostream& os, const Raster& r) {
  os << r.n_neurons() << ' ' << r.n_steps() << '\n';
  for (std::size_t i = 0; i < r.n_neurons(); ++i) {
    bool first = true;
    const auto row = r.row(i);
    for (std::size_t t = 0; t < r.n_steps(); ++t) {
      if (!row[t]) continue;
      if (!first) os << ' ';
      os << t;
      first = false;
    }
    os << '\n';
  }
}

Raster read_raster(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(1, "missing header");
  std::istringstream header(line);
  std::size_t n = 0, t = 0;
  std::string extra;
  if (!(header >> n >> t) || (header >> extra) || n == 0 || t == 0) {
    throw ParseError(1, "header must be two positive integers 'N T'");
  }
  Raster r(n, t);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lineno = i + 2;
    if (!std::getline(is, line)) {
      throw ParseError(lineno, "truncated: expected " + std::to_string(n) + " neuron lines, found " + std::to_string(i));
    }
    long long prev = -1;
    std::istringstream fields(line);
    std::string tok;
    while (fields >> tok) {
      long long step = 0;
      if (!parse_number(std::string_view(tok), step)) throw ParseError(lineno, "bad spike time '" + tok + "'");
      if (step < 0 || static_cast<std::size_t>(step) >= t) {
        throw ParseError(lineno, "spike time " + tok + " outside [0, " + std::to_string(t) + ")");
      }
      if (step <= prev) throw ParseError(lineno, "spike times not strictly increasing");
      prev = step;
      r.set(i, static_cast<std::size_t>(step));
    }
  }
  std::size_t lineno = n + 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!trim(line).empty()) throw ParseError(lineno, "unexpected content after the last neuron line");
  }
  return r;
}

void write_raster(const std::filesystem::path& path, const Raster& r) {
  auto out = open_out(path);
  write_raster(out, r);
}

Raster read_raster(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_raster(in);
}

void write_weights(std::ostream& os, const WeightMatrix& w) {
  const std::size_t n = w.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (j) os << ',';
    os << (w.neuron_class(j) == NeuronClass::excitatory ? 'E' : 'I');
  }
  os << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) os << ',';
      os << format_double(w(i, j));
    }
    os << '\n';
  }
}

WeightMatrix read_weights(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(1, "missing class header");
  std::vector<NeuronClass> classes;
  for (auto tok : split(trim(line), ',')) {
    tok = trim(tok);
    if (tok == "E") classes.push_back(NeuronClass::excitatory);
    else if (tok == "I") classes.push_back(NeuronClass::inhibitory);
    else throw ParseError(1, "class header entries must be E or I");
  }
  const std::size_t n = classes.size();
  std::vector<double> dense;
  dense.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lineno = i + 2;
    if (!std::getline(is, line)) throw ParseError(lineno, "truncated: expected " + std::to_string(n) + " rows");
    const auto cells = split(trim(line), ',');
    if (cells.size() != n) {
      throw ParseError(lineno, "expected " + std::to_string(n) + " columns, got " + std::to_string(cells.size()));
    }
    for (auto c : cells) {
      double v = 0;
      if (!parse_number(trim(c), v)) throw ParseError(lineno, "bad number '" + std::string(c) + "'");
      dense.push_back(v);
    }
  }
  try {
    return WeightMatrix(std::move(classes), std::move(dense));
  } catch (const SignViolation& e) {
    throw ParseError(1, std::string("invalid weights: ") + e.what());
  }
}

void write_weights(const std::filesystem::path& path, const WeightMatrix& w) {
  auto out = open_out(path);
  write_weights(out, w);
}

WeightMatrix read_weights(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_weights(in);
}

}  // namespace pspm
