#include "wiretap/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "wiretap/errors.hpp"
#include "wiretap/numeric.hpp"
#include "wiretap/version.hpp"

namespace wiretap {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string strip_comment(const std::string& s) {
  const auto hash = s.find('#');
  return hash == std::string::npos ? s : s.substr(0, hash);
}

std::vector<double> parse_numbers(const std::string& path, int line, const std::string& text,
                                  int expected = -1) {
  std::istringstream in(text);
  std::vector<double> values;
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (!in.eof()) throw ParseError(path, line, "malformed number in `" + text + "`");
  if (expected >= 0 && static_cast<int>(values.size()) != expected) {
    throw ParseError(path, line, "expected " + std::to_string(expected) + " values, got " +
                                     std::to_string(values.size()));
  }
  return values;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ExternalSampler make_scaled_rayleigh(double scale1, double scale2) {
  ExternalSampler sampler;
  sampler.id = "rayleigh(scale=" + format_full(scale1) + "," + format_full(scale2) + ")";
  sampler.descriptor =
      "kind = rayleigh\nscale = " + format_full(scale1) + " " + format_full(scale2) + "\n";
  sampler.draw = [scale1, scale2](std::uint64_t seed, Eigen::Index index) {
    const auto base = static_cast<std::uint64_t>(2 * index);
    return ChannelState{-scale1 * std::log1p(-uniform01_at(seed, base)),
                        -scale2 * std::log1p(-uniform01_at(seed, base + 1))};
  };
  return sampler;
}

}  // namespace

std::vector<ConfigLine> read_config_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::vector<ConfigLine> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const std::string text = trim(strip_comment(raw));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(path, number, "expected `key = value`");
    ConfigLine line;
    line.number = number;
    line.key = trim(text.substr(0, eq));
    line.value = trim(text.substr(eq + 1));
    if (line.key.empty()) throw ParseError(path, number, "empty key");
    lines.push_back(std::move(line));
  }
  return lines;
}

FadingDistribution parse_distribution(const std::string& path) {
  const std::vector<ConfigLine> lines = read_config_lines(path);

  std::string kind;
  int kind_line = 0;
  std::vector<double> noise{1.0, 1.0};
  std::vector<double> scale;
  std::vector<std::vector<double>> mass_rows;
  std::vector<int> mass_lines;

  for (const ConfigLine& line : lines) {
    if (line.key == "kind") {
      if (!kind.empty()) throw ParseError(path, line.number, "duplicate `kind`");
      kind = line.value;
      kind_line = line.number;
    } else if (line.key == "noise") {
      noise = parse_numbers(path, line.number, line.value, 2);
    } else if (line.key == "scale") {
      scale = parse_numbers(path, line.number, line.value, 2);
    } else if (line.key == "mass") {
      mass_rows.push_back(parse_numbers(path, line.number, line.value, 3));
      mass_lines.push_back(line.number);
    } else {
      throw ParseError(path, line.number, "unknown key `" + line.key + "`");
    }
  }
  if (kind.empty()) throw ParseError(path, 0, "missing `kind`");

  if (kind == "rayleigh-unit") {
    if (!scale.empty() || !mass_rows.empty()) {
      throw ParseError(path, kind_line, "rayleigh-unit takes no scale or mass keys");
    }
    return RayleighUnit{};
  }

  if (kind == "rayleigh") {
    if (scale.size() != 2) throw ParseError(path, kind_line, "rayleigh needs `scale = s1 s2`");
    if (!(scale[0] > 0.0) || !(scale[1] > 0.0) || !std::isfinite(scale[0]) ||
        !std::isfinite(scale[1])) {
      throw ParseError(path, kind_line, "rayleigh scales must be positive and finite");
    }
    return make_scaled_rayleigh(scale[0], scale[1]);
  }

  if (kind == "finite-mass") {
    if (mass_rows.empty()) throw ParseError(path, kind_line, "finite-mass needs mass rows");
    if (!(noise[0] > 0.0) || !(noise[1] > 0.0)) {
      throw ParseError(path, kind_line, "noise powers must be positive");
    }
    FiniteMass mass;
    const auto n = static_cast<Eigen::Index>(mass_rows.size());
    mass.g1.resize(n);
    mass.g2.resize(n);
    mass.prob.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = mass_rows[static_cast<std::size_t>(i)];
      if (row[0] < 0.0 || row[1] < 0.0 || row[2] < 0.0) {
        throw ParseError(path, mass_lines[static_cast<std::size_t>(i)],
                         "mass entries must be nonnegative");
      }
      mass.g1[i] = row[0] / noise[0];
      mass.g2[i] = row[1] / noise[1];
      mass.prob[i] = row[2];
    }
    FadingDistribution dist = mass;
    validate(dist);  // InvalidDistribution on bad normalization
    return dist;
  }

  throw ParseError(path, kind_line, "unknown distribution kind `" + kind + "`");
}

std::string serialize_distribution(const FadingDistribution& dist) {
  if (std::holds_alternative<RayleighUnit>(dist)) return "kind = rayleigh-unit\n";
  if (const auto* mass = std::get_if<FiniteMass>(&dist)) {
    std::string out = "kind = finite-mass\n";
    for (Eigen::Index i = 0; i < mass->g1.size(); ++i) {
      out += "mass = " + format_full(mass->g1[i]) + " " + format_full(mass->g2[i]) + " " +
             format_full(mass->prob[i]) + "\n";
    }
    return out;
  }
  const auto& external = std::get<ExternalSampler>(dist);
  if (!external.descriptor.empty()) return external.descriptor;
  return "kind = external\nid = " + external.id + "\n";
}

std::vector<DmcWiretap> parse_dmc_channels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");

  std::vector<Eigen::MatrixXd> blocks;
  std::vector<int> block_lines;
  std::vector<std::vector<double>> rows;
  int row_width = -1;
  int first_row_line = 0;

  std::string raw;
  int number = 0;

  auto flush_block = [&]() {
    if (rows.empty()) return;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), row_width);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (int c = 0; c < row_width; ++c) {
        m(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
      }
    }
    blocks.push_back(std::move(m));
    block_lines.push_back(first_row_line);
    rows.clear();
    row_width = -1;
  };

  while (std::getline(in, raw)) {
    ++number;
    const std::string text = trim(strip_comment(raw));
    if (text.empty()) {
      flush_block();
      continue;
    }
    std::vector<double> row = parse_numbers(path, number, text);
    if (row.empty()) throw ParseError(path, number, "empty matrix row");
    if (row_width < 0) {
      row_width = static_cast<int>(row.size());
      first_row_line = number;
    } else if (static_cast<int>(row.size()) != row_width) {
      throw ParseError(path, number, "row width " + std::to_string(row.size()) +
                                         " does not match block width " +
                                         std::to_string(row_width));
    }
    double sum = 0.0;
    for (double v : row) {
      if (v < 0.0 || v > 1.0) throw ParseError(path, number, "entry outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ParseError(path, number,
                       "row sums to " + format_full(sum) + ", expected 1 within 1e-12");
    }
    rows.push_back(std::move(row));
  }
  flush_block();

  if (blocks.empty()) throw ParseError(path, 0, "no matrices found");
  if (blocks.size() % 2 != 0) {
    throw ParseError(path, block_lines.back(),
                     "matrices must come in (legitimate, eavesdropper) pairs; got " +
                         std::to_string(blocks.size()) + " blocks");
  }

  std::vector<DmcWiretap> channels;
  for (std::size_t b = 0; b < blocks.size(); b += 2) {
    if (blocks[b].rows() != blocks[b + 1].rows()) {
      throw ParseError(path, block_lines[b + 1],
                       "paired matrices disagree on the input alphabet size");
    }
    channels.push_back(DmcWiretap{blocks[b], blocks[b + 1]});
  }
  return channels;
}

namespace {

void append_row(std::string& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const std::string& f : fields) {
    if (!first) out += ',';
    out += f;
    first = false;
  }
  out += '\n';
}

}  // namespace

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = "snr_db,policy,rate_bits_per_use,error_bound,lambda,avg_power_residual\n";
  for (const CurveRow& row : rows) {
    append_row(out, {format_sig(row.snr_db), row.policy, format_sig(row.rate),
                     format_sig(row.error), row.has_lambda ? format_sig(row.lambda) : "",
                     format_sig(row.avg_power_residual)});
  }
  return out;
}

std::string surface_csv(const std::vector<SurfaceRow>& rows) {
  std::string out = "g1,g2,power\n";
  for (const SurfaceRow& row : rows) {
    append_row(out, {format_sig(row.g1), format_sig(row.g2), format_sig(row.power)});
  }
  return out;
}

std::string allocation_csv(const std::vector<AllocationRow>& rows) {
  std::string out = "g1,g2,weight,power,rate_bits_per_use\n";
  for (const AllocationRow& row : rows) {
    append_row(out, {format_sig(row.g1), format_sig(row.g2), format_sig(row.weight),
                     format_sig(row.power), format_sig(row.rate)});
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

void write_with_metadata(const std::string& path, const std::string& content,
                         std::uint64_t config_hash, std::uint64_t seed,
                         Eigen::Index samples) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
  }
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                static_cast<unsigned long long>(config_hash));
  std::ofstream meta(path + ".meta", std::ios::binary);
  if (!meta) throw std::runtime_error("cannot write " + path + ".meta");
  meta << "config_hash = " << hash_hex << "\n"
       << "seed = " << seed << "\n"
       << "samples = " << samples << "\n"
       << "version = " << kVersion << "\n";
}

}  // namespace wiretap
