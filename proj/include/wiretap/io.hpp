#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wiretap/channel.hpp"
#include "wiretap/dmc.hpp"

namespace wiretap {

/// One meaningful `key = value` line of a config or descriptor file.
struct ConfigLine {
  int number = 0;  // 1-based line number in the file
  std::string key;
  std::string value;
};

/// Reads every `key = value` line of a file, dropping blanks and '#'
/// comments. Throws ParseError on unreadable files or malformed lines.
std::vector<ConfigLine> read_config_lines(const std::string& path);

/// Parses a distribution descriptor file. Schema (one `key = value` per
/// line, '#' comments):
///   kind = rayleigh-unit
///   kind = rayleigh          with  scale = <mean g1> <mean g2>
///   kind = finite-mass       with  mass = <|h1|^2> <|h2|^2> <prob>  (one per line)
///                            and optionally  noise = <mu^2> <nu^2>
/// finite-mass rows are normalized by the noise powers: g1 = |h1|^2/mu^2,
/// g2 = |h2|^2/nu^2. Scaled rayleigh maps onto an external sampler drawing
/// Exp(mean) gains from the same counter stream as rayleigh-unit.
FadingDistribution parse_distribution(const std::string& path);

/// Canonical text form of a distribution; parse(serialize(d)) round-trips
/// finite-mass laws exactly (values printed with 17 significant digits).
/// External samplers are represented by their id only and cannot be
/// re-parsed, except for the scaled-rayleigh samplers made by
/// parse_distribution.
std::string serialize_distribution(const FadingDistribution& dist);

/// Parses a parallel DMC description: blocks of whitespace-separated
/// numeric rows, blank-line separated, '#' comments; consecutive blocks pair
/// up as (Y matrix, Z matrix) per subchannel. Rows of a block must have
/// equal width, paired blocks equal row count, and every row must sum to one
/// within 1e-12 — violations throw ParseError naming path and line.
std::vector<DmcWiretap> parse_dmc_channels(const std::string& path);

/// One row of an experiment curve, keyed by SNR point and policy name.
struct CurveRow {
  double snr_db = 0.0;
  std::string policy;            // "optimal" | "uniform" | "water-filling"
  double rate = 0.0;             // bits per channel use
  double error = 0.0;            // Monte Carlo standard error (0 if exact)
  bool has_lambda = false;       // false for uniform and no-secrecy rows
  double lambda = 0.0;
  double avg_power_residual = 0.0;
};

/// Serializes curve rows as CSV with a fixed header
/// (snr_db,policy,rate_bits_per_use,error_bound,lambda,avg_power_residual);
/// numbers are printed with 12 significant digits, missing lambdas as empty
/// fields.
std::string curve_csv(const std::vector<CurveRow>& rows);

struct SurfaceRow {
  double g1 = 0.0;
  double g2 = 0.0;
  double power = 0.0;
};

/// CSV with header g1,g2,power, 12 significant digits.
std::string surface_csv(const std::vector<SurfaceRow>& rows);

struct AllocationRow {
  double g1 = 0.0;
  double g2 = 0.0;
  double weight = 0.0;
  double power = 0.0;
  double rate = 0.0;
};

/// CSV with header g1,g2,weight,power,rate_bits_per_use, 12 significant digits.
std::string allocation_csv(const std::vector<AllocationRow>& rows);

/// 64-bit FNV-1a over a byte string; used for config identity hashes.
std::uint64_t fnv1a64(const std::string& bytes);

/// Writes `content` to `path` byte-for-byte and a sidecar `<path>.meta`
/// recording the config hash (16 hex digits), seed, sample count, and
/// library version.
void write_with_metadata(const std::string& path, const std::string& content,
                         std::uint64_t config_hash, std::uint64_t seed,
                         Eigen::Index samples);

}  // namespace wiretap
