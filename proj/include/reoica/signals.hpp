#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reoica/common.hpp"

namespace reoica {

enum class SourceKind { lorenz, mackey_glass, chirp, laplace, square, sawtooth };

SourceKind parse_source_kind(std::string_view name);
std::string_view to_string(SourceKind kind);

/// Sample rate assumed by the continuous-time generators (Hz).
inline constexpr double kSampleRate = 100.0;
/// Chirp sweep: 0.5 Hz to 5 Hz over 10 s, tiled.
inline constexpr double kChirpLowHz = 0.5;
inline constexpr double kChirpHighHz = 5.0;
inline constexpr Index kChirpPeriod = 1000;
/// Period of the square and sawtooth waves, in samples.
inline constexpr Index kWavePeriod = 200;
/// Mackey-Glass delay line length (tau = 17 at Euler step 0.1).
inline constexpr Index kMackeyGlassDelay = 170;

/// n x T standardized sources, one row per kind.
struct SourceMatrix {
  Matrix data;
  std::vector<SourceKind> kinds;

  Index rows() const { return data.rows(); }
  Index sample_count() const { return data.cols(); }
};

/// Zero mean, unit population variance. Throws DataError on constant input.
std::vector<double> standardize(std::span<const double> series);

/// Raw (unstandardized) generators. Exposed for tests.
std::vector<double> lorenz_x(Index T, std::uint64_t seed);
std::vector<double> mackey_glass(Index T, std::uint64_t seed);
std::vector<double> chirp(Index T, std::uint64_t seed);

SourceMatrix generate_sources(std::span<const SourceKind> kinds, Index T,
                              std::uint64_t seed);

}  // namespace reoica
