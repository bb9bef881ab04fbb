#include "reoica/signals.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace reoica {

namespace {

constexpr Index kTransient = 1000;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> laplace(Index T, std::mt19937_64& rng) {
  std::vector<double> out(static_cast<std::size_t>(T));
  for (auto& v : out) {
    // inverse CDF of the unit-scale Laplace distribution
    double u = uniform(rng, -0.5, 0.5);
    while (std::abs(u) >= 0.5) u = uniform(rng, -0.5, 0.5);
    v = -std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
  }
  return out;
}

std::vector<double> square(Index T, std::mt19937_64& rng) {
  const auto phase = std::uniform_int_distribution<Index>(0, kWavePeriod - 1)(rng);
  std::vector<double> out(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) {
    const Index k = (t + phase) % kWavePeriod;
    out[static_cast<std::size_t>(t)] = k < kWavePeriod / 2 ? 1.0 : -1.0;
  }
  return out;
}

std::vector<double> sawtooth(Index T, std::mt19937_64& rng) {
  const auto phase = std::uniform_int_distribution<Index>(0, kWavePeriod - 1)(rng);
  std::vector<double> out(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) {
    const Index k = (t + phase) % kWavePeriod;
    out[static_cast<std::size_t>(t)] =
        2.0 * static_cast<double>(k) / static_cast<double>(kWavePeriod) - 1.0;
  }
  return out;
}

}  // namespace

SourceKind parse_source_kind(std::string_view name) {
  if (name == "lorenz") return SourceKind::lorenz;
  if (name == "mackey_glass") return SourceKind::mackey_glass;
  if (name == "chirp") return SourceKind::chirp;
  if (name == "laplace") return SourceKind::laplace;
  if (name == "square") return SourceKind::square;
  if (name == "sawtooth") return SourceKind::sawtooth;
  throw ConfigError("unknown source kind '" + std::string(name) + "'");
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::lorenz: return "lorenz";
    case SourceKind::mackey_glass: return "mackey_glass";
    case SourceKind::chirp: return "chirp";
    case SourceKind::laplace: return "laplace";
    case SourceKind::square: return "square";
    case SourceKind::sawtooth: return "sawtooth";
  }
  return "unknown";
}

std::vector<double> standardize(std::span<const double> series) {
  if (series.size() < 2) throw DataError("standardize: need at least 2 samples");
  const double count = static_cast<double>(series.size());
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= count;
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= count;
  if (!(var > 0.0) || !std::isfinite(var)) {
    throw DataError("standardize: degenerate signal (zero variance)");
  }
  const double inv_std = 1.0 / std::sqrt(var);
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) out[i] = (series[i] - mean) * inv_std;
  return out;
}

std::vector<double> lorenz_x(Index T, std::uint64_t seed) {
  constexpr double sigma = 10.0;
  constexpr double rho = 28.0;
  constexpr double beta = 8.0 / 3.0;
  constexpr double h = 0.01;
  using State = std::array<double, 3>;
  const auto deriv = [](const State& s) -> State {
    return {sigma * (s[1] - s[0]), s[0] * (rho - s[2]) - s[1], s[0] * s[1] - beta * s[2]};
  };
  const auto axpy = [](const State& s, const State& k, double a) -> State {
    return {s[0] + a * k[0], s[1] + a * k[1], s[2] + a * k[2]};
  };

  std::mt19937_64 rng(seed);
  State s{1.0 + uniform(rng, -1.0, 1.0), 1.0 + uniform(rng, -1.0, 1.0),
          1.0 + uniform(rng, -1.0, 1.0)};
  std::vector<double> out(static_cast<std::size_t>(T));
  for (Index step = 0; step < kTransient + T; ++step) {
    const State k1 = deriv(s);
    const State k2 = deriv(axpy(s, k1, h / 2));
    const State k3 = deriv(axpy(s, k2, h / 2));
    const State k4 = deriv(axpy(s, k3, h));
    for (int i = 0; i < 3; ++i) s[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    if (step >= kTransient) out[static_cast<std::size_t>(step - kTransient)] = s[0];
  }
  return out;
}

std::vector<double> mackey_glass(Index T, std::uint64_t seed) {
  if (T < kMackeyGlassDelay) {
    throw ConfigError("mackey_glass: T must cover at least one delay line (" +
                      std::to_string(kMackeyGlassDelay) + " samples)");
  }
  constexpr double h = 0.1;
  constexpr double beta = 0.2;
  constexpr double gamma = 0.1;
  constexpr double power = 10.0;
  // The history is the canonical constant 1.2; per-seed variety comes from a
  // random extra burn-in that shifts the observed segment along the attractor.
  std::mt19937_64 rng(seed);
  const Index offset = std::uniform_int_distribution<Index>(0, 4999)(rng);
  const Index skip = kTransient + offset;

  std::vector<double> ring(static_cast<std::size_t>(kMackeyGlassDelay), 1.2);
  std::size_t head = 0;  // slot holding x(t - tau)
  double x = 1.2;
  std::vector<double> out(static_cast<std::size_t>(T));
  for (Index step = 0; step < skip + T; ++step) {
    const double delayed = ring[head];
    const double next = x + h * (beta * delayed / (1.0 + std::pow(delayed, power)) - gamma * x);
    ring[head] = x;
    head = (head + 1) % ring.size();
    x = next;
    if (step >= skip) out[static_cast<std::size_t>(step - skip)] = x;
  }
  return out;
}

std::vector<double> chirp(Index T, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index start = std::uniform_int_distribution<Index>(0, kChirpPeriod - 1)(rng);
  const double sweep_s = static_cast<double>(kChirpPeriod) / kSampleRate;
  const double slope = (kChirpHighHz - kChirpLowHz) / sweep_s;
  std::vector<double> out(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) {
    const double tau = static_cast<double>((t + start) % kChirpPeriod) / kSampleRate;
    const double phase = 2.0 * std::numbers::pi * (kChirpLowHz * tau + 0.5 * slope * tau * tau);
    out[static_cast<std::size_t>(t)] = std::sin(phase);
  }
  return out;
}

SourceMatrix generate_sources(std::span<const SourceKind> kinds, Index T,
                              std::uint64_t seed) {
  if (kinds.empty()) throw ConfigError("generate_sources: empty source kind set");
  if (T < 2) throw ConfigError("generate_sources: T must be at least 2");

  SourceMatrix out;
  out.kinds.assign(kinds.begin(), kinds.end());
  out.data.resize(static_cast<Index>(kinds.size()), T);
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const std::uint64_t row_seed = derive_seed(seed, i, to_string(kinds[i]));
    std::mt19937_64 rng(row_seed);
    std::vector<double> raw;
    switch (kinds[i]) {
      case SourceKind::lorenz: raw = lorenz_x(T, row_seed); break;
      case SourceKind::mackey_glass: raw = mackey_glass(T, row_seed); break;
      case SourceKind::chirp: raw = chirp(T, row_seed); break;
      case SourceKind::laplace: raw = laplace(T, rng); break;
      case SourceKind::square: raw = square(T, rng); break;
      case SourceKind::sawtooth: raw = sawtooth(T, rng); break;
    }
    const auto row = standardize(raw);
    out.data.row(static_cast<Index>(i)) = Eigen::Map<const Vector>(row.data(), T).transpose();
  }
  return out;
}

}  // namespace reoica
