#pragma once

#include <cstdint>

namespace combosim {

/// Simulation time in integer picoseconds. 64 bits cover > 10^6 s, and
/// integer arithmetic makes simultaneity and interval ties exact and
/// platform independent.
using Picos = std::int64_t;

constexpr Picos kPsPerNs = 1'000;
constexpr Picos kPsPerUs = 1'000'000;
constexpr Picos kPsPerMs = 1'000'000'000;
constexpr Picos kPsPerSec = 1'000'000'000'000;

constexpr double ps_to_sec(Picos t) { return static_cast<double>(t) * 1e-12; }
constexpr Picos sec_to_ps(double s) { return static_cast<Picos>(s * 1e12); }

enum class Channel : std::uint8_t { D0 = 0, D1 = 1 };

enum class ArrivalKind : std::uint8_t { Photon = 0, Injection = 1 };

/// A light pulse (real photon or injected fake) arriving at a detector.
struct ArrivalEvent {
  Picos time = 0;
  ArrivalKind kind = ArrivalKind::Photon;

  friend bool operator==(const ArrivalEvent&, const ArrivalEvent&) = default;
};

enum class Origin : std::uint8_t { Photon = 0, Afterpulse = 1, Injection = 2 };

/// An output pulse of a detector: the simulator's atom.
struct DetectionEvent {
  Picos time = 0;
  Channel channel = Channel::D0;
  Origin origin = Origin::Photon;

  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

}  // namespace combosim
