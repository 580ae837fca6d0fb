#pragma once

// Counter-based random streams. Every trial of every experiment owns
// independent substreams addressed by (seed, purpose, trial, role), so trial
// results never depend on execution order or worker count.

#include <array>
#include <cstdint>
#include <limits>

namespace aiedet {

/// Philox4x32-10 block bijection (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter apply(Counter ctr, Key key);
};

/// Which experiment phase a stream feeds. Distinct purposes never share
/// random numbers, e.g. a fresh H0 validation run is independent of the
/// calibration run with the same seed.
enum class StreamPurpose : std::uint32_t {
  Calibration = 1,
  Detection = 2,
  CfarSweep = 3,
  Validation = 4,
  Fixture = 5,
  Test = 6,
};

enum class StreamRole : std::uint32_t {
  Texture = 1,
  Speckle = 2,
  Phase = 3,
};

/// UniformRandomBitGenerator over one Philox stream. Each 128-bit block
/// yields two 64-bit outputs; the block counter is the low counter word.
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;

  PhiloxEngine(std::uint64_t seed, std::uint64_t stream_hi, std::uint32_t stream_lo);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

 private:
  Philox4x32::Key key_;
  Philox4x32::Counter ctr_;
  Philox4x32::Counter block_{};
  int used_ = 2;
};

struct RngRoot {
  std::uint64_t seed = 0;
  StreamPurpose purpose = StreamPurpose::Calibration;

  RngRoot with(StreamPurpose p) const { return RngRoot{seed, p}; }
  PhiloxEngine engine(std::uint64_t trial, StreamRole role) const;
};

/// The three substreams one synthetic dataset draws from.
struct TrialStreams {
  PhiloxEngine texture;
  PhiloxEngine speckle;
  PhiloxEngine phase;

  static TrialStreams make(const RngRoot& root, std::uint64_t trial);
};

}  // namespace aiedet
