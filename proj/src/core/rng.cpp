#include "aiedet/rng.hpp"

namespace aiedet {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

PhiloxEngine::PhiloxEngine(std::uint64_t seed, std::uint64_t stream_hi, std::uint32_t stream_lo)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      ctr_{0u, stream_lo, static_cast<std::uint32_t>(stream_hi),
           static_cast<std::uint32_t>(stream_hi >> 32)} {}

PhiloxEngine::result_type PhiloxEngine::operator()() {
  if (used_ == 2) {
    block_ = Philox4x32::apply(ctr_, key_);
    ++ctr_[0];
    used_ = 0;
  }
  const int i = 2 * used_++;
  return (static_cast<std::uint64_t>(block_[i + 1]) << 32) | block_[i];
}

PhiloxEngine RngRoot::engine(std::uint64_t trial, StreamRole role) const {
  const auto channel =
      (static_cast<std::uint32_t>(purpose) << 8) | static_cast<std::uint32_t>(role);
  return PhiloxEngine(seed, trial, channel);
}

TrialStreams TrialStreams::make(const RngRoot& root, std::uint64_t trial) {
  return TrialStreams{root.engine(trial, StreamRole::Texture),
                      root.engine(trial, StreamRole::Speckle),
                      root.engine(trial, StreamRole::Phase)};
}

}  // namespace aiedet
