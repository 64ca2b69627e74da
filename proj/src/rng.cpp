#include "pdmp/rng.hpp"

namespace pdmp {

namespace {

constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

double RngStream::uniform_open_closed() {
  return static_cast<double>((engine_() >> 11) + 1) * kTwoPowMinus53;
}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * kTwoPowMinus53; }

}  // namespace pdmp
