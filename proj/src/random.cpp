#include "perishfair/random.hpp"

#include "perishfair/error.hpp"

namespace perishfair {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSchedule: return "InvalidSchedule";
    case ErrorCode::kMissingPath: return "MissingPath";
    case ErrorCode::kInvalidDelta: return "InvalidDelta";
    case ErrorCode::kInvalidMean: return "InvalidMean";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kOverdraw: return "Overdraw";
    case ErrorCode::kDataIntegrity: return "DataIntegrity";
    case ErrorCode::kUnknownInstance: return "UnknownInstance";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Error";
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t replication) noexcept {
  return mix64(mix64(base_seed) ^ mix64(replication + 1));
}

std::uint64_t stream_seed(std::uint64_t seed, Stream stream) noexcept {
  return mix64(seed ^ mix64(0xd1b54a32d192ed03ULL * static_cast<std::uint64_t>(stream)));
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace perishfair
