// NOTE: this translation unit is compiled with -ffast-math (see CMakeLists)
// so that glibc's vector math declarations kick in for the logf/cosf/sinf
// loops below. Nothing here relies on NaN/Inf propagation.
#include "stelab/rng.hpp"

#include <cmath>

namespace stelab {

uint64_t derive_seed(uint64_t master, std::string_view purpose, uint64_t index) {
  // FNV-1a over the label folded into a splitmix chain with the master seed
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : purpose) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  uint64_t x = master;
  (void)splitmix64(x);
  x ^= h;
  (void)splitmix64(x);
  x ^= index * 0x9e3779b97f4a7c15ULL;
  return splitmix64(x);
}

double Rng::next_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = next_double();
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 6.283185307179586477 * u2;
  cached_ = r * std::sin(t);
  has_cached_ = true;
  return r * std::cos(t);
}

void NormalSource::reseed(uint64_t seed) {
  uint64_t x = seed;
  for (int lane = 0; lane < 8; ++lane)
    for (int i = 0; i < 4; ++i) s_[i][lane] = splitmix64(x);
  pos_ = kBuf;
}

void NormalSource::refill() {
  constexpr std::size_t half = kBuf / 2;
  alignas(64) uint64_t u[half];
  for (std::size_t i = 0; i < half; i += 8) {
#pragma omp simd
    for (int l = 0; l < 8; ++l) {
      uint64_t r = s_[0][l] + s_[3][l];
      r = ((r << 23) | (r >> 41)) + s_[0][l];
      const uint64_t t = s_[1][l] << 17;
      s_[2][l] ^= s_[0][l];
      s_[3][l] ^= s_[1][l];
      s_[1][l] ^= s_[2][l];
      s_[0][l] ^= s_[3][l];
      s_[2][l] ^= t;
      s_[3][l] = (s_[3][l] << 45) | (s_[3][l] >> 19);
      u[i + l] = r;
    }
  }
  alignas(64) float a[half], b[half];
  for (std::size_t i = 0; i < half; ++i) {
    const uint32_t lo = static_cast<uint32_t>(u[i]);
    const uint32_t hi = static_cast<uint32_t>(u[i] >> 32);
    a[i] = (lo >> 8) * 0x1.0p-24f + 0x1.0p-25f;  // (0,1)
    b[i] = (hi >> 8) * 0x1.0p-24f;
  }
  // keep sqrt/log, cos and sin in separate loops: gcc's sincos fusion would
  // otherwise block the libmvec vectorization
  for (std::size_t i = 0; i < half; ++i) a[i] = sqrtf(-2.0f * logf(a[i]));
  for (std::size_t i = 0; i < half; ++i) buf_[i] = a[i] * cosf(6.2831853f * b[i]);
  for (std::size_t i = 0; i < half; ++i) buf_[half + i] = a[i] * sinf(6.2831853f * b[i]);
  pos_ = 0;
}

void NormalSource::fill(double* out, std::size_t n) {
  while (n > 0) {
    if (pos_ == kBuf) refill();
    const std::size_t take = (kBuf - pos_ < n) ? kBuf - pos_ : n;
    for (std::size_t i = 0; i < take; ++i) out[i] = buf_[pos_ + i];
    pos_ += take;
    out += take;
    n -= take;
  }
}

}  // namespace stelab
