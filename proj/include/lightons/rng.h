#ifndef LIGHTONS_RNG_H_
#define LIGHTONS_RNG_H_

#include <cstdint>
#include <random>

namespace lightons {

// Portable random source.
//
// Bits come from std::mt19937_64, whose output sequence is fixed by the
// standard. Uniforms and normals are derived here rather than through
// <random> distributions, whose algorithms differ between standard
// libraries; the same seed therefore gives bit-identical streams everywhere.
//
// Sub-streams: run i of an experiment with base seed s is seeded with
// splitmix64(s ^ splitmix64(i + stream_tag)), so runs are independent and
// reproducible individually.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller; caches the second variate.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Distinct tags keep the training stream, held-out sample and calibration
// draws of one run independent.
enum class StreamTag : std::uint64_t {
  kTrain = 0x1000,
  kHeldOut = 0x2000,
  kCalibration = 0x3000,
  kTest = 0x4000,
};

std::uint64_t substream_seed(std::uint64_t base_seed, std::uint64_t run_index, StreamTag tag);

}  // namespace lightons

#endif  // LIGHTONS_RNG_H_
