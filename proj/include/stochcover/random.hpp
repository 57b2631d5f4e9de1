#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stochcover {

// Deterministic, platform-independent PRNG. std::uniform_real_distribution is
// implementation-defined, so uniforms are derived from raw 64-bit output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // splitmix-style warmup so nearby seeds decorrelate
    next_u64();
    next_u64();
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, bound)
  std::uint64_t next_below(std::uint64_t bound) {
    return next_u64() % bound;
  }

 private:
  std::uint64_t state_;
};

// A scalar sampling law, parsed from descriptors like "uniform(0.1,2)" or
// "constant(1)".
struct Law {
  enum class Kind { Constant, Uniform };
  Kind kind = Kind::Constant;
  double a = 1.0;
  double b = 1.0;

  double sample(Rng& rng) const {
    if (kind == Kind::Constant) return a;
    return a + (b - a) * rng.next_double();
  }

  static Law constant(double x) { return Law{Kind::Constant, x, x}; }
  static Law uniform(double lo, double hi) { return Law{Kind::Uniform, lo, hi}; }

  static Law parse(const std::string& text) {
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw std::invalid_argument("bad law descriptor: " + text);
    std::string name = text.substr(0, open);
    std::string args = text.substr(open + 1, close - open - 1);
    if (name == "constant") return constant(std::stod(args));
    if (name == "uniform") {
      auto comma = args.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("uniform law needs two arguments: " + text);
      return uniform(std::stod(args.substr(0, comma)),
                     std::stod(args.substr(comma + 1)));
    }
    throw std::invalid_argument("unknown law: " + name);
  }
};

}  // namespace stochcover
