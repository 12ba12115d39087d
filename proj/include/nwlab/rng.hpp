#pragma once

#include <cstdint>
#include <random>

namespace nwlab
{

/*! \brief Seedable, replayable random source.

  Wraps `std::mt19937_64` (whose output sequence is fixed by the standard) and
  derives every real or bit draw from raw 64-bit words, so results do not depend
  on the standard library's distribution implementations.
*/
class rng
{
public:
  static constexpr const char* name = "mt19937_64";

  explicit rng( std::uint64_t seed = 0 ) : seed_( seed ), engine_( seed ) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>( next() >> 11 ) * 0x1.0p-53; }

  bool bernoulli( double p ) { return uniform01() < p; }

  bool bit() { return ( next() >> 63 ) != 0; }

  /// Uniform in [0, bound) by rejection; bound must be positive.
  std::uint64_t below( std::uint64_t bound )
  {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do
    {
      v = next();
    } while ( v >= limit );
    return v % bound;
  }

  /// Independent stream for trial `index` of an experiment seeded with `master`.
  static rng derive( std::uint64_t master, std::uint64_t index )
  {
    return rng( splitmix( master ^ splitmix( index + 0x632be59bd9b4e019ULL ) ) );
  }

  static std::uint64_t splitmix( std::uint64_t z )
  {
    z += 0x9e3779b97f4a7c15ULL;
    z = ( z ^ ( z >> 30 ) ) * 0xbf58476d1ce4e5b9ULL;
    z = ( z ^ ( z >> 27 ) ) * 0x94d049bb133111ebULL;
    return z ^ ( z >> 31 );
  }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

} // namespace nwlab
