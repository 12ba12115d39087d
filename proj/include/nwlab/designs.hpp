#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "boolcore.hpp"
#include "errors.hpp"
#include "rng.hpp"

/*!
  \file designs.hpp
  \brief (m, r, l, s) combinatorial designs: s blocks of size r in [m] with
  pairwise intersections of size at most l.
*/

namespace nwlab
{

using big_int = boost::multiprecision::cpp_int;

struct design
{
  std::size_t universe_m = 0;
  std::size_t set_size_r = 0;
  std::size_t overlap_l = 0;
  std::vector<std::vector<std::size_t>> blocks; ///< each sorted

  std::size_t block_count() const { return blocks.size(); }
  bool operator==( const design& ) const = default;
};

struct design_report
{
  bool ok = false;
  std::size_t max_overlap = 0;
  double m_over_r2_by_l = 0.0; ///< m / (r^2 / l); infinite when l = 0
  std::string problem;
};

inline std::size_t intersection_size( const std::vector<std::size_t>& a, const std::vector<std::size_t>& b )
{
  std::size_t i = 0, j = 0, c = 0;
  while ( i < a.size() && j < b.size() )
  {
    if ( a[i] < b[j] )
      ++i;
    else if ( b[j] < a[i] )
      ++j;
    else
    {
      ++c;
      ++i;
      ++j;
    }
  }
  return c;
}

inline constexpr std::size_t max_verified_blocks = std::size_t{ 1 } << 14;

/// Exhaustive pairwise check, O(s^2 r); at most 2^14 blocks.
inline design_report verify_design( const design& d )
{
  detail::require_cap( d.blocks.size() <= max_verified_blocks, "design verification needs at most 2^14 blocks" );
  design_report rep;
  rep.ok = true;
  const auto fail = [&rep]( std::string why ) {
    if ( rep.ok )
      rep.problem = std::move( why );
    rep.ok = false;
  };
  for ( std::size_t i = 0; i < d.blocks.size(); ++i )
  {
    const auto& b = d.blocks[i];
    if ( b.size() != d.set_size_r )
      fail( "block " + std::to_string( i ) + " has the wrong size" );
    if ( !std::is_sorted( b.begin(), b.end() ) || std::adjacent_find( b.begin(), b.end() ) != b.end() )
      fail( "block " + std::to_string( i ) + " is not sorted and duplicate free" );
    if ( !b.empty() && b.back() >= d.universe_m )
      fail( "block " + std::to_string( i ) + " leaves the universe" );
  }
  for ( std::size_t i = 0; i < d.blocks.size(); ++i )
    for ( std::size_t j = i + 1; j < d.blocks.size(); ++j )
      rep.max_overlap = std::max( rep.max_overlap, intersection_size( d.blocks[i], d.blocks[j] ) );
  if ( rep.max_overlap > d.overlap_l )
    fail( "pairwise intersection " + std::to_string( rep.max_overlap ) + " exceeds l" );
  const double r2 = static_cast<double>( d.set_size_r ) * static_cast<double>( d.set_size_r );
  rep.m_over_r2_by_l = d.overlap_l == 0 || r2 == 0.0 ? std::numeric_limits<double>::infinity()
                                                     : static_cast<double>( d.universe_m ) / ( r2 / static_cast<double>( d.overlap_l ) );
  return rep;
}

inline bool is_prime( std::uint64_t v )
{
  if ( v < 2 )
    return false;
  for ( std::uint64_t d = 2; d * d <= v; ++d )
    if ( v % d == 0 )
      return false;
  return true;
}

/*! \brief Graphs of all polynomials of degree < d over the prime field F_q.

  Universe F_q x F_q with (a, y) -> a*q + y, so m = q^2; s = q^d blocks of size
  q, and two distinct graphs share at most d - 1 points. Polynomials are listed
  by their coefficient vector read as a base-q number (constant term lowest).
*/
inline design build_design_polynomial( std::size_t q, std::size_t d )
{
  if ( !is_prime( q ) )
    throw param_error( "polynomial designs need a prime field size" );
  if ( d < 1 )
    throw param_error( "polynomial designs need degree bound d >= 1" );
  std::size_t count = 1;
  for ( std::size_t i = 0; i < d; ++i )
  {
    if ( count > ( std::size_t{ 1 } << 20 ) / q )
      throw cap_error( "polynomial design would exceed 2^20 blocks" );
    count *= q;
  }
  design out;
  out.universe_m = q * q;
  out.set_size_r = q;
  out.overlap_l = d - 1;
  out.blocks.reserve( count );
  std::vector<std::size_t> coeff( d, 0 );
  for ( std::size_t idx = 0; idx < count; ++idx )
  {
    std::size_t rest = idx;
    for ( auto& c : coeff )
    {
      c = rest % q;
      rest /= q;
    }
    std::vector<std::size_t> block( q );
    for ( std::size_t a = 0; a < q; ++a )
    {
      std::size_t y = 0;
      for ( std::size_t e = d; e-- > 0; )
        y = ( y * a + coeff[e] ) % q;
      block[a] = a * q + y;
    }
    out.blocks.push_back( std::move( block ) );
  }
  return out;
}

namespace detail
{

inline std::optional<design> greedy_design( std::size_t s, std::size_t r, std::size_t l, std::size_t m, rng& gen,
                                            std::size_t retries )
{
  design d{ m, r, l, {} };
  std::vector<std::size_t> pool( m );
  while ( d.blocks.size() < s )
  {
    bool placed = false;
    for ( std::size_t attempt = 0; attempt < retries && !placed; ++attempt )
    {
      for ( std::size_t i = 0; i < m; ++i )
        pool[i] = i;
      for ( std::size_t i = 0; i < r; ++i )
        std::swap( pool[i], pool[i + gen.below( m - i )] );
      std::vector<std::size_t> cand( pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>( r ) );
      std::sort( cand.begin(), cand.end() );
      placed = std::all_of( d.blocks.begin(), d.blocks.end(),
                            [&]( const auto& b ) { return intersection_size( b, cand ) <= l; } );
      if ( placed )
        d.blocks.push_back( std::move( cand ) );
    }
    if ( !placed )
      return std::nullopt;
  }
  return d;
}

} // namespace detail

/*! \brief An (m, r, l, s) design with m tracking r^2 (up to prime rounding).

  Prefers the polynomial design over the least prime q >= r with the least d
  such that q^d >= s and d - 1 <= l, keeping the first s polynomials and the
  first r rows of each graph. Otherwise falls back to a seeded greedy search
  that grows the universe until every block fits.
*/
inline design build_design_for( std::size_t s, std::size_t r, std::size_t l, std::uint64_t seed = 0x5eed )
{
  if ( s < 1 || r < 1 || l < 1 )
    throw param_error( "design construction needs s, r, l >= 1" );
  std::size_t q = std::max<std::size_t>( r, 2 );
  while ( !is_prime( q ) )
    ++q;
  std::size_t d = 1;
  big_int power = q;
  while ( power < s )
  {
    power *= q;
    ++d;
  }
  if ( d - 1 <= l )
  {
    // only the first s polynomials are needed; their coefficient vectors are the base-q digits of 0..s-1
    design full;
    full.universe_m = q * q;
    full.set_size_r = r;
    full.overlap_l = l;
    std::vector<std::size_t> coeff( d );
    for ( std::size_t idx = 0; idx < s; ++idx )
    {
      std::size_t rest = idx;
      for ( auto& c : coeff )
      {
        c = rest % q;
        rest /= q;
      }
      std::vector<std::size_t> block( r );
      for ( std::size_t a = 0; a < r; ++a )
      {
        std::size_t y = 0;
        for ( std::size_t e = d; e-- > 0; )
          y = ( y * a + coeff[e] ) % q;
        block[a] = a * q + y;
      }
      full.blocks.push_back( std::move( block ) );
    }
    if ( verify_design( full ).ok )
      return full;
  }

  rng gen( seed );
  std::size_t m = std::max( r, ( 2 * r * r + l - 1 ) / l );
  for ( int round = 0; round < 12; ++round )
  {
    if ( auto g = detail::greedy_design( s, r, l, m, gen, 256 ) )
      if ( verify_design( *g ).ok )
        return *g;
    m *= 2;
  }
  throw construction_error( "no design found within the retry budget" );
}

/// s pairwise disjoint blocks {ir, ..., ir + r - 1}: an (sr, r, 0, s) design.
inline design disjoint_design( std::size_t s, std::size_t r )
{
  design d{ s * r, r, 0, {} };
  for ( std::size_t i = 0; i < s; ++i )
  {
    std::vector<std::size_t> b( r );
    for ( std::size_t t = 0; t < r; ++t )
      b[t] = i * r + t;
    d.blocks.push_back( std::move( b ) );
  }
  return d;
}

/// Header `m r l s`, then one line of r sorted indices per block.
inline void write_design( std::ostream& os, const design& d )
{
  os << d.universe_m << ' ' << d.set_size_r << ' ' << d.overlap_l << ' ' << d.blocks.size() << '\n';
  for ( const auto& b : d.blocks )
  {
    for ( std::size_t i = 0; i < b.size(); ++i )
      os << ( i ? " " : "" ) << b[i];
    os << '\n';
  }
}

inline design read_design( std::istream& is )
{
  design d;
  std::size_t s = 0;
  if ( !( is >> d.universe_m >> d.set_size_r >> d.overlap_l >> s ) )
    throw format_error( "design header must be `m r l s`" );
  d.blocks.assign( s, std::vector<std::size_t>( d.set_size_r ) );
  for ( auto& b : d.blocks )
    for ( auto& v : b )
      if ( !( is >> v ) )
        throw format_error( "design file ended before all blocks were read" );
  std::string extra;
  if ( is >> extra )
    throw format_error( "trailing data after the last design block" );
  return d;
}

enum class nw_profile
{
  viola,
  ls11_sym,
  ls11_thr,
  main,
  many_gates
};

inline nw_profile parse_profile( const std::string& s )
{
  if ( s == "viola" )
    return nw_profile::viola;
  if ( s == "ls11_sym" )
    return nw_profile::ls11_sym;
  if ( s == "ls11_thr" )
    return nw_profile::ls11_thr;
  if ( s == "main" )
    return nw_profile::main;
  if ( s == "many_gates" )
    return nw_profile::many_gates;
  throw param_error( "unknown profile: " + s );
}

inline const char* to_string( nw_profile p )
{
  switch ( p )
  {
  case nw_profile::viola: return "viola";
  case nw_profile::ls11_sym: return "ls11_sym";
  case nw_profile::ls11_thr: return "ls11_thr";
  case nw_profile::main: return "main";
  default: return "many_gates";
  }
}

/// Constant C in m = ceil(C r^2 / l).
inline constexpr unsigned design_constant = 4;

struct nw_params
{
  nw_profile profile = nw_profile::main;
  std::uint64_t s = 2;
  double eps = 0.5;
  double tau = 1.0;
  double c_d = 1.0;

  std::size_t l = 1;      ///< ceil(log2 s)
  double r_exponent = 0;  ///< log2 of the exponential term of r
  big_int r;
  big_int m;              ///< ceil(C r^2 / l)
  big_int hardness_size;  ///< s * 2^l
  double hardness_corr = 0; ///< eps / s
  double log2_hardness_corr = 0;

  // desk-scale substitute: r and m capped, l = log s preserved
  std::optional<std::uint64_t> desk_r;
  std::optional<std::uint64_t> desk_m;
};

namespace detail
{
using big_float = boost::multiprecision::cpp_bin_float_100;

/// round(2^e) for e >= 0.
inline big_int round_pow2( double e )
{
  big_float v = boost::multiprecision::pow( big_float( 2 ), big_float( e ) );
  return static_cast<big_int>( boost::multiprecision::round( v ) );
}

inline big_int round_real( double v ) { return static_cast<big_int>( boost::multiprecision::round( big_float( v ) ) ); }
} // namespace detail

/*! \brief Parameter calculator for the NW instantiations.

  r per profile (logs base 2, o(1) exponents dropped, each term rounded to the
  nearest integer):
    viola:            2^(10 sqrt(log(s/eps) / c_d))
    ls11_sym:         2^((10/c_d) log s / log log s) + log(s/eps)
    ls11_thr:         2^((10/c_d) log s / log log s) + log(s/eps)^2
    main, many_gates: 2^(10 sqrt((2/tau) log s)) + log(s/eps)^2.005
  l = ceil(log2 s) and m = ceil(C r^2 / l) everywhere. `desk_cap`, when given,
  fills desk_r = min(r, cap) and the matching desk_m.
*/
inline nw_params compute_nw_params( nw_profile profile, std::uint64_t s, double eps, double tau, double c_d,
                                    std::optional<std::uint64_t> desk_cap = std::nullopt )
{
  if ( s < 2 )
    throw param_error( "s must be at least 2" );
  if ( !( eps > 0.0 && eps < 1.0 ) )
    throw param_error( "eps must lie in (0, 1)" );
  if ( !( tau > 0.0 ) || !( c_d > 0.0 ) )
    throw param_error( "tau and c_d must be positive" );
  nw_params p;
  p.profile = profile;
  p.s = s;
  p.eps = eps;
  p.tau = tau;
  p.c_d = c_d;
  p.l = ceil_log2( s );

  const double log_s = std::log2( static_cast<double>( s ) );
  const double log_s_eps = log_s - std::log2( eps );
  double additive = 0.0;
  switch ( profile )
  {
  case nw_profile::viola:
    p.r_exponent = 10.0 * std::sqrt( log_s_eps / c_d );
    break;
  case nw_profile::ls11_sym:
  case nw_profile::ls11_thr:
  {
    // log log s is floored at 1 so that s <= 4 stays finite
    const double loglog = std::max( std::log2( log_s ), 1.0 );
    p.r_exponent = ( 10.0 / c_d ) * log_s / loglog;
    additive = profile == nw_profile::ls11_sym ? log_s_eps : log_s_eps * log_s_eps;
    break;
  }
  case nw_profile::main:
  case nw_profile::many_gates:
    p.r_exponent = 10.0 * std::sqrt( ( 2.0 / tau ) * log_s );
    additive = std::pow( log_s_eps, 2.005 );
    break;
  }
  p.r = detail::round_pow2( p.r_exponent ) + detail::round_real( additive );

  const big_int num = big_int( design_constant ) * p.r * p.r;
  p.m = ( num + p.l - 1 ) / p.l;
  p.hardness_size = big_int( s ) << p.l;
  p.hardness_corr = eps / static_cast<double>( s );
  p.log2_hardness_corr = std::log2( eps ) - log_s;

  if ( desk_cap )
  {
    const big_int r_desk = p.r < *desk_cap ? p.r : big_int( *desk_cap );
    p.desk_r = static_cast<std::uint64_t>( r_desk );
    const big_int m_desk = ( big_int( design_constant ) * r_desk * r_desk + p.l - 1 ) / p.l;
    p.desk_m = static_cast<std::uint64_t>( m_desk );
  }
  return p;
}

} // namespace nwlab
