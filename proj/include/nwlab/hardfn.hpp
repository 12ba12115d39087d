#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "boolcore.hpp"
#include "errors.hpp"

/*!
  \file hardfn.hpp
  \brief Generalized inner product and the Razborov-Wigderson function
  RW_{m,k,r}(x) = XOR_i AND_j XOR_t x_{i,j,t}.

  Variable layout is row-major: GIP input (i, j) sits at i*(k+1) + j and RW
  input (i, j, t) at (i*(k+1) + j)*r + t.
*/

namespace nwlab
{

struct gip_params
{
  std::size_t m = 1;
  std::size_t k_plus_1 = 1;

  std::size_t n() const { return m * k_plus_1; }

  void validate() const
  {
    if ( m < 1 || k_plus_1 < 1 )
      throw param_error( "GIP needs m >= 1 and k+1 >= 1" );
  }
  bool operator==( const gip_params& ) const = default;
};

struct rw_params
{
  std::size_t m = 1;
  std::size_t k = 1;
  std::size_t r = 1;

  std::size_t n() const { return m * ( k + 1 ) * r; }
  std::size_t index( std::size_t i, std::size_t j, std::size_t t ) const { return ( i * ( k + 1 ) + j ) * r + t; }

  void validate() const
  {
    if ( m < 1 || r < 1 )
      throw param_error( "RW needs m >= 1 and r >= 1" );
  }

  /// `m k r` triple used in experiment configs.
  std::string to_string() const
  {
    std::ostringstream os;
    os << m << ' ' << k << ' ' << r;
    return os.str();
  }

  static rw_params parse( const std::string& text )
  {
    std::istringstream is( text );
    rw_params p;
    if ( !( is >> p.m >> p.k >> p.r ) )
      throw format_error( "expected an `m k r` triple" );
    p.validate();
    return p;
  }

  bool operator==( const rw_params& ) const = default;
};

inline bool eval_gip( const gip_params& p, std::span<const std::uint8_t> x )
{
  detail::require_dim( x.size() == p.n(), "GIP input length must be m(k+1)" );
  bool out = false;
  for ( std::size_t i = 0; i < p.m; ++i )
  {
    bool row = true;
    for ( std::size_t j = 0; j < p.k_plus_1; ++j )
      row = row && x[i * p.k_plus_1 + j];
    out ^= row;
  }
  return out;
}

/// Packed variant, n <= 64.
inline bool eval_gip( const gip_params& p, std::uint64_t x )
{
  detail::require_cap( p.n() <= 64, "packed GIP input needs m(k+1) <= 64" );
  const std::uint64_t row_mask = p.k_plus_1 == 64 ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << p.k_plus_1 ) - 1;
  bool out = false;
  for ( std::size_t i = 0; i < p.m; ++i )
    out ^= ( ( x >> ( i * p.k_plus_1 ) ) & row_mask ) == row_mask;
  return out;
}

inline bool eval_rw( const rw_params& p, std::span<const std::uint8_t> x )
{
  detail::require_dim( x.size() == p.n(), "RW input length must be m(k+1)r" );
  bool out = false;
  for ( std::size_t i = 0; i < p.m; ++i )
  {
    bool row = true;
    for ( std::size_t j = 0; j <= p.k; ++j )
    {
      bool parity = false;
      for ( std::size_t t = 0; t < p.r; ++t )
        parity ^= x[p.index( i, j, t ) ] != 0;
      row = row && parity;
    }
    out ^= row;
  }
  return out;
}

inline bool eval_rw( const rw_params& p, std::uint64_t x )
{
  detail::require_cap( p.n() <= 64, "packed RW input needs n <= 64" );
  const std::uint64_t block = p.r == 64 ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << p.r ) - 1;
  bool out = false;
  for ( std::size_t i = 0; i < p.m; ++i )
  {
    bool row = true;
    for ( std::size_t j = 0; j <= p.k && row; ++j )
      row = std::popcount( ( x >> p.index( i, j, 0 ) ) & block ) & 1;
    out ^= row;
  }
  return out;
}

inline truth_table gip_table( const gip_params& p )
{
  return truth_table::from_function( static_cast<unsigned>( p.n() ), [&p]( std::uint64_t x ) { return eval_gip( p, x ); } );
}

inline truth_table rw_table( const rw_params& p )
{
  return truth_table::from_function( static_cast<unsigned>( p.n() ), [&p]( std::uint64_t x ) { return eval_rw( p, x ); } );
}

namespace detail
{
inline std::size_t isqrt( std::size_t v )
{
  auto s = static_cast<std::size_t>( std::sqrt( static_cast<double>( v ) ) );
  while ( s * s > v )
    --s;
  while ( ( s + 1 ) * ( s + 1 ) <= v )
    ++s;
  return s;
}
} // namespace detail

/*! \brief Geometry m = r = floor(sqrt(n/(k+1))) for an input budget n.

  Without an override k is the fixed point of k = max(1, round(0.0005 log2 m)),
  iterated from k = 1. The returned layout uses m(k+1)r <= n inputs.
*/
inline rw_params rw_params_from_n( std::size_t n, std::optional<std::size_t> k_override = std::nullopt )
{
  if ( n < 4 )
    throw param_error( "RW parameter selection needs n >= 4" );
  auto side = [n]( std::size_t k ) { return detail::isqrt( n / ( k + 1 ) ); };
  std::size_t k = 1;
  if ( k_override )
  {
    k = *k_override;
  }
  else
  {
    for ( int iter = 0; iter < 64; ++iter )
    {
      const auto m = side( k );
      const double target = m > 0 ? std::round( 0.0005 * std::log2( static_cast<double>( m ) ) ) : 0.0;
      const auto next = std::max<std::size_t>( 1, static_cast<std::size_t>( target ) );
      if ( next == k )
        break;
      k = next;
    }
  }
  const auto m = side( k );
  if ( m < 1 )
    throw param_error( "n is too small for an RW layout with the requested k" );
  return { m, k, m };
}

enum class row_status
{
  alive,        ///< every parity block keeps a free variable
  killed_zero,  ///< some block is fully fixed with parity 0: the row is constant 0
  constant_one, ///< every block fully fixed with parity 1
  partial       ///< a mix of fixed-to-1 and free blocks
};

/*! \brief What survives of RW_{m,k,r} under a restriction.

  `copy_restriction` extends the input restriction by fixing the free
  variables of non-alive rows and the surplus free variables of alive blocks
  to 0. Under it the function is exactly
    b XOR XOR_{i in alive} AND_j ( b_{i,j} XOR XOR_{t < r''} y_{i,j,t} ),
  with the surviving variables in increasing original order matching the
  row-major layout of RW_{m'',k,r''}.
*/
struct structure_report
{
  rw_params params;
  std::vector<std::size_t> alive_rows;
  std::vector<row_status> rows;
  std::size_t min_free_per_parity = 0; ///< over alive rows; 0 when none
  rw_params copy_params{ 0, 0, 0 };    ///< (m'', k, r'')
  bool b = false;
  std::vector<std::vector<std::uint8_t>> b_ij; ///< per alive row, per block
  restriction copy_restriction;
};

inline structure_report structure_under_restriction( const rw_params& p, const restriction& rho )
{
  detail::require_dim( rho.size() == p.n(), "restriction length differs from RW input count" );
  structure_report rep;
  rep.params = p;
  rep.rows.resize( p.m );

  std::vector<std::vector<std::size_t>> free( p.m * ( p.k + 1 ) );
  std::vector<std::uint8_t> fixed_parity( p.m * ( p.k + 1 ), 0 );
  for ( std::size_t i = 0; i < p.m; ++i )
    for ( std::size_t j = 0; j <= p.k; ++j )
    {
      const auto blk = i * ( p.k + 1 ) + j;
      for ( std::size_t t = 0; t < p.r; ++t )
      {
        const auto v = p.index( i, j, t );
        if ( rho.is_star( v ) )
          free[blk].push_back( v );
        else if ( rho[v] == cell::one )
          fixed_parity[blk] ^= 1;
      }
    }

  std::size_t min_free = SIZE_MAX;
  for ( std::size_t i = 0; i < p.m; ++i )
  {
    bool all_free = true, any_zero = false;
    for ( std::size_t j = 0; j <= p.k; ++j )
    {
      const auto blk = i * ( p.k + 1 ) + j;
      if ( free[blk].empty() )
      {
        all_free = false;
        any_zero = any_zero || !fixed_parity[blk];
      }
    }
    bool any_free = false;
    for ( std::size_t j = 0; j <= p.k; ++j )
      any_free = any_free || !free[i * ( p.k + 1 ) + j].empty();
    if ( all_free )
    {
      rep.rows[i] = row_status::alive;
      rep.alive_rows.push_back( i );
      for ( std::size_t j = 0; j <= p.k; ++j )
        min_free = std::min( min_free, free[i * ( p.k + 1 ) + j].size() );
    }
    else if ( any_zero )
      rep.rows[i] = row_status::killed_zero;
    else if ( any_free )
      rep.rows[i] = row_status::partial;
    else
      rep.rows[i] = row_status::constant_one;
  }
  rep.min_free_per_parity = rep.alive_rows.empty() ? 0 : min_free;
  const auto r2 = rep.min_free_per_parity;
  rep.copy_params = { rep.alive_rows.size(), p.k, rep.alive_rows.empty() ? 0 : r2 };

  auto cells = rho.cells();
  std::size_t next_alive = 0;
  for ( std::size_t i = 0; i < p.m; ++i )
  {
    const bool alive = next_alive < rep.alive_rows.size() && rep.alive_rows[next_alive] == i;
    if ( alive )
    {
      ++next_alive;
      std::vector<std::uint8_t> bits( p.k + 1 );
      for ( std::size_t j = 0; j <= p.k; ++j )
      {
        const auto blk = i * ( p.k + 1 ) + j;
        bits[j] = fixed_parity[blk];
        for ( std::size_t idx = r2; idx < free[blk].size(); ++idx )
          cells[free[blk][idx]] = cell::zero;
      }
      rep.b_ij.push_back( std::move( bits ) );
      continue;
    }
    // the row is constant once its remaining free variables are set to 0
    bool row = true;
    for ( std::size_t j = 0; j <= p.k; ++j )
    {
      const auto blk = i * ( p.k + 1 ) + j;
      for ( auto v : free[blk] )
        cells[v] = cell::zero;
      row = row && fixed_parity[blk];
    }
    rep.b ^= row;
  }
  rep.copy_restriction = restriction( std::move( cells ) );
  return rep;
}

/// Table of b XOR RW_{m'',k,r''} with block negations b_{i,j}; the shape the report promises.
inline truth_table structure_copy_table( const structure_report& rep )
{
  const auto& cp = rep.copy_params;
  const auto n2 = static_cast<unsigned>( cp.m * ( cp.k + 1 ) * cp.r );
  return truth_table::from_function( n2, [&]( std::uint64_t y ) {
    bool out = rep.b;
    for ( std::size_t i = 0; i < cp.m; ++i )
    {
      bool row = true;
      for ( std::size_t j = 0; j <= cp.k; ++j )
      {
        bool par = rep.b_ij[i][j] != 0;
        for ( std::size_t t = 0; t < cp.r; ++t )
          par ^= ( y >> cp.index( i, j, t ) ) & 1;
        row = row && par;
      }
      out ^= row;
    }
    return out;
  } );
}

/// True iff the restricted RW still contains a perfect copy of GIP_{target_m,k+1}.
inline bool gip_copy_check( const structure_report& rep, std::size_t target_m )
{
  return rep.copy_params.m >= target_m && rep.copy_params.r >= 1;
}

/// Union bound m(k+1) exp(-pr/8) on some block keeping fewer than pr/2 stars under R_p.
inline double chernoff_retention_bound( const rw_params& p, double star_prob )
{
  const double mu = star_prob * static_cast<double>( p.r );
  return static_cast<double>( p.m * ( p.k + 1 ) ) * std::exp( -mu / 8.0 );
}

/// Whether some parity block keeps fewer than `threshold` free variables.
inline bool some_block_below( const rw_params& p, const restriction& rho, double threshold )
{
  detail::require_dim( rho.size() == p.n(), "restriction length differs from RW input count" );
  for ( std::size_t blk = 0; blk < p.m * ( p.k + 1 ); ++blk )
  {
    std::size_t f = 0;
    for ( std::size_t t = 0; t < p.r; ++t )
      f += rho.is_star( blk * p.r + t ) ? 1 : 0;
    if ( static_cast<double>( f ) < threshold )
      return true;
  }
  return false;
}

} // namespace nwlab
