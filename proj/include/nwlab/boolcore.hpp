#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

/*!
  \file boolcore.hpp
  \brief Truth tables, restrictions and restriction distributions.

  Conventions used throughout the library: an assignment to variables
  x_0..x_{n-1} is identified with the index sum_i x_i 2^i, and bit strings are
  written with x_0 first.
*/

namespace nwlab
{

inline constexpr unsigned max_table_vars = 28;

/// Smallest l with 2^l >= s (0 for s <= 1).
inline std::size_t ceil_log2( std::uint64_t s )
{
  return s <= 1 ? 0 : static_cast<std::size_t>( 64 - std::countl_zero( s - 1 ) );
}

/// Complete Boolean function on at most 28 variables, packed 64 outputs per word.
class truth_table
{
public:
  truth_table() : truth_table( 0u ) {}

  explicit truth_table( unsigned num_vars ) : n_( num_vars )
  {
    detail::require_cap( num_vars <= max_table_vars, "truth table supports at most 28 variables" );
    words_.assign( word_count( num_vars ), 0 );
  }

  template<typename Fn>
  static truth_table from_function( unsigned num_vars, Fn&& fn )
  {
    truth_table t( num_vars );
    for ( std::uint64_t x = 0; x < t.size(); ++x )
      if ( fn( x ) )
        t.set( x, true );
    return t;
  }

  static truth_table constant( unsigned num_vars, bool value )
  {
    truth_table t( num_vars );
    if ( value )
      for ( std::uint64_t x = 0; x < t.size(); ++x )
        t.set( x, true );
    return t;
  }

  static truth_table parity( unsigned num_vars )
  {
    return from_function( num_vars, []( std::uint64_t x ) { return std::popcount( x ) & 1; } );
  }

  static truth_table projection( unsigned num_vars, unsigned var )
  {
    detail::require_dim( var < num_vars, "projection variable out of range" );
    return from_function( num_vars, [var]( std::uint64_t x ) { return ( x >> var ) & 1; } );
  }

  unsigned num_vars() const { return n_; }
  std::uint64_t size() const { return std::uint64_t{ 1 } << n_; }

  bool get( std::uint64_t x ) const { return ( words_[x >> 6] >> ( x & 63 ) ) & 1; }

  void set( std::uint64_t x, bool value )
  {
    const auto mask = std::uint64_t{ 1 } << ( x & 63 );
    if ( value )
      words_[x >> 6] |= mask;
    else
      words_[x >> 6] &= ~mask;
  }

  bool eval( std::uint64_t x ) const
  {
    detail::require_dim( x < size(), "assignment index out of range" );
    return get( x );
  }

  /// Evaluates at an explicit assignment given as one byte (0/1) per variable.
  bool eval( std::span<const std::uint8_t> bits ) const
  {
    detail::require_dim( bits.size() == n_, "assignment length differs from variable count" );
    std::uint64_t x = 0;
    for ( std::size_t i = 0; i < bits.size(); ++i )
      if ( bits[i] )
        x |= std::uint64_t{ 1 } << i;
    return get( x );
  }

  std::uint64_t count_ones() const
  {
    std::uint64_t c = 0;
    for ( auto w : words_ )
      c += std::popcount( w );
    return c;
  }

  bool is_constant() const
  {
    const auto ones = count_ones();
    return ones == 0 || ones == size();
  }

  truth_table operator~() const
  {
    truth_table t = *this;
    for ( auto& w : t.words_ )
      w = ~w;
    t.mask_tail();
    return t;
  }

  truth_table operator^( const truth_table& other ) const
  {
    detail::require_dim( n_ == other.n_, "xor of tables over different variable counts" );
    truth_table t = *this;
    for ( std::size_t i = 0; i < words_.size(); ++i )
      t.words_[i] ^= other.words_[i];
    return t;
  }

  /// Number of inputs on which the two tables agree.
  std::uint64_t agreement( const truth_table& other ) const
  {
    detail::require_dim( n_ == other.n_, "agreement of tables over different variable counts" );
    return size() - ( *this ^ other ).count_ones();
  }

  bool operator==( const truth_table& other ) const = default;

  /// Output bits in index order, e.g. "0110" for 2-bit parity.
  std::string to_string() const
  {
    std::string s( size(), '0' );
    for ( std::uint64_t x = 0; x < size(); ++x )
      if ( get( x ) )
        s[x] = '1';
    return s;
  }

  static truth_table from_string( std::string_view bits )
  {
    std::string clean;
    for ( char c : bits )
    {
      if ( c == '0' || c == '1' )
        clean.push_back( c );
      else if ( c != ' ' && c != '\n' && c != '\t' && c != '\r' )
        throw format_error( std::string( "unexpected character in truth table: " ) + c );
    }
    if ( clean.empty() || !std::has_single_bit( clean.size() ) )
      throw format_error( "truth table length must be a power of two" );
    const auto n = static_cast<unsigned>( std::countr_zero( clean.size() ) );
    truth_table t( n );
    for ( std::uint64_t x = 0; x < t.size(); ++x )
      t.set( x, clean[x] == '1' );
    return t;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

private:
  static std::size_t word_count( unsigned n ) { return n <= 6 ? 1 : std::size_t{ 1 } << ( n - 6 ); }

  void mask_tail()
  {
    if ( n_ < 6 )
      words_[0] &= ( std::uint64_t{ 1 } << size() ) - 1;
  }

  unsigned n_;
  std::vector<std::uint64_t> words_;
};

enum class cell : std::uint8_t
{
  zero,
  one,
  star
};

/// A partial assignment in {0,1,*}^n.
class restriction
{
public:
  restriction() = default;

  explicit restriction( std::vector<cell> cells ) : cells_( std::move( cells ) ) {}

  static restriction all_star( std::size_t n ) { return restriction( std::vector<cell>( n, cell::star ) ); }

  static restriction from_assignment( std::size_t n, std::uint64_t x )
  {
    std::vector<cell> c( n );
    for ( std::size_t i = 0; i < n; ++i )
      c[i] = ( ( x >> i ) & 1 ) ? cell::one : cell::zero;
    return restriction( std::move( c ) );
  }

  /// Parses the line format, e.g. `01**1*0`.
  static restriction parse( std::string_view text )
  {
    std::vector<cell> c;
    for ( char ch : text )
    {
      switch ( ch )
      {
      case '0': c.push_back( cell::zero ); break;
      case '1': c.push_back( cell::one ); break;
      case '*': c.push_back( cell::star ); break;
      case ' ':
      case '\r':
      case '\n':
      case '\t': break;
      default: throw format_error( std::string( "invalid restriction symbol: " ) + ch );
      }
    }
    return restriction( std::move( c ) );
  }

  std::string to_string() const
  {
    std::string s;
    s.reserve( cells_.size() );
    for ( auto c : cells_ )
      s.push_back( c == cell::zero ? '0' : c == cell::one ? '1' : '*' );
    return s;
  }

  std::size_t size() const { return cells_.size(); }
  cell operator[]( std::size_t i ) const { return cells_[i]; }
  const std::vector<cell>& cells() const { return cells_; }

  bool is_star( std::size_t i ) const { return cells_[i] == cell::star; }

  std::size_t star_count() const { return static_cast<std::size_t>( std::count( cells_.begin(), cells_.end(), cell::star ) ); }
  std::size_t fixed_count() const { return size() - star_count(); }

  /// Star positions in increasing order; position j becomes variable j of f|rho.
  std::vector<std::size_t> stars() const
  {
    std::vector<std::size_t> s;
    for ( std::size_t i = 0; i < cells_.size(); ++i )
      if ( cells_[i] == cell::star )
        s.push_back( i );
    return s;
  }

  std::uint64_t star_mask() const
  {
    detail::require_cap( size() <= 64, "packed restriction view needs n <= 64" );
    std::uint64_t m = 0;
    for ( std::size_t i = 0; i < cells_.size(); ++i )
      if ( cells_[i] == cell::star )
        m |= std::uint64_t{ 1 } << i;
    return m;
  }

  /// Bits of the fixed ones (stars read as 0).
  std::uint64_t fixed_values() const
  {
    detail::require_cap( size() <= 64, "packed restriction view needs n <= 64" );
    std::uint64_t v = 0;
    for ( std::size_t i = 0; i < cells_.size(); ++i )
      if ( cells_[i] == cell::one )
        v |= std::uint64_t{ 1 } << i;
    return v;
  }

  /// Fills the stars from `y`, whose bit j feeds the j-th star.
  std::uint64_t complete( std::uint64_t y ) const
  {
    std::uint64_t x = fixed_values();
    std::size_t j = 0;
    for ( std::size_t i = 0; i < cells_.size(); ++i )
      if ( cells_[i] == cell::star )
        x |= ( ( y >> j++ ) & 1 ) << i;
    return x;
  }

  /// Restriction on the star positions of `this` that `outer` induces.
  restriction induced_on_stars( const restriction& outer ) const
  {
    detail::require_dim( outer.size() == size(), "restriction lengths differ" );
    std::vector<cell> c;
    for ( std::size_t i = 0; i < cells_.size(); ++i )
      if ( cells_[i] == cell::star )
        c.push_back( outer.cells_[i] );
    return restriction( std::move( c ) );
  }

  /// Lifts `inner`, a restriction over this restriction's stars, to length n.
  restriction lift( const restriction& inner ) const
  {
    detail::require_dim( inner.size() == star_count(), "inner restriction must cover exactly the stars" );
    auto c = cells_;
    std::size_t j = 0;
    for ( auto& v : c )
      if ( v == cell::star )
        v = inner.cells_[j++];
    return restriction( std::move( c ) );
  }

  bool operator==( const restriction& ) const = default;

private:
  std::vector<cell> cells_;
};

/// f|rho as a table over the star positions of rho, in increasing order.
inline truth_table apply_restriction( const truth_table& f, const restriction& rho )
{
  detail::require_dim( rho.size() == f.num_vars(), "restriction length differs from variable count" );
  const auto mask = rho.star_mask();
  const auto base = rho.fixed_values();
  truth_table out( static_cast<unsigned>( std::popcount( mask ) ) );
  // submasks of `mask` in increasing order line up with the packed star assignment
  std::uint64_t sub = 0;
  for ( std::uint64_t y = 0; y < out.size(); ++y )
  {
    if ( f.get( base | sub ) )
      out.set( y, true );
    sub = ( sub - mask ) & mask;
  }
  return out;
}

/// (rho rho')_i = rho_i when fixed, otherwise rho'_i.
inline restriction compose( const restriction& rho, const restriction& rho2 )
{
  detail::require_dim( rho.size() == rho2.size(), "restriction lengths differ" );
  std::vector<cell> c( rho.size() );
  for ( std::size_t i = 0; i < c.size(); ++i )
    c[i] = rho[i] == cell::star ? rho2[i] : rho[i];
  return restriction( std::move( c ) );
}

struct restriction_params
{
  double p = 0.0; ///< star probability
  double q = 0.0; ///< subset inclusion probability

  void validate() const
  {
    if ( !( p >= 0.0 && p <= 1.0 ) || !( q >= 0.0 && q <= 1.0 ) )
      throw param_error( "restriction probabilities must lie in [0, 1]" );
  }
};

/// Draws from R_p: each cell is * with probability p, else a uniform bit.
inline restriction sample_rp( std::size_t n, double p, rng& gen )
{
  if ( !( p >= 0.0 && p <= 1.0 ) )
    throw param_error( "star probability must lie in [0, 1]" );
  std::vector<cell> c( n );
  for ( auto& v : c )
  {
    const bool star = gen.bernoulli( p );
    const bool b = gen.bit();
    v = star ? cell::star : ( b ? cell::one : cell::zero );
  }
  return restriction( std::move( c ) );
}

/// L subseteq_q [universe_size]: each index kept independently with probability q.
inline std::vector<std::size_t> sample_subset( std::size_t universe_size, double q, rng& gen )
{
  if ( !( q >= 0.0 && q <= 1.0 ) )
    throw param_error( "inclusion probability must lie in [0, 1]" );
  std::vector<std::size_t> out;
  for ( std::size_t i = 0; i < universe_size; ++i )
    if ( gen.bernoulli( q ) )
      out.push_back( i );
  return out;
}

} // namespace nwlab
