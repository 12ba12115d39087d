#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "boolcore.hpp"
#include "circuits.hpp"
#include "designs.hpp"
#include "errors.hpp"
#include "hardfn.hpp"
#include "parallel.hpp"

/*!
  \file nwgen.hpp
  \brief The Nisan-Wigderson generator: output bit i is the hard function
  applied to the seed bits indexed by block T_i (in increasing index order).
*/

namespace nwlab
{

inline constexpr unsigned max_enumerated_seed = 24;

struct parity_function
{
  std::size_t r = 1;
  bool operator==( const parity_function& ) const = default;
};

/// The hard function f : {0,1}^r -> {0,1} driving the generator.
class hard_function
{
public:
  using evaluator = std::variant<rw_params, gip_params, parity_function, truth_table>;

  explicit hard_function( evaluator e ) : eval_( std::move( e ) ) {}

  static hard_function rw( rw_params p )
  {
    p.validate();
    return hard_function( p );
  }
  static hard_function gip( gip_params p )
  {
    p.validate();
    return hard_function( p );
  }
  static hard_function parity( std::size_t r ) { return hard_function( parity_function{ r } ); }
  static hard_function table( truth_table t ) { return hard_function( std::move( t ) ); }

  std::size_t arity() const
  {
    return std::visit(
        []( const auto& e ) -> std::size_t {
          using T = std::decay_t<decltype( e )>;
          if constexpr ( std::is_same_v<T, truth_table> )
            return e.num_vars();
          else if constexpr ( std::is_same_v<T, parity_function> )
            return e.r;
          else
            return e.n();
        },
        eval_ );
  }

  /// Packed input, arity <= 64.
  bool eval( std::uint64_t x ) const
  {
    return std::visit(
        [x]( const auto& e ) -> bool {
          using T = std::decay_t<decltype( e )>;
          if constexpr ( std::is_same_v<T, truth_table> )
            return e.get( x );
          else if constexpr ( std::is_same_v<T, parity_function> )
            return std::popcount( x ) & 1;
          else if constexpr ( std::is_same_v<T, rw_params> )
            return eval_rw( e, x );
          else
            return eval_gip( e, x );
        },
        eval_ );
  }

  bool eval( std::span<const std::uint8_t> bits ) const
  {
    detail::require_dim( bits.size() == arity(), "input length differs from hard-function arity" );
    return std::visit(
        [bits]( const auto& e ) -> bool {
          using T = std::decay_t<decltype( e )>;
          if constexpr ( std::is_same_v<T, truth_table> )
            return e.eval( bits );
          else if constexpr ( std::is_same_v<T, parity_function> )
          {
            bool v = false;
            for ( auto b : bits )
              v ^= b != 0;
            return v;
          }
          else if constexpr ( std::is_same_v<T, rw_params> )
            return eval_rw( e, bits );
          else
            return eval_gip( e, bits );
        },
        eval_ );
  }

  truth_table table() const
  {
    detail::require_cap( arity() <= max_table_vars, "hard function too wide for a truth table" );
    return truth_table::from_function( static_cast<unsigned>( arity() ), [this]( std::uint64_t x ) { return eval( x ); } );
  }

  const evaluator& get() const { return eval_; }

  /// `rw:m,k,r`, `parity:r`, `gip:m,k` (GIP_{m,k+1}) or `table:r`.
  std::string describe() const
  {
    return std::visit(
        []( const auto& e ) -> std::string {
          using T = std::decay_t<decltype( e )>;
          if constexpr ( std::is_same_v<T, truth_table> )
            return "table:" + std::to_string( e.num_vars() );
          else if constexpr ( std::is_same_v<T, parity_function> )
            return "parity:" + std::to_string( e.r );
          else if constexpr ( std::is_same_v<T, rw_params> )
            return "rw:" + std::to_string( e.m ) + "," + std::to_string( e.k ) + "," + std::to_string( e.r );
          else
            return "gip:" + std::to_string( e.m ) + "," + std::to_string( e.k_plus_1 - 1 );
        },
        eval_ );
  }

private:
  evaluator eval_;
};

class nw_generator
{
public:
  /// `output_len` truncates to the first bits; 0 keeps every block.
  nw_generator( design d, hard_function f, std::size_t output_len = 0 )
      : design_( std::move( d ) ), hard_( std::move( f ) ),
        output_len_( output_len == 0 ? design_.block_count() : output_len )
  {
    if ( design_.set_size_r != hard_.arity() )
      throw dimension_error( "design block size must equal the hard-function arity" );
    if ( output_len_ > design_.block_count() )
      throw dimension_error( "output length exceeds the number of design blocks" );
    for ( const auto& b : design_.blocks )
      for ( auto v : b )
        if ( v >= design_.universe_m )
          throw dimension_error( "design block leaves the seed range" );
  }

  std::size_t seed_length() const { return design_.universe_m; }
  std::size_t output_length() const { return output_len_; }
  const design& get_design() const { return design_; }
  const hard_function& hard() const { return hard_; }

  std::vector<std::uint8_t> generate( std::span<const std::uint8_t> seed ) const
  {
    detail::require_dim( seed.size() == seed_length(), "seed length differs from the design universe" );
    std::vector<std::uint8_t> out( output_len_ );
    std::vector<std::uint8_t> window( hard_.arity() );
    for ( std::size_t i = 0; i < output_len_; ++i )
    {
      const auto& block = design_.blocks[i];
      for ( std::size_t t = 0; t < block.size(); ++t )
        window[t] = seed[block[t]];
      out[i] = hard_.eval( window ) ? 1 : 0;
    }
    return out;
  }

  /// Packed seed and output: m <= 64 and output_len <= 64.
  std::uint64_t generate( std::uint64_t seed ) const
  {
    detail::require_cap( seed_length() <= 64 && output_len_ <= 64 && hard_.arity() <= 64,
                         "packed generation needs m, s and r at most 64" );
    detail::require_dim( seed_length() == 64 || seed >> seed_length() == 0, "seed has bits beyond the seed length" );
    std::uint64_t out = 0;
    for ( std::size_t i = 0; i < output_len_; ++i )
    {
      std::uint64_t window = 0;
      const auto& block = design_.blocks[i];
      for ( std::size_t t = 0; t < block.size(); ++t )
        window |= ( ( seed >> block[t] ) & 1 ) << t;
      if ( hard_.eval( window ) )
        out |= std::uint64_t{ 1 } << i;
    }
    return out;
  }

private:
  design design_;
  hard_function hard_;
  std::size_t output_len_;
};

/// Calls fn(seed, output) for all 2^m seeds in increasing order.
template<typename Fn>
void for_each_output( const nw_generator& g, Fn&& fn )
{
  detail::require_cap( g.seed_length() <= max_enumerated_seed, "seed enumeration needs m <= 24" );
  const std::uint64_t seeds = std::uint64_t{ 1 } << g.seed_length();
  for ( std::uint64_t z = 0; z < seeds; ++z )
    fn( z, g.generate( z ) );
}

/// The full output multiset, indexed by seed.
inline std::vector<std::uint64_t> enumerate_outputs( const nw_generator& g )
{
  std::vector<std::uint64_t> out;
  detail::require_cap( g.seed_length() <= max_enumerated_seed, "seed enumeration needs m <= 24" );
  out.reserve( std::size_t{ 1 } << g.seed_length() );
  for_each_output( g, [&out]( std::uint64_t, std::uint64_t y ) { out.push_back( y ); } );
  return out;
}

/// A statistical test on generator outputs: a circuit or a sparse polynomial.
using count_target = std::variant<circuit_spec, sparse_f2_poly>;

inline unsigned target_arity( const count_target& t )
{
  return std::visit(
      []( const auto& v ) -> unsigned {
        if constexpr ( std::is_same_v<std::decay_t<decltype( v )>, circuit_spec> )
          return v.n;
        else
          return v.num_vars();
      },
      t );
}

inline bool eval_target( const count_target& t, std::uint64_t x )
{
  return std::visit( [x]( const auto& v ) -> bool { return v.eval( x ); }, t );
}

/// Number of seeds whose output (truncated to the target arity) satisfies the target.
inline std::uint64_t count_accepting_seeds( const count_target& target, const nw_generator& g )
{
  const auto arity = target_arity( target );
  detail::require_dim( arity <= g.output_length(), "target reads more bits than the generator outputs" );
  detail::require_cap( g.seed_length() <= max_enumerated_seed, "seed enumeration needs m <= 24" );
  const std::uint64_t mask = arity == 64 ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << arity ) - 1;
  const std::uint64_t seeds = std::uint64_t{ 1 } << g.seed_length();
  return parallel_count( seeds, [&]( std::uint64_t z ) { return eval_target( target, g.generate( z ) & mask ); } );
}

/// (1/2^m) sum over seeds of P(G(seed)); independent of how seeds are sharded.
inline double approx_count( const count_target& target, const nw_generator& g )
{
  const auto hits = count_accepting_seeds( target, g );
  return static_cast<double>( hits ) / static_cast<double>( std::uint64_t{ 1 } << g.seed_length() );
}

/// Exact Pr over uniform x of P(x).
inline double exact_density( const count_target& target )
{
  const auto n = target_arity( target );
  detail::require_cap( n <= max_table_vars, "exact density needs at most 28 inputs" );
  const std::uint64_t size = std::uint64_t{ 1 } << n;
  const auto hits = parallel_count( size, [&]( std::uint64_t x ) { return eval_target( target, x ); } );
  return static_cast<double>( hits ) / static_cast<double>( size );
}

} // namespace nwlab
