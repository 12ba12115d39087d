#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "boolcore.hpp"
#include "circuits.hpp"
#include "errors.hpp"
#include "hardfn.hpp"
#include "parallel.hpp"

/*!
  \file nofproto.hpp
  \brief Number-on-forehead simulation of the Hastad-Goldmann protocol for
  SYM o AND circuits: every gate is charged to a player who sees all its
  inputs, players broadcast how many of their gates fire, and the SYM predicate
  is applied to the total.
*/

namespace nwlab
{

/// Blocks of [n]; player i has block i on its forehead and sees every other block.
struct nof_partition
{
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> blocks;

  std::size_t players() const { return blocks.size(); }

  void validate() const
  {
    std::vector<std::uint8_t> seen( n, 0 );
    for ( const auto& b : blocks )
    {
      if ( b.empty() )
        throw param_error( "partition blocks must be nonempty" );
      for ( auto v : b )
      {
        if ( v >= n )
          throw dimension_error( "partition index out of range" );
        if ( seen[v]++ )
          throw param_error( "partition blocks overlap" );
      }
    }
    if ( std::count( seen.begin(), seen.end(), 0 ) )
      throw param_error( "partition does not cover every input" );
  }

  /// Owner (forehead) of every input.
  std::vector<std::size_t> owners() const
  {
    std::vector<std::size_t> o( n, 0 );
    for ( std::size_t p = 0; p < blocks.size(); ++p )
      for ( auto v : blocks[p] )
        o[v] = p;
    return o;
  }

  /// One line of indices per block; `#` starts a comment.
  static nof_partition parse( std::istream& is, std::size_t n )
  {
    nof_partition p;
    p.n = n;
    std::string line;
    while ( std::getline( is, line ) )
    {
      if ( auto h = line.find( '#' ); h != std::string::npos )
        line.erase( h );
      std::istringstream ls( line );
      std::vector<std::size_t> block;
      std::size_t v;
      while ( ls >> v )
        block.push_back( v );
      if ( !ls.eof() )
        throw format_error( "partition lines hold whitespace-separated indices" );
      if ( !block.empty() )
        p.blocks.push_back( std::move( block ) );
    }
    p.validate();
    return p;
  }

  /// Block j = column j of GIP_{m,k+1}: the hard partition for GIP.
  static nof_partition gip_columns( const gip_params& g )
  {
    nof_partition p{ g.n(), std::vector<std::vector<std::size_t>>( g.k_plus_1 ) };
    for ( std::size_t i = 0; i < g.m; ++i )
      for ( std::size_t j = 0; j < g.k_plus_1; ++j )
        p.blocks[j].push_back( i * g.k_plus_1 + j );
    return p;
  }

  /// Row i goes to block i mod players; needs m >= players.
  static nof_partition gip_rows( const gip_params& g, std::size_t players )
  {
    if ( players < 1 || g.m < players )
      throw param_error( "row partition needs 1 <= players <= m" );
    nof_partition p{ g.n(), std::vector<std::vector<std::size_t>>( players ) };
    for ( std::size_t i = 0; i < g.m; ++i )
      for ( std::size_t j = 0; j < g.k_plus_1; ++j )
        p.blocks[i % players].push_back( i * g.k_plus_1 + j );
    return p;
  }
};

struct nof_message
{
  std::size_t player = 0;
  std::string bits; ///< most significant bit first
};

struct transcript
{
  std::vector<nof_message> messages;
  std::size_t total_bits = 0;
  bool output = false;
};

/// Bits per broadcast count: ceil(log2(s+1)).
inline std::size_t count_width( std::size_t s ) { return ceil_log2( static_cast<std::uint64_t>( s ) + 1 ); }

/// What player `p` can read: every input except its own block.
class player_view
{
public:
  player_view( std::size_t player, const std::vector<std::size_t>& owners, std::uint64_t x )
      : player_( player ), owners_( &owners ), x_( x )
  {
  }

  bool bit( std::size_t var ) const
  {
    if ( ( *owners_ )[var] == player_ )
      throw error( "NOF player read its own forehead" );
    return ( x_ >> var ) & 1;
  }

private:
  std::size_t player_;
  const std::vector<std::size_t>* owners_;
  std::uint64_t x_;
};

namespace detail
{
inline const and_gate& hg_gate( const child& ch )
{
  const auto* g = std::get_if<and_gate>( &ch );
  if ( !g )
    throw spec_error( "the HG protocol needs AND children" );
  return *g;
}
} // namespace detail

/*! \brief Lowest player whose forehead avoids each gate.

  A gate on at most k = players-1 inputs misses some block, so such a player
  always exists; wider gates are accepted when one happens to exist.
*/
inline std::vector<std::size_t> assign_gates( const circuit_spec& c, const nof_partition& part )
{
  if ( part.n != c.n )
    throw dimension_error( "partition and circuit disagree on the input count" );
  const auto owners = part.owners();
  std::vector<std::size_t> assignment;
  assignment.reserve( c.children.size() );
  for ( const auto& ch : c.children )
  {
    const auto& g = detail::hg_gate( ch );
    std::vector<std::uint8_t> touched( part.players(), 0 );
    for ( const auto& l : g.lits )
      touched[owners[l.var]] = 1;
    const auto it = std::find( touched.begin(), touched.end(), 0 );
    if ( it == touched.end() )
      throw width_error( "gate of fan-in " + std::to_string( g.lits.size() ) + " touches every block" );
    assignment.push_back( static_cast<std::size_t>( it - touched.begin() ) );
  }
  return assignment;
}

inline std::string to_bits( std::uint64_t v, std::size_t width )
{
  std::string s( width, '0' );
  for ( std::size_t i = 0; i < width; ++i )
    if ( ( v >> ( width - 1 - i ) ) & 1 )
      s[i] = '1';
  return s;
}

inline std::uint64_t from_bits( const std::string& s )
{
  std::uint64_t v = 0;
  for ( char c : s )
    v = ( v << 1 ) | ( c == '1' ? 1 : 0 );
  return v;
}

/// Runs the protocol on input x; each player sends its count in fixed width.
inline transcript run_hg_protocol( const circuit_spec& c, const nof_partition& part, std::uint64_t x )
{
  if ( c.top.kind != top_kind::sym )
    throw spec_error( "the HG protocol needs a SYM top" );
  part.validate();
  const auto assignment = assign_gates( c, part );
  const auto owners = part.owners();
  const auto width = count_width( c.children.size() );

  transcript tr;
  for ( std::size_t p = 0; p < part.players(); ++p )
  {
    const player_view view( p, owners, x );
    std::uint64_t count = 0;
    for ( std::size_t g = 0; g < c.children.size(); ++g )
    {
      if ( assignment[g] != p )
        continue;
      const auto& gate = std::get<and_gate>( c.children[g] );
      count += std::all_of( gate.lits.begin(), gate.lits.end(),
                            [&view]( const literal& l ) { return view.bit( l.var ) != l.negated; } )
                   ? 1
                   : 0;
    }
    tr.messages.push_back( { p, to_bits( count, width ) } );
    tr.total_bits += width;
  }
  // every player decodes the same broadcast
  std::uint64_t total = 0;
  for ( const auto& m : tr.messages )
    total += from_bits( m.bits );
  tr.output = c.top.predicate[total] != 0;
  return tr;
}

/// ANY_u over SYM o AND subcircuits: one protocol run per subcircuit, then the table.
inline transcript run_hg_protocol_any( const circuit_spec& c, const nof_partition& part, std::uint64_t x )
{
  if ( c.top.kind != top_kind::any )
    throw spec_error( "expected an ANY top" );
  transcript tr;
  std::uint64_t index = 0;
  for ( std::size_t i = 0; i < c.children.size(); ++i )
  {
    const auto* sub = std::get_if<subcircuit>( &c.children[i] );
    if ( !sub )
      throw spec_error( "ANY protocol needs nested SYM o AND subcircuits" );
    auto part_tr = run_hg_protocol( *sub->spec, part, x );
    if ( part_tr.output )
      index |= std::uint64_t{ 1 } << i;
    tr.total_bits += part_tr.total_bits;
    for ( auto& m : part_tr.messages )
      tr.messages.push_back( std::move( m ) );
  }
  tr.output = c.top.table.get( index );
  return tr;
}

/// (k+1) ceil(log2(s+1)): the concrete O(k log s) cost.
inline std::size_t hg_cost_bound( std::size_t players, std::size_t s ) { return players * count_width( s ); }

struct gip_corr_entry
{
  std::uint64_t agree = 0;
  double agreement = 0.0;
  double correlation = 0.0; ///< agreement - 1/2
};

struct gip_corr_report
{
  gip_params gip;
  std::uint64_t domain = 0;
  double gamma_comm = 0.0;
  double bns_budget = 0.0; ///< (1/10)(m/4^{k+1} - log2(1/gamma_comm))
  std::vector<gip_corr_entry> entries;
};

inline double bns_budget( const gip_params& g, double gamma_comm )
{
  return 0.1 * ( static_cast<double>( g.m ) / std::pow( 4.0, static_cast<double>( g.k_plus_1 ) ) - std::log2( 1.0 / gamma_comm ) );
}

/// Exact Pr[f = GIP] - 1/2 for each circuit over all 2^{m(k+1)} inputs.
inline gip_corr_report gip_correlation_scan( const gip_params& g, const std::vector<circuit_spec>& against,
                                             double gamma_comm = 0.25 )
{
  g.validate();
  detail::require_cap( g.n() <= 20, "GIP correlation scans need m(k+1) <= 20" );
  if ( !( gamma_comm > 0.0 && gamma_comm <= 1.0 ) )
    throw param_error( "gamma_comm must lie in (0, 1]" );
  gip_corr_report rep;
  rep.gip = g;
  rep.domain = std::uint64_t{ 1 } << g.n();
  rep.gamma_comm = gamma_comm;
  rep.bns_budget = bns_budget( g, gamma_comm );
  const auto target = gip_table( g );
  for ( const auto& f : against )
  {
    if ( f.n != g.n() )
      throw dimension_error( "circuit arity differs from m(k+1)" );
    f.validate();
    gip_corr_entry e;
    e.agree = parallel_count( rep.domain, [&]( std::uint64_t x ) { return f.eval( x ) == target.get( x ); } );
    e.agreement = static_cast<double>( e.agree ) / static_cast<double>( rep.domain );
    e.correlation = e.agreement - 0.5;
    rep.entries.push_back( e );
  }
  return rep;
}

/// GIP_{m,k+1} as a SYM-parity top over one AND per row.
inline circuit_spec gip_circuit( const gip_params& g )
{
  std::vector<child> ch;
  for ( std::size_t i = 0; i < g.m; ++i )
  {
    and_gate a;
    for ( std::size_t j = 0; j < g.k_plus_1; ++j )
      a.lits.push_back( { static_cast<unsigned>( i * g.k_plus_1 + j ), false } );
    ch.emplace_back( std::move( a ) );
  }
  return circuit_spec( static_cast<unsigned>( g.n() ), top_gate::parity( g.m ), std::move( ch ) );
}

} // namespace nwlab
