#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "boolcore.hpp"
#include "circuits.hpp"
#include "errors.hpp"

/*!
  \file circuit_io.hpp
  \brief Text formats: circuits as JSON, sparse polynomials, truth tables,
  restriction lists and hexadecimal bit strings.

  Circuit JSON:
  \code
  {"n": 4,
   "top": {"kind": "sym", "predicate": [0, 1, 1]},
   "children": [{"and": ["x0", "!x3"]}, {"or": ["x1"]}]}
  \endcode
  THR tops carry "weights" and "threshold", ANY tops a "table" bit string.
  Children are {"and": [...]}, {"or": [...]}, {"tree": T} with
  T = {"leaf": 0|1} or {"var": i, "lo": T, "hi": T}, and {"circuit": C}.
*/

namespace nwlab
{

using json = nlohmann::json;

namespace detail
{

inline literal parse_literal( const json& j )
{
  if ( !j.is_string() )
    throw format_error( "literals are strings like \"x3\" or \"!x3\"" );
  std::string s = j.get<std::string>();
  literal l;
  if ( !s.empty() && ( s[0] == '!' || s[0] == '~' ) )
  {
    l.negated = true;
    s.erase( 0, 1 );
  }
  if ( s.size() < 2 || s[0] != 'x' || s.find_first_not_of( "0123456789", 1 ) != std::string::npos )
    throw format_error( "bad literal: " + j.get<std::string>() );
  l.var = static_cast<unsigned>( std::stoul( s.substr( 1 ) ) );
  return l;
}

inline std::string literal_text( const literal& l ) { return ( l.negated ? "!x" : "x" ) + std::to_string( l.var ); }

inline std::vector<literal> parse_literals( const json& j )
{
  if ( !j.is_array() )
    throw format_error( "gate inputs must be an array of literals" );
  std::vector<literal> out;
  for ( const auto& e : j )
    out.push_back( parse_literal( e ) );
  return out;
}

inline decision_tree parse_tree( const json& j )
{
  if ( !j.is_object() )
    throw format_error( "tree nodes are objects" );
  if ( j.contains( "leaf" ) )
  {
    const auto& v = j.at( "leaf" );
    if ( v.is_null() )
      return decision_tree::unlabeled_leaf();
    return decision_tree::leaf( v.get<int>() != 0 );
  }
  if ( !j.contains( "var" ) || !j.contains( "lo" ) || !j.contains( "hi" ) )
    throw format_error( "tree branches need var, lo and hi" );
  return decision_tree::branch( j.at( "var" ).get<unsigned>(), parse_tree( j.at( "lo" ) ), parse_tree( j.at( "hi" ) ) );
}

inline json tree_json( const decision_tree& t, std::uint32_t i = 0 )
{
  const auto& nd = t.nodes()[i];
  if ( nd.var < 0 )
    return nd.leaf == decision_tree::unlabeled ? json{ { "leaf", nullptr } } : json{ { "leaf", nd.leaf } };
  return json{ { "var", nd.var }, { "lo", tree_json( t, nd.lo ) }, { "hi", tree_json( t, nd.hi ) } };
}

} // namespace detail

inline circuit_spec circuit_from_json( const json& j );

inline json circuit_to_json( const circuit_spec& c )
{
  json top;
  switch ( c.top.kind )
  {
  case top_kind::sym:
    top = { { "kind", "sym" }, { "predicate", c.top.predicate } };
    break;
  case top_kind::thr:
    top = { { "kind", "thr" }, { "weights", c.top.weights }, { "threshold", c.top.threshold } };
    break;
  case top_kind::any:
    top = { { "kind", "any" }, { "table", c.top.table.to_string() } };
    break;
  }
  json children = json::array();
  for ( const auto& ch : c.children )
  {
    std::visit(
        [&children]( const auto& g ) {
          using T = std::decay_t<decltype( g )>;
          if constexpr ( std::is_same_v<T, and_gate> || std::is_same_v<T, or_gate> )
          {
            json lits = json::array();
            for ( const auto& l : g.lits )
              lits.push_back( detail::literal_text( l ) );
            children.push_back( { { std::is_same_v<T, and_gate> ? "and" : "or", lits } } );
          }
          else if constexpr ( std::is_same_v<T, decision_tree> )
            children.push_back( { { "tree", detail::tree_json( g ) } } );
          else
            children.push_back( { { "circuit", circuit_to_json( *g.spec ) } } );
        },
        ch );
  }
  return { { "n", c.n }, { "top", top }, { "children", children } };
}

inline circuit_spec circuit_from_json( const json& j )
{
  try
  {
    circuit_spec c;
    c.n = j.at( "n" ).get<unsigned>();
    const auto& top = j.at( "top" );
    const auto kind = top.at( "kind" ).get<std::string>();
    if ( kind == "sym" || kind == "SYM" )
      c.top = top_gate::sym( top.at( "predicate" ).get<std::vector<std::uint8_t>>() );
    else if ( kind == "thr" || kind == "THR" )
      c.top = top_gate::thr( top.at( "weights" ).get<std::vector<std::int64_t>>(), top.at( "threshold" ).get<std::int64_t>() );
    else if ( kind == "any" || kind == "ANY" )
      c.top = top_gate::any( truth_table::from_string( top.at( "table" ).get<std::string>() ) );
    else
      throw format_error( "unknown top kind: " + kind );
    for ( const auto& ch : j.at( "children" ) )
    {
      if ( !ch.is_object() || ch.size() != 1 )
        throw format_error( "each child is an object with exactly one key" );
      const auto it = ch.begin();
      const std::string key = it.key();
      const json& val = it.value();
      if ( key == "and" )
        c.children.emplace_back( and_gate{ detail::parse_literals( val ) } );
      else if ( key == "or" )
        c.children.emplace_back( or_gate{ detail::parse_literals( val ) } );
      else if ( key == "tree" )
        c.children.emplace_back( detail::parse_tree( val ) );
      else if ( key == "circuit" )
        c.children.emplace_back( subcircuit{ std::make_shared<const circuit_spec>( circuit_from_json( val ) ) } );
      else
        throw format_error( "unknown child kind: " + key );
    }
    c.validate();
    return c;
  }
  catch ( const json::exception& e )
  {
    throw format_error( std::string( "circuit JSON: " ) + e.what() );
  }
}

inline json read_json_file( const std::string& path )
{
  std::ifstream is( path );
  if ( !is )
    throw format_error( "cannot open " + path );
  try
  {
    return json::parse( is );
  }
  catch ( const json::exception& e )
  {
    throw format_error( path + ": " + e.what() );
  }
}

inline circuit_spec read_circuit_file( const std::string& path ) { return circuit_from_json( read_json_file( path ) ); }

/// `# n constant`, then one monomial per line as space-separated indices.
inline void write_sparse_poly( std::ostream& os, const sparse_f2_poly& p )
{
  os << "# " << p.num_vars() << ' ' << ( p.constant() ? 1 : 0 ) << '\n';
  for ( const auto& m : p.monomials() )
  {
    for ( std::size_t i = 0; i < m.size(); ++i )
      os << ( i ? " " : "" ) << m[i];
    os << '\n';
  }
}

inline sparse_f2_poly read_sparse_poly( std::istream& is )
{
  std::string line;
  if ( !std::getline( is, line ) || line.empty() || line[0] != '#' )
    throw format_error( "sparse polynomial files start with `# n constant`" );
  std::istringstream hs( line.substr( 1 ) );
  unsigned n = 0;
  int constant = 0;
  if ( !( hs >> n >> constant ) || ( constant != 0 && constant != 1 ) )
    throw format_error( "bad sparse polynomial header" );
  sparse_f2_poly p( n, constant == 1 );
  while ( std::getline( is, line ) )
  {
    if ( line.find_first_not_of( " \t\r" ) == std::string::npos || line[0] == '#' )
      continue;
    std::istringstream ls( line );
    sparse_f2_poly::monomial m;
    long v;
    while ( ls >> v )
    {
      if ( v < 0 )
        throw format_error( "negative variable index" );
      m.push_back( static_cast<unsigned>( v ) );
    }
    if ( !ls.eof() )
      throw format_error( "monomial lines hold variable indices" );
    p.add( std::move( m ) );
  }
  return p;
}

/// Truth-table file: one bit string, f(0) first; whitespace is ignored.
inline truth_table read_truth_table( std::istream& is )
{
  std::string bits, tok;
  while ( is >> tok )
    bits += tok;
  return truth_table::from_string( bits );
}

inline std::vector<restriction> read_restrictions( std::istream& is )
{
  std::vector<restriction> out;
  std::string line;
  while ( std::getline( is, line ) )
  {
    while ( !line.empty() && ( line.back() == '\r' || line.back() == ' ' ) )
      line.pop_back();
    if ( !line.empty() )
      out.push_back( restriction::parse( line ) );
  }
  return out;
}

inline void write_restrictions( std::ostream& os, const std::vector<restriction>& rs )
{
  for ( const auto& r : rs )
    os << r.to_string() << '\n';
}

/// Hex string to `len` bits; bit 0 is the least significant bit of the number.
inline std::vector<std::uint8_t> parse_hex_bits( std::string_view hex, std::size_t len )
{
  if ( hex.starts_with( "0x" ) || hex.starts_with( "0X" ) )
    hex.remove_prefix( 2 );
  if ( hex.empty() )
    throw format_error( "empty hex string" );
  std::vector<std::uint8_t> bits( len, 0 );
  std::size_t pos = 0;
  for ( auto it = hex.rbegin(); it != hex.rend(); ++it, pos += 4 )
  {
    const char c = *it;
    int v;
    if ( c >= '0' && c <= '9' )
      v = c - '0';
    else if ( c >= 'a' && c <= 'f' )
      v = c - 'a' + 10;
    else if ( c >= 'A' && c <= 'F' )
      v = c - 'A' + 10;
    else
      throw format_error( "bad hex digit" );
    for ( int b = 0; b < 4; ++b )
      if ( ( v >> b ) & 1 )
      {
        if ( pos + b >= len )
          throw dimension_error( "hex value has bits beyond length " + std::to_string( len ) );
        bits[pos + b] = 1;
      }
  }
  return bits;
}

inline std::uint64_t parse_hex_u64( std::string_view hex )
{
  const auto bits = parse_hex_bits( hex, 64 );
  std::uint64_t v = 0;
  for ( std::size_t i = 0; i < 64; ++i )
    v |= std::uint64_t{ bits[i] } << i;
  return v;
}

inline std::string bits_to_string( const std::vector<std::uint8_t>& bits )
{
  std::string s;
  s.reserve( bits.size() );
  for ( auto b : bits )
    s.push_back( b ? '1' : '0' );
  return s;
}

inline std::string hex_u64( std::uint64_t v )
{
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

} // namespace nwlab
