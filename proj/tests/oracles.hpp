#pragma once

// Slow, obviously-correct reimplementations used as test oracles. Nothing here
// calls into the library's algorithms; only plain data types cross over.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace oracle
{

using bits = std::vector<int>;
using boolfn = std::function<int( const bits& )>;

inline bits unpack( std::uint64_t x, std::size_t n )
{
  bits b( n );
  for ( std::size_t i = 0; i < n; ++i )
    b[i] = static_cast<int>( ( x >> i ) & 1 );
  return b;
}

inline std::uint64_t pack( const bits& b )
{
  std::uint64_t x = 0;
  for ( std::size_t i = 0; i < b.size(); ++i )
    if ( b[i] )
      x += std::uint64_t{ 1 } << i;
  return x;
}

inline int gip( std::size_t m, std::size_t kp1, const bits& x )
{
  int acc = 0;
  for ( std::size_t i = 0; i < m; ++i )
  {
    int row = 1;
    for ( std::size_t j = 0; j < kp1; ++j )
      row = row * x[i * kp1 + j];
    acc = ( acc + row ) % 2;
  }
  return acc;
}

inline int rw( std::size_t m, std::size_t k, std::size_t r, const bits& x )
{
  int acc = 0;
  for ( std::size_t i = 0; i < m; ++i )
  {
    int row = 1;
    for ( std::size_t j = 0; j <= k; ++j )
    {
      int par = 0;
      for ( std::size_t t = 0; t < r; ++t )
        par = ( par + x[( i * ( k + 1 ) + j ) * r + t] ) % 2;
      row = row * par;
    }
    acc = ( acc + row ) % 2;
  }
  return acc;
}

/// Restriction as a string over {0,1,*}.
inline std::vector<bits> completions( const std::string& rho )
{
  std::vector<bits> out{ bits() };
  for ( char c : rho )
  {
    std::vector<bits> next;
    for ( const auto& b : out )
    {
      if ( c == '*' || c == '0' )
      {
        auto e = b;
        e.push_back( 0 );
        next.push_back( e );
      }
      if ( c == '*' || c == '1' )
      {
        auto e = b;
        e.push_back( 1 );
        next.push_back( e );
      }
    }
    out = std::move( next );
  }
  return out;
}

/// f restricted by rho as a vector of outputs indexed by the star values (first star = bit 0).
inline std::vector<int> restrict_table( const boolfn& f, const std::string& rho )
{
  std::vector<std::size_t> stars;
  for ( std::size_t i = 0; i < rho.size(); ++i )
    if ( rho[i] == '*' )
      stars.push_back( i );
  std::vector<int> out( std::size_t{ 1 } << stars.size() );
  for ( std::uint64_t y = 0; y < out.size(); ++y )
  {
    bits x( rho.size() );
    for ( std::size_t i = 0; i < rho.size(); ++i )
      x[i] = rho[i] == '1' ? 1 : 0;
    for ( std::size_t s = 0; s < stars.size(); ++s )
      x[stars[s]] = static_cast<int>( ( y >> s ) & 1 );
    out[y] = f( x );
  }
  return out;
}

inline bool constant_under( const boolfn& f, const std::string& rho )
{
  const auto t = restrict_table( f, rho );
  return std::all_of( t.begin(), t.end(), [&]( int v ) { return v == t[0]; } );
}

/// Textbook recursion, memoized on the restriction string.
inline int min_depth( const boolfn& f, const std::string& rho, std::map<std::string, int>& memo )
{
  if ( auto it = memo.find( rho ); it != memo.end() )
    return it->second;
  int best = 0;
  if ( !constant_under( f, rho ) )
  {
    best = 1 << 20;
    for ( std::size_t i = 0; i < rho.size(); ++i )
      if ( rho[i] == '*' )
      {
        auto a = rho, b = rho;
        a[i] = '0';
        b[i] = '1';
        best = std::min( best, 1 + std::max( min_depth( f, a, memo ), min_depth( f, b, memo ) ) );
      }
  }
  memo[rho] = best;
  return best;
}

inline int min_depth( const boolfn& f, std::size_t n )
{
  std::map<std::string, int> memo;
  return min_depth( f, std::string( n, '*' ), memo );
}

/// Is there a restriction tree of depth <= t below rho whose leaves leave every member at depth <= l?
inline bool rt_exists( const std::vector<boolfn>& fam, const std::string& rho, int l, int t,
                       std::vector<std::map<std::string, int>>& memos )
{
  bool ok = true;
  for ( std::size_t i = 0; i < fam.size() && ok; ++i )
    ok = min_depth( fam[i], rho, memos[i] ) <= l;
  if ( ok )
    return true;
  if ( t == 0 )
    return false;
  for ( std::size_t v = 0; v < rho.size(); ++v )
    if ( rho[v] == '*' )
    {
      auto a = rho, b = rho;
      a[v] = '0';
      b[v] = '1';
      if ( rt_exists( fam, a, l, t - 1, memos ) && rt_exists( fam, b, l, t - 1, memos ) )
        return true;
    }
  return false;
}

/// Least t <= limit with a common l-partial tree of depth t, or -1.
inline int common_rt_depth( const std::vector<boolfn>& fam, std::size_t n, int l, int limit )
{
  std::vector<std::map<std::string, int>> memos( fam.size() );
  for ( int t = 0; t <= limit; ++t )
    if ( rt_exists( fam, std::string( n, '*' ), l, t, memos ) )
      return t;
  return -1;
}

inline std::size_t overlap( const std::vector<std::size_t>& a, const std::vector<std::size_t>& b )
{
  std::size_t c = 0;
  for ( auto x : a )
    for ( auto y : b )
      c += x == y ? 1 : 0;
  return c;
}

/// Two-sided double loop: |E_seed P(out(seed)) - E_x P(x)|.
inline double bias( std::size_t m, std::size_t arity, const std::function<bits( const bits& )>& gen, const boolfn& p )
{
  double a = 0, b = 0;
  for ( std::uint64_t z = 0; z < ( std::uint64_t{ 1 } << m ); ++z )
  {
    auto y = gen( unpack( z, m ) );
    y.resize( arity );
    a += p( y );
  }
  for ( std::uint64_t x = 0; x < ( std::uint64_t{ 1 } << arity ); ++x )
    b += p( unpack( x, arity ) );
  a /= static_cast<double>( std::uint64_t{ 1 } << m );
  b /= static_cast<double>( std::uint64_t{ 1 } << arity );
  return a > b ? a - b : b - a;
}

} // namespace oracle
