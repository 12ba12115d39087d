#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <optional>
#include <vector>

#include "boolcore.hpp"
#include "circuits.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

/*!
  \file restrictlab.hpp
  \brief Exact decision-tree depth, common partial restriction trees, the
  switching-lemma experiments and the three-step fair restriction sampler.
*/

namespace nwlab
{

inline constexpr unsigned max_depth_vars = 16;
inline constexpr unsigned max_rt_vars = 12;
inline constexpr std::size_t max_rt_family = 8;

namespace detail
{

inline std::uint64_t pow3( unsigned n )
{
  std::uint64_t p = 1;
  for ( unsigned i = 0; i < n; ++i )
    p *= 3;
  return p;
}

/*! \brief Walks every sub-cube of {0,1,*}^n in increasing base-3 order.

  Digit i of the index is 0/1 for a fixed x_i and 2 for a star, so both
  children of a sub-cube (one star replaced by 0 or 1) are visited first.
  `fn(index, x, stars)` receives the fixed bits and the star mask.
*/
template<typename Fn>
void for_each_subcube( unsigned n, Fn&& fn )
{
  const auto total = pow3( n );
  std::vector<std::uint8_t> digit( n, 0 );
  std::uint64_t x = 0, stars = 0;
  for ( std::uint64_t c = 0; c < total; ++c )
  {
    fn( c, x, stars );
    for ( unsigned i = 0; i < n; ++i )
    {
      const auto bit = std::uint64_t{ 1 } << i;
      if ( digit[i] == 0 )
      {
        digit[i] = 1;
        x |= bit;
        break;
      }
      if ( digit[i] == 1 )
      {
        digit[i] = 2;
        x &= ~bit;
        stars |= bit;
        break;
      }
      digit[i] = 0;
      stars &= ~bit;
    }
  }
}

/// Per sub-cube minimum decision-tree depth of f restricted to it.
inline std::vector<std::uint8_t> subcube_depths( const truth_table& f )
{
  const unsigned n = f.num_vars();
  std::vector<std::uint64_t> p3( n + 1, 1 );
  for ( unsigned i = 1; i <= n; ++i )
    p3[i] = p3[i - 1] * 3;
  // packed entry: bits 0-4 depth, bits 5-6 value (0, 1, 2 = non-constant)
  std::vector<std::uint8_t> cube( p3[n] );
  for_each_subcube( n, [&]( std::uint64_t c, std::uint64_t x, std::uint64_t stars ) {
    if ( stars == 0 )
    {
      cube[c] = static_cast<std::uint8_t>( ( f.get( x ) ? 1 : 0 ) << 5 );
      return;
    }
    const auto low = static_cast<unsigned>( std::countr_zero( stars ) );
    const auto v0 = cube[c - 2 * p3[low]] >> 5, v1 = cube[c - p3[low]] >> 5;
    if ( v0 == v1 && v0 != 2 )
    {
      cube[c] = static_cast<std::uint8_t>( v0 << 5 );
      return;
    }
    unsigned best = 31;
    for ( auto s = stars; s; s &= s - 1 )
    {
      const auto i = static_cast<unsigned>( std::countr_zero( s ) );
      const unsigned d0 = cube[c - 2 * p3[i]] & 31, d1 = cube[c - p3[i]] & 31;
      best = std::min( best, std::max( d0, d1 ) );
    }
    cube[c] = static_cast<std::uint8_t>( ( 2 << 5 ) | ( best + 1 ) );
  } );
  for ( auto& e : cube )
    e &= 31;
  return cube;
}

} // namespace detail

/// Exact minimum depth of a decision tree computing f (n <= 16).
inline unsigned min_dt_depth( const truth_table& f )
{
  detail::require_cap( f.num_vars() <= max_depth_vars, "exact decision-tree depth needs n <= 16" );
  if ( f.is_constant() )
    return 0;
  const auto cube = detail::subcube_depths( f );
  return cube.back();
}

/// A common partial restriction tree (unlabeled leaves) and its depth.
struct partial_rt
{
  unsigned depth = 0;
  decision_tree tree = decision_tree::unlabeled_leaf();
};

namespace detail
{

inline partial_rt common_partial_rt_unchecked( const std::vector<truth_table>& family, unsigned l )
{
  if ( family.empty() )
    return {};
  const unsigned n = family.front().num_vars();
  for ( const auto& f : family )
    require_dim( f.num_vars() == n, "family members must share a variable count" );
  std::vector<std::uint64_t> p3( n + 1, 1 );
  for ( unsigned i = 1; i <= n; ++i )
    p3[i] = p3[i - 1] * 3;

  std::vector<std::uint8_t> ok( p3[n], 1 );
  for ( const auto& f : family )
  {
    if ( f.is_constant() )
      continue;
    const auto d = subcube_depths( f );
    for ( std::size_t c = 0; c < ok.size(); ++c )
      ok[c] = ok[c] && d[c] <= l;
  }
  std::vector<std::uint8_t> t( p3[n], 0 );
  for_each_subcube( n, [&]( std::uint64_t c, std::uint64_t, std::uint64_t stars ) {
    if ( ok[c] )
      return;
    unsigned best = 255;
    for ( auto s = stars; s; s &= s - 1 )
    {
      const auto i = static_cast<unsigned>( std::countr_zero( s ) );
      best = std::min<unsigned>( best, std::max( t[c - 2 * p3[i]], t[c - p3[i]] ) );
    }
    t[c] = static_cast<std::uint8_t>( best + 1 );
  } );

  // lowest-index branching variable among those realising the minimum
  std::function<decision_tree( std::uint64_t, std::uint64_t )> build = [&]( std::uint64_t c, std::uint64_t stars ) {
    if ( ok[c] )
      return decision_tree::unlabeled_leaf();
    for ( auto s = stars; s; s &= s - 1 )
    {
      const auto i = static_cast<unsigned>( std::countr_zero( s ) );
      const auto c0 = c - 2 * p3[i], c1 = c - p3[i];
      if ( std::max( t[c0], t[c1] ) + 1 == t[c] )
      {
        const auto rest = stars & ~( std::uint64_t{ 1 } << i );
        return decision_tree::branch( i, build( c0, rest ), build( c1, rest ) );
      }
    }
    throw error( "inconsistent restriction-tree table" );
  };
  const std::uint64_t all = n == 0 ? 0 : ( std::uint64_t{ 1 } << n ) - 1;
  return { t.back(), build( p3[n] - 1, all ) };
}

} // namespace detail

/// Minimal depth of a common l-partial restriction tree for the family (n <= 12, at most 8 members).
inline unsigned common_partial_rt_depth( const std::vector<truth_table>& family, unsigned l )
{
  detail::require_cap( family.size() <= max_rt_family, "common partial RT search allows at most 8 functions" );
  for ( const auto& f : family )
    detail::require_cap( f.num_vars() <= max_rt_vars, "common partial RT search needs n <= 12" );
  return detail::common_partial_rt_unchecked( family, l ).depth;
}

/// The tree itself, branching on the lowest variable that attains the optimum.
inline partial_rt build_common_partial_rt( const std::vector<truth_table>& family, unsigned l )
{
  detail::require_cap( family.size() <= max_rt_family, "common partial RT search allows at most 8 functions" );
  for ( const auto& f : family )
    detail::require_cap( f.num_vars() <= max_rt_vars, "common partial RT search needs n <= 12" );
  return detail::common_partial_rt_unchecked( family, l );
}

/// Empirical failure rate of a switching experiment next to the theorem's bound.
struct switch_report
{
  std::string mode;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double empirical_failure = 0.0;
  double raw_bound = 0.0; ///< before clamping
  double bound = 0.0;     ///< min(1, raw_bound)
  bool vacuous = false;
  std::uint64_t seed = 0;
  std::map<unsigned, std::uint64_t> histogram; ///< depth -> trials

  /// One binomial standard deviation of the failure estimate at the bound.
  double sigma() const
  {
    const double b = std::clamp( bound, 0.0, 1.0 );
    return std::sqrt( b * ( 1.0 - b ) / static_cast<double>( std::max<std::uint64_t>( trials, 1 ) ) );
  }

  /// empirical <= bound + z sigma
  bool within( double z = 3.0 ) const { return empirical_failure <= bound + z * sigma() + 1e-12; }
};

struct switch_config
{
  std::vector<circuit_spec> family; ///< width-w DNFs over a common n
  double p = 0.0;
  unsigned t = 1;
  std::optional<unsigned> l; ///< partial-RT granularity; defaults to ceil(log2 s)
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;

  void validate() const
  {
    if ( family.empty() )
      throw param_error( "switching experiments need at least one DNF" );
    if ( trials < 1 )
      throw param_error( "trials must be at least 1" );
    if ( !( p >= 0.0 && p <= 1.0 ) )
      throw param_error( "p must lie in [0, 1]" );
    for ( const auto& f : family )
    {
      f.validate();
      if ( f.n != family.front().n )
        throw dimension_error( "DNFs must share the input count" );
    }
    detail::require_cap( family.front().n <= max_depth_vars, "switching experiments need n <= 16" );
  }

  std::size_t max_width() const
  {
    std::size_t w = 0;
    for ( const auto& f : family )
      w = std::max( w, f.width() );
    return w;
  }
};

namespace detail
{
inline void finish( switch_report& rep, const std::vector<unsigned>& depths, unsigned t )
{
  for ( auto d : depths )
  {
    ++rep.histogram[d];
    rep.failures += d > t ? 1 : 0;
  }
  rep.empirical_failure = static_cast<double>( rep.failures ) / static_cast<double>( rep.trials );
  rep.bound = std::min( 1.0, rep.raw_bound );
  rep.vacuous = rep.raw_bound >= 1.0;
}
} // namespace detail

/// Pr over R_p that the DNF restricted is not a depth-t tree, against (5pw)^t.
inline switch_report single_switch_experiment( const switch_config& cfg )
{
  cfg.validate();
  if ( cfg.family.size() != 1 )
    throw param_error( "the single switching experiment takes exactly one DNF" );
  const auto& dnf = cfg.family.front();
  const auto table = circuit_table( dnf );
  switch_report rep;
  rep.mode = "single";
  rep.trials = cfg.trials;
  rep.seed = cfg.seed;
  rep.raw_bound = std::pow( 5.0 * cfg.p * static_cast<double>( dnf.width() ), static_cast<double>( cfg.t ) );

  std::vector<unsigned> depths( cfg.trials );
  parallel_shards( cfg.trials, [&]( std::uint64_t b, std::uint64_t e ) {
    for ( auto i = b; i < e; ++i )
    {
      auto gen = rng::derive( cfg.seed, i );
      const auto rho = sample_rp( dnf.n, cfg.p, gen );
      depths[i] = min_dt_depth( apply_restriction( table, rho ) );
    }
  } );
  detail::finish( rep, depths, cfg.t );
  return rep;
}

/// Pr over R_p that the family has no common l-partial RT of depth <= t, against s(24pw)^t.
inline switch_report multi_switch_experiment( const switch_config& cfg )
{
  cfg.validate();
  detail::require_cap( cfg.family.size() <= max_rt_family, "multi-switching families hold at most 8 DNFs" );
  detail::require_cap( cfg.family.front().n <= max_rt_vars, "multi-switching experiments need n <= 12" );
  const auto s = cfg.family.size();
  const unsigned l = cfg.l.value_or( static_cast<unsigned>( std::max<std::size_t>( 1, ceil_log2( s ) ) ) );
  std::vector<truth_table> tables;
  for ( const auto& f : cfg.family )
    tables.push_back( circuit_table( f ) );

  switch_report rep;
  rep.mode = "multi";
  rep.trials = cfg.trials;
  rep.seed = cfg.seed;
  rep.raw_bound = static_cast<double>( s ) *
                  std::pow( 24.0 * cfg.p * static_cast<double>( cfg.max_width() ), static_cast<double>( cfg.t ) );

  const unsigned n = cfg.family.front().n;
  std::vector<unsigned> depths( cfg.trials );
  parallel_shards( cfg.trials, [&]( std::uint64_t b, std::uint64_t e ) {
    for ( auto i = b; i < e; ++i )
    {
      auto gen = rng::derive( cfg.seed, i );
      const auto rho = sample_rp( n, cfg.p, gen );
      std::vector<truth_table> restricted;
      for ( const auto& t : tables )
        restricted.push_back( apply_restriction( t, rho ) );
      depths[i] = common_partial_rt_depth( restricted, l );
    }
  } );
  detail::finish( rep, depths, cfg.t );
  return rep;
}

/// Monte-Carlo estimate of Pr[exists i : |C_i cap L| > k] for L subseteq_q [n].
struct trim_report
{
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double empirical = 0.0;
  double raw_bound = 0.0; ///< |blocks| * C(w, k) * q^k
  double bound = 0.0;
  bool vacuous = false;
  std::uint64_t seed = 0;

  double sigma() const
  {
    const double b = std::clamp( bound, 0.0, 1.0 );
    return std::sqrt( b * ( 1.0 - b ) / static_cast<double>( std::max<std::uint64_t>( trials, 1 ) ) );
  }
  bool within( double z = 3.0 ) const { return empirical <= bound + z * sigma() + 1e-12; }
};

inline double binomial( std::size_t n, std::size_t k )
{
  if ( k > n )
    return 0.0;
  double c = 1.0;
  for ( std::size_t i = 1; i <= k; ++i )
    c = c * static_cast<double>( n - k + i ) / static_cast<double>( i );
  return c;
}

inline trim_report trim_check( const std::vector<std::vector<std::size_t>>& blocks, std::size_t n, double q, std::size_t k,
                               std::uint64_t trials, std::uint64_t seed )
{
  if ( !( q >= 0.0 && q <= 1.0 ) )
    throw param_error( "q must lie in [0, 1]" );
  if ( trials < 1 )
    throw param_error( "trials must be at least 1" );
  std::size_t w = 0;
  for ( const auto& b : blocks )
  {
    w = std::max( w, b.size() );
    for ( auto v : b )
      detail::require_dim( v < n, "block index outside [n]" );
  }
  trim_report rep;
  rep.trials = trials;
  rep.seed = seed;
  rep.raw_bound = static_cast<double>( blocks.size() ) * binomial( w, k ) * std::pow( q, static_cast<double>( k ) );
  rep.bound = std::min( 1.0, rep.raw_bound );
  rep.vacuous = rep.raw_bound >= 1.0;

  std::vector<std::uint8_t> fail( trials, 0 );
  parallel_shards( trials, [&]( std::uint64_t b, std::uint64_t e ) {
    std::vector<std::uint8_t> in( n );
    for ( auto i = b; i < e; ++i )
    {
      auto gen = rng::derive( seed, i );
      std::fill( in.begin(), in.end(), 0 );
      for ( auto v : sample_subset( n, q, gen ) )
        in[v] = 1;
      fail[i] = std::any_of( blocks.begin(), blocks.end(), [&]( const auto& blk ) {
        std::size_t c = 0;
        for ( auto v : blk )
          c += in[v];
        return c > k;
      } );
    }
  } );
  for ( auto f : fail )
    rep.failures += f;
  rep.empirical = static_cast<double>( rep.failures ) / static_cast<double>( trials );
  return rep;
}

struct pipeline_diagnostics
{
  bool collapsed_to_width_k = false;
  std::size_t stars_after_rp = 0;
  unsigned tree_depth = 0;
  std::size_t path_length = 0;
  bool trimmed = false;         ///< step (c) ran
  std::size_t trim_fixed = 0;   ///< |S|
  std::size_t trim_attempts = 0;
  bool trim_good = true;        ///< some draw of L met |C_i cap L| <= k
};

struct pipeline_sample
{
  restriction rho;
  pipeline_diagnostics diag;
};

struct pipeline_options
{
  double p = 0.0;
  double q = 0.0;
  std::size_t k = 1;
  std::optional<unsigned> l; ///< defaults to ceil(log2 s)
  std::size_t trim_retries = 64;
};

namespace detail
{

inline bool and_children_only( const circuit_spec& c )
{
  return std::all_of( c.children.begin(), c.children.end(),
                      []( const child& ch ) { return std::holds_alternative<and_gate>( ch ); } );
}

inline std::size_t and_width( const circuit_spec& c )
{
  std::size_t w = 0;
  for ( const auto& ch : c.children )
    w = std::max( w, std::get<and_gate>( ch ).lits.size() );
  return w;
}

} // namespace detail

/*! \brief Draws from the three-step fair restriction distribution.

  (a) rho' from R_p; (b) a uniform walk down the common l-partial restriction
  tree of the restricted AND layer; (c) if some AND gate is still wider than k,
  draw L subseteq_q (remaining stars) until every gate meets L in at most k
  points (bounded retries) and fix the other stars uniformly. Every variable is
  fixed to an independent uniform bit, and which ones get fixed depends only on
  values already drawn, so completing the stars gives a uniform string.
*/
inline pipeline_sample fair_pipeline_sample( const circuit_spec& f, const pipeline_options& opt, rng& gen )
{
  if ( f.top.kind == top_kind::any || !detail::and_children_only( f ) )
    throw spec_error( "the fair sampler needs a SYM/THR top over AND children" );
  detail::require_cap( f.n <= max_depth_vars, "the fair sampler needs n <= 16" );
  if ( !( opt.q >= 0.0 && opt.q <= 1.0 ) )
    throw param_error( "q must lie in [0, 1]" );
  const unsigned l = opt.l.value_or( static_cast<unsigned>( ceil_log2( std::max<std::size_t>( 2, f.fanin() ) ) ) );

  pipeline_sample out;
  auto& dg = out.diag;

  // (a)
  auto rho = sample_rp( f.n, opt.p, gen );
  dg.stars_after_rp = rho.star_count();

  // (b)
  const auto g = restrict_circuit( f, rho );
  if ( detail::and_width( g ) > l )
  {
    detail::require_cap( g.n <= max_rt_vars, "restricted circuit too wide for the restriction-tree search" );
    std::vector<truth_table> family;
    for ( const auto& ch : g.children )
    {
      const auto& gate = std::get<and_gate>( ch );
      family.push_back( truth_table::from_function( g.n, [&gate]( std::uint64_t x ) { return gate.eval( x ); } ) );
    }
    const auto rt = detail::common_partial_rt_unchecked( family, l );
    dg.tree_depth = rt.depth;
    std::vector<cell> walk( g.n, cell::star );
    std::uint32_t node = 0;
    const auto& nodes = rt.tree.nodes();
    while ( nodes[node].var >= 0 )
    {
      const bool b = gen.bit();
      walk[static_cast<std::size_t>( nodes[node].var )] = b ? cell::one : cell::zero;
      node = b ? nodes[node].hi : nodes[node].lo;
      ++dg.path_length;
    }
    rho = rho.lift( restriction( std::move( walk ) ) );
  }

  // (c)
  const auto h = restrict_circuit( f, rho );
  if ( detail::and_width( h ) > opt.k )
  {
    dg.trimmed = true;
    std::vector<std::uint8_t> keep;
    bool good = false;
    while ( !good && dg.trim_attempts < std::max<std::size_t>( 1, opt.trim_retries ) )
    {
      ++dg.trim_attempts;
      keep.assign( h.n, 0 );
      for ( auto v : sample_subset( h.n, opt.q, gen ) )
        keep[v] = 1;
      good = std::all_of( h.children.begin(), h.children.end(), [&]( const child& ch ) {
        std::size_t c = 0;
        for ( const auto& lit : std::get<and_gate>( ch ).lits )
          c += keep[lit.var];
        return c <= opt.k;
      } );
    }
    dg.trim_good = good;
    std::vector<cell> trim( h.n, cell::star );
    for ( std::size_t v = 0; v < h.n; ++v )
      if ( !keep[v] )
      {
        trim[v] = gen.bit() ? cell::one : cell::zero;
        ++dg.trim_fixed;
      }
    rho = rho.lift( restriction( std::move( trim ) ) );
  }

  dg.collapsed_to_width_k = detail::and_width( restrict_circuit( f, rho ) ) <= opt.k;
  out.rho = std::move( rho );
  return out;
}

} // namespace nwlab
