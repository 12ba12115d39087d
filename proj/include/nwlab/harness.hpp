#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "boolcore.hpp"
#include "circuit_io.hpp"
#include "circuits.hpp"
#include "designs.hpp"
#include "errors.hpp"
#include "hardfn.hpp"
#include "nwgen.hpp"
#include "parallel.hpp"
#include "restrictlab.hpp"
#include "rng.hpp"

/*!
  \file harness.hpp
  \brief Fooling and correlation measurements, the restriction-pipeline
  experiment, and report serialization (JSON with `schema: 1`, CSV rows).
*/

namespace nwlab
{

inline constexpr int report_schema = 1;
/// Two-sided 99% normal quantile.
inline constexpr double z99 = 2.5758293035489004;
inline constexpr unsigned max_exact_target = 20;

enum class fool_mode
{
  exact,
  monte_carlo
};

inline const char* to_string( fool_mode m ) { return m == fool_mode::exact ? "exact" : "monte_carlo"; }

inline fool_mode parse_fool_mode( const std::string& s )
{
  if ( s == "exact" )
    return fool_mode::exact;
  if ( s == "monte_carlo" || s == "mc" )
    return fool_mode::monte_carlo;
  throw param_error( "mode is exact or monte_carlo" );
}

struct fool_report
{
  fool_mode mode = fool_mode::exact;
  std::uint64_t seed_hits = 0;     ///< seeds (or sampled seeds) with P(G(seed)) = 1
  std::uint64_t seed_samples = 0;
  std::uint64_t uniform_hits = 0;  ///< inputs (or sampled inputs) with P(x) = 1
  std::uint64_t uniform_samples = 0;
  double generator_mean = 0.0;
  double uniform_mean = 0.0;
  double bias = 0.0;
  double half_width = 0.0;         ///< 99%; 0 in exact mode
  std::uint64_t master_seed = 0;

  bool operator==( const fool_report& ) const = default;
};

namespace detail
{
inline void finish_bias( fool_report& r )
{
  r.generator_mean = static_cast<double>( r.seed_hits ) / static_cast<double>( r.seed_samples );
  r.uniform_mean = static_cast<double>( r.uniform_hits ) / static_cast<double>( r.uniform_samples );
  r.bias = std::abs( r.generator_mean - r.uniform_mean );
  if ( r.mode == fool_mode::monte_carlo )
  {
    const double a = r.generator_mean, b = r.uniform_mean;
    r.half_width = z99 * std::sqrt( a * ( 1 - a ) / static_cast<double>( r.seed_samples ) +
                                    b * ( 1 - b ) / static_cast<double>( r.uniform_samples ) );
  }
}

inline std::uint64_t random_bits( rng& gen, std::size_t len )
{
  const auto v = gen.next();
  return len >= 64 ? v : v & ( ( std::uint64_t{ 1 } << len ) - 1 );
}
} // namespace detail

/// |E_seed P(G(seed)) - E_x P(x)|, exactly or from `samples` draws on each side.
inline fool_report measure_bias( const count_target& target, const nw_generator& g, fool_mode mode,
                                 std::uint64_t samples = 0, std::uint64_t seed = 0 )
{
  const auto arity = target_arity( target );
  detail::require_dim( arity <= g.output_length(), "target reads more bits than the generator outputs" );
  fool_report r;
  r.mode = mode;
  r.master_seed = seed;
  if ( mode == fool_mode::exact )
  {
    detail::require_cap( g.seed_length() <= max_enumerated_seed, "exact fooling needs m <= 24" );
    detail::require_cap( arity <= max_exact_target, "exact fooling needs target arity <= 20" );
    r.seed_samples = std::uint64_t{ 1 } << g.seed_length();
    r.seed_hits = count_accepting_seeds( target, g );
    r.uniform_samples = std::uint64_t{ 1 } << arity;
    r.uniform_hits = parallel_count( r.uniform_samples, [&]( std::uint64_t x ) { return eval_target( target, x ); } );
  }
  else
  {
    if ( samples < 1 )
      throw param_error( "Monte-Carlo fooling needs a positive sample budget" );
    detail::require_cap( arity <= 64, "Monte-Carlo fooling needs target arity <= 64" );
    const bool packed = g.seed_length() <= 64 && g.output_length() <= 64;
    const std::uint64_t mask = arity >= 64 ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << arity ) - 1;
    // stream 2i drives seed sample i, stream 2i+1 uniform sample i
    r.seed_samples = r.uniform_samples = samples;
    r.seed_hits = parallel_count( samples, [&]( std::uint64_t i ) {
      auto gen = rng::derive( seed, 2 * i );
      std::uint64_t y = 0;
      if ( packed )
        y = g.generate( detail::random_bits( gen, g.seed_length() ) );
      else
      {
        std::vector<std::uint8_t> z( g.seed_length() );
        for ( auto& b : z )
          b = gen.bit() ? 1 : 0;
        const auto out = g.generate( z );
        for ( std::size_t t = 0; t < arity; ++t )
          y |= std::uint64_t{ out[t] } << t;
      }
      return eval_target( target, y & mask );
    } );
    r.uniform_hits = parallel_count( samples, [&]( std::uint64_t i ) {
      auto gen = rng::derive( seed, 2 * i + 1 );
      return eval_target( target, detail::random_bits( gen, arity ) );
    } );
  }
  detail::finish_bias( r );
  return r;
}

struct gamma_slots
{
  double sl = 0.0;
  double target = 0.0;
  double corr = 0.0;
  bool operator==( const gamma_slots& ) const = default;
};

struct corr_report
{
  std::uint64_t domain = 0;
  std::uint64_t agree = 0;
  double agreement = 0.0;
  double correlation = 0.0; ///< agreement - 1/2
  std::optional<gamma_slots> gamma;
  std::optional<double> gamma_err;
  std::optional<double> gamma_comm;

  bool operator==( const corr_report& ) const = default;
};

inline corr_report make_corr( std::uint64_t agree, std::uint64_t domain )
{
  corr_report r;
  r.domain = domain;
  r.agree = agree;
  r.agreement = static_cast<double>( agree ) / static_cast<double>( domain );
  r.correlation = r.agreement - 0.5;
  return r;
}

/// Exact Pr_x[F(x) = H(x)] over all 2^n inputs.
inline corr_report measure_correlation( const circuit_spec& f, const hard_function& h )
{
  detail::require_dim( f.n == h.arity(), "circuit and hard function differ in arity" );
  detail::require_cap( f.n <= max_exact_target, "exact correlation needs n <= 20" );
  f.validate();
  const std::uint64_t domain = std::uint64_t{ 1 } << f.n;
  return make_corr( parallel_count( domain, [&]( std::uint64_t x ) { return f.eval( x ) == h.eval( x ); } ), domain );
}

struct pipeline_config
{
  rw_params rw{ 2, 1, 3 };
  double p = 0.5;
  double q = 0.5;
  std::optional<std::size_t> k; ///< collapse width; defaults to rw.k
  std::optional<unsigned> l;
  std::uint64_t trials = 500;
  std::uint64_t seed = 0;
  std::size_t trim_retries = 64;
  bool operator==( const pipeline_config& ) const = default;
};

struct pipeline_report
{
  pipeline_config config;
  std::uint64_t trials = 0;
  std::uint64_t sl_failures = 0;     ///< F restricted not of width <= k
  std::uint64_t target_failures = 0; ///< RW restricted holds no GIP_{ceil(m/2),k+1} copy
  std::uint64_t good = 0;            ///< both held
  double gamma_sl = 0.0;
  double gamma_target = 0.0;
  double max_gamma_corr = 0.5;       ///< 1/2 when no trial was good
  double mean_gamma_corr = 0.0;
  std::vector<double> gamma_corr;    ///< per good trial: agreement over the stars - 1/2
  double agreement = 0.0;            ///< exact Pr_x[F = RW]
  double slack = 0.0;                ///< 3 sigma with sigma = 1/(2 sqrt(trials))
  double rhs = 0.0;
  bool inequality_holds = false;

  bool operator==( const pipeline_report& ) const = default;
};

/*! \brief Samples restrictions from the fair pipeline and splits them by
  whether F collapsed to width k and whether RW kept a GIP copy.

  Fairness makes agreement(F, RW) an average of per-restriction agreements, so
  it is at most 1/2 + gamma_SL + gamma_target + max gamma_corr up to the
  sampling error of the averages, taken as 3/(2 sqrt(trials)).
*/
inline pipeline_report pipeline_experiment( const circuit_spec& f, const pipeline_config& cfg )
{
  cfg.rw.validate();
  detail::require_dim( f.n == cfg.rw.n(), "circuit arity differs from the RW input count" );
  detail::require_cap( f.n <= max_rt_vars, "pipeline experiments need n <= 12" );
  if ( cfg.trials < 1 )
    throw param_error( "trials must be at least 1" );
  f.validate();

  pipeline_report rep;
  rep.config = cfg;
  rep.trials = cfg.trials;
  const auto k = cfg.k.value_or( cfg.rw.k );
  const pipeline_options opt{ cfg.p, cfg.q, k, cfg.l, cfg.trim_retries };
  const auto f_table = circuit_table( f );
  const auto h_table = rw_table( cfg.rw );
  const std::size_t target_m = ( cfg.rw.m + 1 ) / 2;

  struct outcome
  {
    bool collapsed = false;
    bool copy = false;
    double corr = 0.0;
  };
  std::vector<outcome> results( cfg.trials );
  parallel_shards( cfg.trials, [&]( std::uint64_t b, std::uint64_t e ) {
    for ( auto i = b; i < e; ++i )
    {
      auto gen = rng::derive( cfg.seed, i );
      const auto sample = fair_pipeline_sample( f, opt, gen );
      auto& o = results[i];
      o.collapsed = sample.diag.collapsed_to_width_k;
      o.copy = gip_copy_check( structure_under_restriction( cfg.rw, sample.rho ), target_m );
      if ( o.collapsed && o.copy )
      {
        const auto fr = apply_restriction( f_table, sample.rho );
        const auto hr = apply_restriction( h_table, sample.rho );
        o.corr = static_cast<double>( fr.agreement( hr ) ) / static_cast<double>( fr.size() ) - 0.5;
      }
    }
  } );

  double sum = 0.0;
  rep.max_gamma_corr = -1.0;
  for ( const auto& o : results )
  {
    rep.sl_failures += o.collapsed ? 0 : 1;
    rep.target_failures += o.copy ? 0 : 1;
    if ( o.collapsed && o.copy )
    {
      ++rep.good;
      rep.gamma_corr.push_back( o.corr );
      rep.max_gamma_corr = std::max( rep.max_gamma_corr, o.corr );
      sum += o.corr;
    }
  }
  if ( rep.good == 0 )
    rep.max_gamma_corr = 0.5;
  else
    rep.mean_gamma_corr = sum / static_cast<double>( rep.good );
  const double t = static_cast<double>( rep.trials );
  rep.gamma_sl = static_cast<double>( rep.sl_failures ) / t;
  rep.gamma_target = static_cast<double>( rep.target_failures ) / t;
  rep.agreement = static_cast<double>( f_table.agreement( h_table ) ) / static_cast<double>( f_table.size() );
  rep.slack = 3.0 * 0.5 / std::sqrt( t );
  rep.rhs = 0.5 + rep.gamma_sl + rep.gamma_target + rep.max_gamma_corr + rep.slack;
  rep.inequality_holds = rep.agreement <= rep.rhs;
  return rep;
}

/// Per-instance accuracy of the generator-based density estimate.
struct count_report
{
  std::uint64_t accepting_seeds = 0;
  std::uint64_t seeds = 0;
  double estimate = 0.0;
  std::optional<double> exact;
  std::optional<double> abs_error;
  bool operator==( const count_report& ) const = default;
};

inline count_report measure_count( const count_target& target, const nw_generator& g )
{
  count_report r;
  r.accepting_seeds = count_accepting_seeds( target, g );
  r.seeds = std::uint64_t{ 1 } << g.seed_length();
  r.estimate = static_cast<double>( r.accepting_seeds ) / static_cast<double>( r.seeds );
  if ( target_arity( target ) <= max_exact_target )
  {
    r.exact = exact_density( target );
    r.abs_error = std::abs( r.estimate - *r.exact );
  }
  return r;
}

// JSON ---------------------------------------------------------------------

inline json with_schema( const std::string& kind, json body, json config = nullptr )
{
  json j = { { "schema", report_schema }, { "report", kind } };
  if ( !config.is_null() )
    j["config"] = std::move( config );
  j.update( body );
  return j;
}

inline json to_json( const fool_report& r )
{
  return { { "mode", to_string( r.mode ) },
           { "seed_hits", r.seed_hits },
           { "seed_samples", r.seed_samples },
           { "uniform_hits", r.uniform_hits },
           { "uniform_samples", r.uniform_samples },
           { "generator_mean", r.generator_mean },
           { "uniform_mean", r.uniform_mean },
           { "bias", r.bias },
           { "half_width", r.half_width },
           { "master_seed", r.master_seed } };
}

inline fool_report fool_report_from_json( const json& j )
{
  fool_report r;
  r.mode = parse_fool_mode( j.at( "mode" ).get<std::string>() );
  r.seed_hits = j.at( "seed_hits" );
  r.seed_samples = j.at( "seed_samples" );
  r.uniform_hits = j.at( "uniform_hits" );
  r.uniform_samples = j.at( "uniform_samples" );
  r.generator_mean = j.at( "generator_mean" );
  r.uniform_mean = j.at( "uniform_mean" );
  r.bias = j.at( "bias" );
  r.half_width = j.at( "half_width" );
  r.master_seed = j.at( "master_seed" );
  return r;
}

inline json to_json( const corr_report& r )
{
  json j = { { "domain", r.domain }, { "agree", r.agree }, { "agreement", r.agreement }, { "correlation", r.correlation } };
  if ( r.gamma )
    j["gamma"] = { { "sl", r.gamma->sl }, { "target", r.gamma->target }, { "corr", r.gamma->corr } };
  if ( r.gamma_err )
    j["gamma_err"] = *r.gamma_err;
  if ( r.gamma_comm )
    j["gamma_comm"] = *r.gamma_comm;
  return j;
}

inline corr_report corr_report_from_json( const json& j )
{
  corr_report r;
  r.domain = j.at( "domain" );
  r.agree = j.at( "agree" );
  r.agreement = j.at( "agreement" );
  r.correlation = j.at( "correlation" );
  if ( j.contains( "gamma" ) )
    r.gamma = gamma_slots{ j["gamma"].at( "sl" ), j["gamma"].at( "target" ), j["gamma"].at( "corr" ) };
  if ( j.contains( "gamma_err" ) )
    r.gamma_err = j["gamma_err"].get<double>();
  if ( j.contains( "gamma_comm" ) )
    r.gamma_comm = j["gamma_comm"].get<double>();
  return r;
}

inline json to_json( const switch_report& r )
{
  json hist = json::object();
  for ( const auto& [d, c] : r.histogram )
    hist[std::to_string( d )] = c;
  return { { "mode", r.mode },
           { "trials", r.trials },
           { "failures", r.failures },
           { "empirical", r.empirical_failure },
           { "raw_bound", r.raw_bound },
           { "bound", r.bound },
           { "vacuous", r.vacuous },
           { "sigma", r.sigma() },
           { "within_3sigma", r.within() },
           { "seed", r.seed },
           { "histogram", hist } };
}

inline switch_report switch_report_from_json( const json& j )
{
  switch_report r;
  r.mode = j.at( "mode" );
  r.trials = j.at( "trials" );
  r.failures = j.at( "failures" );
  r.empirical_failure = j.at( "empirical" );
  r.raw_bound = j.at( "raw_bound" );
  r.bound = j.at( "bound" );
  r.vacuous = j.at( "vacuous" );
  r.seed = j.at( "seed" );
  for ( const auto& [d, c] : j.at( "histogram" ).items() )
    r.histogram[static_cast<unsigned>( std::stoul( d ) )] = c.get<std::uint64_t>();
  return r;
}

inline json to_json( const trim_report& r )
{
  return { { "mode", "trim" },     { "trials", r.trials }, { "failures", r.failures }, { "empirical", r.empirical },
           { "raw_bound", r.raw_bound }, { "bound", r.bound }, { "vacuous", r.vacuous }, { "sigma", r.sigma() },
           { "within_3sigma", r.within() }, { "seed", r.seed }, { "histogram", json::object() } };
}

inline json to_json( const pipeline_config& c )
{
  json j = { { "rw", { c.rw.m, c.rw.k, c.rw.r } }, { "p", c.p },           { "q", c.q },
             { "trials", c.trials },                { "seed", c.seed },     { "trim_retries", c.trim_retries } };
  if ( c.k )
    j["k"] = *c.k;
  if ( c.l )
    j["l"] = *c.l;
  return j;
}

inline pipeline_config pipeline_config_from_json( const json& j )
{
  pipeline_config c;
  if ( j.contains( "rw" ) )
  {
    const auto v = j.at( "rw" ).get<std::vector<std::size_t>>();
    if ( v.size() != 3 )
      throw format_error( "rw is [m, k, r]" );
    c.rw = { v[0], v[1], v[2] };
  }
  c.p = j.value( "p", c.p );
  c.q = j.value( "q", c.q );
  c.trials = j.value( "trials", c.trials );
  c.trim_retries = j.value( "trim_retries", c.trim_retries );
  if ( j.contains( "seed" ) )
    c.seed = j["seed"].is_string() ? parse_hex_u64( j["seed"].get<std::string>() ) : j["seed"].get<std::uint64_t>();
  if ( j.contains( "k" ) )
    c.k = j["k"].get<std::size_t>();
  if ( j.contains( "l" ) )
    c.l = j["l"].get<unsigned>();
  return c;
}

inline json to_json( const pipeline_report& r )
{
  return { { "trials", r.trials },
           { "sl_failures", r.sl_failures },
           { "target_failures", r.target_failures },
           { "good", r.good },
           { "gamma_sl", r.gamma_sl },
           { "gamma_target", r.gamma_target },
           { "max_gamma_corr", r.max_gamma_corr },
           { "mean_gamma_corr", r.mean_gamma_corr },
           { "gamma_corr", r.gamma_corr },
           { "agreement", r.agreement },
           { "slack", r.slack },
           { "rhs", r.rhs },
           { "inequality_holds", r.inequality_holds } };
}

inline pipeline_report pipeline_report_from_json( const json& j )
{
  pipeline_report r;
  if ( j.contains( "config" ) )
    r.config = pipeline_config_from_json( j["config"] );
  r.trials = j.at( "trials" );
  r.sl_failures = j.at( "sl_failures" );
  r.target_failures = j.at( "target_failures" );
  r.good = j.at( "good" );
  r.gamma_sl = j.at( "gamma_sl" );
  r.gamma_target = j.at( "gamma_target" );
  r.max_gamma_corr = j.at( "max_gamma_corr" );
  r.mean_gamma_corr = j.at( "mean_gamma_corr" );
  r.gamma_corr = j.at( "gamma_corr" ).get<std::vector<double>>();
  r.agreement = j.at( "agreement" );
  r.slack = j.at( "slack" );
  r.rhs = j.at( "rhs" );
  r.inequality_holds = j.at( "inequality_holds" );
  return r;
}

inline json to_json( const count_report& r )
{
  json j = { { "accepting_seeds", r.accepting_seeds }, { "seeds", r.seeds }, { "estimate", r.estimate } };
  if ( r.exact )
  {
    j["exact"] = *r.exact;
    j["abs_error"] = *r.abs_error;
  }
  return j;
}

inline json to_json( const nw_params& p )
{
  json j = { { "profile", to_string( p.profile ) },
             { "s", p.s },
             { "eps", p.eps },
             { "tau", p.tau },
             { "c_d", p.c_d },
             { "l", p.l },
             { "r_exponent", p.r_exponent },
             { "r", p.r.str() },
             { "m", p.m.str() },
             { "design_constant", design_constant },
             { "hardness_size", p.hardness_size.str() },
             { "hardness_corr", p.hardness_corr },
             { "log2_hardness_corr", p.log2_hardness_corr } };
  if ( p.desk_r )
  {
    j["desk_r"] = *p.desk_r;
    j["desk_m"] = *p.desk_m;
  }
  return j;
}

inline json to_json( const design_report& r )
{
  return { { "ok", r.ok },
           { "max_overlap", r.max_overlap },
           { "m_over_r2_by_l", std::isfinite( r.m_over_r2_by_l ) ? json( r.m_over_r2_by_l ) : json( "inf" ) },
           { "problem", r.problem } };
}

// CSV ----------------------------------------------------------------------

namespace detail
{
inline std::string csv_value( const json& v )
{
  if ( v.is_string() )
  {
    auto s = v.get<std::string>();
    if ( s.find_first_of( ",\"\n" ) == std::string::npos )
      return s;
    std::string q = "\"";
    for ( char c : s )
      q += c == '"' ? std::string( "\"\"" ) : std::string( 1, c );
    return q + "\"";
  }
  return v.dump();
}
} // namespace detail

/// Header plus one row holding the scalar fields of `j`; nested values are dropped.
inline std::string to_csv( const json& j )
{
  std::string header, row;
  for ( const auto& [key, v] : j.items() )
  {
    if ( v.is_structured() )
      continue;
    header += ( header.empty() ? "" : "," ) + key;
    row += ( row.empty() ? "" : "," ) + detail::csv_value( v );
  }
  return header + "\n" + row + "\n";
}

/// Header plus one row per array element (scalar fields of each element).
inline std::string to_csv_rows( const json& rows )
{
  if ( !rows.is_array() || rows.empty() )
    return "\n";
  std::vector<std::string> keys;
  for ( const auto& [key, v] : rows.front().items() )
    if ( !v.is_structured() )
      keys.push_back( key );
  std::ostringstream os;
  for ( std::size_t i = 0; i < keys.size(); ++i )
    os << ( i ? "," : "" ) << keys[i];
  os << '\n';
  for ( const auto& r : rows )
  {
    for ( std::size_t i = 0; i < keys.size(); ++i )
      os << ( i ? "," : "" ) << ( r.contains( keys[i] ) ? detail::csv_value( r[keys[i]] ) : "" );
    os << '\n';
  }
  return os.str();
}

/// Histogram as `depth,trials` rows for plotting.
inline std::string histogram_csv( const switch_report& r )
{
  std::ostringstream os;
  os << "depth,trials\n";
  for ( const auto& [d, c] : r.histogram )
    os << d << ',' << c << '\n';
  return os.str();
}

} // namespace nwlab
