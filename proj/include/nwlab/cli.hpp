#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "circuit_io.hpp"
#include "designs.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "hardfn.hpp"
#include "nofproto.hpp"
#include "nwgen.hpp"
#include "restrictlab.hpp"

/*!
  \file cli.hpp
  \brief The `nwlab` command line, callable in-process for tests.

  Exit codes: 0 success, 1 validation failure, 2 cap violation, 64 usage error.
*/

namespace nwlab
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 1;
inline constexpr int exit_cap = 2;
inline constexpr int exit_usage = 64;

namespace cli_detail
{

inline std::string slurp( const std::string& path )
{
  std::ifstream is( path );
  if ( !is )
    throw format_error( "cannot open " + path );
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

inline design load_design( const std::string& path )
{
  std::istringstream is( slurp( path ) );
  return read_design( is );
}

/// A target file is a sparse polynomial if it starts with `#`, else circuit JSON.
inline count_target load_target( const std::string& path )
{
  const auto text = slurp( path );
  const auto first = text.find_first_not_of( " \t\r\n" );
  if ( first != std::string::npos && text[first] == '#' )
  {
    std::istringstream is( text );
    return read_sparse_poly( is );
  }
  try
  {
    return circuit_from_json( json::parse( text ) );
  }
  catch ( const json::exception& e )
  {
    throw format_error( path + ": " + e.what() );
  }
}

inline std::vector<std::size_t> parse_list( const std::string& text, std::size_t expected, const std::string& what )
{
  std::vector<std::size_t> v;
  std::stringstream ss( text );
  std::string tok;
  while ( std::getline( ss, tok, ',' ) )
  {
    if ( tok.empty() || tok.find_first_not_of( "0123456789" ) != std::string::npos )
      throw param_error( what + " expects " + std::to_string( expected ) + " comma-separated integers" );
    v.push_back( std::stoull( tok ) );
  }
  if ( v.size() != expected )
    throw param_error( what + " expects " + std::to_string( expected ) + " comma-separated integers" );
  return v;
}

/// `rw:m,k,r`, `gip:m,k`, `parity:r`, `table FILE` or `table:FILE`.
inline hard_function parse_hard( const std::vector<std::string>& args )
{
  if ( args.empty() )
    throw param_error( "missing hard function" );
  const auto& a = args[0];
  const auto colon = a.find( ':' );
  const auto kind = a.substr( 0, colon );
  const auto rest = colon == std::string::npos ? std::string() : a.substr( colon + 1 );
  if ( kind == "table" )
  {
    const auto path = !rest.empty() ? rest : ( args.size() > 1 ? args[1] : std::string() );
    if ( path.empty() )
      throw param_error( "table hard functions need a file" );
    std::istringstream is( slurp( path ) );
    return hard_function::table( read_truth_table( is ) );
  }
  if ( args.size() > 1 )
    throw param_error( "only table hard functions take a file argument" );
  if ( kind == "rw" )
  {
    const auto v = parse_list( rest, 3, "rw" );
    return hard_function::rw( { v[0], v[1], v[2] } );
  }
  if ( kind == "gip" )
  {
    const auto v = parse_list( rest, 2, "gip" );
    return hard_function::gip( { v[0], v[1] + 1 } );
  }
  if ( kind == "parity" )
    return hard_function::parity( parse_list( rest, 1, "parity" )[0] );
  throw param_error( "unknown hard function: " + a );
}

inline std::uint64_t json_seed( const json& j, const char* key, std::uint64_t fallback )
{
  if ( !j.contains( key ) )
    return fallback;
  const auto& v = j.at( key );
  return v.is_string() ? parse_hex_u64( v.get<std::string>() ) : v.get<std::uint64_t>();
}

/// `family` (list of circuits) or `random` {n, s, terms, w, seed}.
inline std::vector<circuit_spec> load_family( const json& cfg )
{
  std::vector<circuit_spec> fam;
  if ( cfg.contains( "family" ) )
  {
    for ( const auto& c : cfg.at( "family" ) )
      fam.push_back( circuit_from_json( c ) );
    return fam;
  }
  if ( !cfg.contains( "random" ) )
    throw format_error( "config needs `family` or `random`" );
  const auto& r = cfg.at( "random" );
  const auto n = r.at( "n" ).get<unsigned>();
  const auto s = r.value( "s", std::size_t{ 1 } );
  const auto terms = r.value( "terms", std::size_t{ 3 } );
  const auto w = r.at( "w" ).get<unsigned>();
  rng gen( json_seed( r, "seed", 1 ) );
  for ( std::size_t i = 0; i < s; ++i )
    fam.push_back( sample_dnf( n, terms, w, gen ) );
  return fam;
}

inline std::string emit( const json& j, bool csv, const std::string& csv_text = {} )
{
  if ( !csv )
    return j.dump( 2 ) + "\n";
  return csv_text.empty() ? to_csv( j ) : csv_text;
}

} // namespace cli_detail

/// Runs one command line; output goes to `out`, diagnostics to `err`.
inline int cli_dispatch( const std::vector<std::string>& argv, std::ostream& out = std::cout, std::ostream& err = std::cerr )
{
  using namespace cli_detail;
  CLI::App app{ "nwlab: Nisan-Wigderson generator and restriction workbench", "nwlab" };
  app.require_subcommand( 1 );
  app.fallthrough();
  bool csv = false;
  app.add_flag( "--csv", csv, "emit CSV instead of JSON" );

  int status = exit_ok;

  // params
  auto* params = app.add_subcommand( "params", "NW parameter calculator" );
  std::string profile = "main";
  std::uint64_t ps = 0;
  double eps = 0.0, tau = 1.0, c_d = 1.0;
  std::optional<std::uint64_t> desk_cap;
  params->add_option( "--profile", profile, "viola|ls11_sym|ls11_thr|main|many_gates" );
  params->add_option( "--s", ps, "circuit size" )->required();
  params->add_option( "--eps", eps, "fooling error" )->required();
  params->add_option( "--tau", tau, "hardness exponent" );
  params->add_option( "--c_d,--cd", c_d, "hardness constant" );
  params->add_option( "--desk-cap", desk_cap, "cap r for a desk-scale instantiation" );
  params->callback( [&] {
    const auto p = compute_nw_params( parse_profile( profile ), ps, eps, tau, c_d, desk_cap );
    const json cfg = { { "profile", profile }, { "s", ps }, { "eps", eps }, { "tau", tau }, { "c_d", c_d } };
    out << emit( with_schema( "params", to_json( p ), cfg ), csv );
  } );

  // design
  auto* design_cmd = app.add_subcommand( "design", "build or verify a combinatorial design" );
  std::optional<std::size_t> ds, dr, dl, dq, dd;
  std::string dout;
  std::uint64_t dseed = 0x5eed;
  bool disjoint = false;
  design_cmd->add_option( "--s", ds, "number of blocks" );
  design_cmd->add_option( "--r", dr, "block size" );
  design_cmd->add_option( "--l", dl, "overlap bound" );
  design_cmd->add_option( "--q", dq, "prime for the polynomial design" );
  design_cmd->add_option( "--d", dd, "polynomial count exponent (degree < d)" );
  design_cmd->add_flag( "--disjoint", disjoint, "disjoint blocks (l = 0)" );
  design_cmd->add_option( "--seed", dseed, "seed for the greedy fallback" );
  design_cmd->add_option( "--out", dout, "write the design here" );
  design_cmd->fallthrough();
  auto* verify = design_cmd->add_subcommand( "verify", "check pairwise intersections" );
  std::string vfile;
  verify->add_option( "file", vfile, "design file" )->required();
  verify->callback( [&] {
    const auto d = load_design( vfile );
    const auto rep = verify_design( d );
    json body = to_json( rep );
    body.update( json{ { "m", d.universe_m }, { "r", d.set_size_r }, { "l", d.overlap_l }, { "s", d.block_count() } } );
    out << emit( with_schema( "design_verify", body, json{ { "file", vfile } } ), csv );
    if ( !rep.ok )
      status = exit_invalid;
  } );
  design_cmd->callback( [&] {
    if ( verify->parsed() )
      return;
    design d;
    json cfg;
    if ( dq || dd )
    {
      if ( !dq || !dd )
        throw param_error( "the polynomial design needs both --q and --d" );
      d = build_design_polynomial( *dq, *dd );
      if ( ds )
      {
        if ( *ds > d.block_count() )
          throw param_error( "--s exceeds the q^d available blocks" );
        d.blocks.resize( *ds );
      }
      cfg = { { "q", *dq }, { "d", *dd } };
    }
    else if ( disjoint )
    {
      if ( !ds || !dr )
        throw param_error( "--disjoint needs --s and --r" );
      d = disjoint_design( *ds, *dr );
      cfg = { { "s", *ds }, { "r", *dr }, { "l", 0 } };
    }
    else
    {
      if ( !ds || !dr || !dl )
        throw CLI::RequiredError( "design needs --s, --r and --l (or --q/--d, or --disjoint)" );
      d = build_design_for( *ds, *dr, *dl, dseed );
      cfg = { { "s", *ds }, { "r", *dr }, { "l", *dl }, { "seed", dseed } };
    }
    const auto rep = verify_design( d );
    if ( !dout.empty() )
    {
      std::ofstream os( dout );
      if ( !os )
        throw format_error( "cannot write " + dout );
      write_design( os, d );
    }
    json body = to_json( rep );
    body.update( json{ { "m", d.universe_m }, { "r", d.set_size_r }, { "l", d.overlap_l }, { "s", d.block_count() } } );
    if ( dout.empty() )
    {
      std::ostringstream os;
      write_design( os, d );
      body["design"] = os.str();
    }
    else
      body["out"] = dout;
    out << emit( with_schema( "design", body, cfg ), csv );
    if ( !rep.ok )
      status = exit_invalid;
  } );

  // shared generator flags
  struct gen_flags
  {
    std::string design_file;
    std::vector<std::string> hard;
    std::size_t len = 0;
  };
  auto add_gen_flags = []( CLI::App* sub, gen_flags& g ) {
    sub->add_option( "--design", g.design_file, "design file" )->required();
    sub->add_option( "--hard", g.hard, "rw:m,k,r | gip:m,k | parity:r | table FILE" )->required()->expected( 1, 2 );
    sub->add_option( "--len", g.len, "output length (default: all blocks)" );
  };
  auto make_gen = []( const gen_flags& g ) { return nw_generator( load_design( g.design_file ), parse_hard( g.hard ), g.len ); };
  auto gen_config = []( const gen_flags& g, const nw_generator& G ) {
    return json{ { "design", g.design_file }, { "hard", G.hard().describe() }, { "m", G.seed_length() }, { "len", G.output_length() } };
  };

  // gen
  auto* gen_cmd = app.add_subcommand( "gen", "print generator output bits for one seed" );
  gen_flags gf;
  std::string seed_hex;
  add_gen_flags( gen_cmd, gf );
  gen_cmd->add_option( "--seed", seed_hex, "seed as hex; bit 0 is the least significant bit" )->required();
  gen_cmd->callback( [&] {
    const auto G = make_gen( gf );
    const auto z = parse_hex_bits( seed_hex, G.seed_length() );
    const auto y = G.generate( z );
    auto cfg = gen_config( gf, G );
    cfg["seed"] = seed_hex;
    out << emit( with_schema( "gen", { { "seed_bits", bits_to_string( z ) }, { "output", bits_to_string( y ) } }, cfg ), csv );
  } );

  // fool
  auto* fool_cmd = app.add_subcommand( "fool", "bias of a test against the generator" );
  gen_flags ff;
  std::string ftarget, fmode = "exact";
  std::uint64_t fsamples = 0, fseed = 0;
  add_gen_flags( fool_cmd, ff );
  fool_cmd->add_option( "--target", ftarget, "circuit JSON or sparse polynomial" )->required();
  fool_cmd->add_option( "--mode", fmode, "exact | monte_carlo" );
  fool_cmd->add_option( "--samples", fsamples, "Monte-Carlo samples per side" );
  fool_cmd->add_option( "--seed", fseed, "master seed" );
  fool_cmd->callback( [&] {
    const auto G = make_gen( ff );
    const auto t = load_target( ftarget );
    const auto rep = measure_bias( t, G, parse_fool_mode( fmode ), fsamples, fseed );
    auto cfg = gen_config( ff, G );
    cfg.update( json{ { "target", ftarget }, { "mode", fmode }, { "samples", fsamples }, { "seed", fseed } } );
    out << emit( with_schema( "fool", to_json( rep ), cfg ), csv );
  } );

  // count
  auto* count_cmd = app.add_subcommand( "count", "density estimate from generator seeds" );
  gen_flags cf;
  std::string ctarget;
  add_gen_flags( count_cmd, cf );
  count_cmd->add_option( "--target", ctarget, "circuit JSON or sparse polynomial" )->required();
  count_cmd->callback( [&] {
    const auto G = make_gen( cf );
    const auto rep = measure_count( load_target( ctarget ), G );
    auto cfg = gen_config( cf, G );
    cfg["target"] = ctarget;
    out << emit( with_schema( "count", to_json( rep ), cfg ), csv );
  } );

  // corr
  auto* corr_cmd = app.add_subcommand( "corr", "exact agreement of a circuit with a hard function" );
  std::string corr_circuit;
  std::vector<std::string> corr_hard;
  corr_cmd->add_option( "--circuit", corr_circuit, "circuit JSON" )->required();
  corr_cmd->add_option( "--hard", corr_hard, "rw:m,k,r | gip:m,k | parity:r | table FILE" )->required()->expected( 1, 2 );
  corr_cmd->callback( [&] {
    const auto c = read_circuit_file( corr_circuit );
    const auto h = parse_hard( corr_hard );
    const auto rep = measure_correlation( c, h );
    out << emit( with_schema( "corr", to_json( rep ), { { "circuit", corr_circuit }, { "hard", h.describe() } } ), csv );
  } );

  // switch
  auto* switch_cmd = app.add_subcommand( "switch", "switching-lemma experiments" );
  std::string smode = "single", sconfig;
  switch_cmd->add_option( "--mode", smode, "single | multi | trim" )->check( CLI::IsMember( { "single", "multi", "trim" } ) );
  switch_cmd->add_option( "--config", sconfig, "experiment config JSON" )->required();
  switch_cmd->callback( [&] {
    const auto cfg = read_json_file( sconfig );
    const auto trials = cfg.value( "trials", std::uint64_t{ 1000 } );
    const auto seed = json_seed( cfg, "seed", 0 );
    if ( smode == "trim" && cfg.contains( "blocks" ) )
    {
      const auto blocks = cfg.at( "blocks" ).get<std::vector<std::vector<std::size_t>>>();
      const auto rep = trim_check( blocks, cfg.at( "n" ).get<std::size_t>(), cfg.at( "q" ).get<double>(), cfg.at( "k" ).get<std::size_t>(), trials, seed );
      out << emit( with_schema( "switch", to_json( rep ), cfg ), csv );
      return;
    }
    const auto family = load_family( cfg );
    if ( smode == "trim" )
    {
      std::vector<std::vector<std::size_t>> blocks;
      for ( const auto& f : family )
        for ( const auto& ch : f.children )
          if ( const auto* g = std::get_if<and_gate>( &ch ) )
          {
            std::vector<std::size_t> b;
            for ( const auto& l : g->lits )
              b.push_back( l.var );
            blocks.push_back( std::move( b ) );
          }
      const auto rep = trim_check( blocks, family.front().n, cfg.at( "q" ).get<double>(), cfg.at( "k" ).get<std::size_t>(), trials, seed );
      out << emit( with_schema( "switch", to_json( rep ), cfg ), csv );
      return;
    }
    switch_config sc;
    sc.family = family;
    sc.p = cfg.at( "p" ).get<double>();
    sc.t = cfg.at( "t" ).get<unsigned>();
    if ( cfg.contains( "l" ) )
      sc.l = cfg["l"].get<unsigned>();
    sc.trials = trials;
    sc.seed = seed;
    const auto rep = smode == "single" ? single_switch_experiment( sc ) : multi_switch_experiment( sc );
    out << emit( with_schema( "switch", to_json( rep ), cfg ), csv );
  } );

  // nof
  auto* nof_cmd = app.add_subcommand( "nof", "Hastad-Goldmann NOF protocol" );
  std::string ncircuit, npartition, ninput;
  nof_cmd->add_option( "--circuit", ncircuit, "SYM o AND circuit JSON (or ANY over such)" );
  nof_cmd->add_option( "--partition", npartition, "one line of indices per player" );
  nof_cmd->add_option( "--input", ninput, "input as hex; bit 0 is x_0" );
  nof_cmd->fallthrough();
  auto* nof_corr = nof_cmd->add_subcommand( "corr", "exact correlation with GIP" );
  std::string gip_spec, against;
  double gamma_comm = 0.25;
  nof_corr->add_option( "--gip", gip_spec, "m,k for GIP_{m,k+1}" )->required();
  nof_corr->add_option( "--against", against, "circuit JSON or array of circuits" )->required();
  nof_corr->add_option( "--gamma-comm", gamma_comm, "gamma_comm for the budget column" );
  nof_corr->callback( [&] {
    const auto v = parse_list( gip_spec, 2, "--gip" );
    const gip_params g{ v[0], v[1] + 1 };
    const auto j = read_json_file( against );
    std::vector<circuit_spec> cs;
    if ( j.is_array() )
      for ( const auto& c : j )
        cs.push_back( circuit_from_json( c ) );
    else
      cs.push_back( circuit_from_json( j ) );
    const auto rep = gip_correlation_scan( g, cs, gamma_comm );
    json entries = json::array();
    for ( std::size_t i = 0; i < rep.entries.size(); ++i )
      entries.push_back( { { "index", i },
                           { "agree", rep.entries[i].agree },
                           { "agreement", rep.entries[i].agreement },
                           { "correlation", rep.entries[i].correlation },
                           { "bns_budget", rep.bns_budget } } );
    const json body = { { "domain", rep.domain }, { "gamma_comm", rep.gamma_comm }, { "bns_budget", rep.bns_budget }, { "entries", entries } };
    out << emit( with_schema( "nof_corr", body, { { "gip", gip_spec }, { "against", against } } ), csv, csv ? to_csv_rows( entries ) : "" );
  } );
  nof_cmd->callback( [&] {
    if ( nof_corr->parsed() )
      return;
    if ( ncircuit.empty() || npartition.empty() || ninput.empty() )
      throw CLI::RequiredError( "nof needs --circuit, --partition and --input" );
    const auto c = read_circuit_file( ncircuit );
    std::istringstream ps_( slurp( npartition ) );
    const auto part = nof_partition::parse( ps_, c.n );
    const auto bits = parse_hex_bits( ninput, c.n );
    std::uint64_t x = 0;
    for ( std::size_t i = 0; i < bits.size(); ++i )
      x |= std::uint64_t{ bits[i] } << i;
    const auto tr = c.top.kind == top_kind::any ? run_hg_protocol_any( c, part, x ) : run_hg_protocol( c, part, x );
    json msgs = json::array();
    for ( const auto& m : tr.messages )
      msgs.push_back( { { "player", m.player }, { "bits", m.bits } } );
    const json body = { { "messages", msgs },
                        { "total_bits", tr.total_bits },
                        { "output", tr.output },
                        { "circuit_output", c.eval( x ) } };
    const json cfg = { { "circuit", ncircuit }, { "partition", npartition }, { "input", ninput } };
    out << emit( with_schema( "nof", body, cfg ), csv, csv ? to_csv_rows( msgs ) : "" );
  } );

  // pipeline
  auto* pipe_cmd = app.add_subcommand( "pipeline", "fair-restriction pipeline experiment" );
  std::string pconfig;
  pipe_cmd->add_option( "--config", pconfig, "experiment config JSON" )->required();
  pipe_cmd->callback( [&] {
    const auto j = read_json_file( pconfig );
    const auto pc = pipeline_config_from_json( j );
    circuit_spec f;
    if ( j.contains( "circuit" ) )
      f = circuit_from_json( j["circuit"] );
    else if ( j.contains( "circuit_file" ) )
      f = read_circuit_file( j["circuit_file"].get<std::string>() );
    else if ( j.contains( "random" ) )
    {
      const auto& r = j["random"];
      circuit_descriptor d;
      d.top = top_kind::sym;
      d.s = r.value( "s", std::size_t{ 6 } );
      d.width = r.value( "width", 3u );
      rng gen( json_seed( r, "seed", 1 ) );
      f = sample_circuit( d, static_cast<unsigned>( pc.rw.n() ), gen );
    }
    else
      throw format_error( "pipeline config needs `circuit`, `circuit_file` or `random`" );
    const auto rep = pipeline_experiment( f, pc );
    out << emit( with_schema( "pipeline", to_json( rep ), j ), csv );
    if ( !rep.inequality_holds )
      status = exit_invalid;
  } );

  std::vector<std::string> args( argv.rbegin(), argv.rend() );
  try
  {
    app.parse( args );
  }
  catch ( const CLI::CallForHelp& )
  {
    out << app.help();
    return exit_ok;
  }
  catch ( const CLI::CallForAllHelp& )
  {
    out << app.help( "", CLI::AppFormatMode::All );
    return exit_ok;
  }
  catch ( const CLI::ParseError& e )
  {
    err << "nwlab: " << e.what() << "\n";
    return exit_usage;
  }
  catch ( const cap_error& e )
  {
    err << "nwlab: cap violation: " << e.what() << "\n";
    return exit_cap;
  }
  catch ( const std::exception& e )
  {
    err << "nwlab: " << e.what() << "\n";
    return exit_invalid;
  }
  return status;
}

inline int cli_dispatch( int argc, char** argv )
{
  std::vector<std::string> args;
  for ( int i = 1; i < argc; ++i )
    args.emplace_back( argv[i] );
  return cli_dispatch( args );
}

} // namespace nwlab
