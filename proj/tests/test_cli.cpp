#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <sys/wait.h>

#include <nwlab/cli.hpp>

using namespace nwlab;

namespace
{

const std::string samples = NWLAB_SAMPLES_DIR;

struct result
{
  int code;
  std::string out;
  std::string err;
  json j() const { return json::parse( out ); }
};

result run( std::vector<std::string> args )
{
  std::ostringstream out, err;
  const int code = cli_dispatch( args, out, err );
  return { code, out.str(), err.str() };
}

std::string sample( const std::string& name ) { return samples + "/" + name; }

std::string temp_path( const std::string& name )
{
  return ( std::filesystem::temp_directory_path() / ( "nwlab_test_" + name ) ).string();
}

} // namespace

TEST( Cli, ParamsMainProfile )
{
  const auto r = run( { "params", "--profile", "main", "--s", "65536", "--eps", "0.0009765625", "--tau", "2" } );
  ASSERT_EQ( r.code, exit_ok ) << r.err;
  const auto j = r.j();
  EXPECT_EQ( j.at( "schema" ), 1 );
  EXPECT_EQ( j.at( "report" ), "params" );
  EXPECT_EQ( j.at( "l" ), 16 );
  EXPECT_EQ( j.at( "r" ), "1099511628463" );
}

TEST( Cli, DesignThenVerify )
{
  const auto path = temp_path( "design.txt" );
  const auto r = run( { "design", "--s", "9", "--r", "3", "--l", "1", "--out", path } );
  ASSERT_EQ( r.code, exit_ok ) << r.err;
  EXPECT_TRUE( r.j().at( "ok" ) );
  const auto v = run( { "design", "verify", path } );
  EXPECT_EQ( v.code, exit_ok );
  EXPECT_EQ( v.j().at( "max_overlap" ), 1 );
  std::filesystem::remove( path );
}

TEST( Cli, VerifyRejectsBadDesign )
{
  const auto path = temp_path( "twin.txt" );
  {
    std::ofstream os( path );
    os << "4 2 1 2\n0 1\n0 1\n";
  }
  const auto v = run( { "design", "verify", path } );
  EXPECT_EQ( v.code, exit_invalid );
  EXPECT_FALSE( v.j().at( "ok" ) );
  std::filesystem::remove( path );
}

TEST( Cli, PolynomialAndDisjointDesigns )
{
  const auto p = run( { "design", "--q", "5", "--d", "2", "--s", "20" } );
  ASSERT_EQ( p.code, exit_ok ) << p.err;
  EXPECT_EQ( p.j().at( "s" ), 20 );
  const auto d = run( { "design", "--disjoint", "--s", "3", "--r", "2" } );
  ASSERT_EQ( d.code, exit_ok );
  EXPECT_EQ( d.j().at( "design" ), "6 2 0 3\n0 1\n2 3\n4 5\n" );
}

TEST( Cli, GenMatchesLibrary )
{
  const auto r = run( { "gen", "--design", sample( "design_16x4.txt" ), "--hard", "rw:1,1,2", "--seed", "0xbeef" } );
  ASSERT_EQ( r.code, exit_ok ) << r.err;
  std::ifstream is( sample( "design_16x4.txt" ) );
  const nw_generator g( read_design( is ), hard_function::rw( { 1, 1, 2 } ) );
  const auto y = g.generate( parse_hex_bits( "0xbeef", 16 ) );
  EXPECT_EQ( r.j().at( "output" ), bits_to_string( y ) );
}

TEST( Cli, FoolAndCount )
{
  const auto f = run( { "fool", "--design", sample( "design_16x4.txt" ), "--hard", "rw:1,1,2", "--target", sample( "poly_8vars.txt" ) } );
  ASSERT_EQ( f.code, exit_ok ) << f.err;
  const auto c = run( { "count", "--design", sample( "design_16x4.txt" ), "--hard", "rw:1,1,2", "--target", sample( "poly_8vars.txt" ) } );
  ASSERT_EQ( c.code, exit_ok ) << c.err;
  EXPECT_DOUBLE_EQ( f.j().at( "generator_mean" ).get<double>(), c.j().at( "estimate" ).get<double>() );
  EXPECT_DOUBLE_EQ( c.j().at( "exact" ).get<double>(), f.j().at( "uniform_mean" ).get<double>() );
}

TEST( Cli, CorrAgainstTableFile )
{
  const auto r = run( { "corr", "--circuit", sample( "sym_and2_n9.json" ), "--hard", "gip:3,2" } );
  ASSERT_EQ( r.code, exit_ok ) << r.err;
  EXPECT_EQ( r.j().at( "domain" ), 512 );
  const auto bad = run( { "corr", "--circuit", sample( "sym_and2_n9.json" ), "--hard", "table", sample( "table_parity3.txt" ) } );
  EXPECT_EQ( bad.code, exit_invalid );
}

TEST( Cli, SwitchModes )
{
  for ( const std::string mode : { "single", "multi", "trim" } )
  {
    const auto r = run( { "switch", "--mode", mode, "--config", sample( "switch_" + mode + ".json" ) } );
    ASSERT_EQ( r.code, exit_ok ) << r.err;
    EXPECT_TRUE( r.j().at( "within_3sigma" ) ) << mode;
  }
}

TEST( Cli, NofTranscriptAndCorr )
{
  const auto r = run( { "nof", "--circuit", sample( "sym_and2_n9.json" ), "--partition", sample( "partition_3x3.txt" ), "--input", "0x1a5" } );
  ASSERT_EQ( r.code, exit_ok ) << r.err;
  EXPECT_EQ( r.j().at( "output" ), r.j().at( "circuit_output" ) );
  EXPECT_EQ( r.j().at( "total_bits" ), 12 );
  const auto c = run( { "nof", "corr", "--gip", "2,1", "--against", sample( "gip22_against.json" ) } );
  ASSERT_EQ( c.code, exit_ok ) << c.err;
  EXPECT_EQ( c.j().at( "entries" )[0].at( "agree" ), 10 );
  EXPECT_EQ( c.j().at( "entries" )[1].at( "agreement" ), 1.0 );
}

TEST( Cli, Pipeline )
{
  const auto r = run( { "pipeline", "--config", sample( "pipeline.json" ) } );
  ASSERT_EQ( r.code, exit_ok ) << r.err;
  EXPECT_TRUE( r.j().at( "inequality_holds" ) );
  EXPECT_EQ( r.j().at( "config" ).at( "trials" ), 500 );
}

TEST( Cli, CsvOutput )
{
  const auto r = run( { "params", "--s", "1024", "--eps", "0.01", "--csv" } );
  ASSERT_EQ( r.code, exit_ok ) << r.err;
  std::istringstream is( r.out );
  std::string header, row, extra;
  std::getline( is, header );
  std::getline( is, row );
  EXPECT_NE( header.find( "schema" ), std::string::npos );
  EXPECT_EQ( std::count( header.begin(), header.end(), ',' ), std::count( row.begin(), row.end(), ',' ) );
  EXPECT_FALSE( std::getline( is, extra ) && !extra.empty() );
}

TEST( Cli, ExitCodes )
{
  EXPECT_EQ( run( {} ).code, exit_usage );
  EXPECT_EQ( run( { "frobnicate" } ).code, exit_usage );
  EXPECT_EQ( run( { "params", "--s", "8" } ).code, exit_usage );
  EXPECT_EQ( run( { "params", "--s", "1", "--eps", "0.5" } ).code, exit_invalid );
  EXPECT_EQ( run( { "design", "--q", "4", "--d", "2" } ).code, exit_invalid );
  EXPECT_EQ( run( { "design", "--q", "2", "--d", "25" } ).code, exit_cap );
  EXPECT_EQ( run( { "gen", "--design", sample( "design_16x4.txt" ), "--hard", "rw:1,1,2", "--seed", "0x1ffff" } ).code,
             exit_invalid );
  EXPECT_EQ( run( { "gen", "--design", sample( "missing.txt" ), "--hard", "rw:1,1,2", "--seed", "0" } ).code, exit_invalid );
  EXPECT_EQ( run( { "--help" } ).code, exit_ok );
}

TEST( Cli, BinaryHonoursExitCodes )
{
  const std::string bin = NWLAB_CLI_PATH;
  const auto status = []( const std::string& cmd ) {
    const int s = std::system( ( cmd + " >/dev/null 2>&1" ).c_str() );
    return WIFEXITED( s ) ? WEXITSTATUS( s ) : -1;
  };
  EXPECT_EQ( status( bin + " params --s 4 --eps 0.5" ), 0 );
  EXPECT_EQ( status( bin + " nope" ), 64 );
  EXPECT_EQ( status( "NWLAB_WORKERS=2 " + bin + " design --q 2 --d 25" ), 2 );
}
