#include <gtest/gtest.h>

#include <cmath>

#include <nwlab/boolcore.hpp>

#include "oracles.hpp"

using namespace nwlab;

namespace
{

truth_table random_table( unsigned n, rng& gen )
{
  return truth_table::from_function( n, [&gen]( std::uint64_t ) { return gen.bit(); } );
}

std::string random_restriction_text( std::size_t n, rng& gen )
{
  std::string s;
  for ( std::size_t i = 0; i < n; ++i )
    s.push_back( "01*"[gen.below( 3 )] );
  return s;
}

} // namespace

TEST( TruthTable, ConstantIsZeroEverywhere )
{
  const auto f = truth_table::constant( 5, false );
  for ( std::uint64_t x = 0; x < 32; ++x )
    EXPECT_FALSE( f.eval( x ) );
}

TEST( TruthTable, IdentityOnOneVariable )
{
  const auto f = truth_table::projection( 1, 0 );
  EXPECT_TRUE( f.eval( 1 ) );
  EXPECT_FALSE( f.eval( 0 ) );
}

TEST( TruthTable, ParityOfThreeBits )
{
  const auto f = truth_table::parity( 3 );
  const std::vector<std::uint8_t> x{ 1, 1, 0 };
  EXPECT_FALSE( f.eval( x ) );
  for ( std::uint64_t v = 0; v < 8; ++v )
  {
    const auto b = oracle::unpack( v, 3 );
    EXPECT_EQ( f.eval( v ), ( ( b[0] + b[1] + b[2] ) % 2 ) == 1 );
  }
}

TEST( TruthTable, DimensionMismatchThrows )
{
  const auto f = truth_table::parity( 3 );
  const std::vector<std::uint8_t> x{ 1, 1 };
  EXPECT_THROW( f.eval( x ), dimension_error );
  EXPECT_THROW( f.eval( std::uint64_t{ 8 } ), dimension_error );
}

TEST( TruthTable, StringRoundTrip )
{
  rng gen( 3 );
  for ( unsigned n = 0; n <= 9; ++n )
  {
    const auto f = random_table( n, gen );
    EXPECT_EQ( truth_table::from_string( f.to_string() ), f );
  }
  EXPECT_THROW( truth_table::from_string( "010" ), format_error );
}

TEST( TruthTable, CapAt28Variables ) { EXPECT_THROW( truth_table( 29 ), cap_error ); }

TEST( TruthTable, CountAndAgreement )
{
  rng gen( 5 );
  const auto f = random_table( 8, gen ), g = random_table( 8, gen );
  std::uint64_t ones = 0, agree = 0;
  for ( std::uint64_t x = 0; x < 256; ++x )
  {
    ones += f.get( x );
    agree += f.get( x ) == g.get( x );
  }
  EXPECT_EQ( f.count_ones(), ones );
  EXPECT_EQ( f.agreement( g ), agree );
  EXPECT_EQ( ( ~f ).count_ones(), 256 - ones );
}

TEST( Restriction, ParseAndPrint )
{
  const auto r = restriction::parse( "01**1*0" );
  EXPECT_EQ( r.size(), 7u );
  EXPECT_EQ( r.star_count(), 3u );
  EXPECT_EQ( r.fixed_count(), 4u );
  EXPECT_EQ( r.to_string(), "01**1*0" );
  EXPECT_THROW( restriction::parse( "01x" ), format_error );
}

TEST( ApplyRestriction, AllStarLeavesFunctionUnchanged )
{
  rng gen( 7 );
  const auto f = random_table( 6, gen );
  EXPECT_EQ( apply_restriction( f, restriction::all_star( 6 ) ), f );
}

TEST( ApplyRestriction, ParityWithOneFixedBitIsNegation )
{
  const auto g = apply_restriction( truth_table::parity( 2 ), restriction::parse( "1*" ) );
  EXPECT_EQ( g.num_vars(), 1u );
  EXPECT_TRUE( g.get( 0 ) );
  EXPECT_FALSE( g.get( 1 ) );
}

TEST( ApplyRestriction, MatchesCompletionEnumeration )
{
  rng gen( 11 );
  for ( int trial = 0; trial < 60; ++trial )
  {
    const unsigned n = trial < 10 ? 4 : 1 + static_cast<unsigned>( gen.below( 8 ) );
    const auto f = random_table( n, gen );
    const auto text = trial < 10 ? std::string( "0*1*" ) : random_restriction_text( n, gen );
    const auto got = apply_restriction( f, restriction::parse( text ) );
    const auto want = oracle::restrict_table( [&f]( const oracle::bits& x ) { return f.get( oracle::pack( x ) ) ? 1 : 0; }, text );
    ASSERT_EQ( got.size(), want.size() );
    for ( std::uint64_t y = 0; y < want.size(); ++y )
      EXPECT_EQ( got.get( y ), want[y] == 1 ) << text;
  }
}

TEST( ApplyRestriction, LengthMismatchThrows )
{
  EXPECT_THROW( apply_restriction( truth_table::parity( 3 ), restriction::parse( "0*" ) ), dimension_error );
}

TEST( Compose, LeftIdentityAndRule )
{
  const auto r2 = restriction::parse( "0*1" );
  EXPECT_EQ( compose( restriction::all_star( 3 ), r2 ), r2 );
  EXPECT_EQ( compose( restriction::parse( "*10" ), restriction::parse( "0*1" ) ).to_string(), "010" );
  EXPECT_THROW( compose( r2, restriction::parse( "**" ) ), dimension_error );
}

TEST( Compose, ContravariantWithApply )
{
  rng gen( 13 );
  for ( int trial = 0; trial < 200; ++trial )
  {
    const auto f = random_table( 8, gen );
    const auto rho = restriction::parse( random_restriction_text( 8, gen ) );
    const auto rho2 = restriction::parse( random_restriction_text( 8, gen ) );
    const auto both = compose( rho, rho2 );
    EXPECT_EQ( apply_restriction( f, both ), apply_restriction( apply_restriction( f, rho ), rho.induced_on_stars( rho2 ) ) );
    std::size_t common = 0;
    for ( std::size_t i = 0; i < 8; ++i )
      common += rho.is_star( i ) && rho2.is_star( i );
    EXPECT_EQ( both.star_count(), common );
  }
}

TEST( Restriction, LiftInvertsInduced )
{
  rng gen( 17 );
  for ( int trial = 0; trial < 100; ++trial )
  {
    const auto rho = restriction::parse( random_restriction_text( 10, gen ) );
    const auto rho2 = restriction::parse( random_restriction_text( 10, gen ) );
    EXPECT_EQ( rho.lift( rho.induced_on_stars( rho2 ) ), compose( rho, rho2 ) );
  }
}

TEST( SampleRp, Boundaries )
{
  rng gen( 1 );
  const auto none = sample_rp( 200, 0.0, gen );
  EXPECT_EQ( none.star_count(), 0u );
  std::size_t ones = 0;
  for ( std::size_t i = 0; i < 200; ++i )
    ones += none[i] == cell::one;
  EXPECT_NEAR( static_cast<double>( ones ), 100.0, 3 * std::sqrt( 50.0 ) );
  EXPECT_EQ( sample_rp( 200, 1.0, gen ).star_count(), 200u );
  EXPECT_THROW( sample_rp( 3, 1.5, gen ), param_error );
}

TEST( SampleRp, StarFractionConcentrates )
{
  rng gen( 2 );
  double total = 0;
  const int trials = 10000;
  for ( int t = 0; t < trials; ++t )
    total += static_cast<double>( sample_rp( 1000, 0.3, gen ).star_count() );
  const double mean = total / ( 1000.0 * trials );
  const double sigma = std::sqrt( 0.3 * 0.7 / ( 1000.0 * trials ) );
  EXPECT_LE( std::abs( mean - 0.3 ), 3 * sigma );
}

TEST( SampleRp, ReproducibleFromSeed )
{
  rng a( 99 ), b( 99 );
  for ( int t = 0; t < 20; ++t )
    EXPECT_EQ( sample_rp( 30, 0.4, a ), sample_rp( 30, 0.4, b ) );
}

TEST( SampleSubset, BoundariesAndMean )
{
  rng gen( 4 );
  EXPECT_TRUE( sample_subset( 50, 0.0, gen ).empty() );
  EXPECT_EQ( sample_subset( 50, 1.0, gen ).size(), 50u );
  double total = 0;
  const int trials = 10000;
  for ( int t = 0; t < trials; ++t )
    total += static_cast<double>( sample_subset( 500, 0.2, gen ).size() );
  const double sigma = std::sqrt( 500 * 0.2 * 0.8 / trials );
  EXPECT_LE( std::abs( total / trials - 100.0 ), 3 * sigma );
}

// Exact fairness of R_p: summing Pr[rho] * 2^-stars over all (rho, completion)
// pairs lands on the uniform distribution for every p.
TEST( Fairness, RpCompletionIsExactlyUniform )
{
  for ( double p : { 0.0, 0.1, 0.5, 0.9, 1.0 } )
    for ( std::size_t n = 1; n <= 4; ++n )
    {
      std::vector<double> mass( std::size_t{ 1 } << n, 0.0 );
      std::uint64_t total = 1;
      for ( std::size_t i = 0; i < n; ++i )
        total *= 3;
      for ( std::uint64_t code = 0; code < total; ++code )
      {
        std::string text;
        auto c = code;
        double pr = 1.0;
        for ( std::size_t i = 0; i < n; ++i, c /= 3 )
        {
          text.push_back( "01*"[c % 3] );
          pr *= c % 3 == 2 ? p : ( 1 - p ) / 2;
        }
        const auto comps = oracle::completions( text );
        for ( const auto& x : comps )
          mass[oracle::pack( x )] += pr / static_cast<double>( comps.size() );
      }
      for ( double v : mass )
        EXPECT_NEAR( v, 1.0 / static_cast<double>( mass.size() ), 1e-12 );
    }
}
