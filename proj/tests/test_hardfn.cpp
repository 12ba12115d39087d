#include <gtest/gtest.h>

#include <cmath>

#include <nwlab/hardfn.hpp>

#include "oracles.hpp"

using namespace nwlab;

namespace
{

std::vector<std::uint8_t> to_bytes( std::uint64_t x, std::size_t n )
{
  std::vector<std::uint8_t> b( n );
  for ( std::size_t i = 0; i < n; ++i )
    b[i] = ( x >> i ) & 1;
  return b;
}

struct recount
{
  std::size_t alive = 0;
  std::size_t min_free = 0;
};

// Rows whose every block keeps a star, and the fewest stars among their blocks.
recount direct_recount( const rw_params& p, const restriction& rho )
{
  recount out;
  std::size_t best = SIZE_MAX;
  for ( std::size_t i = 0; i < p.m; ++i )
  {
    std::vector<std::size_t> counts;
    for ( std::size_t j = 0; j <= p.k; ++j )
    {
      std::size_t c = 0;
      for ( std::size_t t = 0; t < p.r; ++t )
        c += rho[( i * ( p.k + 1 ) + j ) * p.r + t] == cell::star;
      counts.push_back( c );
    }
    if ( *std::min_element( counts.begin(), counts.end() ) > 0 )
    {
      ++out.alive;
      best = std::min( best, *std::min_element( counts.begin(), counts.end() ) );
    }
  }
  out.min_free = out.alive ? best : 0;
  return out;
}

} // namespace

TEST( Gip, Basics )
{
  EXPECT_FALSE( eval_gip( { 3, 2 }, std::uint64_t{ 0 } ) );
  EXPECT_TRUE( eval_gip( { 1, 2 }, std::vector<std::uint8_t>{ 1, 1 } ) );
  EXPECT_THROW( eval_gip( { 1, 2 }, std::vector<std::uint8_t>{ 1 } ), dimension_error );
}

TEST( Gip, MatchesDefinitionalLoop )
{
  const gip_params g{ 4, 3 };
  rng gen( 51 );
  for ( int t = 0; t < 500; ++t )
  {
    const auto x = gen.next() & 0xfff;
    const auto b = oracle::unpack( x, 12 );
    EXPECT_EQ( eval_gip( g, x ), oracle::gip( 4, 3, b ) == 1 );
    EXPECT_EQ( eval_gip( g, to_bytes( x, 12 ) ), oracle::gip( 4, 3, b ) == 1 );
  }
}

TEST( Gip, ZeroCountOfGip22 )
{
  // 10 of the 16 inputs of GIP_{2,2} are zeros
  EXPECT_EQ( gip_table( { 2, 2 } ).count_ones(), 6u );
}

TEST( Rw, DegenerateParity )
{
  const rw_params p{ 1, 0, 2 };
  EXPECT_TRUE( eval_rw( p, std::vector<std::uint8_t>{ 1, 0 } ) );
  EXPECT_FALSE( eval_rw( p, std::uint64_t{ 0 } ) );
}

TEST( Rw, MatchesTripleLoop )
{
  const rw_params p{ 3, 1, 2 };
  for ( std::uint64_t x = 0; x < ( 1u << 12 ); ++x )
  {
    const auto b = oracle::unpack( x, 12 );
    ASSERT_EQ( eval_rw( p, x ), oracle::rw( 3, 1, 2, b ) == 1 );
    ASSERT_EQ( eval_rw( p, to_bytes( x, 12 ) ), oracle::rw( 3, 1, 2, b ) == 1 );
  }
}

TEST( Rw, DegeneratesToParityAndGip )
{
  for ( std::size_t r = 1; r <= 16; ++r )
    EXPECT_EQ( rw_table( { 1, 0, r } ), truth_table::parity( static_cast<unsigned>( r ) ) );
  for ( std::size_t m = 1; m <= 4; ++m )
    for ( std::size_t k = 0; k <= 3 && m * ( k + 1 ) <= 16; ++k )
      EXPECT_EQ( rw_table( { m, k, 1 } ), gip_table( { m, k + 1 } ) );
}

TEST( RwParams, TextRoundTrip )
{
  const rw_params p{ 3, 1, 5 };
  EXPECT_EQ( p.to_string(), "3 1 5" );
  EXPECT_EQ( rw_params::parse( "3 1 5" ), p );
  EXPECT_THROW( rw_params::parse( "3 1" ), format_error );
}

TEST( RwParamsFromN, Examples )
{
  EXPECT_EQ( rw_params_from_n( 12, 1 ), ( rw_params{ 2, 1, 2 } ) );
  EXPECT_EQ( rw_params_from_n( 4, 1 ), ( rw_params{ 1, 1, 1 } ) );
  const auto big = rw_params_from_n( 1000000 );
  EXPECT_EQ( big.k, 1u );
  EXPECT_EQ( big.m, static_cast<std::size_t>( std::floor( std::sqrt( 1000000.0 / 2 ) ) ) );
  EXPECT_EQ( big.m, big.r );
  EXPECT_LE( big.n(), 1000000u );
  EXPECT_THROW( rw_params_from_n( 3 ), param_error );
  EXPECT_THROW( rw_params_from_n( 5, 8 ), param_error );
}

TEST( Structure, AllStarAndAllFixed )
{
  const rw_params p{ 2, 1, 3 };
  const auto all = structure_under_restriction( p, restriction::all_star( 12 ) );
  EXPECT_EQ( all.copy_params, p );
  EXPECT_FALSE( all.b );
  const auto none = structure_under_restriction( p, restriction::from_assignment( 12, 0x5a5 ) );
  EXPECT_EQ( none.copy_params.m, 0u );
  EXPECT_EQ( none.copy_params.r, 0u );
  EXPECT_TRUE( apply_restriction( rw_table( p ), restriction::from_assignment( 12, 0x5a5 ) ).is_constant() );
}

TEST( Structure, OneFixedZeroPerBlock )
{
  const rw_params p{ 2, 1, 2 };
  const auto rho = restriction::parse( "0*0*0*0*" );
  const auto rep = structure_under_restriction( p, rho );
  EXPECT_EQ( rep.copy_params, ( rw_params{ 2, 1, 1 } ) );
  for ( const auto& row : rep.b_ij )
    for ( auto b : row )
      EXPECT_EQ( b, 0 );
  EXPECT_EQ( apply_restriction( rw_table( p ), rep.copy_restriction ), structure_copy_table( rep ) );
  const auto rho1 = restriction::parse( "1*0**1*0" );
  const auto rep1 = structure_under_restriction( p, rho1 );
  EXPECT_EQ( rep1.b_ij, ( std::vector<std::vector<std::uint8_t>>{ { 1, 0 }, { 1, 0 } } ) );
  EXPECT_EQ( apply_restriction( rw_table( p ), rep1.copy_restriction ), structure_copy_table( rep1 ) );
}

TEST( Structure, CopyIsSoundOnRandomRestrictions )
{
  rng gen( 52 );
  const std::vector<rw_params> layouts{ { 2, 1, 3 }, { 3, 1, 2 }, { 2, 2, 3 }, { 4, 1, 2 }, { 2, 1, 5 }, { 5, 0, 4 } };
  for ( const auto& p : layouts )
  {
    const auto table = rw_table( p );
    for ( int t = 0; t < 150; ++t )
    {
      const auto rho = sample_rp( p.n(), 0.2 + 0.6 * gen.uniform01(), gen );
      const auto rep = structure_under_restriction( p, rho );
      ASSERT_EQ( apply_restriction( table, rep.copy_restriction ), structure_copy_table( rep ) ) << rho.to_string();
      ASSERT_EQ( rep.copy_params.m, rep.alive_rows.size() );
      // the extension only fixes more variables
      EXPECT_EQ( compose( rho, rep.copy_restriction ), rep.copy_restriction );
    }
  }
}

TEST( GipCopyCheck, Examples )
{
  const rw_params p{ 4, 1, 2 };
  EXPECT_TRUE( gip_copy_check( structure_under_restriction( p, restriction::all_star( 16 ) ), 2 ) );
  EXPECT_FALSE( gip_copy_check( structure_under_restriction( p, restriction::from_assignment( 16, 0 ) ), 1 ) );
}

TEST( GipCopyCheck, AgreesWithDirectRecount )
{
  const rw_params p{ 4, 1, 2 };
  rng gen( 53 );
  for ( int t = 0; t < 1000; ++t )
  {
    const auto rho = sample_rp( 16, 0.5, gen );
    const auto rep = structure_under_restriction( p, rho );
    const auto rc = direct_recount( p, rho );
    EXPECT_EQ( rep.copy_params.m, rc.alive );
    EXPECT_EQ( rep.copy_params.r, rc.min_free );
    for ( std::size_t target = 0; target <= 4; ++target )
      EXPECT_EQ( gip_copy_check( rep, target ), rc.alive >= target && rc.min_free >= 1 );
  }
}

TEST( Chernoff, RetentionWithinBothConstants )
{
  for ( std::size_t r : { 64, 96 } )
  {
    const rw_params p{ 2, 1, r };
    const double pr = 0.25;
    rng gen( 54 + r );
    const int trials = 10000;
    int below = 0;
    for ( int t = 0; t < trials; ++t )
      below += some_block_below( p, sample_rp( p.n(), pr, gen ), pr * static_cast<double>( r ) / 2 );
    const double emp = static_cast<double>( below ) / trials;
    const double ours = chernoff_retention_bound( p, pr );
    const double loose = 4.0 * std::exp( -static_cast<double>( r ) / 48.0 );
    EXPECT_LE( ours, loose );
    const double b = std::min( 1.0, ours );
    EXPECT_LE( emp, b + 3 * std::sqrt( b * ( 1 - b ) / trials ) + 1e-12 );
  }
}
