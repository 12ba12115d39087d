#include <gtest/gtest.h>

#include <cmath>

#include <nwlab/designs.hpp>

#include "oracles.hpp"

using namespace nwlab;

namespace
{

std::size_t brute_max_overlap( const design& d )
{
  std::size_t best = 0;
  for ( std::size_t i = 0; i < d.blocks.size(); ++i )
    for ( std::size_t j = i + 1; j < d.blocks.size(); ++j )
      best = std::max( best, oracle::overlap( d.blocks[i], d.blocks[j] ) );
  return best;
}

bool well_formed( const design& d, std::size_t s )
{
  if ( d.blocks.size() != s )
    return false;
  for ( const auto& b : d.blocks )
  {
    if ( b.size() != d.set_size_r || !std::is_sorted( b.begin(), b.end() ) )
      return false;
    if ( std::adjacent_find( b.begin(), b.end() ) != b.end() )
      return false;
    if ( !b.empty() && b.back() >= d.universe_m )
      return false;
  }
  return true;
}

} // namespace

TEST( PolynomialDesign, ConstantsPartitionTheGrid )
{
  const auto d = build_design_polynomial( 2, 1 );
  EXPECT_EQ( d.universe_m, 4u );
  ASSERT_EQ( d.blocks.size(), 2u );
  EXPECT_EQ( oracle::overlap( d.blocks[0], d.blocks[1] ), 0u );
  EXPECT_EQ( d.blocks[0].size(), 2u );
}

TEST( PolynomialDesign, LinesOverF3 )
{
  const auto d = build_design_polynomial( 3, 2 );
  EXPECT_EQ( d.blocks.size(), 9u );
  EXPECT_EQ( brute_max_overlap( d ), 1u );
  const auto rep = verify_design( d );
  EXPECT_TRUE( rep.ok );
  EXPECT_EQ( rep.max_overlap, 1u );
}

TEST( PolynomialDesign, QuadraticsOverF5 )
{
  const auto d = build_design_polynomial( 5, 3 );
  EXPECT_EQ( d.blocks.size(), 125u );
  EXPECT_LE( brute_max_overlap( d ), 2u );
}

TEST( PolynomialDesign, AllSmallPrimesAndDegrees )
{
  for ( std::size_t q : { 2, 3, 5, 7, 11, 13 } )
    for ( std::size_t d = 1; d <= 3; ++d )
    {
      const auto des = build_design_polynomial( q, d );
      std::size_t expect = 1;
      for ( std::size_t i = 0; i < d; ++i )
        expect *= q;
      ASSERT_TRUE( well_formed( des, expect ) );
      EXPECT_EQ( des.universe_m, q * q );
      EXPECT_LE( verify_design( des ).max_overlap, d - 1 );
    }
}

TEST( PolynomialDesign, VerifierAgreesWithPairwiseLoop )
{
  for ( std::size_t q : { 3, 5, 7 } )
    for ( std::size_t d = 1; d <= 3; ++d )
    {
      const auto des = build_design_polynomial( q, d );
      EXPECT_EQ( verify_design( des ).max_overlap, brute_max_overlap( des ) );
    }
}

TEST( PolynomialDesign, RejectsNonPrime )
{
  EXPECT_THROW( build_design_polynomial( 4, 2 ), param_error );
  EXPECT_THROW( build_design_polynomial( 1, 1 ), param_error );
  EXPECT_THROW( build_design_polynomial( 5, 0 ), param_error );
}

TEST( BuildDesignFor, SingleBlock )
{
  const auto d = build_design_for( 1, 4, 1 );
  EXPECT_TRUE( well_formed( d, 1 ) );
  EXPECT_TRUE( verify_design( d ).ok );
}

TEST( BuildDesignFor, NineLinesOverF3 )
{
  const auto d = build_design_for( 9, 3, 1 );
  EXPECT_TRUE( well_formed( d, 9 ) );
  EXPECT_EQ( d.blocks, build_design_polynomial( 3, 2 ).blocks );
  EXPECT_EQ( brute_max_overlap( d ), 1u );
}

TEST( BuildDesignFor, FiftyBlocksOfSeven )
{
  const auto d = build_design_for( 50, 7, 3 );
  EXPECT_TRUE( well_formed( d, 50 ) );
  EXPECT_LE( brute_max_overlap( d ), 3u );
  EXPECT_LE( static_cast<double>( d.universe_m ), 8.0 * 49 / 3 );
}

TEST( BuildDesignFor, RandomParametersAlwaysVerify )
{
  rng gen( 61 );
  for ( int t = 0; t < 60; ++t )
  {
    const std::size_t s = 1 + gen.below( 80 );
    const std::size_t r = 1 + gen.below( 10 );
    const std::size_t l = 1 + gen.below( 3 );
    const auto d = build_design_for( s, r, l, gen.next() );
    ASSERT_TRUE( well_formed( d, s ) ) << s << ' ' << r << ' ' << l;
    EXPECT_LE( brute_max_overlap( d ), l );
    EXPECT_TRUE( verify_design( d ).ok );
  }
}

TEST( BuildDesignFor, FallbackIsSeeded )
{
  // r = 4 rounds q up to 5 and 5^2 < 200 blocks at l = 1 forces the greedy search
  const auto a = build_design_for( 200, 4, 1, 7 );
  const auto b = build_design_for( 200, 4, 1, 7 );
  EXPECT_EQ( a.blocks, b.blocks );
  EXPECT_LE( brute_max_overlap( a ), 1u );
  EXPECT_THROW( build_design_for( 0, 3, 1 ), param_error );
}

TEST( VerifyDesign, Examples )
{
  const design disjoint{ 4, 2, 0, { { 0, 1 }, { 2, 3 } } };
  EXPECT_TRUE( verify_design( disjoint ).ok );
  const design twin{ 4, 2, 1, { { 0, 1 }, { 0, 1 } } };
  const auto rep = verify_design( twin );
  EXPECT_FALSE( rep.ok );
  EXPECT_EQ( rep.max_overlap, 2u );
  const design unsorted{ 4, 2, 1, { { 1, 0 } } };
  EXPECT_FALSE( verify_design( unsorted ).ok );
  const design outside{ 4, 2, 1, { { 1, 4 } } };
  EXPECT_FALSE( verify_design( outside ).ok );
  EXPECT_TRUE( std::isinf( verify_design( disjoint ).m_over_r2_by_l ) );
}

TEST( DisjointDesign, HasNoOverlap )
{
  const auto d = disjoint_design( 5, 3 );
  EXPECT_EQ( d.universe_m, 15u );
  EXPECT_TRUE( verify_design( d ).ok );
  EXPECT_EQ( brute_max_overlap( d ), 0u );
}

TEST( DesignFile, RejectsTruncatedInput )
{
  std::istringstream is( "4 2 0 2\n0 1\n2\n" );
  EXPECT_THROW( read_design( is ), format_error );
  std::istringstream extra( "4 2 0 1\n0 1\n9\n" );
  EXPECT_THROW( read_design( extra ), format_error );
}

TEST( NwParams, MainProfileExample )
{
  const auto p = compute_nw_params( nw_profile::main, std::uint64_t{ 1 } << 16, std::ldexp( 1.0, -10 ), 2.0, 1.0 );
  EXPECT_EQ( p.l, 16u );
  const big_int want_r = ( big_int( 1 ) << 40 ) + big_int( std::llround( std::pow( 26.0, 2.005 ) ) );
  EXPECT_EQ( p.r, want_r );
  EXPECT_EQ( p.m, ( big_int( design_constant ) * want_r * want_r + 15 ) / 16 );
  EXPECT_EQ( p.hardness_size, big_int( 1 ) << 32 );
  EXPECT_DOUBLE_EQ( p.log2_hardness_corr, -26.0 );
}

TEST( NwParams, SizeTwoGivesOneBitOverlap )
{
  for ( auto prof : { nw_profile::viola, nw_profile::ls11_sym, nw_profile::ls11_thr, nw_profile::main, nw_profile::many_gates } )
  {
    const auto p = compute_nw_params( prof, 2, 0.25, 1.0, 1.0 );
    EXPECT_EQ( p.l, 1u ) << to_string( prof );
    EXPECT_GE( p.r, 1 );
  }
}

TEST( NwParams, ViolaExample )
{
  const auto p = compute_nw_params( nw_profile::viola, 512, 0.5, 1.0, 1.0 );
  EXPECT_EQ( p.l, 9u );
  const double e = 10.0 * std::sqrt( 10.0 );
  EXPECT_NEAR( p.r_exponent, e, 1e-12 );
  // 2^31.62... rounds to nearest
  EXPECT_EQ( p.r, big_int( std::llround( std::exp2( e ) ) ) );
}

TEST( NwParams, DeskCapAndErrors )
{
  const auto p = compute_nw_params( nw_profile::main, 1024, 0.1, 2.0, 1.0, 64 );
  ASSERT_TRUE( p.desk_r && p.desk_m );
  EXPECT_EQ( *p.desk_r, 64u );
  EXPECT_EQ( *p.desk_m, ( 4u * 64 * 64 + 9 ) / 10 );
  EXPECT_THROW( compute_nw_params( nw_profile::main, 1, 0.1, 1, 1 ), param_error );
  EXPECT_THROW( compute_nw_params( nw_profile::main, 8, 1.5, 1, 1 ), param_error );
  EXPECT_THROW( compute_nw_params( nw_profile::main, 8, 0.1, 0, 1 ), param_error );
  EXPECT_THROW( parse_profile( "fast" ), param_error );
}

TEST( NwParams, ReEvaluatedIndependently )
{
  rng gen( 62 );
  for ( int t = 0; t < 100; ++t )
  {
    const std::uint64_t s = 2 + gen.below( 1u << 20 );
    const double eps = std::ldexp( 1.0, -static_cast<int>( 1 + gen.below( 30 ) ) );
    const auto p = compute_nw_params( nw_profile::main, s, eps, 1.0, 1.0 );
    std::size_t l = 0;
    while ( ( std::uint64_t{ 1 } << l ) < s )
      ++l;
    EXPECT_EQ( p.l, l );
    EXPECT_EQ( p.hardness_size, big_int( s ) << l );
    EXPECT_DOUBLE_EQ( p.hardness_corr, eps / static_cast<double>( s ) );
  }
}
