#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace nwlab
{

/// Worker count from `NWLAB_WORKERS`, defaulting to the hardware concurrency.
inline unsigned worker_count()
{
  if ( const char* env = std::getenv( "NWLAB_WORKERS" ) )
  {
    const long v = std::strtol( env, nullptr, 10 );
    if ( v > 0 )
      return static_cast<unsigned>( v );
  }
  return std::max( 1u, std::thread::hardware_concurrency() );
}

/*! \brief Runs `fn(begin, end)` over contiguous shards of [0, count).

  Shards are fixed by `count` and the worker count only; callers that need
  results independent of the worker count must reduce per-index values or use
  exact (integer) accumulators.
*/
template<typename Fn>
void parallel_shards( std::uint64_t count, Fn&& fn, unsigned workers = worker_count() )
{
  if ( count == 0 )
    return;
  workers = static_cast<unsigned>( std::min<std::uint64_t>( workers, count ) );
  if ( workers <= 1 )
  {
    fn( std::uint64_t{ 0 }, count );
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::uint64_t chunk = ( count + workers - 1 ) / workers;
  for ( unsigned w = 0; w < workers; ++w )
  {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = std::min( count, begin + chunk );
    if ( begin >= end )
      break;
    pool.emplace_back( [&, begin, end] {
      try
      {
        fn( begin, end );
      }
      catch ( ... )
      {
        std::lock_guard lock( failure_mutex );
        if ( !failure )
          failure = std::current_exception();
      }
    } );
  }
  for ( auto& t : pool )
    t.join();
  if ( failure )
    std::rethrow_exception( failure );
}

/// Exact count of indices in [0, count) satisfying `pred`.
template<typename Pred>
std::uint64_t parallel_count( std::uint64_t count, Pred&& pred )
{
  std::mutex m;
  std::uint64_t total = 0;
  parallel_shards( count, [&]( std::uint64_t b, std::uint64_t e ) {
    std::uint64_t local = 0;
    for ( auto i = b; i < e; ++i )
      local += pred( i ) ? 1 : 0;
    std::lock_guard lock( m );
    total += local;
  } );
  return total;
}

} // namespace nwlab
