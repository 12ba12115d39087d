#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "boolcore.hpp"
#include "errors.hpp"
#include "rng.hpp"

/*!
  \file circuits.hpp
  \brief Desk-scale approximator classes: sparse F2 polynomials and
  SYM / THR / ANY topped circuits over AND, OR and decision-tree sublayers.
*/

namespace nwlab
{

inline constexpr unsigned max_circuit_vars = 24;
inline constexpr std::size_t max_circuit_children = std::size_t{ 1 } << 16;
inline constexpr unsigned max_any_fanin = 20;
inline constexpr std::int64_t max_abs_weight = std::int64_t{ 1 } << 31;

struct literal
{
  unsigned var = 0;
  bool negated = false;

  bool eval( std::uint64_t x ) const { return ( ( x >> var ) & 1 ) != negated; }
  auto operator<=>( const literal& ) const = default;
};

struct and_gate
{
  std::vector<literal> lits; ///< empty means constant true

  bool eval( std::uint64_t x ) const
  {
    return std::all_of( lits.begin(), lits.end(), [x]( const literal& l ) { return l.eval( x ); } );
  }
  bool operator==( const and_gate& ) const = default;
};

/// Evaluated as the negation of the AND of negated literals.
struct or_gate
{
  std::vector<literal> lits; ///< empty means constant false

  bool eval( std::uint64_t x ) const
  {
    return std::any_of( lits.begin(), lits.end(), [x]( const literal& l ) { return l.eval( x ); } );
  }
  bool operator==( const or_gate& ) const = default;
};

/// Binary decision tree; leaves carry a bit, or nothing for restriction trees.
class decision_tree
{
public:
  static constexpr int unlabeled = -1;

  struct node
  {
    int var = -1; ///< -1 for leaves
    int leaf = unlabeled;
    std::uint32_t lo = 0;
    std::uint32_t hi = 0;
    bool operator==( const node& ) const = default;
  };

  static decision_tree leaf( bool value )
  {
    decision_tree t;
    t.nodes_.push_back( { -1, value ? 1 : 0, 0, 0 } );
    return t;
  }

  static decision_tree unlabeled_leaf()
  {
    decision_tree t;
    t.nodes_.push_back( { -1, unlabeled, 0, 0 } );
    return t;
  }

  static decision_tree branch( unsigned var, const decision_tree& lo, const decision_tree& hi )
  {
    decision_tree t;
    t.nodes_.push_back( { static_cast<int>( var ), unlabeled, 0, 0 } );
    const auto lo_root = t.append( lo );
    const auto hi_root = t.append( hi );
    t.nodes_[0].lo = lo_root;
    t.nodes_[0].hi = hi_root;
    return t;
  }

  const std::vector<node>& nodes() const { return nodes_; }
  const node& root() const { return nodes_.front(); }
  std::size_t node_count() const { return nodes_.size(); }

  bool is_leaf() const { return nodes_.front().var < 0; }

  int eval_leaf( std::uint64_t x ) const
  {
    std::uint32_t i = 0;
    while ( nodes_[i].var >= 0 )
      i = ( ( x >> nodes_[i].var ) & 1 ) ? nodes_[i].hi : nodes_[i].lo;
    return nodes_[i].leaf;
  }

  bool eval( std::uint64_t x ) const { return eval_leaf( x ) == 1; }

  unsigned depth() const { return depth_from( 0 ); }

  /// Labeled leaves, in-range variables and no variable repeated on a path.
  void validate( unsigned n, bool require_labels ) const
  {
    std::vector<unsigned> path;
    validate_from( 0, n, require_labels, path );
  }

  /// AND terms of the root-to-1-leaf paths; at most one holds on any input.
  std::vector<and_gate> one_paths() const
  {
    std::vector<and_gate> out;
    std::vector<literal> path;
    collect_one_paths( 0, path, out );
    return out;
  }

  /// Tree for f|rho with variables renamed to star ranks.
  decision_tree restrict_to( const restriction& rho, const std::vector<unsigned>& rank ) const
  {
    return restrict_from( 0, rho, rank );
  }

  bool operator==( const decision_tree& ) const = default;

private:
  decision_tree() = default;

  std::uint32_t append( const decision_tree& sub )
  {
    const auto offset = static_cast<std::uint32_t>( nodes_.size() );
    for ( auto nd : sub.nodes_ )
    {
      if ( nd.var >= 0 )
      {
        nd.lo += offset;
        nd.hi += offset;
      }
      nodes_.push_back( nd );
    }
    return offset;
  }

  unsigned depth_from( std::uint32_t i ) const
  {
    if ( nodes_[i].var < 0 )
      return 0;
    return 1 + std::max( depth_from( nodes_[i].lo ), depth_from( nodes_[i].hi ) );
  }

  void validate_from( std::uint32_t i, unsigned n, bool require_labels, std::vector<unsigned>& path ) const
  {
    const auto& nd = nodes_.at( i );
    if ( nd.var < 0 )
    {
      if ( require_labels && nd.leaf != 0 && nd.leaf != 1 )
        throw spec_error( "decision tree leaf without a label" );
      return;
    }
    const auto v = static_cast<unsigned>( nd.var );
    if ( v >= n )
      throw spec_error( "decision tree variable out of range" );
    if ( std::find( path.begin(), path.end(), v ) != path.end() )
      throw spec_error( "decision tree repeats a variable on a path" );
    path.push_back( v );
    validate_from( nd.lo, n, require_labels, path );
    validate_from( nd.hi, n, require_labels, path );
    path.pop_back();
  }

  void collect_one_paths( std::uint32_t i, std::vector<literal>& path, std::vector<and_gate>& out ) const
  {
    const auto& nd = nodes_[i];
    if ( nd.var < 0 )
    {
      if ( nd.leaf == 1 )
      {
        and_gate g{ path };
        std::sort( g.lits.begin(), g.lits.end() );
        out.push_back( std::move( g ) );
      }
      return;
    }
    path.push_back( { static_cast<unsigned>( nd.var ), true } );
    collect_one_paths( nd.lo, path, out );
    path.back().negated = false;
    collect_one_paths( nd.hi, path, out );
    path.pop_back();
  }

  decision_tree restrict_from( std::uint32_t i, const restriction& rho, const std::vector<unsigned>& rank ) const
  {
    const auto& nd = nodes_[i];
    if ( nd.var < 0 )
    {
      decision_tree t;
      t.nodes_.push_back( nd );
      return t;
    }
    switch ( rho[nd.var] )
    {
    case cell::zero: return restrict_from( nd.lo, rho, rank );
    case cell::one: return restrict_from( nd.hi, rho, rank );
    default: break;
    }
    auto lo = restrict_from( nd.lo, rho, rank );
    auto hi = restrict_from( nd.hi, rho, rank );
    if ( lo.is_leaf() && hi.is_leaf() && lo.root().leaf == hi.root().leaf )
      return lo;
    return branch( rank[nd.var], lo, hi );
  }

  std::vector<node> nodes_;
};

class circuit_spec;

/// Nested SYM/THR circuit feeding an ANY top.
struct subcircuit
{
  std::shared_ptr<const circuit_spec> spec;
  bool operator==( const subcircuit& other ) const;
};

using child = std::variant<and_gate, or_gate, decision_tree, subcircuit>;

enum class top_kind
{
  sym,
  thr,
  any
};

inline const char* to_string( top_kind k )
{
  switch ( k )
  {
  case top_kind::sym: return "SYM";
  case top_kind::thr: return "THR";
  default: return "ANY";
  }
}

struct top_gate
{
  top_kind kind = top_kind::sym;
  std::vector<std::uint8_t> predicate; ///< SYM: accept bit per count 0..fan-in
  std::vector<std::int64_t> weights;   ///< THR
  std::int64_t threshold = 0;          ///< THR: output [sum w_i c_i >= threshold]
  truth_table table;                   ///< ANY: indexed by the child bit-vector

  static top_gate sym( std::vector<std::uint8_t> accept )
  {
    top_gate g;
    g.kind = top_kind::sym;
    g.predicate = std::move( accept );
    return g;
  }

  static top_gate thr( std::vector<std::int64_t> w, std::int64_t t )
  {
    top_gate g;
    g.kind = top_kind::thr;
    g.weights = std::move( w );
    g.threshold = t;
    return g;
  }

  static top_gate any( truth_table t )
  {
    top_gate g;
    g.kind = top_kind::any;
    g.table = std::move( t );
    return g;
  }

  /// SYM predicates for common symmetric functions over `fanin` inputs.
  static top_gate parity( std::size_t fanin, bool negate = false )
  {
    std::vector<std::uint8_t> p( fanin + 1 );
    for ( std::size_t c = 0; c <= fanin; ++c )
      p[c] = static_cast<std::uint8_t>( ( c & 1 ) ^ ( negate ? 1 : 0 ) );
    return sym( std::move( p ) );
  }

  static top_gate disjunction( std::size_t fanin )
  {
    std::vector<std::uint8_t> p( fanin + 1, 1 );
    p[0] = 0;
    return sym( std::move( p ) );
  }

  bool operator==( const top_gate& ) const = default;
};

class circuit_spec
{
public:
  unsigned n = 0;
  top_gate top;
  std::vector<child> children;

  circuit_spec() = default;
  circuit_spec( unsigned num_vars, top_gate t, std::vector<child> ch )
      : n( num_vars ), top( std::move( t ) ), children( std::move( ch ) )
  {
  }

  std::size_t fanin() const { return children.size(); }

  /// Throws spec_error on any broken shape invariant.
  void validate() const
  {
    if ( n > max_circuit_vars )
      throw cap_error( "circuit has more than 24 inputs" );
    if ( children.size() > max_circuit_children )
      throw cap_error( "circuit has more than 2^16 children" );
    switch ( top.kind )
    {
    case top_kind::sym:
      if ( top.predicate.size() != children.size() + 1 )
        throw spec_error( "SYM predicate length must be fan-in + 1" );
      break;
    case top_kind::thr:
      if ( top.weights.size() != children.size() )
        throw spec_error( "THR weight count must equal fan-in" );
      for ( auto w : top.weights )
        if ( w > max_abs_weight || w < -max_abs_weight )
          throw spec_error( "THR weight exceeds 2^31 in magnitude" );
      break;
    case top_kind::any:
      if ( children.size() > max_any_fanin )
        throw cap_error( "ANY fan-in exceeds 20" );
      if ( top.table.num_vars() != children.size() )
        throw spec_error( "ANY table arity must equal fan-in" );
      break;
    }
    for ( const auto& ch : children )
      std::visit( [&]( const auto& c ) { validate_child( c ); }, ch );
  }

  /// Gate count including literals.
  std::size_t size() const
  {
    std::size_t s = 1;
    for ( const auto& ch : children )
      s += std::visit( []( const auto& c ) { return child_size( c ); }, ch );
    return s;
  }

  /// Layer count from inputs to the top gate.
  unsigned depth() const
  {
    unsigned d = 0;
    for ( const auto& ch : children )
      d = std::max( d, std::visit( []( const auto& c ) { return child_depth( c ); }, ch ) );
    return 1 + d;
  }

  /// Largest AND/OR fan-in (decision trees count by depth).
  std::size_t width() const
  {
    std::size_t w = 0;
    for ( const auto& ch : children )
      w = std::max( w, std::visit( []( const auto& c ) { return child_width( c ); }, ch ) );
    return w;
  }

  bool eval( std::uint64_t x ) const
  {
    switch ( top.kind )
    {
    case top_kind::sym:
    {
      std::size_t count = 0;
      for ( const auto& ch : children )
        count += eval_child( ch, x ) ? 1 : 0;
      return top.predicate[count] != 0;
    }
    case top_kind::thr:
    {
      std::int64_t sum = 0;
      for ( std::size_t i = 0; i < children.size(); ++i )
        if ( eval_child( children[i], x ) )
          sum += top.weights[i];
      return sum >= top.threshold;
    }
    default:
    {
      std::uint64_t index = 0;
      for ( std::size_t i = 0; i < children.size(); ++i )
        if ( eval_child( children[i], x ) )
          index |= std::uint64_t{ 1 } << i;
      return top.table.get( index );
    }
    }
  }

  static bool eval_child( const child& ch, std::uint64_t x )
  {
    return std::visit(
        [x]( const auto& c ) -> bool {
          if constexpr ( std::is_same_v<std::decay_t<decltype( c )>, subcircuit> )
            return c.spec->eval( x );
          else
            return c.eval( x );
        },
        ch );
  }

  bool operator==( const circuit_spec& ) const = default;

private:
  void check_lits( const std::vector<literal>& lits ) const
  {
    for ( std::size_t i = 0; i < lits.size(); ++i )
    {
      if ( lits[i].var >= n )
        throw spec_error( "literal index out of range" );
      for ( std::size_t j = 0; j < i; ++j )
        if ( lits[j].var == lits[i].var )
          throw spec_error( "gate repeats a variable" );
    }
  }
  void validate_child( const and_gate& g ) const { check_lits( g.lits ); }
  void validate_child( const or_gate& g ) const { check_lits( g.lits ); }
  void validate_child( const decision_tree& t ) const { t.validate( n, true ); }
  void validate_child( const subcircuit& s ) const
  {
    if ( !s.spec )
      throw spec_error( "empty nested circuit" );
    if ( top.kind != top_kind::any )
      throw spec_error( "nested circuits are only allowed under an ANY top" );
    if ( s.spec->top.kind == top_kind::any )
      throw spec_error( "nested circuit must have a SYM or THR top" );
    if ( s.spec->n != n )
      throw spec_error( "nested circuit input count differs" );
    s.spec->validate();
  }

  static std::size_t child_size( const and_gate& g ) { return 1 + g.lits.size(); }
  static std::size_t child_size( const or_gate& g ) { return 1 + g.lits.size(); }
  static std::size_t child_size( const decision_tree& t ) { return t.node_count(); }
  static std::size_t child_size( const subcircuit& s ) { return s.spec->size(); }

  static unsigned child_depth( const and_gate& ) { return 1; }
  static unsigned child_depth( const or_gate& ) { return 1; }
  static unsigned child_depth( const decision_tree& t ) { return t.depth(); }
  static unsigned child_depth( const subcircuit& s ) { return s.spec->depth(); }

  static std::size_t child_width( const and_gate& g ) { return g.lits.size(); }
  static std::size_t child_width( const or_gate& g ) { return g.lits.size(); }
  static std::size_t child_width( const decision_tree& t ) { return t.depth(); }
  static std::size_t child_width( const subcircuit& s ) { return s.spec->width(); }
};

inline bool subcircuit::operator==( const subcircuit& other ) const
{
  if ( spec == other.spec )
    return true;
  return spec && other.spec && *spec == *other.spec;
}

inline bool eval_circuit( const circuit_spec& c, std::uint64_t x )
{
  detail::require_dim( c.n >= 64 || x >> c.n == 0, "assignment has bits beyond the circuit inputs" );
  return c.eval( x );
}

inline bool eval_circuit( const circuit_spec& c, std::span<const std::uint8_t> bits )
{
  detail::require_dim( bits.size() == c.n, "assignment length differs from circuit inputs" );
  std::uint64_t x = 0;
  for ( std::size_t i = 0; i < bits.size(); ++i )
    if ( bits[i] )
      x |= std::uint64_t{ 1 } << i;
  return c.eval( x );
}

inline truth_table circuit_table( const circuit_spec& c )
{
  return truth_table::from_function( c.n, [&c]( std::uint64_t x ) { return c.eval( x ); } );
}

namespace detail
{

/// Position of each star among the stars; meaningless for fixed positions.
inline std::vector<unsigned> star_ranks( const restriction& rho )
{
  std::vector<unsigned> rank( rho.size(), 0 );
  unsigned j = 0;
  for ( std::size_t i = 0; i < rho.size(); ++i )
    if ( rho.is_star( i ) )
      rank[i] = j++;
  return rank;
}

/// Restricted literal list; -1 / +1 when the gate collapses to false / true.
inline int restrict_lits( const std::vector<literal>& lits, const restriction& rho, const std::vector<unsigned>& rank,
                          bool is_and, std::vector<literal>& out )
{
  for ( const auto& l : lits )
  {
    if ( rho.is_star( l.var ) )
    {
      out.push_back( { rank[l.var], l.negated } );
      continue;
    }
    const bool value = ( rho[l.var] == cell::one ) != l.negated;
    if ( is_and && !value )
      return -1;
    if ( !is_and && value )
      return +1;
  }
  if ( out.empty() )
    return is_and ? +1 : -1;
  return 0;
}

} // namespace detail

/*! \brief Structural restriction of a circuit.

  The result has `rho.star_count()` inputs, renamed to the star ranks.
  Children that become constant are removed and folded into the top gate:
  the SYM predicate is shifted by the number of forced-true children, the THR
  threshold drops by their weights and the ANY table is restricted at their
  positions. Nested circuits are restricted recursively and kept.
*/
inline circuit_spec restrict_circuit( const circuit_spec& c, const restriction& rho )
{
  detail::require_dim( rho.size() == c.n, "restriction length differs from circuit inputs" );
  const auto rank = detail::star_ranks( rho );
  const auto n2 = static_cast<unsigned>( rho.star_count() );

  std::vector<child> kept;
  std::vector<std::size_t> kept_index;
  std::vector<int> fixed( c.children.size(), 0 ); // 0 alive, +1 true, -1 false
  for ( std::size_t i = 0; i < c.children.size(); ++i )
  {
    const auto& ch = c.children[i];
    if ( const auto* g = std::get_if<and_gate>( &ch ) )
    {
      and_gate out;
      fixed[i] = detail::restrict_lits( g->lits, rho, rank, true, out.lits );
      if ( fixed[i] == 0 )
        kept.emplace_back( std::move( out ) );
    }
    else if ( const auto* o = std::get_if<or_gate>( &ch ) )
    {
      or_gate out;
      fixed[i] = detail::restrict_lits( o->lits, rho, rank, false, out.lits );
      if ( fixed[i] == 0 )
        kept.emplace_back( std::move( out ) );
    }
    else if ( const auto* t = std::get_if<decision_tree>( &ch ) )
    {
      auto r = t->restrict_to( rho, rank );
      if ( r.is_leaf() && r.root().leaf != decision_tree::unlabeled )
        fixed[i] = r.root().leaf == 1 ? +1 : -1;
      else
        kept.emplace_back( std::move( r ) );
    }
    else
    {
      const auto& s = std::get<subcircuit>( ch );
      kept.emplace_back( subcircuit{ std::make_shared<const circuit_spec>( restrict_circuit( *s.spec, rho ) ) } );
    }
    if ( fixed[i] == 0 )
      kept_index.push_back( i );
  }

  top_gate top;
  top.kind = c.top.kind;
  switch ( c.top.kind )
  {
  case top_kind::sym:
  {
    const auto forced = static_cast<std::size_t>( std::count( fixed.begin(), fixed.end(), +1 ) );
    top.predicate.resize( kept.size() + 1 );
    for ( std::size_t cnt = 0; cnt <= kept.size(); ++cnt )
      top.predicate[cnt] = c.top.predicate[cnt + forced];
    break;
  }
  case top_kind::thr:
  {
    top.threshold = c.top.threshold;
    for ( std::size_t i = 0; i < fixed.size(); ++i )
      if ( fixed[i] == +1 )
        top.threshold -= c.top.weights[i];
    for ( auto i : kept_index )
      top.weights.push_back( c.top.weights[i] );
    break;
  }
  case top_kind::any:
  {
    std::vector<cell> cells( fixed.size() );
    for ( std::size_t i = 0; i < fixed.size(); ++i )
      cells[i] = fixed[i] == 0 ? cell::star : fixed[i] > 0 ? cell::one : cell::zero;
    top.table = apply_restriction( c.top.table, restriction( std::move( cells ) ) );
    break;
  }
  }
  return circuit_spec( n2, std::move( top ), std::move( kept ) );
}

/*! \brief Replaces every decision-tree child by the AND terms of its 1-paths.

  The 1-path terms of one tree are mutually exclusive, so the count of true
  children (and the weighted sum) is unchanged; the SYM predicate is only
  extended to the larger fan-in.
*/
inline circuit_spec fold_dt_layer( const circuit_spec& c )
{
  if ( c.top.kind == top_kind::any )
    throw spec_error( "folding needs a SYM or THR top" );
  std::vector<child> out;
  std::vector<std::int64_t> weights;
  for ( std::size_t i = 0; i < c.children.size(); ++i )
  {
    const auto* t = std::get_if<decision_tree>( &c.children[i] );
    if ( !t )
      throw spec_error( "folding needs decision-tree children only" );
    t->validate( c.n, true );
    for ( auto& term : t->one_paths() )
    {
      out.emplace_back( std::move( term ) );
      if ( c.top.kind == top_kind::thr )
        weights.push_back( c.top.weights[i] );
    }
  }
  top_gate top;
  if ( c.top.kind == top_kind::sym )
  {
    std::vector<std::uint8_t> p( out.size() + 1, 0 );
    for ( std::size_t cnt = 0; cnt < p.size() && cnt < c.top.predicate.size(); ++cnt )
      p[cnt] = c.top.predicate[cnt];
    top = top_gate::sym( std::move( p ) );
  }
  else
  {
    top = top_gate::thr( std::move( weights ), c.top.threshold );
  }
  return circuit_spec( c.n, std::move( top ), std::move( out ) );
}

enum class bottom_kind
{
  and_gates,
  or_gates,
  trees
};

/// Shape of a randomly sampled circuit.
struct circuit_descriptor
{
  top_kind top = top_kind::sym;
  std::size_t s = 1;       ///< children per SYM/THR gate
  unsigned width = 1;      ///< AND/OR fan-in, or tree depth
  unsigned depth = 2;      ///< 2: top over AND/OR; trees add their own depth
  bottom_kind bottom = bottom_kind::and_gates;
  unsigned u = 2;          ///< ANY fan-in
  top_kind inner = top_kind::sym; ///< top of the nested circuits under ANY
  std::int64_t max_weight = 8;
};

namespace detail
{

inline std::vector<literal> random_literals( unsigned n, unsigned width, rng& gen )
{
  std::vector<unsigned> vars( n );
  std::iota( vars.begin(), vars.end(), 0u );
  const unsigned w = std::min( width, n );
  for ( unsigned i = 0; i < w; ++i )
    std::swap( vars[i], vars[i + gen.below( n - i )] );
  std::vector<literal> lits;
  for ( unsigned i = 0; i < w; ++i )
    lits.push_back( { vars[i], gen.bit() } );
  std::sort( lits.begin(), lits.end() );
  return lits;
}

inline decision_tree random_tree( unsigned n, unsigned depth, std::vector<unsigned>& used, rng& gen )
{
  if ( depth == 0 || used.size() == n )
    return decision_tree::leaf( gen.bit() );
  unsigned v;
  do
  {
    v = static_cast<unsigned>( gen.below( n ) );
  } while ( std::find( used.begin(), used.end(), v ) != used.end() );
  used.push_back( v );
  auto lo = random_tree( n, depth - 1, used, gen );
  auto hi = random_tree( n, depth - 1, used, gen );
  used.pop_back();
  return decision_tree::branch( v, lo, hi );
}

inline circuit_spec random_flat( const circuit_descriptor& d, top_kind kind, unsigned n, rng& gen )
{
  std::vector<child> ch;
  for ( std::size_t i = 0; i < d.s; ++i )
  {
    switch ( d.bottom )
    {
    case bottom_kind::and_gates: ch.emplace_back( and_gate{ random_literals( n, d.width, gen ) } ); break;
    case bottom_kind::or_gates: ch.emplace_back( or_gate{ random_literals( n, d.width, gen ) } ); break;
    case bottom_kind::trees:
    {
      std::vector<unsigned> used;
      ch.emplace_back( random_tree( n, d.width, used, gen ) );
      break;
    }
    }
  }
  top_gate top;
  if ( kind == top_kind::sym )
  {
    std::vector<std::uint8_t> p( d.s + 1 );
    for ( auto& b : p )
      b = gen.bit() ? 1 : 0;
    top = top_gate::sym( std::move( p ) );
  }
  else
  {
    std::vector<std::int64_t> w( d.s );
    std::int64_t lo = 0, hi = 0;
    const auto span = static_cast<std::uint64_t>( 2 * d.max_weight + 1 );
    for ( auto& x : w )
    {
      x = static_cast<std::int64_t>( gen.below( span ) ) - d.max_weight;
      ( x < 0 ? lo : hi ) += x;
    }
    const auto t = lo + static_cast<std::int64_t>( gen.below( static_cast<std::uint64_t>( hi - lo + 2 ) ) );
    top = top_gate::thr( std::move( w ), t );
  }
  return circuit_spec( n, std::move( top ), std::move( ch ) );
}

} // namespace detail

/// Uniformly random circuit of the given shape; reproducible from the rng state.
inline circuit_spec sample_circuit( const circuit_descriptor& d, unsigned n, rng& gen )
{
  detail::require_cap( n <= max_circuit_vars, "sampled circuits allow at most 24 inputs" );
  detail::require_cap( d.s <= max_circuit_children, "sampled circuits allow at most 2^16 children" );
  detail::require_cap( d.top != top_kind::any || d.u <= max_any_fanin, "ANY fan-in exceeds 20" );
  if ( d.bottom != bottom_kind::trees && d.depth != 2 )
    throw param_error( "AND/OR bottoms give depth-2 circuits" );
  if ( n == 0 && d.width > 0 && d.s > 0 )
    throw param_error( "cannot place literals on zero inputs" );
  if ( d.max_weight < 0 || d.max_weight > max_abs_weight )
    throw param_error( "weight bound out of range" );
  circuit_spec c;
  if ( d.top == top_kind::any )
  {
    if ( d.inner == top_kind::any )
      throw param_error( "nested circuits need a SYM or THR top" );
    std::vector<child> ch;
    for ( unsigned i = 0; i < d.u; ++i )
      ch.emplace_back( subcircuit{ std::make_shared<const circuit_spec>( detail::random_flat( d, d.inner, n, gen ) ) } );
    auto table = truth_table::from_function( d.u, [&gen]( std::uint64_t ) { return gen.bit(); } );
    c = circuit_spec( n, top_gate::any( std::move( table ) ), std::move( ch ) );
  }
  else
  {
    c = detail::random_flat( d, d.top, n, gen );
  }
  c.validate();
  return c;
}

/// Width-w DNF with `terms` terms, as a SYM-OR over AND children.
inline circuit_spec sample_dnf( unsigned n, std::size_t terms, unsigned w, rng& gen )
{
  std::vector<child> ch;
  for ( std::size_t i = 0; i < terms; ++i )
    ch.emplace_back( and_gate{ detail::random_literals( n, w, gen ) } );
  return circuit_spec( n, top_gate::disjunction( terms ), std::move( ch ) );
}

/// XOR of distinct monomials plus a constant.
class sparse_f2_poly
{
public:
  using monomial = std::vector<unsigned>; ///< sorted distinct variable indices

  sparse_f2_poly() = default;
  explicit sparse_f2_poly( unsigned num_vars, bool constant = false ) : n_( num_vars ), constant_( constant ) {}

  unsigned num_vars() const { return n_; }
  bool constant() const { return constant_; }
  std::size_t sparsity() const { return monomials_.size(); }
  const std::set<monomial>& monomials() const { return monomials_; }

  void set_constant( bool c ) { constant_ = c; }

  /// Adds a monomial over F2; adding the same monomial twice cancels it.
  void add( monomial vars )
  {
    std::sort( vars.begin(), vars.end() );
    if ( std::adjacent_find( vars.begin(), vars.end() ) != vars.end() )
      throw spec_error( "monomial repeats a variable" );
    for ( auto v : vars )
      detail::require_dim( v < n_, "monomial variable out of range" );
    if ( vars.empty() )
    {
      constant_ = !constant_;
      return;
    }
    if ( !monomials_.erase( vars ) )
      monomials_.insert( std::move( vars ) );
  }

  bool eval( std::uint64_t x ) const
  {
    bool v = constant_;
    for ( const auto& m : monomials_ )
    {
      bool term = true;
      for ( auto i : m )
        term = term && ( ( x >> i ) & 1 );
      v ^= term;
    }
    return v;
  }

  bool eval( std::span<const std::uint8_t> bits ) const
  {
    detail::require_dim( bits.size() == n_, "assignment length differs from polynomial arity" );
    std::uint64_t x = 0;
    for ( std::size_t i = 0; i < bits.size(); ++i )
      if ( bits[i] )
        x |= std::uint64_t{ 1 } << i;
    return eval( x );
  }

  /// Same function as a SYM-parity top over one AND child per monomial.
  circuit_spec to_circuit() const
  {
    std::vector<child> ch;
    for ( const auto& m : monomials_ )
    {
      and_gate g;
      for ( auto v : m )
        g.lits.push_back( { v, false } );
      ch.emplace_back( std::move( g ) );
    }
    auto top = top_gate::parity( ch.size(), constant_ );
    return circuit_spec( n_, std::move( top ), std::move( ch ) );
  }

  truth_table table() const
  {
    return truth_table::from_function( n_, [this]( std::uint64_t x ) { return eval( x ); } );
  }

  bool operator==( const sparse_f2_poly& ) const = default;

private:
  unsigned n_ = 0;
  bool constant_ = false;
  std::set<monomial> monomials_;
};

/// Random polynomial with exactly `sparsity` distinct monomials of degree 1..max_degree.
inline sparse_f2_poly sample_sparse_poly( unsigned n, std::size_t sparsity, unsigned max_degree, rng& gen )
{
  if ( n == 0 || max_degree == 0 )
    throw param_error( "random polynomials need inputs and a positive degree" );
  sparse_f2_poly p( n, gen.bit() );
  std::size_t guard = 0;
  while ( p.sparsity() < sparsity )
  {
    if ( ++guard > 1000 * ( sparsity + 1 ) )
      throw param_error( "not enough distinct monomials for the requested sparsity" );
    const auto deg = 1 + static_cast<unsigned>( gen.below( std::min( max_degree, n ) ) );
    auto lits = detail::random_literals( n, deg, gen );
    sparse_f2_poly::monomial m;
    for ( const auto& l : lits )
      m.push_back( l.var );
    if ( !p.monomials().count( m ) )
      p.add( std::move( m ) );
  }
  return p;
}

} // namespace nwlab
