#pragma once

#include <stdexcept>
#include <string>

namespace nwlab
{

/// Base for all workbench errors. The CLI maps subclasses to exit codes.
class error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Lengths or arities that do not line up.
class dimension_error : public error
{
public:
  using error::error;
};

/// A desk-scale cap (variable count, seed length, fan-in) was exceeded.
class cap_error : public error
{
public:
  using error::error;
};

class param_error : public error
{
public:
  using error::error;
};

/// Malformed circuit description.
class spec_error : public error
{
public:
  using error::error;
};

/// A gate has no NOF player able to see all of its inputs.
class width_error : public error
{
public:
  using error::error;
};

class construction_error : public error
{
public:
  using error::error;
};

/// Unreadable or inconsistent input file.
class format_error : public error
{
public:
  using error::error;
};

namespace detail
{
inline void require_dim( bool ok, const std::string& what )
{
  if ( !ok )
    throw dimension_error( what );
}

inline void require_cap( bool ok, const std::string& what )
{
  if ( !ok )
    throw cap_error( what );
}
} // namespace detail

} // namespace nwlab
