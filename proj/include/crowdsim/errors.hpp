#pragma once

#include <stdexcept>
#include <string>

namespace crowdsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A region or index refers outside its container.
struct BoundsError : Error {
  using Error::Error;
};

/// Two values that must share an item universe do not.
struct DomainMismatchError : Error {
  using Error::Error;
};

/// A structural invariant (tiling, frontier, laminar family) is violated.
struct StructureError : Error {
  using Error::Error;
};

/// Random placement could not satisfy the generation constraints.
struct GenerationError : Error {
  using Error::Error;
};

/// Aggregation over an empty or malformed answer set.
struct AggregationError : Error {
  using Error::Error;
};

/// An enumeration would exceed its configured size guard.
struct CapacityError : Error {
  using Error::Error;
};

/// Batch merging cannot decide which clusters correspond.
struct AmbiguityError : Error {
  using Error::Error;
};

/// Invalid user-supplied configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace crowdsim
