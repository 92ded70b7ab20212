#pragma once

#include <stdexcept>
#include <string>

namespace flswarm {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Topology generation could not produce a connected graph.
struct InfeasibleTopology : Error {
  explicit InfeasibleTopology(const std::string& m) : Error("InfeasibleTopology: " + m) {}
};

// More devices than samples, or similar impossible split.
struct PartitionInfeasible : Error {
  explicit PartitionInfeasible(const std::string& m) : Error("PartitionInfeasible: " + m) {}
};

struct UnknownDevice : Error {
  explicit UnknownDevice(const std::string& m) : Error("UnknownDevice: " + m) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& m) : Error("DimensionMismatch: " + m) {}
};

struct EmptyTestSet : Error {
  explicit EmptyTestSet(const std::string& m) : Error("EmptyTestSet: " + m) {}
};

struct IneligibleDevice : Error {
  explicit IneligibleDevice(const std::string& m) : Error("IneligibleDevice: " + m) {}
};

struct NoEligibleDevices : Error {
  explicit NoEligibleDevices(const std::string& m) : Error("NoEligibleDevices: " + m) {}
};

struct NotEnoughEligible : Error {
  explicit NotEnoughEligible(const std::string& m) : Error("NotEnoughEligible: " + m) {}
};

struct TooManyDevices : Error {
  explicit TooManyDevices(const std::string& m) : Error("TooManyDevices: " + m) {}
};

struct EmptyUpdateSet : Error {
  explicit EmptyUpdateSet(const std::string& m) : Error("EmptyUpdateSet: " + m) {}
};

struct NoRouteFound : Error {
  explicit NoRouteFound(const std::string& m) : Error("NoRouteFound: " + m) {}
};

struct MissingRuns : Error {
  explicit MissingRuns(const std::string& m) : Error("MissingRuns: " + m) {}
};

// Config file failed schema validation; message lists each offending field.
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("ConfigError: " + m) {}
};

}  // namespace flswarm
