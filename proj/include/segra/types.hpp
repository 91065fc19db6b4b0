#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace segra {

using NodeId = std::int32_t;  // dense ids, 0..n-1 after ingestion
using Real = double;

enum class NodeLabel : std::uint8_t { Harmful, Neutral };

inline const char* to_string(NodeLabel label) {
  return label == NodeLabel::Harmful ? "harmful" : "neutral";
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidScore : public Error {
 public:
  using Error::Error;
};

// Raised when a node has fewer than d positive-relevance candidates.
class TooFewCandidates : public Error {
 public:
  TooFewCandidates(NodeId node, int have, int need)
      : Error("node " + std::to_string(node) + " has " + std::to_string(have) +
              " positive-relevance candidates, needs " + std::to_string(need)),
        node(node) {}
  NodeId node;
};

class EdgeNotFound : public Error {
 public:
  EdgeNotFound(NodeId u, NodeId v)
      : Error("edge (" + std::to_string(u) + "," + std::to_string(v) + ") not present"),
        source(u),
        target(v) {}
  NodeId source;
  NodeId target;
};

class ZeroIdealDcg : public Error {
 public:
  explicit ZeroIdealDcg(NodeId node)
      : Error("node " + std::to_string(node) + " has zero ideal DCG"), node(node) {}
  NodeId node;
};

class RewiringPrecondition : public Error {
 public:
  using Error::Error;
};

class UnreachableHarmfulComponent : public Error {
 public:
  explicit UnreachableHarmfulComponent(std::vector<NodeId> nodes)
      : Error(std::to_string(nodes.size()) +
              " harmful node(s) cannot reach any neutral node"),
        nodes(std::move(nodes)) {}
  std::vector<NodeId> nodes;
};

class NotConverged : public Error {
 public:
  explicit NotConverged(long iterations)
      : Error("fixed-point solve did not converge after " + std::to_string(iterations) +
              " iterations"),
        iterations(iterations) {}
  long iterations;
};

class TooLargeForDenseOracle : public Error {
 public:
  TooLargeForDenseOracle(std::size_t size, std::size_t guard)
      : Error("dense oracle guard exceeded: " + std::to_string(size) + " > " +
              std::to_string(guard)) {}
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

class NoFeasibleTarget : public Error {
 public:
  explicit NoFeasibleTarget(NodeId node)
      : Error("node " + std::to_string(node) +
              " has no neutral non-neighbor with positive relevance"),
        node(node) {}
  NodeId node;
};

class EmptySubset : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace segra
