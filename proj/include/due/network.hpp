#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "due/demand.hpp"

namespace due {

/// Malformed JSON, wrong types, or unknown keys. The message carries the location.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Well-formed document that violates a structural invariant.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Link {
    std::string id;
    std::size_t tail = 0;  // node index
    std::size_t head = 0;
    double free_flow_time = 0.0;    // alpha > 0
    double congestion_slope = 0.0;  // beta >= 0, time per vehicle on the link
};

struct OdPair {
    std::size_t origin = 0;
    std::size_t destination = 0;
    InverseDemandSpec inverse_demand;
};

struct Path {
    std::string id;
    std::size_t od_index = 0;
    std::vector<std::size_t> links;  // link indices, in traversal order
};

struct Network {
    std::vector<std::string> nodes;
    std::vector<Link> links;
    std::vector<OdPair> od_pairs;
    std::vector<Path> paths;

    std::size_t node_index(std::string_view id) const;  // throws std::invalid_argument
    std::size_t link_index(std::string_view id) const;  // throws std::invalid_argument

    /// Indices into `paths` of the paths serving OD pair `od`, in document order.
    std::vector<std::size_t> paths_of(std::size_t od) const;

    /// Sum of free-flow times along path p.
    double free_flow_time(std::size_t p) const;
};

inline constexpr std::size_t kDefaultMaxPaths = 64;

struct ParseOptions {
    /// Cap applied when the document has no `paths` key and paths are enumerated.
    std::size_t max_paths = kDefaultMaxPaths;
};

/// Parses and validates a network document. When `paths` is absent every OD
/// pair gets its simple paths enumerated; when present it is taken as the
/// complete path set and an OD pair without a path is a validation error.
Network parse_network(std::string_view document, const ParseOptions& options = {});

/// Checks every Network invariant; throws ValidationError naming the offender.
void validate(const Network& network);

/// All simple directed paths of `od`, depth first with out-links visited in
/// lexicographic link-id order, truncated at max_paths. Ids are "<origin>-<destination>#<n>".
std::vector<Path> enumerate_paths(const Network& network, std::size_t od, std::size_t max_paths);

}  // namespace due
