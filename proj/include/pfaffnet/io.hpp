#pragma once

#include "pfaffnet/chain.hpp"
#include "pfaffnet/liegeom.hpp"
#include "pfaffnet/network.hpp"

#include <json.hpp>

#include <string>

namespace pfaffnet {

using json = nlohmann::ordered_json;

/// Activation reference: a builtin name, or a declaration object
/// {name, r, a0, a1, a2, sigma0, interval: [lo, hi]} with null for an infinite end.
ActivationPtr activation_from_json(const json& j);
json activation_to_json(const RiccatiActivation& act);

/// {d, L, widths, activation, weights, biases, head: {c0, c}} with each weight
/// matrix flattened row-major. Throws SchemaError for missing fields, shape
/// mismatches or non-finite values.
NetworkSpec network_from_json(const json& j);
json network_to_json(const NetworkSpec& net);

/// [[exponents..., coefficient], ...] as a list of [exponent-vector, coefficient] pairs.
SparsePoly polynomial_from_json(const json& j, std::size_t nvars);
json polynomial_to_json(const SparsePoly& p);

/// Chain entries (kind, layer, neuron, q) in order and certificates keyed by
/// 1-based (i, p).
json certificates_to_json(const ChainCertificates& certs);

/// {d, m, mode?, components: m rows of d entries}; each entry is a network
/// document or {"polynomial": [[exponents, coefficient], ...]}.
VectorFieldFamily family_from_json(const json& j);

json read_json_file(const std::string& path);

} // namespace pfaffnet
