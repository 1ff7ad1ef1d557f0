#pragma once

#include "relock/circuit.hpp"

#include <cstdint>

namespace relock {

/// Profile for random benchmark generation.
struct GenerateParams {
	size_t num_inputs = 8;
	size_t num_outputs = 4;
	size_t num_gates = 50; ///< logic gates, inputs excluded
	/// relative type weights; zero disables a type
	unsigned weight_and = 20;
	unsigned weight_nand = 20;
	unsigned weight_or = 15;
	unsigned weight_nor = 10;
	unsigned weight_xor = 8;
	unsigned weight_xnor = 4;
	unsigned weight_not = 8;
	unsigned weight_buf = 2;
	/// When set, regenerate until every substitution of a 2-input gate by
	/// another 2-input type changes some output on sampled patterns. This
	/// mirrors production netlists, where gross gate misreadings are
	/// functionally visible.
	bool require_visible_substitutions = false;
	size_t visibility_pattern_words = 64; ///< 64 patterns per word
	size_t max_attempts = 200;
};

/// Deterministically generates a connected combinational circuit: every gate
/// lies in the cone of some primary output.
Circuit generate_random_circuit(const GenerateParams &params, uint64_t seed);

/// Fraction of (2-input gate, wrong type) substitutions that alter some
/// output on the sampled patterns. 1.0 means fully visible.
double substitution_visibility(const Circuit &c, uint64_t seed, size_t pattern_words = 64);

} // namespace relock
