#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace relock {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
      public:
	using std::runtime_error::runtime_error;
};

enum class GateType : uint8_t {
	Input,
	And,
	Or,
	Nand,
	Nor,
	Xor,
	Xnor,
	Not,
	Buf,
};

/// Canonical upper-case name ("AND", "BUFF", ...).
const char *to_string(GateType t);

/// Case-insensitive lookup; accepts both "BUF" and "BUFF". Returns nullopt for
/// unknown names (including sequential elements, which the caller rejects).
std::optional<GateType> gate_type_from_string(std::string_view s);

/// Lower-case form used in error-pair specs and result tables ("nand", ...).
std::string to_lower_string(GateType t);

constexpr bool is_two_input_type(GateType t)
{
	switch (t) {
	case GateType::And:
	case GateType::Or:
	case GateType::Nand:
	case GateType::Nor:
	case GateType::Xor:
	case GateType::Xnor:
		return true;
	default:
		return false;
	}
}

struct Gate {
	GateType type = GateType::Input;
	std::vector<uint32_t> fanins;
};

/// Bit vector aligned to a circuit's primary input order.
using InputPattern = std::vector<bool>;
/// Bit vector aligned to a circuit's primary output order.
using OutputPattern = std::vector<bool>;

/// Dense truth table over all 2^M input rows. Row r assigns input k the bit
/// (r >> k) & 1, i.e. the first primary input toggles fastest.
class TruthTable {
      public:
	TruthTable(size_t num_inputs, size_t num_outputs);

	size_t num_inputs() const { return num_inputs_; }
	size_t num_outputs() const { return columns_.size(); }
	uint64_t num_rows() const { return uint64_t(1) << num_inputs_; }

	bool get(uint64_t row, size_t output) const;
	void set_word(size_t output, uint64_t block, uint64_t bits);
	uint64_t word(size_t output, uint64_t block) const { return columns_[output][block]; }
	size_t num_blocks() const { return blocks_; }

	bool operator==(const TruthTable &other) const = default;

      private:
	size_t num_inputs_;
	size_t blocks_;
	std::vector<std::vector<uint64_t>> columns_;
};

/// Combinational gate-level netlist. Nodes are identified by dense integer
/// ids assigned in creation order; primary inputs are nodes of type Input.
/// A circuit is immutable once finalize() has run (except for gate-type
/// relabeling, which preserves connectivity) and is then safe to share
/// across threads.
class Circuit {
      public:
	Circuit() = default;

	// construction
	uint32_t add_input(std::string name);
	uint32_t add_gate(std::string name, GateType type, std::vector<uint32_t> fanins);
	void mark_output(uint32_t id);
	/// Replaces a gate's fan-in list; only valid before finalize().
	void set_fanins(uint32_t id, std::vector<uint32_t> fanins);
	/// Validates arities, references and acyclicity, and computes the
	/// evaluation order. Throws Error on an ill-formed netlist.
	void finalize();
	bool finalized() const { return finalized_; }

	/// Relabels a gate's function without touching connectivity. The new
	/// type must have the same arity class as the node's fan-in count.
	void set_gate_type(uint32_t id, GateType type);

	// queries
	size_t size() const { return gates_.size(); }
	size_t num_inputs() const { return inputs_.size(); }
	size_t num_outputs() const { return outputs_.size(); }
	/// Number of non-input gates (the L statistic).
	size_t num_logic_gates() const { return gates_.size() - inputs_.size(); }
	const Gate &gate(uint32_t id) const { return gates_.at(id); }
	const std::string &name(uint32_t id) const { return names_.at(id); }
	std::optional<uint32_t> find(std::string_view name) const;
	std::span<const uint32_t> inputs() const { return inputs_; }
	std::span<const uint32_t> outputs() const { return outputs_; }
	std::span<const uint32_t> topological_order() const;
	/// Position of an input node within the primary input list.
	size_t input_position(uint32_t id) const;

	// simulation
	OutputPattern simulate(const InputPattern &x) const;
	OutputPattern simulate(const InputPattern &x, std::span<const uint32_t> order) const;
	/// Evaluates 64 patterns at once, one bit lane per pattern.
	std::vector<uint64_t> simulate_words(const std::vector<uint64_t> &input_words) const;
	/// Exhaustive table over all 2^M rows; throws Error when M exceeds
	/// max_inputs (blow-up guard).
	TruthTable simulate_all(size_t max_inputs = 24) const;

      private:
	void check_finalized() const;
	std::vector<uint64_t> eval_words(const std::vector<uint64_t> &input_words,
					 std::span<const uint32_t> order) const;

	std::vector<Gate> gates_;
	std::vector<std::string> names_;
	std::unordered_map<std::string, uint32_t> name_to_id_;
	std::vector<uint32_t> inputs_;
	std::vector<uint32_t> outputs_;
	std::vector<uint32_t> topo_;
	bool finalized_ = false;
};

/// Graph equality up to node ids: same input/output name sequences and the
/// same (type, fan-in) structure reached from equally named nodes.
bool structurally_equal(const Circuit &a, const Circuit &b);

/// "0100..." rendering of a pattern, index 0 first.
std::string pattern_to_string(const std::vector<bool> &bits);
/// Parses a "0100..." string; throws Error on other characters.
std::vector<bool> pattern_from_string(std::string_view s);
/// Hex rendering with bit 0 as the most significant bit of the first digit.
std::string pattern_to_hex(const std::vector<bool> &bits);

} // namespace relock
