#include "relock/circuit.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace relock {

const char *to_string(GateType t)
{
	switch (t) {
	case GateType::Input:
		return "INPUT";
	case GateType::And:
		return "AND";
	case GateType::Or:
		return "OR";
	case GateType::Nand:
		return "NAND";
	case GateType::Nor:
		return "NOR";
	case GateType::Xor:
		return "XOR";
	case GateType::Xnor:
		return "XNOR";
	case GateType::Not:
		return "NOT";
	case GateType::Buf:
		return "BUFF";
	}
	return "?";
}

std::optional<GateType> gate_type_from_string(std::string_view s)
{
	std::string u;
	u.reserve(s.size());
	for (char c : s)
		u.push_back(char(std::toupper(static_cast<unsigned char>(c))));
	if (u == "AND")
		return GateType::And;
	if (u == "OR")
		return GateType::Or;
	if (u == "NAND")
		return GateType::Nand;
	if (u == "NOR")
		return GateType::Nor;
	if (u == "XOR")
		return GateType::Xor;
	if (u == "XNOR")
		return GateType::Xnor;
	if (u == "NOT" || u == "INV")
		return GateType::Not;
	if (u == "BUF" || u == "BUFF")
		return GateType::Buf;
	if (u == "INPUT")
		return GateType::Input;
	return std::nullopt;
}

std::string to_lower_string(GateType t)
{
	std::string s = to_string(t);
	for (char &c : s)
		c = char(std::tolower(static_cast<unsigned char>(c)));
	if (s == "buff")
		s = "buf";
	return s;
}

TruthTable::TruthTable(size_t num_inputs, size_t num_outputs)
    : num_inputs_(num_inputs), blocks_((uint64_t(1) << num_inputs) <= 64 ? 1 : (uint64_t(1) << num_inputs) / 64),
      columns_(num_outputs, std::vector<uint64_t>(blocks_, 0))
{
}

bool TruthTable::get(uint64_t row, size_t output) const
{
	return (columns_.at(output)[row / 64] >> (row % 64)) & 1;
}

void TruthTable::set_word(size_t output, uint64_t block, uint64_t bits)
{
	if (num_inputs_ < 6) {
		// keep unused high lanes at zero so tables compare by value
		bits &= (uint64_t(1) << (uint64_t(1) << num_inputs_)) - 1;
	}
	columns_.at(output).at(block) = bits;
}

uint32_t Circuit::add_input(std::string name)
{
	if (finalized_)
		throw Error("circuit is finalized");
	if (name_to_id_.count(name))
		throw Error("duplicate net name: " + name);
	uint32_t id = uint32_t(gates_.size());
	gates_.push_back(Gate{GateType::Input, {}});
	name_to_id_.emplace(name, id);
	names_.push_back(std::move(name));
	inputs_.push_back(id);
	return id;
}

uint32_t Circuit::add_gate(std::string name, GateType type, std::vector<uint32_t> fanins)
{
	if (finalized_)
		throw Error("circuit is finalized");
	if (type == GateType::Input)
		throw Error("use add_input for primary inputs");
	if (name_to_id_.count(name))
		throw Error("duplicate net name: " + name);
	uint32_t id = uint32_t(gates_.size());
	gates_.push_back(Gate{type, std::move(fanins)});
	name_to_id_.emplace(name, id);
	names_.push_back(std::move(name));
	return id;
}

void Circuit::mark_output(uint32_t id)
{
	if (id >= gates_.size())
		throw Error("output refers to unknown node");
	outputs_.push_back(id);
}

void Circuit::set_fanins(uint32_t id, std::vector<uint32_t> fanins)
{
	if (finalized_)
		throw Error("circuit is finalized");
	if (gates_.at(id).type == GateType::Input)
		throw Error("primary inputs have no fan-ins");
	gates_[id].fanins = std::move(fanins);
}

void Circuit::set_gate_type(uint32_t id, GateType type)
{
	Gate &g = gates_.at(id);
	if (g.type == GateType::Input || type == GateType::Input)
		throw Error("cannot relabel primary inputs");
	size_t arity = g.fanins.size();
	bool ok = (type == GateType::Not || type == GateType::Buf) ? arity == 1 : arity >= 2;
	if (!ok)
		throw Error(std::string("arity mismatch relabeling to ") + to_string(type));
	g.type = type;
}

std::optional<uint32_t> Circuit::find(std::string_view name) const
{
	auto it = name_to_id_.find(std::string(name));
	if (it == name_to_id_.end())
		return std::nullopt;
	return it->second;
}

size_t Circuit::input_position(uint32_t id) const
{
	for (size_t i = 0; i < inputs_.size(); ++i)
		if (inputs_[i] == id)
			return i;
	throw Error("node is not a primary input: " + names_.at(id));
}

void Circuit::finalize()
{
	if (finalized_)
		return;
	if (outputs_.empty())
		throw Error("no outputs declared");
	for (uint32_t id = 0; id < gates_.size(); ++id) {
		const Gate &g = gates_[id];
		for (uint32_t f : g.fanins)
			if (f >= gates_.size())
				throw Error("undefined fan-in reference in " + names_[id]);
		size_t arity = g.fanins.size();
		switch (g.type) {
		case GateType::Input:
			if (arity != 0)
				throw Error("input with fan-in: " + names_[id]);
			break;
		case GateType::Not:
		case GateType::Buf:
			if (arity != 1)
				throw Error("single-input gate with wrong fan-in: " + names_[id]);
			break;
		default:
			if (arity < 2)
				throw Error("multi-input gate with fan-in < 2: " + names_[id]);
			break;
		}
	}

	// Kahn topological sort; leftover nodes indicate a combinational loop.
	std::vector<uint32_t> pending(gates_.size(), 0);
	std::vector<std::vector<uint32_t>> consumers(gates_.size());
	for (uint32_t id = 0; id < gates_.size(); ++id) {
		const Gate &g = gates_[id];
		pending[id] = uint32_t(g.fanins.size());
		for (uint32_t f : g.fanins)
			consumers[f].push_back(id);
	}
	topo_.clear();
	topo_.reserve(gates_.size());
	for (uint32_t id = 0; id < gates_.size(); ++id)
		if (pending[id] == 0)
			topo_.push_back(id);
	for (size_t head = 0; head < topo_.size(); ++head) {
		for (uint32_t c : consumers[topo_[head]]) {
			// a node consuming the same net twice is decremented twice
			if (--pending[c] == 0)
				topo_.push_back(c);
		}
	}
	if (topo_.size() != gates_.size())
		throw Error("netlist contains a combinational cycle");
	finalized_ = true;
}

void Circuit::check_finalized() const
{
	if (!finalized_)
		throw Error("circuit not finalized");
}

std::span<const uint32_t> Circuit::topological_order() const
{
	check_finalized();
	return topo_;
}

std::vector<uint64_t> Circuit::eval_words(const std::vector<uint64_t> &input_words,
					  std::span<const uint32_t> order) const
{
	if (input_words.size() != inputs_.size())
		throw Error("input pattern length mismatch");
	std::vector<uint64_t> value(gates_.size(), 0);
	for (size_t i = 0; i < inputs_.size(); ++i)
		value[inputs_[i]] = input_words[i];
	for (uint32_t id : order) {
		const Gate &g = gates_[id];
		if (g.type == GateType::Input)
			continue;
		uint64_t acc;
		switch (g.type) {
		case GateType::And:
		case GateType::Nand:
			acc = ~uint64_t(0);
			for (uint32_t f : g.fanins)
				acc &= value[f];
			if (g.type == GateType::Nand)
				acc = ~acc;
			break;
		case GateType::Or:
		case GateType::Nor:
			acc = 0;
			for (uint32_t f : g.fanins)
				acc |= value[f];
			if (g.type == GateType::Nor)
				acc = ~acc;
			break;
		case GateType::Xor:
		case GateType::Xnor:
			acc = 0;
			for (uint32_t f : g.fanins)
				acc ^= value[f];
			if (g.type == GateType::Xnor)
				acc = ~acc;
			break;
		case GateType::Not:
			acc = ~value[g.fanins[0]];
			break;
		case GateType::Buf:
			acc = value[g.fanins[0]];
			break;
		default:
			acc = 0;
			break;
		}
		value[id] = acc;
	}
	std::vector<uint64_t> out(outputs_.size());
	for (size_t i = 0; i < outputs_.size(); ++i)
		out[i] = value[outputs_[i]];
	return out;
}

std::vector<uint64_t> Circuit::simulate_words(const std::vector<uint64_t> &input_words) const
{
	check_finalized();
	return eval_words(input_words, topo_);
}

OutputPattern Circuit::simulate(const InputPattern &x) const
{
	check_finalized();
	return simulate(x, topo_);
}

OutputPattern Circuit::simulate(const InputPattern &x, std::span<const uint32_t> order) const
{
	check_finalized();
	if (x.size() != inputs_.size())
		throw Error("input pattern length mismatch");
	std::vector<uint64_t> words(x.size());
	for (size_t i = 0; i < x.size(); ++i)
		words[i] = x[i] ? 1 : 0;
	std::vector<uint64_t> res = eval_words(words, order);
	OutputPattern y(res.size());
	for (size_t i = 0; i < res.size(); ++i)
		y[i] = res[i] & 1;
	return y;
}

TruthTable Circuit::simulate_all(size_t max_inputs) const
{
	check_finalized();
	size_t m = inputs_.size();
	if (m > max_inputs)
		throw Error("too many inputs for exhaustive simulation");
	TruthTable table(m, outputs_.size());
	static constexpr std::array<uint64_t, 6> lane = {
	    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
	    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
	std::vector<uint64_t> words(m);
	uint64_t blocks = table.num_blocks();
	for (uint64_t b = 0; b < blocks; ++b) {
		for (size_t k = 0; k < m; ++k) {
			if (k < 6)
				words[k] = lane[k];
			else
				words[k] = ((b >> (k - 6)) & 1) ? ~uint64_t(0) : 0;
		}
		std::vector<uint64_t> res = eval_words(words, topo_);
		for (size_t o = 0; o < res.size(); ++o)
			table.set_word(o, b, res[o]);
	}
	return table;
}

bool structurally_equal(const Circuit &a, const Circuit &b)
{
	if (a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs() || a.size() != b.size())
		return false;
	for (size_t i = 0; i < a.num_inputs(); ++i)
		if (a.name(a.inputs()[i]) != b.name(b.inputs()[i]))
			return false;
	for (size_t i = 0; i < a.num_outputs(); ++i)
		if (a.name(a.outputs()[i]) != b.name(b.outputs()[i]))
			return false;
	for (uint32_t id = 0; id < a.size(); ++id) {
		auto other = b.find(a.name(id));
		if (!other)
			return false;
		const Gate &ga = a.gate(id);
		const Gate &gb = b.gate(*other);
		if (ga.type != gb.type || ga.fanins.size() != gb.fanins.size())
			return false;
		for (size_t k = 0; k < ga.fanins.size(); ++k)
			if (a.name(ga.fanins[k]) != b.name(gb.fanins[k]))
				return false;
	}
	return true;
}

std::string pattern_to_string(const std::vector<bool> &bits)
{
	std::string s;
	s.reserve(bits.size());
	for (bool b : bits)
		s.push_back(b ? '1' : '0');
	return s;
}

std::vector<bool> pattern_from_string(std::string_view s)
{
	std::vector<bool> bits;
	bits.reserve(s.size());
	for (char c : s) {
		if (c == '0')
			bits.push_back(false);
		else if (c == '1')
			bits.push_back(true);
		else
			throw Error("invalid bit character in pattern string");
	}
	return bits;
}

std::string pattern_to_hex(const std::vector<bool> &bits)
{
	static const char digits[] = "0123456789abcdef";
	std::string s;
	size_t n = bits.size();
	size_t ndigits = (n + 3) / 4;
	s.reserve(ndigits);
	for (size_t d = 0; d < ndigits; ++d) {
		unsigned v = 0;
		for (size_t k = 0; k < 4; ++k) {
			size_t idx = d * 4 + k;
			v = (v << 1) | (idx < n && bits[idx] ? 1u : 0u);
		}
		s.push_back(digits[v & 0xF]);
	}
	return s;
}

} // namespace relock
