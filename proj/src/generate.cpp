#include "relock/generate.hpp"
#include "relock/rng.hpp"

#include <algorithm>
#include <array>

namespace relock {

namespace {

constexpr std::array<GateType, 6> kTwoInput = {GateType::And, GateType::Or,  GateType::Nand,
					       GateType::Nor, GateType::Xor, GateType::Xnor};

struct TypeTable {
	std::vector<GateType> types;
	std::vector<unsigned> cumulative;
	unsigned total = 0;

	void add(GateType t, unsigned w)
	{
		if (w == 0)
			return;
		total += w;
		types.push_back(t);
		cumulative.push_back(total);
	}

	GateType pick(Rng &rng) const
	{
		unsigned r = unsigned(rng.below(total));
		for (size_t i = 0; i < types.size(); ++i)
			if (r < cumulative[i])
				return types[i];
		return types.back();
	}
};

Circuit try_generate(const GenerateParams &p, Rng &rng, bool &ok)
{
	ok = false;
	TypeTable table;
	table.add(GateType::And, p.weight_and);
	table.add(GateType::Nand, p.weight_nand);
	table.add(GateType::Or, p.weight_or);
	table.add(GateType::Nor, p.weight_nor);
	table.add(GateType::Xor, p.weight_xor);
	table.add(GateType::Xnor, p.weight_xnor);
	table.add(GateType::Not, p.weight_not);
	table.add(GateType::Buf, p.weight_buf);
	if (table.total == 0)
		throw Error("all gate-type weights are zero");

	Circuit c;
	std::vector<uint32_t> pool;
	std::vector<bool> consumed;
	for (size_t i = 0; i < p.num_inputs; ++i) {
		pool.push_back(c.add_input("in" + std::to_string(i)));
		consumed.push_back(false);
	}

	auto pick_node = [&](const std::vector<uint32_t> &exclude) -> uint32_t {
		for (int tries = 0; tries < 64; ++tries) {
			uint32_t cand;
			// lean on unconsumed nodes so the graph stays connected
			std::vector<uint32_t> fresh;
			if (rng.next() % 2 == 0) {
				for (uint32_t n : pool)
					if (!consumed[n])
						fresh.push_back(n);
			}
			if (!fresh.empty())
				cand = fresh[rng.below(fresh.size())];
			else
				cand = pool[rng.below(pool.size())];
			if (std::find(exclude.begin(), exclude.end(), cand) == exclude.end())
				return cand;
		}
		return pool[rng.below(pool.size())];
	};

	size_t gate_no = 0;
	for (size_t g = 0; g < p.num_gates; ++g) {
		GateType t = table.pick(rng);
		std::vector<uint32_t> fanins;
		size_t arity = (t == GateType::Not || t == GateType::Buf) ? 1 : 2;
		for (size_t k = 0; k < arity; ++k)
			fanins.push_back(pick_node(fanins));
		for (uint32_t f : fanins)
			consumed[f] = true;
		uint32_t id = c.add_gate("g" + std::to_string(gate_no++), t, std::move(fanins));
		pool.push_back(id);
		consumed.push_back(false);
	}

	for (size_t i = 0; i < p.num_inputs; ++i)
		if (!consumed[i])
			return c; // dangling input, caller retries

	std::vector<uint32_t> sinks;
	for (uint32_t n : pool)
		if (!consumed[n])
			sinks.push_back(n);

	// fold surplus sinks into fresh gates until the output count fits
	while (sinks.size() > p.num_outputs) {
		uint32_t a = sinks.back();
		sinks.pop_back();
		uint32_t b = sinks.back();
		sinks.pop_back();
		GateType t = kTwoInput[rng.below(p.weight_xor == 0 && p.weight_xnor == 0 ? 4 : 6)];
		sinks.push_back(c.add_gate("g" + std::to_string(gate_no++), t, {a, b}));
	}
	// promote internal nodes when there are too few natural sinks
	while (sinks.size() < p.num_outputs) {
		uint32_t cand = pool[p.num_inputs + rng.below(pool.size() - p.num_inputs)];
		if (std::find(sinks.begin(), sinks.end(), cand) == sinks.end())
			sinks.push_back(cand);
	}
	for (uint32_t s : sinks)
		c.mark_output(s);
	c.finalize();
	ok = true;
	return c;
}

} // namespace

double substitution_visibility(const Circuit &c, uint64_t seed, size_t pattern_words)
{
	Rng rng(seed);
	std::vector<std::vector<uint64_t>> inputs(pattern_words, std::vector<uint64_t>(c.num_inputs()));
	for (auto &w : inputs)
		for (auto &v : w)
			v = rng.next();

	std::vector<std::vector<uint64_t>> base;
	base.reserve(pattern_words);
	for (const auto &w : inputs)
		base.push_back(c.simulate_words(w));

	size_t total = 0, visible = 0;
	Circuit probe = c;
	for (uint32_t id = 0; id < c.size(); ++id) {
		const Gate &g = c.gate(id);
		if (g.fanins.size() != 2 || !is_two_input_type(g.type))
			continue;
		for (GateType wrong : kTwoInput) {
			if (wrong == g.type)
				continue;
			++total;
			probe.set_gate_type(id, wrong);
			bool differs = false;
			for (size_t w = 0; w < pattern_words && !differs; ++w) {
				std::vector<uint64_t> out = probe.simulate_words(inputs[w]);
				if (out != base[w])
					differs = true;
			}
			if (differs)
				++visible;
			probe.set_gate_type(id, g.type);
		}
	}
	return total == 0 ? 1.0 : double(visible) / double(total);
}

Circuit generate_random_circuit(const GenerateParams &params, uint64_t seed)
{
	if (params.num_inputs == 0 || params.num_outputs == 0 || params.num_gates < params.num_outputs)
		throw Error("invalid generation profile");
	Rng master(seed);
	for (size_t attempt = 0; attempt < params.max_attempts; ++attempt) {
		Rng rng = master.fork(attempt);
		bool ok = false;
		Circuit c = try_generate(params, rng, ok);
		if (!ok)
			continue;
		if (params.require_visible_substitutions &&
		    substitution_visibility(c, seed ^ 0x5eedf00dull, params.visibility_pattern_words) < 1.0)
			continue;
		return c;
	}
	throw Error("failed to generate a circuit matching the requested profile");
}

} // namespace relock
