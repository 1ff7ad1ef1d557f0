#include "relock/cnf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

namespace relock {

void CnfInstance::add_clause(Clause c)
{
	if (c.empty())
		throw Error("empty clause");
	for (Lit l : c)
		if (l == 0 || std::abs(l) > num_vars)
			throw Error("clause references unallocated variable");
	clauses.push_back(std::move(c));
}

std::vector<Clause> encode_gate(GateType type, std::span<const Lit> inputs, Lit output)
{
	size_t n = inputs.size();
	auto arity_error = [&] { throw Error(std::string("arity mismatch encoding ") + to_string(type)); };
	std::vector<Clause> cs;
	switch (type) {
	case GateType::And:
	case GateType::Nand: {
		if (n < 2)
			arity_error();
		Lit z = type == GateType::And ? output : -output;
		Clause last;
		for (Lit x : inputs) {
			cs.push_back({x, -z});
			last.push_back(-x);
		}
		last.push_back(z);
		cs.push_back(std::move(last));
		break;
	}
	case GateType::Or:
	case GateType::Nor: {
		if (n < 2)
			arity_error();
		Lit z = type == GateType::Or ? output : -output;
		Clause last;
		for (Lit x : inputs) {
			cs.push_back({-x, z});
			last.push_back(x);
		}
		last.push_back(-z);
		cs.push_back(std::move(last));
		break;
	}
	case GateType::Xor:
	case GateType::Xnor: {
		if (n < 2)
			arity_error();
		if (n > 16)
			throw Error("parity gate arity too large for direct encoding");
		// exclude every assignment whose parity disagrees with output
		bool flip = type == GateType::Xnor;
		for (uint32_t mask = 0; mask < (1u << n); ++mask) {
			bool parity = (std::popcount(mask) & 1) != 0;
			bool z = flip ? !parity : parity;
			Clause c;
			for (size_t i = 0; i < n; ++i)
				c.push_back((mask >> i) & 1 ? -inputs[i] : inputs[i]);
			c.push_back(z ? -output : output);
			cs.push_back(std::move(c));
		}
		break;
	}
	case GateType::Not:
		if (n != 1)
			arity_error();
		cs.push_back({inputs[0], output});
		cs.push_back({-inputs[0], -output});
		break;
	case GateType::Buf:
		if (n != 1)
			arity_error();
		cs.push_back({-inputs[0], output});
		cs.push_back({inputs[0], -output});
		break;
	case GateType::Input:
		throw Error("primary inputs have no clauses");
	}
	return cs;
}

std::vector<Lit> encode_circuit_copy(CnfInstance &inst, const Circuit &c, const std::vector<Lit> &pi_vars)
{
	if (pi_vars.size() != c.num_inputs())
		throw Error("primary input variable count mismatch");
	std::vector<Lit> node_var(c.size(), 0);
	for (size_t i = 0; i < c.num_inputs(); ++i)
		node_var[c.inputs()[i]] = pi_vars[i];
	for (uint32_t id : c.topological_order()) {
		const Gate &g = c.gate(id);
		if (g.type == GateType::Input)
			continue;
		node_var[id] = inst.new_var();
		std::vector<Lit> ins;
		ins.reserve(g.fanins.size());
		for (uint32_t f : g.fanins)
			ins.push_back(node_var[f]);
		for (Clause &cl : encode_gate(g.type, ins, node_var[id]))
			inst.add_clause(std::move(cl));
	}
	return node_var;
}

namespace {

// pi_vars for one copy: shared X at non-key positions, copy keys elsewhere
std::vector<Lit> assemble_pi_vars(const CnfInstance &inst, size_t copy)
{
	const Circuit &c = *inst.locked;
	std::vector<Lit> pi(c.num_inputs(), 0);
	std::vector<bool> is_key(c.size(), false);
	for (size_t k = 0; k < inst.key_input_ids.size(); ++k) {
		uint32_t id = inst.key_input_ids[k];
		is_key[id] = true;
		pi[c.input_position(id)] = inst.key_vars[copy][k];
	}
	size_t xi = 0;
	for (size_t i = 0; i < c.num_inputs(); ++i) {
		if (!is_key[c.inputs()[i]])
			pi[i] = inst.input_vars[xi++];
	}
	return pi;
}

} // namespace

CnfInstance encode_locked_pair(std::shared_ptr<const Circuit> locked, std::vector<uint32_t> key_inputs)
{
	CnfInstance inst;
	inst.locked = std::move(locked);
	inst.key_input_ids = std::move(key_inputs);
	const Circuit &c = *inst.locked;

	std::vector<bool> is_key(c.size(), false);
	for (uint32_t id : inst.key_input_ids) {
		if (id >= c.size() || c.gate(id).type != GateType::Input)
			throw Error("key input is not a primary input of the locked circuit");
		if (is_key[id])
			throw Error("duplicate key input");
		is_key[id] = true;
	}

	for (uint32_t id : c.inputs())
		if (!is_key[id])
			inst.input_vars.push_back(inst.new_var());
	for (size_t copy = 0; copy < 2; ++copy)
		for (size_t k = 0; k < inst.key_input_ids.size(); ++k)
			inst.key_vars[copy].push_back(inst.new_var());

	for (size_t copy = 0; copy < 2; ++copy) {
		std::vector<Lit> node_var = encode_circuit_copy(inst, c, assemble_pi_vars(inst, copy));
		for (uint32_t out : c.outputs())
			inst.output_vars[copy].push_back(node_var[out]);
	}
	return inst;
}

Lit add_inequality(CnfInstance &inst)
{
	if (inst.output_vars[0].size() != inst.output_vars[1].size() || inst.output_vars[0].empty())
		throw Error("instance has no encoded output pair");
	Lit guard = inst.new_var();
	Clause any_diff{-guard};
	for (size_t i = 0; i < inst.output_vars[0].size(); ++i) {
		Lit d = inst.new_var();
		std::array<Lit, 2> ins{inst.output_vars[0][i], inst.output_vars[1][i]};
		for (Clause &c : encode_gate(GateType::Xor, ins, d))
			inst.add_clause(std::move(c));
		any_diff.push_back(d);
	}
	inst.add_clause(std::move(any_diff));
	inst.inequality_assumption = guard;
	return guard;
}

void add_dip_constraint(CnfInstance &inst, const InputPattern &x, const OutputPattern &y)
{
	if (!inst.locked)
		throw Error("instance was not built from a locked circuit");
	const Circuit &c = *inst.locked;
	if (x.size() + inst.key_input_ids.size() != c.num_inputs())
		throw Error("input pattern dimension mismatch");
	if (y.size() != c.num_outputs())
		throw Error("output pattern dimension mismatch");

	std::vector<bool> is_key(c.size(), false);
	for (uint32_t id : inst.key_input_ids)
		is_key[id] = true;

	for (size_t copy = 0; copy < 2; ++copy) {
		std::vector<Lit> pi(c.num_inputs(), 0);
		size_t xi = 0;
		std::vector<Lit> fixed_units;
		for (size_t i = 0; i < c.num_inputs(); ++i) {
			uint32_t id = c.inputs()[i];
			if (is_key[id])
				continue;
			Lit v = inst.new_var();
			pi[i] = v;
			fixed_units.push_back(x[xi++] ? v : -v);
		}
		for (size_t k = 0; k < inst.key_input_ids.size(); ++k)
			pi[c.input_position(inst.key_input_ids[k])] = inst.key_vars[copy][k];
		for (Lit u : fixed_units)
			inst.add_clause({u});
		std::vector<Lit> node_var = encode_circuit_copy(inst, c, pi);
		for (size_t o = 0; o < c.num_outputs(); ++o) {
			Lit v = node_var[c.outputs()[o]];
			inst.add_clause({y[o] ? v : -v});
		}
	}
}

void write_dimacs(int32_t num_vars, const std::vector<Clause> &clauses, std::ostream &out,
		  std::span<const Lit> assumptions)
{
	out << "p cnf " << num_vars << ' ' << clauses.size() + assumptions.size() << '\n';
	for (const Clause &c : clauses) {
		for (Lit l : c)
			out << l << ' ';
		out << "0\n";
	}
	for (Lit a : assumptions)
		out << a << " 0\n";
}

void write_dimacs(const CnfInstance &inst, std::ostream &out, std::span<const Lit> assumptions)
{
	write_dimacs(inst.num_vars, inst.clauses, out, assumptions);
}

} // namespace relock
