#pragma once

#include "relock/circuit.hpp"

#include <array>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace relock {

/// DIMACS-style literal: nonzero signed index, negative means complemented.
using Lit = int32_t;
using Clause = std::vector<Lit>;

/// Growable clause database for one attack run. Clauses are only ever added;
/// the inequality between the two circuit copies is guarded by an assumption
/// literal so the final key-extraction solve can drop it without deleting
/// anything.
struct CnfInstance {
	int32_t num_vars = 0;
	std::vector<Clause> clauses;

	/// variables of the shared (non-key) primary inputs, in input order
	std::vector<Lit> input_vars;
	/// key variables of copy 1 and copy 2, in key-input order
	std::array<std::vector<Lit>, 2> key_vars;
	/// output variables of copy 1 and copy 2, in output order
	std::array<std::vector<Lit>, 2> output_vars;
	/// guard literal returned by add_inequality, 0 before that
	Lit inequality_assumption = 0;

	/// circuit the instance encodes, kept so DIP copies can be appended
	std::shared_ptr<const Circuit> locked;
	std::vector<uint32_t> key_input_ids;

	Lit new_var() { return ++num_vars; }
	void add_clause(Clause c);
	size_t clause_count() const { return clauses.size(); }
};

/// Clauses that hold iff `output` carries the gate function of `inputs`.
/// n-ary gates use the direct generalization of the 2-input forms; parity
/// gates expand to 2^n clauses, so arity is capped.
std::vector<Clause> encode_gate(GateType type, std::span<const Lit> inputs, Lit output);

/// Encodes one copy of a circuit into `inst`. `pi_vars` supplies the variable
/// for each primary input (aligned to the circuit's input order); fresh
/// variables are allocated for every other node. Returns one variable per
/// node id.
std::vector<Lit> encode_circuit_copy(CnfInstance &inst, const Circuit &c, const std::vector<Lit> &pi_vars);

/// Builds the two-copy attack instance: both copies share the non-key input
/// variables but carry fresh key and internal variables.
CnfInstance encode_locked_pair(std::shared_ptr<const Circuit> locked, std::vector<uint32_t> key_inputs);

/// Adds per-output difference variables and one guarded clause requiring some
/// output pair to differ. Returns the guard; pass it as an assumption to
/// activate the inequality.
Lit add_inequality(CnfInstance &inst);

/// Appends two fresh copies with inputs fixed to `x` and outputs fixed to
/// `y`, sharing the key variables of the original pair.
void add_dip_constraint(CnfInstance &inst, const InputPattern &x, const OutputPattern &y);

/// DIMACS export, `p cnf V C` header and zero-terminated clause lines.
/// Assumptions, when given, are emitted as unit clauses.
void write_dimacs(const CnfInstance &inst, std::ostream &out, std::span<const Lit> assumptions = {});
void write_dimacs(int32_t num_vars, const std::vector<Clause> &clauses, std::ostream &out,
		  std::span<const Lit> assumptions = {});

} // namespace relock
