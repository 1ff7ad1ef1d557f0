#pragma once

#include "relock/cnf.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace relock {

enum class SolveStatus { Sat, Unsat, Timeout };

struct SolveResult {
	SolveStatus status = SolveStatus::Unsat;
	/// Total assignment when Sat: model[v] for v in 1..num_vars, slot 0 unused.
	std::vector<bool> model;
	std::chrono::milliseconds elapsed{0};

	bool sat() const { return status == SolveStatus::Sat; }
	bool unsat() const { return status == SolveStatus::Unsat; }
	bool timeout() const { return status == SolveStatus::Timeout; }
	bool value(Lit l) const;
};

struct SolverStats {
	uint64_t decisions = 0;
	uint64_t propagations = 0;
	uint64_t conflicts = 0;
	uint64_t restarts = 0;
	uint64_t learned = 0;
	uint64_t removed = 0;
};

/// Conflict-driven clause-learning solver: two-watched-literal propagation,
/// activity-ordered decisions with phase saving, first-UIP learning, Luby
/// restarts and activity-based learned-clause reduction. Clause addition is
/// incremental and solving accepts assumption literals, so one instance
/// serves a whole attack run. Fully deterministic: no randomized choices.
class Solver {
      public:
	Solver();
	~Solver();
	Solver(const Solver &) = delete;
	Solver &operator=(const Solver &) = delete;

	/// Allocates the next variable, 1-based as in DIMACS.
	Lit new_var();
	void ensure_vars(int32_t count);
	int32_t num_vars() const;

	/// Permanently adds a clause; literals must reference allocated
	/// variables. Throws Error otherwise.
	void add_clause(std::span<const Lit> lits);
	void add_clause(std::initializer_list<Lit> lits) { add_clause(std::span<const Lit>(lits)); }
	size_t num_clauses() const;

	/// Solves under the given assumptions. Every Sat answer is certified
	/// by replaying the model against all input clauses before returning.
	SolveResult solve(std::span<const Lit> assumptions = {},
			  std::optional<std::chrono::milliseconds> budget = std::nullopt);

	const SolverStats &stats() const;

      private:
	struct Impl;
	std::unique_ptr<Impl> impl_;
};

} // namespace relock
