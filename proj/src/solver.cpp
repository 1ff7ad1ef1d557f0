#include "relock/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <limits>

namespace relock {

bool SolveResult::value(Lit l) const
{
	bool v = model.at(size_t(std::abs(l)));
	return l > 0 ? v : !v;
}

namespace {

// internal literal: 2*var + sign, vars 0-based
using ILit = uint32_t;
constexpr ILit ILIT_UNDEF = std::numeric_limits<uint32_t>::max();

inline ILit to_ilit(Lit l) { return (uint32_t(std::abs(l)) - 1) * 2 + (l < 0 ? 1 : 0); }
inline ILit neg(ILit p) { return p ^ 1; }
inline uint32_t var_of(ILit p) { return p >> 1; }
inline bool sign_of(ILit p) { return p & 1; }

enum : int8_t { V_UNDEF = 0, V_TRUE = 1, V_FALSE = -1 };

using CRef = uint32_t;
constexpr CRef CREF_UNDEF = std::numeric_limits<uint32_t>::max();

// Clause layout in the arena, all 32-bit words:
//   [0] header = size << 2 | learnt << 1 | deleted
//   [1..size] literals
//   [size+1] activity bits (learnt only)
class Arena {
      public:
	CRef alloc(std::span<const ILit> lits, bool learnt)
	{
		CRef ref = CRef(mem_.size());
		mem_.push_back(uint32_t(lits.size()) << 2 | (learnt ? 2u : 0u));
		for (ILit l : lits)
			mem_.push_back(l);
		if (learnt)
			mem_.push_back(0);
		return ref;
	}
	uint32_t size(CRef c) const { return mem_[c] >> 2; }
	bool learnt(CRef c) const { return mem_[c] & 2; }
	bool deleted(CRef c) const { return mem_[c] & 1; }
	void mark_deleted(CRef c) { mem_[c] |= 1; }
	ILit *lits(CRef c) { return &mem_[c + 1]; }
	const ILit *lits(CRef c) const { return &mem_[c + 1]; }
	float activity(CRef c) const
	{
		float f;
		std::memcpy(&f, &mem_[c + 1 + size(c)], 4);
		return f;
	}
	void set_activity(CRef c, float f) { std::memcpy(&mem_[c + 1 + size(c)], &f, 4); }

      private:
	std::vector<uint32_t> mem_;
};

struct Watcher {
	CRef cref;
	ILit blocker;
};

// max-heap over variable activities with stable index tie-breaking
class VarOrder {
      public:
	void grow(size_t n)
	{
		pos_.resize(n, -1);
	}
	bool contains(uint32_t v) const { return pos_[v] >= 0; }
	bool empty() const { return heap_.empty(); }

	void insert(uint32_t v, const std::vector<double> &act)
	{
		if (contains(v))
			return;
		pos_[v] = int32_t(heap_.size());
		heap_.push_back(v);
		up(size_t(pos_[v]), act);
	}
	uint32_t pop(const std::vector<double> &act)
	{
		uint32_t v = heap_[0];
		swap_nodes(0, heap_.size() - 1);
		heap_.pop_back();
		pos_[v] = -1;
		if (!heap_.empty())
			down(0, act);
		return v;
	}
	void bumped(uint32_t v, const std::vector<double> &act)
	{
		if (contains(v))
			up(size_t(pos_[v]), act);
	}

      private:
	static bool before(uint32_t a, uint32_t b, const std::vector<double> &act)
	{
		return act[a] > act[b] || (act[a] == act[b] && a < b);
	}
	void swap_nodes(size_t i, size_t j)
	{
		std::swap(heap_[i], heap_[j]);
		pos_[heap_[i]] = int32_t(i);
		pos_[heap_[j]] = int32_t(j);
	}
	void up(size_t i, const std::vector<double> &act)
	{
		while (i > 0) {
			size_t p = (i - 1) / 2;
			if (!before(heap_[i], heap_[p], act))
				break;
			swap_nodes(i, p);
			i = p;
		}
	}
	void down(size_t i, const std::vector<double> &act)
	{
		for (;;) {
			size_t l = 2 * i + 1, r = l + 1, best = i;
			if (l < heap_.size() && before(heap_[l], heap_[best], act))
				best = l;
			if (r < heap_.size() && before(heap_[r], heap_[best], act))
				best = r;
			if (best == i)
				break;
			swap_nodes(i, best);
			i = best;
		}
	}

	std::vector<uint32_t> heap_;
	std::vector<int32_t> pos_;
};

double luby(double y, uint64_t x)
{
	uint64_t size, seq;
	for (size = 1, seq = 0; size < x + 1; seq++, size = 2 * size + 1)
		;
	while (size - 1 != x) {
		size = (size - 1) >> 1;
		seq--;
		x = x % size;
	}
	return std::pow(y, double(seq));
}

} // namespace

struct Solver::Impl {
	Arena arena;
	std::vector<CRef> clauses;
	std::vector<CRef> learnts;
	std::vector<std::vector<Watcher>> watches; // indexed by ILit
	std::vector<int8_t> assigns;		   // per var
	std::vector<int32_t> level;
	std::vector<CRef> reason;
	std::vector<double> activity;
	std::vector<uint8_t> polarity; // saved phase, 0 = assign false first
	std::vector<uint8_t> seen;
	VarOrder order;
	std::vector<ILit> trail;
	std::vector<int32_t> trail_lim;
	size_t qhead = 0;
	bool ok = true;
	double var_inc = 1.0;
	double cla_inc = 1.0;
	double max_learnts = 0;
	SolverStats stats;

	// original clauses as given, for model certification
	std::vector<Clause> input_clauses;

	static constexpr double kVarDecay = 0.95;
	static constexpr double kClaDecay = 0.999;
	static constexpr int kRestartBase = 100;

	int32_t nvars() const { return int32_t(assigns.size()); }
	int32_t decision_level() const { return int32_t(trail_lim.size()); }
	int8_t value(ILit p) const
	{
		int8_t a = assigns[var_of(p)];
		return a == V_UNDEF ? V_UNDEF : (sign_of(p) ? int8_t(-a) : a);
	}

	Lit new_var()
	{
		uint32_t v = uint32_t(assigns.size());
		assigns.push_back(V_UNDEF);
		level.push_back(0);
		reason.push_back(CREF_UNDEF);
		activity.push_back(0.0);
		polarity.push_back(0);
		seen.push_back(0);
		watches.emplace_back();
		watches.emplace_back();
		order.grow(v + 1);
		order.insert(v, activity);
		return Lit(v + 1);
	}

	void var_bump(uint32_t v)
	{
		activity[v] += var_inc;
		if (activity[v] > 1e100) {
			for (double &a : activity)
				a *= 1e-100;
			var_inc *= 1e-100;
		}
		order.bumped(v, activity);
	}

	void cla_bump(CRef c)
	{
		float a = arena.activity(c) + float(cla_inc);
		if (a > 1e20f) {
			for (CRef l : learnts)
				arena.set_activity(l, arena.activity(l) * 1e-20f);
			cla_inc *= 1e-20;
			a = arena.activity(c) + float(cla_inc);
		}
		arena.set_activity(c, a);
	}

	void attach(CRef c)
	{
		const ILit *ls = arena.lits(c);
		watches[neg(ls[0])].push_back({c, ls[1]});
		watches[neg(ls[1])].push_back({c, ls[0]});
	}

	void detach(CRef c)
	{
		const ILit *ls = arena.lits(c);
		for (ILit w : {neg(ls[0]), neg(ls[1])}) {
			auto &list = watches[w];
			for (size_t i = 0; i < list.size(); ++i) {
				if (list[i].cref == c) {
					list[i] = list.back();
					list.pop_back();
					break;
				}
			}
		}
	}

	void enqueue(ILit p, CRef from)
	{
		assigns[var_of(p)] = sign_of(p) ? V_FALSE : V_TRUE;
		level[var_of(p)] = decision_level();
		reason[var_of(p)] = from;
		trail.push_back(p);
	}

	CRef propagate()
	{
		while (qhead < trail.size()) {
			ILit p = trail[qhead++];
			stats.propagations++;
			auto &list = watches[p];
			size_t i = 0, j = 0;
			CRef confl = CREF_UNDEF;
			while (i < list.size()) {
				Watcher w = list[i];
				if (value(w.blocker) == V_TRUE) {
					list[j++] = list[i++];
					continue;
				}
				CRef c = w.cref;
				ILit *ls = arena.lits(c);
				uint32_t size = arena.size(c);
				ILit false_lit = neg(p);
				if (ls[0] == false_lit)
					std::swap(ls[0], ls[1]);
				// ls[1] is the falsified watch now
				ILit first = ls[0];
				if (first != w.blocker && value(first) == V_TRUE) {
					list[j++] = {c, first};
					++i;
					continue;
				}
				bool moved = false;
				for (uint32_t k = 2; k < size; ++k) {
					if (value(ls[k]) != V_FALSE) {
						std::swap(ls[1], ls[k]);
						watches[neg(ls[1])].push_back({c, first});
						moved = true;
						break;
					}
				}
				if (moved) {
					++i;
					continue;
				}
				// unit or conflicting
				list[j++] = {c, first};
				++i;
				if (value(first) == V_FALSE) {
					confl = c;
					qhead = trail.size();
					while (i < list.size())
						list[j++] = list[i++];
				} else {
					enqueue(first, c);
				}
			}
			list.resize(j);
			if (confl != CREF_UNDEF)
				return confl;
		}
		return CREF_UNDEF;
	}

	void cancel_until(int32_t lvl)
	{
		if (decision_level() <= lvl)
			return;
		for (size_t i = trail.size(); i > size_t(trail_lim[lvl]); --i) {
			uint32_t v = var_of(trail[i - 1]);
			polarity[v] = sign_of(trail[i - 1]) ? 0 : 1;
			assigns[v] = V_UNDEF;
			reason[v] = CREF_UNDEF;
			order.insert(v, activity);
		}
		trail.resize(size_t(trail_lim[lvl]));
		trail_lim.resize(size_t(lvl));
		qhead = trail.size();
	}

	// first-UIP learning with local minimization
	void analyze(CRef confl, std::vector<ILit> &learnt, int32_t &bt_level)
	{
		learnt.clear();
		learnt.push_back(ILIT_UNDEF); // slot for the asserting literal
		int32_t counter = 0;
		ILit p = ILIT_UNDEF;
		size_t index = trail.size();

		CRef c = confl;
		do {
			const ILit *ls = arena.lits(c);
			uint32_t size = arena.size(c);
			if (arena.learnt(c))
				cla_bump(c);
			for (uint32_t k = (p == ILIT_UNDEF ? 0 : 1); k < size; ++k) {
				ILit q = ls[k];
				uint32_t v = var_of(q);
				if (!seen[v] && level[v] > 0) {
					seen[v] = 1;
					var_bump(v);
					if (level[v] >= decision_level())
						counter++;
					else
						learnt.push_back(q);
				}
			}
			while (!seen[var_of(trail[--index])])
				;
			p = trail[index];
			c = reason[var_of(p)];
			seen[var_of(p)] = 0;
			counter--;
		} while (counter > 0);
		learnt[0] = neg(p);

		// drop literals implied by the rest of the clause
		size_t out = 1;
		for (size_t k = 1; k < learnt.size(); ++k) {
			uint32_t v = var_of(learnt[k]);
			CRef r = reason[v];
			bool redundant = false;
			if (r != CREF_UNDEF) {
				redundant = true;
				const ILit *rl = arena.lits(r);
				for (uint32_t m = 1; m < arena.size(r); ++m) {
					uint32_t rv = var_of(rl[m]);
					if (!seen[rv] && level[rv] > 0) {
						redundant = false;
						break;
					}
				}
			}
			if (!redundant)
				learnt[out++] = learnt[k];
		}
		learnt.resize(out);

		if (learnt.size() == 1) {
			bt_level = 0;
		} else {
			size_t max_i = 1;
			for (size_t k = 2; k < learnt.size(); ++k)
				if (level[var_of(learnt[k])] > level[var_of(learnt[max_i])])
					max_i = k;
			std::swap(learnt[1], learnt[max_i]);
			bt_level = level[var_of(learnt[1])];
		}
		for (ILit q : learnt)
			seen[var_of(q)] = 0;
		// clear temporaries left set on skipped paths
		for (size_t k = index; k < trail.size(); ++k)
			seen[var_of(trail[k])] = 0;
	}

	void record_learnt(const std::vector<ILit> &learnt)
	{
		stats.learned++;
		if (learnt.size() == 1) {
			enqueue(learnt[0], CREF_UNDEF);
			return;
		}
		CRef c = arena.alloc(learnt, true);
		learnts.push_back(c);
		attach(c);
		cla_bump(c);
		enqueue(learnt[0], c);
	}

	bool locked(CRef c) const
	{
		const ILit *ls = arena.lits(c);
		return reason[var_of(ls[0])] == c && value(ls[0]) == V_TRUE;
	}

	void reduce_db()
	{
		std::vector<CRef> keep;
		std::vector<CRef> sorted = learnts;
		std::sort(sorted.begin(), sorted.end(), [&](CRef a, CRef b) {
			bool ba = arena.size(a) == 2, bb = arena.size(b) == 2;
			if (ba != bb)
				return ba < bb; // binaries last, i.e. kept
			return arena.activity(a) < arena.activity(b);
		});
		size_t half = sorted.size() / 2;
		for (size_t i = 0; i < sorted.size(); ++i) {
			CRef c = sorted[i];
			if (i < half && arena.size(c) > 2 && !locked(c)) {
				detach(c);
				arena.mark_deleted(c);
				stats.removed++;
			} else {
				keep.push_back(c);
			}
		}
		learnts = std::move(keep);
	}

	uint32_t pick_branch_var()
	{
		while (!order.empty()) {
			uint32_t v = order.pop(activity);
			if (assigns[v] == V_UNDEF)
				return v;
		}
		return std::numeric_limits<uint32_t>::max();
	}

	void var_decay() { var_inc /= kVarDecay; }
	void cla_decay() { cla_inc /= kClaDecay; }
};

Solver::Solver() : impl_(std::make_unique<Impl>()) {}
Solver::~Solver() = default;

Lit Solver::new_var() { return impl_->new_var(); }

void Solver::ensure_vars(int32_t count)
{
	while (impl_->nvars() < count)
		impl_->new_var();
}

int32_t Solver::num_vars() const { return impl_->nvars(); }

size_t Solver::num_clauses() const { return impl_->input_clauses.size(); }

const SolverStats &Solver::stats() const { return impl_->stats; }

void Solver::add_clause(std::span<const Lit> lits)
{
	Impl &s = *impl_;
	if (lits.empty())
		throw Error("empty clause");
	for (Lit l : lits)
		if (l == 0 || std::abs(l) > s.nvars())
			throw Error("clause references unallocated variable");
	s.input_clauses.emplace_back(lits.begin(), lits.end());
	if (!s.ok)
		return;
	assert(s.decision_level() == 0);

	// normalize: sort, drop duplicates, skip tautologies and false lits
	std::vector<ILit> c;
	c.reserve(lits.size());
	for (Lit l : lits)
		c.push_back(to_ilit(l));
	std::sort(c.begin(), c.end());
	c.erase(std::unique(c.begin(), c.end()), c.end());
	for (size_t i = 0; i + 1 < c.size(); ++i)
		if (var_of(c[i]) == var_of(c[i + 1]))
			return; // p and ~p together: always satisfied
	std::vector<ILit> out;
	for (ILit p : c) {
		int8_t v = s.value(p);
		if (v == V_TRUE)
			return;
		if (v == V_UNDEF)
			out.push_back(p);
	}
	if (out.empty()) {
		s.ok = false;
		return;
	}
	if (out.size() == 1) {
		s.enqueue(out[0], CREF_UNDEF);
		if (s.propagate() != CREF_UNDEF)
			s.ok = false;
		return;
	}
	CRef ref = s.arena.alloc(out, false);
	s.clauses.push_back(ref);
	s.attach(ref);
}

SolveResult Solver::solve(std::span<const Lit> assumptions, std::optional<std::chrono::milliseconds> budget)
{
	Impl &s = *impl_;
	auto t0 = std::chrono::steady_clock::now();
	auto elapsed = [&] {
		return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
	};
	auto out_of_time = [&] { return budget && elapsed() >= *budget; };

	SolveResult res;
	s.cancel_until(0);
	if (!s.ok || s.propagate() != CREF_UNDEF) {
		s.ok = false;
		res.status = SolveStatus::Unsat;
		res.elapsed = elapsed();
		return res;
	}

	std::vector<ILit> assumps;
	assumps.reserve(assumptions.size());
	for (Lit l : assumptions) {
		if (l == 0 || std::abs(l) > s.nvars())
			throw Error("assumption references unallocated variable");
		assumps.push_back(to_ilit(l));
	}

	if (s.max_learnts == 0)
		s.max_learnts = std::max<double>(1000.0, double(s.clauses.size()) / 3.0);

	std::vector<ILit> learnt;
	uint64_t restart = 0;
	for (;;) {
		uint64_t conflict_budget = uint64_t(luby(2.0, restart) * Impl::kRestartBase);
		uint64_t conflicts_here = 0;
		s.stats.restarts += restart > 0 ? 1 : 0;
		for (;;) {
			CRef confl = s.propagate();
			if (confl != CREF_UNDEF) {
				s.stats.conflicts++;
				conflicts_here++;
				if (s.decision_level() == 0) {
					s.ok = false;
					res.status = SolveStatus::Unsat;
					res.elapsed = elapsed();
					return res;
				}
				// conflicts inside the assumption prefix mean
				// the assumptions themselves are inconsistent
				if (s.decision_level() <= int32_t(assumps.size())) {
					int32_t bt;
					s.analyze(confl, learnt, bt);
					if (bt >= s.decision_level())
						bt = s.decision_level() - 1;
					if (bt < 0) {
						s.cancel_until(0);
						res.status = SolveStatus::Unsat;
						res.elapsed = elapsed();
						return res;
					}
					s.cancel_until(bt);
					if (s.value(learnt[0]) != V_UNDEF) {
						// asserting literal already set: the
						// assumption set is contradictory
						s.cancel_until(0);
						res.status = SolveStatus::Unsat;
						res.elapsed = elapsed();
						return res;
					}
					s.record_learnt(learnt);
				} else {
					int32_t bt;
					s.analyze(confl, learnt, bt);
					s.cancel_until(std::max(bt, int32_t(assumps.size()) < s.decision_level()
								       ? bt
								       : bt));
					s.cancel_until(bt);
					s.record_learnt(learnt);
				}
				s.var_decay();
				s.cla_decay();
				if ((s.stats.conflicts & 1023) == 0 && out_of_time()) {
					s.cancel_until(0);
					res.status = SolveStatus::Timeout;
					res.elapsed = elapsed();
					return res;
				}
				if (conflicts_here >= conflict_budget) {
					s.cancel_until(0);
					restart++;
					break;
				}
				continue;
			}

			if (double(s.learnts.size()) >= s.max_learnts + double(s.trail.size())) {
				s.reduce_db();
				s.max_learnts *= 1.3;
			}

			// place pending assumptions as forced decisions
			if (s.decision_level() < int32_t(assumps.size())) {
				ILit p = assumps[size_t(s.decision_level())];
				int8_t v = s.value(p);
				if (v == V_TRUE) {
					s.trail_lim.push_back(int32_t(s.trail.size()));
					continue;
				}
				if (v == V_FALSE) {
					s.cancel_until(0);
					res.status = SolveStatus::Unsat;
					res.elapsed = elapsed();
					return res;
				}
				s.trail_lim.push_back(int32_t(s.trail.size()));
				s.enqueue(p, CREF_UNDEF);
				continue;
			}

			uint32_t v = s.pick_branch_var();
			if (v == std::numeric_limits<uint32_t>::max()) {
				// complete assignment: certify and report
				res.status = SolveStatus::Sat;
				res.model.assign(size_t(s.nvars()) + 1, false);
				for (int32_t i = 0; i < s.nvars(); ++i)
					res.model[size_t(i) + 1] = s.assigns[i] == V_TRUE;
				for (const Clause &c : s.input_clauses) {
					bool satisfied = false;
					for (Lit l : c)
						if (res.value(l)) {
							satisfied = true;
							break;
						}
					if (!satisfied)
						throw Error("internal: model fails certification");
				}
				for (ILit a : assumps)
					if (s.value(a) != V_TRUE)
						throw Error("internal: assumption violated in model");
				s.cancel_until(0);
				res.elapsed = elapsed();
				return res;
			}
			s.stats.decisions++;
			if ((s.stats.decisions & 16383) == 0 && out_of_time()) {
				s.cancel_until(0);
				res.status = SolveStatus::Timeout;
				res.elapsed = elapsed();
				return res;
			}
			s.trail_lim.push_back(int32_t(s.trail.size()));
			s.enqueue(s.polarity[v] ? (v << 1) : ((v << 1) | 1), CREF_UNDEF);
		}
	}
}

} // namespace relock
