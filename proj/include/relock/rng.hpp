#pragma once

#include <cstdint>
#include <vector>

namespace relock {

/// SplitMix64 stream. Self-contained so seeded runs reproduce byte-identical
/// results across standard library implementations.
class Rng {
      public:
	explicit Rng(uint64_t seed) : state_(seed) {}

	uint64_t next()
	{
		uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
		z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
		z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
		return z ^ (z >> 31);
	}

	/// Uniform value in [0, bound) by rejection sampling.
	uint64_t below(uint64_t bound)
	{
		uint64_t threshold = (0 - bound) % bound;
		for (;;) {
			uint64_t r = next();
			if (r >= threshold)
				return r % bound;
		}
	}

	bool coin() { return next() & 1; }

	double unit() { return double(next() >> 11) * 0x1.0p-53; }

	/// k distinct values sampled from [0, n) in ascending order.
	std::vector<uint64_t> distinct(uint64_t n, uint64_t k);

	/// Derives an independent stream, e.g. one per worker or scenario.
	Rng fork(uint64_t salt)
	{
		Rng r(state_ ^ (0xD1B54A32D192ED03ull * (salt + 1)));
		r.next();
		return r;
	}

      private:
	uint64_t state_;
};

inline std::vector<uint64_t> Rng::distinct(uint64_t n, uint64_t k)
{
	// Floyd's algorithm keeps the sample history small for k << n.
	std::vector<uint64_t> picked;
	picked.reserve(k);
	for (uint64_t j = n - k; j < n; ++j) {
		uint64_t t = below(j + 1);
		bool seen = false;
		for (uint64_t p : picked)
			if (p == t)
				seen = true;
		picked.push_back(seen ? j : t);
	}
	std::sort(picked.begin(), picked.end());
	return picked;
}

} // namespace relock
