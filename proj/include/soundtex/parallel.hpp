#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace soundtex
{
	/// Runs fn(i) for i in [0, n) over `workers` threads in contiguous chunks.
	/// Each index is visited exactly once; fn must only write state owned by i.
	/// The first exception thrown by any worker is rethrown.
	template <class Fn>
	void parallel_for(std::size_t n, std::size_t workers, Fn&& fn)
	{
		workers = std::max<std::size_t>(1, std::min(workers, n));
		if (workers == 1)
		{
			for (std::size_t i = 0; i < n; ++i)
				fn(i);
			return;
		}

		std::vector<std::exception_ptr> errors(workers);
		{
			std::vector<std::jthread> threads;
			threads.reserve(workers);
			const std::size_t chunk = (n + workers - 1) / workers;
			for (std::size_t w = 0; w < workers; ++w)
			{
				const std::size_t begin = w * chunk;
				const std::size_t end = std::min(n, begin + chunk);
				threads.emplace_back([&, w, begin, end] {
					try
					{
						for (std::size_t i = begin; i < end; ++i)
							fn(i);
					}
					catch (...)
					{
						errors[w] = std::current_exception();
					}
				});
			}
		}
		for (const auto& e : errors)
		{
			if (e)
				std::rethrow_exception(e);
		}
	}

	/// Worker count from hardware concurrency, at least 1.
	inline std::size_t default_workers()
	{
		return std::max<std::size_t>(1, std::thread::hardware_concurrency());
	}
} // namespace soundtex
