#include "soundtex/fft.hpp"

#include "soundtex/error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace soundtex::fft
{
	namespace
	{
		enum class PlanKind
		{
			RealForward,
			RealInverse,
			ComplexForward,
			ComplexInverse,
		};

		// Plans are created with FFTW_UNALIGNED so that the same codelets run
		// regardless of buffer address; results are then bit-identical across
		// threads and allocations.
		class PlanCache
		{
		public:
			~PlanCache()
			{
				for (auto& [key, plan] : plans_)
				{
					fftw_destroy_plan(plan);
				}
			}

			fftw_plan get(PlanKind kind, std::size_t n)
			{
				std::lock_guard lock(mutex_);
				const auto key = std::make_pair(kind, n);
				if (auto it = plans_.find(key); it != plans_.end())
				{
					return it->second;
				}

				const int size = static_cast<int>(n);
				const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
				std::vector<double> real_buf(n);
				std::vector<Complex> complex_buf(n);
				std::vector<Complex> complex_out(n);
				auto* cbuf = reinterpret_cast<fftw_complex*>(complex_buf.data());
				auto* cout_buf = reinterpret_cast<fftw_complex*>(complex_out.data());

				fftw_plan plan = nullptr;
				switch (kind)
				{
				case PlanKind::RealForward:
					plan = fftw_plan_dft_r2c_1d(size, real_buf.data(), cbuf, flags);
					break;
				case PlanKind::RealInverse:
					plan = fftw_plan_dft_c2r_1d(size, cbuf, real_buf.data(), flags);
					break;
				case PlanKind::ComplexForward:
					plan = fftw_plan_dft_1d(size, cbuf, cout_buf, FFTW_FORWARD, flags);
					break;
				case PlanKind::ComplexInverse:
					plan = fftw_plan_dft_1d(size, cbuf, cout_buf, FFTW_BACKWARD, flags);
					break;
				}
				if (plan == nullptr)
				{
					throw Error("fftw failed to create a plan");
				}
				plans_.emplace(key, plan);
				return plan;
			}

		private:
			std::mutex mutex_;
			std::map<std::pair<PlanKind, std::size_t>, fftw_plan> plans_;
		};

		PlanCache& plan_cache()
		{
			static PlanCache cache;
			return cache;
		}

		fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

		void require_nonempty(std::size_t n)
		{
			if (n == 0)
			{
				throw ParameterError("fft of an empty sequence");
			}
		}
	} // namespace

	std::vector<Complex> rfft(std::span<const double> x)
	{
		require_nonempty(x.size());
		std::vector<double> in(x.begin(), x.end());
		std::vector<Complex> out(x.size() / 2 + 1);
		fftw_execute_dft_r2c(plan_cache().get(PlanKind::RealForward, x.size()), in.data(), as_fftw(out.data()));
		return out;
	}

	std::vector<double> irfft(std::span<const Complex> spectrum, std::size_t n)
	{
		require_nonempty(n);
		if (spectrum.size() != n / 2 + 1)
		{
			throw ParameterError("irfft: spectrum has " + std::to_string(spectrum.size()) + " bins, expected " +
								 std::to_string(n / 2 + 1));
		}
		// c2r overwrites its input.
		std::vector<Complex> in(spectrum.begin(), spectrum.end());
		std::vector<double> out(n);
		fftw_execute_dft_c2r(plan_cache().get(PlanKind::RealInverse, n), as_fftw(in.data()), out.data());
		const double scale = 1.0 / static_cast<double>(n);
		for (double& v : out)
		{
			v *= scale;
		}
		return out;
	}

	std::vector<Complex> forward(std::span<const Complex> x)
	{
		require_nonempty(x.size());
		std::vector<Complex> in(x.begin(), x.end());
		std::vector<Complex> out(x.size());
		fftw_execute_dft(plan_cache().get(PlanKind::ComplexForward, x.size()), as_fftw(in.data()), as_fftw(out.data()));
		return out;
	}

	std::vector<Complex> inverse(std::span<const Complex> spectrum)
	{
		require_nonempty(spectrum.size());
		std::vector<Complex> in(spectrum.begin(), spectrum.end());
		std::vector<Complex> out(spectrum.size());
		fftw_execute_dft(plan_cache().get(PlanKind::ComplexInverse, spectrum.size()), as_fftw(in.data()), as_fftw(out.data()));
		const double scale = 1.0 / static_cast<double>(spectrum.size());
		for (Complex& v : out)
		{
			v *= scale;
		}
		return out;
	}
} // namespace soundtex::fft
