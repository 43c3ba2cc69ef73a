#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace soundtex::fft
{
	using Complex = std::complex<double>;

	/// Forward real-input DFT; returns the n/2 + 1 non-negative frequency bins.
	std::vector<Complex> rfft(std::span<const double> x);

	/// Inverse of rfft for a signal of length n, including the 1/n scale.
	std::vector<double> irfft(std::span<const Complex> spectrum, std::size_t n);

	/// Forward complex DFT (unscaled).
	std::vector<Complex> forward(std::span<const Complex> x);

	/// Inverse complex DFT, including the 1/n scale.
	std::vector<Complex> inverse(std::span<const Complex> spectrum);

	/// Frequency in Hz of rfft bin `bin` for an n-point transform at `sample_rate`.
	inline double bin_frequency(std::size_t bin, std::size_t n, double sample_rate)
	{
		return static_cast<double>(bin) * sample_rate / static_cast<double>(n);
	}
} // namespace soundtex::fft
