#pragma once

// Direct-loop reference implementations. They share no code path with the
// library beyond the data types: no FFTs, no cached tables.

#include "soundtex/dsp.hpp"
#include "soundtex/matrix.hpp"

#include <complex>
#include <span>
#include <vector>

namespace soundtex::oracle
{
	double mean(std::span<const double> x);
	double population_sigma(std::span<const double> x);
	double pearson(std::span<const double> a, std::span<const double> b);

	/// O(n^2) DFT and inverse.
	std::vector<std::complex<double>> dft(std::span<const double> x);
	std::vector<double> inverse_dft_real(std::span<const std::complex<double>> spectrum);

	/// b~ for one band and one modulation filter: the filter gain is evaluated
	/// from the bank's closed form at every DFT frequency (negative ones mirrored).
	double modulation_energy(std::span<const double> band, const FilterBank& bank, std::size_t filter);

	/// Lower median of per-frame Euclidean norms.
	double loudness(const Matrix& envelopes);

	/// sum_{k=1..K} X_k cos(i (k - 1/2) pi / K), evaluated term by term.
	double mfcc_coefficient(std::span<const double> log_energies, std::size_t i);

	/// Exhaustive nearest-centroid label (lowest index on ties) and squared distance.
	std::pair<int, double> nearest_centroid(std::span<const double> point, const Matrix& centroids);
} // namespace soundtex::oracle
