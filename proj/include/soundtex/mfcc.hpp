#pragma once

#include "soundtex/dsp.hpp"
#include "soundtex/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace soundtex
{
	struct MfccConfig
	{
		int working_rate = 10000;
		double lowpass_hz = 5000.0;
		std::size_t window_length = 256;
		std::size_t hop_length = 128; // 12.8 ms at 10 kHz
		std::size_t n_filters = 20;
		std::size_t n_coeffs = 20;
		double log_floor = 1e-10;
	};

	/// Cepstral coefficients, one column per frame ([n_coeffs x n_frames]).
	struct MfccMatrix
	{
		Matrix coeffs;
		Matrix log_energies; // [n_filters x n_frames], the X_k feeding the cosine transform
		double frame_hop = 0.0128; // seconds
		std::size_t window_length = 256;
		int working_rate = 10000;

		std::size_t n_frames() const { return coeffs.cols(); }
	};

	/// floor((n_samples - window) / hop) + 1; throws if n_samples < window.
	std::size_t mfcc_frame_count(std::size_t n_samples, std::size_t window_length, std::size_t hop_length);

	/// Triangular mel filters with 50% overlap over [0, max_hz], evaluated on the
	/// rfft grid of an n_fft-point transform ([n_filters x n_fft/2 + 1]).
	Matrix mel_filterbank(std::size_t n_filters, std::size_t n_fft, double sample_rate, double max_hz);

	/// basis(i - 1, k - 1) = cos(i (k - 1/2) pi / K) for i = 1..n_coeffs, k = 1..K.
	Matrix cepstral_basis(std::size_t n_coeffs, std::size_t n_filters);

	/// coeff_i = sum_{k=1..K} X_k cos(i (k - 1/2) pi / K), via `basis`.
	std::vector<double> cepstrum(std::span<const double> log_energies, const Matrix& basis);

	MfccMatrix mfcc_matrix(const Waveform& w, const MfccConfig& config = {});

	/// Frame-major concatenation: all coefficients of frame 0, then frame 1, ...
	std::vector<double> flatten(const MfccMatrix& m);

	/// Inverse of flatten for a known coefficient count.
	MfccMatrix unflatten(std::span<const double> flat, std::size_t n_coeffs, const MfccConfig& config = {});
} // namespace soundtex
