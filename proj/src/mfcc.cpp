#include "soundtex/mfcc.hpp"

#include "soundtex/error.hpp"
#include "soundtex/fft.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace soundtex
{
	namespace
	{
		double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
		double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

		std::vector<double> hamming(std::size_t n)
		{
			std::vector<double> w(n, 1.0);
			if (n < 2)
				return w;
			for (std::size_t i = 0; i < n; ++i)
			{
				w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
			}
			return w;
		}
	} // namespace

	std::size_t mfcc_frame_count(std::size_t n_samples, std::size_t window_length, std::size_t hop_length)
	{
		if (window_length == 0 || hop_length == 0)
		{
			throw ParameterError("mfcc window and hop must be positive");
		}
		if (n_samples < window_length)
		{
			throw ParameterError("clip of " + std::to_string(n_samples) + " samples is shorter than one " +
								 std::to_string(window_length) + "-sample window");
		}
		return (n_samples - window_length) / hop_length + 1;
	}

	Matrix mel_filterbank(std::size_t n_filters, std::size_t n_fft, double sample_rate, double max_hz)
	{
		if (n_filters == 0 || n_fft == 0 || !(max_hz > 0.0))
		{
			throw ParameterError("mel filterbank needs filters, a transform size and a positive upper edge");
		}
		const double mel_max = hz_to_mel(max_hz);
		std::vector<double> edges(n_filters + 2);
		for (std::size_t i = 0; i < edges.size(); ++i)
		{
			edges[i] = mel_to_hz(mel_max * static_cast<double>(i) / static_cast<double>(n_filters + 1));
		}

		const std::size_t bins = n_fft / 2 + 1;
		Matrix weights(n_filters, bins);
		for (std::size_t k = 0; k < n_filters; ++k)
		{
			const double left = edges[k];
			const double center = edges[k + 1];
			const double right = edges[k + 2];
			for (std::size_t b = 0; b < bins; ++b)
			{
				const double hz = fft::bin_frequency(b, n_fft, sample_rate);
				if (hz > left && hz < center)
					weights(k, b) = (hz - left) / (center - left);
				else if (hz >= center && hz < right)
					weights(k, b) = (right - hz) / (right - center);
			}
		}
		return weights;
	}

	Matrix cepstral_basis(std::size_t n_coeffs, std::size_t n_filters)
	{
		Matrix basis(n_coeffs, n_filters);
		const double step = std::numbers::pi / static_cast<double>(n_filters);
		for (std::size_t i = 0; i < n_coeffs; ++i)
		{
			for (std::size_t k = 0; k < n_filters; ++k)
			{
				basis(i, k) = std::cos(static_cast<double>(i + 1) * (static_cast<double>(k) + 0.5) * step);
			}
		}
		return basis;
	}

	std::vector<double> cepstrum(std::span<const double> log_energies, const Matrix& basis)
	{
		if (log_energies.size() != basis.cols())
		{
			throw ParameterError("cepstral basis expects " + std::to_string(basis.cols()) + " log energies, got " +
								 std::to_string(log_energies.size()));
		}
		std::vector<double> out(basis.rows(), 0.0);
		for (std::size_t i = 0; i < basis.rows(); ++i)
		{
			const auto row = basis.row(i);
			double sum = 0.0;
			for (std::size_t k = 0; k < row.size(); ++k)
			{
				sum += log_energies[k] * row[k];
			}
			out[i] = sum;
		}
		return out;
	}

	MfccMatrix mfcc_matrix(const Waveform& w, const MfccConfig& config)
	{
		// Band-limited resampling already removes everything above half the
		// lower rate; the explicit cutoff only matters when it is lower still.
		std::vector<double> signal = resample(w.samples(), w.sample_rate(), config.working_rate);
		if (config.lowpass_hz < 0.5 * std::min<double>(w.sample_rate(), config.working_rate))
		{
			auto spectrum = fft::rfft(signal);
			for (std::size_t k = 0; k < spectrum.size(); ++k)
			{
				if (fft::bin_frequency(k, signal.size(), config.working_rate) >= config.lowpass_hz)
					spectrum[k] = 0.0;
			}
			signal = fft::irfft(spectrum, signal.size());
		}

		const std::size_t n_frames = mfcc_frame_count(signal.size(), config.window_length, config.hop_length);
		const auto window = hamming(config.window_length);
		const Matrix mel = mel_filterbank(config.n_filters, config.window_length, config.working_rate, config.lowpass_hz);
		const Matrix basis = cepstral_basis(config.n_coeffs, config.n_filters);

		MfccMatrix result;
		result.coeffs = Matrix(config.n_coeffs, n_frames);
		result.log_energies = Matrix(config.n_filters, n_frames);
		result.frame_hop = static_cast<double>(config.hop_length) / config.working_rate;
		result.window_length = config.window_length;
		result.working_rate = config.working_rate;

		std::vector<double> frame(config.window_length);
		std::vector<double> log_energies(config.n_filters);
		for (std::size_t f = 0; f < n_frames; ++f)
		{
			const std::size_t start = f * config.hop_length;
			for (std::size_t i = 0; i < config.window_length; ++i)
			{
				frame[i] = signal[start + i] * window[i];
			}
			const auto spectrum = fft::rfft(frame);
			for (std::size_t k = 0; k < config.n_filters; ++k)
			{
				const auto weights = mel.row(k);
				double energy = 0.0;
				for (std::size_t b = 0; b < spectrum.size(); ++b)
				{
					energy += weights[b] * std::norm(spectrum[b]);
				}
				log_energies[k] = std::log(energy + config.log_floor);
				result.log_energies(k, f) = log_energies[k];
			}
			const auto coeffs = cepstrum(log_energies, basis);
			for (std::size_t i = 0; i < config.n_coeffs; ++i)
			{
				result.coeffs(i, f) = coeffs[i];
			}
		}
		return result;
	}

	std::vector<double> flatten(const MfccMatrix& m)
	{
		std::vector<double> out;
		out.reserve(m.coeffs.rows() * m.coeffs.cols());
		for (std::size_t f = 0; f < m.coeffs.cols(); ++f)
		{
			for (std::size_t i = 0; i < m.coeffs.rows(); ++i)
			{
				out.push_back(m.coeffs(i, f));
			}
		}
		return out;
	}

	MfccMatrix unflatten(std::span<const double> flat, std::size_t n_coeffs, const MfccConfig& config)
	{
		if (n_coeffs == 0 || flat.size() % n_coeffs != 0)
		{
			throw ParameterError("flat MFCC vector of length " + std::to_string(flat.size()) +
								 " is not a whole number of " + std::to_string(n_coeffs) + "-coefficient frames");
		}
		MfccMatrix m;
		m.coeffs = Matrix(n_coeffs, flat.size() / n_coeffs);
		m.frame_hop = static_cast<double>(config.hop_length) / config.working_rate;
		m.window_length = config.window_length;
		m.working_rate = config.working_rate;
		for (std::size_t f = 0; f < m.coeffs.cols(); ++f)
		{
			for (std::size_t i = 0; i < n_coeffs; ++i)
			{
				m.coeffs(i, f) = flat[f * n_coeffs + i];
			}
		}
		return m;
	}
} // namespace soundtex
