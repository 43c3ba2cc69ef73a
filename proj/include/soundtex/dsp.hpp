#pragma once

#include "soundtex/fft.hpp"
#include "soundtex/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace soundtex
{
	/// Mono sample sequence with its sample rate. Construction validates that the
	/// samples are non-empty and finite and that the rate is positive.
	class Waveform
	{
	public:
		Waveform(std::vector<double> samples, int sample_rate);

		std::span<const double> samples() const { return samples_; }
		int sample_rate() const { return sample_rate_; }
		std::size_t size() const { return samples_.size(); }
		double duration() const { return static_cast<double>(samples_.size()) / sample_rate_; }

	private:
		std::vector<double> samples_;
		int sample_rate_;
	};

	/// Frequency warping applied before evaluating a filter's cosine profile.
	enum class FrequencyScale
	{
		Erb,
		Log2,
	};

	enum class FilterProfile
	{
		LowpassCap,
		Bandpass,
		HighpassCap,
	};

	/// One filter of a bank, described on the warped frequency axis.
	struct FilterShape
	{
		FilterProfile profile;
		double lo;
		double center;
		double hi;
	};

	/// Zero-phase frequency-domain filter bank. The closed-form design is kept so
	/// the bank can be re-sampled onto the bin grid of any signal length; `gains`
	/// is the grid for `signal_length` samples ([n_filters x signal_length/2 + 1]).
	/// Immutable after construction and safe to share between threads.
	class FilterBank
	{
	public:
		FilterBank(FrequencyScale scale, std::vector<FilterShape> shapes, double domain_rate, std::size_t signal_length);

		std::size_t size() const { return shapes_.size(); }
		double domain_rate() const { return domain_rate_; }
		std::size_t signal_length() const { return signal_length_; }
		const Matrix& gains() const { return gains_; }
		const std::vector<double>& center_freqs() const { return center_freqs_; }
		const std::vector<FilterShape>& shapes() const { return shapes_; }

		/// Gain of filter `index` at `hz`, evaluated from the closed form.
		double response(std::size_t index, double hz) const;

		/// Same design evaluated on the bin grid of an n-sample signal.
		FilterBank for_length(std::size_t n) const;

	private:
		double warp(double hz) const;
		double unwarp(double value) const;

		FrequencyScale scale_;
		std::vector<FilterShape> shapes_;
		double domain_rate_;
		std::size_t signal_length_;
		std::vector<double> center_freqs_;
		Matrix gains_;
	};

	/// Compressed subband envelopes, one row per cochlear band.
	struct EnvelopeSet
	{
		Matrix envelopes;
		double envelope_rate = 400.0;
		double compression_exponent = 0.3;

		std::size_t bands() const { return envelopes.rows(); }
		std::size_t frames() const { return envelopes.cols(); }
	};

	/// Glasberg & Moore ERB-rate (ERB number) and its inverse.
	double hz_to_erb_rate(double hz);
	double erb_rate_to_hz(double erb);

	/// Half-cosine bank on an ERB-rate grid: n_subbands - 2 bandpass filters
	/// between f_lo and f_hi plus a lowpass and a highpass cap. The squared gains
	/// sum to one at every frequency.
	FilterBank make_cochlear_bank(std::size_t n_subbands, int sample_rate, double f_lo, double f_hi,
								  std::size_t signal_length);

	/// Default passband: 20 Hz up to min(10 kHz, Nyquist).
	FilterBank make_cochlear_bank(int sample_rate, std::size_t signal_length);

	/// Constant-Q half-cosine bandpass filters on a log2 axis with centres
	/// log-spaced from 0.5 Hz to 200 Hz.
	FilterBank make_modulation_bank(std::size_t n_filters, double envelope_rate, std::size_t signal_length,
									double q = 2.0, double lowest_hz = 0.5, double highest_hz = 200.0);

	/// x + iH(x) by the frequency-domain method: negative frequencies zeroed,
	/// positive ones doubled, DC and Nyquist left as they are.
	std::vector<fft::Complex> analytic_signal(std::span<const double> x);

	/// Band-limited resampling: keeps spectral content strictly below half the
	/// lower of the two rates and re-synthesises round(n * to / from) samples.
	std::vector<double> resample(std::span<const double> x, double from_rate, double to_rate);

	Waveform resample(const Waveform& w, int to_rate);

	/// Zero-pads at the end or centre-crops to exactly n samples.
	std::vector<double> fit_to_length(std::span<const double> x, std::size_t n);

	/// Filters `w` through every band of `bank`, takes the analytic magnitude,
	/// resamples to `envelope_rate` and raises to `exponent`.
	EnvelopeSet subband_envelopes(const Waveform& w, const FilterBank& bank, double envelope_rate = 400.0,
								  double exponent = 0.3);
} // namespace soundtex
