#include "soundtex/dsp.hpp"

#include "soundtex/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace soundtex
{
	Waveform::Waveform(std::vector<double> samples, int sample_rate)
		: samples_(std::move(samples)), sample_rate_(sample_rate)
	{
		if (sample_rate_ <= 0)
		{
			throw ParameterError("waveform sample rate must be positive, got " + std::to_string(sample_rate_));
		}
		if (samples_.empty())
		{
			throw ParameterError("waveform has no samples");
		}
		if (!std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); }))
		{
			throw DataError("waveform contains non-finite samples");
		}
	}

	// ---------------- filter banks ----------------

	double hz_to_erb_rate(double hz) { return 21.4 * std::log10(1.0 + 4.37e-3 * hz); }

	double erb_rate_to_hz(double erb) { return (std::pow(10.0, erb / 21.4) - 1.0) / 4.37e-3; }

	FilterBank::FilterBank(FrequencyScale scale, std::vector<FilterShape> shapes, double domain_rate,
						   std::size_t signal_length)
		: scale_(scale), shapes_(std::move(shapes)), domain_rate_(domain_rate), signal_length_(signal_length)
	{
		if (signal_length_ == 0)
		{
			throw ParameterError("filter bank signal length must be positive");
		}
		center_freqs_.reserve(shapes_.size());
		for (const FilterShape& shape : shapes_)
		{
			switch (shape.profile)
			{
			case FilterProfile::LowpassCap:
				center_freqs_.push_back(unwarp(shape.lo));
				break;
			case FilterProfile::Bandpass:
				center_freqs_.push_back(unwarp(shape.center));
				break;
			case FilterProfile::HighpassCap:
				center_freqs_.push_back(unwarp(shape.hi));
				break;
			}
		}

		const std::size_t bins = signal_length_ / 2 + 1;
		gains_ = Matrix(shapes_.size(), bins);
		for (std::size_t bin = 0; bin < bins; ++bin)
		{
			const double hz = fft::bin_frequency(bin, signal_length_, domain_rate_);
			for (std::size_t i = 0; i < shapes_.size(); ++i)
			{
				gains_(i, bin) = response(i, hz);
			}
		}
	}

	double FilterBank::warp(double hz) const
	{
		switch (scale_)
		{
		case FrequencyScale::Erb:
			return hz_to_erb_rate(hz);
		case FrequencyScale::Log2:
			return hz > 0.0 ? std::log2(hz) : -std::numeric_limits<double>::infinity();
		}
		return hz;
	}

	double FilterBank::unwarp(double value) const
	{
		switch (scale_)
		{
		case FrequencyScale::Erb:
			return erb_rate_to_hz(value);
		case FrequencyScale::Log2:
			return std::exp2(value);
		}
		return value;
	}

	double FilterBank::response(std::size_t index, double hz) const
	{
		const FilterShape& shape = shapes_.at(index);
		const double w = warp(hz);
		const double half_pi = 0.5 * std::numbers::pi;

		switch (shape.profile)
		{
		case FilterProfile::LowpassCap:
			if (w <= shape.lo)
				return 1.0;
			if (w >= shape.hi)
				return 0.0;
			return std::cos(half_pi * (w - shape.lo) / (shape.hi - shape.lo));
		case FilterProfile::HighpassCap:
			if (w >= shape.hi)
				return 1.0;
			if (w <= shape.lo)
				return 0.0;
			return std::cos(half_pi * (shape.hi - w) / (shape.hi - shape.lo));
		case FilterProfile::Bandpass:
			if (w <= shape.lo || w >= shape.hi)
				return 0.0;
			return std::cos(std::numbers::pi * (w - shape.center) / (shape.hi - shape.lo));
		}
		return 0.0;
	}

	FilterBank FilterBank::for_length(std::size_t n) const { return FilterBank(scale_, shapes_, domain_rate_, n); }

	FilterBank make_cochlear_bank(std::size_t n_subbands, int sample_rate, double f_lo, double f_hi,
								  std::size_t signal_length)
	{
		if (n_subbands < 3)
		{
			throw ParameterError("cochlear bank needs at least 3 subbands, got " + std::to_string(n_subbands));
		}
		if (sample_rate <= 0)
		{
			throw ParameterError("cochlear bank sample rate must be positive");
		}
		if (!(f_lo > 0.0) || !(f_lo < f_hi))
		{
			throw ParameterError("cochlear bank needs 0 < f_lo < f_hi, got f_lo=" + std::to_string(f_lo) +
								 " f_hi=" + std::to_string(f_hi));
		}
		if (f_hi > sample_rate / 2.0)
		{
			throw ParameterError("cochlear bank f_hi=" + std::to_string(f_hi) + " Hz is above the Nyquist rate " +
								 std::to_string(sample_rate / 2.0) + " Hz");
		}

		// n_bandpass + 2 equally spaced ERB points; bandpass i spans points i-1..i+1.
		const std::size_t n_bandpass = n_subbands - 2;
		const double erb_lo = hz_to_erb_rate(f_lo);
		const double erb_hi = hz_to_erb_rate(f_hi);
		const double step = (erb_hi - erb_lo) / static_cast<double>(n_bandpass + 1);
		std::vector<double> points(n_bandpass + 2);
		for (std::size_t i = 0; i < points.size(); ++i)
		{
			points[i] = erb_lo + step * static_cast<double>(i);
		}
		points.back() = erb_hi;

		std::vector<FilterShape> shapes;
		shapes.reserve(n_subbands);
		shapes.push_back({FilterProfile::LowpassCap, points[0], points[0], points[1]});
		for (std::size_t i = 1; i <= n_bandpass; ++i)
		{
			shapes.push_back({FilterProfile::Bandpass, points[i - 1], points[i], points[i + 1]});
		}
		shapes.push_back({FilterProfile::HighpassCap, points[n_bandpass], points[n_bandpass + 1], points[n_bandpass + 1]});

		return FilterBank(FrequencyScale::Erb, std::move(shapes), sample_rate, signal_length);
	}

	FilterBank make_cochlear_bank(int sample_rate, std::size_t signal_length)
	{
		return make_cochlear_bank(32, sample_rate, 20.0, std::min(10000.0, sample_rate / 2.0), signal_length);
	}

	FilterBank make_modulation_bank(std::size_t n_filters, double envelope_rate, std::size_t signal_length, double q,
									double lowest_hz, double highest_hz)
	{
		if (n_filters < 1)
		{
			throw ParameterError("modulation bank needs at least one filter");
		}
		if (!(envelope_rate > 0.0) || !(q > 0.0) || !(lowest_hz > 0.0) || !(lowest_hz <= highest_hz))
		{
			throw ParameterError("modulation bank needs positive rate and Q and 0 < lowest_hz <= highest_hz");
		}

		// Bandwidth cf/Q split symmetrically in octaves around the centre.
		const double half_width = std::asinh(1.0 / (2.0 * q)) / std::numbers::ln2;
		const double log_lo = std::log2(lowest_hz);
		const double log_hi = std::log2(highest_hz);
		const double step = n_filters > 1 ? (log_hi - log_lo) / static_cast<double>(n_filters - 1) : 0.0;

		std::vector<FilterShape> shapes;
		shapes.reserve(n_filters);
		for (std::size_t j = 0; j < n_filters; ++j)
		{
			const double center = (j + 1 == n_filters && n_filters > 1) ? log_hi : log_lo + step * static_cast<double>(j);
			shapes.push_back({FilterProfile::Bandpass, center - half_width, center, center + half_width});
		}
		return FilterBank(FrequencyScale::Log2, std::move(shapes), envelope_rate, signal_length);
	}

	// ---------------- analytic signal / resampling ----------------

	namespace
	{
		// Analytic signal of a length-n real signal from its rfft bins, optionally
		// weighted by per-bin gains.
		std::vector<fft::Complex> analytic_from_spectrum(std::span<const fft::Complex> spectrum, std::size_t n,
														 std::span<const double> gains = {})
		{
			std::vector<fft::Complex> full(n, fft::Complex{});
			const std::size_t positive_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
			auto gain = [&](std::size_t k) { return gains.empty() ? 1.0 : gains[k]; };

			full[0] = spectrum[0] * gain(0);
			for (std::size_t k = 1; k < positive_end; ++k)
			{
				full[k] = 2.0 * spectrum[k] * gain(k);
			}
			if (n % 2 == 0 && n > 1)
			{
				full[n / 2] = spectrum[n / 2] * gain(n / 2);
			}
			return fft::inverse(full);
		}
	} // namespace

	std::vector<fft::Complex> analytic_signal(std::span<const double> x)
	{
		if (x.size() < 2)
		{
			throw ParameterError("analytic_signal needs at least 2 samples, got " + std::to_string(x.size()));
		}
		const auto spectrum = fft::rfft(x);
		return analytic_from_spectrum(spectrum, x.size());
	}

	std::vector<double> resample(std::span<const double> x, double from_rate, double to_rate)
	{
		if (x.empty())
		{
			throw ParameterError("resample of an empty sequence");
		}
		if (!(from_rate > 0.0) || !(to_rate > 0.0))
		{
			throw ParameterError("resample rates must be positive");
		}
		const std::size_t n = x.size();
		const auto n_out = static_cast<std::size_t>(std::llround(static_cast<double>(n) * to_rate / from_rate));
		if (n_out == 0)
		{
			throw ParameterError("resampling " + std::to_string(n) + " samples to " + std::to_string(to_rate) +
								 " Hz leaves no samples");
		}
		if (n_out == n && from_rate == to_rate)
		{
			return {x.begin(), x.end()};
		}

		const auto spectrum = fft::rfft(x);
		std::vector<fft::Complex> out(n_out / 2 + 1, fft::Complex{});
		const double cutoff = 0.5 * std::min(from_rate, to_rate);
		const double scale = static_cast<double>(n_out) / static_cast<double>(n);
		const std::size_t shared = std::min(spectrum.size(), out.size());
		for (std::size_t k = 0; k < shared; ++k)
		{
			if (fft::bin_frequency(k, n, from_rate) >= cutoff)
			{
				break;
			}
			out[k] = spectrum[k] * scale;
		}
		return fft::irfft(out, n_out);
	}

	Waveform resample(const Waveform& w, int to_rate)
	{
		if (w.sample_rate() == to_rate)
		{
			return w;
		}
		return Waveform(resample(w.samples(), w.sample_rate(), to_rate), to_rate);
	}

	std::vector<double> fit_to_length(std::span<const double> x, std::size_t n)
	{
		if (x.size() >= n)
		{
			const std::size_t start = (x.size() - n) / 2;
			return {x.begin() + static_cast<std::ptrdiff_t>(start), x.begin() + static_cast<std::ptrdiff_t>(start + n)};
		}
		std::vector<double> out(n, 0.0);
		std::copy(x.begin(), x.end(), out.begin());
		return out;
	}

	// ---------------- envelopes ----------------

	EnvelopeSet subband_envelopes(const Waveform& w, const FilterBank& bank, double envelope_rate, double exponent)
	{
		if (w.sample_rate() != bank.domain_rate())
		{
			throw PipelineError("waveform sample rate " + std::to_string(w.sample_rate()) +
								" Hz does not match filter bank rate " + std::to_string(bank.domain_rate()) + " Hz");
		}
		if (!(envelope_rate > 0.0) || !(exponent > 0.0))
		{
			throw ParameterError("envelope rate and compression exponent must be positive");
		}
		if (static_cast<double>(w.size()) * envelope_rate / w.sample_rate() < 1.0)
		{
			throw ParameterError("waveform of " + std::to_string(w.size()) +
								 " samples is shorter than one envelope sample");
		}

		const std::size_t n = w.size();
		const FilterBank sized = bank.signal_length() == n ? bank : bank.for_length(n);
		const auto spectrum = fft::rfft(w.samples());

		EnvelopeSet result;
		result.envelope_rate = envelope_rate;
		result.compression_exponent = exponent;

		std::vector<double> magnitude(n);
		for (std::size_t band = 0; band < sized.size(); ++band)
		{
			const auto analytic = analytic_from_spectrum(spectrum, n, sized.gains().row(band));
			for (std::size_t t = 0; t < n; ++t)
			{
				magnitude[t] = std::abs(analytic[t]);
			}
			auto envelope = resample(magnitude, w.sample_rate(), envelope_rate);
			if (result.envelopes.empty())
			{
				result.envelopes = Matrix(sized.size(), envelope.size());
			}
			auto row = result.envelopes.row(band);
			for (std::size_t t = 0; t < envelope.size(); ++t)
			{
				// Band-limiting can ring slightly below zero next to silence.
				row[t] = std::pow(std::max(envelope[t], 0.0), exponent);
			}
		}
		return result;
	}
} // namespace soundtex
