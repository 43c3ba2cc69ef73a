#include "soundtex/texture.hpp"

#include "soundtex/error.hpp"
#include "soundtex/fft.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace soundtex
{
	CorrelationIndex::CorrelationIndex(std::size_t n_bands, std::vector<std::size_t> offsets) : n_bands_(n_bands)
	{
		for (std::size_t offset : offsets)
		{
			if (offset == 0)
			{
				throw ParameterError("correlation offsets must be positive");
			}
			for (std::size_t j = 0; j + offset < n_bands; ++j)
			{
				pairs_.emplace_back(j, j + offset);
			}
		}
	}

	std::vector<double> TextureVector::flat() const
	{
		std::vector<double> out;
		out.reserve(mu.size() + sigma_norm.size() + rho.size() + b_norm.size() + 1);
		out.insert(out.end(), mu.begin(), mu.end());
		out.insert(out.end(), sigma_norm.begin(), sigma_norm.end());
		out.insert(out.end(), rho.begin(), rho.end());
		out.insert(out.end(), b_norm.begin(), b_norm.end());
		out.push_back(loudness);
		return out;
	}

	namespace
	{
		void require_frames(const EnvelopeSet& env, std::size_t minimum)
		{
			if (env.frames() < minimum || env.bands() == 0)
			{
				throw ParameterError("envelope set needs at least " + std::to_string(minimum) + " frames, got " +
									 std::to_string(env.frames()));
			}
		}

		double band_mean(std::span<const double> band)
		{
			double sum = 0.0;
			for (double v : band)
			{
				sum += v;
			}
			return sum / static_cast<double>(band.size());
		}

		// Sum of squared deviations from the mean.
		double band_scatter(std::span<const double> band, double mean)
		{
			double sum = 0.0;
			for (double v : band)
			{
				sum += (v - mean) * (v - mean);
			}
			return sum;
		}
	} // namespace

	MarginalStats marginal_stats(const EnvelopeSet& env)
	{
		require_frames(env, 2);
		MarginalStats stats;
		stats.mu.resize(env.bands());
		stats.sigma_norm.resize(env.bands());
		const auto frames = static_cast<double>(env.frames());
		for (std::size_t i = 0; i < env.bands(); ++i)
		{
			const auto band = env.envelopes.row(i);
			const double mean = band_mean(band);
			const double sigma = std::sqrt(band_scatter(band, mean) / frames);
			stats.mu[i] = mean;
			stats.sigma_norm[i] = mean > 0.0 ? sigma / mean : 0.0;
		}
		return stats;
	}

	std::vector<double> crossband_correlations(const EnvelopeSet& env, const CorrelationIndex& index)
	{
		require_frames(env, 1);
		if (index.n_bands() != env.bands())
		{
			throw PipelineError("correlation index built for " + std::to_string(index.n_bands()) +
								" bands, envelope set has " + std::to_string(env.bands()));
		}

		const std::size_t frames = env.frames();
		Matrix centered(env.bands(), frames);
		std::vector<double> scatter(env.bands());
		for (std::size_t i = 0; i < env.bands(); ++i)
		{
			const auto band = env.envelopes.row(i);
			const double mean = band_mean(band);
			auto out = centered.row(i);
			for (std::size_t t = 0; t < frames; ++t)
			{
				out[t] = band[t] - mean;
			}
			scatter[i] = band_scatter(band, mean);
		}

		std::vector<double> rho;
		rho.reserve(index.size());
		for (const auto& [j, k] : index.pairs())
		{
			if (scatter[j] == 0.0 || scatter[k] == 0.0)
			{
				rho.push_back(0.0);
				continue;
			}
			const auto a = centered.row(j);
			const auto b = centered.row(k);
			double cross = 0.0;
			for (std::size_t t = 0; t < frames; ++t)
			{
				cross += a[t] * b[t];
			}
			// (1/T) sum z_j z_k with population sigmas; T cancels.
			const double r = cross / std::sqrt(scatter[j] * scatter[k]);
			rho.push_back(std::clamp(r, -1.0, 1.0));
		}
		return rho;
	}

	std::vector<double> modulation_energies(const EnvelopeSet& env, const FilterBank& modulation_bank)
	{
		require_frames(env, 1);
		if (modulation_bank.domain_rate() != env.envelope_rate)
		{
			throw PipelineError("modulation bank rate " + std::to_string(modulation_bank.domain_rate()) +
								" Hz does not match envelope rate " + std::to_string(env.envelope_rate) + " Hz");
		}

		const std::size_t frames = env.frames();
		const FilterBank sized =
			modulation_bank.signal_length() == frames ? modulation_bank : modulation_bank.for_length(frames);
		const std::size_t n_mod = sized.size();

		std::vector<double> energies(env.bands() * n_mod, 0.0);
		std::vector<fft::Complex> filtered(frames / 2 + 1);
		for (std::size_t i = 0; i < env.bands(); ++i)
		{
			const auto band = env.envelopes.row(i);
			const double mean = band_mean(band);
			if (mean == 0.0)
			{
				continue;
			}
			const auto spectrum = fft::rfft(band);
			for (std::size_t j = 0; j < n_mod; ++j)
			{
				const auto gains = sized.gains().row(j);
				for (std::size_t k = 0; k < spectrum.size(); ++k)
				{
					filtered[k] = spectrum[k] * gains[k];
				}
				const auto signal = fft::irfft(filtered, frames);
				double power = 0.0;
				for (double v : signal)
				{
					power += v * v;
				}
				power /= static_cast<double>(frames);
				energies[i * n_mod + j] = std::sqrt(power / (mean * mean));
			}
		}
		return energies;
	}

	double loudness(const EnvelopeSet& env)
	{
		require_frames(env, 1);
		std::vector<double> norms(env.frames(), 0.0);
		for (std::size_t i = 0; i < env.bands(); ++i)
		{
			const auto band = env.envelopes.row(i);
			for (std::size_t t = 0; t < norms.size(); ++t)
			{
				norms[t] += band[t] * band[t];
			}
		}
		for (double& v : norms)
		{
			v = std::sqrt(v);
		}
		const auto middle = norms.begin() + static_cast<std::ptrdiff_t>((norms.size() - 1) / 2);
		std::nth_element(norms.begin(), middle, norms.end());
		return *middle;
	}

	TextureVector texture_from_envelopes(const EnvelopeSet& env, const FilterBank& modulation_bank)
	{
		TextureVector tv;
		auto marginals = marginal_stats(env);
		tv.mu = std::move(marginals.mu);
		tv.sigma_norm = std::move(marginals.sigma_norm);
		tv.rho = crossband_correlations(env, CorrelationIndex(env.bands()));
		tv.b_norm = modulation_energies(env, modulation_bank);
		tv.loudness = loudness(env);
		return tv;
	}

	TextureVector texture_vector(const Waveform& w, const FilterBank& cochlear_bank, const FilterBank& modulation_bank)
	{
		if (cochlear_bank.size() != kCochlearBands || modulation_bank.size() != kModulationBands)
		{
			throw PipelineError("texture summary needs a " + std::to_string(kCochlearBands) + "-band cochlear bank and a " +
								std::to_string(kModulationBands) + "-filter modulation bank, got " +
								std::to_string(cochlear_bank.size()) + " and " + std::to_string(modulation_bank.size()));
		}
		const EnvelopeSet env = subband_envelopes(w, cochlear_bank, modulation_bank.domain_rate());
		return texture_from_envelopes(env, modulation_bank);
	}
} // namespace soundtex
