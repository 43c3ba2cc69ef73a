#pragma once

#include "soundtex/dsp.hpp"

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

namespace soundtex
{
	inline constexpr std::size_t kCochlearBands = 32;
	inline constexpr std::size_t kModulationBands = 10;
	inline constexpr std::size_t kCorrelationPairs = 117;
	inline constexpr std::size_t kTextureDim = 502;

	/// Band pairs (j, k), j < k, whose envelope correlation enters the summary.
	/// Ordered by offset first, then by j.
	class CorrelationIndex
	{
	public:
		explicit CorrelationIndex(std::size_t n_bands = kCochlearBands, std::vector<std::size_t> offsets = {1, 2, 3, 5});

		const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const { return pairs_; }
		std::size_t size() const { return pairs_.size(); }
		std::size_t n_bands() const { return n_bands_; }

	private:
		std::size_t n_bands_;
		std::vector<std::pair<std::size_t, std::size_t>> pairs_;
	};

	/// Named segments of the statistical summary. `flat()` concatenates them in
	/// the order mu, sigma_norm, rho, b_norm, loudness.
	struct TextureVector
	{
		std::vector<double> mu;
		std::vector<double> sigma_norm;
		std::vector<double> rho;
		std::vector<double> b_norm;
		double loudness = 0.0;

		std::vector<double> flat() const;
	};

	/// Offsets of each segment inside the flat 502-vector.
	struct TextureLayout
	{
		static constexpr std::size_t mu = 0;
		static constexpr std::size_t sigma_norm = mu + kCochlearBands;
		static constexpr std::size_t rho = sigma_norm + kCochlearBands;
		static constexpr std::size_t b_norm = rho + kCorrelationPairs;
		static constexpr std::size_t loudness = b_norm + kCochlearBands * kModulationBands;
		static constexpr std::size_t end = loudness + 1;
	};
	static_assert(TextureLayout::end == kTextureDim);

	struct MarginalStats
	{
		std::vector<double> mu;
		std::vector<double> sigma_norm;
	};

	/// Per-band time mean and population standard deviation divided by the
	/// mean. A zero-mean band reports sigma_norm = 0.
	MarginalStats marginal_stats(const EnvelopeSet& env);

	/// Pearson correlation for every indexed band pair; bands with zero variance
	/// correlate as 0.
	std::vector<double> crossband_correlations(const EnvelopeSet& env, const CorrelationIndex& index);

	/// sqrt(mean((c_i * m_j)^2) / mu_i^2) for every band i and modulation filter
	/// j, band-major. Bands with mu_i = 0 report 0.
	std::vector<double> modulation_energies(const EnvelopeSet& env, const FilterBank& modulation_bank);

	/// Lower median over time of the Euclidean norm of the band vector.
	double loudness(const EnvelopeSet& env);

	/// All statistics of an EnvelopeSet.
	TextureVector texture_from_envelopes(const EnvelopeSet& env, const FilterBank& modulation_bank);

	/// Full summary of a waveform: cochlear envelopes at 400 Hz, then every
	/// statistic. Requires the default 32-band cochlear and 10-filter modulation
	/// banks.
	TextureVector texture_vector(const Waveform& w, const FilterBank& cochlear_bank, const FilterBank& modulation_bank);
} // namespace soundtex
