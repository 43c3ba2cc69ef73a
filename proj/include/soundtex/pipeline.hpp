#pragma once

#include "soundtex/cluster.hpp"
#include "soundtex/dsp.hpp"
#include "soundtex/mfcc.hpp"
#include "soundtex/store.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace soundtex
{
	inline constexpr double kClipSeconds = 3.75;
	inline constexpr int kWorkingRate = 16000;
	inline constexpr std::size_t kDefaultClusters = 15;

	/// Turns a waveform into one feature row. Holds the filter banks, which are
	/// built once for the fixed clip length and shared read-only by all workers.
	class FeatureExtractor
	{
	public:
		FeatureExtractor(FeatureKind kind, int working_rate = kWorkingRate, double clip_seconds = kClipSeconds,
						 const MfccConfig& mfcc = {});

		FeatureKind kind() const { return kind_; }
		int working_rate() const { return working_rate_; }
		std::size_t clip_samples() const { return clip_samples_; }
		std::size_t dim() const { return dim_; }

		/// Resamples to the working rate, pads or centre-crops to the clip
		/// length, then computes the texture summary or flattened MFCCs.
		std::vector<double> extract(const Waveform& w) const;

	private:
		FeatureKind kind_;
		int working_rate_;
		std::size_t clip_samples_;
		std::optional<FilterBank> cochlear_;
		std::optional<FilterBank> modulation_;
		MfccConfig mfcc_;
		std::size_t dim_ = 0;
	};

	/// Reads the entry's audio (relative paths resolve against `base_dir`) and
	/// cuts the [offset_s, offset_s + duration_s) window.
	Waveform load_clip(const ManifestEntry& entry, const std::filesystem::path& base_dir);

	struct ClipFailure
	{
		std::string clip_id;
		std::string message;
	};

	struct ExtractionResult
	{
		FeatureSet features;                // successful clips, ordered by clip_id
		std::vector<ManifestEntry> entries; // manifest rows matching `features`
		std::vector<ClipFailure> failures;  // ordered by clip_id
	};

	/// Extracts every entry over `workers` threads. Per-clip errors are
	/// collected rather than thrown; output order never depends on scheduling.
	ExtractionResult extract_features(std::span<const ManifestEntry> entries, const std::filesystem::path& base_dir,
									  const FeatureExtractor& extractor, std::size_t workers);

	struct ExtractConfig
	{
		std::filesystem::path manifest_path;
		FeatureKind kind = FeatureKind::Texture;
		int working_rate = kWorkingRate;
		double clip_seconds = kClipSeconds;
		MfccConfig mfcc;
		std::size_t workers = 1;
		std::filesystem::path output_dir;
	};

	struct ExtractReport
	{
		std::size_t extracted = 0;
		std::vector<ClipFailure> failures;
		std::filesystem::path store_path;
	};

	/// Writes <out>/features.bin, <out>/manifest.csv (extracted clips) and, when
	/// clips fail, <out>/failures.csv.
	ExtractReport run_extract(const ExtractConfig& config);

	struct ClusterConfig
	{
		std::filesystem::path store_path;
		std::size_t clusters = kDefaultClusters;
		std::uint64_t seed = 0;
		std::size_t n_init = 10;
		std::size_t workers = 1;
		std::filesystem::path output_dir;
		/// Source of frame paths; defaults to manifest.csv next to the store.
		std::optional<std::filesystem::path> manifest_path;
	};

	struct ClusterReport
	{
		std::vector<std::size_t> cluster_sizes;
		double inertia = 0.0;
		std::size_t n_iters = 0;
		std::filesystem::path labels_path;
		std::filesystem::path model_path;
	};

	/// Standardize, fit k-means and write <out>/labels.csv and <out>/model.json.
	ClusterReport run_cluster(const ClusterConfig& config);

	/// Human-readable summary of a feature store, labels file or model file.
	std::string inspect(const std::filesystem::path& path);
} // namespace soundtex
