#pragma once

#include "soundtex/cluster.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace soundtex
{
	// Feature store layout (all integers little-endian):
	//   magic        8 bytes  "SNDTEX01"
	//   feature_kind u8       0 = texture, 1 = mfcc
	//   dim          u32
	//   count        u64
	//   clip ids     count x (u32 byte length, UTF-8 bytes)
	//   payload      count x dim float32, row-major
	inline constexpr std::array<char, 8> kFeatureMagic{'S', 'N', 'D', 'T', 'E', 'X', '0', '1'};
	inline constexpr std::size_t kFeatureHeaderSize = 8 + 1 + 4 + 8;

	void write_features(const std::filesystem::path& path, const FeatureSet& fs);
	FeatureSet read_features(const std::filesystem::path& path);

	/// True if the file starts with the feature store magic.
	bool is_feature_store(const std::filesystem::path& path);

	struct ManifestEntry
	{
		std::string clip_id;
		std::string audio_path;
		std::string frame_path;
		double offset_s = 0.0;
		double duration_s = 3.75;

		bool operator==(const ManifestEntry&) const = default;
	};

	inline constexpr const char* kManifestHeader = "clip_id,audio_path,frame_path,offset_s,duration_s";

	/// Comma-separated, header line required, no quoting. Paths are returned as
	/// written. Empty offset/duration fields take the defaults.
	std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
	void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);

	struct LabelsMeta
	{
		std::size_t k = 0;
		std::uint64_t seed = 0;
		FeatureKind kind = FeatureKind::Texture;

		bool operator==(const LabelsMeta&) const = default;
	};

	struct LabelRecord
	{
		std::string clip_id;
		std::string frame_path;
		int label = 0;

		bool operator==(const LabelRecord&) const = default;
	};

	struct LabelsFile
	{
		LabelsMeta meta;
		std::vector<LabelRecord> records; // sorted by clip_id

		bool operator==(const LabelsFile&) const = default;
	};

	/// Header `# k=<k>,seed=<seed>,feature_kind=<kind>` followed by one
	/// `clip_id,frame_path,label` line per clip in clip_id order. `frame_paths`
	/// may be empty, in which case the field is left blank.
	void write_labels(const std::filesystem::path& path, std::span<const std::string> clip_ids,
					  std::span<const std::string> frame_paths, std::span<const int> labels, const LabelsMeta& meta);
	LabelsFile read_labels(const std::filesystem::path& path);

	/// JSON serialization of a fitted model; doubles round-trip exactly.
	void write_model(const std::filesystem::path& path, const ClusterModel& model);
	ClusterModel read_model(const std::filesystem::path& path);
} // namespace soundtex
